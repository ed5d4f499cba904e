#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace attpipe {

/// Source identifier -> bias score in [0,1] (1 = oppositional, 0 = conservative).
struct SourceBiasTable {
  std::unordered_map<std::string, double> bias;

  // CSV with required header (source_id,bias)
  static SourceBiasTable from_csv(std::istream& in);
};

struct IdeologyScore {
  double x = 0.0;   // mean bias of the followed known-bias sources
  int support = 0;  // number of distinct subscribed sources with a known bias
};

/// Mean bias over the user's distinct subscriptions found in the table;
/// no value when no subscribed source has a known bias.
std::optional<IdeologyScore> estimate_x(std::span<const std::string> subscriptions,
                                        const SourceBiasTable& table);

enum class PoliticalGroup { conservative, moderate, oppositionist };

std::string_view group_name(PoliticalGroup g);

/// conservative iff x < cutoff_low, oppositionist iff x > cutoff_high,
/// moderate otherwise (boundaries fall to moderate). x outside [0,1] is a
/// domain error.
PoliticalGroup classify_group(double x, double cutoff_low = 0.33, double cutoff_high = 0.66);

}  // namespace attpipe
