#include "attpipe/ideology.hpp"

#include <algorithm>
#include <stdexcept>

#include "attpipe/csv.hpp"

namespace attpipe {

SourceBiasTable SourceBiasTable::from_csv(std::istream& in) {
  CsvTable csv = read_csv(in, "bias table");
  const int id_col = csv.column("source_id");
  const int bias_col = csv.column("bias");
  if (id_col < 0 || bias_col < 0)
    throw std::runtime_error("bias table requires header columns source_id,bias");
  SourceBiasTable table;
  for (const auto& row : csv.rows) {
    const double bias = parse_double_field(row[static_cast<std::size_t>(bias_col)], "bias");
    if (bias < 0.0 || bias > 1.0)
      throw std::runtime_error("bias outside [0,1] for source " +
                               row[static_cast<std::size_t>(id_col)]);
    table.bias[row[static_cast<std::size_t>(id_col)]] = bias;
  }
  if (table.bias.empty()) throw std::runtime_error("bias table is empty");
  return table;
}

std::optional<IdeologyScore> estimate_x(std::span<const std::string> subscriptions,
                                        const SourceBiasTable& table) {
  // Deduplicate, then sort the matches so the mean is bit-exactly independent
  // of the subscription order.
  std::vector<std::string_view> matched;
  for (const auto& source : subscriptions) {
    if (table.bias.count(source)) matched.push_back(source);
  }
  std::sort(matched.begin(), matched.end());
  matched.erase(std::unique(matched.begin(), matched.end()), matched.end());
  if (matched.empty()) return std::nullopt;

  double sum = 0.0;
  for (const auto source : matched) sum += table.bias.at(std::string(source));
  return IdeologyScore{sum / static_cast<double>(matched.size()),
                       static_cast<int>(matched.size())};
}

std::string_view group_name(PoliticalGroup g) {
  switch (g) {
    case PoliticalGroup::conservative: return "conservative";
    case PoliticalGroup::moderate: return "moderate";
    case PoliticalGroup::oppositionist: return "oppositionist";
  }
  return "?";
}

PoliticalGroup classify_group(double x, double cutoff_low, double cutoff_high) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("classify_group: x outside [0,1]");
  if (!(cutoff_low > 0.0 && cutoff_low < cutoff_high && cutoff_high < 1.0))
    throw std::domain_error("classify_group: cutoffs must satisfy 0 < low < high < 1");
  if (x < cutoff_low) return PoliticalGroup::conservative;
  if (x > cutoff_high) return PoliticalGroup::oppositionist;
  return PoliticalGroup::moderate;
}

}  // namespace attpipe
