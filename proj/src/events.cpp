#include "attpipe/events.hpp"

#include <json.hpp>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <istream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace attpipe {

using nlohmann::json;

std::string_view event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::post: return "post";
    case EventKind::comment: return "comment";
    case EventKind::like: return "like";
  }
  return "?";
}

namespace {

// Case fold first, then compose: canonical equivalents and case variants of a
// token map to the same code-point sequence.
std::u32string fold_points(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  s.foldCase();
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC instance unavailable");
  icu::UnicodeString composed = nfc->normalize(s, status);
  if (U_FAILURE(status)) throw std::runtime_error("Unicode normalization failed");
  const int32_t n = composed.countChar32();
  std::u32string points(static_cast<std::size_t>(n), U'\0');
  composed.toUTF32(reinterpret_cast<UChar32*>(points.data()), n, status);
  if (U_FAILURE(status)) throw std::runtime_error("UTF-32 conversion failed");
  return points;
}

bool is_word_char(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }

}  // namespace

TopicLexicon::TopicLexicon(std::vector<std::string> stems) : stems_(std::move(stems)) {
  if (stems_.empty()) throw std::invalid_argument("lexicon needs at least one stem");
  folded_.reserve(stems_.size());
  for (const auto& stem : stems_) {
    std::u32string folded = fold_points(stem);
    if (folded.empty())
      throw std::invalid_argument("lexicon stem empty after normalization");
    folded_.push_back(std::move(folded));
  }
}

const TopicLexicon& TopicLexicon::covid() {
  static const TopicLexicon lexicon({"ковид", "коронавирус", "covid", "coronavirus",
                                     "карантин", "удаленк", "самоизоляция", "пандеми",
                                     "эпидеми"});
  return lexicon;
}

const TopicLexicon& TopicLexicon::masks() {
  static const TopicLexicon lexicon({"маск", "масочн", "намордник"});
  return lexicon;
}

TopicLexicon TopicLexicon::from_stem_file(std::istream& in) {
  std::vector<std::string> stems;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    std::string stem = line.substr(first, last - first + 1);
    if (stem[0] == '#') continue;
    stems.push_back(std::move(stem));
  }
  return TopicLexicon(std::move(stems));
}

bool match_topic(std::string_view text, const TopicLexicon& lexicon) {
  if (text.empty()) return false;
  const std::u32string points = fold_points(text);
  const auto& stems = lexicon.folded();
  const std::size_t n = points.size();
  std::size_t i = 0;
  while (i < n) {
    if (!is_word_char(points[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && is_word_char(points[j])) ++j;
    const std::size_t len = j - i;
    for (const auto& stem : stems) {
      if (stem.size() <= len &&
          std::equal(stem.begin(), stem.end(), points.begin() + static_cast<std::ptrdiff_t>(i)))
        return true;
    }
    i = j;
  }
  return false;
}

int derive_comment_attitude(std::span<const int> labels) {
  long sum = 0;
  for (int label : labels) sum += label;
  return (sum > 0) - (sum < 0);
}

std::optional<int> derive_like_attitude(std::span<const int> liked_labels) {
  if (liked_labels.empty()) return std::nullopt;
  long sum = 0;
  for (int label : liked_labels) sum += label;
  if (sum == 0) return std::nullopt;  // contradictory liker
  return sum > 0 ? +1 : -1;
}

namespace {

std::optional<std::string> optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw std::invalid_argument(std::string(key) + " must be a string");
  return it->get<std::string>();
}

std::optional<int> optional_int(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer())
    throw std::invalid_argument(std::string(key) + " must be an integer");
  return it->get<int>();
}

std::string required_string(const json& j, const char* key) {
  auto value = optional_string(j, key);
  if (!value) throw std::invalid_argument(std::string("missing field ") + key);
  return *std::move(value);
}

InteractionEvent parse_event(const json& j) {
  InteractionEvent event;
  event.event_id = required_string(j, "event_id");
  const std::string kind = required_string(j, "kind");
  if (kind == "post")
    event.kind = EventKind::post;
  else if (kind == "comment")
    event.kind = EventKind::comment;
  else if (kind == "like")
    event.kind = EventKind::like;
  else
    throw std::invalid_argument("unknown kind '" + kind + "'");
  event.actor_id = required_string(j, "actor_id");
  event.parent_id = optional_string(j, "parent_id");
  event.text = optional_string(j, "text");
  event.label = optional_int(j, "label");
  event.timestamp = required_string(j, "timestamp");

  if (event.label && (*event.label < -1 || *event.label > 1))
    throw std::invalid_argument("label outside {-1,0,+1}");
  if (event.kind == EventKind::like) {
    if (event.text || event.label)
      throw std::invalid_argument("like events carry no text or label");
    if (!event.parent_id) throw std::invalid_argument("like events need parent_id");
  }
  if (event.kind == EventKind::comment && !event.parent_id)
    throw std::invalid_argument("comment events need parent_id");
  return event;
}

UserProfile parse_profile(const json& j) {
  UserProfile profile;
  profile.user_id = required_string(j, "user_id");
  profile.age = optional_int(j, "age");
  if (profile.age && *profile.age <= 0) throw std::invalid_argument("age must be > 0");
  profile.gender = optional_int(j, "gender");
  if (profile.gender && *profile.gender != 0 && *profile.gender != 1)
    throw std::invalid_argument("gender must be 0 or 1");
  if (auto it = j.find("friend_count"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer())
      throw std::invalid_argument("friend_count must be an integer");
    profile.friend_count = it->get<long>();
    if (profile.friend_count < 0)
      throw std::invalid_argument("friend_count must be nonnegative");
  }
  if (auto it = j.find("subscriptions"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw std::invalid_argument("subscriptions must be an array");
    for (const auto& entry : *it) {
      if (!entry.is_string())
        throw std::invalid_argument("subscriptions entries must be strings");
      profile.subscriptions.push_back(entry.get<std::string>());
    }
  }
  return profile;
}

template <class T, class Parser>
std::vector<T> read_jsonl(std::istream& in, LineLogSummary& summary, Parser&& parse) {
  std::vector<T> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++summary.lines;
    try {
      records.push_back(parse(json::parse(line)));
      ++summary.parsed;
    } catch (const std::exception& e) {
      ++summary.malformed;
      summary.issues.push_back({lineno, e.what()});
    }
  }
  return records;
}

}  // namespace

std::vector<InteractionEvent> read_event_log(std::istream& in, LineLogSummary& summary) {
  return read_jsonl<InteractionEvent>(in, summary,
                                      [](const json& j) { return parse_event(j); });
}

std::vector<UserProfile> read_profiles(std::istream& in, LineLogSummary& summary) {
  return read_jsonl<UserProfile>(in, summary,
                                 [](const json& j) { return parse_profile(j); });
}

std::vector<UserSignals> derive_signals(std::span<const InteractionEvent> events,
                                        const TopicLexicon& post_lexicon,
                                        const TopicLexicon& comment_lexicon,
                                        SignalStats* stats) {
  std::unordered_map<std::string, const InteractionEvent*> by_id;
  by_id.reserve(events.size());
  for (const auto& event : events)
    if (event.kind != EventKind::like) by_id.emplace(event.event_id, &event);

  std::unordered_set<std::string> topic_posts;
  for (const auto& event : events)
    if (event.kind == EventKind::post && event.text &&
        match_topic(*event.text, post_lexicon))
      topic_posts.insert(event.event_id);

  // comment id -> label (absent label counts as neutral) for comments whose
  // root post is on topic and whose own text matches the comment lexicon
  std::unordered_map<std::string, int> qualifying;
  auto root_is_topic_post = [&](const InteractionEvent& comment) {
    const InteractionEvent* cur = &comment;
    for (int hops = 0; hops < 64; ++hops) {  // hop cap guards malformed cycles
      if (!cur->parent_id) return false;
      if (topic_posts.count(*cur->parent_id)) return true;
      auto it = by_id.find(*cur->parent_id);
      if (it == by_id.end()) return false;
      cur = it->second;
      if (cur->kind == EventKind::post) return false;  // reached an off-topic post
    }
    return false;
  };
  for (const auto& event : events) {
    if (event.kind != EventKind::comment) continue;
    if (!event.text || !match_topic(*event.text, comment_lexicon)) continue;
    if (!root_is_topic_post(event)) continue;
    qualifying.emplace(event.event_id, event.label.value_or(0));
  }

  std::unordered_map<std::string, std::vector<int>> comment_labels;
  std::unordered_map<std::string, std::vector<int>> liked_labels;
  for (const auto& event : events) {
    if (event.kind == EventKind::comment) {
      auto it = qualifying.find(event.event_id);
      if (it != qualifying.end()) comment_labels[event.actor_id].push_back(it->second);
    } else if (event.kind == EventKind::like && event.parent_id) {
      auto it = qualifying.find(*event.parent_id);
      if (it != qualifying.end() && it->second != 0)
        liked_labels[event.actor_id].push_back(it->second);
    }
  }

  std::vector<UserSignals> result;
  std::unordered_set<std::string> seen;
  for (const auto& [user, labels] : comment_labels) {
    UserSignals s;
    s.user_id = user;
    s.comment_attitude = derive_comment_attitude(labels);
    if (auto it = liked_labels.find(user); it != liked_labels.end())
      s.like_attitude = derive_like_attitude(it->second);
    result.push_back(std::move(s));
    seen.insert(user);
  }
  for (const auto& [user, labels] : liked_labels) {
    if (seen.count(user)) continue;
    auto like = derive_like_attitude(labels);
    if (!like) continue;  // contradictory likes and no comments: outside the sample
    result.push_back({user, std::nullopt, like});
  }
  std::sort(result.begin(), result.end(),
            [](const UserSignals& a, const UserSignals& b) { return a.user_id < b.user_id; });

  if (stats) {
    stats->topic_posts = topic_posts.size();
    stats->topic_comments = qualifying.size();
    stats->commenters = comment_labels.size();
    std::size_t likers = 0, both = 0;
    for (const auto& s : result) {
      if (s.like_attitude) {
        ++likers;
        if (s.comment_attitude) ++both;
      }
    }
    stats->likers = likers;
    stats->both_signals = both;
  }
  return result;
}

}  // namespace attpipe
