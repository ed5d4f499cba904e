#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attpipe {

enum class EventKind { post, comment, like };

std::string_view event_kind_name(EventKind kind);

/// One post/comment/like record from an interaction log.
struct InteractionEvent {
  std::string event_id;
  EventKind kind = EventKind::post;
  std::string actor_id;
  std::optional<std::string> parent_id;  // the post/comment acted on
  std::optional<std::string> text;       // posts/comments only
  std::optional<int> label;              // analyst attitude of a comment: -1/0/+1
  std::string timestamp;                 // ISO-8601, kept verbatim
};

/// Ordered list of lowercase stems; a text is on topic when some token of the
/// case-folded, NFC-normalized text starts with one of the stems.
class TopicLexicon {
 public:
  explicit TopicLexicon(std::vector<std::string> stems);

  const std::vector<std::string>& stems() const { return stems_; }
  const std::vector<std::u32string>& folded() const { return folded_; }

  // built-in stem lists used by the default pipeline
  static const TopicLexicon& covid();
  static const TopicLexicon& masks();

  static TopicLexicon from_stem_file(std::istream& in);

 private:
  std::vector<std::string> stems_;        // as given
  std::vector<std::u32string> folded_;    // case-folded + NFC code points
};

bool match_topic(std::string_view text, const TopicLexicon& lexicon);

/// Sign of the label sum; empty input or a tie gives 0.
int derive_comment_attitude(std::span<const int> labels);

/// Sign of the liked-label sum; empty input or a tie gives no value.
std::optional<int> derive_like_attitude(std::span<const int> liked_labels);

struct UserProfile {
  std::string user_id;
  std::optional<int> age;
  std::optional<int> gender;  // 0 = female, 1 = male
  long friend_count = 0;
  std::vector<std::string> subscriptions;
};

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct LineLogSummary {
  std::size_t lines = 0;      // non-blank lines seen
  std::size_t parsed = 0;
  std::size_t malformed = 0;  // skipped, detailed in issues
  std::vector<ParseIssue> issues;
};

// Line-delimited JSON readers; malformed lines are skipped and reported with
// their line number. Unknown fields are ignored.
std::vector<InteractionEvent> read_event_log(std::istream& in, LineLogSummary& summary);
std::vector<UserProfile> read_profiles(std::istream& in, LineLogSummary& summary);

/// Per-user attitude signals derived from one interaction log.
struct UserSignals {
  std::string user_id;
  std::optional<int> comment_attitude;  // present iff the user wrote on-topic comments
  std::optional<int> like_attitude;     // present iff their qualifying likes resolve to a sign
};

struct SignalStats {
  std::size_t topic_posts = 0;      // posts matching the post lexicon
  std::size_t topic_comments = 0;   // comments in the qualifying set
  std::size_t commenters = 0;       // users with a comment signal
  std::size_t likers = 0;           // users with a decided like signal
  std::size_t both_signals = 0;
};

/// Derives (comment_attitude, like_attitude) per user. A comment qualifies
/// when its root post matches post_lexicon and its own text matches
/// comment_lexicon; a like qualifies when it targets a qualifying comment
/// with a nonzero label. Users with neither signal are omitted. Output is
/// sorted by user_id.
std::vector<UserSignals> derive_signals(std::span<const InteractionEvent> events,
                                        const TopicLexicon& post_lexicon,
                                        const TopicLexicon& comment_lexicon,
                                        SignalStats* stats = nullptr);

}  // namespace attpipe
