#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "attpipe/events.hpp"
#include "attpipe/synth.hpp"

using namespace attpipe;

TEST_CASE("match_topic finds stems as token prefixes") {
  CHECK(match_topic("Маски обязательны", TopicLexicon::masks()));
  CHECK(match_topic("КАРАНТИН продлён", TopicLexicon::covid()));
  CHECK_FALSE(match_topic("", TopicLexicon::covid()));
  CHECK_FALSE(match_topic("обычный пост про погоду", TopicLexicon::covid()));

  // prefix, not substring
  CHECK(match_topic("маскарад", TopicLexicon::masks()));
  CHECK_FALSE(match_topic("полумаска", TopicLexicon::masks()));

  CHECK(match_topic("говорят про covid сегодня", TopicLexicon::covid()));
  CHECK(match_topic("про самоизоляцию и удаленку", TopicLexicon::covid()));
}

TEST_CASE("match_topic is invariant to case and surrounding whitespace") {
  const TopicLexicon& masks = TopicLexicon::masks();
  const char* variants[] = {
      "маски", "МАСКИ", "Маски", "мАсКи", "  маски  ", "\tМАСКИ\n", "маски!", "(маски)",
  };
  for (const char* text : variants) CHECK_MESSAGE(match_topic(text, masks), text);
}

TEST_CASE("match_topic canonicalizes decomposed characters") {
  const TopicLexicon umlaut({"über"});
  // u + combining diaeresis folds and composes to the precomposed form
  CHECK(match_topic("ÜBER alles", umlaut));
  CHECK(match_topic("über", umlaut));
  CHECK_FALSE(match_topic("uber", umlaut));
}

TEST_CASE("lexicon construction validates stems") {
  CHECK_THROWS_AS(TopicLexicon({}), std::invalid_argument);
  CHECK_THROWS_AS(TopicLexicon({"маск", ""}), std::invalid_argument);
}

TEST_CASE("lexicon stem files ignore blanks and comments") {
  std::istringstream in("# mask stems\n маск \n\nмасочн\r\n");
  const TopicLexicon lexicon = TopicLexicon::from_stem_file(in);
  CHECK(lexicon.stems().size() == 2);
  CHECK(match_topic("масочный режим", lexicon));
}

namespace {

// independent sign-of-sum
int reference_attitude(const std::vector<int>& labels) {
  int positives = 0, negatives = 0;
  for (int v : labels) {
    if (v > 0) ++positives;
    if (v < 0) ++negatives;
  }
  if (positives > negatives) return 1;
  if (negatives > positives) return -1;
  return 0;
}

}  // namespace

TEST_CASE("derive_comment_attitude matches enumeration of short label lists") {
  CHECK(derive_comment_attitude(std::vector<int>{-1}) == -1);
  CHECK(derive_comment_attitude(std::vector<int>{+1, +1, 0}) == +1);
  CHECK(derive_comment_attitude(std::vector<int>{+1, -1}) == 0);
  CHECK(derive_comment_attitude(std::vector<int>{}) == 0);

  // every label list of length <= 3
  const int alphabet[3] = {-1, 0, 1};
  std::vector<std::vector<int>> lists = {{}};
  for (int len = 0; len < 3; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& list : lists)
      if (static_cast<int>(list.size()) == len)
        for (int v : alphabet) {
          auto extended = list;
          extended.push_back(v);
          next.push_back(extended);
        }
    lists.insert(lists.end(), next.begin(), next.end());
  }
  CHECK(lists.size() == 40);
  for (const auto& list : lists)
    CHECK(derive_comment_attitude(list) == reference_attitude(list));
}

TEST_CASE("derive_comment_attitude is odd under label negation") {
  Splitmix64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> labels(static_cast<std::size_t>(rng.uniform_int(0, 12)));
    for (auto& v : labels) v = static_cast<int>(rng.uniform_int(-1, 1));
    std::vector<int> negated;
    for (int v : labels) negated.push_back(-v);
    CHECK(derive_comment_attitude(labels) == -derive_comment_attitude(negated));
  }
}

TEST_CASE("derive_like_attitude never reports neutral") {
  CHECK(derive_like_attitude(std::vector<int>{+1, +1}) == +1);
  CHECK_FALSE(derive_like_attitude(std::vector<int>{}).has_value());
  CHECK_FALSE(derive_like_attitude(std::vector<int>{+1, -1}).has_value());

  Splitmix64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> labels(static_cast<std::size_t>(rng.uniform_int(0, 10)));
    for (auto& v : labels) v = rng.uniform01() < 0.5 ? -1 : 1;
    const auto result = derive_like_attitude(labels);
    if (result) CHECK(*result != 0);
  }
}

TEST_CASE("event log reader reports malformed lines and keeps the rest") {
  std::istringstream in(
      R"({"event_id":"p1","kind":"post","actor_id":"page","text":"про ковид","timestamp":"2020-05-01T00:00:00Z"})"
      "\n"
      "garbage line\n"
      R"({"event_id":"c1","kind":"comment","actor_id":"u1","parent_id":"p1","text":"маски","label":1,"timestamp":"2020-05-01T00:00:01Z","extra_field":42})"
      "\n"
      "\n"
      R"({"event_id":"x1","kind":"comment","actor_id":"u2","text":"no parent","timestamp":"t"})"
      "\n"
      R"({"event_id":"x2","kind":"like","actor_id":"u2","parent_id":"c1","label":1,"timestamp":"t"})"
      "\n"
      R"({"event_id":"x3","kind":"comment","actor_id":"u3","parent_id":"p1","label":7,"timestamp":"t"})"
      "\n");
  LineLogSummary summary;
  const auto events = read_event_log(in, summary);
  CHECK(events.size() == 2);  // unknown fields are ignored, not errors
  CHECK(summary.parsed == 2);
  CHECK(summary.malformed == 4);
  REQUIRE(summary.issues.size() == 4);
  CHECK(summary.issues[0].line == 2);
  CHECK(summary.issues[1].line == 5);  // blank line is skipped silently
  CHECK(events[1].label == 1);
}

TEST_CASE("profile reader validates fields") {
  std::istringstream in(
      R"({"user_id":"u1","age":34,"gender":1,"friend_count":10,"subscriptions":["a","b"]})"
      "\n"
      R"({"user_id":"u2"})"
      "\n"
      R"({"user_id":"u3","age":0})"
      "\n"
      R"({"user_id":"u4","gender":5})"
      "\n");
  LineLogSummary summary;
  const auto profiles = read_profiles(in, summary);
  CHECK(profiles.size() == 2);
  CHECK(summary.malformed == 2);
  CHECK(profiles[0].subscriptions.size() == 2);
  CHECK_FALSE(profiles[1].age.has_value());
  CHECK(profiles[1].friend_count == 0);
}

namespace {

InteractionEvent post(const char* id, const char* text) {
  return {id, EventKind::post, "page", std::nullopt, text, std::nullopt, "t"};
}
InteractionEvent comment(const char* id, const char* user, const char* parent,
                         const char* text, std::optional<int> label) {
  return {id, EventKind::comment, user, parent, text, label, "t"};
}
InteractionEvent like(const char* id, const char* user, const char* parent) {
  return {id, EventKind::like, user, parent, std::nullopt, std::nullopt, "t"};
}

}  // namespace

TEST_CASE("derive_signals walks cascades and applies both lexicons") {
  std::vector<InteractionEvent> events = {
      post("p1", "новости про коронавирус"),
      post("p2", "фото природы"),
      // qualifying: mask comment under the topic post
      comment("c1", "alice", "p1", "маски это хорошо", +1),
      // reply chains resolve to the root post
      comment("c2", "bob", "c1", "нет, маски это плохо", -1),
      // off-topic text under the topic post: no comment signal
      comment("c3", "carol", "p1", "просто мнение", +1),
      // mask comment under an off-topic post: no signal
      comment("c4", "dave", "p2", "маски маски", +1),
      // unlabeled mask comment counts as neutral
      comment("c5", "erin", "p1", "масочный режим", std::nullopt),
      // likes
      like("l1", "frank", "c1"),   // +1
      like("l2", "frank", "c2"),   // -1 -> contradictory, no like signal
      like("l3", "grace", "c2"),   // -1
      like("l4", "heidi", "c5"),   // liked a neutral comment: no signal
      like("l5", "alice", "c1"),   // likes own comment, counted
      like("l6", "ivan", "c4"),    // liked comment outside the set: nothing
  };

  SignalStats stats;
  const auto signals = derive_signals(events, TopicLexicon::covid(),
                                      TopicLexicon::masks(), &stats);

  CHECK(stats.topic_posts == 1);
  CHECK(stats.topic_comments == 3);  // c1, c2, c5

  auto find = [&](const char* user) -> const UserSignals* {
    for (const auto& s : signals)
      if (s.user_id == user) return &s;
    return nullptr;
  };

  REQUIRE(find("alice") != nullptr);
  CHECK(find("alice")->comment_attitude == +1);
  CHECK(find("alice")->like_attitude == +1);  // own-comment like counts
  CHECK(find("bob")->comment_attitude == -1);
  CHECK(find("erin")->comment_attitude == 0);
  CHECK(find("grace")->like_attitude == -1);
  CHECK_FALSE(find("grace")->comment_attitude.has_value());

  CHECK(find("carol") == nullptr);
  CHECK(find("dave") == nullptr);
  CHECK(find("frank") == nullptr);  // tie liker with no comments drops out
  CHECK(find("heidi") == nullptr);
  CHECK(find("ivan") == nullptr);

  // sorted output
  for (std::size_t i = 1; i < signals.size(); ++i)
    CHECK(signals[i - 1].user_id < signals[i].user_id);

  CHECK(stats.commenters == 3);  // alice, bob, erin
  CHECK(stats.likers == 2);      // alice, grace
  CHECK(stats.both_signals == 1);
}
