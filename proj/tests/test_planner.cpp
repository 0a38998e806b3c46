#include <booster/plan/condition.hpp>
#include <booster/plan/schedule_io.hpp>
#include <booster/plan/session_planner.hpp>

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <sstream>

using namespace booster;

namespace {

std::vector<std::size_t> sorted_indices(const std::vector<Condition>& cs) {
  std::vector<std::size_t> v;
  for (const auto& c : cs) v.push_back(c.index());
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<Condition> union_of(const TentativeBlock& block) {
  std::vector<Condition> all;
  for (const auto& s : block) all.insert(all.end(), s.trials.begin(), s.trials.end());
  return all;
}

} // namespace

TEST_CASE("enumerate_conditions", "[plan]") {
  const auto all = enumerate_conditions();
  REQUIRE(all.size() == 72);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].index() == i);
  CHECK(std::count_if(all.begin(), all.end(), [](auto& c) { return c.method.is_original(); }) == 9);
  CHECK(std::count_if(all.begin(), all.end(), [](auto& c) { return c.method.kind() == BoosterKind::LowBooster; }) == 27);
  CHECK(std::is_sorted(all.begin(), all.end()));
}

TEST_CASE("tentative block covers the grid", "[plan][property]") {
  std::vector<std::size_t> expected(72);
  std::iota(expected.begin(), expected.end(), 0);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto block = build_tentative_block(seed);
    CHECK(sorted_indices(union_of(block)) == expected);
    for (const auto& s : block) {
      INFO("seed " << seed);
      CHECK(s.violation().empty());
      CHECK(s.dummy_count() >= 1);
      CHECK(s.dummy_count() <= 2);
    }
  }
}

TEST_CASE("block construction is deterministic per seed", "[plan]") {
  const auto a = build_tentative_block(42);
  const auto b = build_tentative_block(42);
  const auto c = build_tentative_block(43);
  bool same = true;
  bool differs = false;
  for (std::size_t k = 0; k < 8; ++k) {
    same = same && a[k].trials == b[k].trials;
    differs = differs || a[k].trials != c[k].trials;
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("every session repeats exactly one method", "[plan]") {
  // Brute-force check of the pigeonhole property over many seeds.
  for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
    for (const auto& s : build_tentative_block(seed)) {
      std::map<std::size_t, int> counts;
      for (const auto& c : s.trials) ++counts[c.method.index()];
      int twice = 0;
      for (auto [m, n] : counts) {
        CHECK(n <= 2);
        twice += n == 2;
      }
      CHECK(twice == 1);
    }
  }
}

TEST_CASE("participant plan", "[plan]") {
  const auto block = build_tentative_block(5);
  const auto plan = build_participant_plan("P1", block, {0, 3, 6}, 99);

  SECTION("playlist is a permutation of the three sessions") {
    REQUIRE(plan.playlist.size() == 27);
    std::vector<Condition> expected;
    for (auto s : {0, 3, 6}) expected.insert(expected.end(), block[s].trials.begin(), block[s].trials.end());
    std::vector<Condition> got;
    for (const auto& t : plan.playlist) got.push_back(t.condition);
    CHECK(sorted_indices(got) == sorted_indices(expected));
  }
  SECTION("practice is an unassigned session") {
    CHECK(plan.practice.size() == 9);
    CHECK(plan.practice_session != 0);
    CHECK(plan.practice_session != 3);
    CHECK(plan.practice_session != 6);
  }
  SECTION("different seeds give different orders over the same multiset") {
    const auto other = build_participant_plan("P1", block, {0, 3, 6}, 100);
    std::vector<Condition> a;
    std::vector<Condition> b;
    for (const auto& t : plan.playlist) a.push_back(t.condition);
    for (const auto& t : other.playlist) b.push_back(t.condition);
    CHECK(a != b);
    CHECK(sorted_indices(a) == sorted_indices(b));
  }
  SECTION("invalid session choices") {
    CHECK_THROWS_AS(build_participant_plan("P1", block, {1, 1, 2}, 1), ParameterError);
    CHECK_THROWS_AS(build_participant_plan("P1", block, {1, 2, 8}, 1), ParameterError);
    CHECK_THROWS_AS(build_participant_plan("P1", block, {1, 2, 3}, 1, 2), ParameterError);
  }
}

TEST_CASE("sixteen-participant rotation schedules every condition six times", "[plan]") {
  const auto table = AssignmentTable::rotation(16);
  for (auto u : table.usage()) CHECK(u == 6);
  for (std::uint64_t seed : {1ull, 17ull, 123456789ull}) {
    const auto schedule = build_schedule(seed, table);
    std::size_t total = 0;
    for (const auto& p : schedule.plans) total += p.playlist.size();
    CHECK(total == 432);
    for (auto n : schedule.condition_counts()) CHECK(n == 6);
  }
}

TEST_CASE("assignment table parsing", "[plan]") {
  std::istringstream ok("# id s1 s2 s3\nP1 0 1 2\nP2 3 4 5  # trailing comment\n\n");
  const auto t = AssignmentTable::parse(ok);
  REQUIRE(t.participants.size() == 2);
  CHECK(t.sessions[1] == std::array<std::size_t, 3>{3, 4, 5});
  std::istringstream short_line("P1 0 1\n");
  CHECK_THROWS_AS(AssignmentTable::parse(short_line), FormatError);
  std::istringstream dup("P1 0 1 2\nP1 3 4 5\n");
  CHECK_THROWS_AS(AssignmentTable::parse(dup), FormatError);
}

TEST_CASE("schedule file", "[plan][schedule]") {
  const auto schedule = build_schedule(3, AssignmentTable::rotation(2));
  std::stringstream ss;
  write_schedule(ss, schedule);
  const auto parsed = read_schedule(ss);
  REQUIRE(parsed.size() == 2);
  const auto& p1 = parsed.at("P1");
  REQUIRE(p1.size() == 36);
  CHECK(std::count_if(p1.begin(), p1.end(), [](auto& t) { return !t.scored; }) == 9);
  const auto flat = flatten(*schedule.find("P1"));
  for (std::size_t i = 0; i < flat.size(); ++i) {
    CHECK(p1[i].condition == flat[i].condition);
    CHECK(p1[i].run_position() == i);
    CHECK(p1[i].seed == flat[i].seed);
  }

  SECTION("malformed input") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_schedule(empty), FormatError);
    std::istringstream junk("{not json}\n");
    CHECK_THROWS_AS(read_schedule(junk), FormatError);
    std::istringstream bad_method(R"({"schema":1,"participant":"P1","session":0,"trial":0,"signal":"A","noise":"A","method":"Mid","fc":250,"scored":false,"seed":1})");
    CHECK_THROWS_AS(read_schedule(bad_method), FormatError);
    std::istringstream gap(R"({"schema":1,"participant":"P1","session":0,"trial":1,"signal":"A","noise":"A","method":"Low","fc":250,"scored":false,"seed":1})");
    CHECK_THROWS_AS(read_schedule(gap), FormatError);
  }
}
