// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "mtlmon/driver.hpp"
#include "mtlmon/errors.hpp"
#include "mtlmon/oracle.hpp"
#include "support.hpp"

using namespace mtlmon;
using testsupport::make_trace;
using testsupport::random_trace;

namespace {

const char* kTwoDiamonds = "F[0,1] !ap1 | F[1,4] ap2";

VerdictStream stream(std::initializer_list<bool> v) { return {v}; }

}  // namespace

TEST_SUITE("driver") {
  TEST_CASE("compare") {
    const auto oracle = stream({true, false, true, true});
    // Trace of 6 events, latency 2: four verdicts are due.
    const std::vector<Verdict> good = {{0, true}, {1, false}, {2, true},
                                       {3, true}};
    CHECK(compare(oracle, good, 6, 2).empty());

    const std::vector<Verdict> wrong = {{0, true}, {1, true}, {2, true},
                                        {3, true}};
    CHECK(compare(oracle, wrong, 6, 2) ==
          std::vector<Mismatch>{{1, false, true}});

    const std::vector<Verdict> missing = {{0, true}, {2, true}, {3, true}};
    CHECK(compare(oracle, missing, 6, 2) ==
          std::vector<Mismatch>{{1, false, std::nullopt}});

    const std::vector<Verdict> extra = {{0, true}, {1, false}, {2, true},
                                        {3, true}, {4, true}};
    CHECK(compare(oracle, extra, 6, 2) ==
          std::vector<Mismatch>{{4, std::nullopt, true}});

    // Fewer verdicts due than the oracle defines.
    CHECK(compare(oracle, {good.data(), 2}, 4, 2).empty());
  }

  TEST_CASE("widen") {
    const Trace t = make_trace(1, {{1}, {0}});
    const Trace w = widen(t, 3);
    CHECK(w.width() == 3);
    CHECK(w.at(0, 0));
    CHECK_FALSE(w.at(0, 2));
    CHECK_THROWS_AS(widen(w, 2), TraceError);
  }

  TEST_CASE("two-diamond formula matches the oracle") {
    std::mt19937_64 rng(71);
    for (int i = 0; i < 20; ++i) {
      const Trace t = random_trace(rng, 3, 64);
      const RunReport r = check_formula(parse(kTwoDiamonds), FabricConfig{}, t);
      CHECK(r.ok());
      CHECK(r.reported_latency == 7);
      CHECK(r.verdicts.size() == 64 - 7);
      CHECK(r.steady_throughput());
    }
  }

  TEST_CASE("forcing the left diamond to its minimum head misaligns time") {
    const HeadOverride force[] = {{2, 2}};
    const Trace t = make_trace(
        3, {{0, 1, 0}, {0, 1, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0},
            {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
    const RunReport balanced = check_formula(parse(kTwoDiamonds), FabricConfig{}, t);
    CHECK(balanced.ok());
    const RunReport r = check_formula(parse(kTwoDiamonds), FabricConfig{}, t, force);
    REQUIRE_FALSE(r.ok());
    CHECK(r.mismatches.front() == Mismatch{0, false, true});
  }

  TEST_CASE("the misaligned root combines the left verdict one step ahead") {
    const HeadOverride force[] = {{2, 2}};
    const Formula left = parse("F[0,1] !ap1");
    const Formula right = parse("F[1,4] ap2");
    std::mt19937_64 rng(73);
    for (int i = 0; i < 20; ++i) {
      const Trace t = random_trace(rng, 3, 64);
      const RunReport r = check_formula(parse(kTwoDiamonds), FabricConfig{}, t, force);
      CHECK(r.reported_latency == 7);
      const auto l = oracle_verdicts(left, t).values;
      const auto rv = oracle_verdicts(right, t).values;
      for (const auto& v : r.verdicts) {
        if (v.time + 1 < l.size() && v.time < rv.size()) {
          CHECK(v.value == (l[v.time + 1] || rv[v.time]));
        }
      }
    }
  }

  TEST_CASE("constant formulas bypass the fabric") {
    const Trace t = make_trace(1, {{1}, {0}, {1}, {1}, {0}});
    RunReport r = check_formula(parse("G[0,3] true"), FabricConfig{}, t);
    CHECK(r.ok());
    CHECK(r.constant == true);
    CHECK(r.verdicts.size() == 2);
    r = check_formula(parse("!true | !true"), FabricConfig{}, t);
    CHECK(r.ok());
    CHECK(r.constant == false);
    CHECK(r.verdicts.size() == 5);
  }

  TEST_CASE("check surfaces upstream errors") {
    const Trace t = make_trace(1, {{1}});
    CHECK_THROWS_AS(check_formula(parse("ap3"), FabricConfig{}, t),
                    TraceError);
    const Trace wide(20);
    CHECK_THROWS_AS(check_formula(parse("ap0"), FabricConfig{}, wide),
                    TraceError);
    CHECK_THROWS_AS(check_formula(parse("G[0,300] ap0"), FabricConfig{}, t),
                    AllocationError);
  }

  TEST_CASE("random formulas respect their bounds") {
    std::mt19937_64 rng(79);
    for (int i = 0; i < 500; ++i) {
      const Formula f = random_formula(rng, 1, 3, 2);
      CHECK(depth(f) == 1);
      const Formula g = random_formula(rng, 4, 8, 4);
      CHECK(depth(g) >= 1);
      CHECK(depth(g) <= 4);
      if (auto m = max_ap_index(g)) CHECK(*m < 4);
    }
    CHECK_THROWS_AS(random_formula(rng, 0, 3, 2), std::invalid_argument);
  }

  TEST_CASE("fuzz is deterministic and passes") {
    FuzzOptions o;
    o.seed = 9;
    o.count = 40;
    const FuzzSummary a = fuzz(o);
    const FuzzSummary b = fuzz(o);
    CHECK(a.to_string() == b.to_string());
    CHECK(a.ok());
    CHECK(a.formulas == 80);
    CHECK(a.passed == 80);
  }

  TEST_CASE("random formulas are reproducible from the seed") {
    std::mt19937_64 r1(5);
    std::mt19937_64 r2(5);
    std::mt19937_64 r3(6);
    bool differs = false;
    for (int i = 0; i < 50; ++i) {
      const std::string a = to_string(random_formula(r1, 4, 8, 4));
      CHECK(a == to_string(random_formula(r2, 4, 8, 4)));
      differs |= a != to_string(random_formula(r3, 4, 8, 4));
    }
    CHECK(differs);
  }

  TEST_CASE("depth-one fuzzing covers single operators") {
    FuzzOptions o;
    o.seed = 3;
    o.count = 50;
    o.max_depth = 1;
    const FuzzSummary s = fuzz(o);
    CHECK(s.ok());
    CHECK(s.passed == 100);
  }
}
