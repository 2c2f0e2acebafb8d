#include "doctest.h"
#include "mapfsplit/errors.hpp"
#include "mapfsplit/validation.hpp"
#include "test_helpers.hpp"

using namespace mapfsplit;
using testutil::empty_grid;

namespace {

bool has(const ValidationReport& r, Violation::Kind k) {
  for (const auto& v : r.violations) {
    if (v.kind == k) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("valid single robot plan") {
  const Instance inst(empty_grid(3, 3), {{{1, 1}, {3, 1}}});
  const Plan plan{{{{1, 1}, {2, 1}, {3, 1}}}};
  CHECK(validate(inst, plan).ok());
  const auto m = compute_metrics(inst, plan);
  CHECK(m.makespan == 2);
  CHECK(m.sum_of_costs == 2);
  CHECK(m.ratio_makespan == 1.0);
  CHECK(m.ratio_soc == 1.0);
}

TEST_CASE("identical paths conflict at every step") {
  const Instance inst(empty_grid(3, 3), {{{1, 1}, {3, 1}}, {{1, 2}, {3, 2}}});
  const Path p{{1, 1}, {2, 1}, {3, 1}};
  const auto r = validate(inst, Plan{{p, p}});
  int vertex = 0;
  for (const auto& v : r.violations) vertex += v.kind == Violation::Kind::kVertexConflict;
  CHECK(vertex == 3);
  CHECK(has(r, Violation::Kind::kWrongStart));
  CHECK(has(r, Violation::Kind::kWrongGoal));
  CHECK_THROWS_AS(compute_metrics(inst, Plan{{p, p}}), DomainError);
}

TEST_CASE("diagonal move and swaps") {
  const Instance one(empty_grid(3, 3), {{{1, 1}, {2, 2}}});
  const auto diag = validate(one, Plan{{{{1, 1}, {2, 2}}}});
  REQUIRE(diag.violations.size() == 1);
  CHECK(diag.violations[0].kind == Violation::Kind::kIllegalMove);
  CHECK(diag.violations[0].time == 1);

  const Instance two(empty_grid(2, 1), {{{1, 1}, {2, 1}}, {{2, 1}, {1, 1}}});
  const auto swap = validate(two, Plan{{{{1, 1}, {2, 1}}, {{2, 1}, {1, 1}}}});
  REQUIRE(swap.violations.size() == 1);
  CHECK(swap.violations[0].kind == Violation::Kind::kEdgeConflict);
  CHECK(swap.violations[0].robots == std::vector<std::size_t>{0, 1});
  const auto j = to_json(swap);
  CHECK(j["ok"] == false);
  CHECK(j["violations"][0]["kind"] == "edge_conflict");
  CHECK(j["violations"][0]["time"] == 1);
}

TEST_CASE("structural violations") {
  const Instance inst(empty_grid(3, 3), {{{1, 1}, {3, 1}}, {{1, 2}, {1, 3}}});
  CHECK(has(validate(inst, Plan{{{{1, 1}, {2, 1}, {3, 1}}}}), Violation::Kind::kRobotCount));
  CHECK(has(validate(inst, Plan{{{{1, 1}, {2, 1}, {3, 1}}, {{1, 2}, {1, 3}}}}),
            Violation::Kind::kRaggedHorizon));
  CHECK(has(validate(inst, Plan{{{{1, 1}, {2, 1}, {3, 1}}, {{1, 2}, {1, 3}, {1, 4}}}}),
            Violation::Kind::kNotAVertex));
  CHECK(has(validate(inst, Plan{{{}, {{1, 2}}}}), Violation::Kind::kEmptyPath));
}

TEST_CASE("metrics") {
  const Instance still(empty_grid(3, 3), {{{1, 1}, {1, 1}}, {{2, 2}, {2, 2}}});
  const auto m0 = compute_metrics(still, Plan{{{{1, 1}}, {{2, 2}}}});
  CHECK(m0.makespan == 0);
  CHECK(m0.sum_of_costs == 0);
  CHECK(m0.ratio_makespan == 1.0);
  CHECK(m0.ratio_soc == 1.0);

  // Reaches its goal at t=3, leaves, returns at t=5.
  const Instance back(empty_grid(5, 2), {{{1, 1}, {4, 1}}});
  const Plan wander{{{{1, 1}, {2, 1}, {3, 1}, {4, 1}, {4, 2}, {4, 1}}}};
  const auto m = compute_metrics(back, wander);
  CHECK(m.arrival == std::vector<int>{5});
  CHECK(m.sum_of_costs == 5);
  CHECK(m.lower_bound.makespan == 3);
  CHECK(m.ratio_makespan == doctest::Approx(5.0 / 3.0));

  // Waiting at the goal after arriving costs nothing.
  const Plan padded{{{{1, 1}, {2, 1}, {3, 1}, {4, 1}, {4, 1}}}};
  CHECK(compute_metrics(back, padded).sum_of_costs == 3);
  CHECK(optimality_ratio(0, 0) == 1.0);
}
