#include <random>

#include "doctest.h"
#include "mapfsplit/ecbs.hpp"
#include "mapfsplit/errors.hpp"
#include "oracles/joint_oracle.hpp"
#include "test_helpers.hpp"

using namespace mapfsplit;
using testutil::empty_grid;
using testutil::grid;

namespace {

// Independent collision check used to judge solver output here.
bool collision_free(const Instance& inst, const Plan& plan) {
  const int T = plan.horizon();
  for (std::size_t i = 0; i < plan.paths.size(); ++i) {
    if (plan.paths[i].front() != inst.robots()[i].start) return false;
    if (plan.paths[i].back() != inst.robots()[i].goal) return false;
    for (int t = 1; t <= T; ++t) {
      const Vertex a = plan.paths[i][static_cast<std::size_t>(t - 1)];
      const Vertex b = plan.paths[i][static_cast<std::size_t>(t)];
      if (std::abs(a.col - b.col) + std::abs(a.row - b.row) > 1) return false;
    }
    for (std::size_t j = i + 1; j < plan.paths.size(); ++j) {
      for (int t = 0; t <= T; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        if (plan.paths[i][ut] == plan.paths[j][ut]) return false;
        if (t > 0 && plan.paths[i][ut] == plan.paths[j][ut - 1] &&
            plan.paths[j][ut] == plan.paths[i][ut - 1]) {
          return false;
        }
      }
    }
  }
  return true;
}

Instance tiny_instance() {
  return Instance(empty_grid(6, 4), {{{1, 4}, {5, 4}}, {{3, 3}, {4, 2}}, {{6, 4}, {5, 1}}});
}

SolverOptions opts(Objective o, double w) {
  SolverOptions s;
  s.objective = o;
  s.w = w;
  return s;
}

}  // namespace

TEST_CASE("detect_first_conflict") {
  CHECK_FALSE(detect_first_conflict({{{1, 1}, {2, 1}}, {{1, 2}, {2, 2}}}).has_value());
  const auto v = detect_first_conflict({{{1, 1}, {2, 1}, {3, 1}}, {{3, 2}, {3, 3}, {3, 1}}});
  REQUIRE(v.has_value());
  CHECK(v->kind == Conflict::Kind::kVertex);
  CHECK(v->time == 2);
  CHECK(v->location == Vertex{3, 1});
  const auto e = detect_first_conflict({{{1, 1}, {1, 1}, {2, 1}}, {{3, 1}, {2, 1}, {1, 1}}});
  REQUIRE(e.has_value());
  CHECK(e->kind == Conflict::Kind::kEdge);
  CHECK(e->time == 2);
  CHECK(e->location == Vertex{1, 1});
  CHECK(e->other == Vertex{2, 1});
  // Shorter paths wait at their last vertex.
  const auto rest = detect_first_conflict({{{2, 1}}, {{1, 1}, {1, 1}, {2, 1}}});
  REQUIRE(rest.has_value());
  CHECK(rest->time == 2);
  // Ties: lowest pair first, vertex before edge at the same pair and time.
  const auto tie = detect_first_conflict(
      {{{1, 1}, {2, 1}}, {{3, 1}, {2, 1}}, {{5, 1}, {6, 1}}, {{6, 1}, {5, 1}}});
  REQUIRE(tie.has_value());
  CHECK(tie->i == 0);
  CHECK(tie->j == 1);
  const auto pairs = detect_first_conflict(
      {{{5, 1}, {6, 1}}, {{1, 1}, {2, 1}}, {{6, 1}, {5, 1}}, {{3, 1}, {2, 1}}});
  REQUIRE(pairs.has_value());
  CHECK(pairs->i == 0);
  CHECK(pairs->j == 2);
  CHECK(pairs->kind == Conflict::Kind::kEdge);
}

TEST_CASE("single robot equals bfs distance") {
  const auto inst = generate_random(10, 10, 0.2, 1, 4);
  const auto r = solve(inst, {});
  REQUIRE(r.solved());
  CHECK(r.objective == oracle::bfs_distance(inst.graph(), inst.robots()[0].start, inst.robots()[0].goal));
  CHECK(r.lower_bound == r.objective);
}

TEST_CASE("corridor with a side pocket") {
  // Row 1 is a corridor, (2,2) is the only pocket.
  const auto g = grid({"...", "@.@"});
  const Instance inst(g, {{{1, 1}, {3, 1}}, {{3, 1}, {1, 1}}});
  const auto expected = oracle::joint_makespan(inst);
  REQUIRE(expected.has_value());
  const auto r = solve(inst, {});
  REQUIRE(r.solved());
  CHECK(r.objective == *expected);
  CHECK(collision_free(inst, r.plan));
  const auto soc = solve(inst, opts(Objective::kSumOfCosts, 1.0));
  REQUIRE(soc.solved());
  CHECK(soc.objective == *oracle::joint_soc(inst));
}

TEST_CASE("6x4 three-robot instance") {
  const auto inst = tiny_instance();
  const auto r = solve(inst, {});
  REQUIRE(r.solved());
  CHECK(r.objective == *oracle::joint_makespan(inst));
  CHECK_FALSE(detect_first_conflict(r.plan.paths).has_value());
  CHECK(collision_free(inst, r.plan));
}

TEST_CASE("w=1 matches the joint oracle on small instances") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const int w = 2 + static_cast<int>(rng() % 4);
    const int h = 2 + static_cast<int>(rng() % 4);
    const std::size_t n = 1 + rng() % std::min<std::size_t>(3, static_cast<std::size_t>(w * h / 2));
    Instance inst = generate_random(w, h, 0.1, n, rng());
    const auto mk = oracle::joint_makespan(inst);
    SolverOptions o = opts(Objective::kMakespan, 1.0);
    o.budget.time_limit = std::chrono::milliseconds(5000);
    const auto r = solve(inst, o);
    if (!mk) {
      CHECK_FALSE(r.solved());
      continue;
    }
    REQUIRE(r.solved());
    CHECK(r.objective == *mk);
    CHECK(collision_free(inst, r.plan));
    o.objective = Objective::kSumOfCosts;
    const auto s = solve(inst, o);
    REQUIRE(s.solved());
    CHECK(s.objective == *oracle::joint_soc(inst));
  }
}

TEST_CASE("ecbs bounded suboptimality and determinism") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = generate_random(12, 12, 0.1, 10, seed);
    for (Objective obj : {Objective::kMakespan, Objective::kSumOfCosts}) {
      const auto r = solve(inst, opts(obj, 1.5));
      REQUIRE(r.solved());
      CHECK(collision_free(inst, r.plan));
      CHECK(r.lower_bound <= r.objective);
      CHECK(r.objective <= 1.5 * r.lower_bound + 1e-9);
      const auto again = solve(inst, opts(obj, 1.5));
      CHECK(again.plan == r.plan);
    }
  }
}

TEST_CASE("unsolvable swap times out instead of claiming infeasibility") {
  const Instance inst(grid({".."}), {{{1, 1}, {2, 1}}, {{2, 1}, {1, 1}}});
  SolverOptions o;
  o.budget.time_limit = std::chrono::milliseconds(300);
  o.budget.node_limit = 2000;
  const auto r = solve(inst, o);
  CHECK_FALSE(r.solved());
  CHECK(r.status != SolveStatus::kSolved);
}

TEST_CASE("unreachable goal fails") {
  const Instance inst(grid({".@."}), {{{1, 1}, {1, 1}}});
  CHECK(solve(inst, {}).solved());
  const auto g = grid({".@."});
  // Instances reject nothing about reachability; the solver reports it.
  const Instance bad(g, {{{1, 1}, {3, 1}}});
  CHECK(solve(bad, {}).status == SolveStatus::kFailed);
}

TEST_CASE("parallel batch equals standalone solves") {
  std::vector<Instance> batch;
  for (std::uint64_t s = 0; s < 4; ++s) batch.push_back(generate_random(10, 10, 0.1, 5, s));
  const auto res = solve_parallel_batch(batch, opts(Objective::kMakespan, 1.5), 3);
  REQUIRE(res.results.size() == 4);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(res.results[i].plan == solve(batch[i], opts(Objective::kMakespan, 1.5)).plan);
  }
  const auto one = solve_parallel_batch({batch[0]}, {}, 1);
  CHECK(one.results[0].plan == solve(batch[0], {}).plan);
  const auto singles = solve_parallel_batch(
      {Instance(empty_grid(4, 4), {{{1, 1}, {4, 4}}}), Instance(empty_grid(4, 4), {{{2, 2}, {2, 4}}})},
      {}, 2);
  CHECK(singles.results[0].objective == 6);
  CHECK(singles.results[1].objective == 2);
}
