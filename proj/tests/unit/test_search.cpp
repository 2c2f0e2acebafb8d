#include <random>

#include "doctest.h"
#include "mapfsplit/errors.hpp"
#include "mapfsplit/search.hpp"
#include "oracles/joint_oracle.hpp"
#include "test_helpers.hpp"

using namespace mapfsplit;
using testutil::grid;

namespace {

bool legal(const GridGraph& g, const Path& p) {
  for (std::size_t t = 1; t < p.size(); ++t) {
    if (!(p[t] == p[t - 1] || g.adjacent(g.id(p[t]), g.id(p[t - 1])))) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("astar basics") {
  const auto g = GridGraph::empty(5, 5);
  CHECK(astar_shortest(g, {2, 2}, {2, 2}) == Path{{2, 2}});
  const Path p = astar_shortest(g, {1, 1}, {5, 5});
  CHECK(p.size() == 9);
  CHECK(legal(g, p));
  const auto split = grid({".@.", ".@."});
  CHECK_THROWS_AS(astar_shortest(*split, {1, 1}, {3, 1}), NoPathError);
}

TEST_CASE("astar on the 6x4 grid") {
  const auto g = GridGraph::empty(6, 4);
  CHECK(astar_shortest(g, {1, 4}, {5, 4}).size() - 1 ==
        static_cast<std::size_t>(oracle::bfs_distance(g, {1, 4}, {5, 4})));
}

TEST_CASE("astar length matches bfs on random grids") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = generate_random(4 + static_cast<int>(rng() % 13), 4 + static_cast<int>(rng() % 13),
                                      0.2, 1, rng());
    const Robot r = inst.robots()[0];
    const Path p = astar_shortest(inst.graph(), r.start, r.goal);
    CHECK(static_cast<int>(p.size()) - 1 == oracle::bfs_distance(inst.graph(), r.start, r.goal));
    CHECK(p.front() == r.start);
    CHECK(p.back() == r.goal);
    CHECK(legal(inst.graph(), p));
    const auto st = constrained_spacetime_search(inst.graph(), r.start, r.goal, {}, {});
    CHECK(st.cost() == static_cast<int>(p.size()) - 1);
    CHECK(st.lower_bound == st.cost());
    CHECK(st.path == constrained_spacetime_search(inst.graph(), r.start, r.goal, {}, {}).path);
  }
}

TEST_CASE("vertex constraint forces a wait") {
  const auto g = GridGraph::empty(3, 1);
  const auto r = constrained_spacetime_search(g, {1, 1}, {3, 1},
                                              {Constraint::vertex(0, {2, 1}, 1)}, {});
  CHECK(r.cost() == 3);
  CHECK(r.lower_bound == 3);
  CHECK(r.path[1] != Vertex{2, 1});
}

TEST_CASE("edge and goal constraints") {
  const auto g = GridGraph::empty(3, 1);
  const auto e = constrained_spacetime_search(g, {1, 1}, {2, 1},
                                              {Constraint::edge(0, {1, 1}, {2, 1}, 1)}, {});
  CHECK(e.cost() == 2);
  // A late goal constraint keeps the robot off its goal until after it.
  const auto late = constrained_spacetime_search(g, {1, 1}, {2, 1},
                                                 {Constraint::vertex(0, {2, 1}, 5)}, {});
  CHECK(late.cost() == 6);
  CHECK(late.path[5] != Vertex{2, 1});
  CHECK_THROWS_AS(constrained_spacetime_search(g, {1, 1}, {2, 1},
                                               {Constraint::edge(0, {1, 1}, {2, 1}, 0)}, {}),
                  DomainError);
}

TEST_CASE("horizon cap and unreachable goals") {
  const auto g = GridGraph::empty(3, 1);
  SpaceTimeOptions opt;
  opt.horizon_cap = 1;
  CHECK_THROWS_AS(constrained_spacetime_search(g, {1, 1}, {3, 1}, {}, opt), HorizonExceededError);
  const auto split = grid({".@."});
  try {
    constrained_spacetime_search(*split, {1, 1}, {3, 1}, {}, {});
    FAIL("expected NoPathError");
  } catch (const HorizonExceededError&) {
    FAIL("unreachable must not be reported as horizon");
  } catch (const NoPathError&) {
  }
}

TEST_CASE("focal search prefers conflict-free paths") {
  // Two cost-2 routes from (1,1) to (2,2); the one through (2,1) conflicts.
  const auto g = GridGraph::empty(2, 2);
  const VertexId bad = g.id({2, 1});
  SpaceTimeOptions opt;
  opt.focal_weight = 1.5;
  const auto r = constrained_spacetime_search(
      g, {1, 1}, {2, 2}, {}, opt,
      [bad](VertexId, VertexId to, int) { return to == bad ? 1 : 0; });
  CHECK(r.cost() == 2);
  CHECK(r.path[1] == Vertex{1, 2});
  CHECK(r.lower_bound <= r.cost());
  CHECK(r.cost() <= 1.5 * r.lower_bound);
}

TEST_CASE("constrained search bounds on random constraint sets") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = generate_random(6, 6, 0.1, 1, rng());
    const auto& g = inst.graph();
    const Robot r = inst.robots()[0];
    const auto vs = g.vertices();
    std::vector<Constraint> cons;
    for (int k = 0; k < 8; ++k) {
      const Vertex v = vs[rng() % vs.size()];
      const int t = 1 + static_cast<int>(rng() % 8);
      if (!(v == r.start && t == 0)) cons.push_back(Constraint::vertex(0, v, t));
    }
    SpaceTimeOptions opt;
    opt.focal_weight = 1.0 + static_cast<double>(rng() % 3) * 0.25;
    try {
      const auto res = constrained_spacetime_search(
          g, r.start, r.goal, cons, opt,
          [](VertexId, VertexId to, int t) { return (to + t) % 3 == 0 ? 1 : 0; });
      CHECK(res.path.front() == r.start);
      CHECK(res.path.back() == r.goal);
      CHECK(legal(g, res.path));
      for (const Constraint& c : cons) {
        if (c.time < static_cast<int>(res.path.size())) CHECK(res.path[static_cast<std::size_t>(c.time)] != c.cell);
        else CHECK(res.path.back() != c.cell);
      }
      CHECK(res.lower_bound <= res.cost());
      CHECK(res.cost() <= opt.focal_weight * res.lower_bound + 1e-9);
    } catch (const HorizonExceededError&) {
    }
  }
}
