#include "mapfsplit/plan.hpp"

#include <algorithm>

#include "mapfsplit/errors.hpp"

namespace mapfsplit {

Plan Plan::from_paths(std::vector<Path> paths) {
  std::size_t longest = 0;
  for (const Path& p : paths) longest = std::max(longest, p.size());
  for (Path& p : paths) {
    if (p.empty()) throw DomainError("cannot pad an empty path");
    p.resize(longest, p.back());
  }
  return Plan{std::move(paths)};
}

std::vector<Vertex> Plan::configuration(int t) const {
  std::vector<Vertex> out;
  out.reserve(paths.size());
  for (const Path& p : paths) {
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(std::max(t, 0)), p.size() - 1);
    out.push_back(p[idx]);
  }
  return out;
}

nlohmann::json plan_to_json(const Plan& plan) {
  nlohmann::json paths = nlohmann::json::array();
  for (const Path& p : plan.paths) {
    nlohmann::json steps = nlohmann::json::array();
    for (const Vertex& v : p) steps.push_back({v.col, v.row});
    paths.push_back(std::move(steps));
  }
  return {{"horizon", plan.horizon()}, {"paths", std::move(paths)}};
}

Plan plan_from_json(const nlohmann::json& j) {
  try {
    Plan plan;
    for (const auto& steps : j.at("paths")) {
      Path p;
      for (const auto& v : steps) p.push_back(Vertex{v.at(0).get<int>(), v.at(1).get<int>()});
      plan.paths.push_back(std::move(p));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("plan JSON: ") + e.what());
  }
}

}  // namespace mapfsplit
