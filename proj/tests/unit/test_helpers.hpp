#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mapfsplit/instance.hpp"

namespace testutil {

using mapfsplit::GridGraph;
using mapfsplit::Instance;
using mapfsplit::Robot;
using mapfsplit::Vertex;

/// Rows listed as in a map file: the first string is row 1. '@' is blocked.
inline std::shared_ptr<const GridGraph> grid(const std::vector<std::string>& rows) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.front().size());
  std::vector<bool> blocked(static_cast<std::size_t>(w * h), false);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      blocked[static_cast<std::size_t>(r * w + c)] = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] == '@';
    }
  }
  return std::make_shared<const GridGraph>(w, h, std::move(blocked));
}

inline std::shared_ptr<const GridGraph> empty_grid(int w, int h) {
  return std::make_shared<const GridGraph>(GridGraph::empty(w, h));
}

inline std::string data_path(const std::string& name) {
  return std::string(MAPFSPLIT_TEST_DATA) + "/" + name;
}

}  // namespace testutil
