#include "mapfsplit/instance.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "mapfsplit/errors.hpp"

namespace mapfsplit {

namespace {

std::string describe(Vertex v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

/// Splits into lines, dropping a trailing '\r' from each.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    pos = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

int parse_int(std::string_view s, std::size_t line, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, std::string("bad integer for ") + what + ": '" +
                               std::string(s) + "'");
  }
  return value;
}

double parse_double(std::string_view s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "bad number: '" + std::string(s) + "'");
  }
}

bool passable_glyph(char c, std::size_t line) {
  switch (c) {
    case '.':
    case 'G':
      return true;
    case '@':
    case 'O':
    case 'T':
    case 'W':
      return false;
    default:
      throw ParseError(line, std::string("unknown map glyph '") + c + "'");
  }
}

}  // namespace

Instance::Instance(std::shared_ptr<const GridGraph> graph, std::vector<Robot> robots)
    : graph_(std::move(graph)), robots_(std::move(robots)) {
  if (!graph_) throw DomainError("instance needs a graph");
  std::set<Vertex> starts;
  std::set<Vertex> goals;
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    const Robot& r = robots_[i];
    if (!graph_->is_vertex(r.start)) {
      throw ValidationError(i, "start " + describe(r.start) + " is not a free vertex");
    }
    if (!graph_->is_vertex(r.goal)) {
      throw ValidationError(i, "goal " + describe(r.goal) + " is not a free vertex");
    }
    if (!starts.insert(r.start).second) {
      throw ValidationError(i, "duplicate start " + describe(r.start));
    }
    if (!goals.insert(r.goal).second) {
      throw ValidationError(i, "duplicate goal " + describe(r.goal));
    }
  }
}

std::vector<Vertex> Instance::starts() const {
  std::vector<Vertex> out;
  out.reserve(robots_.size());
  for (const Robot& r : robots_) out.push_back(r.start);
  return out;
}

std::vector<Vertex> Instance::goals() const {
  std::vector<Vertex> out;
  out.reserve(robots_.size());
  for (const Robot& r : robots_) out.push_back(r.goal);
  return out;
}

GridGraph parse_map(std::string_view text) {
  const auto lines = split_lines(text);
  std::optional<int> height;
  std::optional<int> width;
  bool saw_type = false;
  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const auto tok = split_ws(lines[i]);
    if (tok.empty()) throw ParseError(lineno, "empty header line");
    if (tok[0] == "map") {
      if (tok.size() != 1) throw ParseError(lineno, "unexpected tokens after 'map'");
      ++i;
      break;
    }
    if (tok.size() != 2) throw ParseError(lineno, "malformed header line");
    if (tok[0] == "type") {
      saw_type = true;
    } else if (tok[0] == "height") {
      height = parse_int(tok[1], lineno, "height");
    } else if (tok[0] == "width") {
      width = parse_int(tok[1], lineno, "width");
    } else {
      throw ParseError(lineno, "unknown header key '" + std::string(tok[0]) + "'");
    }
    if (i + 1 == lines.size()) throw ParseError(lineno + 1, "missing 'map' line");
  }
  if (lines.empty()) throw ParseError(1, "empty map text");
  if (!saw_type) throw ParseError(1, "missing 'type' header");
  if (!height || !width) throw ParseError(i, "missing height or width header");
  if (*height <= 0 || *width <= 0) throw ParseError(i, "non-positive map dimensions");

  const std::size_t first_row = i;
  const std::size_t rows = lines.size() - first_row;
  if (rows != static_cast<std::size_t>(*height)) {
    throw ParseError(lines.size() + (rows < static_cast<std::size_t>(*height) ? 1 : 0),
                     "expected " + std::to_string(*height) + " map rows, found " +
                         std::to_string(rows));
  }
  std::vector<bool> blocked(static_cast<std::size_t>(*width) * static_cast<std::size_t>(*height));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t lineno = first_row + r + 1;
    const std::string_view row = lines[first_row + r];
    if (row.size() != static_cast<std::size_t>(*width)) {
      throw ParseError(lineno, "row length " + std::to_string(row.size()) +
                                   " does not match width " + std::to_string(*width));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      blocked[r * static_cast<std::size_t>(*width) + c] = !passable_glyph(row[c], lineno);
    }
  }
  return GridGraph(*width, *height, std::move(blocked));
}

ScenarioFile parse_scenario_file(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(1, "empty scenario text");
  const auto header = split_ws(lines[0]);
  if (header.size() != 2 || header[0] != "version" ||
      (header[1] != "1" && header[1] != "1.0")) {
    throw ParseError(1, "expected 'version 1' header");
  }
  ScenarioFile out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (lines[i].empty()) continue;
    // Tab-separated; map names never contain tabs but may contain spaces.
    std::vector<std::string_view> tok;
    std::string_view rest = lines[i];
    while (true) {
      const auto tab = rest.find('\t');
      tok.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest = rest.substr(tab + 1);
    }
    if (tok.size() == 1) tok = split_ws(lines[i]);
    if (tok.size() != 9) {
      throw ParseError(lineno, "expected 9 fields, found " + std::to_string(tok.size()));
    }
    ScenarioEntry e;
    e.bucket = parse_int(tok[0], lineno, "bucket");
    e.map_name = std::string(tok[1]);
    e.map_width = parse_int(tok[2], lineno, "map width");
    e.map_height = parse_int(tok[3], lineno, "map height");
    e.start_x = parse_int(tok[4], lineno, "start x");
    e.start_y = parse_int(tok[5], lineno, "start y");
    e.goal_x = parse_int(tok[6], lineno, "goal x");
    e.goal_y = parse_int(tok[7], lineno, "goal y");
    e.optimal_length = parse_double(tok[8], lineno);
    if (out.map_path.empty()) out.map_path = e.map_name;
    out.entries.push_back(std::move(e));
  }
  return out;
}

Instance parse_scenario(std::string_view text, std::shared_ptr<const GridGraph> graph,
                        std::optional<std::size_t> agents) {
  if (!graph) throw DomainError("parse_scenario needs a graph");
  const ScenarioFile scen = parse_scenario_file(text);
  const std::size_t n = agents.value_or(scen.entries.size());
  if (n > scen.entries.size()) {
    throw DomainError("requested " + std::to_string(n) + " agents but scenario has " +
                      std::to_string(scen.entries.size()) + " entries");
  }
  std::vector<Robot> robots;
  robots.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ScenarioEntry& e = scen.entries[i];
    if (e.map_width != graph->width() || e.map_height != graph->height()) {
      throw ParseError(i + 2, "entry dimensions " + std::to_string(e.map_width) + "x" +
                                  std::to_string(e.map_height) + " do not match map " +
                                  std::to_string(graph->width()) + "x" +
                                  std::to_string(graph->height()));
    }
    robots.push_back(Robot{Vertex{e.start_x + 1, e.start_y + 1},
                           Vertex{e.goal_x + 1, e.goal_y + 1}});
  }
  return Instance(std::move(graph), std::move(robots));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_map(const GridGraph& g) {
  std::string out = "type octile\nheight " + std::to_string(g.height()) + "\nwidth " +
                    std::to_string(g.width()) + "\nmap\n";
  for (int row = 1; row <= g.height(); ++row) {
    for (int col = 1; col <= g.width(); ++col) {
      out += g.is_vertex(Vertex{col, row}) ? '.' : '@';
    }
    out += '\n';
  }
  return out;
}

std::string write_scenario(const Instance& inst, const std::string& map_name) {
  std::ostringstream os;
  os << "version 1\n";
  for (const Robot& r : inst.robots()) {
    const auto d = inst.graph().distance(r.start, r.goal);
    os << 0 << '\t' << map_name << '\t' << inst.graph().width() << '\t'
       << inst.graph().height() << '\t' << r.start.col - 1 << '\t' << r.start.row - 1
       << '\t' << r.goal.col - 1 << '\t' << r.goal.row - 1 << '\t' << d.value_or(0)
       << '\n';
  }
  return os.str();
}

namespace {

/// Draws starts and goals; nullopt when some goal is unreachable.
std::optional<std::vector<Robot>> sample_robots(const GridGraph& g, std::size_t agents,
                                                std::mt19937_64& rng) {
  std::vector<VertexId> free;
  free.reserve(static_cast<std::size_t>(g.vertex_count()));
  for (VertexId id = 0; id < g.cell_count(); ++id) {
    if (g.is_vertex(id)) free.push_back(id);
  }
  std::vector<VertexId> starts;
  std::vector<VertexId> goals;
  std::sample(free.begin(), free.end(), std::back_inserter(starts),
              static_cast<std::ptrdiff_t>(agents), rng);
  std::sample(free.begin(), free.end(), std::back_inserter(goals),
              static_cast<std::ptrdiff_t>(agents), rng);
  std::shuffle(starts.begin(), starts.end(), rng);
  std::shuffle(goals.begin(), goals.end(), rng);
  std::vector<Robot> robots;
  robots.reserve(agents);
  for (std::size_t i = 0; i < agents; ++i) {
    if (!g.distances_from(starts[i])->reachable(goals[i])) return std::nullopt;
    robots.push_back(Robot{g.vertex(starts[i]), g.vertex(goals[i])});
  }
  return robots;
}

}  // namespace

Instance generate_random(int width, int height, double obstacle_ratio, std::size_t agents,
                         std::uint64_t seed, int max_attempts) {
  if (width <= 0 || height <= 0) throw GenerationError("grid dimensions must be positive");
  if (obstacle_ratio < 0.0 || obstacle_ratio >= 1.0) {
    throw GenerationError("obstacle ratio must lie in [0, 1)");
  }
  const auto cells = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const auto obstacles = static_cast<std::size_t>(obstacle_ratio * static_cast<double>(cells));
  if (agents > cells - obstacles) {
    throw GenerationError("not enough free cells for " + std::to_string(agents) + " robots");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> all(cells);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<std::size_t> chosen;
    std::sample(all.begin(), all.end(), std::back_inserter(chosen),
                static_cast<std::ptrdiff_t>(obstacles), rng);
    std::vector<bool> blocked(cells, false);
    for (std::size_t c : chosen) blocked[c] = true;
    auto graph = std::make_shared<const GridGraph>(width, height, std::move(blocked));
    if (auto robots = sample_robots(*graph, agents, rng)) {
      return Instance(std::move(graph), std::move(*robots));
    }
  }
  throw GenerationError("no instance with all goals reachable after " +
                        std::to_string(max_attempts) + " attempts");
}

Instance generate_random_on_map(std::shared_ptr<const GridGraph> graph, std::size_t agents,
                                std::uint64_t seed, int max_attempts) {
  if (agents > static_cast<std::size_t>(graph->vertex_count())) {
    throw GenerationError("not enough free cells for " + std::to_string(agents) + " robots");
  }
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    if (auto robots = sample_robots(*graph, agents, rng)) {
      return Instance(std::move(graph), std::move(*robots));
    }
  }
  throw GenerationError("no start/goal assignment with all goals reachable after " +
                        std::to_string(max_attempts) + " attempts");
}

nlohmann::json instance_to_json(const Instance& inst) {
  const GridGraph& g = inst.graph();
  nlohmann::json blocked = nlohmann::json::array();
  for (int row = 1; row <= g.height(); ++row) {
    for (int col = 1; col <= g.width(); ++col) {
      if (!g.is_vertex(Vertex{col, row})) blocked.push_back({col, row});
    }
  }
  nlohmann::json robots = nlohmann::json::array();
  for (const Robot& r : inst.robots()) {
    robots.push_back({{"start", {r.start.col, r.start.row}},
                      {"goal", {r.goal.col, r.goal.row}}});
  }
  return {{"width", g.width()}, {"height", g.height()}, {"blocked", blocked},
          {"robots", robots}};
}

Instance instance_from_json(const nlohmann::json& j) {
  try {
    const int width = j.at("width").get<int>();
    const int height = j.at("height").get<int>();
    if (width <= 0 || height <= 0) throw ParseError(1, "non-positive dimensions");
    std::vector<bool> blocked(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (const auto& cell : j.at("blocked")) {
      const Vertex v{cell.at(0).get<int>(), cell.at(1).get<int>()};
      if (v.col < 1 || v.col > width || v.row < 1 || v.row > height) {
        throw ParseError(1, "blocked cell out of bounds: " + describe(v));
      }
      blocked[static_cast<std::size_t>((v.row - 1) * width + (v.col - 1))] = true;
    }
    auto graph = std::make_shared<const GridGraph>(width, height, std::move(blocked));
    std::vector<Robot> robots;
    for (const auto& r : j.at("robots")) {
      robots.push_back(Robot{Vertex{r.at("start").at(0).get<int>(), r.at("start").at(1).get<int>()},
                             Vertex{r.at("goal").at(0).get<int>(), r.at("goal").at(1).get<int>()}});
    }
    return Instance(std::move(graph), std::move(robots));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("instance JSON: ") + e.what());
  }
}

}  // namespace mapfsplit
