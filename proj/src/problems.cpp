#include "arbor/problems.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "arbor/error.hpp"

namespace arbor {

MazeGrid::MazeGrid(int width, int height, std::vector<bool> open, Cell start, Cell goal)
    : width_(width), height_(height), open_(std::move(open)), start_(start), goal_(goal) {
  if (width_ <= 0 || height_ <= 0 || open_.size() != static_cast<std::size_t>(width_) * height_)
    fail(ErrorCode::NonRectangular, "maze dimensions do not match its cells");
  if (!is_open(start_)) fail(ErrorCode::MissingStart, "start is not an open cell");
  if (!is_open(goal_)) fail(ErrorCode::MissingGoal, "goal is not an open cell");
  if (start_ == goal_) fail(ErrorCode::MazeSyntax, "start and goal coincide");

  std::vector<bool> seen(open_.size(), false);
  std::vector<Cell> stack{start_};
  seen[index(start_)] = true;
  std::size_t reached = 1;
  std::size_t adjacencies = 0;
  while (!stack.empty()) {
    const auto c = stack.back();
    stack.pop_back();
    for (auto n : neighbors(c)) {
      if (seen[index(n)]) continue;
      seen[index(n)] = true;
      ++reached;
      stack.push_back(n);
    }
  }
  if (reached != open_count()) fail(ErrorCode::Disconnected, "maze has open cells unreachable from the start");
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      if (!is_open({r, c})) continue;
      adjacencies += is_open({r, c + 1});
      adjacencies += is_open({r + 1, c});
    }
  }
  if (adjacencies + 1 != reached) {
    fail(ErrorCode::NotSimplyConnected, "maze passages contain " + std::to_string(adjacencies + 1 - reached) +
                                            " loop(s)");
  }
}

std::size_t MazeGrid::open_count() const {
  return static_cast<std::size_t>(std::count(open_.begin(), open_.end(), true));
}

std::vector<Cell> MazeGrid::neighbors(Cell c) const {
  std::vector<Cell> out;
  for (Cell n : {Cell{c.row - 1, c.col}, Cell{c.row, c.col - 1}, Cell{c.row, c.col + 1}, Cell{c.row + 1, c.col}})
    if (is_open(n)) out.push_back(n);
  return out;
}

std::string MazeGrid::render() const {
  std::string out;
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      const Cell cell{r, c};
      out += cell == start_ ? 'S' : cell == goal_ ? 'G' : is_open(cell) ? '.' : '#';
    }
    out += '\n';
  }
  return out;
}

MazeGrid parse_maze(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (lines.empty() || lines.front().empty()) fail(ErrorCode::NonRectangular, "maze is empty");

  const auto width = lines.front().size();
  std::vector<bool> open;
  std::optional<Cell> start;
  std::optional<Cell> goal;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (lines[r].size() != width) {
      fail(ErrorCode::NonRectangular, "line " + std::to_string(r + 1) + " has " +
                                          std::to_string(lines[r].size()) + " cells, expected " +
                                          std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      const Cell cell{static_cast<int>(r), static_cast<int>(c)};
      switch (lines[r][c]) {
        case '#': open.push_back(false); break;
        case '.': open.push_back(true); break;
        case 'S':
          if (start) fail(ErrorCode::MazeSyntax, "more than one 'S'");
          start = cell;
          open.push_back(true);
          break;
        case 'G':
          if (goal) fail(ErrorCode::MazeSyntax, "more than one 'G'");
          goal = cell;
          open.push_back(true);
          break;
        default:
          fail(ErrorCode::MazeSyntax, "unexpected character at line " + std::to_string(r + 1) + ", column " +
                                          std::to_string(c + 1));
      }
    }
  }
  if (!start) fail(ErrorCode::MissingStart, "maze has no 'S'");
  if (!goal) fail(ErrorCode::MissingGoal, "maze has no 'G'");
  return MazeGrid(static_cast<int>(width), static_cast<int>(lines.size()), std::move(open), *start, *goal);
}

std::vector<Cell> grid_path(const MazeGrid& maze) {
  const auto w = maze.width();
  auto flat = [w](Cell c) { return static_cast<std::size_t>(c.row) * w + c.col; };
  std::vector<std::optional<Cell>> came_from(static_cast<std::size_t>(w) * maze.height());
  std::vector<bool> seen(came_from.size(), false);
  std::deque<Cell> queue{maze.start()};
  seen[flat(maze.start())] = true;
  while (!queue.empty()) {
    const auto c = queue.front();
    queue.pop_front();
    if (c == maze.goal()) break;
    for (auto n : maze.neighbors(c)) {
      if (seen[flat(n)]) continue;
      seen[flat(n)] = true;
      came_from[flat(n)] = c;
      queue.push_back(n);
    }
  }
  std::vector<Cell> path{maze.goal()};
  while (!(path.back() == maze.start())) path.push_back(*came_from[flat(path.back())]);
  std::reverse(path.begin(), path.end());
  return path;
}

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::maze: return "maze";
    case ProblemKind::decision: return "decision";
    case ProblemKind::generic: return "generic";
  }
  return "generic";
}

std::string_view to_string(Objective objective) {
  return objective == Objective::max_log_weight_path ? "max_log_weight_path" : "min_length_to_goal";
}

ProblemKind parse_problem_kind(std::string_view text) {
  if (text == "maze") return ProblemKind::maze;
  if (text == "decision") return ProblemKind::decision;
  if (text == "generic") return ProblemKind::generic;
  fail(ErrorCode::ParseError, "unknown problem kind '" + std::string(text) + "'");
}

Objective parse_objective(std::string_view text) {
  if (text == "max_log_weight_path") return Objective::max_log_weight_path;
  if (text == "min_length_to_goal") return Objective::min_length_to_goal;
  fail(ErrorCode::ParseError, "unknown objective '" + std::string(text) + "'");
}

TreeProblem make_problem(LabeledTree tree, ProblemKind kind, std::optional<Objective> objective,
                         std::string id) {
  TreeProblem p;
  p.kind = kind;
  if (objective) {
    p.objective = *objective;
  } else if (kind == ProblemKind::maze) {
    p.objective = Objective::min_length_to_goal;
  } else if (kind == ProblemKind::decision) {
    p.objective = Objective::max_log_weight_path;
  } else {
    const bool additive = tree.feature_arity() > 0 && tree.schema()[0].combinator == Combinator::additive;
    p.objective = additive ? Objective::min_length_to_goal : Objective::max_log_weight_path;
  }
  for (const auto& n : tree.nodes())
    if (n.terminal() && !n.labels.empty() && n.labels.front() == 1.0) p.goal_tips.push_back(n.id);
  std::sort(p.goal_tips.begin(), p.goal_tips.end());
  p.id = id.empty() ? fingerprint(tree) : std::move(id);
  p.tree = std::move(tree);
  return p;
}

namespace {

void require_feature(const TreeProblem& p, Combinator combinator, std::string_view what) {
  if (p.tree.feature_arity() == 0 || p.tree.schema()[0].combinator != combinator) {
    fail(ErrorCode::ObjectiveMismatch, std::string(what) + " needs feature 0 to be " +
                                           (combinator == Combinator::additive ? "additive" : "multiplicative"));
  }
}

void require_goal_tips(const TreeProblem& p) {
  if (p.goal_tips.empty()) fail(ErrorCode::NoGoalTip, "problem has no goal tip");
  for (const auto& g : p.goal_tips) {
    const auto i = p.tree.index_of(g);
    if (i == LabeledTree::npos || !p.tree.node_at(i).terminal())
      fail(ErrorCode::InvalidProblem, "goal '" + g + "' is not a terminal node");
  }
}

}  // namespace

void validate_problem(const TreeProblem& p, bool strict) {
  validate(p.tree);
  switch (p.kind) {
    case ProblemKind::maze:
      require_feature(p, Combinator::additive, "a maze");
      for (const auto& e : p.tree.edges())
        if (e.features[0] < 0) fail(ErrorCode::InvalidProblem, "corridor " + e.parent + "→" + e.child + " has negative length");
      require_goal_tips(p);
      break;
    case ProblemKind::decision:
      require_feature(p, Combinator::multiplicative, "a decision tree");
      for (const auto& e : p.tree.edges()) {
        if (!(e.features[0] > 0.0 && e.features[0] <= 1.0))
          fail(ErrorCode::InvalidProblem, "edge " + e.parent + "→" + e.child + " probability outside (0,1]");
      }
      if (strict) {
        for (std::size_t u = 0; u < p.tree.nodes().size(); ++u) {
          if (p.tree.node_at(u).terminal()) continue;
          double sum = 0.0;
          for (auto e : p.tree.child_edges(u)) sum += p.tree.edges()[e].features[0];
          if (std::abs(sum - 1.0) > 1e-9) {
            fail(ErrorCode::InvalidProblem,
                 "children of '" + p.tree.node_at(u).id + "' have probabilities summing to " + std::to_string(sum));
          }
        }
      }
      break;
    case ProblemKind::generic:
      break;
  }
  if (p.objective == Objective::max_log_weight_path) {
    require_feature(p, Combinator::multiplicative, "the most-probable-path objective");
  } else {
    require_feature(p, Combinator::additive, "the shortest-path objective");
    // Generic problems may omit goals; solving them then reports NoGoalTip.
    if (p.kind == ProblemKind::maze || !p.goal_tips.empty()) require_goal_tips(p);
  }
}

TreeProblem canonicalize(const TreeProblem& p) {
  TreeProblem out = p;
  out.tree = binarize(p.tree);
  return out;
}

namespace {

std::string padded(int value, std::size_t digits) {
  auto s = std::to_string(value);
  if (s.size() < digits) s.insert(0, digits - s.size(), '0');
  return s;
}

std::size_t coordinate_digits(const MazeGrid& maze) {
  return std::max<std::size_t>(2, std::to_string(std::max(maze.width(), maze.height()) - 1).size());
}

}  // namespace

TreeProblem maze_to_tree(const MazeGrid& maze) {
  const auto digits = coordinate_digits(maze);
  auto cell_id = [&](char prefix, Cell c) {
    return prefix + padded(c.row, digits) + "_" + padded(c.col, digits);
  };
  auto is_node = [&](Cell c) {
    return c == maze.start() || c == maze.goal() || maze.neighbors(c).size() != 2;
  };

  std::vector<Node> nodes{{"S", NodeKind::internal, {}}};
  std::vector<Edge> edges;

  struct Visit {
    Cell cell;
    std::string id;
    std::optional<Cell> from;
  };
  std::vector<Visit> stack{{maze.start(), "S", std::nullopt}};
  while (!stack.empty()) {
    const auto visit = stack.back();
    stack.pop_back();
    for (auto first : maze.neighbors(visit.cell)) {
      if (visit.from && first == *visit.from) continue;
      // Follow the corridor until the next node cell.
      Cell prev = visit.cell;
      Cell cur = first;
      int length = 1;
      while (!is_node(cur)) {
        const auto nbrs = maze.neighbors(cur);
        const Cell next = nbrs[0] == prev ? nbrs[1] : nbrs[0];
        prev = cur;
        cur = next;
        ++length;
      }
      const bool leaf = maze.neighbors(cur).size() == 1;
      std::string id;
      if (cur == maze.goal()) {
        if (leaf) {
          id = "G";
          nodes.push_back({id, NodeKind::terminal, {1.0}});
        } else {
          id = cell_id('g', cur);
          nodes.push_back({id, NodeKind::internal, {}});
          nodes.push_back({"G", NodeKind::terminal, {1.0}});
          edges.push_back({id, "G", {0.0}});
        }
      } else if (leaf) {
        id = cell_id('d', cur);
        nodes.push_back({id, NodeKind::terminal, {0.0}});
      } else {
        id = cell_id('j', cur);
        nodes.push_back({id, NodeKind::internal, {}});
      }
      edges.push_back({visit.id, id, {static_cast<double>(length)}});
      if (!leaf) stack.push_back({cur, id, prev});
    }
  }

  // A start cell with a single neighbour is still the root, not a dead end.
  LabeledTree tree("S", std::move(nodes), std::move(edges),
                   FeatureSchema({{"length", Combinator::additive}}));
  auto problem = make_problem(binarize(tree), ProblemKind::maze, Objective::min_length_to_goal);
  validate_problem(problem);
  return problem;
}

std::optional<Cell> maze_node_cell(const MazeGrid& maze, std::string_view id) {
  if (id == "S") return maze.start();
  if (id == "G") return maze.goal();
  if (id.size() < 4 || (id[0] != 'j' && id[0] != 'd' && id[0] != 'g')) return std::nullopt;
  const auto sep = id.find('_');
  if (sep == std::string_view::npos) return std::nullopt;
  const auto row_text = id.substr(1, sep - 1);
  const auto col_text = id.substr(sep + 1);
  if (row_text.empty() || col_text.empty()) return std::nullopt;
  if (!std::all_of(row_text.begin(), row_text.end(), ::isdigit) ||
      !std::all_of(col_text.begin(), col_text.end(), ::isdigit))
    return std::nullopt;
  return Cell{std::stoi(std::string(row_text)), std::stoi(std::string(col_text))};
}

namespace {

// Walks tips in canonical preorder, scoring each root→tip path by folding
// `edge_score` from the root down. Ties keep the earlier tip, which is the
// path with the lexicographically smallest canonical edge indices.
template <typename EdgeScore, typename Better, typename Eligible>
Solution best_path(const TreeProblem& p, EdgeScore edge_score, Better better, Eligible eligible) {
  const auto& tree = p.tree;
  validate(tree);
  std::vector<double> score(tree.nodes().size(), 0.0);
  std::optional<std::size_t> best;
  for (auto e : canonical_edge_indices(tree)) {
    const auto child = tree.child_index(e);
    score[child] = score[tree.parent_index(e)] + edge_score(tree.edges()[e]);
    if (!tree.node_at(child).terminal() || !eligible(child)) continue;
    if (!best || better(score[child], score[*best])) best = child;
  }
  if (!best) fail(ErrorCode::NoGoalTip, "no eligible terminal to reach");
  return encode_path(tree, tree.node_at(*best).id, p.id);
}

}  // namespace

Solution solve_most_probable_path(const TreeProblem& p) {
  if (p.kind == ProblemKind::maze) fail(ErrorCode::ObjectiveMismatch, "mazes are solved by path length");
  require_feature(p, Combinator::multiplicative, "the most-probable-path objective");
  for (const auto& e : p.tree.edges()) {
    if (!(e.features.at(0) > 0.0))
      fail(ErrorCode::NonPositiveWeight, "edge " + e.parent + "→" + e.child + " has non-positive weight");
  }
  return best_path(
      p, [](const Edge& e) { return std::log(e.features[0]); },
      [](double a, double b) { return a > b; }, [](std::size_t) { return true; });
}

Solution solve_min_length_to_goal(const TreeProblem& p) {
  require_feature(p, Combinator::additive, "the shortest-path objective");
  if (p.goal_tips.empty()) fail(ErrorCode::NoGoalTip, "problem has no goal tip");
  std::vector<bool> goal(p.tree.nodes().size(), false);
  for (const auto& g : p.goal_tips) {
    const auto i = p.tree.index_of(g);
    if (i == LabeledTree::npos) fail(ErrorCode::NoGoalTip, "goal '" + g + "' is not in the tree");
    goal[i] = true;
  }
  return best_path(
      p, [](const Edge& e) { return e.features[0]; }, [](double a, double b) { return a < b; },
      [&](std::size_t node) { return static_cast<bool>(goal[node]); });
}

Solution solve(const TreeProblem& p) {
  return p.objective == Objective::max_log_weight_path ? solve_most_probable_path(p)
                                                       : solve_min_length_to_goal(p);
}

}  // namespace arbor
