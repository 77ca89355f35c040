#pragma once

// Concrete tree problems: mazes reduced to trees, probabilistic decision
// trees, and the solvers that turn a problem into a Solution.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arbor/solutions.hpp"
#include "arbor/tree.hpp"

namespace arbor {

struct Cell {
  int row = 0;
  int col = 0;
  bool operator==(const Cell&) const = default;
};

class MazeGrid {
 public:
  // Throws MissingStart/MissingGoal when the markers sit on walls,
  // Disconnected or NotSimplyConnected when the passages are not a tree.
  MazeGrid(int width, int height, std::vector<bool> open, Cell start, Cell goal);

  int width() const { return width_; }
  int height() const { return height_; }
  Cell start() const { return start_; }
  Cell goal() const { return goal_; }
  bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < height_ && c.col < width_; }
  bool is_open(Cell c) const { return in_bounds(c) && open_[index(c)]; }
  std::size_t open_count() const;
  // Open 4-neighbours in the order up, left, right, down.
  std::vector<Cell> neighbors(Cell c) const;

  // '#', '.', 'S', 'G' rows joined by '\n' (with trailing newline).
  std::string render() const;

 private:
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * width_ + c.col; }

  int width_ = 0;
  int height_ = 0;
  std::vector<bool> open_;
  Cell start_;
  Cell goal_;
};

// Rectangular grid of '#', '.', 'S', 'G'. Lines end in LF or CRLF; any other
// character (trailing whitespace included) is rejected.
MazeGrid parse_maze(std::string_view text);

// Shortest path between start and goal in grid steps (BFS).
std::vector<Cell> grid_path(const MazeGrid& maze);

enum class ProblemKind { maze, decision, generic };
enum class Objective { max_log_weight_path, min_length_to_goal };

std::string_view to_string(ProblemKind kind);
std::string_view to_string(Objective objective);
ProblemKind parse_problem_kind(std::string_view text);
Objective parse_objective(std::string_view text);

struct TreeProblem {
  std::string id;
  LabeledTree tree;
  ProblemKind kind = ProblemKind::generic;
  Objective objective = Objective::max_log_weight_path;
  std::vector<std::string> goal_tips;  // sorted
};

// Assembles a problem. Goal tips are the terminals whose first vertex label
// is 1. Without an explicit objective, mazes minimise length to the goal,
// decision trees maximise log weight, and generic problems follow the
// combinator of feature 0. An empty id becomes the tree fingerprint.
TreeProblem make_problem(LabeledTree tree, ProblemKind kind,
                         std::optional<Objective> objective = std::nullopt, std::string id = {});

// Tree validity plus the kind-specific constraints. `strict` additionally
// requires decision-tree siblings to carry probabilities summing to 1.
void validate_problem(const TreeProblem& p, bool strict = false);

// The same problem over the binarized tree.
TreeProblem canonicalize(const TreeProblem& p);

// Node ids: "S" for the start, "G" for the goal tip, "jRR_CC" for junctions,
// "dRR_CC" for dead ends and "gRR_CC" for a goal cell that continues into
// further corridors (it then reaches the "G" tip by a zero-length edge).
TreeProblem maze_to_tree(const MazeGrid& maze);

// Grid cell named by a maze node id, or nullopt for inserted nodes.
std::optional<Cell> maze_node_cell(const MazeGrid& maze, std::string_view id);

Solution solve_most_probable_path(const TreeProblem& p);
Solution solve_min_length_to_goal(const TreeProblem& p);
Solution solve(const TreeProblem& p);

}  // namespace arbor
