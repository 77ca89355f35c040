#include "arbor/solutions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arbor/error.hpp"

namespace arbor {

Solution::Solution(std::vector<std::uint8_t> bits, std::string edge_order_ref, std::string problem_id)
    : bits_(std::move(bits)), edge_order_ref_(std::move(edge_order_ref)), problem_id_(std::move(problem_id)) {
  for (auto b : bits_)
    if (b > 1) fail(ErrorCode::InvalidSolution, "solution entries must be 0 or 1");
}

std::size_t Solution::marked() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Eigen::RowVectorXd Solution::as_row() const {
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(bits_.size()));
  for (std::size_t i = 0; i < bits_.size(); ++i) row(static_cast<Eigen::Index>(i)) = bits_[i];
  return row;
}

Solution encode_path(const LabeledTree& tree, std::string_view terminal, std::string problem_id) {
  const auto target = tree.index_of(terminal);
  if (target == LabeledTree::npos || !tree.node_at(target).terminal())
    fail(ErrorCode::NotATerminal, "'" + std::string(terminal) + "' is not a terminal node");
  const auto order = canonical_edge_indices(tree);
  std::vector<std::size_t> position(tree.edges().size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

  std::vector<std::uint8_t> bits(order.size(), 0);
  for (auto u = target; !tree.parent_edges(u).empty();) {
    const auto e = tree.parent_edges(u).front();
    bits[position[e]] = 1;
    u = tree.parent_index(e);
  }
  if (problem_id.empty()) problem_id = fingerprint(tree);
  return Solution(std::move(bits), edge_order_ref(tree), std::move(problem_id));
}

std::string decode_path(const LabeledTree& tree, const Solution& s) {
  const auto order = canonical_edge_indices(tree);
  if (s.size() != order.size()) {
    fail(ErrorCode::LengthMismatch, "solution has " + std::to_string(s.size()) + " entries, tree has " +
                                        std::to_string(order.size()) + " edges");
  }
  if (!s.edge_order_ref().empty() && s.edge_order_ref() != edge_order_ref(tree))
    fail(ErrorCode::InconsistentSolution, "solution was encoded against a different edge order");

  // Walk down from the root through marked edges; every marked edge must be
  // consumed and the walk must stop at a terminal.
  std::vector<char> marked(tree.edges().size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) marked[order[i]] = s.bits()[i];
  auto u = tree.root_index();
  std::size_t used = 0;
  while (true) {
    std::size_t next = LabeledTree::npos;
    for (auto e : tree.child_edges(u)) {
      if (!marked[e]) continue;
      if (next != LabeledTree::npos) fail(ErrorCode::BrokenPath, "marked edges branch at '" + tree.node_at(u).id + "'");
      next = e;
    }
    if (next == LabeledTree::npos) break;
    ++used;
    u = tree.child_index(next);
  }
  if (used != s.marked()) fail(ErrorCode::BrokenPath, "marked edges are not connected to the root");
  if (!tree.node_at(u).terminal())
    fail(ErrorCode::BrokenPath, "marked path stops at internal node '" + tree.node_at(u).id + "'");
  return tree.node_at(u).id;
}

bool is_path(const LabeledTree& tree, const Solution& s) {
  try {
    decode_path(tree, s);
    return true;
  } catch (const Error&) {
    return false;
  }
}

namespace {

void require_same_length(const Solution& s, const Solution& t) {
  if (s.size() != t.size()) {
    fail(ErrorCode::LengthMismatch, "solutions have lengths " + std::to_string(s.size()) + " and " +
                                        std::to_string(t.size()));
  }
}

}  // namespace

Eigen::MatrixXd solution_morphism(const Solution& s, const Solution& t) {
  require_same_length(s, t);
  const auto norm2 = static_cast<double>(s.marked());
  if (norm2 == 0.0) fail(ErrorCode::ZeroSolution, "cannot map from an all-zero solution");
  return t.as_row().transpose() * s.as_row() / norm2;
}

double solution_distance(const Solution& s, const Solution& t) {
  require_same_length(s, t);
  std::size_t hamming = 0;
  for (std::size_t i = 0; i < s.size(); ++i) hamming += s.bits()[i] != t.bits()[i];
  return std::sqrt(static_cast<double>(hamming));
}

}  // namespace arbor
