#pragma once

// Solutions are edge-indicator vectors over a tree's canonical edge order.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "arbor/tree.hpp"

namespace arbor {

class Solution {
 public:
  Solution() = default;
  // Throws InvalidSolution if any entry is not 0 or 1.
  Solution(std::vector<std::uint8_t> bits, std::string edge_order_ref, std::string problem_id);

  const std::vector<std::uint8_t>& bits() const { return bits_; }
  const std::string& edge_order_ref() const { return edge_order_ref_; }
  const std::string& problem_id() const { return problem_id_; }
  std::size_t size() const { return bits_.size(); }
  std::size_t marked() const;

  Eigen::RowVectorXd as_row() const;

  bool operator==(const Solution&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
  std::string edge_order_ref_;
  std::string problem_id_;
};

// Marks the root→terminal path. Throws NotATerminal. An empty `problem_id`
// defaults to the tree fingerprint.
Solution encode_path(const LabeledTree& tree, std::string_view terminal,
                     std::string problem_id = {});

// Inverse of encode_path: the terminal reached by the marked edges. Throws
// LengthMismatch, InconsistentSolution (edge order differs) or BrokenPath
// when the marked edges are not a single root→terminal path.
std::string decode_path(const LabeledTree& tree, const Solution& s);

bool is_path(const LabeledTree& tree, const Solution& s);

// Least-norm n×n matrix A with A·sᵀ = tᵀ, i.e. tᵀ s / (s·s).
Eigen::MatrixXd solution_morphism(const Solution& s, const Solution& t);

// Euclidean distance; its square is the Hamming distance.
double solution_distance(const Solution& s, const Solution& t);

}  // namespace arbor
