#pragma once

// Characteristic matrix of a binary labeled tree and its weighted fingerprint.
//
// Row 0 holds topology: for a tip pair (i, j) the number of edges between the
// root and their most recent common ancestor, and 1 in every pendant column.
// Row l+1 holds feature l: the value on the edge entering mrca(i, j) (0 when
// the mrca is the root) and, in pendant columns, the value on the edge
// entering the tip. Columns are the tip pairs in ascending label order
// followed by one pendant column per tip.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "arbor/tree.hpp"

namespace arbor {

struct ColumnTag {
  enum class Kind { tip_pair, pendant };
  Kind kind = Kind::pendant;
  std::string first;
  std::string second;  // empty for pendant columns

  static ColumnTag pair(std::string i, std::string j) {
    return {Kind::tip_pair, std::move(i), std::move(j)};
  }
  static ColumnTag pendant(std::string i) { return {Kind::pendant, std::move(i), {}}; }

  bool operator==(const ColumnTag&) const = default;
};

// Column header text: "ab" / "p_a" when every tip label is one character,
// "a|b" / "p_a" otherwise so multi-character labels stay unambiguous.
std::string column_name(const ColumnTag& tag, bool compact);

class CharacteristicMatrix {
 public:
  CharacteristicMatrix() = default;
  // Throws InvalidMatrix if the shape and tip labels disagree or an entry is
  // not finite. The topology row is not checked here because morphism images
  // are generally not integral; see topology_row_valid().
  CharacteristicMatrix(Eigen::MatrixXd entries, std::vector<std::string> tip_labels,
                       std::string source_id);

  const Eigen::MatrixXd& entries() const { return entries_; }
  const std::vector<ColumnTag>& column_index() const { return columns_; }
  const std::vector<std::string>& tip_labels() const { return tips_; }
  const std::string& source_id() const { return source_id_; }

  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  std::size_t tip_count() const { return tips_.size(); }

  std::vector<std::string> column_names() const;

  // Same entries and columns under another identifier.
  CharacteristicMatrix with_source(std::string source_id) const;

 private:
  Eigen::MatrixXd entries_;
  std::vector<ColumnTag> columns_;
  std::vector<std::string> tips_;
  std::string source_id_;
};

// True when row 0 looks like a tree's topology row: non-negative integers
// in the pair block and 1 in every pendant column.
bool topology_row_valid(const CharacteristicMatrix& m);

// Column tags for k sorted tip labels: C(k,2) pairs then k pendants.
std::vector<ColumnTag> make_column_index(const std::vector<std::string>& sorted_tips);

class MetricWeights {
 public:
  // Throws InvalidWeights unless every entry is in [0,1] and they sum to 1.
  explicit MetricWeights(std::vector<double> lambda);

  static MetricWeights uniform(std::size_t rows);
  static MetricWeights topology_only(std::size_t rows);

  const std::vector<double>& values() const { return lambda_; }
  std::size_t size() const { return lambda_.size(); }
  Eigen::RowVectorXd row() const;

 private:
  std::vector<double> lambda_;
};

// `tree` must be valid and binary with at least two tips. When `source_id`
// is empty the tree fingerprint is used.
CharacteristicMatrix characteristic_matrix(const LabeledTree& tree,
                                           std::string source_id = {});

Eigen::RowVectorXd phi(const CharacteristicMatrix& m, const MetricWeights& w);

}  // namespace arbor
