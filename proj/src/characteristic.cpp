#include "arbor/characteristic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "arbor/error.hpp"

namespace arbor {

namespace {

// Diagnostics go to stderr so they never mix with exported matrices.
spdlog::logger& logger() {
  static const auto log = [] {
    if (auto existing = spdlog::get("arbor")) return existing;
    return spdlog::stderr_color_mt("arbor");
  }();
  return *log;
}

}  // namespace

std::string column_name(const ColumnTag& tag, bool compact) {
  if (tag.kind == ColumnTag::Kind::pendant) return "p_" + tag.first;
  return compact ? tag.first + tag.second : tag.first + "|" + tag.second;
}

std::vector<ColumnTag> make_column_index(const std::vector<std::string>& sorted_tips) {
  std::vector<ColumnTag> cols;
  const auto k = sorted_tips.size();
  cols.reserve(k * (k - 1) / 2 + k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) cols.push_back(ColumnTag::pair(sorted_tips[i], sorted_tips[j]));
  for (const auto& t : sorted_tips) cols.push_back(ColumnTag::pendant(t));
  return cols;
}

CharacteristicMatrix::CharacteristicMatrix(Eigen::MatrixXd entries,
                                           std::vector<std::string> tip_labels,
                                           std::string source_id)
    : entries_(std::move(entries)), tips_(std::move(tip_labels)), source_id_(std::move(source_id)) {
  if (!std::is_sorted(tips_.begin(), tips_.end()) ||
      std::adjacent_find(tips_.begin(), tips_.end()) != tips_.end())
    fail(ErrorCode::InvalidMatrix, "tip labels must be strictly ascending");
  columns_ = make_column_index(tips_);
  if (entries_.rows() < 1 || entries_.cols() != static_cast<Eigen::Index>(columns_.size())) {
    fail(ErrorCode::InvalidMatrix, "matrix is " + std::to_string(entries_.rows()) + "x" +
                                       std::to_string(entries_.cols()) + ", expected " +
                                       std::to_string(columns_.size()) + " columns");
  }
  if (!entries_.allFinite()) fail(ErrorCode::InvalidMatrix, "matrix has non-finite entries");
}

bool topology_row_valid(const CharacteristicMatrix& m) {
  const auto k = static_cast<Eigen::Index>(m.tip_count());
  const auto pairs = k * (k - 1) / 2;
  const auto& e = m.entries();
  for (Eigen::Index c = 0; c < pairs; ++c) {
    if (e(0, c) < 0 || e(0, c) != std::floor(e(0, c))) return false;
  }
  for (Eigen::Index c = pairs; c < e.cols(); ++c) {
    if (e(0, c) != 1.0) return false;
  }
  return true;
}

std::vector<std::string> CharacteristicMatrix::column_names() const {
  const bool compact = std::all_of(tips_.begin(), tips_.end(), [](const auto& t) { return t.size() == 1; });
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(column_name(c, compact));
  return out;
}

CharacteristicMatrix CharacteristicMatrix::with_source(std::string source_id) const {
  CharacteristicMatrix copy = *this;
  copy.source_id_ = std::move(source_id);
  return copy;
}

MetricWeights::MetricWeights(std::vector<double> lambda) : lambda_(std::move(lambda)) {
  if (lambda_.empty()) fail(ErrorCode::InvalidWeights, "weights are empty");
  for (double v : lambda_) {
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::InvalidWeights, "weights must lie in [0,1]");
  }
  const double sum = std::accumulate(lambda_.begin(), lambda_.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) fail(ErrorCode::InvalidWeights, "weights must sum to 1");
}

MetricWeights MetricWeights::uniform(std::size_t rows) {
  return MetricWeights(std::vector<double>(rows, 1.0 / static_cast<double>(rows)));
}

MetricWeights MetricWeights::topology_only(std::size_t rows) {
  std::vector<double> w(rows, 0.0);
  w.at(0) = 1.0;
  return MetricWeights(std::move(w));
}

Eigen::RowVectorXd MetricWeights::row() const {
  return Eigen::Map<const Eigen::RowVectorXd>(lambda_.data(), static_cast<Eigen::Index>(lambda_.size()));
}

CharacteristicMatrix characteristic_matrix(const LabeledTree& tree, std::string source_id) {
  validate(tree);
  const auto tips = tree.tips();
  const auto k = tips.size();
  if (k < 2) fail(ErrorCode::FewerThanTwoTips, "characteristic matrix needs at least two tips");
  if (!is_binary(tree)) fail(ErrorCode::NotBinary, "characteristic matrix needs a binary tree; binarize first");

  const auto m = tree.feature_arity();
  const auto columns = make_column_index(tips);
  const auto n_cols = static_cast<Eigen::Index>(columns.size());
  if (static_cast<Eigen::Index>(m + 1) >= n_cols) {
    logger().warn("characteristic matrix has {} rows but only {} columns", m + 1, n_cols);
  }

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m + 1), n_cols);
  auto entering_features = [&](std::size_t node) -> const std::vector<double>* {
    const auto parents = tree.parent_edges(node);
    return parents.empty() ? nullptr : &tree.edges()[parents.front()].features;
  };

  Eigen::Index col = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j, ++col) {
      const auto anc = mrca(tree, tips[i], tips[j]);
      out(0, col) = static_cast<double>(depth(tree, anc));
      if (const auto* f = entering_features(tree.index_of(anc))) {
        for (std::size_t l = 0; l < m; ++l) out(static_cast<Eigen::Index>(l + 1), col) = (*f)[l];
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i, ++col) {
    out(0, col) = 1.0;
    const auto* f = entering_features(tree.index_of(tips[i]));
    for (std::size_t l = 0; l < m; ++l) out(static_cast<Eigen::Index>(l + 1), col) = (*f)[l];
  }

  if (source_id.empty()) source_id = fingerprint(tree);
  return CharacteristicMatrix(std::move(out), tips, std::move(source_id));
}

Eigen::RowVectorXd phi(const CharacteristicMatrix& m, const MetricWeights& w) {
  if (static_cast<Eigen::Index>(w.size()) != m.rows()) {
    fail(ErrorCode::DimensionMismatch, "weights have " + std::to_string(w.size()) +
                                           " entries, matrix has " + std::to_string(m.rows()) + " rows");
  }
  return w.row() * m.entries();
}

}  // namespace arbor
