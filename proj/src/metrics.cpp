#include "arbor/metrics.hpp"

#include "arbor/error.hpp"

namespace arbor {

double matrix_distance(const CharacteristicMatrix& a, const CharacteristicMatrix& b,
                       const MetricWeights& w) {
  if (a.tip_labels() != b.tip_labels()) fail(ErrorCode::TipSetMismatch, "trees have different tip sets");
  if (a.rows() != b.rows()) fail(ErrorCode::FeatureArityMismatch, "trees have different feature arity");
  return (phi(a, w) - phi(b, w)).norm();
}

double tree_distance(const LabeledTree& a, const LabeledTree& b, const MetricWeights& w) {
  if (a.tips() != b.tips()) fail(ErrorCode::TipSetMismatch, "trees have different tip sets");
  if (a.feature_arity() != b.feature_arity())
    fail(ErrorCode::FeatureArityMismatch, "trees have different feature arity");
  return matrix_distance(characteristic_matrix(a), characteristic_matrix(b), w);
}

}  // namespace arbor
