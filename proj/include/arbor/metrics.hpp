#pragma once

#include "arbor/characteristic.hpp"
#include "arbor/tree.hpp"

namespace arbor {

// ‖φ_w(M_a) − φ_w(M_b)‖ for binary trees over the same tips and features.
// Throws TipSetMismatch or FeatureArityMismatch for incomparable trees.
double tree_distance(const LabeledTree& a, const LabeledTree& b, const MetricWeights& w);

// Same distance on precomputed matrices (must share a column index).
double matrix_distance(const CharacteristicMatrix& a, const CharacteristicMatrix& b,
                       const MetricWeights& w);

}  // namespace arbor
