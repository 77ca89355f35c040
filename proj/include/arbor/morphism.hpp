#pragma once

// Morphisms between characteristic matrices of the same shape.
//
// With X = M_Xᵀ (N × (m+1)) and Y = M_Yᵀ, a morphism is the N × N matrix
// A = Y X⁺ that best maps X onto Y in the least-squares sense. When X has
// full column rank the map is exact (A X = Y); otherwise the Frobenius
// residual ‖A X − Y‖ is reported instead of failing.

#include <Eigen/Dense>
#include <string>

#include "arbor/characteristic.hpp"

namespace arbor {

// Singular values at or below this fraction of the largest are treated as 0.
inline constexpr double kRankTolerance = 1e-12;

// Thin SVD X = P Δ Qᵀ truncated to numerical rank r.
struct ThinSvd {
  Eigen::MatrixXd p;       // rows(X) × r, orthonormal columns
  Eigen::VectorXd delta;   // r positive singular values, descending
  Eigen::MatrixXd q;       // cols(X) × r, orthonormal columns
  Eigen::Index rank() const { return delta.size(); }
};

ThinSvd thin_svd(const Eigen::MatrixXd& x, double tolerance = kRankTolerance);

// Moore–Penrose pseudoinverse Q Δ⁻¹ Pᵀ. Throws NonFiniteInput.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& x, double tolerance = kRankTolerance);

struct Morphism {
  std::string source_id;
  std::string target_id;
  Eigen::MatrixXd matrix;
  double residual = 0.0;

  Eigen::Index size() const { return matrix.rows(); }
};

Morphism compute_morphism(const CharacteristicMatrix& source, const CharacteristicMatrix& target);

// (f.matrix · Mᵀ)ᵀ relabelled with f's target.
CharacteristicMatrix apply_morphism(const Morphism& f, const CharacteristicMatrix& m);

// g ∘ f. Without endpoint matrices the residual is the propagated bound
// ‖A_g‖₂ · res_f + res_g.
Morphism compose(const Morphism& g, const Morphism& f);
// g ∘ f with the residual measured against the actual endpoints.
Morphism compose(const Morphism& g, const Morphism& f, const CharacteristicMatrix& source,
                 const CharacteristicMatrix& target);

Morphism identity_morphism(const CharacteristicMatrix& m);

// ‖A · sourceᵀ − targetᵀ‖_F
double morphism_residual(const Eigen::MatrixXd& a, const CharacteristicMatrix& source,
                         const CharacteristicMatrix& target);

}  // namespace arbor
