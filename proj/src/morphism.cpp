#include "arbor/morphism.hpp"

#include <Eigen/SVD>

#include "arbor/error.hpp"

namespace arbor {

ThinSvd thin_svd(const Eigen::MatrixXd& x, double tolerance) {
  if (!x.allFinite()) fail(ErrorCode::NonFiniteInput, "matrix has non-finite entries");
  ThinSvd out;
  if (x.size() == 0) {
    out.p.resize(x.rows(), 0);
    out.q.resize(x.cols(), 0);
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = tolerance * sv(0);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cutoff) ++r;
  out.p = svd.matrixU().leftCols(r);
  out.delta = sv.head(r);
  out.q = svd.matrixV().leftCols(r);
  return out;
}

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& x, double tolerance) {
  const auto svd = thin_svd(x, tolerance);
  return svd.q * svd.delta.cwiseInverse().asDiagonal() * svd.p.transpose();
}

double morphism_residual(const Eigen::MatrixXd& a, const CharacteristicMatrix& source,
                         const CharacteristicMatrix& target) {
  return (a * source.entries().transpose() - target.entries().transpose()).norm();
}

namespace {

void require_same_shape(const CharacteristicMatrix& x, const CharacteristicMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    fail(ErrorCode::ShapeMismatch, "matrices are " + std::to_string(x.rows()) + "x" +
                                       std::to_string(x.cols()) + " and " + std::to_string(y.rows()) +
                                       "x" + std::to_string(y.cols()));
  }
  if (x.column_index() != y.column_index())
    fail(ErrorCode::ColumnIndexMismatch, "matrices are indexed by different tip labels");
}

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

}  // namespace

Morphism compute_morphism(const CharacteristicMatrix& source, const CharacteristicMatrix& target) {
  require_same_shape(source, target);
  // X = M_sourceᵀ = P Δ Qᵀ, so A = M_targetᵀ Q Δ⁻¹ Pᵀ.
  const Eigen::MatrixXd x = source.entries().transpose();
  const auto svd = thin_svd(x);
  Morphism f;
  f.source_id = source.source_id();
  f.target_id = target.source_id();
  f.matrix = target.entries().transpose() * svd.q * svd.delta.cwiseInverse().asDiagonal() *
             svd.p.transpose();
  f.residual = morphism_residual(f.matrix, source, target);
  return f;
}

CharacteristicMatrix apply_morphism(const Morphism& f, const CharacteristicMatrix& m) {
  if (f.matrix.rows() != m.cols() || f.matrix.cols() != m.cols()) {
    fail(ErrorCode::ShapeMismatch, "morphism of side " + std::to_string(f.matrix.rows()) +
                                       " cannot act on " + std::to_string(m.cols()) + " columns");
  }
  if (m.source_id() != f.source_id) {
    fail(ErrorCode::WrongSource,
         "morphism starts at '" + f.source_id + "', matrix is '" + m.source_id() + "'");
  }
  Eigen::MatrixXd mapped = (f.matrix * m.entries().transpose()).transpose();
  return CharacteristicMatrix(std::move(mapped), m.tip_labels(), f.target_id);
}

Morphism compose(const Morphism& g, const Morphism& f) {
  if (f.target_id != g.source_id) {
    fail(ErrorCode::NonComposable,
         "cannot compose: f ends at '" + f.target_id + "', g starts at '" + g.source_id + "'");
  }
  if (f.matrix.rows() != g.matrix.cols()) {
    fail(ErrorCode::NonComposable, "cannot compose morphisms of side " + std::to_string(g.matrix.rows()) +
                                       " and " + std::to_string(f.matrix.rows()));
  }
  Morphism h;
  h.source_id = f.source_id;
  h.target_id = g.target_id;
  h.matrix = g.matrix * f.matrix;
  h.residual = spectral_norm(g.matrix) * f.residual + g.residual;
  return h;
}

Morphism compose(const Morphism& g, const Morphism& f, const CharacteristicMatrix& source,
                 const CharacteristicMatrix& target) {
  auto h = compose(g, f);
  require_same_shape(source, target);
  if (source.source_id() != h.source_id || target.source_id() != h.target_id)
    fail(ErrorCode::WrongSource, "endpoint matrices do not match the composite morphism");
  h.residual = morphism_residual(h.matrix, source, target);
  return h;
}

Morphism identity_morphism(const CharacteristicMatrix& m) {
  return {m.source_id(), m.source_id(), Eigen::MatrixXd::Identity(m.cols(), m.cols()), 0.0};
}

}  // namespace arbor
