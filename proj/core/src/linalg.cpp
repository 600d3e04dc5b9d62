#include "beamstab/linalg.hpp"

#include <cmath>
#include <limits>

#include "beamstab/errors.hpp"

namespace beamstab {

WeightRoot weight_root(const RMat& weight) {
  Eigen::SelfAdjointEigenSolver<RMat> eig(0.5 * (weight + weight.transpose()));
  if (eig.info() != Eigen::Success) throw NumericError("weight eigendecomposition failed");
  const RVec& vals = eig.eigenvalues();
  WeightRoot out;
  out.min_eig = vals.minCoeff();
  out.max_eig = vals.maxCoeff();
  if (!(out.min_eig > 1e-14 * out.max_eig))
    throw SingularWeightError("weight matrix is not positive definite (min eigenvalue " + std::to_string(out.min_eig) + ")");
  const RMat& vecs = eig.eigenvectors();
  out.root = vecs * vals.cwiseSqrt().asDiagonal() * vecs.transpose();
  out.inv_root = vecs * vals.cwiseSqrt().cwiseInverse().asDiagonal() * vecs.transpose();
  return out;
}

double largest_singular(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

double smallest_singular(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double inverse_norm(const CMat& m) {
  Eigen::PartialPivLU<CMat> lu(m);
  CMat inv = lu.inverse();
  if (!inv.allFinite()) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<CMat> eig(inv.adjoint() * inv, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 0.0));
}

std::complex<double> weighted_dot(const RMat& weight, const CVec& x, const CVec& y) {
  return y.dot(weight.cast<std::complex<double>>() * x);
}

double weighted_norm_sq(const RMat& weight, const CVec& x) { return weighted_dot(weight, x, x).real(); }

}  // namespace beamstab
