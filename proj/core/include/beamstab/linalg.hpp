#pragma once

#include <Eigen/Dense>
#include <complex>

namespace beamstab {

using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Symmetric square root of a positive definite weight and its inverse.
struct WeightRoot {
  RMat root;
  RMat inv_root;
  double min_eig = 0.0;
  double max_eig = 0.0;
};

WeightRoot weight_root(const RMat& weight);

double largest_singular(const CMat& m);
double smallest_singular(const CMat& m);
// ||m^{-1}||_2 through an LU inverse; +inf when m is numerically singular.
double inverse_norm(const CMat& m);

// Weighted inner product <x, y>_W = y^* W x
std::complex<double> weighted_dot(const RMat& weight, const CVec& x, const CVec& y);
double weighted_norm_sq(const RMat& weight, const CVec& x);

}  // namespace beamstab
