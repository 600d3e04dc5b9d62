#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beamstab/modal.hpp"

namespace beamstab {

// exp(t A) for a fixed real matrix, by eigendecomposition when the eigenvector
// basis is well conditioned and by scaling-and-squaring otherwise.
class Exponential {
 public:
  explicit Exponential(const RMat& a, double condition_limit = 1e8);

  CMat at(double t) const;
  bool diagonal() const noexcept { return diagonal_; }
  double eigenvector_condition() const noexcept { return condition_; }
  const CVec& eigenvalues() const noexcept { return values_; }
  const CMat& vectors() const noexcept { return vectors_; }
  const CMat& inverse() const noexcept { return inverse_; }

 private:
  RMat a_;
  CMat vectors_;
  CMat inverse_;
  CVec values_;
  double condition_ = 0.0;
  bool diagonal_ = false;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<CVec> states;
  std::vector<double> energy;  // half the squared weighted norm
  bool eigen_backend = true;
};

Trajectory propagate(const ModeSystem& mode, const CVec& u0, std::span<const double> times);

// ||exp(tH) H^{-1}||_2 for H = W^{1/2} G W^{-1/2}, evaluated at each requested time.
std::vector<double> smoothed_propagator_norms(const ModeSystem& mode, std::span<const double> times);
// ||exp(tH)||_2 for each requested time.
std::vector<double> propagator_norms(const ModeSystem& mode, std::span<const double> times);

struct SemiuniformSeries {
  std::vector<double> t;
  std::vector<double> value;
  std::vector<int> argmax;
  int n_max = 0;
};

SemiuniformSeries semiuniform_norm(const SystemSpec& spec, std::span<const double> times, int n_max,
                                   const MemoryConfig& memory = {});
double semiuniform_norm(const SystemSpec& spec, double t, int n_max, const MemoryConfig& memory = {});

enum class DecayKind { Exponential, Algebraic };
const char* to_string(DecayKind kind) noexcept;

struct DecayFit {
  DecayKind kind = DecayKind::Exponential;
  double rate = 0.0;      // exponential: decay rate; algebraic: log-log slope
  double constant = 0.0;
  double residual = 0.0;  // max abs deviation in log value
  double t_min = 0.0;
  double t_max = 0.0;
  bool poor = false;      // residual above 0.1
};

DecayFit decay_fit(std::span<const double> t, std::span<const double> value, DecayKind kind);

// Maxwell-Cattaneo system sharing coefficients with a Gurtin-Pipkin system whose kernels are exponential.
SystemSpec mc_counterpart(const SystemSpec& gp_spec);
// Sends a GP modal state to the MC modal state of the counterpart: shared components copied,
// each memory mapped to the flux -varpi omega integral(mu d).
CVec lambda_map(const SystemSpec& gp_spec, const ModeSystem& gp_mode, const ModeSystem& mc_mode, const CVec& gp_state);
// Inverse construction with history d(s) = -s P / (varpi omega); requires prony-reduced memory.
CVec lambda_lift(const SystemSpec& gp_spec, const ModeSystem& gp_mode, const ModeSystem& mc_mode, const CVec& mc_state);

struct LimitRow {
  double eps = 0.0;
  double chi_g = 0.0;
  std::optional<double> chi_h;
  double target_g = 0.0;
  std::optional<double> target_h;
  double gap_g = 0.0;
  std::optional<double> gap_h;
};

std::vector<LimitRow> singular_limit(const SystemSpec& spec, std::span<const double> eps,
                                     std::optional<double> share = std::nullopt);

}  // namespace beamstab
