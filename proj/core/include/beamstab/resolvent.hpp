#pragma once

#include <span>
#include <string>
#include <vector>

#include "beamstab/modal.hpp"

namespace beamstab {

// Weighted generator H = W^{1/2} G W^{-1/2} with its spectrum; reused across frequencies.
struct SimilarGenerator {
  int n = 0;
  RMat h;
  CVec eigenvalues;
};

SimilarGenerator similar_generator(const ModeSystem& mode);

double resolvent_norm(const SimilarGenerator& sg, double lambda);
double mode_resolvent_norm(const ModeSystem& mode, double lambda);

struct ResolventSample {
  double lambda = 0.0;
  double value = 0.0;
  int argmax = 0;
};

struct SweepOptions {
  int n_max = 16;            // modes always included
  bool full_range = false;   // use every mode up to the window top instead of the window
  bool peak_envelope = true; // evaluate at resonance peaks inside each grid cell
  double window_factor = 4.0;
  int refine_iterations = 40;
};

std::vector<ResolventSample> sweep(const SystemSpec& spec, std::span<const double> lambdas,
                                   const SweepOptions& options = {}, const MemoryConfig& memory = {});

struct GrowthFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  int count = 0;
};

GrowthFit fit_growth(std::span<const ResolventSample> samples, double lambda_lo, double lambda_hi);

CMat mn_matrix(const SystemSpec& spec, int n, double lambda);

struct LowerBoundRecord {
  int n = 0;
  double omega = 0.0;
  double lambda = 0.0;
  cplx mu_hat, nu_hat;
  cplx det_m, det_a;
  double amp_direct = 0.0;
  double amp_cramer = 0.0;
  double ratio = 0.0;       // |A_n| / lambda_n
  double cramer_gap = 0.0;
  bool cramer_flag = false; // disagreement above 1e-8 relative
  double condition = 0.0;
};

struct LowerBoundConstants {
  double chi_g = 0.0, chi_h = 0.0;
  double sigma_g = 0.0, sigma_h = 0.0;
  double g0 = 0.0, h0 = 0.0, mu0 = 0.0, nu0 = 0.0;
  double c0 = 0.0;
  double beta0 = 0.0;
  double cstar = 0.0;
};

struct LowerBoundSequence {
  ModelTag model = ModelTag::BGP;
  LowerBoundConstants constants;
  double forcing_norm = 0.0;
  std::vector<LowerBoundRecord> records;
  std::vector<std::string> notes;
};

LowerBoundConstants lower_bound_constants(const SystemSpec& spec);
double lower_bound_lambda(const SystemSpec& spec, const LowerBoundConstants& constants, int n);
LowerBoundSequence lower_bound(const SystemSpec& spec, std::span<const int> modes);

struct DetCheck {
  int n = 0;
  double lambda = 0.0;
  cplx measured;
  cplx predicted;
  double gap = 0.0;
  double tolerance = 0.0;   // ten times the kernel's Riemann-Lebesgue defect at lambda_n
  cplx measured_a;
  double predicted_a = 0.0;
  double gap_a = 0.0;
  double real_scaled = 0.0; // Re(Det M_n) / omega^8 (Bresse) or / omega^4 (Timoshenko)
};

DetCheck det_check(const SystemSpec& spec, int n);

struct SpectralAbscissa {
  std::vector<double> per_mode;  // index n-1
  double global = 0.0;
  int argmax = 0;
};

SpectralAbscissa spectral_abscissa(const SystemSpec& spec, int n_max, const MemoryConfig& memory = {});

}  // namespace beamstab
