#pragma once

#include <optional>
#include <string>
#include <vector>

#include "beamstab/kernels.hpp"

namespace beamstab {

enum class ModelTag { BGP, BMC, TGP, TMC, BF, TF };
enum class HeatLaw { GurtinPipkin, MaxwellCattaneo, Fourier };

const char* to_string(ModelTag tag) noexcept;
ModelTag parse_model_tag(const std::string& text);
bool is_bresse(ModelTag tag) noexcept;
HeatLaw heat_law(ModelTag tag) noexcept;

struct BeamCoefficients {
  double rho1 = 1.0;
  double rho2 = 1.0;
  double rho3 = 1.0;
  double k = 1.0;
  double k0 = 1.0;
  double b = 1.0;
  double varpi = 1.0;
  double gamma = 1.0;
  double l = 0.0;
  double ell = 1.0;
  std::optional<double> sigma;
  std::optional<double> tau;
};

struct SystemSpec {
  ModelTag model = ModelTag::BGP;
  BeamCoefficients coeffs;
  std::optional<MemoryKernel> kernel_g;
  std::optional<MemoryKernel> kernel_h;
  double tolerance = 1e-9;

  // curvature actually used by the model (zero for Timoshenko tags)
  double curvature() const noexcept { return is_bresse(model) ? coeffs.l : 0.0; }
};

// Presence checks only: coefficients positive, required kernels and relaxation times supplied.
void validate(const SystemSpec& spec);
// Full check used before assembling generators: adds kernel admissibility and unit mass.
void validate_for_assembly(const SystemSpec& spec);

// Kernel playing the role of g (resp. h): the supplied one for GP tags, the exponential
// kernel of the relaxation time for MC tags.
MemoryKernel effective_kernel_g(const SystemSpec& spec);
MemoryKernel effective_kernel_h(const SystemSpec& spec);

enum class Classification { ExponentiallyStable, PolynomialSqrtOptimal };
const char* to_string(Classification c) noexcept;

struct StabilityNumber {
  double value = 0.0;
  double scale = 0.0;  // sum of absolute term magnitudes, used for the vanishing test
};

struct StabilityReport {
  ModelTag model = ModelTag::BGP;
  std::optional<StabilityNumber> chi0, chi1, chi_g, chi_h, chi_sigma, chi_tau;
  std::optional<double> sigma_g, sigma_h;
  Classification classification = Classification::PolynomialSqrtOptimal;
  bool phydef_k0 = false;   // k0 = b rho1 / rho2
  bool phydef_b = false;    // b > k rho2 / rho1
  double tolerance = 1e-9;
};

StabilityReport stability_numbers(const SystemSpec& spec);
bool vanishes(const StabilityNumber& number, double tol) noexcept;
Classification classify(const StabilityReport& report, ModelTag model, double tol);

struct PhysicalCheck {
  bool phydef_k0 = false;
  bool phydef_b = false;
  bool exp_condition_compatible = false;
  bool phydef_ok() const noexcept { return phydef_k0 && phydef_b; }
};

PhysicalCheck check_physical(const BeamCoefficients& coeffs, const StabilityReport& report);
std::vector<int> mode_condition(const BeamCoefficients& coeffs, int max_mode);

enum class ChiTarget { G, H, Sigma, Tau };
ChiTarget parse_chi_target(const std::string& text);
double tune_chi_zero(const BeamCoefficients& coeffs, ChiTarget target);

}  // namespace beamstab
