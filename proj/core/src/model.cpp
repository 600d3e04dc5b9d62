#include "beamstab/model.hpp"

#include <cmath>
#include <numbers>

#include "beamstab/errors.hpp"

namespace beamstab {

const char* to_string(ModelTag tag) noexcept {
  switch (tag) {
    case ModelTag::BGP: return "BGP";
    case ModelTag::BMC: return "BMC";
    case ModelTag::TGP: return "TGP";
    case ModelTag::TMC: return "TMC";
    case ModelTag::BF: return "BF";
    case ModelTag::TF: return "TF";
  }
  return "?";
}

ModelTag parse_model_tag(const std::string& text) {
  for (ModelTag t : {ModelTag::BGP, ModelTag::BMC, ModelTag::TGP, ModelTag::TMC, ModelTag::BF, ModelTag::TF})
    if (text == to_string(t)) return t;
  throw SpecError("unknown model tag '" + text + "'");
}

bool is_bresse(ModelTag tag) noexcept {
  return tag == ModelTag::BGP || tag == ModelTag::BMC || tag == ModelTag::BF;
}

HeatLaw heat_law(ModelTag tag) noexcept {
  switch (tag) {
    case ModelTag::BGP:
    case ModelTag::TGP: return HeatLaw::GurtinPipkin;
    case ModelTag::BMC:
    case ModelTag::TMC: return HeatLaw::MaxwellCattaneo;
    default: return HeatLaw::Fourier;
  }
}

const char* to_string(Classification c) noexcept {
  return c == Classification::ExponentiallyStable ? "ExponentiallyStable" : "PolynomialSqrtOptimal";
}

namespace {

void positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw SpecError(std::string("coefficient '") + name + "' must be positive");
}

void check_assembly_kernel(const MemoryKernel& kernel, const char* name) {
  auto rep = check_admissibility(kernel);
  if (!rep.ok()) throw AdmissibilityError(std::string(name) + " is not admissible");
  double mass = masses(kernel).g_total;
  if (std::abs(mass - 1.0) > kUnitMassTolerance)
    throw AdmissibilityError(std::string(name) + " must have unit total mass, got " + std::to_string(mass));
}

StabilityNumber gp_number(const BeamCoefficients& c, double base, double base_scale, double varpi_g0) {
  double q = c.gamma * c.gamma / varpi_g0;
  double scale = (std::abs(c.rho3 / varpi_g0) + std::abs(c.rho1 / c.k)) * base_scale + std::abs(q);
  return {(c.rho3 / varpi_g0 - c.rho1 / c.k) * base + q, scale};
}

StabilityNumber mc_number(const BeamCoefficients& c, double base, double base_scale, double relax) {
  double scale = (std::abs(relax * c.rho3) + std::abs(c.rho1 / c.k)) * base_scale + c.gamma * c.gamma * relax;
  return {(relax * c.rho3 - c.rho1 / c.k) * base + c.gamma * c.gamma * relax, scale};
}

}  // namespace

void validate(const SystemSpec& spec) {
  const auto& c = spec.coeffs;
  positive(c.rho1, "rho1");
  positive(c.rho2, "rho2");
  positive(c.rho3, "rho3");
  positive(c.k, "k");
  positive(c.b, "b");
  positive(c.varpi, "varpi");
  positive(c.gamma, "gamma");
  positive(c.ell, "ell");
  const bool bresse = is_bresse(spec.model);
  if (bresse) {
    positive(c.k0, "k0");
    if (!(c.l >= 0.0) || !std::isfinite(c.l)) throw SpecError("coefficient 'l' must be nonnegative");
  }
  switch (heat_law(spec.model)) {
    case HeatLaw::GurtinPipkin:
      if (!spec.kernel_g) throw SpecError(std::string("model ") + to_string(spec.model) + " requires 'kernel_g'");
      if (bresse && !spec.kernel_h) throw SpecError("model BGP requires 'kernel_h'");
      break;
    case HeatLaw::MaxwellCattaneo:
      if (!c.sigma) throw SpecError(std::string("model ") + to_string(spec.model) + " requires 'sigma'");
      positive(*c.sigma, "sigma");
      if (bresse) {
        if (!c.tau) throw SpecError("model BMC requires 'tau'");
        positive(*c.tau, "tau");
      }
      break;
    case HeatLaw::Fourier: break;
  }
  if (!(spec.tolerance > 0.0)) throw SpecError("tolerance must be positive");
}

void validate_for_assembly(const SystemSpec& spec) {
  validate(spec);
  if (heat_law(spec.model) == HeatLaw::GurtinPipkin) {
    check_assembly_kernel(*spec.kernel_g, "kernel_g");
    if (is_bresse(spec.model)) check_assembly_kernel(*spec.kernel_h, "kernel_h");
  }
}

MemoryKernel effective_kernel_g(const SystemSpec& spec) {
  switch (heat_law(spec.model)) {
    case HeatLaw::GurtinPipkin:
      if (!spec.kernel_g) throw SpecError("missing 'kernel_g'");
      return *spec.kernel_g;
    case HeatLaw::MaxwellCattaneo:
      if (!spec.coeffs.sigma) throw SpecError("missing 'sigma'");
      return exponential_kernel(spec.coeffs.varpi, *spec.coeffs.sigma);
    case HeatLaw::Fourier: break;
  }
  throw SpecError("Fourier models have no memory kernel");
}

MemoryKernel effective_kernel_h(const SystemSpec& spec) {
  if (!is_bresse(spec.model)) throw SpecError("Timoshenko models have a single temperature");
  switch (heat_law(spec.model)) {
    case HeatLaw::GurtinPipkin:
      if (!spec.kernel_h) throw SpecError("missing 'kernel_h'");
      return *spec.kernel_h;
    case HeatLaw::MaxwellCattaneo:
      if (!spec.coeffs.tau) throw SpecError("missing 'tau'");
      return exponential_kernel(spec.coeffs.varpi, *spec.coeffs.tau);
    case HeatLaw::Fourier: break;
  }
  throw SpecError("Fourier models have no memory kernel");
}

bool vanishes(const StabilityNumber& number, double tol) noexcept {
  return std::abs(number.value) <= tol * number.scale;
}

StabilityReport stability_numbers(const SystemSpec& spec) {
  validate(spec);
  const auto& c = spec.coeffs;
  const bool bresse = is_bresse(spec.model);
  StabilityReport r;
  r.model = spec.model;
  r.tolerance = spec.tolerance;

  double kr = c.k * c.rho2 / c.rho1;
  r.chi0 = StabilityNumber{c.b - kr, std::abs(c.b) + std::abs(kr)};
  if (bresse) r.chi1 = StabilityNumber{c.k0 - c.k, std::abs(c.k0) + std::abs(c.k)};

  switch (heat_law(spec.model)) {
    case HeatLaw::GurtinPipkin: {
      double g0 = masses(*spec.kernel_g).g0;
      r.chi_g = gp_number(c, r.chi0->value, r.chi0->scale, c.varpi * g0);
      r.sigma_g = c.varpi * g0 - c.rho3 * c.k / c.rho1;
      if (bresse) {
        double h0 = masses(*spec.kernel_h).g0;
        r.chi_h = gp_number(c, r.chi1->value, r.chi1->scale, c.varpi * h0);
        r.sigma_h = c.varpi * h0 - c.rho3 * c.k / c.rho1;
      }
      break;
    }
    case HeatLaw::MaxwellCattaneo:
      r.chi_sigma = mc_number(c, r.chi0->value, r.chi0->scale, *c.sigma);
      if (bresse) r.chi_tau = mc_number(c, r.chi1->value, r.chi1->scale, *c.tau);
      break;
    case HeatLaw::Fourier: break;
  }

  r.phydef_k0 = std::abs(c.k0 - c.b * c.rho1 / c.rho2) <= 1e-12 * std::abs(c.k0);
  r.phydef_b = c.b > kr;
  r.classification = classify(r, spec.model, spec.tolerance);
  return r;
}

Classification classify(const StabilityReport& report, ModelTag model, double tol) {
  auto need = [](const std::optional<StabilityNumber>& n, const char* name) -> const StabilityNumber& {
    if (!n) throw SpecError(std::string("stability number ") + name + " missing from report");
    return *n;
  };
  bool zero = false;
  switch (model) {
    case ModelTag::BGP: zero = vanishes(need(report.chi_g, "chi_g"), tol) || vanishes(need(report.chi_h, "chi_h"), tol); break;
    case ModelTag::BMC:
      zero = vanishes(need(report.chi_sigma, "chi_sigma"), tol) || vanishes(need(report.chi_tau, "chi_tau"), tol);
      break;
    case ModelTag::TGP: zero = vanishes(need(report.chi_g, "chi_g"), tol); break;
    case ModelTag::TMC: zero = vanishes(need(report.chi_sigma, "chi_sigma"), tol); break;
    case ModelTag::BF: zero = vanishes(need(report.chi0, "chi0"), tol) || vanishes(need(report.chi1, "chi1"), tol); break;
    case ModelTag::TF: zero = vanishes(need(report.chi0, "chi0"), tol); break;
  }
  return zero ? Classification::ExponentiallyStable : Classification::PolynomialSqrtOptimal;
}

PhysicalCheck check_physical(const BeamCoefficients& coeffs, const StabilityReport& report) {
  PhysicalCheck out;
  const auto& c = coeffs;
  out.phydef_k0 = std::abs(c.k0 - c.b * c.rho1 / c.rho2) <= 1e-12 * std::abs(c.k0);
  out.phydef_b = c.b > c.k * c.rho2 / c.rho1;
  bool exp = classify(report, report.model, report.tolerance) == Classification::ExponentiallyStable;
  if (report.model == ModelTag::BF || report.model == ModelTag::TF)
    out.exp_condition_compatible = !out.phydef_ok() && exp;
  else
    out.exp_condition_compatible = out.phydef_ok() && exp;
  return out;
}

std::vector<int> mode_condition(const BeamCoefficients& coeffs, int max_mode) {
  if (max_mode < 1) throw DomainError("mode count must be >= 1");
  std::vector<int> bad;
  double ll = coeffs.l * coeffs.ell;
  for (int n = 1; n <= max_mode; ++n)
    if (std::abs(ll - n * std::numbers::pi) < 1e-9) bad.push_back(n);
  return bad;
}

ChiTarget parse_chi_target(const std::string& text) {
  if (text == "chi_g" || text == "g") return ChiTarget::G;
  if (text == "chi_h" || text == "h") return ChiTarget::H;
  if (text == "chi_sigma" || text == "sigma") return ChiTarget::Sigma;
  if (text == "chi_tau" || text == "tau") return ChiTarget::Tau;
  throw SpecError("unknown stability-number target '" + text + "'");
}

double tune_chi_zero(const BeamCoefficients& c, ChiTarget target) {
  bool first = target == ChiTarget::G || target == ChiTarget::Sigma;
  double base = first ? c.b - c.k * c.rho2 / c.rho1 : c.k0 - c.k;
  double num = c.rho3 * base + c.gamma * c.gamma;
  double den = c.rho1 / c.k * base;
  if (num == 0.0 || den == 0.0 || (num > 0.0) != (den > 0.0))
    throw InfeasibleError("no positive value makes the stability number vanish");
  bool gp = target == ChiTarget::G || target == ChiTarget::H;
  // GP: solve for varpi g0; MC: solve for the relaxation time
  return gp ? num / den : den / num;
}

}  // namespace beamstab
