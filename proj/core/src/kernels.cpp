#include "beamstab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "beamstab/errors.hpp"

namespace beamstab {

namespace {

constexpr double kRelTol = 1e-12;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) throw DomainError(std::string(name) + " must be positive and finite");
}

// e^x - 1 over x, and (e^x (x - 1) + 1) over x^2, stable near zero
cplx expm1_over(cplx x) {
  if (std::abs(x) < 0.5) {
    cplx sum = 0.0, term = 1.0;
    for (int k = 0; k < 24; ++k) {
      sum += term / double(k + 1);
      term *= x / double(k + 1);
    }
    return sum;
  }
  return (std::exp(x) - 1.0) / x;
}

cplx ramp_over(cplx x) {
  if (std::abs(x) < 0.5) {
    cplx sum = 0.0, term = 1.0;
    for (int k = 0; k < 24; ++k) {
      sum += term / double(k + 2);
      term *= x / double(k + 1);
    }
    return sum;
  }
  return (std::exp(x) * (x - 1.0) + 1.0) / (x * x);
}

std::size_t cell_of(const std::vector<double>& s, double x) {
  auto it = std::upper_bound(s.begin(), s.end(), x);
  std::size_t idx = static_cast<std::size_t>(it - s.begin());
  return idx == 0 ? 0 : idx - 1;
}

}  // namespace

MemoryKernel MemoryKernel::prony(std::vector<PronyTerm> terms, double dafermos_delta) {
  if (terms.empty()) throw DomainError("prony kernel needs at least one term");
  for (const auto& t : terms) {
    if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) throw DomainError("prony weight must be nonnegative");
    require_positive(t.time, "prony relaxation time");
  }
  require_positive(dafermos_delta, "dafermos delta");
  return MemoryKernel(std::move(terms), dafermos_delta);
}

MemoryKernel MemoryKernel::tabulated(std::vector<double> s, std::vector<double> mu, double tail_rate,
                                     double dafermos_delta) {
  if (s.size() < 2 || s.size() != mu.size()) throw DomainError("tabulated kernel needs matching s/mu of length >= 2");
  if (s.front() != 0.0) throw DomainError("tabulated grid must start at s = 0");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > s[i - 1])) throw DomainError("tabulated grid must be strictly increasing");
  for (double v : mu)
    if (!std::isfinite(v)) throw DomainError("tabulated mu must be finite");
  require_positive(dafermos_delta, "dafermos delta");
  if (!std::isfinite(tail_rate)) throw DomainError("tail rate must be finite");
  return MemoryKernel(KernelTable{std::move(s), std::move(mu), tail_rate}, dafermos_delta);
}

std::span<const PronyTerm> MemoryKernel::terms() const {
  if (!is_prony()) throw DomainError("kernel is not a prony series");
  return std::get<std::vector<PronyTerm>>(rep_);
}

const KernelTable& MemoryKernel::table() const {
  if (is_prony()) throw DomainError("kernel is not tabulated");
  return std::get<KernelTable>(rep_);
}

bool AdmissibilityReport::ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.advisory || e.passed; });
}

const AdmissibilityEntry* AdmissibilityReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

double mu_at(const MemoryKernel& kernel, double s) {
  if (!(s >= 0.0)) throw DomainError("mu_at requires s >= 0");
  if (kernel.is_prony()) {
    double sum = 0.0;
    for (const auto& t : kernel.terms()) sum += t.weight * std::exp(-s / t.time);
    return sum;
  }
  const auto& tab = kernel.table();
  if (s >= tab.s.back()) {
    if (std::isinf(s)) return 0.0;
    return tab.mu.back() * std::exp(-tab.tail_rate * (s - tab.s.back()));
  }
  std::size_t i = cell_of(tab.s, s);
  double h = tab.s[i + 1] - tab.s[i];
  double w = (s - tab.s[i]) / h;
  return (1.0 - w) * tab.mu[i] + w * tab.mu[i + 1];
}

double mu_slope(const MemoryKernel& kernel, double s) {
  if (!(s >= 0.0)) throw DomainError("mu_slope requires s >= 0");
  if (kernel.is_prony()) {
    double sum = 0.0;
    for (const auto& t : kernel.terms()) sum -= t.weight / t.time * std::exp(-s / t.time);
    return sum;
  }
  const auto& tab = kernel.table();
  if (s >= tab.s.back()) return -tab.tail_rate * mu_at(kernel, s);
  std::size_t i = cell_of(tab.s, s);
  return (tab.mu[i + 1] - tab.mu[i]) / (tab.s[i + 1] - tab.s[i]);
}

Masses masses(const MemoryKernel& kernel) {
  if (kernel.is_prony()) {
    Masses m{0.0, 0.0, 0.0};
    for (const auto& t : kernel.terms()) {
      m.g_total += t.weight * t.time * t.time;
      m.g0 += t.weight * t.time;
      m.mu0 += t.weight;
    }
    return m;
  }
  const auto& tab = kernel.table();
  if (!(tab.tail_rate > 0.0)) throw AdmissibilityError("tail rate must be positive for a summable kernel");
  double g0 = 0.0, first = 0.0;
  for (std::size_t i = 0; i + 1 < tab.s.size(); ++i) {
    double a = tab.s[i], b = tab.s[i + 1], h = b - a;
    double fa = tab.mu[i], fb = tab.mu[i + 1];
    g0 += 0.5 * h * (fa + fb);
    // exact integral of s times the linear interpolant on [a, b]
    first += h * (fa * (2.0 * a + b) + fb * (a + 2.0 * b)) / 6.0;
  }
  double S = tab.s.back(), muL = tab.mu.back(), d = tab.tail_rate;
  g0 += muL / d;
  first += muL * (S / d + 1.0 / (d * d));
  return Masses{first, g0, tab.mu.front()};
}

AdmissibilityReport check_admissibility(const MemoryKernel& kernel) {
  AdmissibilityReport rep;
  const double delta = kernel.dafermos_delta();
  if (kernel.is_prony()) {
    double min_weight = std::numeric_limits<double>::infinity();
    double min_rate = std::numeric_limits<double>::infinity();
    for (const auto& t : kernel.terms()) {
      min_weight = std::min(min_weight, t.weight);
      min_rate = std::min(min_rate, 1.0 / t.time);
    }
    rep.entries.push_back({"nonnegative", min_weight >= 0.0, min_weight, false});
    rep.entries.push_back({"nonincreasing", min_weight >= 0.0, min_weight, false});
    Masses m = masses(kernel);
    rep.entries.push_back({"finite_mu0", std::isfinite(m.mu0), m.mu0, false});
    rep.entries.push_back({"summable", std::isfinite(m.g0), min_rate, false});
    double margin = min_rate - delta;
    rep.entries.push_back({"dafermos", margin >= -kRelTol * min_rate, margin, false});
    double mass_gap = std::abs(m.g_total - 1.0);
    rep.entries.push_back({"unit_mass", mass_gap <= kUnitMassTolerance, -mass_gap, true});
    return rep;
  }

  const auto& tab = kernel.table();
  const double scale = std::max(std::abs(tab.mu.front()), std::numeric_limits<double>::min());
  double min_mu = *std::min_element(tab.mu.begin(), tab.mu.end());
  rep.entries.push_back({"nonnegative", min_mu >= 0.0, min_mu, false});

  double mono = std::numeric_limits<double>::infinity();
  double daf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < tab.s.size(); ++i) {
    mono = std::min(mono, tab.mu[i] - tab.mu[i + 1]);
    // log(mu) + delta*s nonincreasing on consecutive nodes implies the pairwise form
    double envelope = tab.mu[i] * std::exp(-delta * (tab.s[i + 1] - tab.s[i]));
    daf = std::min(daf, envelope - tab.mu[i + 1]);
  }
  rep.entries.push_back({"nonincreasing", mono >= -kRelTol * scale, mono, false});
  rep.entries.push_back({"finite_mu0", std::isfinite(tab.mu.front()), tab.mu.front(), false});
  rep.entries.push_back({"summable", tab.tail_rate > 0.0, tab.tail_rate, false});
  double tail_margin = tab.tail_rate - delta;
  daf = std::min(daf, tail_margin * scale);
  rep.entries.push_back({"dafermos", daf >= -kRelTol * scale, daf, false});
  if (tab.tail_rate > 0.0) {
    double mass_gap = std::abs(masses(kernel).g_total - 1.0);
    rep.entries.push_back({"unit_mass", mass_gap <= kUnitMassTolerance, -mass_gap, true});
  } else {
    rep.entries.push_back({"unit_mass", false, -std::numeric_limits<double>::infinity(), true});
  }
  return rep;
}

cplx fourier_mu(const MemoryKernel& kernel, double lambda) {
  const cplx I(0.0, 1.0);
  if (kernel.is_prony()) {
    cplx sum = 0.0;
    for (const auto& t : kernel.terms()) sum += t.weight * t.time / (1.0 + I * lambda * t.time);
    return sum;
  }
  const auto& tab = kernel.table();
  if (!(tab.tail_rate > 0.0)) throw AdmissibilityError("tail rate must be positive for the transform");
  // Filon-type rule: the linear interpolant on each cell is integrated exactly against exp(-i lambda s)
  cplx sum = 0.0;
  for (std::size_t i = 0; i + 1 < tab.s.size(); ++i) {
    double a = tab.s[i], h = tab.s[i + 1] - a;
    double slope = (tab.mu[i + 1] - tab.mu[i]) / h;
    cplx x = -I * lambda * h;
    sum += std::exp(-I * lambda * a) * (tab.mu[i] * h * expm1_over(x) + slope * h * h * ramp_over(x));
  }
  double S = tab.s.back();
  sum += tab.mu.back() * std::exp(-I * lambda * S) / (tab.tail_rate + I * lambda);
  return sum;
}

double rl_defect(const MemoryKernel& kernel, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("rl_defect requires lambda > 0");
  const cplx I(0.0, 1.0);
  double mu0 = mu_at(kernel, 0.0);
  return std::abs(lambda * fourier_mu(kernel, lambda) + I * mu0);
}

MemoryKernel exponential_kernel(double varpi, double sigma) {
  require_positive(varpi, "varpi");
  require_positive(sigma, "sigma");
  double theta = varpi * sigma;
  return MemoryKernel::prony({{1.0 / (theta * theta), theta}}, 1.0 / theta);
}

MemoryKernel rescaled(const MemoryKernel& kernel, double eps) {
  require_positive(eps, "eps");
  if (kernel.is_prony()) {
    std::vector<PronyTerm> out;
    for (const auto& t : kernel.terms()) out.push_back({t.weight / (eps * eps), eps * t.time});
    return MemoryKernel::prony(std::move(out), kernel.dafermos_delta() / eps);
  }
  const auto& tab = kernel.table();
  std::vector<double> s(tab.s.size()), mu(tab.mu.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = eps * tab.s[i];
    mu[i] = tab.mu[i] / (eps * eps);
  }
  return MemoryKernel::tabulated(std::move(s), std::move(mu), tab.tail_rate / eps, kernel.dafermos_delta() / eps);
}

MemoryKernel cg_mix(const MemoryKernel& kernel, double eps, double share) {
  require_positive(eps, "eps");
  if (!(share > 0.0 && share < 1.0)) throw DomainError("mixing share must lie in (0, 1)");
  MemoryKernel fast = rescaled(kernel, eps);
  double delta = std::min(fast.dafermos_delta(), kernel.dafermos_delta());
  if (kernel.is_prony()) {
    std::vector<PronyTerm> out;
    for (const auto& t : fast.terms()) out.push_back({(1.0 - share) * t.weight, t.time});
    for (const auto& t : kernel.terms()) out.push_back({share * t.weight, t.time});
    return MemoryKernel::prony(std::move(out), delta);
  }
  const auto& slow_tab = kernel.table();
  const auto& fast_tab = fast.table();
  std::vector<double> s;
  s.reserve(slow_tab.s.size() + fast_tab.s.size());
  std::merge(slow_tab.s.begin(), slow_tab.s.end(), fast_tab.s.begin(), fast_tab.s.end(), std::back_inserter(s));
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::vector<double> mu(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    mu[i] = (1.0 - share) * mu_at(fast, s[i]) + share * mu_at(kernel, s[i]);
  double tail = std::min(slow_tab.tail_rate, fast_tab.tail_rate);
  return MemoryKernel::tabulated(std::move(s), std::move(mu), tail, delta);
}

bool exponential_relaxation(const MemoryKernel& kernel, double varpi, double& sigma, double tol) {
  if (!kernel.is_prony() || kernel.terms().size() != 1) return false;
  const auto& t = kernel.terms()[0];
  double expected = 1.0 / (t.time * t.time);
  if (std::abs(t.weight - expected) > tol * expected) return false;
  sigma = t.time / varpi;
  return true;
}

}  // namespace beamstab
