#include "beamstab/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "beamstab/errors.hpp"
#include "beamstab/parallel.hpp"

namespace beamstab {

namespace {

constexpr cplx kI(0.0, 1.0);

double golden_max(const std::function<double(double)>& f, double a, double b, int iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < iterations && (b - a) > 1e-14 * std::abs(b); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::max(fc, fd);
}

void require_memory_law(const SystemSpec& spec) {
  if (heat_law(spec.model) == HeatLaw::Fourier)
    throw SpecError(std::string("the lower-bound construction is not defined for model ") + to_string(spec.model));
}

double chi_from_mass(const BeamCoefficients& c, double base, double varpi_mass) {
  return (c.rho3 / varpi_mass - c.rho1 / c.k) * base + c.gamma * c.gamma / varpi_mass;
}

}  // namespace

SimilarGenerator similar_generator(const ModeSystem& mode) {
  WeightRoot wr = weight_root(mode.weight);
  SimilarGenerator sg;
  sg.n = mode.n;
  sg.h = wr.root * mode.generator * wr.inv_root;
  Eigen::EigenSolver<RMat> eig(sg.h, false);
  if (eig.info() != Eigen::Success) throw NumericError("eigenvalue solve failed for mode " + std::to_string(mode.n));
  sg.eigenvalues = eig.eigenvalues();
  return sg;
}

double resolvent_norm(const SimilarGenerator& sg, double lambda) {
  const int d = static_cast<int>(sg.h.rows());
  CMat shifted = -sg.h.cast<cplx>();
  shifted.diagonal().array() += kI * lambda;
  const double norm = inverse_norm(shifted);
  const double scale = std::max({1.0, std::abs(lambda), sg.h.cwiseAbs().maxCoeff()});
  if (!(norm * scale < 1e15)) {
    cplx nearest = sg.eigenvalues(0);
    for (int i = 1; i < d; ++i)
      if (std::abs(sg.eigenvalues(i) - kI * lambda) < std::abs(nearest - kI * lambda)) nearest = sg.eigenvalues(i);
    throw SpectralPointError("i*lambda = i*" + std::to_string(lambda) + " hits eigenvalue " +
                             std::to_string(nearest.real()) + "+" + std::to_string(nearest.imag()) + "i of mode " +
                             std::to_string(sg.n));
  }
  return norm;
}

double mode_resolvent_norm(const ModeSystem& mode, double lambda) {
  return resolvent_norm(similar_generator(mode), lambda);
}

std::vector<ResolventSample> sweep(const SystemSpec& spec, std::span<const double> lambdas,
                                   const SweepOptions& options, const MemoryConfig& memory) {
  if (lambdas.empty()) return {};
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    if (!(lambdas[j] >= 0.0)) throw DomainError("sweep frequencies must be nonnegative");
    if (j > 0 && !(lambdas[j] > lambdas[j - 1])) throw DomainError("sweep frequencies must be increasing");
  }
  if (options.n_max < 1) throw DomainError("n_max must be >= 1");
  ModalAssembler assembler(spec, memory);
  const auto& c = spec.coeffs;
  const double speed = std::sqrt(c.rho1 / c.k);
  const double f = options.window_factor;
  const std::size_t cells = lambdas.size();

  std::vector<double> lower(cells);
  std::vector<int> n_lo(cells), n_hi(cells);
  int n_top = options.n_max;
  for (std::size_t j = 0; j < cells; ++j) {
    if (j > 0) lower[j] = lambdas[j - 1];
    else if (cells > 1 && lambdas[0] > 0.0) lower[j] = lambdas[0] * lambdas[0] / lambdas[1];
    else lower[j] = lambdas[0];
    n_lo[j] = options.full_range ? 1 : std::max(1, static_cast<int>(std::floor(lower[j] * speed / f * c.ell / std::numbers::pi)));
    n_hi[j] = static_cast<int>(std::ceil(lambdas[j] * speed * f * c.ell / std::numbers::pi));
    n_top = std::max(n_top, n_hi[j]);
  }

  struct Hit {
    std::size_t cell;
    double value;
  };
  std::vector<std::vector<Hit>> per_mode(n_top);
  parallel_for(n_top, [&](int idx) {
    const int n = idx + 1;
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < cells; ++j)
      if (n <= options.n_max || (n >= n_lo[j] && n <= n_hi[j])) active.push_back(j);
    if (active.empty()) return;
    SimilarGenerator sg = similar_generator(assembler.assemble(n));
    auto norm_at = [&](double lam) {
      try {
        return resolvent_norm(sg, lam);
      } catch (const SpectralPointError& e) {
        throw SpectralPointError(std::string(e.what()) + " (sweep lambda " + std::to_string(lam) + ", mode " +
                                 std::to_string(n) + ")");
      }
    };
    for (std::size_t j : active) {
      double best = norm_at(lambdas[j]);
      if (options.peak_envelope) {
        for (int e = 0; e < sg.eigenvalues.size(); ++e) {
          cplx ev = sg.eigenvalues(e);
          double y = ev.imag();
          bool inside = (y > lower[j] && y <= lambdas[j]) || (j == 0 && y == lower[j]);
          if (!inside) continue;
          best = std::max(best, norm_at(y));
          double radius = 4.0 * std::abs(ev.real()) + 1e-9 * std::abs(y);
          double a = std::max(lower[j], y - radius), b = std::min(lambdas[j], y + radius);
          if (b > a) best = std::max(best, golden_max(norm_at, a, b, options.refine_iterations));
        }
      }
      per_mode[idx].push_back({j, best});
    }
  });

  std::vector<ResolventSample> out(cells);
  for (std::size_t j = 0; j < cells; ++j) out[j].lambda = lambdas[j];
  for (int idx = 0; idx < n_top; ++idx)
    for (const auto& hit : per_mode[idx])
      if (hit.value > out[hit.cell].value) {
        out[hit.cell].value = hit.value;
        out[hit.cell].argmax = idx + 1;
      }
  return out;
}

GrowthFit fit_growth(std::span<const ResolventSample> samples, double lambda_lo, double lambda_hi) {
  std::vector<double> xs, ys;
  for (const auto& s : samples)
    if (s.lambda >= lambda_lo && s.lambda <= lambda_hi && s.lambda > 0.0 && s.value > 0.0) {
      xs.push_back(std::log(s.lambda));
      ys.push_back(std::log(s.value));
    }
  if (xs.size() < 8) throw FitError("growth fit needs at least 8 samples in the window, got " + std::to_string(xs.size()));
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("growth fit window has no spread in lambda");
  GrowthFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.count = static_cast<int>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    fit.residual = std::max(fit.residual, std::abs(ys[i] - fit.intercept - fit.exponent * xs[i]));
  return fit;
}

CMat mn_matrix(const SystemSpec& spec, int n, double lambda) {
  validate(spec);
  require_memory_law(spec);
  const auto& c = spec.coeffs;
  const double w = omega(c.ell, n);
  const double lam2 = lambda * lambda;
  MemoryKernel kg = effective_kernel_g(spec);
  const double g0 = masses(kg).g0;
  const cplx mu_hat = fourier_mu(kg, lambda);
  if (!is_bresse(spec.model)) {
    CMat m = CMat::Zero(3, 3);
    m(0, 0) = -c.rho1 * lam2 + c.k * w * w;
    m(0, 1) = c.k * w;
    m(1, 0) = c.k * w;
    m(1, 1) = -c.rho2 * lam2 + c.b * w * w + c.k;
    m(1, 2) = c.gamma * w;
    m(2, 1) = lam2 * w * c.gamma;
    m(2, 2) = -c.rho3 * lam2 + c.varpi * g0 * w * w - c.varpi * w * w * mu_hat;
    return m;
  }
  MemoryKernel kh = effective_kernel_h(spec);
  const double h0 = masses(kh).g0;
  const cplx nu_hat = fourier_mu(kh, lambda);
  const double l = c.l, k = c.k, k0 = c.k0, ga = c.gamma;
  CMat m = CMat::Zero(5, 5);
  m(0, 0) = -c.rho1 * lam2 + k * w * w + l * l * k0;
  m(0, 1) = k * w;
  m(0, 2) = l * w * (k + k0);
  m(0, 4) = l * ga;
  m(1, 0) = k * w;
  m(1, 1) = -c.rho2 * lam2 + c.b * w * w + k;
  m(1, 2) = k * l;
  m(1, 3) = ga * w;
  m(2, 0) = l * w * (k + k0);
  m(2, 1) = k * l;
  m(2, 2) = -c.rho1 * lam2 + k0 * w * w + l * l * k;
  m(2, 4) = ga * w;
  m(3, 1) = lam2 * w * ga;
  m(3, 3) = -c.rho3 * lam2 + c.varpi * g0 * w * w - c.varpi * w * w * mu_hat;
  m(4, 0) = lam2 * ga * l;
  m(4, 2) = lam2 * w * ga;
  m(4, 4) = -c.rho3 * lam2 + c.varpi * h0 * w * w - c.varpi * w * w * nu_hat;
  return m;
}

LowerBoundConstants lower_bound_constants(const SystemSpec& spec) {
  validate(spec);
  require_memory_law(spec);
  const auto& c = spec.coeffs;
  LowerBoundConstants lc;
  MemoryKernel kg = effective_kernel_g(spec);
  Masses mg = masses(kg);
  lc.g0 = mg.g0;
  lc.mu0 = mg.mu0;
  const double chi0 = c.b - c.k * c.rho2 / c.rho1;
  lc.chi_g = chi_from_mass(c, chi0, c.varpi * lc.g0);
  lc.sigma_g = c.varpi * lc.g0 - c.rho3 * c.k / c.rho1;
  const double k = c.k, r1 = c.rho1, vp = c.varpi, ga2 = c.gamma * c.gamma;

  StabilityReport rep = stability_numbers(spec);
  if (classify(rep, spec.model, spec.tolerance) == Classification::ExponentiallyStable)
    throw ConstructionUndefinedError("governing stability number vanishes; the lower-bound sequence divides by zero");

  if (!is_bresse(spec.model)) {
    lc.c0 = -k * r1 * lc.sigma_g / (lc.chi_g * vp * lc.g0);
    lc.beta0 = ga2 * k * k / (lc.chi_g * vp * lc.g0);
    lc.cstar = (lc.g0 * k / (lc.mu0 * r1)) * std::abs(lc.chi_g / lc.beta0);
    return lc;
  }
  MemoryKernel kh = effective_kernel_h(spec);
  Masses mh = masses(kh);
  lc.h0 = mh.g0;
  lc.nu0 = mh.mu0;
  const double chi1 = c.k0 - c.k;
  lc.chi_h = chi_from_mass(c, chi1, vp * lc.h0);
  lc.sigma_h = vp * lc.h0 - c.rho3 * k / r1;
  const double l2 = c.l * c.l, k0 = c.k0;
  const double cg = lc.chi_g, ch = lc.chi_h, g0 = lc.g0, h0 = lc.h0;
  lc.c0 = -(1.0 / (cg * ch)) * (r1 / (vp * k)) * (1.0 / (g0 * h0)) *
          (ch * lc.sigma_g * k * k * h0 +
           (cg / r1) * (lc.sigma_h * r1 * (k + k0) * (k + k0) - ga2 * k * (3.0 * k + k0)) * l2 * g0);
  lc.beta0 = -(ga2 * k * k * k / (r1 * cg * ch)) *
             (lc.mu0 * h0 * ch * ch / g0 + 4.0 * l2 * lc.nu0 * g0 * cg * cg / h0);
  lc.cstar = (k / r1) * (k / r1) * vp * g0 * h0 * std::abs(cg * ch / lc.beta0);
  return lc;
}

double lower_bound_lambda(const SystemSpec& spec, const LowerBoundConstants& lc, int n) {
  const auto& c = spec.coeffs;
  const double w = omega(c.ell, n);
  double sq = is_bresse(spec.model) ? (c.k * w * w + c.l * c.l * c.k0 - lc.c0) / c.rho1
                                    : (c.k * w * w - lc.c0) / c.rho1;
  return sq > 0.0 ? std::sqrt(sq) : std::numeric_limits<double>::quiet_NaN();
}

LowerBoundSequence lower_bound(const SystemSpec& spec, std::span<const int> modes) {
  LowerBoundSequence seq;
  seq.model = spec.model;
  seq.constants = lower_bound_constants(spec);
  seq.forcing_norm = std::sqrt(spec.coeffs.ell / (2.0 * spec.coeffs.rho1));
  const bool bresse = is_bresse(spec.model);
  MemoryKernel kg = effective_kernel_g(spec);
  std::optional<MemoryKernel> kh;
  if (bresse) kh = effective_kernel_h(spec);
  for (int n : modes) {
    double lam = lower_bound_lambda(spec, seq.constants, n);
    if (!std::isfinite(lam)) {
      seq.notes.push_back("mode " + std::to_string(n) + " skipped: lambda_n^2 <= 0");
      continue;
    }
    LowerBoundRecord r;
    r.n = n;
    r.omega = omega(spec.coeffs.ell, n);
    r.lambda = lam;
    r.mu_hat = fourier_mu(kg, lam);
    r.nu_hat = kh ? fourier_mu(*kh, lam) : cplx(0.0);
    CMat m = mn_matrix(spec, n, lam);
    const int d = static_cast<int>(m.rows());
    CVec rhs = CVec::Zero(d);
    rhs(0) = 1.0;
    Eigen::FullPivLU<CMat> lu(m);
    CVec x = lu.solve(rhs);
    CMat a = m;
    a.col(0) = rhs;
    r.det_m = lu.determinant();
    r.det_a = a.fullPivLu().determinant();
    r.amp_direct = std::abs(x(0));
    r.amp_cramer = std::abs(r.det_a / r.det_m);
    r.ratio = r.amp_direct / lam;
    r.cramer_gap = std::abs(r.amp_direct - r.amp_cramer) / std::max(r.amp_direct, 1e-300);
    Eigen::JacobiSVD<CMat> svd(m);
    r.condition = svd.singularValues()(0) / svd.singularValues()(d - 1);
    r.cramer_flag = r.cramer_gap > 1e-8;
    if (r.cramer_flag)
      seq.notes.push_back("mode " + std::to_string(n) + ": Cramer and direct solve disagree (relative gap " +
                          std::to_string(r.cramer_gap) + ", condition " + std::to_string(r.condition) + ")");
    seq.records.push_back(r);
  }
  return seq;
}

DetCheck det_check(const SystemSpec& spec, int n) {
  LowerBoundConstants lc = lower_bound_constants(spec);
  const auto& c = spec.coeffs;
  DetCheck dc;
  dc.n = n;
  dc.lambda = lower_bound_lambda(spec, lc, n);
  if (!std::isfinite(dc.lambda)) throw DomainError("lambda_n^2 <= 0 at mode " + std::to_string(n));
  const double w = omega(c.ell, n);
  CMat m = mn_matrix(spec, n, dc.lambda);
  CMat a = m;
  a.col(0).setZero();
  a(0, 0) = 1.0;
  dc.measured = m.fullPivLu().determinant();
  dc.measured_a = a.fullPivLu().determinant();
  const double root = std::sqrt(c.rho1 / c.k);
  MemoryKernel kg = effective_kernel_g(spec);
  double rl = rl_defect(kg, dc.lambda);
  if (is_bresse(spec.model)) {
    rl = std::max(rl, rl_defect(effective_kernel_h(spec), dc.lambda));
    dc.predicted = -kI * c.varpi * root * lc.beta0 * std::pow(w, 7);
    double s = c.varpi * c.k / c.rho1;
    dc.predicted_a = lc.chi_g * lc.chi_h * s * s * lc.g0 * lc.h0 * std::pow(w, 8);
    dc.real_scaled = dc.measured.real() / std::pow(w, 8);
  } else {
    dc.predicted = -kI * c.varpi * lc.mu0 * root * lc.beta0 * std::pow(w, 3);
    dc.predicted_a = -lc.chi_g * (c.varpi * lc.g0 * c.k / c.rho1) * std::pow(w, 4);
    dc.real_scaled = dc.measured.real() / std::pow(w, 4);
  }
  dc.gap = std::abs(dc.measured - dc.predicted) / std::abs(dc.predicted);
  dc.gap_a = std::abs(dc.measured_a - dc.predicted_a) / std::abs(dc.predicted_a);
  dc.tolerance = 10.0 * rl;
  return dc;
}

SpectralAbscissa spectral_abscissa(const SystemSpec& spec, int n_max, const MemoryConfig& memory) {
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  ModalAssembler assembler(spec, memory);
  SpectralAbscissa out;
  out.per_mode.assign(n_max, 0.0);
  parallel_for(n_max, [&](int idx) {
    ModeSystem mode = assembler.assemble(idx + 1);
    Eigen::EigenSolver<RMat> eig(mode.generator, false);
    out.per_mode[idx] = eig.eigenvalues().real().maxCoeff();
  });
  out.global = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_max; ++i)
    if (out.per_mode[i] > out.global) {
      out.global = out.per_mode[i];
      out.argmax = i + 1;
    }
  return out;
}

}  // namespace beamstab
