#include "beamstab/dynamics.hpp"

#include <cmath>
#include <limits>
#include <unsupported/Eigen/MatrixFunctions>

#include "beamstab/errors.hpp"
#include "beamstab/parallel.hpp"

namespace beamstab {

Exponential::Exponential(const RMat& a, double condition_limit) : a_(a) {
  Eigen::EigenSolver<RMat> eig(a_);
  if (eig.info() != Eigen::Success) return;
  vectors_ = eig.eigenvectors();
  values_ = eig.eigenvalues();
  Eigen::JacobiSVD<CMat> svd(vectors_);
  const auto& sv = svd.singularValues();
  condition_ = sv(0) / sv(sv.size() - 1);
  if (std::isfinite(condition_) && condition_ <= condition_limit) {
    inverse_ = vectors_.inverse();
    diagonal_ = true;
  }
}

CMat Exponential::at(double t) const {
  if (diagonal_) {
    CVec factors = (values_ * t).array().exp().matrix();
    return vectors_ * factors.asDiagonal() * inverse_;
  }
  RMat scaled = t * a_;
  RMat e = scaled.exp();
  return e.cast<cplx>();
}

Trajectory propagate(const ModeSystem& mode, const CVec& u0, std::span<const double> times) {
  if (u0.size() != mode.dim()) throw DomainError("initial state dimension does not match the mode system");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0)) throw DomainError("propagation times must be nonnegative");
    if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("propagation times must be increasing");
  }
  Exponential ex(mode.generator);
  Trajectory tr;
  tr.eigen_backend = ex.diagonal();
  for (double t : times) {
    CVec u = t == 0.0 ? u0 : CVec(ex.at(t) * u0);
    if (!u.allFinite())
      throw NumericError("non-finite state in mode " + std::to_string(mode.n) + " at t = " + std::to_string(t));
    tr.t.push_back(t);
    tr.energy.push_back(0.5 * weighted_norm_sq(mode.weight, u));
    tr.states.push_back(std::move(u));
  }
  return tr;
}

namespace {

RMat similar(const ModeSystem& mode) {
  WeightRoot wr = weight_root(mode.weight);
  return wr.root * mode.generator * wr.inv_root;
}

}  // namespace

std::vector<double> smoothed_propagator_norms(const ModeSystem& mode, std::span<const double> times) {
  RMat h = similar(mode);
  Exponential ex(h);
  std::vector<double> out;
  out.reserve(times.size());
  if (ex.diagonal()) {
    const CVec& vals = ex.eigenvalues();
    if ((vals.array().abs() == 0.0).any())
      throw SpectralPointError("generator of mode " + std::to_string(mode.n) + " is singular");
    for (double t : times) {
      CVec f = ((vals * t).array().exp() / vals.array()).matrix();
      out.push_back(largest_singular(ex.vectors() * f.asDiagonal() * ex.inverse()));
    }
    return out;
  }
  Eigen::FullPivLU<RMat> lu(h);
  if (!lu.isInvertible()) throw SpectralPointError("generator of mode " + std::to_string(mode.n) + " is singular");
  RMat inv = lu.inverse();
  for (double t : times) out.push_back(largest_singular(ex.at(t) * inv.cast<cplx>()));
  return out;
}

std::vector<double> propagator_norms(const ModeSystem& mode, std::span<const double> times) {
  Exponential ex(similar(mode));
  std::vector<double> out;
  for (double t : times) out.push_back(largest_singular(ex.at(t)));
  return out;
}

SemiuniformSeries semiuniform_norm(const SystemSpec& spec, std::span<const double> times, int n_max,
                                   const MemoryConfig& memory) {
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  for (double t : times)
    if (!(t >= 0.0)) throw DomainError("times must be nonnegative");
  ModalAssembler assembler(spec, memory);
  std::vector<std::vector<double>> per_mode(n_max);
  parallel_for(n_max, [&](int idx) { per_mode[idx] = smoothed_propagator_norms(assembler.assemble(idx + 1), times); });
  SemiuniformSeries s;
  s.n_max = n_max;
  s.t.assign(times.begin(), times.end());
  s.value.assign(times.size(), 0.0);
  s.argmax.assign(times.size(), 0);
  for (int idx = 0; idx < n_max; ++idx)
    for (std::size_t j = 0; j < times.size(); ++j)
      if (per_mode[idx][j] > s.value[j]) {
        s.value[j] = per_mode[idx][j];
        s.argmax[j] = idx + 1;
      }
  return s;
}

double semiuniform_norm(const SystemSpec& spec, double t, int n_max, const MemoryConfig& memory) {
  double times[1] = {t};
  return semiuniform_norm(spec, times, n_max, memory).value[0];
}

const char* to_string(DecayKind kind) noexcept {
  return kind == DecayKind::Exponential ? "exponential" : "algebraic";
}

DecayFit decay_fit(std::span<const double> t, std::span<const double> value, DecayKind kind) {
  if (t.size() != value.size()) throw DomainError("decay fit needs matching t and value series");
  if (t.size() < 8) throw FitError("decay fit needs at least 8 points");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(value[i] > 0.0)) throw DomainError("decay fit needs positive values");
    if (kind == DecayKind::Algebraic && !(t[i] > 0.0)) throw DomainError("algebraic fit needs positive times");
    xs.push_back(kind == DecayKind::Exponential ? t[i] : std::log(t[i]));
    ys.push_back(std::log(value[i]));
  }
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
  if (!(sxx > 0.0)) throw FitError("decay fit window has no spread");
  double slope = sxy / sxx, icpt = my - slope * mx;
  DecayFit fit;
  fit.kind = kind;
  fit.rate = kind == DecayKind::Exponential ? -slope : slope;
  fit.constant = std::exp(icpt);
  for (std::size_t i = 0; i < xs.size(); ++i)
    fit.residual = std::max(fit.residual, std::abs(ys[i] - icpt - slope * xs[i]));
  fit.t_min = t.front();
  fit.t_max = t.back();
  fit.poor = fit.residual > 0.1;
  return fit;
}

SystemSpec mc_counterpart(const SystemSpec& gp_spec) {
  validate(gp_spec);
  if (heat_law(gp_spec.model) != HeatLaw::GurtinPipkin)
    throw UnsupportedMapError("the map starts from a Gurtin-Pipkin model");
  SystemSpec mc = gp_spec;
  mc.kernel_g.reset();
  mc.kernel_h.reset();
  double sigma = 0.0;
  if (!exponential_relaxation(*gp_spec.kernel_g, gp_spec.coeffs.varpi, sigma))
    throw UnsupportedMapError("kernel_g is not an exponential kernel");
  mc.coeffs.sigma = sigma;
  if (is_bresse(gp_spec.model)) {
    double tau = 0.0;
    if (!exponential_relaxation(*gp_spec.kernel_h, gp_spec.coeffs.varpi, tau))
      throw UnsupportedMapError("kernel_h is not an exponential kernel");
    mc.coeffs.tau = tau;
    mc.model = ModelTag::BMC;
  } else {
    mc.model = ModelTag::TMC;
  }
  return mc;
}

CVec lambda_map(const SystemSpec& gp_spec, const ModeSystem& gp_mode, const ModeSystem& mc_mode, const CVec& gp_state) {
  mc_counterpart(gp_spec);
  if (gp_state.size() != gp_mode.dim()) throw DomainError("state dimension does not match the GP mode system");
  CVec out = CVec::Zero(mc_mode.dim());
  for (int i = 0; i < mc_mode.dim(); ++i) {
    int j = gp_mode.index_of(mc_mode.labels[i]);
    if (j >= 0) out(i) = gp_state(j);
  }
  const double flux_scale = -gp_spec.coeffs.varpi * gp_mode.omega;
  const char* fluxes[2] = {"p", "q"};
  for (std::size_t s = 0; s < gp_mode.memory.size() && s < 2; ++s) {
    const auto& slot = gp_mode.memory[s];
    cplx integral = slot.force.cast<cplx>().dot(gp_state.segment(slot.offset, slot.size));
    int p = mc_mode.index_of(fluxes[s]);
    if (p < 0) throw UnsupportedMapError("MC mode lacks a flux component for memory " + std::to_string(s + 1));
    out(p) = flux_scale * integral;
  }
  return out;
}

CVec lambda_lift(const SystemSpec& gp_spec, const ModeSystem& gp_mode, const ModeSystem& mc_mode, const CVec& mc_state) {
  mc_counterpart(gp_spec);
  if (gp_mode.scheme != MemoryScheme::PronyReduction)
    throw UnsupportedMapError("lifting needs prony-reduced memory");
  if (mc_state.size() != mc_mode.dim()) throw DomainError("state dimension does not match the MC mode system");
  CVec out = CVec::Zero(gp_mode.dim());
  for (int i = 0; i < gp_mode.dim(); ++i) {
    int j = mc_mode.index_of(gp_mode.labels[i]);
    if (j >= 0) out(i) = mc_state(j);
  }
  const double vw = gp_spec.coeffs.varpi * gp_mode.omega;
  const MemoryKernel* kernels[2] = {&*gp_spec.kernel_g, gp_spec.kernel_h ? &*gp_spec.kernel_h : nullptr};
  const char* fluxes[2] = {"p", "q"};
  for (std::size_t s = 0; s < gp_mode.memory.size() && s < 2; ++s) {
    const auto& slot = gp_mode.memory[s];
    // history d(s) = -s P / (varpi omega); its prony state is a_j integral(s e^{-s/theta_j}) d = -a_j theta_j^2 P/(varpi omega)
    cplx flux = mc_state(mc_mode.index_of(fluxes[s]));
    auto terms = kernels[s]->terms();
    for (int j = 0; j < slot.size; ++j)
      out(slot.offset + j) = -terms[j].weight * terms[j].time * terms[j].time * flux / vw;
  }
  return out;
}

std::vector<LimitRow> singular_limit(const SystemSpec& spec, std::span<const double> eps, std::optional<double> share) {
  validate(spec);
  if (heat_law(spec.model) != HeatLaw::GurtinPipkin)
    throw SpecError("the singular limit acts on Gurtin-Pipkin kernels");
  const auto& c = spec.coeffs;
  const bool bresse = is_bresse(spec.model);
  const double target_g = -(c.rho1 / c.k) * (c.b - c.k * c.rho2 / c.rho1);
  const double target_h = -(c.rho1 / c.k) * (c.k0 - c.k);
  std::vector<LimitRow> rows;
  for (double e : eps) {
    SystemSpec s = spec;
    auto transform = [&](const MemoryKernel& k) { return share ? cg_mix(k, e, *share) : rescaled(k, e); };
    s.kernel_g = transform(*spec.kernel_g);
    if (bresse) s.kernel_h = transform(*spec.kernel_h);
    StabilityReport rep = stability_numbers(s);
    LimitRow row;
    row.eps = e;
    row.chi_g = rep.chi_g->value;
    row.target_g = target_g;
    row.gap_g = std::abs(row.chi_g - target_g) / std::max(std::abs(target_g), 1e-300);
    if (bresse) {
      row.chi_h = rep.chi_h->value;
      row.target_h = target_h;
      row.gap_h = std::abs(*row.chi_h - target_h) / std::max(std::abs(target_h), 1e-300);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace beamstab
