#include "beamstab/modal.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <iomanip>

#include "beamstab/errors.hpp"

namespace beamstab {

namespace {

constexpr std::array<double, 6> kGaussX = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                                           0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
constexpr std::array<double, 6> kGaussW = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                                           0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

MemoryBlock prony_block(const MemoryKernel& kernel) {
  std::vector<PronyTerm> live;
  for (const auto& t : kernel.terms())
    if (t.weight > 0.0) live.push_back(t);
  if (live.empty()) throw AdmissibilityError("prony kernel has no positive term");
  const int m = static_cast<int>(live.size());
  MemoryBlock b;
  b.scheme = MemoryScheme::PronyReduction;
  b.dynamics = RMat::Zero(m, m);
  b.drive = RVec(m);
  b.force = RVec::Ones(m);
  b.weight = RMat::Zero(m, m);
  b.gamma = RMat::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    double a = live[j].weight, th = live[j].time;
    b.dynamics(j, j) = -1.0 / th;
    b.drive(j) = a * th;
    b.weight(j, j) = 1.0 / (a * th);
    b.gamma(j, j) = 2.0 / (a * th * th);
  }
  return b;
}

MemoryBlock upwind_block(const MemoryKernel& kernel, const MemoryGrid& grid) {
  const int m = static_cast<int>(grid.nodes.size());
  MemoryBlock b;
  b.scheme = MemoryScheme::SgridUpwind;
  b.grid = grid;
  b.dynamics = RMat::Zero(m, m);
  b.drive = RVec::Ones(m);
  b.force = RVec(m);
  b.weight = RMat::Zero(m, m);
  b.gamma = RMat::Zero(m, m);
  std::vector<double> mu(m);
  for (int i = 0; i < m; ++i) mu[i] = mu_at(kernel, grid.nodes[i]);
  for (int i = 0; i < m; ++i) {
    double h = grid.weights[i];
    b.dynamics(i, i) = -1.0 / h;
    if (i > 0) b.dynamics(i, i - 1) = 1.0 / h;
    b.force(i) = mu[i] * h;
    b.weight(i, i) = mu[i] * h;
    b.gamma(i, i) = i + 1 < m ? mu[i] - mu[i + 1] : mu[i];
  }
  return b;
}

MemoryBlock galerkin_block(const MemoryKernel& kernel, const MemoryGrid& grid) {
  const int m = static_cast<int>(grid.nodes.size());
  RMat mass = RMat::Zero(m, m), stiff = RMat::Zero(m, m), gamma = RMat::Zero(m, m);
  RVec load = RVec::Zero(m);
  for (int cell = 0; cell < m; ++cell) {
    double a = cell == 0 ? 0.0 : grid.nodes[cell - 1];
    double c = grid.nodes[cell];
    double h = c - a;
    // local basis: node cell-1 (absent on the first cell, where d(0) = 0) and node cell
    for (std::size_t q = 0; q < kGaussX.size(); ++q) {
      double x = a + 0.5 * (kGaussX[q] + 1.0) * h;
      double wq = 0.5 * kGaussW[q] * h;
      double mu = mu_at(kernel, x), dmu = -mu_slope(kernel, x);
      std::array<int, 2> idx = {cell - 1, cell};
      std::array<double, 2> val = {(c - x) / h, (x - a) / h};
      std::array<double, 2> der = {-1.0 / h, 1.0 / h};
      for (int i = 0; i < 2; ++i) {
        if (idx[i] < 0) continue;
        load(idx[i]) += wq * mu * val[i];
        for (int j = 0; j < 2; ++j) {
          if (idx[j] < 0) continue;
          mass(idx[i], idx[j]) += wq * mu * val[i] * val[j];
          stiff(idx[i], idx[j]) += wq * mu * val[i] * der[j];
          gamma(idx[i], idx[j]) += wq * dmu * val[i] * val[j];
        }
      }
    }
  }
  gamma(m - 1, m - 1) += mu_at(kernel, grid.s_max);
  Eigen::LDLT<RMat> ldlt(mass);
  if (ldlt.info() != Eigen::Success) throw NumericError("memory mass matrix factorization failed");
  MemoryBlock b;
  b.scheme = MemoryScheme::SgridGalerkin;
  b.grid = grid;
  b.dynamics = -ldlt.solve(stiff);
  b.drive = ldlt.solve(load);
  b.force = load;
  b.weight = mass;
  b.gamma = gamma;
  return b;
}

struct Builder {
  RMat g;
  RMat w;
  std::vector<std::string> labels;

  int idx(const std::string& name) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == name) return static_cast<int>(i);
    return -1;
  }
  void add(const std::string& row, const std::string& col, double v) {
    int r = idx(row), c = idx(col);
    if (r >= 0 && c >= 0) g(r, c) += v;
  }
};

void append_memory_labels(std::vector<std::string>& labels, const std::string& stem, int count) {
  for (int j = 1; j <= count; ++j) labels.push_back(stem + "_" + std::to_string(j));
}

}  // namespace

const char* to_string(MemoryScheme scheme) noexcept {
  switch (scheme) {
    case MemoryScheme::PronyReduction: return "prony-reduction";
    case MemoryScheme::SgridUpwind: return "sgrid-upwind";
    case MemoryScheme::SgridGalerkin: return "sgrid-galerkin";
  }
  return "?";
}

MemoryScheme parse_memory_scheme(const std::string& text) {
  if (text == "prony-reduction" || text == "prony") return MemoryScheme::PronyReduction;
  if (text == "sgrid-upwind" || text == "upwind") return MemoryScheme::SgridUpwind;
  if (text == "sgrid-galerkin" || text == "galerkin" || text == "sgrid") return MemoryScheme::SgridGalerkin;
  throw SpecError("unknown memory scheme '" + text + "'");
}

MemoryGrid make_grid(const MemoryKernel& kernel, int node_count, const MemoryConfig& config) {
  if (node_count < 8) throw DomainError("memory grid needs at least 8 nodes");
  if (!kernel.is_prony() && !(kernel.table().tail_rate > 0.0))
    throw AdmissibilityError("tabulated kernel lacks a positive tail decay rate");
  Masses ms = masses(kernel);
  double delta = kernel.dafermos_delta();
  double s_max = std::log(ms.mu0 / (delta * ms.g0 * config.tail_fraction)) / delta;
  if (!(s_max > 0.0) || !std::isfinite(s_max)) throw AdmissibilityError("cannot certify a finite truncation point");
  MemoryGrid grid;
  grid.s_max = s_max;
  grid.scheme = config.scheme == MemoryScheme::PronyReduction ? MemoryScheme::SgridGalerkin : config.scheme;
  const int m = node_count;
  double r = std::pow(config.stretch, 1.0 / (m - 1));
  double denom = std::pow(r, m) - 1.0;
  double prev = 0.0;
  for (int i = 1; i <= m; ++i) {
    double s = i == m ? s_max : s_max * (std::pow(r, i) - 1.0) / denom;
    grid.nodes.push_back(s);
    grid.weights.push_back(s - prev);
    prev = s;
  }
  return grid;
}

double grid_mass(const MemoryKernel& kernel, const MemoryGrid& grid) {
  double sum = 0.0, a = 0.0;
  for (double c : grid.nodes) {
    double h = c - a;
    for (std::size_t q = 0; q < kGaussX.size(); ++q)
      sum += 0.5 * kGaussW[q] * h * mu_at(kernel, a + 0.5 * (kGaussX[q] + 1.0) * h);
    a = c;
  }
  double S = grid.s_max;
  if (kernel.is_prony()) {
    for (const auto& t : kernel.terms()) sum += t.weight * t.time * std::exp(-S / t.time);
  } else {
    const auto& tab = kernel.table();
    // exact tail of the interpolant past S, then of the exponential envelope
    double start = std::max(S, tab.s.back());
    for (std::size_t i = 0; i + 1 < tab.s.size(); ++i) {
      double lo = std::max(tab.s[i], S), hi = tab.s[i + 1];
      if (hi > lo) sum += 0.5 * (hi - lo) * (mu_at(kernel, lo) + mu_at(kernel, hi));
    }
    sum += mu_at(kernel, start) / tab.tail_rate;
  }
  return sum;
}

MemoryBlock memory_block(const MemoryKernel& kernel, const MemoryConfig& config) {
  if (config.scheme == MemoryScheme::PronyReduction) {
    if (!kernel.is_prony()) throw SpecError("tabulated kernel requires an sgrid memory scheme with a grid");
    return prony_block(kernel);
  }
  MemoryGrid grid = make_grid(kernel, config.nodes, config);
  return config.scheme == MemoryScheme::SgridUpwind ? upwind_block(kernel, grid) : galerkin_block(kernel, grid);
}

int ModeSystem::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  return -1;
}

double omega(double ell, int n) {
  if (n < 1) throw DomainError("mode index must be >= 1");
  return n * std::numbers::pi / ell;
}

ModalAssembler::ModalAssembler(SystemSpec spec, MemoryConfig config)
    : spec_(std::move(spec)), config_(config) {
  validate_for_assembly(spec_);
  if (heat_law(spec_.model) == HeatLaw::GurtinPipkin) {
    block_g_ = memory_block(*spec_.kernel_g, config_);
    if (is_bresse(spec_.model)) block_h_ = memory_block(*spec_.kernel_h, config_);
  }
}

ModeSystem ModalAssembler::assemble(int n) const {
  ModeSystem out;
  build(n, out, true);
  return out;
}

RMat ModalAssembler::weight_matrix(int n) const {
  ModeSystem out;
  build(n, out, false);
  return out.weight;
}

void ModalAssembler::build(int n, ModeSystem& out, bool check_modes) const {
  const auto& c = spec_.coeffs;
  const bool bresse = is_bresse(spec_.model);
  const HeatLaw law = heat_law(spec_.model);
  const double w = omega(c.ell, n);
  const double l = spec_.curvature();
  if (check_modes && bresse) {
    auto bad = mode_condition(c, n);
    if (!bad.empty() && bad.back() == n)
      throw SingularWeightError("mode " + std::to_string(n) + " violates l*ell != n*pi; weight is singular");
  }

  Builder b;
  b.labels = {"phi", "phi_t", "psi", "psi_t"};
  if (bresse) b.labels.insert(b.labels.end(), {"w", "w_t"});
  b.labels.push_back("theta");
  int mem_g = -1, mem_h = -1;
  if (law == HeatLaw::GurtinPipkin) {
    mem_g = static_cast<int>(b.labels.size());
    append_memory_labels(b.labels, "eta", static_cast<int>(block_g_->drive.size()));
  } else if (law == HeatLaw::MaxwellCattaneo) {
    b.labels.push_back("p");
  }
  if (bresse) {
    b.labels.push_back("xi");
    if (law == HeatLaw::GurtinPipkin) {
      mem_h = static_cast<int>(b.labels.size());
      append_memory_labels(b.labels, "zeta", static_cast<int>(block_h_->drive.size()));
    } else if (law == HeatLaw::MaxwellCattaneo) {
      b.labels.push_back("q");
    }
  }
  const int dim = static_cast<int>(b.labels.size());
  b.g = RMat::Zero(dim, dim);
  b.w = RMat::Zero(dim, dim);

  const double r1 = c.rho1, r2 = c.rho2, r3 = c.rho3, k = c.k, k0 = c.k0, bb = c.b, vp = c.varpi, ga = c.gamma;

  b.add("phi", "phi_t", 1.0);
  b.add("psi", "psi_t", 1.0);
  b.add("w", "w_t", 1.0);
  // rho1 phi_tt = -k w (w A + B + l C) - l k0 (w C + l A) - l gamma E
  b.add("phi_t", "phi", (-k * w * w - l * l * k0) / r1);
  b.add("phi_t", "psi", -k * w / r1);
  b.add("phi_t", "w", -(k + k0) * w * l / r1);
  b.add("phi_t", "xi", -l * ga / r1);
  // rho2 psi_tt = -b w^2 B - k (w A + B + l C) - gamma w D
  b.add("psi_t", "phi", -k * w / r2);
  b.add("psi_t", "psi", (-bb * w * w - k) / r2);
  b.add("psi_t", "w", -k * l / r2);
  b.add("psi_t", "theta", -ga * w / r2);
  // rho1 w_tt = -k0 w (w C + l A) - l k (w A + B + l C) - gamma w E
  b.add("w_t", "phi", -(k + k0) * w * l / r1);
  b.add("w_t", "psi", -l * k / r1);
  b.add("w_t", "w", (-k0 * w * w - l * l * k) / r1);
  b.add("w_t", "xi", -ga * w / r1);
  // thermal coupling
  b.add("theta", "psi_t", ga * w / r3);
  b.add("xi", "w_t", ga * w / r3);
  b.add("xi", "phi_t", ga * l / r3);

  auto heat = [&](const std::string& temp, const std::string& flux, int mem, const MemoryBlock* blk,
                  std::optional<double> relax) {
    int t = b.idx(temp);
    switch (law) {
      case HeatLaw::GurtinPipkin: {
        const int m = static_cast<int>(blk->drive.size());
        b.g.block(t, mem, 1, m) += (-vp * w * w / r3) * blk->force.transpose();
        b.g.block(mem, mem, m, m) += blk->dynamics;
        b.g.block(mem, t, m, 1) += blk->drive;
        b.w.block(mem, mem, m, m) += vp * w * w * blk->weight;
        MemorySlot slot;
        slot.offset = mem;
        slot.size = m;
        slot.gamma = blk->gamma;
        slot.force = blk->force;
        out.memory.push_back(std::move(slot));
        break;
      }
      case HeatLaw::MaxwellCattaneo: {
        int p = b.idx(flux);
        b.g(t, p) += w / r3;
        b.g(p, p) += -1.0 / (*relax * vp);
        b.g(p, t) += -w / *relax;
        b.w(p, p) += *relax;
        break;
      }
      case HeatLaw::Fourier: b.g(t, t) += -vp * w * w / r3; break;
    }
  };
  heat("theta", "p", mem_g, block_g_ ? &*block_g_ : nullptr, c.sigma);
  if (bresse) heat("xi", "q", mem_h, block_h_ ? &*block_h_ : nullptr, c.tau);

  // energy weight
  RVec shear = RVec::Zero(dim);
  shear(b.idx("phi")) = w;
  shear(b.idx("psi")) = 1.0;
  if (bresse) shear(b.idx("w")) = l;
  b.w += k * shear * shear.transpose();
  b.w(b.idx("psi"), b.idx("psi")) += bb * w * w;
  b.w(b.idx("phi_t"), b.idx("phi_t")) += r1;
  b.w(b.idx("psi_t"), b.idx("psi_t")) += r2;
  b.w(b.idx("theta"), b.idx("theta")) += r3;
  if (bresse) {
    RVec axial = RVec::Zero(dim);
    axial(b.idx("phi")) = l;
    axial(b.idx("w")) = w;
    b.w += k0 * axial * axial.transpose();
    b.w(b.idx("w_t"), b.idx("w_t")) += r1;
    b.w(b.idx("xi"), b.idx("xi")) += r3;
  }
  const double half_len = 0.5 * c.ell;

  out.n = n;
  out.omega = w;
  out.model = spec_.model;
  out.scheme = law == HeatLaw::GurtinPipkin ? block_g_->scheme : MemoryScheme::PronyReduction;
  out.generator = std::move(b.g);
  out.weight = half_len * b.w;
  out.labels = std::move(b.labels);
  out.ell = c.ell;
}

ModeSystem assemble(const SystemSpec& spec, int n, const MemoryConfig& config) {
  return ModalAssembler(spec, config).assemble(n);
}

RMat weight_matrix(const SystemSpec& spec, int n, const MemoryConfig& config) {
  return ModalAssembler(spec, config).weight_matrix(n);
}

WeightDiagnostics weight_diagnostics(const SystemSpec& spec, int n, const MemoryConfig& config) {
  ModalAssembler asm_(spec, config);
  RMat wm = asm_.weight_matrix(n);
  Eigen::SelfAdjointEigenSolver<RMat> eig(wm);
  WeightDiagnostics d;
  d.min_eig = eig.eigenvalues()(0);
  d.max_eig = eig.eigenvalues()(wm.rows() - 1);
  d.singular = d.min_eig <= 1e-12 * d.max_eig;
  RVec v = eig.eigenvectors().col(0);
  // labels are fixed by the model; the first entries are phi, phi_t, psi, psi_t, (w, w_t)
  std::vector<int> disp = {0, 2};
  if (is_bresse(spec.model)) disp.push_back(4);
  double scale = std::abs(v(0)) > 1e-12 ? v(0) : 1.0;
  for (int i : disp) d.null_displacement.push_back(v(i) / scale);
  return d;
}

DissipationResult dissipation_rate(const ModeSystem& mode, const CVec& state, double varpi) {
  if (state.size() != mode.dim()) throw DomainError("state dimension does not match the mode system");
  DissipationResult r;
  CVec gu = mode.generator.cast<std::complex<double>>() * state;
  r.rate = weighted_dot(mode.weight, gu, state).real();
  r.norm_sq = weighted_norm_sq(mode.weight, state);
  if (!mode.memory.empty()) {
    r.has_memory = true;
    double scale = 0.5 * mode.ell * mode.omega * mode.omega;
    for (const auto& slot : mode.memory) {
      CVec m = state.segment(slot.offset, slot.size);
      r.gamma += scale * m.dot(slot.gamma.cast<std::complex<double>>() * m).real();
    }
    double denom = r.norm_sq > 0.0 ? r.norm_sq : 1.0;
    r.identity_gap = std::abs(r.rate + 0.5 * varpi * r.gamma) / denom;
  }
  return r;
}

double dissipativity_margin(const ModeSystem& mode) {
  WeightRoot wr = weight_root(mode.weight);
  RMat h = wr.root * mode.generator * wr.inv_root;
  RMat sym = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

std::string to_matrix_market(const ModeSystem& mode) {
  std::ostringstream os;
  os << std::setprecision(17);
  auto dump = [&](const RMat& m, const char* name) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << "% " << name << " model=" << to_string(mode.model) << " n=" << mode.n << "\n";
    os << "% labels:";
    for (const auto& l : mode.labels) os << ' ' << l;
    os << "\n";
    int nnz = 0;
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        if (m(i, j) != 0.0) ++nnz;
    os << m.rows() << ' ' << m.cols() << ' ' << nnz << "\n";
    for (int j = 0; j < m.cols(); ++j)
      for (int i = 0; i < m.rows(); ++i)
        if (m(i, j) != 0.0) os << i + 1 << ' ' << j + 1 << ' ' << m(i, j) << "\n";
  };
  dump(mode.generator, "generator");
  dump(mode.weight, "weight");
  return os.str();
}

}  // namespace beamstab
