#pragma once

#include <complex>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace beamstab {

using cplx = std::complex<double>;

struct PronyTerm {
  double weight;  // a_j
  double time;    // theta_j
};

struct KernelTable {
  std::vector<double> s;
  std::vector<double> mu;
  double tail_rate;
};

class MemoryKernel {
 public:
  static MemoryKernel prony(std::vector<PronyTerm> terms, double dafermos_delta);
  static MemoryKernel tabulated(std::vector<double> s, std::vector<double> mu, double tail_rate,
                                double dafermos_delta);

  bool is_prony() const noexcept { return std::holds_alternative<std::vector<PronyTerm>>(rep_); }
  std::span<const PronyTerm> terms() const;
  const KernelTable& table() const;
  double dafermos_delta() const noexcept { return delta_; }

 private:
  MemoryKernel(std::variant<std::vector<PronyTerm>, KernelTable> rep, double delta)
      : rep_(std::move(rep)), delta_(delta) {}

  std::variant<std::vector<PronyTerm>, KernelTable> rep_;
  double delta_;
};

struct Masses {
  double g_total;  // integral of g, equals integral of s*mu
  double g0;       // integral of mu
  double mu0;      // mu(0)
};

struct AdmissibilityEntry {
  std::string name;
  bool passed;
  double margin;
  bool advisory;  // reported only; not part of ok()
};

struct AdmissibilityReport {
  std::vector<AdmissibilityEntry> entries;

  bool ok() const;
  const AdmissibilityEntry* find(const std::string& name) const;
};

double mu_at(const MemoryKernel& kernel, double s);
// derivative of mu; on a tabulated grid the one-sided slope of the interpolant to the right of s
double mu_slope(const MemoryKernel& kernel, double s);
Masses masses(const MemoryKernel& kernel);
AdmissibilityReport check_admissibility(const MemoryKernel& kernel);
cplx fourier_mu(const MemoryKernel& kernel, double lambda);
double rl_defect(const MemoryKernel& kernel, double lambda);

MemoryKernel exponential_kernel(double varpi, double sigma);
MemoryKernel rescaled(const MemoryKernel& kernel, double eps);
MemoryKernel cg_mix(const MemoryKernel& kernel, double eps, double share);

// true when the kernel is exactly exponential_kernel(varpi, sigma) for some sigma; returns sigma
bool exponential_relaxation(const MemoryKernel& kernel, double varpi, double& sigma, double tol = 1e-12);

constexpr double kUnitMassTolerance = 1e-10;

}  // namespace beamstab
