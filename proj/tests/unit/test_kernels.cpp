#include <cmath>
#include <vector>

#include "beamstab/errors.hpp"
#include "beamstab/kernels.hpp"
#include "doctest.h"

using namespace beamstab;

namespace {

MemoryKernel unit_exp() { return MemoryKernel::prony({{1.0, 1.0}}, 1.0); }

MemoryKernel sampled_exp(int count = 10001, double s_end = 10.0) {
  std::vector<double> s(count), mu(count);
  for (int i = 0; i < count; ++i) {
    s[i] = s_end * i / (count - 1);
    mu[i] = std::exp(-s[i]);
  }
  return MemoryKernel::tabulated(s, mu, 1.0, 1.0);
}

double trapezoid_mu(const MemoryKernel& k, double s_end, int cells) {
  double h = s_end / cells, acc = 0.0;
  for (int i = 0; i <= cells; ++i) acc += (i == 0 || i == cells ? 0.5 : 1.0) * mu_at(k, i * h);
  return acc * h;
}

// one Richardson step removes the h^2 term of the smooth-kernel error
double extrapolated_mu(const MemoryKernel& k, double s_end, int cells) {
  return (4.0 * trapezoid_mu(k, s_end, 2 * cells) - trapezoid_mu(k, s_end, cells)) / 3.0;
}

}  // namespace

TEST_CASE("mu_at on prony kernels") {
  CHECK(mu_at(unit_exp(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mu_at(unit_exp(), 800.0) == doctest::Approx(0.0));
  CHECK(mu_at(exponential_kernel(1.0, 1.0), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(mu_at(unit_exp(), -1.0), DomainError);
}

TEST_CASE("masses") {
  Masses m = masses(unit_exp());
  CHECK(m.g_total == doctest::Approx(1.0));
  CHECK(m.g0 == doctest::Approx(1.0));
  CHECK(m.mu0 == doctest::Approx(1.0));

  Masses e = masses(exponential_kernel(1.0, 2.0));
  CHECK(e.g_total == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e.g0 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(e.mu0 == doctest::Approx(0.25).epsilon(1e-15));

  Masses t = masses(sampled_exp());
  CHECK(std::abs(t.g_total - 1.0) < 1e-6);
  CHECK(std::abs(t.g0 - 1.0) < 1e-6);
  CHECK(std::abs(t.mu0 - 1.0) < 1e-12);

  CHECK_THROWS_AS(masses(MemoryKernel::tabulated({0.0, 1.0}, {1.0, 0.5}, 0.0, 1.0)), AdmissibilityError);
}

TEST_CASE("g0 matches an independent trapezoid oracle") {
  for (const auto& k : {unit_exp(), exponential_kernel(2.0, 0.5), MemoryKernel::prony({{0.3, 0.5}, {0.1, 3.0}}, 0.3)}) {
    double oracle = extrapolated_mu(k, 200.0, 200000);
    CHECK(std::abs(masses(k).g0 - oracle) / oracle < 1e-8);
  }
  auto tab = sampled_exp(2001, 12.0);
  double oracle = trapezoid_mu(tab, 12.0, 2000) + std::exp(-12.0);
  CHECK(std::abs(masses(tab).g0 - oracle) / oracle < 1e-8);
}

TEST_CASE("admissibility") {
  CHECK(check_admissibility(unit_exp()).ok());

  auto fast = MemoryKernel::prony({{1.0, 1.0}}, 2.0);
  auto rep = check_admissibility(fast);
  CHECK_FALSE(rep.ok());
  REQUIRE(rep.find("dafermos") != nullptr);
  CHECK_FALSE(rep.find("dafermos")->passed);

  auto rising = MemoryKernel::tabulated({0.0, 1.0, 2.0}, {1.0, 1.2, 0.5}, 1.0, 0.1);
  auto r2 = check_admissibility(rising);
  CHECK_FALSE(r2.ok());
  CHECK_FALSE(r2.find("nonincreasing")->passed);

  for (double varpi : {0.5, 1.0, 2.0})
    for (double sigma : {0.5, 1.0, 2.0}) CHECK(check_admissibility(exponential_kernel(varpi, sigma)).ok());
}

TEST_CASE("fourier transform") {
  CHECK(fourier_mu(unit_exp(), 0.0).real() == doctest::Approx(1.0));
  cplx at1 = fourier_mu(unit_exp(), 1.0);
  CHECK(at1.real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(at1.imag() == doctest::Approx(-0.5).epsilon(1e-14));

  auto tab = sampled_exp();
  for (double lam : {0.0, 1.0, 10.0, 100.0, 1000.0}) {
    cplx exact = 1.0 / cplx(1.0, lam);
    CHECK(std::abs(fourier_mu(tab, lam) - exact) / std::abs(exact) < 1e-6);
  }
}

TEST_CASE("Riemann-Lebesgue defect") {
  CHECK(rl_defect(unit_exp(), 10.0) == doctest::Approx(1.0 / std::sqrt(101.0)).epsilon(1e-13));
  CHECK(rl_defect(unit_exp(), 1000.0) == doctest::Approx(1e-3).epsilon(1e-6));
  for (const auto& k : {unit_exp(), sampled_exp(), exponential_kernel(2.0, 0.5)}) {
    double prev = 1e300;
    for (double lam : {10.0, 100.0, 1000.0, 10000.0}) {
      double v = rl_defect(k, lam);
      CHECK(std::isfinite(v));
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("exponential kernel") {
  Masses a = masses(exponential_kernel(1.0, 1.0));
  CHECK(a.g0 == doctest::Approx(1.0));
  CHECK(a.mu0 == doctest::Approx(1.0));
  Masses b = masses(exponential_kernel(2.0, 1.0));
  CHECK(b.g0 == doctest::Approx(0.5));
  CHECK(b.mu0 == doctest::Approx(0.25));
  CHECK(b.g_total == doctest::Approx(1.0));
  CHECK_THROWS_AS(exponential_kernel(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(exponential_kernel(1.0, -1.0), DomainError);

  double sigma = 0.0;
  CHECK(exponential_relaxation(exponential_kernel(2.0, 0.5), 2.0, sigma));
  CHECK(sigma == doctest::Approx(0.5));
  CHECK_FALSE(exponential_relaxation(MemoryKernel::prony({{0.5, 1.0}, {0.5, 2.0}}, 0.5), 1.0, sigma));
}

TEST_CASE("rescaled") {
  auto half = rescaled(unit_exp(), 0.5);
  REQUIRE(half.is_prony());
  REQUIRE(half.terms().size() == 1);
  CHECK(half.terms()[0].weight == doctest::Approx(4.0));
  CHECK(half.terms()[0].time == doctest::Approx(0.5));
  CHECK(masses(rescaled(unit_exp(), 0.1)).g0 == doctest::Approx(10.0));
  CHECK(masses(rescaled(unit_exp(), 0.1)).g_total == doctest::Approx(1.0).epsilon(1e-15));

  auto tab = sampled_exp();
  double base = masses(tab).g_total;
  CHECK(std::abs(masses(rescaled(tab, 0.25)).g_total - base) < 1e-10);
}

TEST_CASE("cg_mix") {
  auto mix = cg_mix(unit_exp(), 0.01, 0.5);
  CHECK(masses(mix).g0 == doctest::Approx(50.5));
  CHECK(masses(mix).g_total == doctest::Approx(1.0));
  auto near_one = cg_mix(unit_exp(), 0.01, 1.0 - 1e-12);
  CHECK(masses(near_one).g0 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(cg_mix(unit_exp(), 0.01, 0.0), DomainError);
  CHECK_THROWS_AS(cg_mix(unit_exp(), 0.01, 1.0), DomainError);
}
