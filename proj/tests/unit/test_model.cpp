#include <cmath>
#include <numbers>
#include <random>

#include "beamstab/errors.hpp"
#include "beamstab/model.hpp"
#include "doctest.h"
#include "reference.hpp"

using namespace beamstab;
using beamstab::testing::ref1;
using beamstab::testing::ref_exp;

TEST_CASE("model tags round trip") {
  for (ModelTag tag : beamstab::testing::kAllModels) CHECK(parse_model_tag(to_string(tag)) == tag);
  CHECK_THROWS_AS(parse_model_tag("XYZ"), SpecError);
  CHECK(is_bresse(ModelTag::BMC));
  CHECK_FALSE(is_bresse(ModelTag::TF));
  CHECK(heat_law(ModelTag::TMC) == HeatLaw::MaxwellCattaneo);
}

TEST_CASE("stability numbers on REF1") {
  auto r = stability_numbers(ref1(ModelTag::BGP));
  CHECK(r.chi0->value == doctest::Approx(1.0));
  CHECK(r.chi1->value == doctest::Approx(1.0));
  CHECK(r.chi_g->value == doctest::Approx(1.0));
  CHECK(r.chi_h->value == doctest::Approx(1.0));
  CHECK(std::abs(*r.sigma_g) < 1e-15);
  CHECK(std::abs(*r.sigma_h) < 1e-15);
  CHECK(r.classification == Classification::PolynomialSqrtOptimal);

  auto mc = stability_numbers(ref1(ModelTag::BMC));
  CHECK(mc.chi_sigma->value == doctest::Approx(1.0));
  CHECK(mc.chi_tau->value == doctest::Approx(1.0));
}

TEST_CASE("stability numbers on REF-EXP") {
  auto r = stability_numbers(ref_exp(ModelTag::BGP));
  CHECK(std::abs(r.chi_g->value) < 1e-15);
  CHECK(std::abs(r.chi_h->value) < 1e-15);
  CHECK(r.classification == Classification::ExponentiallyStable);

  SystemSpec only_g = ref1(ModelTag::BGP);
  only_g.coeffs.varpi = 2.0;
  only_g.kernel_h = MemoryKernel::prony({{0.25, 2.0}}, 0.5);  // h0 = 1/2, varpi h0 = 1
  auto og = stability_numbers(only_g);
  CHECK(std::abs(og.chi_g->value) < 1e-15);
  CHECK(og.chi_h->value == doctest::Approx(1.0));
  CHECK(og.classification == Classification::ExponentiallyStable);
}

TEST_CASE("classification by model") {
  auto bf = stability_numbers(ref1(ModelTag::BF));
  CHECK(bf.classification == Classification::PolynomialSqrtOptimal);
  SystemSpec tf = ref1(ModelTag::TF);
  tf.coeffs.b = 1.0;
  CHECK(stability_numbers(tf).classification == Classification::ExponentiallyStable);
  CHECK(stability_numbers(ref_exp(ModelTag::TGP)).classification == Classification::ExponentiallyStable);
  CHECK(stability_numbers(ref_exp(ModelTag::BMC)).classification == Classification::ExponentiallyStable);
  CHECK(stability_numbers(ref_exp(ModelTag::TMC)).classification == Classification::ExponentiallyStable);
}

TEST_CASE("vanishing test is relative") {
  CHECK(vanishes({1e-16, 1.0}, 1e-9));
  CHECK_FALSE(vanishes({1e-6, 1.0}, 1e-9));
  CHECK(vanishes({1e-6, 1e4}, 1e-9));
}

TEST_CASE("MC number equals GP number of the exponential kernel") {
  for (double varpi : {0.5, 1.0, 2.0})
    for (double sigma : {0.5, 1.0, 2.0}) {
      SystemSpec mc = ref1(ModelTag::TMC);
      mc.coeffs.varpi = varpi;
      mc.coeffs.sigma = sigma;
      SystemSpec gp = ref1(ModelTag::TGP);
      gp.coeffs.varpi = varpi;
      gp.kernel_g = exponential_kernel(varpi, sigma);
      double a = stability_numbers(mc).chi_sigma->value;
      double b = stability_numbers(gp).chi_g->value;
      CHECK(std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("physical checks") {
  auto ref = ref1(ModelTag::BGP);
  auto ph = check_physical(ref.coeffs, stability_numbers(ref));
  CHECK(ph.phydef_k0);
  CHECK(ph.phydef_b);
  CHECK_FALSE(ph.exp_condition_compatible);

  auto bf = ref1(ModelTag::BF);
  auto rbf = stability_numbers(bf);
  CHECK(rbf.chi0->value == doctest::Approx(1.0));
  CHECK(rbf.chi1->value == doctest::Approx(1.0));
  CHECK_FALSE(check_physical(bf.coeffs, rbf).exp_condition_compatible);

  auto ex = ref_exp(ModelTag::BGP);
  CHECK(check_physical(ex.coeffs, stability_numbers(ex)).exp_condition_compatible);
}

TEST_CASE("physical definiteness excludes a vanishing Fourier product") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int i = 0; i < 1000; ++i) {
    BeamCoefficients c;
    c.rho1 = u(rng);
    c.rho2 = u(rng);
    c.k = u(rng);
    c.gamma = u(rng);
    c.b = c.k * c.rho2 / c.rho1 + u(rng);
    c.k0 = c.b * c.rho1 / c.rho2;
    double chi0 = c.b - c.k * c.rho2 / c.rho1;
    double chi1 = c.k0 - c.k;
    CHECK(std::abs(chi0 * chi1) > 0.0);
  }
}

TEST_CASE("mode condition") {
  BeamCoefficients c;
  c.ell = std::numbers::pi;
  c.l = 0.5;
  CHECK(mode_condition(c, 100).empty());
  c.l = 1.0;
  CHECK(mode_condition(c, 100) == std::vector<int>{1});
  c.l = 2.0;
  CHECK(mode_condition(c, 100) == std::vector<int>{2});
  CHECK_THROWS_AS(mode_condition(c, 0), DomainError);
}

TEST_CASE("tuning a number to zero") {
  auto c = ref1(ModelTag::BGP).coeffs;
  CHECK(tune_chi_zero(c, ChiTarget::G) == doctest::Approx(2.0));
  CHECK(tune_chi_zero(c, ChiTarget::Sigma) == doctest::Approx(0.5));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (int i = 0; i < 200; ++i) {
    SystemSpec s = ref1(ModelTag::TMC);
    auto& k = s.coeffs;
    k.rho1 = u(rng);
    k.rho2 = u(rng);
    k.rho3 = u(rng);
    k.k = u(rng);
    k.b = k.k * k.rho2 / k.rho1 + u(rng);
    k.gamma = u(rng);
    k.sigma = tune_chi_zero(k, ChiTarget::Sigma);
    CHECK(std::abs(stability_numbers(s).chi_sigma->value) < 1e-12);
  }

  c.b = c.k * c.rho2 / c.rho1;
  CHECK_THROWS_AS(tune_chi_zero(c, ChiTarget::G), InfeasibleError);
}

TEST_CASE("validation") {
  SystemSpec s = ref1(ModelTag::BGP);
  s.kernel_h.reset();
  CHECK_THROWS_AS(validate(s), SpecError);
  CHECK_THROWS_AS(stability_numbers(s), SpecError);

  SystemSpec mc = ref1(ModelTag::BMC);
  mc.coeffs.tau.reset();
  CHECK_THROWS_AS(validate(mc), SpecError);

  SystemSpec neg = ref1(ModelTag::TF);
  neg.coeffs.k = -1.0;
  CHECK_THROWS_AS(validate(neg), SpecError);

  SystemSpec heavy = ref1(ModelTag::TGP);
  heavy.kernel_g = MemoryKernel::prony({{2.0, 1.0}}, 1.0);
  CHECK_NOTHROW(validate(heavy));
  CHECK_THROWS_AS(validate_for_assembly(heavy), AdmissibilityError);

  SystemSpec fast = ref1(ModelTag::TGP);
  fast.kernel_g = MemoryKernel::prony({{1.0, 1.0}}, 2.0);
  CHECK_THROWS_AS(validate_for_assembly(fast), AdmissibilityError);
}

TEST_CASE("effective kernels of MC models are exponential") {
  SystemSpec mc = ref_exp(ModelTag::BMC);
  Masses g = masses(effective_kernel_g(mc));
  CHECK(g.g_total == doctest::Approx(1.0));
  CHECK(g.g0 == doctest::Approx(1.0 / (2.0 * 0.5)));
  CHECK_THROWS_AS(effective_kernel_g(ref1(ModelTag::BF)), SpecError);
  CHECK_THROWS_AS(effective_kernel_h(ref1(ModelTag::TGP)), SpecError);
}
