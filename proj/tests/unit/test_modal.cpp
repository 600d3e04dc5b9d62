#include <cmath>
#include <numbers>
#include <random>

#include "beamstab/dynamics.hpp"
#include "beamstab/errors.hpp"
#include "beamstab/modal.hpp"
#include "beamstab/resolvent.hpp"
#include "doctest.h"
#include "reference.hpp"

using namespace beamstab;
using beamstab::testing::random_state;
using beamstab::testing::ref1;

TEST_CASE("modal frequencies") {
  CHECK(omega(std::numbers::pi, 1) == doctest::Approx(1.0));
  CHECK(omega(std::numbers::pi, 7) == doctest::Approx(7.0));
  CHECK(omega(2.0, 3) == doctest::Approx(1.5 * std::numbers::pi));
  CHECK_THROWS_AS(omega(1.0, 0), DomainError);
}

TEST_CASE("state dimensions and labels") {
  CHECK(assemble(ref1(ModelTag::BMC), 1).dim() == 10);
  CHECK(assemble(ref1(ModelTag::BGP), 1).dim() == 10);
  CHECK(assemble(ref1(ModelTag::TF), 1).dim() == 5);
  CHECK(assemble(ref1(ModelTag::TGP), 1).dim() == 6);
  CHECK(assemble(ref1(ModelTag::TMC), 1).dim() == 6);
  CHECK(assemble(ref1(ModelTag::BF), 1).dim() == 8);
  auto bgp = assemble(ref1(ModelTag::BGP), 2);
  CHECK(bgp.index_of("eta_1") >= 0);
  CHECK(bgp.index_of("zeta_1") >= 0);
  CHECK(bgp.index_of("p") == -1);
}

TEST_CASE("Maxwell-Cattaneo heat rows") {
  auto m = assemble(ref1(ModelTag::BMC), 1);
  const int th = m.index_of("theta"), p = m.index_of("p"), psit = m.index_of("psi_t");
  CHECK(m.generator(th, p) == doctest::Approx(1.0));     // omega / rho3
  CHECK(m.generator(th, psit) == doctest::Approx(1.0));  // gamma omega / rho3
}

TEST_CASE("Fourier modes are strictly stable") {
  auto m = assemble(ref1(ModelTag::TF), 1);
  Eigen::EigenSolver<RMat> eig(m.generator);
  for (int i = 0; i < eig.eigenvalues().size(); ++i) CHECK(eig.eigenvalues()(i).real() < 0.0);
}

TEST_CASE("weight matrices") {
  SystemSpec s = ref1(ModelTag::BGP);
  CHECK(weight_diagnostics(s, 1).min_eig > 0.0);
  s.coeffs.l = 1.0;
  auto d = weight_diagnostics(s, 1);
  CHECK(d.singular);
  REQUIRE(d.null_displacement.size() == 3);
  CHECK(d.null_displacement[0] == doctest::Approx(1.0));
  CHECK(std::abs(d.null_displacement[1]) < 1e-9);
  CHECK(d.null_displacement[2] == doctest::Approx(-1.0));
  for (int n = 2; n <= 100; ++n) CHECK_FALSE(weight_diagnostics(s, n).singular);
  CHECK_THROWS_AS(assemble(s, 1), SingularWeightError);
  CHECK_NOTHROW(assemble(s, 2));

  for (int n = 1; n <= 32; ++n) CHECK(weight_diagnostics(ref1(ModelTag::TGP), n).min_eig > 0.0);
}

TEST_CASE("Timoshenko assembly is the curvature-free Bresse restriction") {
  SystemSpec bresse = ref1(ModelTag::BGP);
  bresse.coeffs.l = 0.0;
  for (int n : {1, 3, 10}) {
    auto b = assemble(bresse, n);
    auto t = assemble(ref1(ModelTag::TGP), n);
    for (int i = 0; i < t.dim(); ++i)
      for (int j = 0; j < t.dim(); ++j) {
        int bi = b.index_of(t.labels[i]), bj = b.index_of(t.labels[j]);
        REQUIRE(bi >= 0);
        CHECK(t.generator(i, j) == doctest::Approx(b.generator(bi, bj)));
        CHECK(t.weight(i, j) == doctest::Approx(b.weight(bi, bj)));
      }
  }
}

TEST_CASE("dissipation rate examples") {
  auto mode = assemble(ref1(ModelTag::BMC), 3);
  CVec u = CVec::Zero(mode.dim());
  u(mode.index_of("phi")) = {1.0, 0.5};
  u(mode.index_of("psi_t")) = {-2.0, 0.0};
  CHECK(std::abs(dissipation_rate(mode, u, 1.0).rate) < 1e-12);

  CVec flux = CVec::Zero(mode.dim());
  flux(mode.index_of("p")) = {3.0, 4.0};
  double expected = -(mode.ell / 2.0) * 25.0 / 1.0;
  CHECK(dissipation_rate(mode, flux, 1.0).rate == doctest::Approx(expected));

  CHECK_THROWS_AS(dissipation_rate(mode, CVec::Zero(3), 1.0), DomainError);
}

TEST_CASE("dissipativity on random states for every model") {
  std::mt19937_64 rng(1);
  for (ModelTag tag : beamstab::testing::kAllModels) {
    SystemSpec spec = ref1(tag);
    ModalAssembler assembler(spec);
    for (int n = 1; n <= 64; n += 9) {
      auto mode = assembler.assemble(n);
      CHECK(dissipativity_margin(mode) <= 1e-10);
      for (int k = 0; k < 50; ++k) {
        auto r = dissipation_rate(mode, random_state(mode.dim(), rng), spec.coeffs.varpi);
        CHECK(r.rate <= 1e-10 * r.norm_sq);
        if (r.has_memory) CHECK(r.identity_gap < 1e-10);
      }
    }
  }
}

TEST_CASE("s-grid memory") {
  MemoryKernel unit = MemoryKernel::prony({{1.0, 1.0}}, 1.0);
  MemoryConfig cfg;
  cfg.scheme = MemoryScheme::SgridGalerkin;
  auto grid = make_grid(unit, 64, cfg);
  CHECK(grid.s_max == doctest::Approx(23.0).epsilon(0.01));
  CHECK(std::abs(grid_mass(unit, grid) - 1.0) < 1e-8);
  CHECK_THROWS_AS(make_grid(unit, 4, cfg), DomainError);

  std::vector<double> s(401), mu(401);
  for (int i = 0; i <= 400; ++i) {
    s[i] = 0.05 * i;
    mu[i] = std::exp(-s[i]);
  }
  const double mass = masses(MemoryKernel::tabulated(s, mu, 1.0, 1.0)).g_total;
  for (double& v : mu) v /= mass;
  SystemSpec tab = ref1(ModelTag::TGP);
  tab.kernel_g = MemoryKernel::tabulated(s, mu, 1.0, 1.0);
  CHECK_THROWS_AS(assemble(tab, 1), SpecError);
  CHECK_NOTHROW(assemble(tab, 1, cfg));
  MemoryConfig up;
  up.scheme = MemoryScheme::SgridUpwind;
  up.nodes = 128;
  std::mt19937_64 rng(2);
  auto mode = assemble(tab, 2, up);
  for (int k = 0; k < 20; ++k) {
    auto r = dissipation_rate(mode, random_state(mode.dim(), rng), 1.0);
    CHECK(r.rate <= 1e-10 * r.norm_sq);
  }
}

TEST_CASE("s-grid trajectories converge to the prony reduction") {
  SystemSpec spec = ref1(ModelTag::TGP);
  auto prony = assemble(spec, 1);
  std::vector<double> ts;
  for (int i = 0; i <= 10; ++i) ts.push_back(5.0 * i);

  CVec u0 = CVec::Zero(prony.dim());
  u0(prony.index_of("phi")) = 1.0;
  u0(prony.index_of("theta")) = 0.5;
  auto ref = propagate(prony, u0, ts);

  auto discrepancy = [&](MemoryScheme scheme, int nodes) {
    MemoryConfig cfg;
    cfg.scheme = scheme;
    cfg.nodes = nodes;
    auto mode = assemble(spec, 1, cfg);
    CVec v0 = CVec::Zero(mode.dim());
    v0(mode.index_of("phi")) = 1.0;
    v0(mode.index_of("theta")) = 0.5;
    auto tr = propagate(mode, v0, ts);
    double worst = 0.0;
    const int mech = prony.index_of("eta_1");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      CVec d = ref.states[i].head(mech) - tr.states[i].head(mech);
      RMat w = prony.weight.topLeftCorner(mech, mech);
      worst = std::max(worst, std::sqrt(weighted_norm_sq(w, d)));
    }
    return worst;
  };
  double g128 = discrepancy(MemoryScheme::SgridGalerkin, 128);
  double g256 = discrepancy(MemoryScheme::SgridGalerkin, 256);
  CHECK(g256 < 1e-4);
  CHECK(g256 < g128);
  double u64 = discrepancy(MemoryScheme::SgridUpwind, 64);
  double u128 = discrepancy(MemoryScheme::SgridUpwind, 128);
  CHECK(u128 <= 0.5 * u64 * 1.05);
}

TEST_CASE("matrix-market dump") {
  auto text = to_matrix_market(assemble(ref1(ModelTag::TF), 1));
  CHECK(text.find("%%MatrixMarket") != std::string::npos);
  CHECK(text.find("weight") != std::string::npos);
}
