#include <cmath>
#include <numbers>
#include <vector>

#include "beamstab/errors.hpp"
#include "beamstab/resolvent.hpp"
#include "doctest.h"
#include "reference.hpp"

using namespace beamstab;
using beamstab::testing::ref1;
using beamstab::testing::ref_exp;

namespace {

double eigen_distance(const SimilarGenerator& sg, double lambda) {
  double d = 1e300;
  for (int i = 0; i < sg.eigenvalues.size(); ++i) d = std::min(d, std::abs(sg.eigenvalues(i) - cplx(0.0, lambda)));
  return d;
}

std::vector<double> geomspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return v;
}

}  // namespace

TEST_CASE("resolvent norm against the spectral distance") {
  auto mode = assemble(ref1(ModelTag::BMC), 1);
  auto sg = similar_generator(mode);
  double far = resolvent_norm(sg, 1e6);
  double d = eigen_distance(sg, 1e6);
  CHECK(far * d == doctest::Approx(1.0).epsilon(0.9));
  for (double lam : {0.0, 0.3, 1.0, 2.5, 10.0, 1e3}) CHECK(resolvent_norm(sg, lam) * eigen_distance(sg, lam) >= 1.0 - 1e-12);
}

TEST_CASE("resolvent norm is invariant under weight scaling") {
  auto mode = assemble(ref1(ModelTag::TGP), 2);
  double a = mode_resolvent_norm(mode, 3.7);
  mode.weight *= 17.0;
  CHECK(mode_resolvent_norm(mode, 3.7) == doctest::Approx(a).epsilon(1e-10));
}

TEST_CASE("spectral points are reported") {
  SimilarGenerator sg;
  sg.n = 1;
  sg.h = RMat::Zero(2, 2);
  sg.h(0, 1) = 1.0;
  sg.h(1, 0) = -1.0;
  sg.eigenvalues = CVec(2);
  sg.eigenvalues << cplx(0.0, 1.0), cplx(0.0, -1.0);
  CHECK_THROWS_AS(resolvent_norm(sg, 1.0), SpectralPointError);
  CHECK(resolvent_norm(sg, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("zero frequency is in the resolvent set") {
  auto samples = sweep(ref1(ModelTag::BMC), std::vector<double>{0.0, 1.0, 2.0});
  CHECK(std::isfinite(samples[0].value));
  CHECK(samples[0].value > 0.0);
}

TEST_CASE("sweep input validation") {
  CHECK_THROWS_AS(sweep(ref1(ModelTag::TGP), std::vector<double>{2.0, 1.0}), DomainError);
  CHECK_THROWS_AS(sweep(ref1(ModelTag::TGP), std::vector<double>{-1.0}), DomainError);
}

TEST_CASE("enlarging the mode cutoff never lowers a sample") {
  auto grid = geomspace(5.0, 200.0, 9);
  SweepOptions small, large;
  small.n_max = 4;
  large.n_max = 32;
  auto a = sweep(ref1(ModelTag::TGP), grid, small);
  auto b = sweep(ref1(ModelTag::TGP), grid, large);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(b[i].value >= a[i].value);
}

TEST_CASE("bounded resolvent for the exponential configuration") {
  auto grid = geomspace(10.0, 1e3, 9);
  auto samples = sweep(ref_exp(ModelTag::BGP), grid);
  double hi = 0.0;
  for (const auto& s : samples) hi = std::max(hi, s.value);
  CHECK(hi <= 3.0 * samples.front().value);
}

TEST_CASE("growth fit") {
  std::vector<ResolventSample> quad, flat, power;
  for (double lam : geomspace(10.0, 1e4, 12)) {
    quad.push_back({lam, 3.0 * lam * lam, 0});
    flat.push_back({lam, 5.0, 0});
    power.push_back({lam, 0.7 * std::pow(lam, 1.37), 0});
  }
  auto q = fit_growth(quad, 10.0, 1e4);
  CHECK(q.exponent == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(q.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(std::abs(fit_growth(flat, 10.0, 1e4).exponent) < 1e-12);
  CHECK(std::abs(fit_growth(power, 10.0, 1e4).exponent - 1.37) < 1e-12);
  std::vector<ResolventSample> few(quad.begin(), quad.begin() + 5);
  CHECK_THROWS_AS(fit_growth(few, 10.0, 1e4), FitError);
}

TEST_CASE("mn matrix structure") {
  SystemSpec bresse = ref1(ModelTag::BGP);
  bresse.coeffs.l = 0.0;
  CMat b = mn_matrix(bresse, 3, 2.5);
  CMat t = mn_matrix(ref1(ModelTag::TGP), 3, 2.5);
  const int keep[] = {0, 1, 3};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(b(keep[i], keep[j]) - t(i, j)) < 1e-14);
  CHECK(std::abs(b(2, 0)) == 0.0);
  CHECK(std::abs(b(4, 1)) == 0.0);

  CMat z = mn_matrix(ref1(ModelTag::BGP), 2, 0.0);
  CHECK(z.imag().cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(mn_matrix(ref1(ModelTag::BF), 1, 1.0), SpecError);
}

TEST_CASE("mn matrix solve matches the modal resolvent") {
  SystemSpec spec = ref1(ModelTag::BMC);
  for (int n : {1, 4, 9}) {
    auto mode = assemble(spec, n);
    const double lam = 1.3 * n + 0.2;
    CMat shifted = -mode.generator.cast<cplx>();
    shifted.diagonal().array() += cplx(0.0, lam);
    CVec f = CVec::Zero(mode.dim());
    f(mode.index_of("phi_t")) = 1.0 / spec.coeffs.rho1;
    CVec u = shifted.fullPivLu().solve(f);

    CVec rhs = CVec::Zero(5);
    rhs(0) = 1.0;
    CVec x = mn_matrix(spec, n, lam).fullPivLu().solve(rhs);
    const char* names[] = {"phi", "psi", "w", "theta", "xi"};
    double scale = x.cwiseAbs().maxCoeff();
    for (int i = 0; i < 5; ++i) CHECK(std::abs(x(i) - u(mode.index_of(names[i]))) <= 1e-10 * scale);
  }
}

TEST_CASE("lower-bound constants") {
  auto b = lower_bound_constants(ref1(ModelTag::BGP));
  CHECK(b.c0 == doctest::Approx(1.25));
  CHECK(b.beta0 == doctest::Approx(-2.0));
  CHECK(b.cstar == doctest::Approx(0.5));
  auto t = lower_bound_constants(ref1(ModelTag::TGP));
  CHECK(std::abs(t.c0) < 1e-15);
  CHECK(t.beta0 == doctest::Approx(1.0));
  CHECK(t.cstar == doctest::Approx(1.0));
  CHECK_THROWS_AS(lower_bound_constants(ref_exp(ModelTag::BGP)), ConstructionUndefinedError);
  CHECK_THROWS_AS(lower_bound_constants(ref1(ModelTag::TF)), SpecError);
}

TEST_CASE("lower-bound sequence") {
  const int ns[] = {16, 64, 256};
  for (ModelTag tag : {ModelTag::BGP, ModelTag::BMC, ModelTag::TGP, ModelTag::TMC}) {
    auto seq = lower_bound(ref1(tag), ns);
    REQUIRE(seq.records.size() == 3);
    double cs = seq.constants.cstar;
    double d64 = std::abs(seq.records[1].ratio - cs), d256 = std::abs(seq.records[2].ratio - cs);
    CHECK(d256 < 0.05 * cs);
    CHECK(d256 < d64);
    for (const auto& r : seq.records)
      if (!r.cramer_flag) CHECK(r.cramer_gap < 1e-8);
  }
  auto seq = lower_bound(ref1(ModelTag::BGP), ns);
  CHECK(seq.forcing_norm == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)));
}

TEST_CASE("determinant asymptotics") {
  auto d10 = det_check(ref1(ModelTag::BGP), 10);
  auto d100 = det_check(ref1(ModelTag::BGP), 100);
  CHECK(d100.gap < d10.gap);
  CHECK(det_check(ref1(ModelTag::TGP), 200).gap < 0.05);
  CHECK(std::abs(det_check(ref1(ModelTag::BGP), 4).measured) > 0.0);
  double prev = 1e300;
  for (int n : {8, 32, 128, 512}) {
    double v = std::abs(det_check(ref1(ModelTag::BGP), n).real_scaled);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("spectral abscissa") {
  auto ex32 = spectral_abscissa(ref_exp(ModelTag::BGP), 32);
  auto ex64 = spectral_abscissa(ref_exp(ModelTag::BGP), 64);
  CHECK(ex32.global < 0.0);
  CHECK(ex64.global == doctest::Approx(ex32.global).epsilon(0.05));

  auto mc = spectral_abscissa(ref1(ModelTag::BMC), 64);
  for (double v : mc.per_mode) CHECK(v < 0.0);
  CHECK(std::abs(mc.per_mode.back()) < std::abs(mc.per_mode.front()));
  CHECK(mc.argmax == 64);
}
