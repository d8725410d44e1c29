#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace scsa;

TEST_CASE("assemble: physical form entries") {
  Signal<double> s;
  s.x0 = 0;
  s.dx = 1.0;
  s.samples.resize(3);
  s.samples << 0.0, 1.0, 0.0;
  auto op = assemble(s, 1.0);
  REQUIRE(op.diag.size() == 3);
  CHECK(op.diag(0) == 2.0);
  CHECK(op.diag(1) == 1.0);
  CHECK(op.diag(2) == 2.0);
  REQUIRE(op.offdiag.size() == 2);
  CHECK(op.offdiag(0) == -1.0);
  CHECK(op.offdiag(1) == -1.0);
  CHECK(op.form == OperatorForm::Physical);
}

TEST_CASE("assemble: semiclassical form is the physical form divided by chi") {
  Signal<double> s;
  s.x0 = -1;
  s.dx = 0.5;
  s.samples.resize(5);
  s.samples << 0.0, 0.3, 1.0, 0.3, 0.0;
  const double chi = 4.0;
  auto phys = assemble(s, chi, OperatorForm::Physical);
  auto semi = assemble(s, chi, OperatorForm::Semiclassical);
  CHECK((semi.diag.array() == (phys.diag / chi).array()).all());
  CHECK((semi.offdiag.array() == (phys.offdiag / chi).array()).all());
}

TEST_CASE("assemble: zero signal gives the free Laplacian") {
  auto z = test_util::zero_signal(0.0, 3.0, 7);
  auto op = assemble(z, 5.0);
  const double want = 2.0 / (0.5 * 0.5);
  CHECK((op.diag.array() == want).all());
  CHECK((op.offdiag.array() == -1.0 / (0.5 * 0.5)).all());
}

TEST_CASE("assemble: contract violations") {
  auto z = test_util::zero_signal(0.0, 1.0, 4);
  CHECK_THROWS_AS(assemble(z, 0.0), NonPositiveChi);
  CHECK_THROWS_AS(assemble(z, -2.0), NonPositiveChi);
  Signal<double> neg = z;
  neg.samples(1) = -0.25;
  CHECK_THROWS_AS(assemble(neg, 1.0), Error);
}

TEST_CASE("weyl_estimate: counting estimate") {
  auto z = test_util::zero_signal(0.0, 1.0, 11);
  CHECK(weyl_estimate(z, 10.0) == 0.0);

  // sech^2 well at depth 144: integral of sech is pi, so the estimate is ~12,
  // matching the exact closed-form count of 12
  auto s = sech2_signal(1.0, 1.0, -20.0, 40.0 / 1023.0, 1024);
  const double est = weyl_estimate(s, 144.0);
  const auto exact = poschl_teller_spectrum(144.0);
  CHECK(exact.kappas.size() == 12);
  CHECK(std::abs(est - double(exact.kappas.size())) <= 1.0);

  // sqrt(chi) proportionality, exact under IEEE scaling by 4
  CHECK(weyl_estimate(s, 4.0 * 37.5) == doctest::Approx(2.0 * weyl_estimate(s, 37.5)).epsilon(1e-15));
}

TEST_CASE("spectral scaling: semiclassical eigenvalues are physical/chi") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 8; ++t) {
    auto s = test_util::random_pulse(rng, 50);
    std::uniform_real_distribution<double> uchi(0.5, 60.0);
    const double chi = uchi(rng);
    auto phys = negative_spectrum(assemble(s, chi, OperatorForm::Physical));
    auto semi = negative_spectrum(assemble(s, chi, OperatorForm::Semiclassical));
    REQUIRE(phys.count() == semi.count());
    for (Index i = 0; i < phys.count(); ++i) {
      const double want = phys.eigenvalue(i) / chi;
      CHECK(std::abs(semi.eigenvalue(i) - want) <= 1e-12 * std::abs(want));
    }
  }
}

TEST_CASE("eigenvalue monotonicity in chi") {
  // subtracting (chi2 - chi1) * diag(y) can only lower each eigenvalue
  std::mt19937_64 rng(13);
  for (int t = 0; t < 8; ++t) {
    auto s = test_util::random_pulse(rng, 50);
    std::uniform_real_distribution<double> uchi(0.5, 30.0);
    double c1 = uchi(rng), c2 = uchi(rng);
    if (c1 > c2) std::swap(c1, c2);
    if (c1 == c2) c2 += 1.0;
    auto ev1 = brute_force_spectrum(assemble(s, c1));
    auto ev2 = brute_force_spectrum(assemble(s, c2));
    for (Index i = 0; i < ev1.size(); ++i)
      CHECK(ev2(i) <= ev1(i) + 1e-11 * std::abs(ev1(i)));
  }
}
