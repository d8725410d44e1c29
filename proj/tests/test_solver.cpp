#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace scsa;
using test_util::check_hygiene;

namespace {
const double kRefDx = 40.0 / 1023.0;

Signal<double> sech2_ref() { return sech2_signal(1.0, 1.0, -20.0, kRefDx, 1024); }
} // namespace

TEST_CASE("negative_spectrum: free Laplacian has no negative eigenvalues") {
  auto z = test_util::zero_signal(-10.0, 10.0, 256);
  auto dec = negative_spectrum(assemble(z, 25.0));
  CHECK(dec.count() == 0);
  CHECK(dec.kappas.size() == 0);
  CHECK(dec.eigenfunctions.cols() == 0);
  CHECK(dec.eigenfunctions.rows() == 256);
}

TEST_CASE("negative_spectrum: sech^2 well matches the closed form") {
  auto op = assemble(sech2_ref(), 12.0);
  auto dec = negative_spectrum(op);
  REQUIRE(dec.count() == 3);
  CHECK(std::abs(dec.kappas(0) - 3.0) <= 5e-3);
  CHECK(std::abs(dec.kappas(1) - 2.0) <= 5e-3);
  CHECK(std::abs(dec.kappas(2) - 1.0) <= 5e-3);
  CHECK(dec.kappas(0) > dec.kappas(1));
  CHECK(dec.kappas(1) > dec.kappas(2));

  auto h = check_hygiene(dec, op);
  CHECK(h.worst_norm_dev <= 1e-10);
  CHECK(h.worst_cross <= 1e-8);
  CHECK(h.worst_residual <= 1e-8);
}

TEST_CASE("negative_spectrum: soliton potential has a single bound state") {
  auto s = sech2_signal(2.0, 1.0, -20.0, kRefDx, 1024);
  auto dec = negative_spectrum(assemble(s, 1.0));
  REQUIRE(dec.count() == 1);
  CHECK(std::abs(dec.kappas(0) - 1.0) <= 5e-3);
}

TEST_CASE("eigen_count: inertia counts") {
  auto z = test_util::zero_signal(-10.0, 10.0, 128);
  auto free_op = assemble(z, 1.0);
  CHECK(eigen_count(free_op, 0.0) == 0);
  CHECK(eigen_count(free_op, -1e30) == 0);

  auto op = assemble(sech2_ref(), 12.0);
  CHECK(eigen_count(op, 0.0) == 3);
  CHECK(eigen_count(op, -1e30) == 0);
  // counts the full spectrum too: everything lies below a huge lambda
  CHECK(eigen_count(op, 1e30) == 1024);
}

TEST_CASE("count consistency: solver returns exactly eigen_count eigenpairs") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    auto s = test_util::random_pulse(rng);
    std::uniform_real_distribution<double> uchi(1.0, 300.0);
    const double chi = uchi(rng);
    auto op = assemble(s, chi);
    auto dec = negative_spectrum(op);
    CHECK(dec.count() == eigen_count(op, -default_negativity_threshold(op)));
  }
}

TEST_CASE("nonemptiness: a pulse with large chi binds at least one state") {
  auto g = test_util::gaussian_signal(-10.0, 10.0, 512);
  auto dec = negative_spectrum(assemble(g, 100.0));
  CHECK(dec.count() >= 1);
}

TEST_CASE("eigenvector hygiene on random pulses") {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 10; ++t) {
    auto s = test_util::random_pulse(rng);
    std::uniform_real_distribution<double> uchi(1.0, 400.0);
    auto op = assemble(s, uchi(rng));
    auto dec = negative_spectrum(op);
    auto h = check_hygiene(dec, op);
    CHECK(h.worst_norm_dev <= 1e-10);
    CHECK(h.worst_cross <= 1e-8);
    CHECK(h.worst_residual <= 1e-8);
    // proposition bound, solver level
    if (dec.count() > 0)
      CHECK(dec.kappas(0) * dec.kappas(0) / op.chi <=
            y_max(s) * (1.0 + 1e-9));
  }
}

TEST_CASE("near-degenerate double well stays orthogonal") {
  // two identical sech^2 wells 30 units apart: tunneling splits the pair by
  // ~e^(-30), far below 1e-6 relative, so independent inverse iteration would
  // return parallel vectors without the cross-vector orthogonalization
  Signal<double> s;
  const Index m = 1601;
  s.x0 = -40.0;
  s.dx = 80.0 / double(m - 1);
  s.samples.resize(m);
  for (Index i = 0; i < m; ++i) {
    const double x = s.x0 + double(i) * s.dx;
    const double c1 = std::cosh(x - 15.0), c2 = std::cosh(x + 15.0);
    s.samples(i) = 1.0 / (c1 * c1) + 1.0 / (c2 * c2);
  }
  auto op = assemble(s, 2.0);
  auto dec = negative_spectrum(op);
  REQUIRE(dec.count() == 2);
  CHECK(std::abs(dec.kappas(0) - 1.0) <= 5e-3);
  CHECK(std::abs(dec.kappas(1) - 1.0) <= 5e-3);
  auto h = check_hygiene(dec, op);
  CHECK(h.worst_norm_dev <= 1e-10);
  CHECK(h.worst_cross <= 1e-8);
  CHECK(h.worst_residual <= 1e-8);
  CHECK(!dec.warnings.empty()); // degenerate-to-float pair must be flagged
}

TEST_CASE("deterministic output, sequential == threaded") {
  auto s = test_util::gaussian_signal(-10.0, 10.0, 400);
  auto op = assemble(s, 150.0);
  auto a = negative_spectrum(op);
  auto b = negative_spectrum(op);
  REQUIRE(a.count() == b.count());
  CHECK((a.kappas.array() == b.kappas.array()).all());
  CHECK((a.eigenfunctions.array() == b.eigenfunctions.array()).all());

  SolverOptions<double> par;
  par.threads = 4;
  auto c = negative_spectrum(op, par);
  REQUIRE(c.count() == a.count());
  CHECK((c.kappas.array() == a.kappas.array()).all());
  CHECK((c.eigenfunctions.array() == a.eigenfunctions.array()).all());
  CHECK((c.residuals.array() == a.residuals.array()).all());
}

TEST_CASE("sign convention: first nonzero component positive") {
  auto op = assemble(sech2_ref(), 12.0);
  auto dec = negative_spectrum(op);
  for (Index j = 0; j < dec.count(); ++j) {
    Index i = 0;
    while (i < dec.eigenfunctions.rows() && dec.eigenfunctions(i, j) == 0.0) ++i;
    REQUIRE(i < dec.eigenfunctions.rows());
    CHECK(dec.eigenfunctions(i, j) > 0.0);
  }
}

TEST_CASE("explicit negativity threshold is honored") {
  auto op = assemble(sech2_ref(), 12.0);
  // lambda = {-9, -4, -1}: a threshold of 2 keeps only the two deepest states
  SolverOptions<double> opts;
  opts.negativity_threshold = 2.0;
  auto dec = negative_spectrum(op, opts);
  CHECK(dec.count() == 2);
  CHECK(dec.count() == eigen_count(op, -2.0));

  SolverOptions<double> bad;
  bad.negativity_threshold = -1.0;
  CHECK_THROWS_AS(negative_spectrum(op, bad), Error);
}

TEST_CASE("solver instantiates for float") {
  auto s = sech2_signal<float>(2.0f, 1.0f, -20.0f, 40.0f / 511.0f, 512);
  auto op = assemble<float>(s, 1.0f);
  auto dec = negative_spectrum<float>(op);
  REQUIRE(dec.count() == 1);
  CHECK(std::abs(dec.kappas(0) - 1.0f) <= 5e-3f);
  const float q = trapezoid(dec.eigenfunctions.col(0).array().square(), dec.dx);
  CHECK(std::abs(q - 1.0f) <= 1e-4f);
}

TEST_CASE("ConvergenceFailure names the eigenpair") {
  auto op = assemble(sech2_ref(), 12.0);
  SolverOptions<double> opts;
  opts.max_inverse_iterations = 0;
  try {
    negative_spectrum(op, opts);
    FAIL("expected ConvergenceFailure");
  } catch (const ConvergenceFailure& e) {
    CHECK(e.eigen_index == 0);
    CHECK(std::string(e.what()).find("0") != std::string::npos);
  }
}
