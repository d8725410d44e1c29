#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "scsa/operator.hpp"
#include "scsa/signal.hpp"

namespace scsa {

/// Exact bound-state data of the Poschl-Teller well -U*sech^2(x):
/// kappa_n = s - n for n = 0, 1, ... with s = (-1 + sqrt(1 + 4U))/2,
/// keeping only strictly positive values.
template <typename Scalar>
struct PoschlTellerSpec {
  Scalar depth{};           ///< U
  Scalar s{};
  VectorX<Scalar> kappas;   ///< strictly decreasing, all > 0
};

template <typename Scalar>
PoschlTellerSpec<Scalar> poschl_teller_spectrum(Scalar depth) {
  if (!(depth > Scalar(0))) throw Error("poschl_teller_spectrum: depth must be positive");
  PoschlTellerSpec<Scalar> spec;
  spec.depth = depth;
  spec.s = (Scalar(-1) + std::sqrt(Scalar(1) + Scalar(4) * depth)) / Scalar(2);
  Index n = 0;
  while (spec.s - Scalar(n) > Scalar(0)) ++n;
  spec.kappas.resize(n);
  for (Index i = 0; i < n; ++i) spec.kappas(i) = spec.s - Scalar(i);
  return spec;
}

/// amplitude * sech^2(x / width) sampled on the grid x0 + i*dx, i = 0..m-1.
template <typename Scalar>
Signal<Scalar> sech2_signal(Scalar amplitude, Scalar width, Scalar x0, Scalar dx, Index m) {
  if (!(amplitude > Scalar(0)) || !(width > Scalar(0)))
    throw Error("sech2_signal: amplitude and width must be positive");
  Signal<Scalar> s;
  s.x0 = x0;
  s.dx = dx;
  s.samples.resize(m);
  for (Index i = 0; i < m; ++i) {
    const Scalar c = std::cosh((x0 + Scalar(i) * dx) / width);
    s.samples(i) = amplitude / (c * c);
  }
  return s;
}

/// All eigenvalues of op, sorted ascending, by Eigen's dense symmetric
/// tridiagonal QL — an independent route used to cross-validate the
/// bisection solver on small instances.
template <typename Scalar>
VectorX<Scalar> brute_force_spectrum(const DiscretizedOperator<Scalar>& op) {
  constexpr Index max_size = 512;
  if (op.size() > max_size)
    throw MatrixTooLarge("brute_force_spectrum: M = " + std::to_string(op.size()) +
                         " exceeds the dense-solve cap of " + std::to_string(max_size));
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver;
  solver.computeFromTridiagonal(op.diag, op.offdiag, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw Error("brute_force_spectrum: dense eigensolver failed");
  return solver.eigenvalues();
}

} // namespace scsa
