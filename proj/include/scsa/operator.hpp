#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "scsa/quadrature.hpp"
#include "scsa/signal.hpp"

namespace scsa {

enum class OperatorForm {
  Physical,      ///< -d^2/dx^2 - chi*y
  Semiclassical  ///< -h^2 d^2/dx^2 - y with h = 1/sqrt(chi); entries = Physical / chi
};

enum class BoundaryCondition { Dirichlet };

/// Symmetric tridiagonal discretization of the Schrodinger operator on the
/// signal's grid, with psi = 0 one step outside both ends.
template <typename Scalar>
struct DiscretizedOperator {
  VectorX<Scalar> diag;     ///< length M
  VectorX<Scalar> offdiag;  ///< length M-1, sub- and super-diagonal
  Scalar dx{};
  Scalar x0{};
  Scalar chi{};
  BoundaryCondition boundary = BoundaryCondition::Dirichlet;
  OperatorForm form = OperatorForm::Physical;

  Index size() const { return diag.size(); }

  /// Max row sum of absolute values.
  Scalar inf_norm() const {
    const Index m = size();
    if (m == 0) return Scalar(0);
    if (m == 1) return std::abs(diag(0));
    Scalar best = std::abs(diag(0)) + std::abs(offdiag(0));
    best = std::max(best, std::abs(diag(m - 1)) + std::abs(offdiag(m - 2)));
    for (Index i = 1; i + 1 < m; ++i)
      best = std::max(best,
                      std::abs(diag(i)) + std::abs(offdiag(i - 1)) + std::abs(offdiag(i)));
    return best;
  }
};

/// Second-order central-difference discretization of -d^2/dx^2 - chi*y.
/// Physical form: diag_i = 2/dx^2 - chi*y_i, offdiag = -1/dx^2.
/// Semiclassical form divides every Physical entry by chi, entrywise.
template <typename Scalar>
DiscretizedOperator<Scalar> assemble(const Signal<Scalar>& s, Scalar chi,
                                     OperatorForm form = OperatorForm::Physical) {
  if (!(chi > Scalar(0)))
    throw NonPositiveChi("assemble: chi must be positive, got " +
                         std::to_string(static_cast<double>(chi)));
  if (s.samples.minCoeff() < Scalar(0))
    throw Error("assemble: signal must be nonnegative (validate or baseline_shift first)");

  DiscretizedOperator<Scalar> op;
  op.dx = s.dx;
  op.x0 = s.x0;
  op.chi = chi;
  op.form = form;
  const Scalar inv_dx2 = Scalar(1) / (s.dx * s.dx);
  op.diag = (Scalar(2) * inv_dx2 - chi * s.samples.array()).matrix();
  op.offdiag = VectorX<Scalar>::Constant(s.size() - 1, -inv_dx2);
  if (form == OperatorForm::Semiclassical) {
    op.diag /= chi;
    op.offdiag /= chi;
  }
  return op;
}

/// A priori estimate of the number of negative eigenvalues of H(-chi*y):
/// (sqrt(chi)/pi) * integral of sqrt(y), trapezoid-weighted on the grid.
template <typename Scalar>
Scalar weyl_estimate(const Signal<Scalar>& s, Scalar chi) {
  if (!(chi > Scalar(0)))
    throw NonPositiveChi("weyl_estimate: chi must be positive");
  if (s.samples.minCoeff() < Scalar(0))
    throw Error("weyl_estimate: signal must be nonnegative");
  return std::sqrt(chi) / std::numbers::pi_v<Scalar> *
         trapezoid(s.samples.array().sqrt(), s.dx);
}

} // namespace scsa
