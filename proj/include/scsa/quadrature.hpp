#pragma once

#include <Eigen/Core>

namespace scsa {

// Trapezoid quadrature on a uniform grid: endpoint weights 1/2, interior 1.
// Accepts any dense Eigen expression.
template <typename Derived>
typename Derived::Scalar trapezoid(const Eigen::DenseBase<Derived>& f,
                                   typename Derived::Scalar dx) {
  using Scalar = typename Derived::Scalar;
  const auto n = f.size();
  if (n == 0) return Scalar(0);
  if (n == 1) return Scalar(0);
  // evaluate once; f may be an expression
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> v = f.derived().array();
  return dx * (v.sum() - Scalar(0.5) * (v(0) + v(n - 1)));
}

/// Trapezoid inner product dx * sum_i w_i a_i b_i.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar trapezoid_inner(const Eigen::DenseBase<DerivedA>& a,
                                          const Eigen::DenseBase<DerivedB>& b,
                                          typename DerivedA::Scalar dx) {
  return trapezoid(a.derived().array() * b.derived().array(), dx);
}

/// L2 norm under trapezoid quadrature.
template <typename Derived>
typename Derived::Scalar trapezoid_l2_norm(const Eigen::DenseBase<Derived>& f,
                                           typename Derived::Scalar dx) {
  using std::sqrt;
  return sqrt(trapezoid(f.derived().array().square(), dx));
}

} // namespace scsa
