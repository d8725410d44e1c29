#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "scsa/operator.hpp"
#include "scsa/quadrature.hpp"

namespace scsa {

template <typename Scalar>
struct SolverOptions {
  /// Eigenvalues above -negativity_threshold are discarded as discretization
  /// noise. Defaults to a scale-aware 1e-10 * (2/dx^2) (divided by chi for the
  /// Semiclassical form).
  std::optional<Scalar> negativity_threshold{};
  int max_inverse_iterations = 50;
  /// Thread cap for the eigenvalue brackets; 0 or 1 means sequential. Results
  /// are bitwise identical to the sequential run in either case.
  unsigned threads = 0;
};

/// The discrete (negative) spectrum of a DiscretizedOperator.
/// kappas are strictly decreasing, kappa_n = sqrt(-lambda_n); eigenfunction
/// column n is L2-normalized under trapezoid quadrature on the grid.
template <typename Scalar>
struct SpectralDecomposition {
  Scalar chi{};
  Scalar dx{};
  Scalar x0{};
  OperatorForm form = OperatorForm::Physical;
  VectorX<Scalar> kappas;          ///< length N, decreasing
  MatrixX<Scalar> eigenfunctions;  ///< M x N, column n = psi_n
  VectorX<Scalar> residuals;       ///< ||A psi - lambda psi||_2 per pair
  std::vector<std::string> warnings;

  Index count() const { return kappas.size(); }
  Scalar eigenvalue(Index n) const { return -kappas(n) * kappas(n); }
};

template <typename Scalar>
Scalar default_negativity_threshold(const DiscretizedOperator<Scalar>& op) {
  const Scalar base = Scalar(1e-10) * Scalar(2) / (op.dx * op.dx);
  return op.form == OperatorForm::Semiclassical ? base / op.chi : base;
}

namespace detail {

/// Number of negative pivots of the LDL^T factorization of A - lambda*I,
/// i.e. the number of eigenvalues strictly below lambda (exact in exact
/// arithmetic; tiny pivots are nudged to -pivmin as in LAPACK dstebz).
template <typename Scalar>
Index sturm_count_below(const VectorX<Scalar>& diag, const VectorX<Scalar>& offdiag,
                        Scalar lambda, Scalar pivmin) {
  const Index m = diag.size();
  Scalar q = diag(0) - lambda;
  if (std::abs(q) < pivmin) q = -pivmin;
  Index count = q < Scalar(0) ? 1 : 0;
  for (Index i = 1; i < m; ++i) {
    q = diag(i) - lambda - offdiag(i - 1) * offdiag(i - 1) / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < Scalar(0)) ++count;
  }
  return count;
}

template <typename Scalar>
Scalar sturm_pivmin(const DiscretizedOperator<Scalar>& op) {
  const Scalar e2max = op.offdiag.size() > 0 ? op.offdiag.array().square().maxCoeff() : Scalar(1);
  return std::numeric_limits<Scalar>::min() * std::max(Scalar(1), e2max);
}

/// Gershgorin bound: every eigenvalue is >= this.
template <typename Scalar>
Scalar gershgorin_lower(const DiscretizedOperator<Scalar>& op) {
  const Index m = op.size();
  if (m == 1) return op.diag(0);
  Scalar lo = std::min(op.diag(0) - std::abs(op.offdiag(0)),
                       op.diag(m - 1) - std::abs(op.offdiag(m - 2)));
  for (Index i = 1; i + 1 < m; ++i)
    lo = std::min(lo, op.diag(i) - std::abs(op.offdiag(i - 1)) - std::abs(op.offdiag(i)));
  return lo;
}

/// Isolate eigenvalue #j (ascending, 0-based) of op by bisection on the Sturm
/// count, starting from the bracket [lo, hi] with count(lo) <= j < count(hi).
/// Converges to roughly 2 ulp relative accuracy.
template <typename Scalar>
Scalar bisect_eigenvalue(const DiscretizedOperator<Scalar>& op, Index j, Scalar lo, Scalar hi,
                         Scalar pivmin) {
  constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
  constexpr Scalar tiny = std::numeric_limits<Scalar>::min();
  for (int it = 0; it < 20 * std::numeric_limits<Scalar>::digits; ++it) {
    const Scalar width = hi - lo;
    if (width <= Scalar(2) * eps * std::max(std::abs(lo), std::abs(hi)) + Scalar(2) * tiny)
      break;
    const Scalar mid = lo + width / Scalar(2);
    if (mid <= lo || mid >= hi) break; // no representable midpoint left
    if (sturm_count_below(op.diag, op.offdiag, mid, pivmin) <= j)
      lo = mid;
    else
      hi = mid;
  }
  return lo + (hi - lo) / Scalar(2);
}

/// Tridiagonal LU with partial pivoting (dgttrf layout: one fill-in band).
template <typename Scalar>
struct TridiagLU {
  VectorX<Scalar> dl, d, du, du2;
  std::vector<char> swapped;

  void factor(const VectorX<Scalar>& diag, const VectorX<Scalar>& offdiag, Scalar shift,
              Scalar pivot_floor) {
    const Index m = diag.size();
    d = diag.array() - shift;
    dl = offdiag;
    du = offdiag;
    du2.setZero(std::max<Index>(m - 2, 0));
    swapped.assign(size_t(std::max<Index>(m - 1, 0)), 0);
    for (Index i = 0; i + 1 < m; ++i) {
      if (std::abs(d(i)) >= std::abs(dl(i))) {
        if (d(i) == Scalar(0)) d(i) = pivot_floor;
        const Scalar fact = dl(i) / d(i);
        dl(i) = fact;
        d(i + 1) -= fact * du(i);
      } else {
        const Scalar fact = d(i) / dl(i);
        d(i) = dl(i);
        dl(i) = fact;
        const Scalar tmp = du(i);
        du(i) = d(i + 1);
        d(i + 1) = tmp - fact * d(i + 1);
        if (i + 2 < m) {
          du2(i) = du(i + 1);
          du(i + 1) = -fact * du(i + 1);
        }
        swapped[size_t(i)] = 1;
      }
    }
    // guard against an exactly singular trailing pivot
    for (Index i = 0; i < m; ++i)
      if (std::abs(d(i)) < pivot_floor) d(i) = d(i) < Scalar(0) ? -pivot_floor : pivot_floor;
  }

  void solve_in_place(VectorX<Scalar>& b) const {
    const Index m = d.size();
    for (Index i = 0; i + 1 < m; ++i) {
      if (!swapped[size_t(i)]) {
        b(i + 1) -= dl(i) * b(i);
      } else {
        const Scalar tmp = b(i);
        b(i) = b(i + 1);
        b(i + 1) = tmp - dl(i) * b(i);
      }
    }
    b(m - 1) /= d(m - 1);
    if (m > 1) b(m - 2) = (b(m - 2) - du(m - 2) * b(m - 1)) / d(m - 2);
    for (Index i = m - 3; i >= 0; --i)
      b(i) = (b(i) - du(i) * b(i + 1) - du2(i) * b(i + 2)) / d(i);
  }
};

/// y = (A - shift*I) x for the symmetric tridiagonal A.
template <typename Scalar>
void shifted_multiply(const DiscretizedOperator<Scalar>& op, Scalar shift,
                      const Eigen::Ref<const VectorX<Scalar>>& x, VectorX<Scalar>& y) {
  const Index m = op.size();
  y.resize(m);
  for (Index i = 0; i < m; ++i) {
    Scalar v = (op.diag(i) - shift) * x(i);
    if (i > 0) v += op.offdiag(i - 1) * x(i - 1);
    if (i + 1 < m) v += op.offdiag(i) * x(i + 1);
    y(i) = v;
  }
}

/// Deterministic pseudo-random start vector; the seed depends only on the
/// eigenpair index so that parallel and sequential runs agree bitwise.
template <typename Scalar>
VectorX<Scalar> start_vector(Index m, Index eigen_index) {
  std::uint64_t state = 0x9E3779B97F4A7C15ull + 0x100000001B3ull * std::uint64_t(eigen_index + 1);
  VectorX<Scalar> v(m);
  for (Index i = 0; i < m; ++i) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    // map to [-1, 1)
    v(i) = Scalar(2) * (Scalar(state >> 11) * Scalar(1.0 / 9007199254740992.0)) - Scalar(1);
  }
  v /= v.norm();
  return v;
}

/// Project out the first `ncols` columns of basis (modified Gram-Schmidt).
template <typename Scalar>
void orthogonalize_against(VectorX<Scalar>& v, const MatrixX<Scalar>& basis, Index ncols) {
  for (Index n = 0; n < ncols; ++n) v -= basis.col(n).dot(v) * basis.col(n);
}

} // namespace detail

/// Number of eigenvalues of op strictly below lambda (Sturm/inertia count).
template <typename Scalar>
Index eigen_count(const DiscretizedOperator<Scalar>& op, Scalar lambda) {
  if (op.size() == 0) return 0;
  return detail::sturm_count_below(op.diag, op.offdiag, lambda, detail::sturm_pivmin(op));
}

/// Compute every eigenvalue lambda < -negativity_threshold of op together with
/// its trapezoid-normalized eigenvector: bisection on Sturm counts to isolate
/// each eigenvalue, inverse iteration for the vector, Gram-Schmidt against all
/// previously accepted vectors. Deterministic for fixed input; the bracket
/// searches may run in parallel without changing any bit of the output.
template <typename Scalar>
SpectralDecomposition<Scalar> negative_spectrum(const DiscretizedOperator<Scalar>& op,
                                                const SolverOptions<Scalar>& opts = {}) {
  constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Index m = op.size();
  const Scalar threshold = opts.negativity_threshold.value_or(default_negativity_threshold(op));
  if (threshold < Scalar(0)) throw Error("negative_spectrum: negativity_threshold must be >= 0");

  SpectralDecomposition<Scalar> dec;
  dec.chi = op.chi;
  dec.dx = op.dx;
  dec.x0 = op.x0;
  dec.form = op.form;

  if (m == 0) return dec;
  const Scalar pivmin = detail::sturm_pivmin(op);
  const Scalar target = -threshold;
  const Index count = detail::sturm_count_below(op.diag, op.offdiag, target, pivmin);
  if (count == 0) {
    dec.eigenfunctions.resize(m, 0);
    return dec;
  }

  // 1) eigenvalues, ascending: independent brackets, optionally threaded
  const Scalar glo = detail::gershgorin_lower(op) - Scalar(16) * eps * op.inf_norm();
  VectorX<Scalar> lambdas(count);
  auto bisect_range = [&](Index begin, Index end) {
    for (Index j = begin; j < end; ++j)
      lambdas(j) = detail::bisect_eigenvalue(op, j, glo, target, pivmin);
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads =
      std::min<unsigned>(std::min(opts.threads, hw), static_cast<unsigned>(count));
  if (nthreads >= 2) {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    const Index chunk = (count + Index(nthreads) - 1) / Index(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
      const Index b = Index(t) * chunk;
      const Index e = std::min(count, b + chunk);
      if (b < e) pool.emplace_back(bisect_range, b, e);
    }
    for (auto& th : pool) th.join();
  } else {
    bisect_range(0, count);
  }

  // 2) eigenvectors by inverse iteration, sequential so each vector can be
  //    orthogonalized against every previously accepted one
  const Scalar anorm = op.inf_norm();
  const Scalar resid_tol = Scalar(4096) * eps * anorm;
  const Scalar pivot_floor = std::max(anorm * eps * eps, std::numeric_limits<Scalar>::min());
  dec.eigenfunctions.resize(m, count);
  dec.residuals.resize(count);
  VectorX<Scalar> work(m);
  for (Index j = 0; j < count; ++j) {
    detail::TridiagLU<Scalar> lu;
    lu.factor(op.diag, op.offdiag, lambdas(j), pivot_floor);
    VectorX<Scalar> v = detail::start_vector<Scalar>(m, j);
    bool converged = false;
    Scalar resid = std::numeric_limits<Scalar>::infinity();
    for (int it = 0; it < opts.max_inverse_iterations; ++it) {
      lu.solve_in_place(v);
      detail::orthogonalize_against(v, dec.eigenfunctions, j);
      const Scalar nrm = v.norm();
      if (!(nrm > Scalar(0)) || !std::isfinite(static_cast<double>(nrm))) {
        v = detail::start_vector<Scalar>(m, j + count); // restart from a fresh direction
        continue;
      }
      v /= nrm;
      detail::shifted_multiply<Scalar>(op, lambdas(j), v, work);
      resid = work.norm();
      if (resid <= resid_tol) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw ConvergenceFailure("negative_spectrum: inverse iteration did not converge for "
                               "eigenpair " + std::to_string(j) +
                               " (lambda = " + std::to_string(double(lambdas(j))) + ")",
                               j);
    dec.eigenfunctions.col(j) = v;
  }

  // 3) orthonormalize under the trapezoid inner product. Exact eigenvectors
  //    are Euclidean-orthogonal; the quadrature product differs only by the
  //    endpoint half-weights, so this pass moves each vector by at most
  //    O(boundary amplitude^2) -- invisible for decayed states, and it is
  //    what makes near-threshold states quadrature-orthogonal too.
  for (Index j = 0; j < count; ++j) {
    auto col = dec.eigenfunctions.col(j);
    for (Index n = 0; n < j; ++n)
      col -= trapezoid_inner(dec.eigenfunctions.col(n), col, op.dx) * dec.eigenfunctions.col(n);
    col /= trapezoid_l2_norm(col, op.dx);
    // sign convention: first nonzero component positive
    for (Index i = 0; i < m; ++i) {
      if (col(i) != Scalar(0)) {
        if (col(i) < Scalar(0)) col = -col;
        break;
      }
    }
    detail::shifted_multiply<Scalar>(op, lambdas(j), col, work);
    dec.residuals(j) = work.norm();
  }

  // order by decreasing kappa = ascending lambda (already the bisection order)
  dec.kappas = (-lambdas.array()).sqrt().matrix();

  for (Index j = 0; j + 1 < count; ++j) {
    const Scalar gap = std::abs(lambdas(j + 1) - lambdas(j));
    const Scalar scale = std::max(std::abs(lambdas(j)), std::abs(lambdas(j + 1)));
    if (gap <= Scalar(1e-6) * scale)
      dec.warnings.push_back("eigenvalues " + std::to_string(j) + " and " + std::to_string(j + 1) +
                             " are degenerate to relative 1e-6 (" +
                             std::to_string(double(lambdas(j))) + ", " +
                             std::to_string(double(lambdas(j + 1))) +
                             "); multiplicity > 1 is impossible in the continuum limit");
  }
  return dec;
}

} // namespace scsa
