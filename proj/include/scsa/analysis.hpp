#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scsa/solver.hpp"

namespace scsa {

template <typename Scalar>
struct AnalysisOptions {
  SolverOptions<Scalar> solver{};
  /// The spectral problem is solved on a grid refined by this integer factor
  /// (natural cubic-spline upsampling of the signal); the reconstruction is
  /// restricted back to the input nodes. 1 disables refinement. The default
  /// keeps the second-order scheme accurate deep into the semiclassical
  /// regime without touching the caller's grid.
  int oversample = 16;
  Scalar proposition_slack = Scalar(1e-9);
};

/// Outcome of one SCSA analysis at a fixed chi.
template <typename Scalar>
struct ScsaResult {
  Scalar chi{};
  Index n_chi = 0;
  Signal<Scalar> reconstruction;
  Scalar relative_l2_error{};
  Scalar max_abs_error{};
  VectorX<Scalar> momentums; ///< power sums of kappa, p = 1..3
  VectorX<Scalar> kappas;
  Scalar max_residual{};
  std::vector<std::string> warnings;
};

struct ErrorMetrics {
  double relative_l2_error;
  double max_abs_error;
};

/// y_chi[i] = (4/chi) * sum_n kappa_n * psi_n[i]^2 on the decomposition's grid.
/// An empty spectrum reconstructs the zero signal.
template <typename Scalar>
Signal<Scalar> reconstruct(const SpectralDecomposition<Scalar>& dec) {
  if (dec.form != OperatorForm::Physical)
    throw Error("reconstruct: decomposition must come from the Physical operator form");
  Signal<Scalar> out;
  out.x0 = dec.x0;
  out.dx = dec.dx;
  if (dec.count() == 0) {
    out.samples = VectorX<Scalar>::Zero(dec.eigenfunctions.rows());
    return out;
  }
  out.samples =
      (Scalar(4) / dec.chi) * (dec.eigenfunctions.array().square().matrix() * dec.kappas);
  return out;
}

/// Trapezoid-quadrature relative L2 error and pointwise sup error.
/// The zero-norm convention: 0 if the difference is exactly zero, +inf otherwise.
template <typename Scalar>
ErrorMetrics error_metrics(const Signal<Scalar>& y, const Signal<Scalar>& y_chi) {
  const Scalar rel_tol = Scalar(1e-12);
  if (y.size() != y_chi.size() ||
      std::abs(y.dx - y_chi.dx) > rel_tol * std::abs(y.dx) ||
      std::abs(y.x0 - y_chi.x0) > rel_tol * std::max(std::abs(y.x0), Scalar(1)))
    throw GridMismatch("error_metrics: signals live on different grids");
  const VectorX<Scalar> diff = y.samples - y_chi.samples;
  const Scalar num = trapezoid_l2_norm(diff, y.dx);
  const Scalar den = trapezoid_l2_norm(y.samples, y.dx);
  ErrorMetrics m{};
  m.max_abs_error = double(diff.template lpNorm<Eigen::Infinity>());
  if (den > Scalar(0))
    m.relative_l2_error = double(num / den);
  else
    m.relative_l2_error = num == Scalar(0) ? 0.0 : std::numeric_limits<double>::infinity();
  return m;
}

/// Power sums M_p = sum_n kappa_n^p for p = 1..pmax (zeros for an empty spectrum).
template <typename Scalar>
VectorX<Scalar> momentums(const VectorX<Scalar>& kappas, Index pmax) {
  if (pmax < 1) throw Error("momentums: pmax must be >= 1");
  VectorX<Scalar> m = VectorX<Scalar>::Zero(pmax);
  if (kappas.size() == 0) return m;
  VectorX<Scalar> pw = VectorX<Scalar>::Ones(kappas.size());
  for (Index p = 0; p < pmax; ++p) {
    pw.array() *= kappas.array();
    m(p) = pw.sum();
  }
  return m;
}

template <typename Scalar>
VectorX<Scalar> momentums(const SpectralDecomposition<Scalar>& dec, Index pmax) {
  return momentums(dec.kappas, pmax);
}

/// Natural cubic-spline upsampling of a signal by an integer factor. The
/// original nodes are kept exactly; interpolated values are clamped at 0 so a
/// nonnegative signal stays a valid potential.
template <typename Scalar>
Signal<Scalar> refine_signal(const Signal<Scalar>& s, int factor) {
  if (factor <= 1) return s;
  const Index m = s.size();
  const Scalar dx = s.dx;
  // second derivatives at the nodes, natural ends (Thomas algorithm)
  VectorX<Scalar> second = VectorX<Scalar>::Zero(m);
  if (m >= 3) {
    const Index n = m - 2;
    VectorX<Scalar> b = VectorX<Scalar>::Constant(n, Scalar(2) * dx / Scalar(3));
    VectorX<Scalar> rhs(n);
    for (Index i = 0; i < n; ++i)
      rhs(i) = (s.samples(i + 2) - Scalar(2) * s.samples(i + 1) + s.samples(i)) / dx;
    const Scalar off = dx / Scalar(6);
    for (Index i = 1; i < n; ++i) {
      const Scalar w = off / b(i - 1);
      b(i) -= w * off;
      rhs(i) -= w * rhs(i - 1);
    }
    second(n) = rhs(n - 1) / b(n - 1);
    for (Index i = n - 1; i >= 1; --i) second(i) = (rhs(i - 1) - off * second(i + 1)) / b(i - 1);
  }

  Signal<Scalar> out;
  out.x0 = s.x0;
  out.dx = dx / Scalar(factor);
  out.samples.resize((m - 1) * Index(factor) + 1);
  const Scalar h2_6 = dx * dx / Scalar(6);
  for (Index i = 0; i + 1 < m; ++i) {
    for (Index j = 0; j < factor; ++j) {
      if (j == 0) {
        out.samples(i * factor) = s.samples(i);
        continue;
      }
      const Scalar t = Scalar(j) / Scalar(factor);
      const Scalar u = Scalar(1) - t;
      const Scalar v = u * s.samples(i) + t * s.samples(i + 1) +
                       h2_6 * ((u * u * u - u) * second(i) + (t * t * t - t) * second(i + 1));
      out.samples(i * factor + j) = std::max(v, Scalar(0));
    }
  }
  out.samples(out.samples.size() - 1) = s.samples(m - 1);
  return out;
}

namespace detail {

/// Every factor-th sample, landing exactly on the coarse nodes.
template <typename Scalar>
Signal<Scalar> restrict_signal(const Signal<Scalar>& fine, const Signal<Scalar>& like,
                               int factor) {
  if (factor <= 1) {
    Signal<Scalar> out = fine;
    out.x0 = like.x0;
    out.dx = like.dx;
    return out;
  }
  Signal<Scalar> out;
  out.x0 = like.x0;
  out.dx = like.dx;
  out.samples.resize(like.size());
  for (Index i = 0; i < like.size(); ++i) out.samples(i) = fine.samples(i * factor);
  return out;
}

} // namespace detail

/// Full SCSA pipeline at a fixed chi: refine (internally) -> assemble ->
/// negative_spectrum -> reconstruct -> restrict -> error metrics -> momentums,
/// asserting kappa_n^2/chi <= y_max on the way out.
template <typename Scalar>
ScsaResult<Scalar> analyze(const Signal<Scalar>& s, Scalar chi,
                           const AnalysisOptions<Scalar>& opts = {}) {
  if (!(chi > Scalar(0))) throw NonPositiveChi("analyze: chi must be positive");
  const int factor = std::max(1, opts.oversample);
  const Signal<Scalar> fine = refine_signal(s, factor);
  const DiscretizedOperator<Scalar> op = assemble(fine, chi, OperatorForm::Physical);
  const SpectralDecomposition<Scalar> dec = negative_spectrum(op, opts.solver);

  ScsaResult<Scalar> r;
  r.chi = chi;
  r.n_chi = dec.count();
  r.kappas = dec.kappas;
  r.warnings = dec.warnings;
  r.max_residual = dec.count() > 0 ? dec.residuals.maxCoeff() : Scalar(0);
  r.reconstruction = detail::restrict_signal(reconstruct(dec), s, factor);
  const ErrorMetrics em = error_metrics(s, r.reconstruction);
  r.relative_l2_error = Scalar(em.relative_l2_error);
  r.max_abs_error = Scalar(em.max_abs_error);
  r.momentums = momentums(dec.kappas, 3);

  const Scalar bound = y_max(s);
  for (Index n = 0; n < r.kappas.size(); ++n) {
    const Scalar v = r.kappas(n) * r.kappas(n) / chi;
    if (v > bound * (Scalar(1) + opts.proposition_slack))
      throw PropositionViolation("analyze: kappa_" + std::to_string(n) +
                                     "^2/chi = " + std::to_string(double(v)) +
                                     " exceeds y_max = " + std::to_string(double(bound)) +
                                     "; the assembled operator or solver is inconsistent",
                                 n, double(v), double(bound));
  }
  return r;
}

// ---- chi-selection policies ---------------------------------------------

template <typename Scalar>
struct FixedChi {
  Scalar chi;
};

/// Bisect chi in [chi_lo, chi_hi] for the smallest tested chi whose negative
/// eigenvalue count equals n_target (the count is nondecreasing in chi).
template <typename Scalar>
struct TargetCount {
  Index n_target;
  Scalar chi_lo;
  Scalar chi_hi;
  int max_iters = 80;
};

template <typename Scalar>
struct ChiSweep {
  std::vector<Scalar> chi_values;
};

template <typename Scalar>
using ChiPolicy = std::variant<FixedChi<Scalar>, TargetCount<Scalar>, ChiSweep<Scalar>>;

template <typename Scalar>
struct ChiTraceEntry {
  Scalar chi;
  Index n_chi;
  std::optional<Scalar> relative_l2_error; ///< present only when a full solve ran
};

template <typename Scalar>
struct ChiSelection {
  Scalar chi{};
  ScsaResult<Scalar> result;              ///< analysis at the selected chi
  std::vector<ScsaResult<Scalar>> sweep;  ///< Sweep policy: one result per chi, in order
  std::vector<ChiTraceEntry<Scalar>> trace;
  bool attained = true; ///< TargetCount: whether n_chi == n_target exactly
};

namespace detail {

template <typename Scalar>
void check_policy(const FixedChi<Scalar>& p) {
  if (!(p.chi > Scalar(0))) throw NonPositiveChi("select_chi: Fixed chi must be positive");
}

template <typename Scalar>
void check_policy(const TargetCount<Scalar>& p) {
  if (p.n_target < 1) throw Error("select_chi: n_target must be >= 1");
  if (!(p.chi_lo > Scalar(0)) || !(p.chi_hi > Scalar(0)))
    throw NonPositiveChi("select_chi: chi bracket must be positive");
  if (!(p.chi_lo < p.chi_hi)) throw Error("select_chi: requires chi_lo < chi_hi");
}

template <typename Scalar>
void check_policy(const ChiSweep<Scalar>& p) {
  if (p.chi_values.empty()) throw Error("select_chi: sweep needs at least one chi");
  for (Scalar c : p.chi_values)
    if (!(c > Scalar(0))) throw NonPositiveChi("select_chi: sweep chi values must be positive");
}

} // namespace detail

template <typename Scalar>
ChiSelection<Scalar> select_chi(const Signal<Scalar>& s, const ChiPolicy<Scalar>& policy,
                                const AnalysisOptions<Scalar>& opts = {}) {
  ChiSelection<Scalar> sel;

  if (const auto* fixed = std::get_if<FixedChi<Scalar>>(&policy)) {
    detail::check_policy(*fixed);
    sel.chi = fixed->chi;
    sel.result = analyze(s, fixed->chi, opts);
    sel.trace.push_back({fixed->chi, sel.result.n_chi, sel.result.relative_l2_error});
    return sel;
  }

  if (const auto* sweep = std::get_if<ChiSweep<Scalar>>(&policy)) {
    detail::check_policy(*sweep);
    Index best = 0;
    for (Index i = 0; i < Index(sweep->chi_values.size()); ++i) {
      const Scalar chi = sweep->chi_values[size_t(i)];
      sel.sweep.push_back(analyze(s, chi, opts));
      const auto& r = sel.sweep.back();
      sel.trace.push_back({chi, r.n_chi, r.relative_l2_error});
      if (r.relative_l2_error < sel.sweep[size_t(best)].relative_l2_error) best = i;
    }
    sel.chi = sel.sweep[size_t(best)].chi;
    sel.result = sel.sweep[size_t(best)];
    return sel;
  }

  const auto& tgt = std::get<TargetCount<Scalar>>(policy);
  detail::check_policy(tgt);

  // All probes share one refined grid so the count is monotone in chi.
  const int factor = std::max(1, opts.oversample);
  const Signal<Scalar> fine = refine_signal(s, factor);
  auto count_at = [&](Scalar chi) -> Index {
    const DiscretizedOperator<Scalar> op = assemble(fine, chi, OperatorForm::Physical);
    const Scalar thr =
        opts.solver.negativity_threshold.value_or(default_negativity_threshold(op));
    return eigen_count(op, -thr);
  };

  const Index n_lo = count_at(tgt.chi_lo);
  const Index n_hi = count_at(tgt.chi_hi);
  sel.trace.push_back({tgt.chi_lo, n_lo, std::nullopt});
  sel.trace.push_back({tgt.chi_hi, n_hi, std::nullopt});

  auto unreachable = [&](Scalar lo, Scalar hi, Index nlo, Index nhi) -> TargetUnreachable {
    Scalar best_chi = lo;
    Index best_n = nlo;
    for (const auto& t : sel.trace) {
      if (std::abs(double(t.n_chi - tgt.n_target)) < std::abs(double(best_n - tgt.n_target))) {
        best_chi = t.chi;
        best_n = t.n_chi;
      }
    }
    return TargetUnreachable(
        "select_chi: target count " + std::to_string(tgt.n_target) + " not attained in [" +
            std::to_string(double(lo)) + ", " + std::to_string(double(hi)) + "] (counts " +
            std::to_string(nlo) + ".." + std::to_string(nhi) + ")",
        double(lo), double(hi), nlo, nhi, double(best_chi), best_n);
  };

  if (tgt.n_target < n_lo || tgt.n_target > n_hi)
    throw unreachable(tgt.chi_lo, tgt.chi_hi, n_lo, n_hi);

  std::optional<Scalar> found;
  if (n_lo == tgt.n_target) {
    found = tgt.chi_lo;
  } else {
    // invariant: count(lo) < n_target <= count(hi); geometric midpoints
    Scalar lo = tgt.chi_lo, hi = tgt.chi_hi;
    Index cnt_lo = n_lo, cnt_hi = n_hi;
    if (n_hi == tgt.n_target) found = tgt.chi_hi;
    int iters = 0;
    const Scalar rel_width = Scalar(1e-3);
    while (hi - lo > rel_width * hi) {
      if (++iters > tgt.max_iters) {
        if (found) break; // good enough: smallest tested chi already found
        throw unreachable(lo, hi, cnt_lo, cnt_hi);
      }
      const Scalar mid = std::sqrt(lo * hi);
      if (mid <= lo || mid >= hi) break;
      const Index c = count_at(mid);
      sel.trace.push_back({mid, c, std::nullopt});
      if (c >= tgt.n_target) {
        hi = mid;
        cnt_hi = c;
        if (c == tgt.n_target) found = mid; // hi shrinks, so the last hit is the smallest
      } else {
        lo = mid;
        cnt_lo = c;
      }
    }
  }

  if (found) {
    sel.attained = true;
    sel.chi = *found;
  } else {
    // bracket converged without an exact hit: nearest achievable, flagged
    sel.attained = false;
    Scalar best_chi = sel.trace.front().chi;
    Index best_gap = std::numeric_limits<Index>::max();
    for (const auto& t : sel.trace) {
      const Index gap = std::abs(t.n_chi - tgt.n_target);
      if (gap < best_gap || (gap == best_gap && t.chi < best_chi)) {
        best_gap = gap;
        best_chi = t.chi;
      }
    }
    sel.chi = best_chi;
  }
  sel.result = analyze(s, sel.chi, opts);
  sel.trace.push_back({sel.chi, sel.result.n_chi, sel.result.relative_l2_error});
  return sel;
}

} // namespace scsa
