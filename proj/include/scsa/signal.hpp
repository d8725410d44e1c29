#pragma once

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <vector>

#include "scsa/errors.hpp"

namespace scsa {

template <typename Scalar>
using VectorX = Eigen::Vector<Scalar, Eigen::Dynamic>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Eigen::Index;

/// A real-valued signal sampled on a uniform grid x_i = x0 + i*dx.
template <typename Scalar>
struct Signal {
  Scalar x0{};
  Scalar dx{};
  VectorX<Scalar> samples;

  Index size() const { return samples.size(); }

  /// Abscissa of sample i.
  Scalar x(Index i) const { return x0 + Scalar(i) * dx; }

  /// All abscissas as a vector.
  VectorX<Scalar> grid() const {
    return VectorX<Scalar>::LinSpaced(samples.size(), x0, x0 + Scalar(samples.size() - 1) * dx);
  }
};

template <typename Scalar>
Scalar y_max(const Signal<Scalar>& s) {
  return s.samples.maxCoeff();
}

/// Validated constructor. Requires dx > 0, at least 3 finite samples.
template <typename Scalar, typename Derived>
Signal<Scalar> from_samples(Scalar x0, Scalar dx, const Eigen::DenseBase<Derived>& values) {
  if (!(dx > Scalar(0)) || !std::isfinite(static_cast<double>(dx)))
    throw NonPositiveSpacing("from_samples: grid spacing must be positive and finite, got " +
                             std::to_string(static_cast<double>(dx)));
  if (!std::isfinite(static_cast<double>(x0)))
    throw NonFiniteSample("from_samples: x0 is not finite");
  if (values.size() < 3)
    throw TooFewSamples("from_samples: need at least 3 samples, got " +
                        std::to_string(values.size()));
  Signal<Scalar> s;
  s.x0 = x0;
  s.dx = dx;
  s.samples = values.derived();
  if (!s.samples.allFinite())
    throw NonFiniteSample("from_samples: samples contain NaN or infinity");
  return s;
}

template <typename Scalar>
Signal<Scalar> from_samples(Scalar x0, Scalar dx, const std::vector<Scalar>& values) {
  return from_samples<Scalar>(
      x0, dx, Eigen::Map<const VectorX<Scalar>>(values.data(), Index(values.size())));
}

template <typename Scalar>
struct ValidationReport {
  bool nonnegative = false;
  Scalar min_value{};
  bool decay_ok = false;      ///< both endpoint samples below decay_threshold * y_max
  Scalar decay_threshold{};

  bool ok() const { return nonnegative && decay_ok; }
};

/// Check the signal hypotheses on the finite grid: nonnegativity everywhere and
/// sufficient decay at both window endpoints. Failures are reported, never thrown.
template <typename Scalar>
ValidationReport<Scalar> validate(const Signal<Scalar>& s, Scalar decay_threshold) {
  if (!(decay_threshold > Scalar(0) && decay_threshold < Scalar(1)))
    throw Error("validate: decay_threshold must lie in (0, 1)");
  ValidationReport<Scalar> r;
  r.decay_threshold = decay_threshold;
  r.min_value = s.samples.minCoeff();
  r.nonnegative = r.min_value >= Scalar(0);
  const Scalar ymax = s.samples.maxCoeff();
  if (ymax > Scalar(0)) {
    const Scalar lim = decay_threshold * ymax;
    r.decay_ok = s.samples(0) <= lim && s.samples(s.size() - 1) <= lim;
  } else {
    r.decay_ok = true; // identically zero signal has nothing left to decay
  }
  return r;
}

/// Subtract the global minimum so the result is nonnegative with min exactly 0.
template <typename Scalar>
Signal<Scalar> baseline_shift(const Signal<Scalar>& s) {
  Signal<Scalar> out = s;
  out.samples.array() -= s.samples.minCoeff();
  return out;
}

} // namespace scsa
