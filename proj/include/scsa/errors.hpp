#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scsa {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// signal construction / CSV input
class NonFiniteSample : public Error {
public:
  using Error::Error;
};

class NonPositiveSpacing : public Error {
public:
  using Error::Error;
};

class TooFewSamples : public Error {
public:
  using Error::Error;
};

class NonUniformGrid : public Error {
public:
  using Error::Error;
};

class CsvFormatError : public Error {
public:
  using Error::Error;
};

// operator assembly
class NonPositiveChi : public Error {
public:
  using Error::Error;
};

// spectral solver
class ConvergenceFailure : public Error {
public:
  ConvergenceFailure(std::string msg, std::ptrdiff_t index)
      : Error(std::move(msg)), eigen_index(index) {}
  std::ptrdiff_t eigen_index; ///< index of the offending eigenpair (0 = deepest)
};

// oracles
class MatrixTooLarge : public Error {
public:
  using Error::Error;
};

// analysis
class GridMismatch : public Error {
public:
  using Error::Error;
};

class PropositionViolation : public Error {
public:
  PropositionViolation(std::string msg, std::ptrdiff_t index, double value, double bound)
      : Error(std::move(msg)), eigen_index(index), value(value), bound(bound) {}
  std::ptrdiff_t eigen_index;
  double value; ///< offending kappa^2 / chi
  double bound; ///< y_max of the analyzed signal
};

class TargetUnreachable : public Error {
public:
  TargetUnreachable(std::string msg, double chi_lo, double chi_hi, std::ptrdiff_t n_lo,
                    std::ptrdiff_t n_hi, double best_chi, std::ptrdiff_t best_n)
      : Error(std::move(msg)), chi_lo(chi_lo), chi_hi(chi_hi), n_lo(n_lo), n_hi(n_hi),
        best_chi(best_chi), best_n(best_n) {}
  double chi_lo, chi_hi;        ///< best bracket found
  std::ptrdiff_t n_lo, n_hi;    ///< eigenvalue counts at the bracket edges
  double best_chi;              ///< tested chi whose count came closest
  std::ptrdiff_t best_n;
};

} // namespace scsa
