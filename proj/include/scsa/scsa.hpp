#pragma once

// Semi-classical signal analysis: represent a nonnegative pulse-shaped signal
// by the discrete spectrum of the Schrodinger operator -d^2/dx^2 - chi*y and
// rebuild it from the squared, L2-normalized eigenfunctions.

#include "scsa/analysis.hpp"
#include "scsa/csv_io.hpp"
#include "scsa/errors.hpp"
#include "scsa/operator.hpp"
#include "scsa/oracles.hpp"
#include "scsa/quadrature.hpp"
#include "scsa/signal.hpp"
#include "scsa/solver.hpp"
