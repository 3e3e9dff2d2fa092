#ifndef STARSCATTER_JOST_HPP
#define STARSCATTER_JOST_HPP

#include <complex>
#include <cstddef>
#include <utility>

#include "starscatter/ode.hpp"
#include "starscatter/potential.hpp"

namespace starscatter
{

using cplx = std::complex<double>;

// Value and x-derivative of a solution of -y'' + V y = k^2 y.
struct FieldState
{
  cplx value;
  cplx derivative;
};

struct JostOptions
{
  // Truncation: smallest X with TailBound(X) below this.
  double tail_tol = 1e-10;
  double rtol = 1e-9;
  double atol = 1e-12;
  // Step cap as a fraction of the wavelength 2 pi / k.
  double steps_per_wavelength = 20.0;
};

struct JostData
{
  double k = 0.0;
  cplx f0;   // f(0, k)
  cplx df0;  // f'(0, k)
  cplx a;    // f~ ~ a e^{-ikx} + b e^{ikx} as x -> infinity
  cplx b;
  double truncation_X = 0.0;
};

// Jost boundary data at the node, and the asymptotic coefficients a(k), b(k).
// f is integrated backwards from the truncation point with exact free data; f~ forwards
// from f~(0) = 1, f~'(0) = -ik.
JostData JostAtOrigin(const PotentialFn &V, double k, const JostOptions &opts = {});

// Same as JostAtOrigin without the forward f~ pass (a = b = NaN).
JostData JostBoundary(const PotentialFn &V, double k, const JostOptions &opts = {});

// f'(0,k) / f(0,k).
cplx JostLogDerivative(const JostData &d);

// Propagates a solution of -y'' + V y = k^2 y from x0 to x1 (either direction). V is zero
// outside its support, where the propagation is exact. Requires k != 0.
FieldState Propagate(const PotentialFn &V, double k, double x0, FieldState state, double x1,
                     const JostOptions &opts = {}, ode::IntegratorStats *stats = nullptr);

// f(x, k) and f~(x, k) at an arbitrary x >= 0.
FieldState JostSolution(const PotentialFn &V, double k, double x, const JostOptions &opts = {});
FieldState JostTildeSolution(const PotentialFn &V, double k, double x,
                             const JostOptions &opts = {});

// Coefficients (c_minus, c_plus) with y = c_minus e^{-ikX} + c_plus e^{ikX} matching the
// value and derivative at X.
std::pair<cplx, cplx> MatchPlaneWaves(const FieldState &s, double k, double X);

// Slow reference: successive approximation of the Volterra equation for f on a uniform
// grid of `intervals` cells over [0, X] (trapezoidal rule). Returns f(0), f'(0); a and b
// are left unset. Intended for small k X only.
JostData JostVolterraReference(const PotentialFn &V, double k, double X, std::size_t intervals,
                               std::size_t max_iterations = 200);

}  // namespace starscatter

#endif  // STARSCATTER_JOST_HPP
