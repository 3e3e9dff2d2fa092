#ifndef STARSCATTER_FUNDAMENTAL_HPP
#define STARSCATTER_FUNDAMENTAL_HPP

#include <cstddef>
#include <vector>

#include "starscatter/jost.hpp"
#include "starscatter/potential.hpp"

namespace starscatter
{

// omega(tau, k; h, V) and its x-derivative, where omega(0) = 1, omega'(0) = h.
struct FundamentalData
{
  double k = 0.0;
  cplx omega_tau;
  cplx domega_tau;
};

FundamentalData FundamentalAt(const PotentialFn &V, double tau, double h, double k,
                              const JostOptions &opts = {});

// omega and omega' at an interior point x in [0, tau].
FieldState FundamentalSolution(const PotentialFn &V, double h, double k, double x,
                               const JostOptions &opts = {});

//
// Transformation kernel K(x, t; V) on the triangle |t| <= x <= tau, stored on the
// characteristic grid xi = (x + t)/2, eta = (x - t)/2 with xi, eta multiples of the step
// and xi + eta <= tau. Grid nodes in (x, t) are ((i + j) s, (i - j) s).
//
class KernelTable
{
public:
  KernelTable(double tau, std::size_t intervals);

  double Tau() const { return tau_; }
  double Step() const { return step_; }
  std::size_t Intervals() const { return n_; }

  // Value at characteristic node (i, j), i + j <= Intervals().
  double Node(std::size_t i, std::size_t j) const { return q_[Index(i, j)]; }
  double &Node(std::size_t i, std::size_t j) { return q_[Index(i, j)]; }

  // K(x, t) by bilinear interpolation in (xi, eta); requires |t| <= x <= tau.
  double operator()(double x, double t) const;

  // Largest |K| over the grid.
  double MaxAbs() const;

  std::size_t iterations = 0;
  double final_change = 0.0;

private:
  std::size_t Index(std::size_t i, std::size_t j) const { return i * (n_ + 1) + j; }

  double tau_;
  double step_;
  std::size_t n_;
  std::vector<double> q_;
};

// Fixed-point iteration of the kernel integral equation with trapezoidal quadrature
// until the sup-norm change drops below tol. grid_step <= 0 selects tau/400.
KernelTable SolveKernel(const PotentialFn &V, double tau, double grid_step = 0.0,
                        double tol = 1e-10, std::size_t max_iterations = 200);

// omega(tau, k; h, V) through the integral representation over K(tau, t). The kernel is
// treated as piecewise linear in t and integrated against cos / sin exactly.
cplx FundamentalViaKernel(const KernelTable &K, double h, double k, double tau);

}  // namespace starscatter

#endif  // STARSCATTER_FUNDAMENTAL_HPP
