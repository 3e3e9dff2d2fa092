#ifndef STARSCATTER_NUMERICS_HPP
#define STARSCATTER_NUMERICS_HPP

#include <functional>
#include <span>
#include <vector>

namespace starscatter::numerics
{

// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance abs_tol.
// Recursion depth is capped; the result is returned even if the cap is reached.
double AdaptiveSimpson(const std::function<double(double)> &f, double a, double b,
                       double abs_tol, int max_depth = 48);

// Solves a tridiagonal system in place (Thomas algorithm). sub[0] and sup[n-1] are
// ignored. Returns the solution.
std::vector<double> SolveTridiagonal(std::vector<double> sub, std::vector<double> diag,
                                     std::vector<double> sup, std::vector<double> rhs);

//
// Interpolating cubic spline with not-a-knot end conditions. Knots must be strictly
// increasing and there must be at least four of them. Outside the knot range the end
// cubic pieces are extrapolated.
//
class CubicSpline
{
public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> knots, std::vector<double> values);

  double operator()(double x) const;
  double Derivative(double x) const;
  double SecondDerivative(double x) const;

  double Front() const { return x_.front(); }
  double Back() const { return x_.back(); }
  std::span<const double> Knots() const { return x_; }
  // Second derivative at each knot.
  std::span<const double> Moments() const { return m_; }

private:
  std::size_t Interval(double x) const;

  std::vector<double> x_, y_, m_;
};

}  // namespace starscatter::numerics

#endif  // STARSCATTER_NUMERICS_HPP
