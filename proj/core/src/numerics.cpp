#include "starscatter/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace starscatter::numerics
{

namespace
{

double SimpsonStep(const std::function<double(double)> &f, double a, double fa, double b,
                   double fb, double m, double fm, double whole, double tol, int depth)
{
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
  {
    return left + right + delta / 15.0;
  }
  return SimpsonStep(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         SimpsonStep(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double AdaptiveSimpson(const std::function<double(double)> &f, double a, double b,
                       double abs_tol, int max_depth)
{
  if (a == b)
  {
    return 0.0;
  }
  // Split once up front so that a symmetric integrand cannot fool the first estimate.
  const int pieces = 4;
  const double h = (b - a) / pieces;
  double sum = 0.0;
  for (int i = 0; i < pieces; i++)
  {
    const double lo = a + i * h, hi = (i + 1 == pieces) ? b : a + (i + 1) * h;
    const double mid = 0.5 * (lo + hi);
    const double flo = f(lo), fhi = f(hi), fmid = f(mid);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    sum += SimpsonStep(f, lo, flo, hi, fhi, mid, fmid, whole, abs_tol / pieces, max_depth);
  }
  return sum;
}

std::vector<double> SolveTridiagonal(std::vector<double> sub, std::vector<double> diag,
                                     std::vector<double> sup, std::vector<double> rhs)
{
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; i++)
  {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
  {
    rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
  }
  return rhs;
}

CubicSpline::CubicSpline(std::vector<double> knots, std::vector<double> values)
  : x_(std::move(knots)), y_(std::move(values))
{
  const std::size_t n = x_.size();
  if (n < 4 || y_.size() != n)
  {
    throw std::invalid_argument("CubicSpline needs at least four knots with matching values");
  }
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; i++)
  {
    h[i] = x_[i + 1] - x_[i];
    if (!(h[i] > 0.0))
    {
      throw std::invalid_argument("CubicSpline knots must be strictly increasing");
    }
    d[i] = (y_[i + 1] - y_[i]) / h[i];
  }

  // Unknowns M_1..M_{n-2}; M_0 and M_{n-1} follow from continuity of the third
  // derivative across the first and last interior knots (not-a-knot).
  const std::size_t k = n - 2;
  std::vector<double> sub(k, 0.0), diag(k, 0.0), sup(k, 0.0), rhs(k, 0.0);
  for (std::size_t r = 0; r < k; r++)
  {
    const std::size_t i = r + 1;
    sub[r] = h[i - 1];
    diag[r] = 2.0 * (h[i - 1] + h[i]);
    sup[r] = h[i];
    rhs[r] = 6.0 * (d[i] - d[i - 1]);
  }
  // M_0 = (1 + h0/h1) M_1 - (h0/h1) M_2
  const double r0 = h[0] / h[1];
  diag[0] += h[0] * (1.0 + r0);
  sup[0] -= h[0] * r0;
  // M_{n-1} = (1 + h_{n-2}/h_{n-3}) M_{n-2} - (h_{n-2}/h_{n-3}) M_{n-3}
  const double rn = h[n - 2] / h[n - 3];
  diag[k - 1] += h[n - 2] * (1.0 + rn);
  sub[k - 1] -= h[n - 2] * rn;

  const std::vector<double> inner = SolveTridiagonal(sub, diag, sup, rhs);
  m_.assign(n, 0.0);
  std::copy(inner.begin(), inner.end(), m_.begin() + 1);
  m_[0] = (1.0 + r0) * m_[1] - r0 * m_[2];
  m_[n - 1] = (1.0 + rn) * m_[n - 2] - rn * m_[n - 3];
}

std::size_t CubicSpline::Interval(double x) const
{
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto idx = static_cast<std::size_t>(std::distance(x_.begin(), it));
  if (idx == 0)
  {
    return 0;
  }
  return std::min(idx - 1, x_.size() - 2);
}

double CubicSpline::operator()(double x) const
{
  const std::size_t i = Interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::Derivative(double x) const
{
  const std::size_t i = Interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
}

double CubicSpline::SecondDerivative(double x) const
{
  const std::size_t i = Interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return a * m_[i] + b * m_[i + 1];
}

}  // namespace starscatter::numerics
