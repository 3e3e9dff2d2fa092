#ifndef STARSCATTER_ODE_HPP
#define STARSCATTER_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <sstream>

#include "starscatter/errors.hpp"

namespace starscatter::ode
{

using State = std::array<std::complex<double>, 2>;

struct IntegratorOptions
{
  double rtol = 1e-9;
  double atol = 1e-12;
  // Largest step allowed, in the independent variable. Non-positive means unbounded.
  double max_step = 0.0;
  std::size_t max_steps = 2'000'000;
};

struct IntegratorStats
{
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  // Largest accepted scaled error estimate (1 == tolerance).
  double max_error = 0.0;
};

namespace detail
{

inline State Axpy(const State &y, double h, std::initializer_list<std::pair<double, const State *>> terms)
{
  State out = y;
  for (const auto &[c, k] : terms)
  {
    for (std::size_t i = 0; i < out.size(); i++)
    {
      out[i] += h * c * (*k)[i];
    }
  }
  return out;
}

}  // namespace detail

//
// Dormand-Prince 5(4) embedded Runge-Kutta pair with FSAL and an elementary
// step-size controller. Integrates dy/dx = rhs(x, y) from x0 to x1; x1 < x0 is allowed.
// Throws AccuracyError when the step size collapses or the step budget is exhausted.
//
template <typename Rhs>
State IntegrateDormandPrince(Rhs &&rhs, double x0, State y, double x1,
                             const IntegratorOptions &opts, IntegratorStats *stats = nullptr)
{
  IntegratorStats local;
  IntegratorStats &st = stats ? *stats : local;
  const double span = x1 - x0;
  if (span == 0.0)
  {
    return y;
  }
  const double dir = span > 0.0 ? 1.0 : -1.0;
  const double length = std::abs(span);
  double hmax = opts.max_step > 0.0 ? std::min(opts.max_step, length) : length;
  double h = std::min(hmax, length / 16.0);
  const double hmin = 1e-14 * std::max(1.0, std::max(std::abs(x0), std::abs(x1)));

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  // Fifth-order minus embedded fourth-order weights.
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  double x = x0;
  State k1 = rhs(x, y);
  double last_error = 0.0;
  while (dir * (x1 - x) > 0.0)
  {
    if (st.accepted + st.rejected >= opts.max_steps)
    {
      std::ostringstream msg;
      msg << "ODE integrator exceeded " << opts.max_steps << " steps at x=" << x;
      throw AccuracyError(msg.str(), last_error);
    }
    bool last = false;
    if (h >= dir * (x1 - x))
    {
      h = dir * (x1 - x);
      last = true;
    }
    const double hs = dir * h;
    const State k2 = rhs(x + c2 * hs, detail::Axpy(y, hs, {{a21, &k1}}));
    const State k3 = rhs(x + c3 * hs, detail::Axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
    const State k4 =
      rhs(x + c4 * hs, detail::Axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = rhs(x + c5 * hs,
                         detail::Axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = rhs(x + hs, detail::Axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3},
                                                      {a64, &k4}, {a65, &k5}}));
    const State y5 =
      detail::Axpy(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = rhs(x + hs, y5);

    double err = 0.0;
    for (std::size_t i = 0; i < y.size(); i++)
    {
      const std::complex<double> e =
        hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    last_error = err;

    if (err <= 1.0)
    {
      x = last ? x1 : x + hs;
      y = y5;
      k1 = k7;
      st.accepted++;
      st.max_error = std::max(st.max_error, err);
      const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(hmax, h * grow);
    }
    else
    {
      st.rejected++;
      const double shrink =
        std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.1;
      h *= shrink;
      if (h < hmin)
      {
        std::ostringstream msg;
        msg << "ODE step size underflow at x=" << x << " (error estimate " << err << ")";
        throw AccuracyError(msg.str(), err);
      }
    }
  }
  return y;
}

}  // namespace starscatter::ode

#endif  // STARSCATTER_ODE_HPP
