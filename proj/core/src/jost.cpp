#include "starscatter/jost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "starscatter/errors.hpp"

namespace starscatter
{

namespace
{

constexpr cplx kI{0.0, 1.0};

// Plane-wave amplitudes: y = c[0] e^{ikx} + c[1] e^{-ikx}, y' = ik (c[0] e^{ikx} - c[1] e^{-ikx}).
ode::State ToAmplitudes(const FieldState &s, double k, double x)
{
  const cplx e = std::polar(1.0, k * x);
  const cplx d = s.derivative / (kI * k);
  return {0.5 * (s.value + d) / e, 0.5 * (s.value - d) * e};
}

FieldState FromAmplitudes(const ode::State &c, double k, double x)
{
  const cplx e = std::polar(1.0, k * x);
  const cplx plus = c[0] * e, minus = c[1] / e;
  return {plus + minus, kI * k * (plus - minus)};
}

ode::IntegratorOptions IntegratorFor(const JostOptions &opts, double k)
{
  ode::IntegratorOptions io;
  io.rtol = opts.rtol;
  io.atol = opts.atol;
  io.max_step = 2.0 * std::numbers::pi / std::abs(k) / opts.steps_per_wavelength;
  return io;
}

// Direct form (y, y') for k == 0, where the plane-wave basis degenerates.
FieldState PropagateDirect(const PotentialFn &V, double k, double x0, FieldState s, double x1,
                           const JostOptions &opts, ode::IntegratorStats *stats)
{
  ode::IntegratorOptions io;
  io.rtol = opts.rtol;
  io.atol = opts.atol;
  const double k2 = k * k;
  const auto rhs = [&V, k2](double x, const ode::State &y) -> ode::State
  { return {y[1], (V(x) - k2) * y[0]}; };
  const ode::State out =
    ode::IntegrateDormandPrince(rhs, x0, {s.value, s.derivative}, x1, io, stats);
  return {out[0], out[1]};
}

}  // namespace

FieldState Propagate(const PotentialFn &V, double k, double x0, FieldState state, double x1,
                     const JostOptions &opts, ode::IntegratorStats *stats)
{
  if (k == 0.0)
  {
    return PropagateDirect(V, k, x0, state, x1, opts, stats);
  }
  ode::State c = ToAmplitudes(state, k, x0);
  if (!V.IsZero())
  {
    // Amplitudes are constant wherever V vanishes, i.e. outside [0, support_end].
    const double lo = std::clamp(x0, 0.0, V.SupportEnd());
    const double hi = std::clamp(x1, 0.0, V.SupportEnd());
    if (lo != hi)
    {
      const cplx inv2ik = 1.0 / (2.0 * kI * k);
      const auto rhs = [&V, k, inv2ik](double x, const ode::State &a) -> ode::State
      {
        const cplx e = std::polar(1.0, k * x);
        const cplx w = V(x) * (a[0] * e + a[1] / e) * inv2ik;
        return {w / e, -w * e};
      };
      c = ode::IntegrateDormandPrince(rhs, lo, c, hi, IntegratorFor(opts, k), stats);
    }
  }
  return FromAmplitudes(c, k, x1);
}

std::pair<cplx, cplx> MatchPlaneWaves(const FieldState &s, double k, double X)
{
  const cplx ik = kI * k;
  const cplx c_minus = std::polar(1.0, k * X) * (ik * s.value - s.derivative) / (2.0 * ik);
  const cplx c_plus = std::polar(1.0, -k * X) * (ik * s.value + s.derivative) / (2.0 * ik);
  return {c_minus, c_plus};
}

JostData JostBoundary(const PotentialFn &V, double k, const JostOptions &opts)
{
  if (k == 0.0)
  {
    throw SingularFrequencyError("Jost solutions are singular at k = 0");
  }
  JostData d;
  d.k = k;
  d.a = d.b = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  if (V.IsZero())
  {
    d.f0 = 1.0;
    d.df0 = kI * k;
    d.truncation_X = 0.0;
    return d;
  }
  const double X = V.TruncationPoint(opts.tail_tol);
  const cplx eX = std::polar(1.0, k * X);
  const FieldState f = Propagate(V, k, X, {eX, kI * k * eX}, 0.0, opts);
  d.f0 = f.value;
  d.df0 = f.derivative;
  d.truncation_X = X;
  return d;
}

JostData JostAtOrigin(const PotentialFn &V, double k, const JostOptions &opts)
{
  JostData d = JostBoundary(V, k, opts);
  if (V.IsZero())
  {
    d.a = 1.0;
    d.b = 0.0;
    return d;
  }
  const double X = d.truncation_X;
  const FieldState ft = Propagate(V, k, 0.0, {1.0, -kI * k}, X, opts);
  const auto [a, b] = MatchPlaneWaves(ft, k, X);
  d.a = a;
  d.b = b;
  return d;
}

cplx JostLogDerivative(const JostData &d)
{
  if (d.f0 == 0.0)
  {
    throw NodeSingularityError("f(0,k) vanishes; perturb k");
  }
  return d.df0 / d.f0;
}

FieldState JostSolution(const PotentialFn &V, double k, double x, const JostOptions &opts)
{
  if (k == 0.0)
  {
    throw SingularFrequencyError("Jost solutions are singular at k = 0");
  }
  const double X = V.IsZero() ? 0.0 : V.TruncationPoint(opts.tail_tol);
  const cplx eX = std::polar(1.0, k * X);
  if (x >= X)
  {
    const cplx e = std::polar(1.0, k * x);
    return {e, kI * k * e};
  }
  return Propagate(V, k, X, {eX, kI * k * eX}, x, opts);
}

FieldState JostTildeSolution(const PotentialFn &V, double k, double x, const JostOptions &opts)
{
  if (k == 0.0)
  {
    throw SingularFrequencyError("Jost solutions are singular at k = 0");
  }
  return Propagate(V, k, 0.0, {1.0, -kI * k}, x, opts);
}

JostData JostVolterraReference(const PotentialFn &V, double k, double X, std::size_t intervals,
                               std::size_t max_iterations)
{
  if (k == 0.0)
  {
    throw SingularFrequencyError("Jost solutions are singular at k = 0");
  }
  const std::size_t n = intervals + 1;
  const double h = X / static_cast<double>(intervals);
  std::vector<double> xs(n), v(n), w(n, h);
  for (std::size_t i = 0; i < n; i++)
  {
    xs[i] = h * static_cast<double>(i);
    v[i] = V(xs[i]);
  }
  w.front() = w.back() = 0.5 * h;

  std::vector<cplx> f(n), next(n);
  for (std::size_t i = 0; i < n; i++)
  {
    f[i] = std::polar(1.0, k * xs[i]);
  }
  // f(x) = e^{ikx} - int_x^X sin(k(x-y))/k V(y) f(y) dy
  for (std::size_t iter = 0; iter < max_iterations; iter++)
  {
    double change = 0.0;
    for (std::size_t i = 0; i < n; i++)
    {
      cplx acc = 0.0;
      for (std::size_t j = i; j < n; j++)
      {
        const double wj = (j == i) ? 0.5 * h : w[j];
        acc += wj * std::sin(k * (xs[i] - xs[j])) / k * v[j] * f[j];
      }
      next[i] = std::polar(1.0, k * xs[i]) - acc;
      change = std::max(change, std::abs(next[i] - f[i]));
    }
    f.swap(next);
    if (change < 1e-14)
    {
      break;
    }
    if (iter + 1 == max_iterations)
    {
      throw DivergenceError("Volterra successive approximation did not settle");
    }
  }
  // f'(0) = ik - int_0^X cos(k y) V(y) f(y) dy
  cplx integral = 0.0;
  for (std::size_t j = 0; j < n; j++)
  {
    integral += w[j] * std::cos(k * xs[j]) * v[j] * f[j];
  }
  JostData d;
  d.k = k;
  d.f0 = f[0];
  d.df0 = kI * k - integral;
  d.a = d.b = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  d.truncation_X = X;
  return d;
}

}  // namespace starscatter
