#include "starscatter/fundamental.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "starscatter/errors.hpp"

namespace starscatter
{

namespace
{

constexpr cplx kI{0.0, 1.0};

// sin(kx)/k with its k -> 0 limit.
double SinOverK(double k, double x)
{
  const double kx = k * x;
  if (std::abs(kx) < 1e-4)
  {
    return x * (1.0 - kx * kx / 6.0);
  }
  return std::sin(kx) / k;
}

double Sinc(double p)
{
  if (std::abs(p) < 1e-4)
  {
    return 1.0 - p * p / 6.0;
  }
  return std::sin(p) / p;
}

// (sin p - p cos p) / p^2
double Phi(double p)
{
  if (std::abs(p) < 1e-3)
  {
    const double p2 = p * p;
    return p / 3.0 - p * p2 / 30.0 + p * p2 * p2 / 840.0;
  }
  return (std::sin(p) - p * std::cos(p)) / (p * p);
}

}  // namespace

FundamentalData FundamentalAt(const PotentialFn &V, double tau, double h, double k,
                              const JostOptions &opts)
{
  if (!(tau > 0.0))
  {
    throw DomainError("travel time tau must be positive");
  }
  const FieldState s = FundamentalSolution(V, h, k, tau, opts);
  return {k, s.value, s.derivative};
}

FieldState FundamentalSolution(const PotentialFn &V, double h, double k, double x,
                               const JostOptions &opts)
{
  if (V.IsZero())
  {
    const double c = std::cos(k * x), s = std::sin(k * x);
    return {c + h * SinOverK(k, x), -k * s + h * c};
  }
  return Propagate(V, k, 0.0, {1.0, h}, x, opts);
}

KernelTable::KernelTable(double tau, std::size_t intervals)
  : tau_(tau), step_(tau / static_cast<double>(intervals)), n_(intervals),
    q_((intervals + 1) * (intervals + 1), 0.0)
{
}

double KernelTable::operator()(double x, double t) const
{
  if (x < 0.0 || x > tau_ * (1.0 + 1e-12) || std::abs(t) > x * (1.0 + 1e-12) + 1e-15)
  {
    std::ostringstream msg;
    msg << "kernel evaluated outside its triangle at (x, t) = (" << x << ", " << t << ")";
    throw DomainError(msg.str());
  }
  const double nd = static_cast<double>(n_);
  const double xi = std::clamp(0.5 * (x + t) / step_, 0.0, nd);
  const double eta = std::clamp(0.5 * (x - t) / step_, 0.0, nd - xi);
  const auto i = static_cast<std::size_t>(std::floor(xi));
  const auto j = static_cast<std::size_t>(std::floor(eta));
  if (i + j >= n_)
  {
    return Node(i, n_ - i);
  }
  // Piecewise linear on the two triangles of the cell.
  const double u = xi - static_cast<double>(i), v = eta - static_cast<double>(j);
  const double q10 = Node(i + 1, j), q01 = Node(i, j + 1);
  if (u + v <= 1.0)
  {
    const double q00 = Node(i, j);
    return q00 + u * (q10 - q00) + v * (q01 - q00);
  }
  const double q11 = Node(i + 1, j + 1);
  return q11 + (1.0 - u) * (q01 - q11) + (1.0 - v) * (q10 - q11);
}

double KernelTable::MaxAbs() const
{
  double m = 0.0;
  for (std::size_t i = 0; i <= n_; i++)
  {
    for (std::size_t j = 0; i + j <= n_; j++)
    {
      m = std::max(m, std::abs(Node(i, j)));
    }
  }
  return m;
}

KernelTable SolveKernel(const PotentialFn &V, double tau, double grid_step, double tol,
                        std::size_t max_iterations)
{
  if (!(tau > 0.0))
  {
    throw DomainError("kernel domain tau must be positive");
  }
  const double step = grid_step > 0.0 ? grid_step : tau / 400.0;
  const auto n = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(tau / step - 1e-9)));
  KernelTable K(tau, n);
  const double s = K.Step();
  const std::size_t stride = n + 1;

  // V extended by zero beyond tau, sampled at x = m s.
  std::vector<double> v(n + 1);
  for (std::size_t m = 0; m <= n; m++)
  {
    v[m] = V(s * static_cast<double>(m));
  }
  // Source term (1/2) int_0^xi V, trapezoidal.
  std::vector<double> source(n + 1, 0.0);
  for (std::size_t m = 1; m <= n; m++)
  {
    source[m] = source[m - 1] + 0.5 * s * (v[m - 1] + v[m]);
  }
  for (auto &x : source)
  {
    x *= 0.5;
  }

  for (std::size_t i = 0; i <= n; i++)
  {
    for (std::size_t j = 0; i + j <= n; j++)
    {
      K.Node(i, j) = source[i];
    }
  }
  if (V.IsZero())
  {
    return K;
  }

  std::vector<double> f(stride * stride, 0.0), g(stride * stride, 0.0), d(stride * stride, 0.0);
  const auto at = [stride](std::size_t i, std::size_t j) { return i * stride + j; };
  for (std::size_t iter = 1; iter <= max_iterations; iter++)
  {
    for (std::size_t i = 0; i <= n; i++)
    {
      for (std::size_t j = 0; i + j <= n; j++)
      {
        f[at(i, j)] = v[i + j] * K.Node(i, j);
      }
    }
    // g(i, j) = int_0^{eta_j} F(xi_i, beta) d beta
    for (std::size_t i = 0; i <= n; i++)
    {
      g[at(i, 0)] = 0.0;
      for (std::size_t j = 1; i + j <= n; j++)
      {
        g[at(i, j)] = g[at(i, j - 1)] + 0.5 * s * (f[at(i, j - 1)] + f[at(i, j)]);
      }
    }
    // d(i, j) = int_0^{xi_i} g(alpha, eta_j) d alpha
    for (std::size_t j = 0; j <= n; j++)
    {
      d[at(0, j)] = 0.0;
      for (std::size_t i = 1; i + j <= n; i++)
      {
        d[at(i, j)] = d[at(i - 1, j)] + 0.5 * s * (g[at(i - 1, j)] + g[at(i, j)]);
      }
    }
    // Q_{xi eta} = V(xi + eta) Q, so the double integral enters with weight 1.
    double change = 0.0;
    for (std::size_t i = 0; i <= n; i++)
    {
      for (std::size_t j = 0; i + j <= n; j++)
      {
        const double next = source[i] + d[at(i, j)];
        change = std::max(change, std::abs(next - K.Node(i, j)));
        K.Node(i, j) = next;
      }
    }
    K.iterations = iter;
    K.final_change = change;
    if (!std::isfinite(change))
    {
      break;
    }
    if (change < tol)
    {
      return K;
    }
  }
  std::ostringstream msg;
  msg << "kernel iteration did not converge in " << max_iterations
      << " iterations (last change " << K.final_change << ")";
  throw DivergenceError(msg.str());
}

cplx FundamentalViaKernel(const KernelTable &K, double h, double k, double tau)
{
  if (std::abs(tau - K.Tau()) > 1e-12 * std::max(1.0, tau))
  {
    throw DomainError("kernel table was built for a different tau");
  }
  const std::size_t n = K.Intervals();
  const double s = K.Step();
  const double dt = 2.0 * s;

  // Nodes on x = tau: (i, n - i) -> t = (2i - n) s.
  cplx cos_part = 0.0;  // int K e^{ikt} dt
  double t_moment = 0.0;  // int K t dt, for the k -> 0 limit of the sine part
  const double p = 0.5 * k * dt;
  const double sinc = Sinc(p), phi = Phi(p);
  for (std::size_t i = 0; i < n; i++)
  {
    const double t0 = (2.0 * static_cast<double>(i) - static_cast<double>(n)) * s;
    const double tm = t0 + 0.5 * dt;
    const double k0 = K.Node(i, n - i), k1 = K.Node(i + 1, n - i - 1);
    const double km = 0.5 * (k0 + k1), slope = (k1 - k0) / dt;
    // int_{-dt/2}^{dt/2} (km + slope u) e^{ik(tm + u)} du
    cos_part += std::polar(1.0, k * tm) *
                (km * dt * sinc + slope * 2.0 * kI * (0.25 * dt * dt) * phi);
    t_moment += km * tm * dt + slope * dt * dt * dt / 12.0;
  }
  const double sine_part = std::abs(k) < 1e-8 ? t_moment : cos_part.imag() / k;
  const double free = std::cos(k * tau) + h * SinOverK(k, tau);
  return free + cos_part.real() + h * sine_part;
}

}  // namespace starscatter
