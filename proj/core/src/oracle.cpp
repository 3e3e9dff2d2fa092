#include "starscatter/oracle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "starscatter/errors.hpp"

namespace starscatter
{

namespace
{

constexpr cplx kI{0.0, 1.0};

// Weights of the one-sided relation
//   y(d) = cos(kd) y(0) + sin(kd)/k y'(0) + w0 (Vy)(0) + w1 (Vy)(d)
// obtained by integrating the sine kernel against a linear interpolant of V y.
struct OneSided
{
  double c, s_over_k, w0, w1;
};

OneSided OneSidedWeights(double k, double d)
{
  const double kd = k * d;
  const double c = std::cos(kd), s = std::sin(kd);
  double i0, i1;
  if (kd < 1e-3)
  {
    const double d2 = d * d, q = kd * kd;
    i0 = 0.5 * d2 * (1.0 - q / 12.0);
    i1 = d2 * d / 6.0 * (1.0 - q / 20.0);
  }
  else
  {
    const double k2 = k * k;
    i0 = (1.0 - c) / k2;
    i1 = d * i0 - (s - kd * c) / (k2 * k);
  }
  return {c, s / k, i0 - i1 / d, i1 / d};
}

}  // namespace

DiscreteGraphField OracleSolve(const StarNetwork &net, double k, double dx, double X_trunc)
{
  if (!(k > 0.0))
  {
    throw DomainError("oracle needs k > 0");
  }
  if (!(dx > 0.0) || dx > 2.0 * std::numbers::pi / k / 20.0)
  {
    std::ostringstream msg;
    msg << "oracle step dx=" << dx << " exceeds a twentieth of the wavelength at k=" << k;
    throw DomainError(msg.str());
  }
  if (!(X_trunc > 0.0))
  {
    throw DomainError("oracle truncation must be positive");
  }
  for (const Branch &b : net.Branches())
  {
    if (b.IsInfinite() && !b.Potential().IsZero() && b.Potential().SupportEnd() > X_trunc)
    {
      std::ostringstream msg;
      msg << "oracle truncation " << X_trunc << " cuts the potential of branch " << b.Id()
          << " (support to " << b.Potential().SupportEnd() << ")";
      throw DomainError(msg.str());
    }
  }

  DiscreteGraphField out;
  out.k = k;
  const std::size_t nb = net.Size();
  std::vector<std::size_t> offset(nb);
  // Unknown 0 is ybar; branch j owns y[1..N_j].
  std::size_t total = 1;
  for (std::size_t j = 0; j < nb; j++)
  {
    const Branch &b = net[j];
    const double len = b.IsInfinite() ? X_trunc : b.Tau();
    const auto n = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(len / dx - 1e-9)));
    DiscreteBranchField f;
    f.step = len / static_cast<double>(n);
    f.x.resize(n + 1);
    for (std::size_t i = 0; i <= n; i++)
    {
      f.x[i] = f.step * static_cast<double>(i);
    }
    offset[j] = total;
    total += n;
    out.branches.push_back(std::move(f));
  }

  std::vector<Eigen::Triplet<cplx>> trip;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total));
  const auto idx = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  std::size_t row = 1;
  // Row 0 is flux balance: sum_j A_j y_j'(0) - A_j' y_j(0) = 0.
  for (std::size_t j = 0; j < nb; j++)
  {
    const Branch &b = net[j];
    const DiscreteBranchField &f = out.branches[j];
    const std::size_t n = f.x.size() - 1;
    const double d = f.step;
    const OneSided w = OneSidedWeights(k, d);
    const double A = b.Geometry().A0, dA = b.Geometry().A0prime;
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; i++)
    {
      v[i] = b.Potential()(f.x[i]);
    }
    // Column of y_j[i]; y_j[0] = A ybar is folded into column 0.
    const auto col = [&](std::size_t i) { return i == 0 ? 0 : offset[j] + i - 1; };
    const auto scale0 = [&](std::size_t i) { return i == 0 ? A : 1.0; };

    // y'(0) = [y1 - (c + w0 V0) y0 - w1 V1 y1] / (sin/k)
    trip.emplace_back(0, idx(col(1)), A * (1.0 - w.w1 * v[1]) / w.s_over_k);
    trip.emplace_back(0, 0, A * (-(w.c + w.w0 * v[0]) * A / w.s_over_k) - dA * A);

    const double j0 = 2.0 * (w.w0 + w.w1);  // 2 (1 - cos kd) / k^2
    for (std::size_t i = 1; i < n; i++, row++)
    {
      trip.emplace_back(idx(row), idx(col(i - 1)), scale0(i - 1));
      trip.emplace_back(idx(row), idx(col(i)), -(2.0 * w.c + j0 * v[i]));
      trip.emplace_back(idx(row), idx(col(i + 1)), 1.0);
    }

    // y'(end) = [(c + w0 V_N) y_N - (1 - w1 V_{N-1}) y_{N-1}] / (sin/k), then the closure
    // y' - beta y = gamma.
    cplx beta, gamma = 0.0;
    if (j == 0)
    {
      beta = kI * k;
      gamma = -2.0 * kI * k * std::polar(1.0, -k * f.x[n]);
    }
    else if (b.IsInfinite())
    {
      beta = kI * k;
    }
    else
    {
      beta = b.H();
    }
    trip.emplace_back(idx(row), idx(col(n)), (w.c + w.w0 * v[n]) / w.s_over_k - beta);
    trip.emplace_back(idx(row), idx(col(n - 1)),
                      -scale0(n - 1) * (1.0 - w.w1 * v[n - 1]) / w.s_over_k);
    rhs(idx(row)) = gamma;
    row++;
  }

  Eigen::SparseMatrix<cplx> M(idx(total), idx(total));
  M.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success)
  {
    std::ostringstream msg;
    msg << "discrete graph system is singular at k=" << k;
    throw ResonanceError(msg.str());
  }
  const Eigen::VectorXcd u = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !u.allFinite())
  {
    std::ostringstream msg;
    msg << "discrete graph solve failed at k=" << k;
    throw ResonanceError(msg.str());
  }

  out.ybar = u(0);
  for (std::size_t j = 0; j < nb; j++)
  {
    DiscreteBranchField &f = out.branches[j];
    const std::size_t n = f.x.size() - 1;
    f.y.resize(n + 1);
    f.y[0] = net[j].Geometry().A0 * out.ybar;
    for (std::size_t i = 1; i <= n; i++)
    {
      f.y[i] = u(idx(offset[j] + i - 1));
    }
    if (!net[j].IsInfinite())
    {
      continue;
    }
    // Outside the potential the discrete field is an exact plane-wave pair; two samples
    // determine it.
    const double x0 = f.x[n - 1], x1 = f.x[n];
    const cplx e0 = std::polar(1.0, k * x0), e1 = std::polar(1.0, k * x1);
    // y = cm e^{-ikx} + cp e^{ikx}
    const cplx det = (1.0 / e0) * e1 - (1.0 / e1) * e0;
    const cplx cp = ((1.0 / e0) * f.y[n] - (1.0 / e1) * f.y[n - 1]) / det;
    if (j == 0)
    {
      out.R1_est = cp;
    }
    else
    {
      out.T_est.push_back(cp);
    }
  }
  return out;
}

}  // namespace starscatter
