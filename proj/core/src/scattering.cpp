#include "starscatter/scattering.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "starscatter/errors.hpp"

namespace starscatter
{

namespace
{

constexpr cplx kI{0.0, 1.0};

void RequireFrequency(double k, const SolverOptions &opts)
{
  if (!(k >= opts.k_floor))
  {
    std::ostringstream msg;
    msg << "k=" << k << " is below the low-frequency floor " << opts.k_floor;
    throw DomainError(msg.str());
  }
}

}  // namespace

Branch Branch::Infinite(int id, PotentialFn potential, double A0, double A0prime)
{
  if (!(A0 > 0.0) || !std::isfinite(A0prime))
  {
    throw ProfileError("branch node coefficients need A0 > 0 and finite A0'");
  }
  Branch b;
  b.id_ = id;
  b.kind_ = BranchKind::Infinite;
  b.potential_ = std::move(potential);
  b.geometry_ = {A0, A0prime, std::nullopt, std::nullopt};
  return b;
}

Branch Branch::Finite(int id, PotentialFn potential, double tau, double A0, double A0prime,
                      double h)
{
  if (!(A0 > 0.0) || !std::isfinite(A0prime) || !std::isfinite(h))
  {
    throw ProfileError("branch node coefficients need A0 > 0 and finite A0', h");
  }
  if (!(tau > 0.0) || !std::isfinite(tau))
  {
    throw ProfileError("a finite branch needs a finite positive travel time");
  }
  Branch b;
  b.id_ = id;
  b.kind_ = BranchKind::Finite;
  if (!potential.IsZero() && potential.SupportEnd() > tau)
  {
    potential = potential.Restricted(tau);
  }
  b.potential_ = std::move(potential);
  b.terminal_potential_ = b.potential_.IsZero() ? PotentialFn::Zero() : b.potential_.Reversed(tau);
  b.geometry_ = {A0, A0prime, tau, h};
  return b;
}

Branch Branch::FromProfile(int id, const LineProfile &profile, double grid_step)
{
  PotentialFn v = PotentialFromProfile(profile, grid_step);
  const BranchGeometry g = GeometryFromProfile(profile);
  if (profile.IsInfinite())
  {
    return Infinite(id, std::move(v), g.A0, g.A0prime);
  }
  return Finite(id, std::move(v), *g.tau, g.A0, g.A0prime, *g.h);
}

StarNetwork::StarNetwork(std::vector<Branch> branches, double a5_tolerance)
  : branches_(std::move(branches)), a5_tolerance_(a5_tolerance)
{
  if (branches_.empty())
  {
    throw ProfileError("a network needs at least one branch");
  }
  if (!branches_.front().IsInfinite())
  {
    throw ProfileError("the measurement branch (first branch) must be infinite");
  }
  std::stable_partition(branches_.begin() + 1, branches_.end(),
                        [](const Branch &b) { return b.IsInfinite(); });
  m_ = static_cast<std::size_t>(
    std::count_if(branches_.begin(), branches_.end(), [](const Branch &b) { return b.IsInfinite(); }));

  const double ref = branches_.front().Geometry().A0;
  for (const Branch &b : branches_)
  {
    const double a0 = b.Geometry().A0;
    if (std::abs(a0 - ref) > a5_tolerance_ * ref)
    {
      std::ostringstream msg;
      msg << "L/C is discontinuous at the central node: branch " << b.Id() << " has A0=" << a0
          << " but the measurement branch has A0=" << ref << " (relative tolerance "
          << a5_tolerance_ << ")";
      throw ProfileError(msg.str());
    }
  }
}

double StarNetwork::MaxTau() const
{
  double t = 0.0;
  for (const Branch &b : branches_)
  {
    if (!b.IsInfinite())
    {
      t = std::max(t, b.Tau());
    }
  }
  return t;
}

double StarNetwork::MaxInfiniteSupport() const
{
  double s = 0.0;
  for (const Branch &b : branches_)
  {
    if (b.IsInfinite() && !b.Potential().IsZero())
    {
      s = std::max(s, b.Potential().SupportEnd());
    }
  }
  return s;
}

NodeBoundaryData ComputeBoundaryData(const StarNetwork &net, double k, const SolverOptions &opts)
{
  RequireFrequency(k, opts);
  NodeBoundaryData d;
  d.jost1 = JostAtOrigin(net[0].Potential(), k, opts.jost);
  d.value.assign(net.Size(), cplx(0.0));
  d.slope.assign(net.Size(), cplx(0.0));
  d.value[0] = d.jost1.f0;
  d.slope[0] = d.jost1.df0;
  for (std::size_t j = 1; j < net.Size(); j++)
  {
    const Branch &b = net[j];
    if (b.IsInfinite())
    {
      const JostData f = JostBoundary(b.Potential(), k, opts.jost);
      d.value[j] = f.f0;
      d.slope[j] = f.df0;
    }
    else
    {
      // y_j(x) = alpha_j omega(tau_j - x): the terminal condition y' = h y at x = tau_j
      // fixes omega'(0) = -h, and the node derivative picks up the chain-rule sign.
      const FundamentalData w = FundamentalAt(b.TerminalPotential(), b.Tau(), -b.H(), k, opts.jost);
      d.value[j] = w.omega_tau;
      d.slope[j] = -w.domega_tau;
    }
  }
  return d;
}

NodeSystem AssembleNodeSystem(const StarNetwork &net, double k, const SolverOptions &opts)
{
  NodeSystem sys;
  sys.boundary = ComputeBoundaryData(net, k, opts);
  const JostData &j1 = sys.boundary.jost1;
  if (std::abs(j1.a) < 1e-12)
  {
    std::ostringstream msg;
    msg << "a(k) vanishes on the measurement branch at k=" << k;
    throw ResonanceError(msg.str());
  }
  const std::size_t n = net.Size();
  const double A1 = net[0].Geometry().A0, dA1 = net[0].Geometry().A0prime;
  const cplx f1 = j1.f0, df1 = j1.df0;
  // y_1(0) = p0 + R f1, y_1'(0) = q0 + R f1'
  const cplx p0 = (1.0 - j1.b * f1) / j1.a;
  const cplx q0 = (-kI * k - j1.b * df1) / j1.a;
  // The flux row is O(k); rescale so the condition estimate reflects the coupling.
  const double flux_scale = 1.0 / std::max(k, 1.0);

  sys.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  sys.rhs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
  const auto last = static_cast<Eigen::Index>(n - 1);
  for (std::size_t j = 1; j < n; j++)
  {
    const auto r = static_cast<Eigen::Index>(j - 1);
    const auto c = static_cast<Eigen::Index>(j);
    const double Aj = net[j].Geometry().A0, dAj = net[j].Geometry().A0prime;
    sys.matrix(r, 0) = -f1 / A1;
    sys.matrix(r, c) = sys.boundary.value[j] / Aj;
    sys.rhs(r) = p0 / A1;
    sys.matrix(last, c) = flux_scale * (Aj * sys.boundary.slope[j] - dAj * sys.boundary.value[j]);
  }
  sys.matrix(last, 0) = flux_scale * (A1 * df1 - dA1 * f1);
  sys.rhs(last) = -flux_scale * (A1 * q0 - dA1 * p0);
  return sys;
}

ScatteringCoefficients SolveScattering(const StarNetwork &net, double k, const SolverOptions &opts)
{
  const NodeSystem sys = AssembleNodeSystem(net, k, opts);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.matrix);
  const double rcond = lu.rcond();
  const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(cond <= opts.singular_threshold))
  {
    std::ostringstream msg;
    msg << "node system is singular at k=" << k << " (condition estimate " << cond << ")";
    throw ResonanceError(msg.str());
  }
  const Eigen::VectorXcd u = lu.solve(sys.rhs);
  if (!u.allFinite())
  {
    std::ostringstream msg;
    msg << "node system produced non-finite coefficients at k=" << k;
    throw ResonanceError(msg.str());
  }

  ScatteringCoefficients c;
  c.k = k;
  c.R1 = u(0);
  const std::size_t m = net.InfiniteCount();
  for (std::size_t j = 1; j < net.Size(); j++)
  {
    (j < m ? c.T : c.alpha).push_back(u(static_cast<Eigen::Index>(j)));
  }
  const JostData &j1 = sys.boundary.jost1;
  c.ybar = ((1.0 - j1.b * j1.f0) / j1.a + c.R1 * j1.f0) / net[0].Geometry().A0;
  c.condition_number = cond;
  c.ill_conditioned = cond > opts.ill_conditioned_threshold;
  return c;
}

double FluxDefect(const ScatteringCoefficients &c)
{
  double s = std::norm(c.R1);
  for (const cplx &t : c.T)
  {
    s += std::norm(t);
  }
  return s - 1.0;
}

FieldState AssembleFieldState(const StarNetwork &net, const ScatteringCoefficients &c,
                              std::size_t branch, double x, const SolverOptions &opts)
{
  if (branch >= net.Size())
  {
    std::ostringstream msg;
    msg << "branch index " << branch << " out of range (network has " << net.Size()
        << " branches)";
    throw std::out_of_range(msg.str());
  }
  if (x < 0.0)
  {
    throw DomainError("field position must be non-negative");
  }
  const Branch &b = net[branch];
  const double k = c.k;
  if (branch == 0)
  {
    const JostData j1 = JostAtOrigin(b.Potential(), k, opts.jost);
    const FieldState ft = JostTildeSolution(b.Potential(), k, x, opts.jost);
    const FieldState f = JostSolution(b.Potential(), k, x, opts.jost);
    const cplx coef = c.R1 - j1.b / j1.a;
    return {ft.value / j1.a + coef * f.value, ft.derivative / j1.a + coef * f.derivative};
  }
  if (b.IsInfinite())
  {
    const cplx t = c.T.at(branch - 1);
    const FieldState f = JostSolution(b.Potential(), k, x, opts.jost);
    return {t * f.value, t * f.derivative};
  }
  if (x > b.Tau() * (1.0 + 1e-12))
  {
    std::ostringstream msg;
    msg << "x=" << x << " beyond the end of finite branch " << b.Id() << " (tau=" << b.Tau() << ")";
    throw DomainError(msg.str());
  }
  const cplx alpha = c.alpha.at(branch - net.InfiniteCount());
  const double s = std::max(b.Tau() - x, 0.0);
  const FieldState w = FundamentalSolution(b.TerminalPotential(), -b.H(), k, s, opts.jost);
  return {alpha * w.value, -alpha * w.derivative};
}

cplx AssembleField(const StarNetwork &net, const ScatteringCoefficients &c, std::size_t branch,
                   double x, const SolverOptions &opts)
{
  return AssembleFieldState(net, c, branch, x, opts).value;
}

NodeResiduals CheckNodeConditions(const StarNetwork &net, const ScatteringCoefficients &c,
                                  const SolverOptions &opts)
{
  NodeResiduals r;
  const double ybar_abs = std::max(std::abs(c.ybar), 1e-300);
  cplx flux = 0.0;
  double flux_scale = 0.0;
  for (std::size_t j = 0; j < net.Size(); j++)
  {
    const FieldState s = AssembleFieldState(net, c, j, 0.0, opts);
    const BranchGeometry &g = net[j].Geometry();
    r.max_continuity = std::max(r.max_continuity, std::abs(s.value / g.A0 - c.ybar) / ybar_abs);
    const cplx term_a = g.A0 * s.derivative, term_b = g.A0prime * s.value;
    flux += term_a - term_b;
    flux_scale = std::max({flux_scale, std::abs(term_a), std::abs(term_b)});
  }
  r.flux = std::abs(flux) / std::max(flux_scale, 1e-300);
  return r;
}

std::vector<cplx> BranchWronskian(const StarNetwork &net, const ScatteringCoefficients &c,
                                  std::size_t branch, std::span<const double> xs,
                                  const SolverOptions &opts)
{
  if (branch >= net.Size())
  {
    throw std::out_of_range("branch index out of range");
  }
  const Branch &b = net[branch];
  std::vector<cplx> w;
  w.reserve(xs.size());
  for (const double x : xs)
  {
    const FieldState y = AssembleFieldState(net, c, branch, x, opts);
    FieldState z;
    if (b.IsInfinite())
    {
      z = JostSolution(b.Potential(), c.k, x, opts.jost);
      if (branch != 0)
      {
        z = {std::conj(z.value), std::conj(z.derivative)};
      }
    }
    else
    {
      const FieldState s =
        Propagate(b.TerminalPotential(), c.k, 0.0, {0.0, 1.0}, std::max(b.Tau() - x, 0.0),
                  opts.jost);
      z = {s.value, -s.derivative};
    }
    w.push_back(y.value * z.derivative - y.derivative * z.value);
  }
  return w;
}

unsigned DefaultThreadCount()
{
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv("STAR_SCATTER_THREADS"))
  {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0)
    {
      n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
  }
  return n;
}

std::vector<ReflectogramEntry> Reflectogram(const StarNetwork &net, std::span<const double> k_grid,
                                            const SolverOptions &opts, unsigned threads)
{
  if (k_grid.empty())
  {
    throw DomainError("reflectogram needs a non-empty frequency grid");
  }
  for (std::size_t i = 0; i < k_grid.size(); i++)
  {
    RequireFrequency(k_grid[i], opts);
    if (i > 0 && !(k_grid[i] > k_grid[i - 1]))
    {
      throw DomainError("reflectogram frequency grid must be strictly increasing");
    }
  }

  std::vector<ReflectogramEntry> out(k_grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&]()
  {
    for (std::size_t i = next++; i < k_grid.size(); i = next++)
    {
      out[i].k = k_grid[i];
      try
      {
        out[i].coefficients = SolveScattering(net, k_grid[i], opts);
      }
      catch (const ResonanceError &e)
      {
        out[i].gap_reason = e.what();
      }
      catch (const NodeSingularityError &e)
      {
        out[i].gap_reason = e.what();
      }
      catch (...)
      {
        const std::lock_guard lock(failure_mutex);
        if (!failure)
        {
          failure = std::current_exception();
        }
        next = k_grid.size();
      }
    }
  };

  const unsigned workers =
    std::min<unsigned>(threads == 0 ? DefaultThreadCount() : threads,
                       static_cast<unsigned>(k_grid.size()));
  if (workers <= 1)
  {
    work();
  }
  else
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; t++)
    {
      pool.emplace_back(work);
    }
  }
  if (failure)
  {
    std::rethrow_exception(failure);
  }
  return out;
}

}  // namespace starscatter
