#include "starscatter/line_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "starscatter/errors.hpp"

namespace starscatter
{

namespace
{

constexpr double kLiouvilleTol = 1e-10;

template <class... Ts>
struct Overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void RequirePositive(double value, const char *what)
{
  if (!(value > 0.0) || !std::isfinite(value))
  {
    std::ostringstream msg;
    msg << what << " must be finite and strictly positive (got " << value << ")";
    throw ProfileError(msg.str());
  }
}

void ValidateTable(const ProfileTable &table, const char *what)
{
  if (table.z.size() != table.value.size())
  {
    throw ProfileError(std::string(what) + " table has mismatched column lengths");
  }
  if (table.z.size() < 5)
  {
    throw ResolutionError(std::string(what) +
                          " table needs at least 5 samples to estimate second derivatives");
  }
  if (table.z.front() != 0.0)
  {
    throw ProfileError(std::string(what) + " table must start at z = 0");
  }
  for (std::size_t i = 0; i < table.z.size(); i++)
  {
    if (i > 0 && !(table.z[i] > table.z[i - 1]))
    {
      throw ProfileError(std::string(what) + " table z values must be strictly increasing");
    }
    RequirePositive(table.value[i], what);
  }
}

// sqrt(L C) at z, checking positivity of both samples.
double LocalDelay(const LineProfile &profile, double z)
{
  const double l = profile.Inductance(z), c = profile.Capacitance(z);
  if (!(l > 0.0) || !(c > 0.0))
  {
    std::ostringstream msg;
    msg << "non-positive line parameter at z=" << z << " (L=" << l << ", C=" << c << ")";
    throw ProfileError(msg.str());
  }
  return std::sqrt(l * c);
}

// d(ln A)/dx at z for a sampled table: (1/sqrt(LC)) * (C'/C - L'/L) / 4.
double TableLogSlope(const LineProfile::SampledTable &t, double z)
{
  const double l = t.inductance(z), c = t.capacitance(z);
  const double dl = t.inductance.Derivative(z), dc = t.capacitance.Derivative(z);
  return 0.25 * (dc / c - dl / l) / std::sqrt(l * c);
}

// Inverts x(z) on [0, z_end] for a sampled-table profile at the requested x nodes.
std::vector<double> InvertLiouville(const LineProfile &profile, const std::vector<double> &xs,
                                    double z_end)
{
  const auto delay = [&profile](double z) { return LocalDelay(profile, z); };
  // Cumulative x at a fine z partition built from the spline knots.
  const auto &t = std::get<LineProfile::SampledTable>(profile.Params());
  std::vector<double> knots(t.inductance.Knots().begin(), t.inductance.Knots().end());
  knots.insert(knots.end(), t.capacitance.Knots().begin(), t.capacitance.Knots().end());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  knots.erase(std::remove_if(knots.begin(), knots.end(), [z_end](double z) { return z > z_end; }),
              knots.end());
  if (knots.back() < z_end)
  {
    knots.push_back(z_end);
  }
  std::vector<double> xk(knots.size(), 0.0);
  for (std::size_t i = 1; i < knots.size(); i++)
  {
    xk[i] = xk[i - 1] + numerics::AdaptiveSimpson(delay, knots[i - 1], knots[i],
                                                  kLiouvilleTol / knots.size());
  }

  std::vector<double> zs(xs.size());
  for (std::size_t n = 0; n < xs.size(); n++)
  {
    const double target = std::clamp(xs[n], 0.0, xk.back());
    auto it = std::upper_bound(xk.begin(), xk.end(), target);
    std::size_t i = static_cast<std::size_t>(std::distance(xk.begin(), it));
    i = std::clamp<std::size_t>(i, 1, xk.size() - 1) - 1;
    double lo = knots[i], hi = knots[i + 1];
    double z = lo + (hi - lo) * (target - xk[i]) / std::max(xk[i + 1] - xk[i], 1e-300);
    // Safeguarded Newton on x(z) - target, dx/dz = sqrt(LC).
    for (int iter = 0; iter < 60; iter++)
    {
      const double f =
        xk[i] + numerics::AdaptiveSimpson(delay, knots[i], z, 1e-13) - target;
      if (std::abs(f) < 1e-13)
      {
        break;
      }
      if (f > 0.0)
      {
        hi = z;
      }
      else
      {
        lo = z;
      }
      double next = z - f / delay(z);
      if (!(next > lo && next < hi))
      {
        next = 0.5 * (lo + hi);
      }
      z = next;
    }
    zs[n] = z;
  }
  return zs;
}

}  // namespace

ProfileTable ReadProfileTable(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ProfileError("cannot open profile table " + path.string());
  }
  ProfileTable table;
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line))
  {
    lineno++;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
    {
      continue;
    }
    if (header)
    {
      header = false;
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double z = 0.0, v = 0.0;
    if (!(fields >> z >> v))
    {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": expected two numeric columns";
      throw ProfileError(msg.str());
    }
    table.z.push_back(z);
    table.value.push_back(v);
  }
  return table;
}

LineProfile LineProfile::MakeUniform(double inductance, double capacitance, double length)
{
  RequirePositive(inductance, "inductance");
  RequirePositive(capacitance, "capacitance");
  if (!(length > 0.0))
  {
    throw ProfileError("line length must be positive");
  }
  LineProfile p;
  p.params_ = Uniform{inductance, capacitance};
  p.infinite_ = std::isinf(length);
  p.length_ = length;
  p.horizon_ = p.infinite_ ? 0.0 : length;
  return p;
}

LineProfile LineProfile::MakeExponentialTaper(double a0, double gamma, double delay,
                                              double length)
{
  RequirePositive(a0, "taper amplitude a0");
  RequirePositive(delay, "taper delay per unit length");
  if (!std::isfinite(gamma))
  {
    throw ProfileError("taper rate gamma must be finite");
  }
  if (!(length > 0.0) || std::isinf(length))
  {
    throw ProfileError("an exponential taper needs a finite positive length "
                       "(L and C have no limit at infinity)");
  }
  LineProfile p;
  p.params_ = ExponentialTaper{a0, gamma, delay};
  p.infinite_ = false;
  p.length_ = length;
  p.horizon_ = length;
  return p;
}

LineProfile LineProfile::MakeSampledTable(const ProfileTable &inductance,
                                          const ProfileTable &capacitance, bool infinite)
{
  ValidateTable(inductance, "inductance");
  ValidateTable(capacitance, "capacitance");
  LineProfile p;
  const double end = std::min(inductance.z.back(), capacitance.z.back());
  p.params_ = SampledTable{numerics::CubicSpline(inductance.z, inductance.value),
                           numerics::CubicSpline(capacitance.z, capacitance.value),
                           std::min(inductance.z.size(), capacitance.z.size())};
  p.infinite_ = infinite;
  p.length_ = infinite ? kInfiniteLength : end;
  p.horizon_ = end;
  return p;
}

LineProfile LineProfile::MakeDirect(PotentialFn potential, double a0, double a0prime,
                                    std::optional<double> tau, std::optional<double> h)
{
  RequirePositive(a0, "A0");
  if (!std::isfinite(a0prime))
  {
    throw ProfileError("A0prime must be finite");
  }
  LineProfile p;
  BranchGeometry g{a0, a0prime, std::nullopt, std::nullopt};
  if (tau)
  {
    RequirePositive(*tau, "tau");
    g.tau = tau;
    g.h = h.value_or(0.0);
    p.infinite_ = false;
    p.length_ = *tau;
    p.horizon_ = *tau;
    if (!potential.IsZero() && potential.SupportEnd() > *tau)
    {
      potential = potential.Restricted(*tau);
    }
  }
  else
  {
    p.infinite_ = true;
    p.length_ = kInfiniteLength;
    p.horizon_ = potential.SupportEnd();
  }
  p.params_ = DirectPotential{std::move(potential), g};
  return p;
}

ProfileFamily LineProfile::Family() const
{
  return static_cast<ProfileFamily>(params_.index());
}

double LineProfile::Inductance(double z) const
{
  return std::visit(
    Overloaded{[](const Uniform &u) { return u.inductance; },
               [z](const ExponentialTaper &e)
               {
                 const double a = e.a0 * std::exp(e.gamma * e.delay * z);
                 return e.delay / (a * a);
               },
               [this, z](const SampledTable &t) { return t.inductance(std::min(z, horizon_)); },
               [](const DirectPotential &) -> double
               { throw DomainError("direct-potential profiles carry no L(z)"); }},
    params_);
}

double LineProfile::Capacitance(double z) const
{
  return std::visit(
    Overloaded{[](const Uniform &u) { return u.capacitance; },
               [z](const ExponentialTaper &e)
               {
                 const double a = e.a0 * std::exp(e.gamma * e.delay * z);
                 return e.delay * a * a;
               },
               [this, z](const SampledTable &t)
               { return t.capacitance(std::min(z, horizon_)); },
               [](const DirectPotential &) -> double
               { throw DomainError("direct-potential profiles carry no C(z)"); }},
    params_);
}

double LiouvilleCoordinate(const LineProfile &profile, double z)
{
  if (z < 0.0 || z > profile.Length())
  {
    std::ostringstream msg;
    msg << "z=" << z << " outside the line [0, " << profile.Length() << "]";
    throw DomainError(msg.str());
  }
  switch (profile.Family())
  {
    case ProfileFamily::DirectPotential:
      return z;
    case ProfileFamily::Uniform:
      return LocalDelay(profile, 0.0) * z;
    default:
      break;
  }
  const double zq = std::min(z, profile.IsInfinite() ? profile.Horizon() : z);
  double x = numerics::AdaptiveSimpson([&profile](double u) { return LocalDelay(profile, u); },
                                       0.0, zq, kLiouvilleTol);
  if (z > zq)
  {
    // Constant continuation beyond the last table sample.
    x += (z - zq) * LocalDelay(profile, zq);
  }
  return x;
}

double TravelTime(const LineProfile &profile)
{
  if (profile.IsInfinite())
  {
    throw DomainError("travel time is undefined for an infinite branch");
  }
  if (profile.Family() == ProfileFamily::DirectPotential)
  {
    return *std::get<LineProfile::DirectPotential>(profile.Params()).geometry.tau;
  }
  return LiouvilleCoordinate(profile, profile.Length());
}

PotentialFn PotentialFromProfile(const LineProfile &profile, double grid_step)
{
  switch (profile.Family())
  {
    case ProfileFamily::Uniform:
      return PotentialFn::Zero();
    case ProfileFamily::ExponentialTaper:
    {
      const auto &e = std::get<LineProfile::ExponentialTaper>(profile.Params());
      return PotentialFn::Constant(e.gamma * e.gamma, TravelTime(profile));
    }
    case ProfileFamily::DirectPotential:
      return std::get<LineProfile::DirectPotential>(profile.Params()).potential;
    case ProfileFamily::SampledTable:
      break;
  }

  if (!(grid_step > 0.0))
  {
    throw ResolutionError("grid step must be positive");
  }
  const double z_end = profile.Horizon();
  const double x_end = LiouvilleCoordinate(profile, z_end);
  const auto intervals =
    std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(x_end / grid_step - 1e-9)));
  std::vector<double> xs(intervals + 1);
  for (std::size_t i = 0; i <= intervals; i++)
  {
    xs[i] = x_end * static_cast<double>(i) / static_cast<double>(intervals);
  }
  const std::vector<double> zs = InvertLiouville(profile, xs, z_end);
  std::vector<double> amp(xs.size());
  for (std::size_t i = 0; i < xs.size(); i++)
  {
    amp[i] = std::pow(profile.Capacitance(zs[i]) / profile.Inductance(zs[i]), 0.25);
  }
  auto spline = std::make_shared<const numerics::CubicSpline>(xs, std::move(amp));
  return PotentialFn([spline](double x) { return spline->SecondDerivative(x) / (*spline)(x); },
                     x_end);
}

double TerminalH(const LineProfile &profile)
{
  if (profile.IsInfinite())
  {
    throw DomainError("terminal coefficient h is defined only for finite branches");
  }
  return *GeometryFromProfile(profile).h;
}

BranchGeometry GeometryFromProfile(const LineProfile &profile)
{
  BranchGeometry g;
  switch (profile.Family())
  {
    case ProfileFamily::Uniform:
    {
      const auto &u = std::get<LineProfile::Uniform>(profile.Params());
      g.A0 = std::pow(u.capacitance / u.inductance, 0.25);
      g.A0prime = 0.0;
      if (!profile.IsInfinite())
      {
        g.tau = TravelTime(profile);
        g.h = 0.0;
      }
      return g;
    }
    case ProfileFamily::ExponentialTaper:
    {
      const auto &e = std::get<LineProfile::ExponentialTaper>(profile.Params());
      g.A0 = e.a0;
      g.A0prime = e.a0 * e.gamma;
      g.tau = TravelTime(profile);
      g.h = e.gamma;
      return g;
    }
    case ProfileFamily::SampledTable:
    {
      const auto &t = std::get<LineProfile::SampledTable>(profile.Params());
      g.A0 = std::pow(t.capacitance(0.0) / t.inductance(0.0), 0.25);
      g.A0prime = g.A0 * TableLogSlope(t, 0.0);
      if (!profile.IsInfinite())
      {
        g.tau = TravelTime(profile);
        g.h = TableLogSlope(t, profile.Length());
      }
      return g;
    }
    case ProfileFamily::DirectPotential:
      return std::get<LineProfile::DirectPotential>(profile.Params()).geometry;
  }
  return g;
}

std::complex<double> VoltageFromField(std::complex<double> y, double A)
{
  return y / A;
}

}  // namespace starscatter
