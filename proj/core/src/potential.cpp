#include "starscatter/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "starscatter/errors.hpp"
#include "starscatter/numerics.hpp"

namespace starscatter
{

namespace
{

constexpr double kQuadratureTol = 1e-10;

}  // namespace

PotentialFn::PotentialFn() : grid_{0.0}, cumulative_{0.0} {}

PotentialFn::PotentialFn(Evaluator v, double support_end, std::size_t tail_cells)
  : zero_(false), eval_(std::make_shared<const Evaluator>(std::move(v))),
    support_end_(support_end)
{
  if (!(support_end > 0.0) || !std::isfinite(support_end))
  {
    throw DomainError("potential support must be a finite positive interval");
  }
  if (tail_cells == 0)
  {
    tail_cells = static_cast<std::size_t>(std::ceil(support_end / 0.005));
    tail_cells = std::clamp<std::size_t>(tail_cells, 64, 4000);
  }
  const double h = support_end / static_cast<double>(tail_cells);
  const double cell_tol = kQuadratureTol / static_cast<double>(tail_cells);
  const auto &f = *eval_;
  const auto absv = [&f](double x) { return std::abs(f(x)); };
  const auto moment = [&f](double x) { return (1.0 + x) * std::abs(f(x)); };

  grid_.resize(tail_cells + 1);
  cumulative_.resize(tail_cells + 1);
  grid_[0] = 0.0;
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i <= tail_cells; i++)
  {
    grid_[i] = (i == tail_cells) ? support_end : h * static_cast<double>(i);
    const double cell = numerics::AdaptiveSimpson(absv, grid_[i - 1], grid_[i], cell_tol);
    cumulative_[i] = cumulative_[i - 1] + std::max(cell, 0.0);
    first_moment_ += numerics::AdaptiveSimpson(moment, grid_[i - 1], grid_[i], cell_tol);
  }
  l1_norm_ = cumulative_.back();
  if (!std::isfinite(l1_norm_) || !std::isfinite(first_moment_))
  {
    throw DomainError("potential is not integrable with weight (1 + x)");
  }
  zero_ = (l1_norm_ == 0.0);
}

PotentialFn PotentialFn::Constant(double value, double support_end)
{
  if (value == 0.0)
  {
    return {};
  }
  return PotentialFn([value](double) { return value; }, support_end);
}

PotentialFn PotentialFn::Table(std::vector<double> x, std::vector<double> v)
{
  if (x.size() < 2 || x.size() != v.size())
  {
    throw DomainError("potential table needs at least two (x, V) samples");
  }
  if (x.front() != 0.0)
  {
    throw DomainError("potential table must start at x = 0");
  }
  for (std::size_t i = 1; i < x.size(); i++)
  {
    if (!(x[i] > x[i - 1]))
    {
      throw DomainError("potential table abscissae must be strictly increasing");
    }
  }
  if (std::all_of(v.begin(), v.end(), [](double s) { return s == 0.0; }))
  {
    return {};
  }
  const double end = x.back();
  auto eval = [x = std::move(x), v = std::move(v)](double s)
  {
    const auto it = std::upper_bound(x.begin(), x.end(), s);
    if (it == x.begin())
    {
      return v.front();
    }
    if (it == x.end())
    {
      return v.back();
    }
    const auto i = static_cast<std::size_t>(std::distance(x.begin(), it)) - 1;
    const double t = (s - x[i]) / (x[i + 1] - x[i]);
    return (1.0 - t) * v[i] + t * v[i + 1];
  };
  return PotentialFn(std::move(eval), end);
}

double PotentialFn::operator()(double x) const
{
  if (zero_ || x < 0.0 || x > support_end_)
  {
    return 0.0;
  }
  return (*eval_)(x);
}

double PotentialFn::TailBound(double X) const
{
  if (zero_ || X >= support_end_)
  {
    return 0.0;
  }
  if (X <= 0.0)
  {
    return l1_norm_;
  }
  // Node at or below X: the tail from there dominates the tail from X.
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), X);
  const auto i = static_cast<std::size_t>(std::distance(grid_.begin(), it)) - 1;
  return std::max(l1_norm_ - cumulative_[i], 0.0);
}

double PotentialFn::CumulativeAbs(double x) const
{
  if (zero_ || x <= 0.0)
  {
    return 0.0;
  }
  if (x >= support_end_)
  {
    return l1_norm_;
  }
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const auto i = static_cast<std::size_t>(std::distance(grid_.begin(), it)) - 1;
  const auto &f = *eval_;
  return cumulative_[i] + numerics::AdaptiveSimpson([&f](double s) { return std::abs(f(s)); },
                                                    grid_[i], x, kQuadratureTol);
}

double PotentialFn::TruncationPoint(double tol) const
{
  if (zero_)
  {
    return 0.0;
  }
  for (std::size_t i = 0; i < grid_.size(); i++)
  {
    if (l1_norm_ - cumulative_[i] < tol)
    {
      return grid_[i];
    }
  }
  return support_end_;
}

PotentialFn PotentialFn::Reversed(double tau) const
{
  if (!(tau > 0.0))
  {
    throw DomainError("reversal length must be positive");
  }
  if (zero_)
  {
    return {};
  }
  auto src = eval_;
  const double end = support_end_;
  return PotentialFn(
    [src, tau, end](double x)
    {
      const double s = tau - x;
      return (s < 0.0 || s > end) ? 0.0 : (*src)(s);
    },
    tau);
}

PotentialFn PotentialFn::Restricted(double end) const
{
  if (zero_)
  {
    return {};
  }
  auto src = eval_;
  const double old_end = support_end_;
  return PotentialFn([src, old_end](double x) { return x > old_end ? 0.0 : (*src)(x); }, end);
}

}  // namespace starscatter
