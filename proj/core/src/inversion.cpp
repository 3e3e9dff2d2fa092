#include "starscatter/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <sstream>

#include "starscatter/errors.hpp"

namespace starscatter
{

namespace
{

double Median(std::vector<double> v)
{
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
  const double hi = v[n / 2];
  if (n % 2 == 1)
  {
    return hi;
  }
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2)));
}

double GridStep(std::span<const ReflectogramSample> samples)
{
  std::vector<double> d;
  d.reserve(samples.size());
  for (std::size_t i = 1; i < samples.size(); i++)
  {
    d.push_back(samples[i].k - samples[i - 1].k);
  }
  return d.empty() ? 0.0 : Median(std::move(d));
}

// Root of the polynomial through (x[i], y[i]) inside [lo, hi], where the interpolant
// changes sign.
double BisectInterpolant(const std::vector<double> &x, const std::vector<double> &y, double lo,
                         double hi)
{
  const auto p = [&](double t)
  {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); i++)
    {
      double l = y[i];
      for (std::size_t j = 0; j < x.size(); j++)
      {
        if (j != i)
        {
          l *= (t - x[j]) / (x[i] - x[j]);
        }
      }
      s += l;
    }
    return s;
  };
  double flo = p(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); it++)
  {
    const double mid = 0.5 * (lo + hi);
    const double fm = p(mid);
    if (fm == 0.0)
    {
      return mid;
    }
    if ((fm < 0.0) == (flo < 0.0))
    {
      lo = mid;
      flo = fm;
    }
    else
    {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Chain
{
  std::vector<std::size_t> members;  // indices into the pole list
  std::vector<double> steps;         // cumulative progression index
};

Chain LongestChain(const std::vector<double> &poles, double spacing, double tol)
{
  Chain best;
  for (std::size_t start = 0; start < poles.size(); start++)
  {
    Chain c;
    c.members.push_back(start);
    c.steps.push_back(0.0);
    double last = poles[start];
    double index = 0.0;
    for (;;)
    {
      bool extended = false;
      for (int q = 1; q <= 3 && !extended; q++)
      {
        const double target = last + q * spacing;
        const auto it = std::lower_bound(poles.begin(), poles.end(), target - tol);
        if (it != poles.end() && *it <= target + tol)
        {
          // Nearest candidate inside the window.
          auto pick = it;
          for (auto jt = it; jt != poles.end() && *jt <= target + tol; ++jt)
          {
            if (std::abs(*jt - target) < std::abs(*pick - target))
            {
              pick = jt;
            }
          }
          index += q;
          last = *pick;
          c.members.push_back(static_cast<std::size_t>(pick - poles.begin()));
          c.steps.push_back(index);
          extended = true;
        }
      }
      if (!extended)
      {
        break;
      }
    }
    if (c.members.size() > best.members.size())
    {
      best = std::move(c);
    }
  }
  return best;
}

}  // namespace

cplx HighFreqReflection(int m, std::span<const double> taus, double k, SignConvention convention)
{
  if (m < 1)
  {
    throw DomainError("closed-form reflection needs m >= 1");
  }
  double S = 0.0;
  for (const double tau : taus)
  {
    const double c = std::cos(k * tau);
    if (std::abs(c) < 1e-9)
    {
      std::ostringstream msg;
      msg << "k=" << k << " is at a pole of tan(k tau) for tau=" << tau;
      throw PoleError(msg.str());
    }
    S += std::sin(k * tau) / c;
  }
  if (convention == SignConvention::Printed)
  {
    S = -S;
  }
  const double md = static_cast<double>(m);
  return cplx(-(md - 2.0), S) / cplx(md, -S);
}

double PoleIndicator(cplx R1)
{
  return 2.0 * (1.0 / (1.0 + R1)).imag();
}

MEstimate EstimateM(std::span<const ReflectogramSample> samples, double min_modulus,
                    std::size_t min_samples)
{
  std::vector<double> vals;
  vals.reserve(samples.size());
  for (const ReflectogramSample &s : samples)
  {
    const cplx d = 1.0 + s.R1;
    if (std::isfinite(d.real()) && std::isfinite(d.imag()) && std::abs(d) > min_modulus)
    {
      vals.push_back(2.0 * (1.0 / d).real());
    }
  }
  if (vals.size() < min_samples)
  {
    std::ostringstream msg;
    msg << "only " << vals.size() << " samples with |1 + R1| > " << min_modulus << " (need "
        << min_samples << ")";
    throw InsufficientDataError(msg.str());
  }
  MEstimate e;
  e.retained = vals.size();
  e.median = Median(vals);
  std::vector<double> dev(vals.size());
  std::transform(vals.begin(), vals.end(), dev.begin(),
                 [&](double v) { return std::abs(v - e.median); });
  e.mad = Median(std::move(dev));
  e.m_hat = static_cast<int>(std::lround(e.median));
  return e;
}

std::vector<double> DetectPoles(std::span<const ReflectogramSample> samples, double threshold)
{
  std::vector<double> poles;
  if (samples.size() < 2)
  {
    return poles;
  }
  const double dk = GridStep(samples);
  std::vector<double> g(samples.size());
  for (std::size_t i = 0; i < samples.size(); i++)
  {
    g[i] = PoleIndicator(samples[i].R1);
  }
  const auto usable = [&](std::size_t i) { return std::isfinite(g[i]) && g[i] != 0.0; };
  const auto adjacent = [&](std::size_t i)
  { return samples[i + 1].k - samples[i].k <= 1.5 * dk; };

  for (std::size_t i = 0; i + 1 < samples.size(); i++)
  {
    if (!usable(i) || !usable(i + 1) || !adjacent(i))
    {
      continue;
    }
    if ((g[i] < 0.0) == (g[i + 1] < 0.0))
    {
      continue;
    }
    if (std::max(std::abs(g[i]), std::abs(g[i + 1])) <= threshold)
    {
      continue;
    }
    // 1/g is smooth through a pole of g; interpolate it on up to four neighbours.
    std::vector<double> x{samples[i].k, samples[i + 1].k};
    std::vector<double> y{1.0 / g[i], 1.0 / g[i + 1]};
    if (i > 0 && usable(i - 1) && adjacent(i - 1) && i + 2 < samples.size() && usable(i + 2) &&
        adjacent(i + 1))
    {
      x.insert(x.begin(), samples[i - 1].k);
      y.insert(y.begin(), 1.0 / g[i - 1]);
      x.push_back(samples[i + 2].k);
      y.push_back(1.0 / g[i + 2]);
    }
    poles.push_back(BisectInterpolant(x, y, samples[i].k, samples[i + 1].k));
  }
  return poles;
}

std::vector<SpacingFit> ClusterPoles(std::vector<double> poles, std::size_t max_families,
                                     double grid_step, std::size_t min_family_size)
{
  std::vector<SpacingFit> fits;
  std::sort(poles.begin(), poles.end());
  const double w = 2.0 * grid_step;
  if (!(w > 0.0))
  {
    throw DomainError("pole clustering needs a positive grid step");
  }
  min_family_size = std::max<std::size_t>(min_family_size, 2);

  while (fits.size() < max_families && poles.size() >= min_family_size)
  {
    // Pairwise differences short enough for a chain of min_family_size poles, with slack for
    // an evenly spaced chain whose refined poles jitter by a fraction of the grid step.
    const double span = poles.back() - poles.front();
    const double max_diff =
      span / static_cast<double>(min_family_size - 1) + std::max(2.0 * w, 0.01 * span);
    const auto nbins = static_cast<std::size_t>(std::floor(max_diff / w)) + 1;
    std::vector<double> count(nbins + 2, 0.0);
    for (std::size_t i = 0; i < poles.size(); i++)
    {
      for (std::size_t j = i + 1; j < poles.size(); j++)
      {
        const double d = poles[j] - poles[i];
        if (d > max_diff)
        {
          break;
        }
        count[static_cast<std::size_t>(std::floor(d / w)) + 1] += 1.0;
      }
    }
    std::vector<double> smooth(count.size(), 0.0);
    for (std::size_t b = 1; b + 1 < count.size(); b++)
    {
      smooth[b] = count[b - 1] + count[b] + count[b + 1];
    }
    const double peak = *std::max_element(smooth.begin(), smooth.end());
    if (peak < static_cast<double>(min_family_size - 1))
    {
      break;
    }
    // Smallest difference carrying at least half the peak count, moved to its local max.
    std::size_t b = 1;
    while (smooth[b] < 0.5 * peak)
    {
      b++;
    }
    while (b + 2 < smooth.size() && smooth[b + 1] > smooth[b])
    {
      b++;
    }
    const double lo = (static_cast<double>(b) - 2.0) * w, hi = (static_cast<double>(b) + 1.0) * w;
    double sum = 0.0, n = 0.0;
    for (std::size_t i = 0; i < poles.size(); i++)
    {
      for (std::size_t j = i + 1; j < poles.size(); j++)
      {
        const double d = poles[j] - poles[i];
        if (d > hi)
        {
          break;
        }
        if (d >= lo)
        {
          sum += d;
          n += 1.0;
        }
      }
    }
    const double spacing = sum / n;
    const double tol = std::max(2.0 * w, 0.01 * spacing);
    const Chain chain = LongestChain(poles, spacing, tol);
    if (chain.members.size() < min_family_size)
    {
      break;
    }

    // Least squares k_p = offset + spacing * index.
    const auto cnt = static_cast<double>(chain.members.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < chain.members.size(); i++)
    {
      const double x = chain.steps[i], y = poles[chain.members[i]];
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    SpacingFit fit;
    fit.spacing = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    fit.offset = (sy - fit.spacing * sx) / cnt;
    double ss = 0.0;
    for (std::size_t i = 0; i < chain.members.size(); i++)
    {
      const double r = poles[chain.members[i]] - (fit.offset + fit.spacing * chain.steps[i]);
      ss += r * r;
      fit.poles.push_back(poles[chain.members[i]]);
    }
    fit.rms_residual = std::sqrt(ss / cnt);
    fit.tau = std::numbers::pi / fit.spacing;
    fits.push_back(std::move(fit));

    std::vector<bool> taken(poles.size(), false);
    for (const std::size_t i : chain.members)
    {
      taken[i] = true;
    }
    std::vector<double> rest;
    for (std::size_t i = 0; i < poles.size(); i++)
    {
      if (!taken[i])
      {
        rest.push_back(poles[i]);
      }
    }
    poles.swap(rest);
  }
  return fits;
}

InversionReport EstimateTaus(std::span<const ReflectogramSample> samples,
                             std::size_t expected_max_n, const InversionOptions &opts)
{
  std::vector<ReflectogramSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ReflectogramSample &a, const ReflectogramSample &b) { return a.k < b.k; });
  for (const ReflectogramSample &s : sorted)
  {
    if (!(s.k > 0.0))
    {
      throw DomainError("reflectogram samples need k > 0");
    }
  }

  InversionReport rep;
  rep.m_estimate = EstimateM(sorted, opts.min_modulus, opts.min_samples);
  rep.m_hat = std::max(1, rep.m_estimate.m_hat);
  rep.m_samples_used = rep.m_estimate.retained;
  rep.grid_step = GridStep(sorted);

  rep.poles = DetectPoles(sorted, opts.pole_threshold);
  if (expected_max_n == 0)
  {
    rep.unassigned_poles = rep.poles;
    return rep;
  }
  if (rep.poles.empty())
  {
    rep.warnings.push_back("no poles found; the network has no finite branches or the grid is "
                           "too coarse");
    return rep;
  }
  rep.fits = ClusterPoles(rep.poles, expected_max_n, rep.grid_step, opts.min_family_size);
  std::sort(rep.fits.begin(), rep.fits.end(),
            [](const SpacingFit &a, const SpacingFit &b) { return a.tau < b.tau; });

  std::vector<double> assigned;
  for (const SpacingFit &f : rep.fits)
  {
    rep.taus.push_back(f.tau);
    assigned.insert(assigned.end(), f.poles.begin(), f.poles.end());
  }
  std::sort(assigned.begin(), assigned.end());
  std::set_difference(rep.poles.begin(), rep.poles.end(), assigned.begin(), assigned.end(),
                      std::back_inserter(rep.unassigned_poles));

  for (std::size_t i = 0; i < rep.fits.size(); i++)
  {
    for (std::size_t j = i + 1; j < rep.fits.size(); j++)
    {
      if (std::abs(rep.fits[i].spacing - rep.fits[j].spacing) <= 2.0 * rep.grid_step)
      {
        rep.degenerate = true;
        std::ostringstream msg;
        msg << "pole spacings " << rep.fits[i].spacing << " and " << rep.fits[j].spacing
            << " coincide within 2 dk; travel times may not be distinct";
        rep.warnings.push_back(msg.str());
      }
    }
  }
  if (rep.fits.empty())
  {
    rep.warnings.push_back("poles found but no arithmetic progression of at least " +
                           std::to_string(opts.min_family_size) + " poles");
  }
  return rep;
}

}  // namespace starscatter
