#include "commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <starscatter/errors.hpp>
#include <starscatter/fundamental.hpp>
#include <starscatter/inversion.hpp>
#include <starscatter/oracle.hpp>
#include <starscatter/scattering.hpp>

#include "config.hpp"
#include "reflectogram_csv.hpp"

namespace star_scatter_cli
{

namespace ss = starscatter;
using nlohmann::json;

namespace
{

constexpr double kFluxTolerance = 1e-8;
constexpr double kNodeTolerance = 1e-10;
constexpr double kWronskianTolerance = 1e-8;
constexpr double kOracleTolerance = 1e-3;
constexpr double kOracleStep = 1e-3;
constexpr double kOracleFloor = 1e-6;
constexpr double kKernelTolerance = 1e-6;

std::vector<double> BuildGrid(double k_min, double k_max, double dk)
{
  const auto n = static_cast<std::size_t>(std::floor((k_max - k_min) / dk + 1e-9));
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; i++)
  {
    grid[i] = k_min + dk * static_cast<double>(i);
  }
  return grid;
}

// Solves at k, nudging k upwards past resonances.
ss::ScatteringCoefficients SolveNear(const ss::StarNetwork &net, double k,
                                     const ss::SolverOptions &opts)
{
  for (int attempt = 0;; attempt++)
  {
    try
    {
      return ss::SolveScattering(net, k + 0.013 * attempt, opts);
    }
    catch (const ss::ResonanceError &)
    {
      if (attempt == 4)
      {
        throw;
      }
    }
  }
}

struct Check
{
  std::string name;
  bool pass = false;
  std::string detail;
};

std::string Sci(double v)
{
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

Check FluxCheck(const ss::StarNetwork &net, const ss::SolverOptions &opts)
{
  double worst = 0.0;
  for (int i = 0; i < 10; i++)
  {
    const ss::ScatteringCoefficients c = SolveNear(net, 5.1234 + 10.5 * i, opts);
    worst = std::max(worst, std::abs(ss::FluxDefect(c)));
  }
  return {"flux_conservation", worst <= kFluxTolerance,
          "max ||R1|^2 + sum |T|^2 - 1| = " + Sci(worst)};
}

Check NodeCheck(const ss::StarNetwork &net, const ss::SolverOptions &opts)
{
  double worst = 0.0;
  for (const double k : {7.77, 31.3, 77.1})
  {
    const ss::ScatteringCoefficients c = SolveNear(net, k, opts);
    const ss::NodeResiduals r = ss::CheckNodeConditions(net, c, opts);
    worst = std::max({worst, r.max_continuity, r.flux});
  }
  return {"node_conditions", worst <= kNodeTolerance, "max relative residual " + Sci(worst)};
}

Check WronskianCheck(const ss::StarNetwork &net, const ss::SolverOptions &opts)
{
  double worst = 0.0;
  for (const double k : {6.1, 23.7, 58.9})
  {
    const ss::ScatteringCoefficients c = SolveNear(net, k, opts);
    for (std::size_t j = 0; j < net.Size(); j++)
    {
      const ss::Branch &b = net[j];
      double len = b.IsInfinite() ? std::max(1.0, b.Potential().IsZero()
                                                    ? 0.0
                                                    : b.Potential().SupportEnd())
                                  : b.Tau();
      std::vector<double> xs(10);
      for (std::size_t i = 0; i < xs.size(); i++)
      {
        xs[i] = len * static_cast<double>(i) / 9.0;
      }
      const std::vector<ss::cplx> w = ss::BranchWronskian(net, c, j, xs, opts);
      double scale = 0.0, spread = 0.0;
      for (const ss::cplx &v : w)
      {
        scale = std::max(scale, std::abs(v));
        spread = std::max(spread, std::abs(v - w.front()));
      }
      if (scale > 0.0)
      {
        worst = std::max(worst, spread / scale);
      }
    }
  }
  return {"wronskian_constancy", worst <= kWronskianTolerance,
          "max relative variation " + Sci(worst)};
}

Check OracleCheck(const ss::StarNetwork &net, const ss::SolverOptions &opts)
{
  const double X = std::max(net.MaxInfiniteSupport(), 0.0) + 0.5;
  double worst = 0.0;
  for (const double k : {10.0, 20.0, 40.0})
  {
    const ss::ScatteringCoefficients c = SolveNear(net, k, opts);
    const ss::DiscreteGraphField o = ss::OracleSolve(net, c.k, kOracleStep, X);
    worst = std::max(worst, std::abs(c.R1 - o.R1_est) / (std::abs(o.R1_est) + kOracleFloor));
  }
  return {"oracle_comparison", worst <= kOracleTolerance,
          "max relative |R1 - R1_fd| = " + Sci(worst) + " at dx = " + Sci(kOracleStep)};
}

Check KernelCheck(const ss::StarNetwork &net, const ss::SolverOptions &opts)
{
  if (net.FiniteCount() == 0)
  {
    return {"kernel_vs_ivp", true, "no finite branches"};
  }
  double worst = 0.0;
  for (std::size_t j = net.InfiniteCount(); j < net.Size(); j++)
  {
    const ss::Branch &b = net[j];
    const ss::KernelTable K = ss::SolveKernel(b.TerminalPotential(), b.Tau());
    for (const double k : {5.0, 20.0, 50.0})
    {
      const ss::FundamentalData ivp = ss::FundamentalAt(b.TerminalPotential(), b.Tau(), -b.H(), k,
                                                        opts.jost);
      worst = std::max(worst,
                       std::abs(ss::FundamentalViaKernel(K, -b.H(), k, b.Tau()) - ivp.omega_tau));
    }
  }
  return {"kernel_vs_ivp", worst <= kKernelTolerance, "max |omega_kernel - omega_ivp| = " +
                                                        Sci(worst)};
}

}  // namespace

int RunForward(const ForwardArgs &args, std::ostream &log)
{
  const NetworkConfig cfg = LoadNetworkConfig(args.config);
  if (!(args.dk > 0.0) || !(args.k_max >= args.k_min))
  {
    log << "error: need dk > 0 and kmax >= kmin\n";
    return kExitConfig;
  }
  if (args.k_min < cfg.solver.k_floor)
  {
    log << "error: kmin " << args.k_min << " is below the solver floor " << cfg.solver.k_floor
        << '\n';
    return kExitConfig;
  }
  const std::vector<double> grid = BuildGrid(args.k_min, args.k_max, args.dk);
  std::vector<ss::ReflectogramEntry> rows;
  try
  {
    rows = ss::Reflectogram(cfg.network, grid, cfg.solver, args.threads);
  }
  catch (const ss::Error &e)
  {
    log << "error: solver failure: " << e.what() << '\n';
    return kExitSolver;
  }

  std::ofstream out(args.out);
  if (!out)
  {
    log << "error: cannot write " << args.out.string() << '\n';
    return kExitSolver;
  }
  WriteForwardCsv(out, rows, cfg.network.InfiniteCount() - 1);
  if (args.plot)
  {
    std::ofstream plot(*args.plot);
    if (!plot)
    {
      log << "error: cannot write " << args.plot->string() << '\n';
      return kExitSolver;
    }
    WritePlotCsv(plot, rows);
  }
  const auto gaps = std::count_if(rows.begin(), rows.end(),
                                  [](const ss::ReflectogramEntry &r) { return r.IsGap(); });
  const auto ill = std::count_if(rows.begin(), rows.end(), [](const ss::ReflectogramEntry &r)
                                 { return !r.IsGap() && r.coefficients->ill_conditioned; });
  if (gaps > 0)
  {
    log << "warning: " << gaps << " resonant frequencies written as NaN rows\n";
  }
  if (ill > 0)
  {
    log << "warning: " << ill << " frequencies had an ill-conditioned node system\n";
  }
  return kExitOk;
}

int RunInvert(const InvertArgs &args, std::ostream &out, std::ostream &log)
{
  ReflectogramTable table;
  try
  {
    table = ReadReflectogramCsv(args.csv);
  }
  catch (const CsvError &e)
  {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  ss::InversionReport rep;
  try
  {
    rep = ss::EstimateTaus(table.samples, args.max_n);
  }
  catch (const ss::InsufficientDataError &e)
  {
    log << "error: insufficient samples: " << e.what() << '\n';
    return kExitInsufficientData;
  }
  catch (const ss::Error &e)
  {
    log << "error: " << e.what() << '\n';
    return kExitSolver;
  }

  json fits = json::array();
  for (const ss::SpacingFit &f : rep.fits)
  {
    fits.push_back({{"tau", f.tau},
                    {"spacing", f.spacing},
                    {"offset", f.offset},
                    {"rms_residual", f.rms_residual},
                    {"pole_count", f.poles.size()}});
  }
  const json report = {
    {"m_hat", rep.m_hat},
    {"taus", rep.taus},
    {"poles", rep.poles},
    {"diagnostics",
     {{"samples", table.samples.size()},
      {"gap_rows", table.gap_rows},
      {"m_samples_used", rep.m_samples_used},
      {"m_median", rep.m_estimate.median},
      {"m_mad", rep.m_estimate.mad},
      {"grid_step", rep.grid_step},
      {"fits", fits},
      {"unassigned_poles", rep.unassigned_poles},
      {"degenerate", rep.degenerate},
      {"warnings", rep.warnings}}}};
  std::ofstream file(args.out);
  if (!file)
  {
    log << "error: cannot write " << args.out.string() << '\n';
    return kExitSolver;
  }
  file << report.dump(2) << '\n';

  for (const std::string &w : rep.warnings)
  {
    log << "warning: " << w << '\n';
  }
  std::ostringstream taus;
  taus.precision(6);
  for (std::size_t i = 0; i < rep.taus.size(); i++)
  {
    taus << (i ? ", " : "") << rep.taus[i];
  }
  out << "m_hat=" << rep.m_hat << " taus=[" << taus.str() << "] poles=" << rep.poles.size()
      << " samples=" << table.samples.size() << '\n';
  return kExitOk;
}

int RunValidate(const std::filesystem::path &config, std::ostream &out, std::ostream &log)
{
  const NetworkConfig cfg = LoadNetworkConfig(config);
  using Runner = std::function<Check(const ss::StarNetwork &, const ss::SolverOptions &)>;
  const std::array<std::pair<const char *, Runner>, 5> battery{{
    {"flux_conservation", FluxCheck},
    {"node_conditions", NodeCheck},
    {"wronskian_constancy", WronskianCheck},
    {"oracle_comparison", OracleCheck},
    {"kernel_vs_ivp", KernelCheck},
  }};
  std::vector<std::string> failed;
  for (const auto &[name, run] : battery)
  {
    Check c;
    try
    {
      c = run(cfg.network, cfg.solver);
    }
    catch (const ss::Error &e)
    {
      c = {name, false, std::string("aborted: ") + e.what()};
    }
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    if (!c.pass)
    {
      failed.push_back(c.name);
    }
  }
  if (!failed.empty())
  {
    log << "validation failed:";
    for (const std::string &f : failed)
    {
      log << ' ' << f;
    }
    log << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace star_scatter_cli
