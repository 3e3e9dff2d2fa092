#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include <starscatter/errors.hpp>
#include <starscatter/line_model.hpp>

namespace star_scatter_cli
{

using nlohmann::json;
namespace ss = starscatter;

namespace
{

std::string Join(const std::string &path, const std::string &key)
{
  return path.empty() ? key : path + "." + key;
}

const json &Require(const json &obj, const std::string &key, const std::string &path)
{
  if (!obj.is_object())
  {
    throw ConfigError(path, "expected an object");
  }
  const auto it = obj.find(key);
  if (it == obj.end())
  {
    throw ConfigError(Join(path, key), "missing required key");
  }
  return *it;
}

double Number(const json &obj, const std::string &key, const std::string &path)
{
  const json &v = Require(obj, key, path);
  if (!v.is_number())
  {
    throw ConfigError(Join(path, key), "expected a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d))
  {
    throw ConfigError(Join(path, key), "expected a finite number");
  }
  return d;
}

double NumberOr(const json &obj, const std::string &key, const std::string &path, double fallback)
{
  return obj.contains(key) ? Number(obj, key, path) : fallback;
}

std::string String(const json &obj, const std::string &key, const std::string &path)
{
  const json &v = Require(obj, key, path);
  if (!v.is_string())
  {
    throw ConfigError(Join(path, key), "expected a string");
  }
  return v.get<std::string>();
}

std::filesystem::path Resolve(const std::filesystem::path &base, const std::string &p)
{
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

// Columns z, L, C with a header row.
void ReadLcTable(const std::filesystem::path &file, const std::string &key, ss::ProfileTable &L,
                 ss::ProfileTable &C)
{
  std::ifstream in(file);
  if (!in)
  {
    throw ConfigError(key, "cannot open " + file.string());
  }
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line))
  {
    lineno++;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
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
    double z = 0.0, l = 0.0, c = 0.0;
    if (!(fields >> z >> l >> c))
    {
      std::ostringstream msg;
      msg << file.string() << ":" << lineno << ": expected columns z, L, C";
      throw ConfigError(key, msg.str());
    }
    L.z.push_back(z);
    L.value.push_back(l);
    C.z.push_back(z);
    C.value.push_back(c);
  }
}

ss::PotentialFn ParsePotential(const json &spec, const std::string &path,
                               const std::filesystem::path &base)
{
  const std::string shape = String(spec, "shape", path);
  if (shape == "zero")
  {
    return ss::PotentialFn::Zero();
  }
  if (shape == "gaussian")
  {
    const double amp = Number(spec, "amplitude", path);
    const double center = Number(spec, "center", path);
    const double width = Number(spec, "width", path);
    const double support = Number(spec, "support", path);
    if (!(width > 0.0))
    {
      throw ConfigError(Join(path, "width"), "must be positive");
    }
    return ss::PotentialFn(
      [=](double x)
      {
        const double t = (x - center) / width;
        return amp * std::exp(-t * t);
      },
      support);
  }
  if (shape == "bump")
  {
    // Smooth, compactly supported: amp * exp(1 - 1/(1 - t^2)) for |t| < 1.
    const double amp = Number(spec, "amplitude", path);
    const double center = Number(spec, "center", path);
    const double half = Number(spec, "half_width", path);
    if (!(half > 0.0))
    {
      throw ConfigError(Join(path, "half_width"), "must be positive");
    }
    if (center - half < 0.0)
    {
      throw ConfigError(Join(path, "center"), "bump extends below x = 0");
    }
    return ss::PotentialFn(
      [=](double x)
      {
        const double t = (x - center) / half;
        return std::abs(t) < 1.0 ? amp * std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
      },
      center + half);
  }
  if (shape == "square")
  {
    const double value = Number(spec, "value", path);
    const double start = NumberOr(spec, "start", path, 0.0);
    const double end = Number(spec, "end", path);
    if (!(start >= 0.0 && end > start))
    {
      throw ConfigError(Join(path, "end"), "need 0 <= start < end");
    }
    return ss::PotentialFn([=](double x) { return x >= start && x <= end ? value : 0.0; }, end);
  }
  if (shape == "table")
  {
    const std::string file = String(spec, "path", path);
    const ss::ProfileTable t = ss::ReadProfileTable(Resolve(base, file));
    return ss::PotentialFn::Table(t.z, t.value);
  }
  throw ConfigError(Join(path, "shape"), "unknown potential shape '" + shape +
                                           "' (expected zero, gaussian, bump, square, table)");
}

ss::Branch ParseBranch(const json &b, int id, const std::string &path,
                       const std::filesystem::path &base, double grid_step)
{
  const std::string kind = String(b, "kind", path);
  if (kind != "infinite" && kind != "finite")
  {
    throw ConfigError(Join(path, "kind"), "expected 'infinite' or 'finite'");
  }
  const bool infinite = kind == "infinite";
  const bool has_profile = b.contains("profile"), has_direct = b.contains("direct");
  if (has_profile == has_direct)
  {
    throw ConfigError(path, "exactly one of 'profile' or 'direct' is required");
  }

  if (has_direct)
  {
    const std::string dpath = Join(path, "direct");
    const json &d = b.at("direct");
    ss::PotentialFn v;
    if (d.contains("potential_table_path"))
    {
      const std::string file = String(d, "potential_table_path", dpath);
      const ss::ProfileTable t = ss::ReadProfileTable(Resolve(base, file));
      v = ss::PotentialFn::Table(t.z, t.value);
    }
    else if (d.contains("potential"))
    {
      v = ParsePotential(d.at("potential"), Join(dpath, "potential"), base);
    }
    const double A0 = NumberOr(d, "A0", dpath, 1.0);
    const double A0prime = NumberOr(d, "A0prime", dpath, 0.0);
    if (infinite)
    {
      for (const char *key : {"tau", "h"})
      {
        if (d.contains(key))
        {
          throw ConfigError(Join(dpath, key), "infinite branches carry no tau or h");
        }
      }
      return ss::Branch::Infinite(id, v, A0, A0prime);
    }
    const double tau = Number(d, "tau", dpath);
    if (!(tau > 0.0))
    {
      throw ConfigError(Join(dpath, "tau"), "must be positive");
    }
    return ss::Branch::Finite(id, v, tau, A0, A0prime, NumberOr(d, "h", dpath, 0.0));
  }

  const std::string ppath = Join(path, "profile");
  const json &p = b.at("profile");
  const std::string family = String(p, "family", ppath);
  double length = ss::kInfiniteLength;
  if (!infinite)
  {
    length = Number(p, "length", ppath);
  }
  else if (p.contains("length"))
  {
    throw ConfigError(Join(ppath, "length"), "infinite branches have no length");
  }
  const json empty = json::object();
  const json &params = p.contains("params") ? p.at("params") : empty;
  const std::string qpath = Join(ppath, "params");
  if (family == "uniform")
  {
    const auto profile = ss::LineProfile::MakeUniform(NumberOr(params, "inductance", qpath, 1.0),
                                                      NumberOr(params, "capacitance", qpath, 1.0),
                                                      length);
    return ss::Branch::FromProfile(id, profile, grid_step);
  }
  if (family == "exponential_taper")
  {
    if (infinite)
    {
      throw ConfigError(Join(ppath, "family"), "an exponential taper must be finite");
    }
    const auto profile = ss::LineProfile::MakeExponentialTaper(
      Number(params, "a0", qpath), Number(params, "gamma", qpath),
      NumberOr(params, "delay", qpath, 1.0), length);
    return ss::Branch::FromProfile(id, profile, grid_step);
  }
  if (family == "table")
  {
    const std::string tkey = Join(ppath, "table_path");
    ss::ProfileTable L, C;
    ReadLcTable(Resolve(base, String(p, "table_path", ppath)), tkey, L, C);
    if (!infinite && std::abs(L.z.empty() ? 0.0 : L.z.back() - length) > 1e-9 * length)
    {
      throw ConfigError(Join(ppath, "length"), "must equal the last z of the table");
    }
    const auto profile = ss::LineProfile::MakeSampledTable(L, C, infinite);
    return ss::Branch::FromProfile(id, profile, grid_step);
  }
  throw ConfigError(Join(ppath, "family"), "unknown family '" + family +
                                             "' (expected uniform, exponential_taper, table)");
}

ss::SolverOptions ParseSolver(const json &root)
{
  ss::SolverOptions o;
  if (!root.contains("solver"))
  {
    return o;
  }
  const json &s = root.at("solver");
  const std::string path = "solver";
  if (!s.is_object())
  {
    throw ConfigError(path, "expected an object");
  }
  o.k_floor = NumberOr(s, "k_floor", path, o.k_floor);
  o.ill_conditioned_threshold =
    NumberOr(s, "ill_conditioned_threshold", path, o.ill_conditioned_threshold);
  o.singular_threshold = NumberOr(s, "singular_threshold", path, o.singular_threshold);
  o.jost.rtol = NumberOr(s, "rtol", path, o.jost.rtol);
  o.jost.atol = NumberOr(s, "atol", path, o.jost.atol);
  o.jost.tail_tol = NumberOr(s, "tail_tol", path, o.jost.tail_tol);
  o.jost.steps_per_wavelength =
    NumberOr(s, "steps_per_wavelength", path, o.jost.steps_per_wavelength);
  if (!(o.k_floor > 0.0))
  {
    throw ConfigError("solver.k_floor", "must be positive");
  }
  if (!(o.jost.rtol > 0.0) || !(o.jost.atol > 0.0))
  {
    throw ConfigError("solver", "tolerances must be positive");
  }
  return o;
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string &what)
  : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key))
{
}

NetworkConfig ParseNetworkConfig(const std::string &text, const std::filesystem::path &base_dir)
{
  json root;
  try
  {
    root = json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    std::ostringstream msg;
    msg << "invalid JSON near byte " << e.byte;
    throw ConfigError("", msg.str());
  }
  if (!root.is_object())
  {
    throw ConfigError("", "top level must be an object");
  }
  const json &ver = Require(root, "schema_version", "");
  if (!ver.is_number_integer() || ver.get<int>() != kSchemaVersion)
  {
    throw ConfigError("schema_version", "unsupported (expected " +
                                          std::to_string(kSchemaVersion) + ")");
  }
  const double a5 = NumberOr(root, "a5_tolerance", "", 1e-9);
  if (!(a5 >= 0.0))
  {
    throw ConfigError("a5_tolerance", "must be non-negative");
  }
  const double grid_step = NumberOr(root, "table_grid_step", "", 1e-3);
  if (!(grid_step > 0.0))
  {
    throw ConfigError("table_grid_step", "must be positive");
  }
  ss::SolverOptions solver = ParseSolver(root);

  const json &arr = Require(root, "branches", "");
  if (!arr.is_array() || arr.empty())
  {
    throw ConfigError("branches", "expected a non-empty array");
  }
  std::vector<ss::Branch> branches;
  for (std::size_t i = 0; i < arr.size(); i++)
  {
    const std::string path = "branches[" + std::to_string(i) + "]";
    try
    {
      branches.push_back(ParseBranch(arr[i], static_cast<int>(i + 1), path, base_dir, grid_step));
    }
    catch (const ss::Error &e)
    {
      throw ConfigError(path, e.what());
    }
    catch (const json::exception &e)
    {
      throw ConfigError(path, e.what());
    }
  }
  try
  {
    return {ss::StarNetwork(std::move(branches), a5), solver, {}};
  }
  catch (const ss::Error &e)
  {
    throw ConfigError("branches", e.what());
  }
}

NetworkConfig LoadNetworkConfig(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("", "cannot open configuration " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  NetworkConfig cfg = ParseNetworkConfig(text.str(), path.parent_path());
  cfg.source = path;
  return cfg;
}

}  // namespace star_scatter_cli
