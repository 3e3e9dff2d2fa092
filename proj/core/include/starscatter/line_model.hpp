#ifndef STARSCATTER_LINE_MODEL_HPP
#define STARSCATTER_LINE_MODEL_HPP

#include <complex>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "starscatter/numerics.hpp"
#include "starscatter/potential.hpp"

namespace starscatter
{

inline constexpr double kInfiniteLength = std::numeric_limits<double>::infinity();

enum class ProfileFamily
{
  Uniform,
  ExponentialTaper,
  SampledTable,
  DirectPotential
};

// Samples of one line parameter against the physical coordinate z.
struct ProfileTable
{
  std::vector<double> z;
  std::vector<double> value;
};

// Two-column (z, value) CSV with a header row.
ProfileTable ReadProfileTable(const std::filesystem::path &path);

// Geometry of a branch as seen by the node system. tau and h are present only for
// finite branches.
struct BranchGeometry
{
  double A0 = 1.0;       // (C/L)^{1/4} at the node
  double A0prime = 0.0;  // its x-derivative at the node
  std::optional<double> tau;
  std::optional<double> h;  // A'/A at the terminal end
};

//
// Per-branch inductance/capacitance description. Every family except DirectPotential
// describes L(z) and C(z) in the physical coordinate z; DirectPotential supplies the
// Schrodinger-form data (V, A0, A0', tau, h) directly in the Liouville coordinate.
//
class LineProfile
{
public:
  struct Uniform
  {
    double inductance;
    double capacitance;
  };
  // A(x) = a0 exp(gamma x) with constant propagation speed: sqrt(L C) = delay per metre.
  struct ExponentialTaper
  {
    double a0;
    double gamma;
    double delay;
  };
  struct SampledTable
  {
    numerics::CubicSpline inductance;
    numerics::CubicSpline capacitance;
    std::size_t samples;
  };
  struct DirectPotential
  {
    PotentialFn potential;
    BranchGeometry geometry;
  };

  // length may be kInfiniteLength.
  static LineProfile MakeUniform(double inductance, double capacitance, double length);
  // Finite branches only: an exponential taper has no limit at infinity.
  static LineProfile MakeExponentialTaper(double a0, double gamma, double delay, double length);
  // Splines L and C over their own z grids. For finite tables the length is the last common
  // z; for infinite tables the last sample is taken as the limit at infinity.
  static LineProfile MakeSampledTable(const ProfileTable &inductance,
                                      const ProfileTable &capacitance, bool infinite);
  // tau present means a finite branch of that travel time (h defaults to 0).
  static LineProfile MakeDirect(PotentialFn potential, double a0, double a0prime,
                                std::optional<double> tau = std::nullopt,
                                std::optional<double> h = std::nullopt);

  ProfileFamily Family() const;
  bool IsInfinite() const { return infinite_; }
  // Physical length (z units); kInfiniteLength for infinite branches. For infinite
  // tables, Horizon() is the last sample.
  double Length() const { return length_; }
  double Horizon() const { return horizon_; }

  // Not available for DirectPotential.
  double Inductance(double z) const;
  double Capacitance(double z) const;

  const auto &Params() const { return params_; }

private:
  LineProfile() = default;

  std::variant<Uniform, ExponentialTaper, SampledTable, DirectPotential> params_;
  bool infinite_ = false;
  double length_ = 0.0;
  double horizon_ = 0.0;
};

// x(z) = int_0^z sqrt(L C) du. For DirectPotential profiles z is already x.
double LiouvilleCoordinate(const LineProfile &profile, double z);

// Travel time of a finite branch.
double TravelTime(const LineProfile &profile);

// V(x) = A''(x)/A(x) with A = (C/L)^{1/4}. grid_step is the uniform x spacing used for
// sampled tables (ignored for analytic families).
PotentialFn PotentialFromProfile(const LineProfile &profile, double grid_step);

// A'(tau)/A(tau) at the terminal end of a finite branch.
double TerminalH(const LineProfile &profile);

// A(0), A'(0), tau and h of the profile.
BranchGeometry GeometryFromProfile(const LineProfile &profile);

// U = y / A.
std::complex<double> VoltageFromField(std::complex<double> y, double A);

}  // namespace starscatter

#endif  // STARSCATTER_LINE_MODEL_HPP
