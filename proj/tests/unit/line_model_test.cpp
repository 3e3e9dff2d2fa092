#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include <starscatter/errors.hpp>
#include <starscatter/line_model.hpp>

namespace ss = starscatter;
using ss::LineProfile;

namespace
{

ss::ProfileTable Sample(double length, std::size_t intervals, auto &&f)
{
  ss::ProfileTable t;
  for (std::size_t i = 0; i <= intervals; i++)
  {
    const double z = length * static_cast<double>(i) / static_cast<double>(intervals);
    t.z.push_back(z);
    t.value.push_back(f(z));
  }
  return t;
}

// A line with L C = 1 (so x = z) and the given amplitude A = (C/L)^{1/4}.
LineProfile UnitSpeedTable(double length, std::size_t intervals, auto &&A, bool infinite = false)
{
  const auto L = Sample(length, intervals, [&](double z) { return 1.0 / (A(z) * A(z)); });
  const auto C = Sample(length, intervals, [&](double z) { return A(z) * A(z); });
  return LineProfile::MakeSampledTable(L, C, infinite);
}

}  // namespace

TEST(LiouvilleCoordinate, UniformLines)
{
  EXPECT_NEAR(ss::LiouvilleCoordinate(LineProfile::MakeUniform(1.0, 1.0, 5.0), 2.0), 2.0, 1e-12);
  EXPECT_NEAR(ss::LiouvilleCoordinate(LineProfile::MakeUniform(4.0, 1.0, 5.0), 3.0), 6.0, 1e-12);
}

TEST(LiouvilleCoordinate, LinearInductanceClosedForm)
{
  const double expected = (2.0 / 3.0) * (2.0 * std::sqrt(2.0) - 1.0);
  const auto L = Sample(1.0, 100, [](double z) { return 1.0 + z; });
  const auto C = Sample(1.0, 100, [](double) { return 1.0; });
  const LineProfile p = LineProfile::MakeSampledTable(L, C, false);
  EXPECT_NEAR(ss::LiouvilleCoordinate(p, 1.0), expected, 1e-9);
  EXPECT_NEAR(expected, 1.218951, 1e-6);
  EXPECT_NEAR(ss::TravelTime(p), expected, 1e-9);
}

TEST(LiouvilleCoordinateProperty, MonotoneWithDerivativeSqrtLC)
{
  const auto L = Sample(2.0, 200, [](double z) { return 1.0 + 0.5 * std::sin(2.0 * z); });
  const auto C = Sample(2.0, 200, [](double z) { return 2.0 + z * z; });
  const LineProfile p = LineProfile::MakeSampledTable(L, C, false);
  double prev = -1.0;
  const double h = 1e-4;
  for (double z = 0.05; z < 1.95; z += 0.1)
  {
    const double x = ss::LiouvilleCoordinate(p, z);
    EXPECT_GT(x, prev);
    prev = x;
    const double slope =
      (ss::LiouvilleCoordinate(p, z + h) - ss::LiouvilleCoordinate(p, z - h)) / (2.0 * h);
    const double expected = std::sqrt(p.Inductance(z) * p.Capacitance(z));
    EXPECT_NEAR(slope / expected, 1.0, 1e-6) << "z=" << z;
  }
}

TEST(LiouvilleCoordinate, NonPositiveSamplesAreProfileErrors)
{
  auto L = Sample(1.0, 10, [](double) { return 1.0; });
  const auto C = Sample(1.0, 10, [](double) { return 1.0; });
  L.value[3] = -0.5;
  EXPECT_THROW(LineProfile::MakeSampledTable(L, C, false), ss::ProfileError);
  EXPECT_THROW(LineProfile::MakeUniform(0.0, 1.0, 1.0), ss::ProfileError);
  // A spline through positive samples may still dip below zero between knots.
  ss::ProfileTable dip = Sample(1.0, 6, [](double) { return 1.0; });
  dip.value = {1.0, 1.0, 4.0, 0.02, 0.5, 1.0, 1.0};
  const LineProfile p = LineProfile::MakeSampledTable(dip, C, false);
  EXPECT_THROW(ss::LiouvilleCoordinate(p, 1.0), ss::ProfileError);
}

TEST(TravelTime, Examples)
{
  EXPECT_NEAR(ss::TravelTime(LineProfile::MakeUniform(1.0, 1.0, 1.5)), 1.5, 1e-12);
  EXPECT_NEAR(ss::TravelTime(LineProfile::MakeUniform(0.25, 1.0, 2.0)), 1.0, 1e-12);
  EXPECT_THROW(ss::TravelTime(LineProfile::MakeUniform(1.0, 1.0, ss::kInfiniteLength)),
               ss::DomainError);
}

TEST(PotentialFromProfile, UniformIsExactlyZero)
{
  for (const double len : {0.5, 3.0, ss::kInfiniteLength})
  {
    const ss::PotentialFn v =
      ss::PotentialFromProfile(LineProfile::MakeUniform(2.0, 0.3, len), 1e-3);
    EXPECT_TRUE(v.IsZero());
    EXPECT_EQ(v.L1Norm(), 0.0);
    EXPECT_EQ(v(0.2), 0.0);
  }
}

TEST(PotentialFromProfile, ExponentialTaperIsGammaSquared)
{
  const LineProfile p = LineProfile::MakeExponentialTaper(1.0, 0.3, 1.0, 2.0);
  const ss::PotentialFn v = ss::PotentialFromProfile(p, 1e-3);
  for (double x = 0.0; x <= 2.0; x += 0.1)
  {
    EXPECT_NEAR(v(x), 0.09, 1e-9);
  }
  EXPECT_NEAR(v.L1Norm(), 0.18, 1e-9);
}

TEST(PotentialFromProfile, SampledTableMatchesSymbolicSecondDerivative)
{
  // A = 1 + 0.1 exp(-(x-1)^2): A''(1) = -0.2, A(1) = 1.1.
  const auto A = [](double x) { return 1.0 + 0.1 * std::exp(-(x - 1.0) * (x - 1.0)); };
  const LineProfile p = UnitSpeedTable(2.0, 1000, A);
  const ss::PotentialFn v = ss::PotentialFromProfile(p, 1e-3);
  EXPECT_NEAR(v(1.0), -0.2 / 1.1, 1e-6);
  const auto exact = [&](double x)
  {
    const double u = x - 1.0;
    return 0.1 * std::exp(-u * u) * (4.0 * u * u - 2.0) / A(x);
  };
  for (double x = 0.2; x <= 1.8; x += 0.2)
  {
    EXPECT_NEAR(v(x), exact(x), 1e-5) << "x=" << x;
  }
}

TEST(PotentialFromProfile, TooFewSamplesIsResolutionError)
{
  const auto L = Sample(1.0, 3, [](double) { return 1.0; });
  EXPECT_THROW(LineProfile::MakeSampledTable(L, L, false), ss::ResolutionError);
}

TEST(TerminalH, Examples)
{
  EXPECT_EQ(ss::TerminalH(LineProfile::MakeUniform(1.0, 2.0, 1.0)), 0.0);
  EXPECT_NEAR(ss::TerminalH(LineProfile::MakeExponentialTaper(1.0, 0.3, 1.0, 1.0)), 0.3, 1e-12);
  const LineProfile p = UnitSpeedTable(2.0, 400, [](double x) { return 1.0 + 0.1 * x; });
  EXPECT_NEAR(ss::TerminalH(p), 0.1 / 1.2, 1e-6);
  EXPECT_THROW(ss::TerminalH(LineProfile::MakeUniform(1.0, 1.0, ss::kInfiniteLength)),
               ss::DomainError);
}

TEST(GeometryFromProfile, NodeAmplitudeAndSlope)
{
  const ss::BranchGeometry g =
    ss::GeometryFromProfile(LineProfile::MakeExponentialTaper(1.5, -0.2, 2.0, 1.0));
  EXPECT_NEAR(g.A0, 1.5, 1e-12);
  EXPECT_NEAR(g.A0prime, -0.3, 1e-12);
  EXPECT_NEAR(*g.tau, 2.0, 1e-9);
  EXPECT_NEAR(*g.h, -0.2, 1e-12);

  const ss::BranchGeometry u =
    ss::GeometryFromProfile(LineProfile::MakeUniform(1.0, 16.0, ss::kInfiniteLength));
  EXPECT_NEAR(u.A0, 2.0, 1e-12);
  EXPECT_FALSE(u.tau.has_value());
  EXPECT_FALSE(u.h.has_value());
}

TEST(VoltageFromField, Examples)
{
  using c = std::complex<double>;
  EXPECT_EQ(ss::VoltageFromField(c(1.0, 0.0), 1.0), c(1.0, 0.0));
  EXPECT_NEAR(std::abs(ss::VoltageFromField(c(0.0, 2.0), 2.0) - c(0.0, 1.0)), 0.0, 1e-15);
}

TEST(VoltageFromFieldProperty, RoundTrip)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0), a(0.1, 4.0);
  for (int i = 0; i < 200; i++)
  {
    const std::complex<double> U(u(rng), u(rng));
    const double A = a(rng);
    EXPECT_NEAR(std::abs(ss::VoltageFromField(A * U, A) - U), 0.0, 1e-14 * (1.0 + std::abs(U)));
  }
}

TEST(ReadProfileTable, ParsesHeaderAndScientificNotation)
{
  const auto path = std::filesystem::temp_directory_path() / "starscatter_profile_table.csv";
  {
    std::ofstream f(path);
    f << "z,L\n0,1\n0.5,1.5e0\n1.0,2E-1\n";
  }
  const ss::ProfileTable t = ss::ReadProfileTable(path);
  ASSERT_EQ(t.z.size(), 3u);
  EXPECT_EQ(t.value[1], 1.5);
  EXPECT_EQ(t.value[2], 0.2);
  std::filesystem::remove(path);
  EXPECT_THROW(ss::ReadProfileTable(path), ss::ProfileError);
}
