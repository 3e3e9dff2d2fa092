#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include <starscatter/errors.hpp>
#include <starscatter/oracle.hpp>
#include <starscatter/scattering.hpp>

#include "test_networks.hpp"

namespace ss = starscatter;
using ss::cplx;
using ss::testing::Bump;
using ss::testing::UniformNetwork;

namespace
{

ss::StarNetwork SmoothM2N1()
{
  return ss::StarNetwork({
    ss::Branch::Infinite(1, Bump(0.6, 0.7, 0.6), 1.2, 0.15),
    ss::Branch::Infinite(2, Bump(-0.4, 0.9, 0.5), 1.2, -0.1),
    ss::Branch::Finite(3, Bump(0.8, 0.6, 0.45), 1.3, 1.2, 0.05, 0.3),
  });
}

double RelativeGap(const ss::StarNetwork &net, double k, double dx)
{
  const ss::ScatteringCoefficients c = ss::SolveScattering(net, k);
  const ss::DiscreteGraphField o = ss::OracleSolve(net, k, dx, net.MaxInfiniteSupport() + 0.5);
  return std::abs(c.R1 - o.R1_est) / (std::abs(o.R1_est) + 1e-6);
}

}  // namespace

TEST(OracleSolve, MatchedLine)
{
  const ss::DiscreteGraphField o = ss::OracleSolve(UniformNetwork(2, {}), 12.0, 1e-3, 1.0);
  EXPECT_LT(std::abs(o.R1_est), 1e-8);
  ASSERT_EQ(o.T_est.size(), 1u);
  EXPECT_LT(std::abs(o.T_est[0] - 1.0), 1e-8);
}

TEST(OracleSolve, ThreeWayJunction)
{
  const ss::DiscreteGraphField o = ss::OracleSolve(UniformNetwork(3, {}), 9.0, 2e-3, 1.0);
  EXPECT_LT(std::abs(o.R1_est + 1.0 / 3.0), 1e-8);
}

TEST(OracleSolve, UniformStubsMatchSolver)
{
  const ss::StarNetwork net = UniformNetwork(2, {1.0, 1.7});
  const double k = 14.2;
  const ss::DiscreteGraphField o = ss::OracleSolve(net, k, 1e-3, 1.0);
  EXPECT_LT(std::abs(o.R1_est - ss::SolveScattering(net, k).R1), 1e-8);
}

TEST(OracleSolve, SmoothNetworkMatchesSolver)
{
  EXPECT_LE(RelativeGap(SmoothM2N1(), 20.0, 1e-3), 1e-3);
}

TEST(OracleSolve, SecondOrderConvergence)
{
  const ss::StarNetwork net = SmoothM2N1();
  for (const double k : {10.0, 20.0})
  {
    const double coarse = RelativeGap(net, k, 2e-3);
    const double fine = RelativeGap(net, k, 1e-3);
    EXPECT_GE(coarse / fine, 3.0) << "k=" << k << " coarse " << coarse << " fine " << fine;
  }
}

TEST(OracleSolve, DiscreteFieldIsContinuousAndConservesFlux)
{
  const ss::StarNetwork net = ss::testing::SmoothM2N2();
  const ss::DiscreteGraphField o = ss::OracleSolve(net, 15.0, 1e-3, 2.0);
  ASSERT_EQ(o.branches.size(), net.Size());
  for (std::size_t j = 0; j < net.Size(); j++)
  {
    EXPECT_LT(std::abs(o.branches[j].y.front() / net[j].Geometry().A0 - o.ybar), 1e-12);
  }
  double flux = std::norm(o.R1_est) - 1.0;
  for (const cplx &t : o.T_est)
  {
    flux += std::norm(t);
  }
  EXPECT_LT(std::abs(flux), 1e-5);
}

TEST(OracleSolve, FieldAgreesWithAssembledSolution)
{
  const ss::StarNetwork net = SmoothM2N1();
  const double k = 20.0;
  const ss::ScatteringCoefficients c = ss::SolveScattering(net, k);
  const ss::DiscreteGraphField o = ss::OracleSolve(net, k, 1e-3, 2.0);
  for (std::size_t j = 0; j < net.Size(); j++)
  {
    const ss::DiscreteBranchField &b = o.branches[j];
    double scale = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < b.x.size(); i += 97)
    {
      const cplx y = ss::AssembleField(net, c, j, b.x[i]);
      scale = std::max(scale, std::abs(y));
      worst = std::max(worst, std::abs(y - b.y[i]));
    }
    EXPECT_LT(worst / scale, 1e-3) << "branch " << j;
  }
}

TEST(OracleSolve, PreconditionErrors)
{
  const ss::StarNetwork net = ss::testing::SmoothM2N2();
  EXPECT_THROW(ss::OracleSolve(net, 100.0, 1e-2, 3.0), ss::DomainError);
  EXPECT_THROW(ss::OracleSolve(net, 10.0, 1e-3, 0.5), ss::DomainError);
  EXPECT_THROW(ss::OracleSolve(net, 0.0, 1e-3, 3.0), ss::DomainError);
}
