#ifndef STARSCATTER_ORACLE_HPP
#define STARSCATTER_ORACLE_HPP

#include <vector>

#include "starscatter/scattering.hpp"

namespace starscatter
{

struct DiscreteBranchField
{
  double step = 0.0;
  std::vector<double> x;
  std::vector<cplx> y;  // y[0] is the node value A_j ybar
};

struct DiscreteGraphField
{
  double k = 0.0;
  std::vector<DiscreteBranchField> branches;  // network order
  cplx ybar;
  cplx R1_est;
  std::vector<cplx> T_est;  // infinite branches 2..m
};

//
// Brute-force discretisation of the whole truncated star. Each branch gets a uniform grid
// with step close to dx. The three-point stencil
//
//   y[i+1] - 2 cos(kd) y[i] + y[i-1] = 2 (1 - cos(kd)) / k^2 * V[i] y[i]
//
// is exact for free plane waves, so the only discretisation error comes from V (second
// order in d). Node and terminal derivatives use the matching one-sided formula, which is
// also second order. Branch 1 is closed with the incoming-wave condition
// y' - ik y = -2ik e^{-ikX}, other infinite branches with y' = ik y, finite ends with
// y' = h y. The bordered banded system is solved with a sparse LU.
//
// Requires dx <= (2 pi / k) / 20 and X_trunc beyond every infinite-branch support.
//
DiscreteGraphField OracleSolve(const StarNetwork &net, double k, double dx, double X_trunc);

}  // namespace starscatter

#endif  // STARSCATTER_ORACLE_HPP
