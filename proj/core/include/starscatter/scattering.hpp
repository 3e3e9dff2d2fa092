#ifndef STARSCATTER_SCATTERING_HPP
#define STARSCATTER_SCATTERING_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "starscatter/fundamental.hpp"
#include "starscatter/jost.hpp"
#include "starscatter/line_model.hpp"
#include "starscatter/potential.hpp"

namespace starscatter
{

enum class BranchKind
{
  Infinite,
  Finite
};

//
// One edge of the star. The potential is expressed in the branch's own Liouville
// coordinate with x = 0 at the central node. Finite branches also keep the mirrored
// potential V(tau - x) used by the fundamental solution, which is anchored at the terminal
// end.
//
class Branch
{
public:
  static Branch Infinite(int id, PotentialFn potential, double A0, double A0prime);
  static Branch Finite(int id, PotentialFn potential, double tau, double A0, double A0prime,
                       double h);
  // grid_step is passed through to PotentialFromProfile.
  static Branch FromProfile(int id, const LineProfile &profile, double grid_step);

  int Id() const { return id_; }
  BranchKind Kind() const { return kind_; }
  bool IsInfinite() const { return kind_ == BranchKind::Infinite; }
  const PotentialFn &Potential() const { return potential_; }
  const PotentialFn &TerminalPotential() const { return terminal_potential_; }
  const BranchGeometry &Geometry() const { return geometry_; }
  double Tau() const { return geometry_.tau.value(); }
  double H() const { return geometry_.h.value(); }

private:
  Branch() = default;

  int id_ = 0;
  BranchKind kind_ = BranchKind::Infinite;
  PotentialFn potential_;
  PotentialFn terminal_potential_;
  BranchGeometry geometry_;
};

//
// Star-shaped network. Branch 0 is the measurement branch and must be infinite. The
// constructor stably reorders the remaining branches so that all infinite branches come
// before the finite ones, which is the order of the unknowns (R1, T_2..T_m, alpha...).
//
class StarNetwork
{
public:
  StarNetwork(std::vector<Branch> branches, double a5_tolerance = 1e-9);

  std::span<const Branch> Branches() const { return branches_; }
  const Branch &operator[](std::size_t i) const { return branches_[i]; }
  std::size_t Size() const { return branches_.size(); }
  // Number of infinite (m) and finite (n) branches.
  std::size_t InfiniteCount() const { return m_; }
  std::size_t FiniteCount() const { return branches_.size() - m_; }
  double A5Tolerance() const { return a5_tolerance_; }
  // Largest travel time over the finite branches (0 if none).
  double MaxTau() const;
  // Largest potential support over the infinite branches.
  double MaxInfiniteSupport() const;

private:
  std::vector<Branch> branches_;
  std::size_t m_ = 0;
  double a5_tolerance_;
};

struct SolverOptions
{
  JostOptions jost;
  double k_floor = 0.5;
  // Condition number above which the result is flagged.
  double ill_conditioned_threshold = 1e12;
  // Condition number above which the node system is treated as singular.
  double singular_threshold = 1e15;
};

struct ScatteringCoefficients
{
  double k = 0.0;
  cplx R1;
  std::vector<cplx> T;      // branches 1..m-1 (0-based), i.e. 2..m
  std::vector<cplx> alpha;  // branches m..m+n-1
  cplx ybar;
  double condition_number = 1.0;
  bool ill_conditioned = false;
};

// Per-branch solution data at the node for one frequency.
struct NodeBoundaryData
{
  JostData jost1;              // measurement branch, with a and b
  std::vector<cplx> value;     // g_j(0) for j >= 1: f_j(0) or omega_j(tau_j)
  std::vector<cplx> slope;     // g_j'(0): f_j'(0) or -omega_j'(tau_j)
};

// Square (m+n) system M u = r in u = (R1, T_2..T_m, alpha_{m+1}..alpha_{m+n}):
// rows 0..m+n-2 are node-value equalities against branch 1, the last row is flux balance.
struct NodeSystem
{
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;
  NodeBoundaryData boundary;
};

NodeBoundaryData ComputeBoundaryData(const StarNetwork &net, double k,
                                     const SolverOptions &opts = {});
NodeSystem AssembleNodeSystem(const StarNetwork &net, double k, const SolverOptions &opts = {});

ScatteringCoefficients SolveScattering(const StarNetwork &net, double k,
                                       const SolverOptions &opts = {});

// Relative residuals of the node conditions for a solved frequency: the m+n-1 value
// equalities (|A_j^-1 y_j(0) - ybar| / |ybar|) and the flux balance normalised by k |ybar|.
struct NodeResiduals
{
  double max_continuity = 0.0;
  double flux = 0.0;
};
NodeResiduals CheckNodeConditions(const StarNetwork &net, const ScatteringCoefficients &c,
                                  const SolverOptions &opts = {});

// |R1|^2 + sum |T_j|^2 - 1.
double FluxDefect(const ScatteringCoefficients &c);

// Field y_j(x) and y_j'(x) on branch `branch` (0-based) for a solved frequency.
FieldState AssembleFieldState(const StarNetwork &net, const ScatteringCoefficients &c,
                              std::size_t branch, double x, const SolverOptions &opts = {});
cplx AssembleField(const StarNetwork &net, const ScatteringCoefficients &c, std::size_t branch,
                   double x, const SolverOptions &opts = {});

// W(y_j, z_j)(x) = y z' - y' z at each x, where z_j is a second solution on the branch:
// f on branch 1, conj(f) on the other infinite branches and the sine-type solution
// anchored at the terminal end on finite branches. Constant in x for an exact solution.
std::vector<cplx> BranchWronskian(const StarNetwork &net, const ScatteringCoefficients &c,
                                  std::size_t branch, std::span<const double> xs,
                                  const SolverOptions &opts = {});

struct ReflectogramEntry
{
  double k = 0.0;
  // Empty when the frequency was resonant (gap marker).
  std::optional<ScatteringCoefficients> coefficients;
  std::string gap_reason;

  bool IsGap() const { return !coefficients.has_value(); }
};

// SolveScattering over a strictly increasing grid with every k >= k_floor. Resonant
// frequencies become gaps; the output preserves grid order. threads == 0 picks the
// hardware concurrency, capped by the STAR_SCATTER_THREADS environment variable.
std::vector<ReflectogramEntry> Reflectogram(const StarNetwork &net, std::span<const double> k_grid,
                                            const SolverOptions &opts = {},
                                            unsigned threads = 0);

// Worker count honouring STAR_SCATTER_THREADS.
unsigned DefaultThreadCount();

}  // namespace starscatter

#endif  // STARSCATTER_SCATTERING_HPP
