#ifndef STARSCATTER_POTENTIAL_HPP
#define STARSCATTER_POTENTIAL_HPP

#include <functional>
#include <memory>
#include <vector>

namespace starscatter
{

//
// A real potential V(x) on a branch, in the Liouville coordinate x (seconds) measured from
// the central node. V vanishes outside [0, support_end]. On construction the L1 norm,
// the first moment and a table of tail integrals are computed, so every copy is cheap and
// immutable.
//
class PotentialFn
{
public:
  using Evaluator = std::function<double(double)>;

  // Identically zero potential.
  PotentialFn();

  // support_end must be finite and positive. tail_cells controls the resolution of the
  // tail-integral table (0 picks a default based on support_end).
  PotentialFn(Evaluator v, double support_end, std::size_t tail_cells = 0);

  static PotentialFn Zero() { return {}; }
  // V(x) = value on [0, support_end].
  static PotentialFn Constant(double value, double support_end);
  // Linear interpolation through (x, V) samples; x must start at 0 and increase.
  static PotentialFn Table(std::vector<double> x, std::vector<double> v);

  double operator()(double x) const;

  bool IsZero() const { return zero_; }
  double SupportEnd() const { return support_end_; }
  double L1Norm() const { return l1_norm_; }
  // Integral of (1 + x)|V(x)|.
  double FirstMoment() const { return first_moment_; }

  // Upper bound on the integral of |V| over [X, support_end]; nonincreasing in X.
  double TailBound(double X) const;
  // Integral of |V| over [0, x], accurate to the quadrature tolerance.
  double CumulativeAbs(double x) const;

  // Smallest tail-table node X with TailBound(X) < tol (support_end if none smaller).
  double TruncationPoint(double tol) const;

  // V(tau - x) on [0, tau]; the source is treated as zero outside its support.
  PotentialFn Reversed(double tau) const;
  // Same evaluator with the support cut or extended to [0, end].
  PotentialFn Restricted(double end) const;

  // Nodes of the tail table (including 0 and support_end).
  const std::vector<double> &TailGrid() const { return grid_; }

private:
  bool zero_ = true;
  std::shared_ptr<const Evaluator> eval_;
  double support_end_ = 0.0;
  double l1_norm_ = 0.0;
  double first_moment_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> cumulative_;  // integral of |V| over [0, grid_[i]]
};

}  // namespace starscatter

#endif  // STARSCATTER_POTENTIAL_HPP
