#ifndef STARSCATTER_INVERSION_HPP
#define STARSCATTER_INVERSION_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace starscatter
{

using cplx = std::complex<double>;

// Sign attached to S = sum tan(k tau_j) in the closed form. ChainRule is the form produced
// by the node system (y_j'(0) = -alpha_j omega'(tau_j)); Printed flips S, which conjugates R1.
enum class SignConvention
{
  ChainRule,
  Printed
};

// R1 = [-(m - 2) + i S] / [m - i S], S = sum tan(k tau_j). Exact for uniform networks and
// the high-frequency limit otherwise. Throws PoleError when |cos(k tau_j)| < 1e-9.
cplx HighFreqReflection(int m, std::span<const double> taus, double k,
                        SignConvention convention = SignConvention::ChainRule);

struct ReflectogramSample
{
  double k = 0.0;
  cplx R1;
};

// g(k) = 2 Im(1 / (1 + R1)).
double PoleIndicator(cplx R1);

struct MEstimate
{
  int m_hat = 0;
  double median = 0.0;
  // Median absolute deviation of 2 Re(1/(1+R1)) over the retained samples.
  double mad = 0.0;
  std::size_t retained = 0;
};

// Median of 2 Re(1/(1+R1)) over samples with |1 + R1| > min_modulus, rounded. Throws
// InsufficientDataError when fewer than min_samples survive.
MEstimate EstimateM(std::span<const ReflectogramSample> samples, double min_modulus = 0.1,
                    std::size_t min_samples = 10);

struct InversionOptions
{
  // |g| must exceed this on one side of a sign flip for the flip to count as a pole.
  double pole_threshold = 10.0;
  double min_modulus = 0.1;
  std::size_t min_samples = 10;
  // A chain needs at least this many poles to define a family.
  std::size_t min_family_size = 3;
};

// One arithmetic progression of poles k_p = offset + p * spacing.
struct SpacingFit
{
  double tau = 0.0;
  double spacing = 0.0;
  double offset = 0.0;
  double rms_residual = 0.0;
  std::vector<double> poles;
};

struct InversionReport
{
  int m_hat = 0;
  std::vector<double> taus;   // ascending
  std::vector<double> poles;  // every refined pole, ascending
  std::size_t m_samples_used = 0;
  MEstimate m_estimate;
  double grid_step = 0.0;
  std::vector<SpacingFit> fits;  // parallel to taus
  std::vector<double> unassigned_poles;
  bool degenerate = false;
  std::vector<std::string> warnings;
};

// Poles of g located by sign flips between neighbouring samples and refined by bisection
// on a local cubic interpolant of 1/g. Samples must be sorted by k.
std::vector<double> DetectPoles(std::span<const ReflectogramSample> samples,
                                double threshold = 10.0);

// Groups poles into at most max_families arithmetic progressions. grid_step sets the
// histogram resolution (2 * grid_step).
std::vector<SpacingFit> ClusterPoles(std::vector<double> poles, std::size_t max_families,
                                     double grid_step, std::size_t min_family_size = 3);

// Full recovery of m and the travel times from a reflectogram on a uniform k grid.
InversionReport EstimateTaus(std::span<const ReflectogramSample> samples,
                             std::size_t expected_max_n, const InversionOptions &opts = {});

}  // namespace starscatter

#endif  // STARSCATTER_INVERSION_HPP
