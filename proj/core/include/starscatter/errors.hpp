#ifndef STARSCATTER_ERRORS_HPP
#define STARSCATTER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace starscatter
{

// Root of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// L(z) or C(z) not strictly positive, or a profile that violates its family's invariants.
class ProfileError : public Error
{
public:
  using Error::Error;
};

// Operation requested outside the domain of its arguments (e.g. travel time of an
// infinite line).
class DomainError : public Error
{
public:
  using Error::Error;
};

// A sampled table too coarse to estimate second derivatives.
class ResolutionError : public Error
{
public:
  using Error::Error;
};

// k = 0 where a Jost solution is requested.
class SingularFrequencyError : public Error
{
public:
  using Error::Error;
};

// An adaptive integrator could not reach the requested tolerance.
class AccuracyError : public Error
{
public:
  AccuracyError(const std::string &what, double achieved)
    : Error(what), achieved_error(achieved)
  {
  }

  // Last error estimate before giving up (scaled, 1 == tolerance).
  double achieved_error;
};

// f(0,k) vanishes; the caller should perturb k.
class NodeSingularityError : public Error
{
public:
  using Error::Error;
};

// Kernel fixed-point iteration failed to settle.
class DivergenceError : public Error
{
public:
  using Error::Error;
};

// The node system (or its discrete analogue) is singular at this frequency.
class ResonanceError : public Error
{
public:
  using Error::Error;
};

// Evaluation too close to a pole of tan(k tau).
class PoleError : public Error
{
public:
  using Error::Error;
};

// Not enough usable reflectogram samples.
class InsufficientDataError : public Error
{
public:
  using Error::Error;
};

}  // namespace starscatter

#endif  // STARSCATTER_ERRORS_HPP
