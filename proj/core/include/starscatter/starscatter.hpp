#ifndef STARSCATTER_STARSCATTER_HPP
#define STARSCATTER_STARSCATTER_HPP

#include "starscatter/errors.hpp"
#include "starscatter/fundamental.hpp"
#include "starscatter/inversion.hpp"
#include "starscatter/jost.hpp"
#include "starscatter/line_model.hpp"
#include "starscatter/numerics.hpp"
#include "starscatter/oracle.hpp"
#include "starscatter/potential.hpp"
#include "starscatter/scattering.hpp"

#endif  // STARSCATTER_STARSCATTER_HPP
