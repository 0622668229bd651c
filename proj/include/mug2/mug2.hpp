#ifndef MUG2_MUG2_HPP
#define MUG2_MUG2_HPP

#include "mug2/anomaly.hpp"
#include "mug2/constants.hpp"
#include "mug2/decaygen.hpp"
#include "mug2/errors.hpp"
#include "mug2/precession.hpp"
#include "mug2/relkin.hpp"
#include "mug2/rng.hpp"
#include "mug2/wigglefit.hpp"

namespace mug2 {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
