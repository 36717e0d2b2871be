#pragma once

#include <random>

namespace seisloc {

using Rng = std::mt19937_64;

}  // namespace seisloc
