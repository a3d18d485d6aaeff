#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "renderloc/geometry.h"

namespace renderloc {

using Rng = std::mt19937_64;

// Counter-based seed derivation (SplitMix64 mixing). Per-task seeds built
// this way make parallel results independent of scheduling.
std::uint64_t DeriveSeed(std::uint64_t base,
                         std::initializer_list<std::uint64_t> counters);

Vector3d RandomUnitVector(Rng& rng);

}  // namespace renderloc
