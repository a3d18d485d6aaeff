#include "renderloc/random.h"

namespace renderloc {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t base,
                         std::initializer_list<std::uint64_t> counters) {
  std::uint64_t h = SplitMix64(base);
  for (std::uint64_t c : counters) h = SplitMix64(h ^ SplitMix64(c + 1));
  return h;
}

Vector3d RandomUnitVector(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  while (true) {
    Vector3d v(normal(rng), normal(rng), normal(rng));
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

}  // namespace renderloc
