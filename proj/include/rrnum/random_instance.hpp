#pragma once

#include <cstddef>
#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rrnum/network.hpp"

namespace rrnum {

struct RandomInstanceLimits {
  std::size_t max_links = 3;
  std::size_t max_sources = 5;
  double alpha = 1.1;
  double capacity_lo = 1.0;
  double capacity_hi = 3.0;
  double a_lo = 0.1;
  double a_hi = 0.9;
};

// Portable draws from mt19937_64 (the standard distributions are not
// reproducible across library implementations).
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

 private:
  std::mt19937_64 gen_;
};

// Random instance with exponential error models (N = 100, R0 = 1), rate box
// [0.1, 2], R_min = 0.9, and routes that are non-empty link subsets. Every
// link carries at least one source.
inline NetworkSpec random_instance(std::uint64_t seed, const RandomInstanceLimits& lim = {}) {
  PortableRng rng(seed);
  const std::size_t L = 1 + rng.index(lim.max_links);
  const std::size_t S = std::max<std::size_t>(L, 1 + rng.index(lim.max_sources));
  std::vector<LinkSpec> links;
  for (std::size_t l = 0; l < L; ++l) {
    links.push_back({"L" + std::to_string(l + 1), rng.uniform(lim.capacity_lo, lim.capacity_hi),
                     ErrorModel::exponential(100.0, 1.0)});
  }
  std::vector<SourceSpec> sources;
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<std::size_t> route;
    if (s < L) route.push_back(s);
    for (std::size_t l = 0; l < L; ++l) {
      if (l != s && rng.uniform() < 0.4) route.push_back(l);
    }
    if (route.empty()) route.push_back(rng.index(L));
    std::sort(route.begin(), route.end());
    UtilityParams p;
    p.a = rng.uniform(lim.a_lo, lim.a_hi);
    p.alpha = lim.alpha;
    sources.push_back(make_source("S" + std::to_string(s + 1), std::move(route), p));
  }
  return NetworkSpec(std::move(links), std::move(sources));
}

}  // namespace rrnum
