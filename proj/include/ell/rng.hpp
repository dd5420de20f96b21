#ifndef ELL_RNG_HPP
#define ELL_RNG_HPP

// Deterministic, portable random sampling.  The generator is SplitMix64;
// every (suite, trial) pair draws from its own substream keyed by
// hash(seed, suite-id, trial-index), so results do not depend on scheduling.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "ell/core.hpp"

namespace ell {

struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// uniform in [0, 1)
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + int(next() % std::uint64_t(hi - lo + 1));
  }

  /// complex with modulus uniform in [rlo, rhi] and uniform phase
  cplx annulus(double rlo, double rhi) {
    const double r = uniform(rlo, rhi);
    const double t = uniform(0.0, 2.0 * std::numbers::pi);
    return cplx(r * std::cos(t), r * std::sin(t));
  }

  cplx box(double re_max, double im_max) {
    return cplx(uniform(-re_max, re_max), uniform(-im_max, im_max));
  }
};

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Substream key for (seed, suite-id, trial): mixes all three through the
/// SplitMix64 finalizer so neighbouring trials are decorrelated.
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view suite,
                                    std::uint64_t trial) {
  std::uint64_t h = fnv1a(suite);
  h ^= seed + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  SplitMix64 mix(h);
  mix.state ^= trial * 0xd1342543de82ef95ULL;
  return mix.next();
}

/// Parameter sampling ranges shared by all suites.
struct ParamRanges {
  double p_abs_min = 0.02;
  double p_abs_max = 0.40;
  double q_abs_min = 0.45;
  double q_abs_max = 0.85;
  double lambda_re_max = 1.2;
  double lambda_im_max = 0.4;
  double x_abs_min = 0.5;
  double x_abs_max = 2.0;
};

struct ParamBundle {
  EllipticParams par;
  cplx lambda;
};

inline ParamBundle sample_params(SplitMix64& rng, const ParamRanges& r) {
  ParamBundle b;
  b.par = EllipticParams::make(rng.annulus(r.p_abs_min, r.p_abs_max),
                               rng.annulus(r.q_abs_min, r.q_abs_max));
  b.lambda = rng.box(r.lambda_re_max, r.lambda_im_max);
  return b;
}

inline std::vector<cplx> sample_vector(SplitMix64& rng, const ParamRanges& r, int n) {
  std::vector<cplx> v;
  v.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i) v.push_back(rng.annulus(r.x_abs_min, r.x_abs_max));
  return v;
}

/// Run `trial` with rejection sampling: singular configurations are resampled
/// from the same substream, at most max_retries times.
template <class F>
double with_genericity_retries(F&& trial, int max_retries = 100) {
  std::string last;
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    try {
      return trial();
    } catch (const singular_error& e) {
      last = e.what();
    }
  }
  throw sampling_error("genericity retries exhausted; last rejection: " + last);
}

}  // namespace ell

#endif  // ELL_RNG_HPP
