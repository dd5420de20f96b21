#include <catch2/catch_amalgamated.hpp>

#include "ell/rng.hpp"
#include "ell/weight.hpp"

using namespace ell;

namespace {
const EllipticParams kPar = EllipticParams::make(cplx(0.10, 0.05), cplx(0.55, 0.20));
const cplx kLam(0.31, 0.17);

SplitMix64 seeded(const char* tag) { return SplitMix64(substream_seed(2, tag, 0)); }

std::vector<cplx> inv(const std::vector<cplx>& v) {
  std::vector<cplx> r;
  for (cplx x : v) r.push_back(cplx(1.0) / x);
  return r;
}
}  // namespace

TEST_CASE("phi trivial sizes and the single-permutation case") {
  auto rng = seeded("phi-basic");
  REQUIRE(phi({}, {}, cplx(1.3), kPar) == cplx(1.0));
  const cplx w = rng.annulus(0.5, 2.0), z = rng.annulus(0.5, 2.0), a = rng.annulus(0.5, 2.0);
  const cplx expect = theta(a / kPar.q * w / z, kPar) / theta(kPar.q * w / z, kPar);
  REQUIRE(rel_diff(phi({w}, {z}, a, kPar), expect) < 1e-13);
  REQUIRE_THROWS_AS(phi({w}, {z, z}, a, kPar), domain_error);
  const std::vector<cplx> big(9, cplx(1.1));
  REQUIRE_THROWS_AS(phi(big, big, a, kPar), capacity_error);
}

TEST_CASE("phi factorizes on geometric progressions") {
  auto rng = seeded("phi-pgl");
  for (int n = 2; n <= 4; ++n) {
    const auto w = sample_vector(rng, {}, n);
    const cplx zeta = rng.annulus(0.5, 2.0), a = rng.annulus(0.5, 2.0);
    std::vector<cplx> z;
    for (int j = 0; j < n; ++j) z.push_back(kPar.q_pow(j) * zeta);
    cplx rhs = pochhammer(kPar.q, n, kPar);
    for (int i = 0; i < n; ++i) rhs /= theta(kPar.q, kPar);
    cplx rhs1 = rhs, rhs2 = rhs;
    for (int j = 0; j < n; ++j)
      rhs1 *= theta(kPar.q_pow(-n) * a * w[j] / zeta, kPar) / theta(kPar.q * w[j] / zeta, kPar);
    REQUIRE(rel_diff(phi(w, z, a, kPar), rhs1) < 1e-11);

    const cplx omega = rng.annulus(0.5, 2.0);
    std::vector<cplx> wg;
    for (int j = 0; j < n; ++j) wg.push_back(kPar.q_pow(j) * omega);
    const auto z2 = sample_vector(rng, {}, n);
    for (int j = 0; j < n; ++j)
      rhs2 *= theta(kPar.q_pow(-1) * a * omega / z2[j], kPar) /
              theta(kPar.q_pow(n) * omega / z2[j], kPar);
    REQUIRE(rel_diff(phi(wg, z2, a, kPar), rhs2) < 1e-11);
  }
}

TEST_CASE("phi symmetries: z/w inversion and both crossing forms") {
  auto rng = seeded("phi-ewc");
  for (int n = 1; n <= 3; ++n) {
    const auto w = sample_vector(rng, {}, n);
    const auto z = sample_vector(rng, {}, n);
    const cplx a = rng.annulus(0.5, 2.0);
    const cplx base = phi(w, z, a, kPar);
    REQUIRE(rel_diff(base, phi(inv(z), inv(w), a, kPar)) < 1e-11);
    cplx pref = kPar.q_pow(-n) * std::pow(a, double(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        pref *= theta(w[i] / z[j], kPar) / theta(kPar.q * w[i] / z[j], kPar);
    std::vector<cplx> qzinv = inv(z);
    for (cplx& x : qzinv) x *= kPar.q;
    REQUIRE(rel_diff(base, pref * phi(inv(w), qzinv, kPar.q_pow(n + 2.0) / a, kPar)) < 1e-11);
    std::vector<cplx> qw = w;
    for (cplx& x : qw) x *= kPar.q;
    REQUIRE(rel_diff(base, pref * phi(z, qw, kPar.q_pow(n + 2.0) / a, kPar)) < 1e-11);
  }
}

TEST_CASE("phi is symmetric under permutations of z and of w") {
  auto rng = seeded("phi-perm");
  const int n = 4;
  auto w = sample_vector(rng, {}, n);
  auto z = sample_vector(rng, {}, n);
  const cplx a = rng.annulus(0.5, 2.0);
  const cplx base = phi(w, z, a, kPar);
  for (int t = 0; t < 6; ++t) {
    auto wp = w, zp = z;
    std::swap(wp[rng.uniform_int(0, n - 1)], wp[rng.uniform_int(0, n - 1)]);
    std::swap(zp[rng.uniform_int(0, n - 1)], zp[rng.uniform_int(0, n - 1)]);
    REQUIRE(rel_diff(base, phi(wp, z, a, kPar)) < 1e-10);
    REQUIRE(rel_diff(base, phi(w, zp, a, kPar)) < 1e-10);
  }
}

TEST_CASE("phi stays finite as two z-values collide") {
  auto rng = seeded("phi-pole");
  const auto w = sample_vector(rng, {}, 2);
  const cplx z1 = rng.annulus(0.5, 2.0), a = rng.annulus(0.5, 2.0);
  cplx prev(0.0);
  double prev_gap = -1.0;
  for (double eps : {1e-3, 1e-4, 1e-5}) {
    const cplx z2 = z1 * (1.0 + eps * cplx(1.0, 0.4));
    const cplx val = phi(w, {z1, z2}, a, kPar);
    if (prev != cplx(0.0)) {
      const double gap = std::abs(val - prev);
      if (prev_gap >= 0.0) REQUIRE(gap < 0.2 * prev_gap);
      prev_gap = gap;
    }
    prev = val;
  }
  REQUIRE(std::abs(prev) < 1e6);
}

TEST_CASE("coefficient A at the trivial subsets") {
  auto rng = seeded("coeff-a");
  const int N = 3;
  const auto z = sample_vector(rng, {}, N);
  REQUIRE(std::abs(coeff_a(SubsetOfN(N, 0), z, kLam, kPar) - cplx(1.0)) < 1e-14);
  REQUIRE(std::abs(coeff_a(SubsetOfN(N, full_mask(N)), z, kLam, kPar) - cplx(1.0)) < 1e-12);
}

TEST_CASE("coefficient B at the empty subset") {
  auto rng = seeded("coeff-b");
  const int N = 3;
  const auto z = sample_vector(rng, {}, N);
  REQUIRE(rel_diff(coeff_b(SubsetOfN(N, 0), z, kLam, kPar), cplx(1.0)) < 1e-12);
}

TEST_CASE("coefficient C collapses at T = S") {
  auto rng = seeded("coeff-c");
  const int N = 3;
  const auto z = sample_vector(rng, {}, N);
  const SubsetOfN s = SubsetOfN::of(N, {1, 3});
  const int m = s.size();
  cplx expect = pochhammer(kPar.q_pow(kLam + double(2 - m)), m, kPar) /
                pochhammer(kPar.q_pow(kLam + double(2 + N - 2 * m)), m, kPar);
  for (int i : s.members())
    for (int j : s.complement().members())
      expect *= theta(kPar.q * z[i] / z[j], kPar) / theta(z[i] / z[j], kPar);
  REQUIRE(rel_diff(coeff_c(s, s, z, kLam, kPar), expect) < 1e-12);
  const cplx d = coeff_d(s, s, z, kLam, kPar);
  REQUIRE(rel_diff(d, expect) < 1e-12);
  REQUIRE_THROWS_AS(coeff_c(SubsetOfN::of(N, {1}), SubsetOfN::of(N, {1, 2}), z, kLam, kPar),
                    domain_error);
}

TEST_CASE("block decomposition reproduces phi for every ordered partition of [3]") {
  auto rng = seeded("phi-decomp");
  const int n = 3;
  const auto w = sample_vector(rng, {}, n);
  const auto z = sample_vector(rng, {}, n);
  const cplx a = rng.annulus(0.5, 2.0);
  const cplx base = phi(w, z, a, kPar);
  const auto parts = ordered_set_partitions(n);
  REQUIRE(parts.size() == 13);
  for (const auto& blocks : parts)
    REQUIRE(rel_diff(base, phi_decomposed(w, z, a, blocks, kPar)) < 1e-10);
}

TEST_CASE("decomposition trivial cases") {
  auto rng = seeded("phi-decomp2");
  const int n = 2;
  const auto w = sample_vector(rng, {}, n);
  const auto z = sample_vector(rng, {}, n);
  const cplx a = rng.annulus(0.5, 2.0);
  const cplx base = phi(w, z, a, kPar);
  REQUIRE(rel_diff(base, phi_decomposed(w, z, a, {{0, 1}}, kPar)) < 1e-13);
  REQUIRE(rel_diff(base, phi_decomposed(w, z, a, {{0}, {1}}, kPar)) < 1e-12);
  REQUIRE_THROWS_AS(phi_decomposed(w, z, a, {{0}}, kPar), domain_error);
  REQUIRE_THROWS_AS(phi_decomposed(w, z, a, {{0}, {0, 1}}, kPar), domain_error);
}

TEST_CASE("subset restriction keeps ascending order regardless of input order") {
  const std::vector<cplx> z{cplx(1), cplx(2), cplx(3), cplx(4)};
  const SubsetOfN s1 = SubsetOfN::of(4, {3, 1});
  const SubsetOfN s2 = SubsetOfN::of(4, {1, 3});
  REQUIRE(s1 == s2);
  const auto r = restrict_to(z, s1);
  REQUIRE(r == std::vector<cplx>{cplx(1), cplx(3)});
  REQUIRE(s1.complement().members() == std::vector<int>{1, 3});
  REQUIRE_THROWS_AS(SubsetOfN::of(4, {0}), domain_error);
  REQUIRE_THROWS_AS(SubsetOfN::of(4, {5}), domain_error);
  REQUIRE_THROWS_AS(SubsetOfN::of(4, {2, 2}), domain_error);
}
