#include <catch2/catch_amalgamated.hpp>

#include "ell/rng.hpp"
#include "ell/series.hpp"

using namespace ell;

namespace {
const EllipticParams kPar = EllipticParams::make(cplx(0.10, 0.05), cplx(0.55, 0.20));

SplitMix64 seeded(const char* tag) { return SplitMix64(substream_seed(3, tag, 0)); }

cplx rc(SplitMix64& rng) { return rng.annulus(0.4, 2.5); }

// evaluate with the suites' genericity policy: resample on singular or
// cancellation-dominated configurations
template <class F>
double conditioned_residual(F&& make) {
  return with_genericity_retries([&] {
    const IdentitySample s = make();
    s.reject_if_cancellation_dominated();
    return s.residual();
  });
}
}  // namespace

TEST_CASE("empty support gives 1") {
  auto rng = seeded("v-basic");
  VSeries v;
  v.a = rc(rng);
  v.b = {rc(rng), rc(rng)};
  const cplx z0 = rc(rng);
  v.c = {kPar.q_pow(0) / z0, rc(rng), rc(rng)};
  v.z = {z0};
  REQUIRE(v_sum(v, {0}, std::nullopt, kPar) == cplx(1.0));  // only y = 0 survives
  VSeries empty;
  empty.a = rc(rng);
  empty.b = {rc(rng), rc(rng)};
  empty.c = {rc(rng), rc(rng)};
  REQUIRE(v_sum(empty, {}, std::nullopt, kPar) == cplx(1.0));
}

TEST_CASE("single-variable series reduce to the classical one") {
  auto rng = seeded("v-one");
  for (int m = 0; m <= 2; ++m) {
    VSeries v;
    v.a = rc(rng);
    for (int i = 0; i < m + 2; ++i) v.b.push_back(rc(rng));
    const int nmax = 3;
    const cplx z0 = rc(rng);
    v.c.push_back(kPar.q_pow(-nmax) / z0);
    for (int i = 0; i < m + 2; ++i) v.c.push_back(rc(rng));
    v.z = {z0};
    const cplx lhs = v_sum(v, {nmax}, std::nullopt, kPar);
    std::vector<cplx> bs = v.b;
    for (cplx c : v.c) bs.push_back(c * z0);
    const cplx rhs = v_one(v.a * z0, bs, nmax, kPar);
    REQUIRE(rel_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("two-term sum by hand") {
  auto rng = seeded("v-hand");
  // n = 2, c-type caps (1, 0): support {(0,0), (1,0)}
  VSeries v;
  v.a = rc(rng);
  v.b = {rc(rng), rc(rng), rc(rng)};
  v.z = {rc(rng), rc(rng)};
  v.c = {kPar.q_pow(-1) / v.z[0], kPar.q_pow(0) / v.z[1], rc(rng), rc(rng), rc(rng)};
  const cplx got = v_sum(v, {1, 0}, std::nullopt, kPar);
  const cplx expect = v_term(v, {0, 0}, kPar) + v_term(v, {1, 0}, kPar);
  REQUIRE(rel_diff(got, expect) < 1e-14);
  REQUIRE(v_term(v, {0, 0}, kPar) == cplx(1.0));
}

TEST_CASE("scaling invariance and normal forms") {
  auto rng = seeded("v-scale");
  SeriesSpec s;
  s.v.a = rc(rng);
  s.v.b = {rc(rng), rc(rng), rc(rng)};
  s.v.z = {rc(rng)};
  s.v.c = {kPar.q_pow(-2) / s.v.z[0], rc(rng), rc(rng), rc(rng)};
  s.c_termination = MultiIndex{2};
  const cplx t = rc(rng);
  SeriesSpec scaled = s;
  scaled.v.a *= t;
  for (cplx& c : scaled.v.c) c *= t;
  for (cplx& z : scaled.v.z) z /= t;
  REQUIRE(rel_diff(s.value(kPar), scaled.value(kPar)) < 1e-12);
  const SeriesSpec n1 = s.normal_form(), n2 = scaled.normal_form();
  REQUIRE(rel_diff(n1.v.a, n2.v.a) < 1e-12);
  for (std::size_t i = 0; i < n1.v.c.size(); ++i) REQUIRE(rel_diff(n1.v.c[i], n2.v.c[i]) < 1e-12);
  for (std::size_t i = 0; i < n1.v.z.size(); ++i) REQUIRE(rel_diff(n1.v.z[i], n2.v.z[i]) < 1e-12);
}

TEST_CASE("termination validation") {
  auto rng = seeded("v-term");
  SeriesSpec s;
  s.v.a = rc(rng);
  s.v.b = {rc(rng), rc(rng)};
  s.v.z = {rc(rng)};
  s.v.c = {rc(rng), rc(rng), rc(rng)};
  REQUIRE_THROWS_AS(s.value(kPar), domain_error);  // nonterminating
  s.b_termination = 2;
  REQUIRE_THROWS_AS(s.value(kPar), domain_error);  // b_1 != q^{-2}
  s.v.b[0] = kPar.q_pow(-2);
  REQUIRE_NOTHROW(s.value(kPar));
  s.b_termination.reset();
  s.c_termination = MultiIndex{1};
  REQUIRE_THROWS_AS(s.value(kPar), domain_error);  // c_1 != q^{-1}/z_1
  s.v.c[0] = kPar.q_pow(-1) / s.v.z[0];
  REQUIRE_NOTHROW(s.value(kPar));
}

TEST_CASE("one-variable Jackson summation") {
  auto rng = seeded("jackson");
  for (int nmax = 1; nmax <= 4; ++nmax) {
    double worst = 0.0;
    for (int t = 0; t < 5; ++t)
      worst = std::max(worst, conditioned_residual([&] {
        const cplx a = rc(rng), b = rc(rng), c = rc(rng), d = rc(rng);
        const cplx e = a * a * kPar.q_pow(nmax + 1.0) / (b * c * d);
        return jackson_pair(a, b, c, d, e, nmax, kPar);
      }));
    REQUIRE(worst < 1e-10);
  }
}

TEST_CASE("one-variable Bailey transformation") {
  auto rng = seeded("bailey");
  for (int nmax = 0; nmax <= 3; ++nmax) {
    double worst = 0.0;
    for (int t = 0; t < 5; ++t)
      worst = std::max(worst, conditioned_residual([&] {
        const cplx a = rc(rng), b = rc(rng), c = rc(rng), d = rc(rng), e = rc(rng), f = rc(rng);
        const cplx g = a * a * a * kPar.q_pow(nmax + 2.0) / (b * c * d * e * f);
        return bailey_pair(a, b, c, d, e, f, g, nmax, kPar);
      }));
    REQUIRE(worst < 1e-10);
  }
}

TEST_CASE("composition-sum transformation") {
  auto rng = seeded("comp");
  for (auto [m, n, nmax] : {std::tuple{1, 1, 2}, {2, 1, 3}, {1, 2, 2}, {2, 2, 2}, {3, 2, 3},
                            {2, 3, 4}}) {
    double worst = 0.0;
    for (int t = 0; t < 3; ++t)
      worst = std::max(worst, conditioned_residual([&] {
        std::vector<cplx> as, w, z;
        for (int i = 0; i < m + n; ++i) as.push_back(rc(rng));
        for (int i = 0; i < n; ++i) z.push_back(rc(rng));
        cplx prod(1.0);
        for (cplx x : z) prod *= x;
        for (cplx x : as) prod *= x;
        for (int i = 0; i + 1 < m; ++i) {
          w.push_back(rc(rng));
          prod /= w.back();
        }
        w.push_back(prod);
        return composition_transform_pair(as, w, z, nmax, kPar);
      }));
    REQUIRE(worst < 1e-9);
  }
}

TEST_CASE("multiple Jackson summation") {
  auto rng = seeded("mjackson");
  for (auto [n, caps] : {std::pair<int, MultiIndex>{1, {3}}, {2, {2, 1}}, {2, {2, 2}},
                         {3, {2, 2, 1}}}) {
    double worst = 0.0;
    for (int t = 0; t < 3; ++t)
      worst = std::max(worst, conditioned_residual([&] {
        const auto z = sample_vector(rng, {}, n);
        const cplx a = rc(rng), b = rc(rng), c = rc(rng), d = rc(rng);
        const cplx e = a * a * kPar.q_pow(mi_sum(caps) + 1.0) / (b * c * d);
        return multiple_jackson_pair(a, b, c, d, e, z, caps, kPar);
      }));
    REQUIRE(worst < 1e-9);
  }
}

TEST_CASE("boxed Jackson summation") {
  auto rng = seeded("bjackson");
  for (auto [n, caps] : {std::pair<int, MultiIndex>{1, {3}}, {2, {2, 1}}, {2, {3, 3}},
                         {3, {1, 1, 2}}}) {
    double worst = 0.0;
    for (int t = 0; t < 3; ++t)
      worst = std::max(worst, conditioned_residual([&] {
        const auto x = sample_vector(rng, {}, n);
        const cplx a = rc(rng), b = rc(rng), c = rc(rng), d = rc(rng);
        const cplx e = a * a * kPar.q_pow(mi_sum(caps) + 1.0) / (b * c * d);
        return boxed_jackson_pair(a, b, c, d, e, x, caps, kPar);
      }));
    REQUIRE(worst < 1e-9);
  }
}

TEST_CASE("multiple-to-multiple transformation") {
  auto rng = seeded("mtransform");
  for (auto [mc, nc] : {std::pair<MultiIndex, MultiIndex>{{2}, {2}},
                        {{1}, {2, 1}},
                        {{2, 1}, {2}},
                        {{1, 2}, {2, 1}}}) {
    double worst = 0.0;
    for (int t = 0; t < 3; ++t)
      worst = std::max(worst, conditioned_residual([&] {
        const auto w = sample_vector(rng, {}, int(mc.size()));
        const auto z = sample_vector(rng, {}, int(nc.size()));
        const cplx a = rc(rng), b = rc(rng), c = rc(rng), d = rc(rng);
        const cplx e = a * a * kPar.q_pow(1.0 + mi_sum(nc) - mi_sum(mc)) / (b * c * d);
        return multiple_transform_pair(a, b, c, d, e, w, z, mc, nc, kPar);
      }));
    REQUIRE(worst < 1e-9);
  }
}

TEST_CASE("the transformation degenerates to the multiple Jackson sum at m = 0") {
  auto rng = seeded("m0");
  const MultiIndex nc{2, 1};
  const auto z = sample_vector(rng, {}, 2);
  const cplx a = rc(rng), b = rc(rng), c = rc(rng), d = rc(rng);
  const cplx e = a * a * kPar.q_pow(1.0 + mi_sum(nc)) / (b * c * d);
  const auto tr = multiple_transform_pair(a, b, c, d, e, {}, z, {}, nc, kPar);
  const auto js = multiple_jackson_pair(a, b, c, d, e, z, nc, kPar);
  REQUIRE(rel_diff(tr.lhs, js.lhs) < 1e-12);
  REQUIRE(rel_diff(tr.rhs, js.rhs) < 1e-10);
}

TEST_CASE("balance product bookkeeping") {
  auto rng = seeded("balance");
  // a balanced 12V11-style instance stays balanced as a VSeries
  const cplx a = rc(rng), b = rc(rng), c = rc(rng), d = rc(rng);
  const int nmax = 2;
  const cplx e = a * a * kPar.q_pow(nmax + 1.0) / (b * c * d);
  VSeries v;
  v.a = a;
  v.b = {b, c};
  const cplx z0 = rc(rng);
  v.c = {kPar.q_pow(-nmax) / z0, d, e};
  v.z = {z0};
  // m = 0: balanced means prod b prod c prod z = q a^2
  REQUIRE(rel_diff(v.balance_product(), kPar.q * a * a) < 1e-12);
}
