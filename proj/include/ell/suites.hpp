#ifndef ELL_SUITES_HPP
#define ELL_SUITES_HPP

// Randomized verification suites.  Every suite draws each trial from its own
// substream keyed by (seed, suite-id, trial), so reports are bit-identical
// across runs and thread counts; singular or cancellation-dominated samples
// are rejected and resampled from the same substream (at most 100 retries).

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ell/biortho.hpp"
#include "ell/lattice.hpp"
#include "ell/rng.hpp"
#include "ell/series.hpp"
#include "ell/sixj.hpp"
#include "ell/subsets.hpp"
#include "ell/weight.hpp"

namespace ell {

struct SuiteConfig {
  std::uint64_t seed = 42;
  int threads = 1;
  std::optional<int> trials_override;
  // nullopt selects every suite; an empty list selects none
  std::optional<std::vector<std::string>> suites;
  std::map<std::string, double> tolerance_overrides;
  ParamRanges ranges;
  int max_lattice_rows = 4;  // row/column cap for lattice-backed suites

  void validate() const {
    if (threads < 1 || threads > 256) throw domain_error("SuiteConfig: threads out of range");
    if (trials_override && *trials_override < 1)
      throw domain_error("SuiteConfig: trials must be positive");
    for (const auto& [id, tol] : tolerance_overrides)
      if (!(tol > 0.0)) throw domain_error("SuiteConfig: tolerances must be positive");
    if (max_lattice_rows < 1 || max_lattice_rows * max_lattice_rows > kMaxLatticeCells)
      throw domain_error("SuiteConfig: lattice cap outside module limits");
    if (ranges.p_abs_max >= 1.0 || ranges.p_abs_min < 0.0 ||
        ranges.p_abs_min > ranges.p_abs_max)
      throw domain_error("SuiteConfig: invalid p range");
    if (ranges.q_abs_min <= 0.0 || ranges.q_abs_min > ranges.q_abs_max)
      throw domain_error("SuiteConfig: invalid q range");
    if (ranges.x_abs_min <= 0.0 || ranges.x_abs_min > ranges.x_abs_max)
      throw domain_error("SuiteConfig: invalid spectral range");
  }
};

struct SuiteResult {
  std::string id;
  std::string identity;
  int trials = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;  // nonempty when a trial failed to evaluate
  double seconds = 0.0;
  std::vector<double> per_trial;
};

struct Report {
  std::vector<SuiteResult> suites;

  bool pass() const {
    for (const auto& s : suites)
      if (!s.pass) return false;
    return true;
  }
  bool had_error() const {
    for (const auto& s : suites)
      if (!s.error.empty()) return true;
    return false;
  }
  int exit_code() const { return had_error() ? 3 : (pass() ? 0 : 1); }
};

namespace suites_detail {

struct TrialContext {
  SplitMix64 rng;
  const SuiteConfig* cfg;

  cplx value() { return rng.annulus(cfg->ranges.x_abs_min, cfg->ranges.x_abs_max); }
  std::vector<cplx> values(int n) { return sample_vector(rng, cfg->ranges, n); }
  ParamBundle params() { return sample_params(rng, cfg->ranges); }
};

using TrialFn = std::function<double(TrialContext&, int trial)>;

struct SuiteDef {
  std::string id;
  std::string identity;
  int default_trials;
  double default_tolerance;
  TrialFn run;
};

inline double pair_residual_checked(const IdentitySample& s) {
  s.reject_if_cancellation_dominated();
  return s.residual();
}

inline SignVector signs_of_mask(std::uint32_t m, int n) {
  SignVector v;
  for (int i = 0; i < n; ++i) v.push_back((m >> i) & 1u ? 1 : -1);
  return v;
}

template <class F>
void for_all_sixj(cplx lam, const std::vector<cplx>& w, const std::vector<cplx>& z, F&& fn) {
  const int m = int(w.size()), n = int(z.size());
  for (std::uint32_t s = 0; s <= full_mask(m); ++s)
    for (std::uint32_t t = 0; t <= full_mask(m); ++t)
      for (std::uint32_t u = 0; u <= full_mask(n); ++u)
        for (std::uint32_t v = 0; v <= full_mask(n); ++v) {
          if (__builtin_popcount(s) + __builtin_popcount(u) !=
              __builtin_popcount(t) + __builtin_popcount(v))
            continue;
          SixJIndex ix;
          ix.lambda = lam;
          ix.w = w;
          ix.z = z;
          ix.S = SubsetOfN(m, s);
          ix.T = SubsetOfN(m, t);
          ix.U = SubsetOfN(n, u);
          ix.V = SubsetOfN(n, v);
          fn(ix);
        }
}

// --- suite bodies ----------------------------------------------------------

inline double theta_trial(TrialContext& c) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const auto& par = pb.par;
    const cplx x = c.rng.annulus(0.1, 10.0);
    double worst = rel_diff(theta(cplx(1.0) / x, par), -theta(x, par) / x);
    worst = std::max(worst, rel_diff(theta(par.p * x, par), -theta(x, par) / x));
    const cplx y = c.value();
    const int k = c.rng.uniform_int(-5, 5), l = c.rng.uniform_int(-5, 5);
    worst = std::max(worst, rel_diff(pochhammer(y, k + l, par),
                                     pochhammer(y, k, par) * pochhammer(par.q_pow(k) * y, l, par)));
    const int kk = c.rng.uniform_int(0, 6);
    const cplx flip = (kk % 2 ? -1.0 : 1.0) * par.q_pow(0.5 * kk * (kk - 1)) *
                      std::pow(y, double(kk)) * pochhammer(par.q_pow(1 - kk) / y, kk, par);
    worst = std::max(worst, rel_diff(pochhammer(y, kk, par), flip));
    const EllipticParams trig = EllipticParams::make(cplx(0.0), par.q);
    worst = std::max(worst, std::abs(theta(y, trig) - (cplx(1.0) - y)));
    const cplx l1 = c.rng.box(5.0, 2.0), l2 = c.rng.box(5.0, 2.0);
    worst = std::max(worst, rel_diff(par.q_pow(l1 + l2), par.q_pow(l1) * par.q_pow(l2)));
    return worst;
  });
}

inline cplx domain_wall_pf_scaled(cplx lambda, const std::vector<cplx>& w,
                                  const std::vector<cplx>& z, const EllipticParams& par,
                                  double* scale) {
  return partition_function(lambda, w, z, LatticeBoundary::domain_wall(int(w.size())), par, scale);
}

inline double dwpf_trial(TrialContext& c, int n) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const auto& par = pb.par;
    const auto w = c.values(n);
    const auto z = c.values(n);
    double zscale = 1.0, pscale = 1.0;
    const cplx zval = domain_wall_pf_scaled(pb.lambda, w, z, par, &zscale);
    cplx pre(1.0);
    for (int i = 0; i < n; ++i) pre *= theta(par.q, par);
    const cplx rhs1 = guarded_div(pre, pochhammer(par.q_pow(-pb.lambda - double(n)), n, par),
                                  "dwpf suite") *
                      phi(w, z, par.q_pow(-pb.lambda), par, &pscale);
    IdentitySample s1{zval, rhs1, std::max(zscale, pscale)};
    double worst = pair_residual_checked(s1);

    double zscale2 = 1.0, pscale2 = 1.0;
    const cplx lhs2 = partition_function(
        pb.lambda, w, z,
        {repeat_sign(-1, n), repeat_sign(1, n), repeat_sign(1, n), repeat_sign(-1, n)}, par,
        &zscale2);
    const cplx rhs2 =
        guarded_div(pre, pochhammer(par.q_pow(pb.lambda + double(2 - n)), n, par), "dwpf suite") *
        phi(w, z, par.q_pow(pb.lambda + 2.0), par, &pscale2);
    IdentitySample s2{lhs2, rhs2, std::max(zscale2, pscale2)};
    return std::max(worst, pair_residual_checked(s2));
  });
}

inline double lattice_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const auto& par = pb.par;
    const cplx lam = pb.lambda;
    double worst = 0.0;
    if (trial < 3) {
      // delta pairing at coincident spectral parameters, all boundaries
      const int n = trial + 1;
      const auto z = c.values(n);
      for (std::uint32_t am = 0; am <= full_mask(n); ++am)
        for (std::uint32_t bm = 0; bm <= full_mask(n); ++bm)
          for (std::uint32_t cm = 0; cm <= full_mask(n); ++cm)
            for (std::uint32_t dm = 0; dm <= full_mask(n); ++dm) {
              const SignVector a = signs_of_mask(am, n), b = signs_of_mask(bm, n);
              const SignVector cc = signs_of_mask(cm, n), d = signs_of_mask(dm, n);
              const cplx got = partition_function(lam, z, z, {a, b, cc, d}, par);
              const cplx expect = (a == d && b == cc) ? cplx(1.0) : cplx(0.0);
              worst = std::max(worst, std::abs(got - expect));
            }
      return worst;
    }
    const int m = (trial % 2) ? 2 : 2, n = (trial % 2) ? 2 : 3;
    const auto w = c.values(m);
    const auto z = c.values(n);
    const SignVector a = signs_of_mask(std::uint32_t(c.rng.next()), m);
    const SignVector b = signs_of_mask(std::uint32_t(c.rng.next()), m);
    const SignVector cc = signs_of_mask(std::uint32_t(c.rng.next()), n);
    const SignVector d = signs_of_mask(std::uint32_t(c.rng.next()), n);
    const LatticeBoundary bd{a, b, cc, d};
    double fscale = 1.0;
    const cplx full = partition_function(lam, w, z, bd, par, &fscale);
    // column split
    cplx sum(0.0);
    const std::vector<cplx> wl{w.begin(), w.begin() + 1}, wr{w.begin() + 1, w.end()};
    for (std::uint32_t xm = 0; xm <= full_mask(n); ++xm) {
      const SignVector x = signs_of_mask(xm, n);
      sum += partition_function(lam, wl, z, {{a[0]}, {b[0]}, cc, x}, par) *
             partition_function(lam - double(b[0]), wr, z,
                                {{a.begin() + 1, a.end()}, {b.begin() + 1, b.end()}, x, d}, par);
    }
    worst = std::max(worst, pair_residual_checked({full, sum, fscale}));
    // row split
    sum = cplx(0.0);
    const std::vector<cplx> zt{z.begin(), z.begin() + 1}, zb{z.begin() + 1, z.end()};
    for (std::uint32_t xm = 0; xm <= full_mask(m); ++xm) {
      const SignVector x = signs_of_mask(xm, m);
      sum += partition_function(lam, w, zt, {x, b, {cc[0]}, {d[0]}}, par) *
             partition_function(lam - double(cc[0]), w, zb,
                                {a, x, {cc.begin() + 1, cc.end()}, {d.begin() + 1, d.end()}}, par);
    }
    worst = std::max(worst, pair_residual_checked({full, sum, fscale}));
    // crossing
    if (bd.parity_ok())
      worst = std::max(worst, pair_residual_checked({full, crossing_rhs(lam, w, z, bd, par),
                                                     fscale}));
    // square lattice with two domain-wall corners vs the plain pairing
    {
      const int mm = 2, nn = (trial % 2) ? 2 : 1;
      const auto ww = c.values(mm);
      const auto zz = c.values(nn);
      const SignVector sa = signs_of_mask(std::uint32_t(c.rng.next()), mm);
      const SignVector sc = signs_of_mask(std::uint32_t(c.rng.next()), mm);
      const SignVector sb = signs_of_mask(std::uint32_t(c.rng.next()), nn);
      const SignVector sd = signs_of_mask(std::uint32_t(c.rng.next()), nn);
      std::vector<cplx> cols = ww, rows = zz;
      cols.insert(cols.end(), zz.begin(), zz.end());
      rows.insert(rows.end(), ww.begin(), ww.end());
      SignVector top = sa, left = sd;
      top.insert(top.end(), sb.begin(), sb.end());
      left.insert(left.end(), sc.begin(), sc.end());
      double ls = 1.0;
      const cplx lhs = partition_function(
          lam, cols, rows, {repeat_sign(1, mm + nn), top, left, repeat_sign(1, mm + nn)}, par,
          &ls);
      const cplx rhs = partition_function(lam, ww, zz, {sc, sa, sd, sb}, par);
      worst = std::max(worst, pair_residual_checked({lhs, rhs, ls}));
    }
    return worst;
  });
}

inline double phi_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const auto& par = pb.par;
    double worst = 0.0;
    const int kind = trial % 3;
    if (kind == 0) {
      // the three symmetry lines, n = 1..3
      for (int n = 1; n <= 3; ++n) {
        const auto w = c.values(n);
        const auto z = c.values(n);
        const cplx a = c.value();
        double s0 = 1.0;
        const cplx base = phi(w, z, a, par, &s0);
        auto inv = [](std::vector<cplx> v) {
          for (cplx& x : v) x = cplx(1.0) / x;
          return v;
        };
        worst = std::max(worst, pair_residual_checked({base, phi(inv(z), inv(w), a, par), s0}));
        cplx pref = par.q_pow(-n) * std::pow(a, double(n));
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            pref *= guarded_div(theta(w[i] / z[j], par), theta(par.q * w[i] / z[j], par),
                                "phi suite");
        std::vector<cplx> qzi = inv(z);
        for (cplx& x : qzi) x *= par.q;
        worst = std::max(worst, pair_residual_checked(
                                    {base, pref * phi(inv(w), qzi, par.q_pow(n + 2.0) / a, par),
                                     s0}));
        std::vector<cplx> qw = w;
        for (cplx& x : qw) x *= par.q;
        worst = std::max(
            worst,
            pair_residual_checked({base, pref * phi(z, qw, par.q_pow(n + 2.0) / a, par), s0}));
      }
      return worst;
    }
    if (kind == 1) {
      // geometric factorizations, n <= 4
      for (int n = 2; n <= 4; ++n) {
        const auto w = c.values(n);
        const cplx zeta = c.value(), a = c.value();
        std::vector<cplx> z;
        for (int j = 0; j < n; ++j) z.push_back(par.q_pow(j) * zeta);
        double s0 = 1.0;
        const cplx lhs = phi(w, z, a, par, &s0);
        cplx rhs = pochhammer(par.q, n, par);
        for (int i = 0; i < n; ++i) rhs = guarded_div(rhs, theta(par.q, par), "phi suite");
        cplx rhs1 = rhs;
        for (int j = 0; j < n; ++j)
          rhs1 *= guarded_div(theta(par.q_pow(-n) * a * w[j] / zeta, par),
                              theta(par.q * w[j] / zeta, par), "phi suite");
        worst = std::max(worst, pair_residual_checked({lhs, rhs1, s0}));

        const cplx omega = c.value();
        std::vector<cplx> wg;
        for (int j = 0; j < n; ++j) wg.push_back(par.q_pow(j) * omega);
        const auto z2 = c.values(n);
        double s1 = 1.0;
        const cplx lhs2 = phi(wg, z2, a, par, &s1);
        cplx rhs2 = rhs;
        for (int j = 0; j < n; ++j)
          rhs2 *= guarded_div(theta(par.q_pow(-1) * a * omega / z2[j], par),
                              theta(par.q_pow(n) * omega / z2[j], par), "phi suite");
        worst = std::max(worst, pair_residual_checked({lhs2, rhs2, s1}));
      }
      return worst;
    }
    // block decompositions over all ordered partitions of [3]
    const int n = 3;
    const auto w = c.values(n);
    const auto z = c.values(n);
    const cplx a = c.value();
    double s0 = 1.0;
    const cplx base = phi(w, z, a, par, &s0);
    for (const auto& blocks : ordered_set_partitions(n))
      worst = std::max(worst,
                       pair_residual_checked({base, phi_decomposed(w, z, a, blocks, par), s0}));
    return worst;
  });
}

inline double sixj_agree_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const auto& par = pb.par;
    double worst = 0.0;
    if (trial < 5) {
      for (auto [m, n] : {std::pair{1, 1}, {1, 2}, {2, 1}, {2, 2}}) {
        const auto w = c.values(m);
        const auto z = c.values(n);
        for_all_sixj(pb.lambda, w, z, [&](const SixJIndex& ix) {
          const cplx oracle = r6j_lattice_oracle(ix, par);
          for (auto method : {SixJMethod::mcmt, SixJMethod::rat1, SixJMethod::rat2})
            worst = std::max(worst, rel_diff_floor(r6j(ix, method, par), oracle, 1.0));
        });
      }
      return worst;
    }
    // size-3 spot checks between the three formulas (the oracle exceeds the cap)
    const auto w = c.values(3);
    const auto z = c.values(3);
    for (int rep = 0; rep < 6; ++rep) {
      SixJIndex ix;
      ix.lambda = pb.lambda;
      ix.w = w;
      ix.z = z;
      const std::uint32_t s = c.rng.next() & 7u, t = c.rng.next() & 7u, u = c.rng.next() & 7u;
      const int vlen = __builtin_popcount(s) + __builtin_popcount(u) - __builtin_popcount(t);
      if (vlen < 0 || vlen > 3) continue;
      std::uint32_t v = 0;
      // pick a deterministic subset of size vlen
      for (int i = 0; i < vlen; ++i) v |= 1u << i;
      ix.S = SubsetOfN(3, s);
      ix.T = SubsetOfN(3, t);
      ix.U = SubsetOfN(3, u);
      ix.V = SubsetOfN(3, v);
      const cplx base = r6j_mcmt(ix, par);
      worst = std::max(worst, rel_diff_floor(r6j_rat1(ix, par), base, 1.0));
      worst = std::max(worst, rel_diff_floor(r6j_rat2(ix, par), base, 1.0));
    }
    return worst;
  });
}

inline double sixj_qdyb_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const int L = (trial % 2) ? 2 : 1;
    const auto u = c.values(L);
    const auto w = c.values(1);
    const auto z = c.values(1);
    return check_qdyb(pb.lambda, u, w, z, pb.par);
  });
}

inline double sixj_unitarity_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const std::pair<int, int> sizes[] = {{1, 1}, {2, 1}, {2, 2}};
    const auto [m, n] = sizes[trial % 3];
    const auto w = c.values(m);
    const auto z = c.values(n);
    return check_unitarity(pb.lambda, w, z, pb.par);
  });
}

inline double sixj_symmetry_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const auto& par = pb.par;
    const std::pair<int, int> sizes[] = {{1, 1}, {2, 1}, {1, 2}, {2, 2}};
    const auto [m, n] = sizes[trial % 4];
    const auto w = c.values(m);
    const auto z = c.values(n);
    double worst = 0.0;
    for_all_sixj(pb.lambda, w, z, [&](const SixJIndex& ix) {
      const cplx base = r6j_mcmt(ix, par);
      for (auto kind :
           {SixJSymmetry::op_flip, SixJSymmetry::antipode_flip, SixJSymmetry::combined})
        worst = std::max(worst, rel_diff_floor(base, r6j_symmetry_rhs(ix, kind, par), 1.0));
    });
    // the closed V-empty form against the double-subset sum
    const auto w3 = c.values(3);
    const auto z2 = c.values(2);
    for (std::uint32_t s = 0; s <= full_mask(3); ++s)
      for (std::uint32_t t = 0; t <= full_mask(3); ++t)
        for (std::uint32_t uu = 0; uu <= full_mask(2); ++uu) {
          if (__builtin_popcount(s) + __builtin_popcount(uu) != __builtin_popcount(t)) continue;
          SixJIndex ix;
          ix.lambda = pb.lambda;
          ix.w = w3;
          ix.z = z2;
          ix.S = SubsetOfN(3, s);
          ix.T = SubsetOfN(3, t);
          ix.U = SubsetOfN(2, uu);
          ix.V = SubsetOfN(2, 0);
          worst = std::max(worst, rel_diff_floor(r6j_rese(ix, par), r6j_mcmt(ix, par), 1.0));
        }
    return worst;
  });
}

inline double sixj_summation_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const auto& par = pb.par;
    const int m = (trial % 2) ? 1 : 2, n = 1;
    const auto w = c.values(m);
    const auto z = c.values(n);
    double worst = 0.0;
    for (std::uint32_t s = 0; s <= full_mask(m); ++s)
      for (std::uint32_t t = 0; t <= full_mask(m); ++t)
        for (std::uint32_t u = 0; u <= full_mask(n); ++u) {
          if ((s & ~t) != 0) continue;
          if (__builtin_popcount(s) + __builtin_popcount(u) != __builtin_popcount(t)) continue;
          const auto pair = vempty_summation_pair(pb.lambda, w, z, SubsetOfN(m, s),
                                                  SubsetOfN(m, t), SubsetOfN(n, u), par);
          worst = std::max(worst, pair_residual_checked(pair));
        }
    return worst;
  });
}

inline double ft_jackson_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const int nmax = trial % 4 + 1;
    const cplx a = c.value(), b = c.value(), cc = c.value(), d = c.value();
    const cplx e = a * a * pb.par.q_pow(nmax + 1.0) / (b * cc * d);
    return pair_residual_checked(jackson_pair(a, b, cc, d, e, nmax, pb.par));
  });
}

inline double ebt_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const int nmax = trial % 4;
    const cplx a = c.value(), b = c.value(), cc = c.value(), d = c.value(), e = c.value(),
               f = c.value();
    const cplx g = a * a * a * pb.par.q_pow(nmax + 2.0) / (b * cc * d * e * f);
    return pair_residual_checked(bailey_pair(a, b, cc, d, e, f, g, nmax, pb.par));
  });
}

inline double rjs_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const MultiIndex caps_list[] = {{2}, {2, 1}, {2, 2}, {2, 2, 1}};
    const MultiIndex caps = caps_list[trial % 4];
    const auto z = c.values(int(caps.size()));
    const cplx a = c.value(), b = c.value(), cc = c.value(), d = c.value();
    const cplx e = a * a * pb.par.q_pow(mi_sum(caps) + 1.0) / (b * cc * d);
    return pair_residual_checked(multiple_jackson_pair(a, b, cc, d, e, z, caps, pb.par));
  });
}

inline double sjs_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const MultiIndex caps_list[] = {{3}, {2, 1}, {3, 3}, {2, 3}};
    const MultiIndex caps = caps_list[trial % 4];
    const auto x = c.values(int(caps.size()));
    const cplx a = c.value(), b = c.value(), cc = c.value(), d = c.value();
    const cplx e = a * a * pb.par.q_pow(mi_sum(caps) + 1.0) / (b * cc * d);
    return pair_residual_checked(boxed_jackson_pair(a, b, cc, d, e, x, caps, pb.par));
  });
}

inline double nkt_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const std::tuple<int, int, int> sizes[] = {
        {1, 1, 3}, {2, 1, 3}, {2, 2, 2}, {3, 2, 3}, {2, 3, 4}};
    const auto [m, n, nmax] = sizes[trial % 5];
    std::vector<cplx> as, w, z;
    for (int i = 0; i < m + n; ++i) as.push_back(c.value());
    for (int i = 0; i < n; ++i) z.push_back(c.value());
    cplx prod(1.0);
    for (cplx x : z) prod *= x;
    for (cplx x : as) prod *= x;
    for (int i = 0; i + 1 < m; ++i) {
      w.push_back(c.value());
      prod /= w.back();
    }
    w.push_back(prod);
    return pair_residual_checked(composition_transform_pair(as, w, z, nmax, pb.par));
  });
}

inline double rkt_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const std::pair<MultiIndex, MultiIndex> boxes[] = {
        {{2}, {2}}, {{1}, {2, 1}}, {{2, 1}, {2}}, {{1, 2}, {2, 1}}};
    const auto& [mc, nc] = boxes[trial % 4];
    const auto w = c.values(int(mc.size()));
    const auto z = c.values(int(nc.size()));
    const cplx a = c.value(), b = c.value(), cc = c.value(), d = c.value();
    const cplx e = a * a * pb.par.q_pow(1.0 + mi_sum(nc) - mi_sum(mc)) / (b * cc * d);
    return pair_residual_checked(multiple_transform_pair(a, b, cc, d, e, w, z, mc, nc, pb.par));
  });
}

inline GeometricSixJ sample_geo(TrialContext& c, int which) {
  struct Shape {
    int M, s, t;
    std::vector<int> k, l;
    int nu, nv;
  };
  static const std::vector<Shape> shapes = {
      {1, 1, 1, {1}, {1}, 0, 0},  {2, 1, 2, {1}, {1}, 1, 0},    {2, 2, 1, {1}, {1}, 0, 1},
      {2, 1, 1, {2}, {1}, 1, 1},  {2, 2, 2, {1, 1}, {2}, 0, 0}, {3, 2, 1, {1}, {1, 1}, 0, 1},
      {1, 0, 1, {2}, {1}, 1, 0},  {2, 0, 0, {1, 1}, {1}, 1, 1}, {3, 3, 1, {2}, {2}, 0, 2}};
  const Shape& sh = shapes[std::size_t(which) % shapes.size()];
  GeometricSixJ g;
  g.lambda = c.rng.box(c.cfg->ranges.lambda_re_max, c.cfg->ranges.lambda_im_max);
  g.omega = c.value();
  g.big_m = sh.M;
  g.s = sh.s;
  g.t = sh.t;
  g.k = sh.k;
  g.l = sh.l;
  for (std::size_t i = 0; i < sh.k.size(); ++i) g.eta.push_back(c.value());
  for (std::size_t i = 0; i < sh.l.size(); ++i) g.xi.push_back(c.value());
  const int N = mi_sum(sh.k) + mi_sum(sh.l) + sh.nu + sh.nv;
  std::vector<int> pos;
  for (int i = 0; i < N; ++i) pos.push_back(i);
  for (int i = N - 1; i > 0; --i) std::swap(pos[i], pos[int(c.rng.next() % std::uint64_t(i + 1))]);
  int at = 0;
  for (int i = 0; i < mi_sum(sh.k); ++i) g.pos_uv.push_back(pos[at++]);
  for (int i = 0; i < sh.nu; ++i) g.pos_u_only.push_back(pos[at++]);
  for (int i = 0; i < sh.nv; ++i) g.pos_v_only.push_back(pos[at++]);
  for (int i = 0; i < sh.nu + sh.nv; ++i) g.z_free.push_back(c.value());
  return g;
}

inline double sixj_special_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const auto& par = pb.par;
    GeometricSixJ g = sample_geo(c, trial);
    const SixJIndex ix = g.to_index(par);
    const cplx ref = r6j_mcmt(ix, par);
    double worst = rel_diff_floor(r6j_ahc(g, par), ref, 1.0);
    worst = std::max(worst, rel_diff_floor(r6j_iri(g, par), ref, 1.0));
    // the collapsed series realizes the multiple-to-multiple transformation
    if (!g.eta.empty() && !g.xi.empty()) {
      const VSeries v = g.series(par);
      const auto pair =
          multiple_transform_pair(v.a, v.b[0], v.b[1], v.c[0], v.c[1], g.xi, g.eta, g.l, g.k, par);
      worst = std::max(worst, pair_residual_checked(pair));
    }
    return worst;
  });
}

inline double vnm_balance_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const auto& par = pb.par;
    // scaling invariance of a terminating series
    SeriesSpec s;
    s.v.a = c.value();
    s.v.b = {c.value(), c.value(), c.value()};
    s.v.z = {c.value()};
    s.v.c = {par.q_pow(-2) / s.v.z[0], c.value(), c.value(), c.value()};
    s.c_termination = MultiIndex{2};
    const cplx t = c.value();
    SeriesSpec scaled = s;
    scaled.v.a *= t;
    for (cplx& x : scaled.v.c) x *= t;
    for (cplx& x : scaled.v.z) x /= t;
    double worst = rel_diff(s.value(par), scaled.value(par));
    // the geometric specialization's series is balanced
    GeometricSixJ g = sample_geo(c, trial);
    const VSeries v = g.series(par);
    const int qn = int(g.xi.size());
    worst = std::max(worst, rel_diff(v.balance_product(),
                                     par.q_pow(qn + 1) * std::pow(v.a, double(qn + 2))));
    return worst;
  });
}

inline const std::vector<MultiIndex>& biortho_cases() {
  static const std::vector<MultiIndex> cases{{1}, {2}, {3}, {4}, {2, 1}, {2, 2}, {3, 1}};
  return cases;
}

inline BiorthoParams sample_bp(TrialContext& c, const MultiIndex& caps) {
  BiorthoParams bp;
  bp.a = c.value();
  bp.b = c.value();
  bp.c = c.value();
  bp.x = c.values(int(caps.size()));
  bp.caps = caps;
  return bp;
}

inline double biortho_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const MultiIndex caps = biortho_cases()[std::size_t(trial) % 7];
    const BiorthoParams bp = sample_bp(c, caps);
    double worst = 0.0;
    for_each_box(caps, [&](const MultiIndex& u) {
      for_each_box(caps, [&](const MultiIndex& v) {
        worst = std::max(worst, biortho_residual(u, v, bp, pb.par));
      });
    });
    return worst;
  });
}

inline double inversion_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const MultiIndex box = biortho_cases()[std::size_t(trial) % 7];
    const auto x = c.values(int(box.size()));
    return inversion_residual(box, c.value(), c.value(), x, pb.par);
  });
}

inline double g_alt_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const MultiIndex cases[] = {{2}, {3}, {1, 1}, {2, 1}};
    const MultiIndex caps = cases[std::size_t(trial) % 4];
    const BiorthoParams bp = sample_bp(c, caps);
    MultiIndex u(caps.size());
    for (std::size_t i = 0; i < caps.size(); ++i)
      u[i] = int(c.rng.next() % std::uint64_t(caps[i] + 1));
    if (mi_sum(u) == 0) u[0] = std::min(1, caps[0]);
    return g_alt_ratio_residual(u, bp, pb.par);
  });
}

inline double biortho_direct_trial(TrialContext& c, int trial) {
  return with_genericity_retries([&] {
    auto pb = c.params();
    const MultiIndex caps = (trial % 2) ? MultiIndex{2} : MultiIndex{1};
    const BiorthoParams bp = sample_bp(c, caps);
    double worst = 0.0;
    for_each_box(caps, [&](const MultiIndex& u) {
      for_each_box(caps, [&](const MultiIndex& v) {
        worst = std::max(worst, direct_route_residual(u, v, bp, pb.par));
      });
    });
    return worst;
  });
}

inline const std::vector<SuiteDef>& registry() {
  static const std::vector<SuiteDef> defs = {
      {"theta", "theta kernel: inversion, quasi-periodicity, Pochhammer splitting, sign flip, "
                "p = 0 degeneration, q-power additivity",
       1000, 1e-11, [](TrialContext& c, int) { return theta_trial(c); }},
      {"dwpf", "domain-wall partition function vs the weight function, both boundary "
               "orientations, n = 1..4",
       200, 1e-8, [](TrialContext& c, int t) { return dwpf_trial(c, t / 50 + 1); }},
      {"lattice", "splitting recursions, coincident-parameter delta pairing, crossing symmetry, "
                  "domain-wall-cornered square lattice",
       12, 1e-9, lattice_trial},
      {"phi", "weight function symmetries, geometric factorizations, block decompositions",
       30, 1e-10, phi_trial},
      {"sixj-agree", "four-way agreement of the braiding coefficients: two explicit sums, the "
                     "asymmetric expressions, and the lattice oracle, M,N <= 2 complete plus "
                     "size-3 spot checks",
       10, 1e-7, sixj_agree_trial},
      {"sixj-qdyb", "dynamical hexagon relation for the braiding at sizes (1,1,1) and (2,1,1)",
       6, 1e-7, sixj_qdyb_trial},
      {"sixj-unitarity", "unitarity of the braiding at sizes (1,1), (2,1), (2,2)",
       6, 1e-8, sixj_unitarity_trial},
      {"sixj-symmetry", "braid symmetries and the closed V-empty form",
       10, 1e-8, sixj_symmetry_trial},
      {"sixj-summation", "V-empty summation corollary at (M,N) = (2,1) and (1,1)",
       8, 1e-8, sixj_summation_trial},
      {"ft_jackson", "one-variable elliptic Jackson summation, N <= 4", 100, 1e-9,
       ft_jackson_trial},
      {"ebt", "one-variable elliptic Bailey transformation, N <= 3", 100, 1e-9, ebt_trial},
      {"rjs", "multiple elliptic Jackson summation, n <= 3", 100, 1e-9, rjs_trial},
      {"sjs", "boxed multiple elliptic Jackson summation, n <= 2", 100, 1e-9, sjs_trial},
      {"nkt", "equal-weight composition-sum transformation, m,n <= 3", 100, 1e-9, nkt_trial},
      {"rkt", "multiple-to-multiple series transformation, m,n <= 2", 100, 1e-8, rkt_trial},
      {"sixj-special", "geometric specialization: collapsed series vs the general formula, and "
                       "its transformation partner",
       40, 1e-8, sixj_special_trial},
      {"vnm-balance", "series scaling invariance and balance of the collapsed series",
       40, 1e-12, vnm_balance_trial},
      {"biortho", "biorthogonality over complete grids, n <= 2", 21, 1e-8, biortho_trial},
      {"inversion", "triangular matrix-inversion pair", 21, 1e-9, inversion_trial},
      {"g-alt", "y-independence probe of the factor joining g to its transformation partner "
                "(known to fail: the factor depends on y; see README)",
       8, 1e-8, g_alt_trial},
      {"biortho-direct", "inversion-based rederivation of the biorthogonality delta",
       6, 1e-8, biortho_direct_trial},
  };
  return defs;
}

}  // namespace suites_detail

inline std::vector<std::string> suite_ids() {
  std::vector<std::string> ids;
  for (const auto& d : suites_detail::registry()) ids.push_back(d.id);
  return ids;
}

/// Run the selected suites.  Trials are distributed over a small thread pool;
/// results do not depend on the thread count.
inline Report run_suites(const SuiteConfig& cfg) {
  cfg.validate();
  struct Task {
    const suites_detail::SuiteDef* def;
    std::size_t suite_index;
    int trial;
  };
  std::vector<const suites_detail::SuiteDef*> selected;
  if (cfg.suites) {
    for (const auto& want : *cfg.suites) {
      const suites_detail::SuiteDef* found = nullptr;
      for (const auto& d : suites_detail::registry())
        if (d.id == want) found = &d;
      if (!found) throw domain_error("unknown suite id: " + want);
      selected.push_back(found);
    }
  } else {
    for (const auto& d : suites_detail::registry()) selected.push_back(&d);
  }

  Report report;
  std::vector<Task> tasks;
  for (std::size_t si = 0; si < selected.size(); ++si) {
    const auto& d = *selected[si];
    SuiteResult r;
    r.id = d.id;
    r.identity = d.identity;
    r.trials = cfg.trials_override ? *cfg.trials_override : d.default_trials;
    r.tolerance = d.default_tolerance;
    if (auto it = cfg.tolerance_overrides.find(d.id); it != cfg.tolerance_overrides.end())
      r.tolerance = it->second;
    r.per_trial.assign(std::size_t(r.trials), 0.0);
    report.suites.push_back(std::move(r));
    for (int t = 0; t < report.suites.back().trials; ++t)
      tasks.push_back(Task{selected[si], si, t});
  }

  std::vector<std::string> errors(tasks.size());
  std::vector<double> seconds(tasks.size(), 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      const auto t0 = std::chrono::steady_clock::now();
      double residual = std::numeric_limits<double>::infinity();
      try {
        suites_detail::TrialContext ctx{
            SplitMix64(substream_seed(cfg.seed, task.def->id, std::uint64_t(task.trial))), &cfg};
        residual = task.def->run(ctx, task.trial);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      report.suites[task.suite_index].per_trial[std::size_t(task.trial)] = residual;
    }
  };
  const int nthreads = std::min<int>(cfg.threads, int(tasks.size()) > 0 ? int(tasks.size()) : 1);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& suite = report.suites[tasks[i].suite_index];
    suite.seconds += seconds[i];
    if (!errors[i].empty() && suite.error.empty()) suite.error = errors[i];
  }
  for (auto& suite : report.suites) {
    suite.max_residual = 0.0;
    for (double r : suite.per_trial) suite.max_residual = std::max(suite.max_residual, r);
    suite.pass = suite.error.empty() && suite.max_residual <= suite.tolerance;
  }
  return report;
}

}  // namespace ell

#endif  // ELL_SUITES_HPP
