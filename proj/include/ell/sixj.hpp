#ifndef ELL_SIXJ_HPP
#define ELL_SIXJ_HPP

// Generalized elliptic 6j-symbols R_{SU}^{TV}(lambda; w; z), indexed by
// subsets S,T of [M] and U,V of [N].  Three independent explicit expressions
// (one symmetric double-subset sum and two asymmetric ones), a brute-force
// lattice oracle, the closed V-empty form, vanishing tests, the braid-type
// symmetries, the dynamical hexagon/unitarity checks, and the geometric
// specialization that turns the symbol into a multiple elliptic
// hypergeometric series.

#include <string>
#include <vector>

#include "ell/core.hpp"
#include "ell/lattice.hpp"
#include "ell/series.hpp"
#include "ell/subsets.hpp"
#include "ell/weight.hpp"

namespace ell {

struct SixJIndex {
  cplx lambda;
  std::vector<cplx> w;  // size M
  std::vector<cplx> z;  // size N
  SubsetOfN S, T;       // ambient M
  SubsetOfN U, V;       // ambient N

  int m() const { return int(w.size()); }
  int n() const { return int(z.size()); }
  bool parity_ok() const { return S.size() + U.size() == T.size() + V.size(); }
  int level() const { return S.size() + U.size(); }

  void validate() const {
    if (S.ambient != m() || T.ambient != m() || U.ambient != n() || V.ambient != n())
      throw domain_error("SixJIndex: subset ambient does not match spectral vector length");
  }
};

enum class SixJMethod { mcmt, rat1, rat2, lattice_oracle, specialized_ahc, specialized_iri };

inline const char* to_string(SixJMethod m) {
  switch (m) {
    case SixJMethod::mcmt: return "mcmt";
    case SixJMethod::rat1: return "rat1";
    case SixJMethod::rat2: return "rat2";
    case SixJMethod::lattice_oracle: return "lattice_oracle";
    case SixJMethod::specialized_ahc: return "specialized_ahc";
    case SixJMethod::specialized_iri: return "specialized_iri";
  }
  return "?";
}

namespace detail {

// prod over i in rows, j in cols of theta(q x_i/y_j)/theta(x_i/y_j) (or the
// reciprocal orientation with q downstairs).
inline cplx tq(std::uint32_t rows, std::uint32_t cols, const std::vector<cplx>& x,
               const std::vector<cplx>& y, bool q_on_top, const EllipticParams& par) {
  cplx r(1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!((rows >> i) & 1u)) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (!((cols >> j) & 1u)) continue;
      const cplx top = q_on_top ? par.q * x[i] / y[j] : x[i] / y[j];
      const cplx bot = q_on_top ? x[i] / y[j] : par.q * x[i] / y[j];
      r *= guarded_div(theta(top, par), theta(bot, par), "sixj theta product");
    }
  }
  return r;
}

inline cplx theta_q_pow(int k, const EllipticParams& par) {
  cplx r(1.0);
  const cplx tq_ = theta(par.q, par);
  for (int i = 0; i < k; ++i) r *= tq_;
  return r;
}

inline cplx poch_qshift(cplx lambda, double off, int len, const EllipticParams& par) {
  return pochhammer(par.q_pow(lambda + off), len, par);
}

inline cplx poch_qshift_neg(cplx lambda, double off, int len, const EllipticParams& par) {
  return pochhammer(par.q_pow(-lambda + off), len, par);
}

}  // namespace detail

/// Symmetric double-subset sum over X in S^c & T^c, Y in U & V with
/// |Y| - |X| = L - M.
inline cplx r6j_mcmt(const SixJIndex& ix, const EllipticParams& par) {
  ix.validate();
  if (!ix.parity_ok()) return cplx(0.0);
  const int M = ix.m(), N = ix.n(), L = ix.level();
  const int nS = ix.S.size(), nT = ix.T.size(), nU = ix.U.size(), nV = ix.V.size();
  const cplx lam = ix.lambda;
  const auto& w = ix.w;
  const auto& z = ix.z;
  using detail::poch_qshift;
  using detail::tq;

  cplx pre = guarded_div(poch_qshift(lam, 2 + M + N - 2 * L, nS, par),
                         poch_qshift(lam, 2 + M - 2 * nT, nT, par) *
                             poch_qshift(lam, 2 + M + N - 2 * L, nV, par),
                         "r6j_mcmt prefactor");
  const std::uint32_t sctc = ~ix.S.mask & ~ix.T.mask & full_mask(M);
  const std::uint32_t uv = ix.U.mask & ix.V.mask;
  cplx total(0.0);
  for_each_submask(sctc, [&](std::uint32_t X) {
    const int ylen = __builtin_popcount(X) + L - M;
    for_each_submask_of_size(uv, ylen, [&](std::uint32_t Y) {
      const int nX = __builtin_popcount(X), nY = __builtin_popcount(Y);
      const std::uint32_t Xc = ~X & full_mask(M), Yc = ~Y & full_mask(N);
      const std::uint32_t ScX = ~ix.S.mask & full_mask(M) & ~X;
      const std::uint32_t TcX = ~ix.T.mask & full_mask(M) & ~X;
      const std::uint32_t VY = ix.V.mask & ~Y;
      const std::uint32_t UY = ix.U.mask & ~Y;
      cplx t = detail::theta_q_pow(nU + nV - 2 * nY, par);
      t *= guarded_div(poch_qshift(lam, 2 + N - nU - nY, nY, par),
                       detail::poch_qshift_neg(lam, 2 * nT - M, nV - nY, par), "r6j_mcmt term");
      t *= tq(ix.T.mask, TcX, w, w, true, par);
      t *= tq(ScX, X, w, w, true, par);
      t *= tq(VY, ~ix.V.mask & full_mask(N), z, z, true, par);
      t *= tq(Y, UY, z, z, true, par);
      t *= tq(Y, X, z, w, true, par);
      t *= tq(Xc, Yc, w, z, false, par);
      t *= tq(ScX, UY, w, z, true, par);
      t *= tq(TcX, VY, w, z, true, par);
      t *= phi(restrict_to(w, ScX), restrict_to(z, UY), par.q_pow(lam + double(2 + N - nU - nY)),
               par);
      t *= phi(restrict_to(w, TcX), restrict_to(z, VY), par.q_pow(-lam + double(nT - nX)), par);
      total += t;
    });
  });
  return ensure_finite(pre * total, "r6j_mcmt");
}

/// First asymmetric expression: sum over X in S & T, Y in [N] with
/// |X| + |Y| = |S| + N - |V|.
inline cplx r6j_rat1(const SixJIndex& ix, const EllipticParams& par) {
  ix.validate();
  if (!ix.parity_ok()) return cplx(0.0);
  const int M = ix.m(), N = ix.n(), L = ix.level();
  const int nS = ix.S.size(), nT = ix.T.size(), nU = ix.U.size(), nV = ix.V.size();
  const cplx lam = ix.lambda;
  const auto& w = ix.w;
  const auto& z = ix.z;
  using detail::poch_qshift;
  using detail::tq;

  cplx pre = ((nU + nV) % 2 ? -1.0 : 1.0) *
             par.q_pow(0.5 * nV * (nV - 1) + double(N) * (M - L) + 0.5 * nU * (nU + 1));
  pre *= tq(ix.V.mask, ~ix.V.mask & full_mask(N), z, z, true, par);
  pre *= tq(full_mask(M), full_mask(N), w, z, false, par);
  pre *= guarded_div(poch_qshift(lam, 1 + N - 2 * nU, nU, par),
                     poch_qshift(lam, 1 + M - 2 * nT - nV, nV, par) *
                         poch_qshift(lam, 2 + M - 2 * nT, nT, par) *
                         poch_qshift(lam, 2 + M - 2 * nT, N - nV, par),
                     "r6j_rat1 prefactor");

  std::vector<cplx> qiz = z;
  for (cplx& x : qiz) x /= par.q;
  const std::uint32_t st = ix.S.mask & ix.T.mask;
  cplx total(0.0);
  for_each_submask(st, [&](std::uint32_t X) {
    const int ylen = nS + N - nV - __builtin_popcount(X);
    for_each_submask_of_size(full_mask(N), ylen, [&](std::uint32_t Y) {
      const std::uint32_t Yc = ~Y & full_mask(N);
      const std::uint32_t UY = ix.U.mask & Y, VY = ix.V.mask & Y;
      const std::uint32_t SX = ix.S.mask & ~X, TX = ix.T.mask & ~X;
      const std::uint32_t sctc = ~ix.S.mask & ~ix.T.mask & full_mask(M);
      const std::uint32_t stxc = (ix.S.mask & ix.T.mask) & ~X;
      const std::uint32_t ucyc = ~ix.U.mask & full_mask(N) & Yc;
      const std::uint32_t vcyc = ~ix.V.mask & full_mask(N) & Yc;
      const int nUY = __builtin_popcount(UY), nVY = __builtin_popcount(VY);
      cplx t = detail::theta_q_pow(nUY + nVY, par);
      t *= tq(X, SX, w, w, true, par);
      t *= tq(TX, ~ix.T.mask & full_mask(M), w, w, true, par);
      // prod_{i in X, j in Y^c} theta(q^2 w_i/z_j)/theta(q w_i/z_j)
      for (int i = 0; i < M; ++i) {
        if (!((X >> i) & 1u)) continue;
        for (int j = 0; j < N; ++j) {
          if (!((Yc >> j) & 1u)) continue;
          t *= guarded_div(theta(par.q * par.q * w[i] / z[j], par),
                           theta(par.q * w[i] / z[j], par), "r6j_rat1 term");
        }
      }
      for (int i = 0; i < M; ++i) {
        if (!((sctc >> i) & 1u)) continue;
        for (int j = 0; j < N; ++j) {
          if (!((Y >> j) & 1u)) continue;
          t *= guarded_div(theta(z[j] / (par.q * w[i]), par), theta(z[j] / w[i], par),
                           "r6j_rat1 term");
        }
      }
      for (int i = 0; i < M; ++i) {
        if (!((stxc >> i) & 1u)) continue;
        for (int j = 0; j < N; ++j) {
          if (!((Y >> j) & 1u)) continue;
          t *= guarded_div(theta(z[j] / w[i], par), theta(z[j] / (par.q * w[i]), par),
                           "r6j_rat1 term");
        }
      }
      t *= tq(Y, Yc, z, z, true, par);
      t *= guarded_div(poch_qshift(lam, 2 + M - 2 * nT - nV + nVY, N + nS - nV - nVY, par),
                       detail::poch_qshift_neg(lam, -N + nU, nUY, par), "r6j_rat1 term");
      std::vector<cplx> mid1 = restrict_to(w, TX);
      for (cplx x : restrict_to(qiz, ucyc)) mid1.push_back(x);
      t *= phi(restrict_to(qiz, UY), mid1, par.q_pow(-lam + double(-N + nU + nUY)), par);
      std::vector<cplx> mid2 = restrict_to(w, SX);
      for (cplx x : restrict_to(qiz, vcyc)) mid2.push_back(x);
      t *= phi(restrict_to(qiz, VY), mid2, par.q_pow(lam + double(2 + M - 2 * nT - nV + nVY)), par);
      total += t;
    });
  });
  return ensure_finite(pre * total, "r6j_rat1");
}

/// Second asymmetric expression: sum over X in U^c & V^c, Y in [M] with
/// |X| + |Y| = N + |S| - |V|.
inline cplx r6j_rat2(const SixJIndex& ix, const EllipticParams& par) {
  ix.validate();
  if (!ix.parity_ok()) return cplx(0.0);
  const int M = ix.m(), N = ix.n();
  const int nS = ix.S.size(), nT = ix.T.size(), nU = ix.U.size(), nV = ix.V.size();
  const cplx lam = ix.lambda;
  const auto& w = ix.w;
  const auto& z = ix.z;
  using detail::poch_qshift;
  using detail::tq;

  cplx pre = ((nS + nT) % 2 ? -1.0 : 1.0) *
             par.q_pow(0.5 * nS * (nS - 1) + double(M) * (nU - nT) + 0.5 * nT * (nT + 1));
  pre *= tq(ix.T.mask, ~ix.T.mask & full_mask(M), w, w, true, par);
  pre *= tq(full_mask(M), full_mask(N), w, z, false, par);
  pre *= guarded_div(poch_qshift(lam, 1 + N - 2 * nU, M - nS, par),
                     poch_qshift(lam, 1 - nT, M - nT, par) *
                         poch_qshift(lam, 2 + M - 2 * nT, nT, par) *
                         poch_qshift(lam, 2 + M - 2 * nT, N - nV, par),
                     "r6j_rat2 prefactor");

  std::vector<cplx> qw = w;
  for (cplx& x : qw) x *= par.q;
  const std::uint32_t ucvc = ~ix.U.mask & ~ix.V.mask & full_mask(N);
  cplx total(0.0);
  for_each_submask(ucvc, [&](std::uint32_t X) {
    const int ylen = N + nS - nV - __builtin_popcount(X);
    for_each_submask_of_size(full_mask(M), ylen, [&](std::uint32_t Y) {
      const std::uint32_t Xc = ~X & full_mask(N), Yc = ~Y & full_mask(M);
      const std::uint32_t UcX = ~ix.U.mask & full_mask(N) & ~X;
      const std::uint32_t VcX = ~ix.V.mask & full_mask(N) & ~X;
      const std::uint32_t ScY = ~ix.S.mask & full_mask(M) & Y;
      const std::uint32_t TcY = ~ix.T.mask & full_mask(M) & Y;
      const std::uint32_t SYc = ix.S.mask & Yc, TYc = ix.T.mask & Yc;
      const std::uint32_t uvint = ix.U.mask & ix.V.mask;
      const std::uint32_t ucvcxc = ucvc & Xc;
      const int nScY = __builtin_popcount(ScY), nTcY = __builtin_popcount(TcY);
      cplx t = detail::theta_q_pow(nScY + nTcY, par);
      t *= tq(UcX, X, z, z, true, par);
      t *= tq(ix.V.mask, VcX, z, z, true, par);
      for (int i = 0; i < M; ++i) {
        if (!((Yc >> i) & 1u)) continue;
        for (int j = 0; j < N; ++j) {
          if (!((X >> j) & 1u)) continue;
          t *= guarded_div(theta(par.q * par.q * w[i] / z[j], par),
                           theta(par.q * w[i] / z[j], par), "r6j_rat2 term");
        }
      }
      for (int i = 0; i < M; ++i) {
        if (!((Y >> i) & 1u)) continue;
        for (int j = 0; j < N; ++j) {
          if ((uvint >> j) & 1u)
            t *= guarded_div(theta(z[j] / (par.q * w[i]), par), theta(z[j] / w[i], par),
                             "r6j_rat2 term");
          else if ((ucvcxc >> j) & 1u)
            t *= guarded_div(theta(z[j] / w[i], par), theta(z[j] / (par.q * w[i]), par),
                             "r6j_rat2 term");
        }
      }
      t *= tq(Yc, Y, w, w, true, par);
      t *= guarded_div(poch_qshift(lam, 2 - nT + nTcY, N + nS - nV - nTcY, par),
                       detail::poch_qshift_neg(lam, -M - N + nS + 2 * nU, nScY, par),
                       "r6j_rat2 term");
      std::vector<cplx> first1 = restrict_to(z, VcX);
      for (cplx x : restrict_to(qw, SYc)) first1.push_back(x);
      t *= phi(first1, restrict_to(qw, ScY),
               par.q_pow(-lam + double(-M - N + nS + 2 * nU + nScY)), par);
      std::vector<cplx> first2 = restrict_to(z, UcX);
      for (cplx x : restrict_to(qw, TYc)) first2.push_back(x);
      t *= phi(first2, restrict_to(qw, TcY), par.q_pow(lam + double(2 - nT + nTcY)), par);
      total += t;
    });
  });
  return ensure_finite(pre * total, "r6j_rat2");
}

inline void append_signs(SignVector& v, int sign, int count) {
  for (int i = 0; i < count; ++i) v.push_back(sign);
}

/// Lattice oracle: the (M+N)-site pairing with two domain-wall corners,
/// evaluated by exact state enumeration and divided by
/// A_{T,w}(lambda) A_{V,z}(lambda + M - 2|T|).
inline cplx r6j_lattice_oracle(const SixJIndex& ix, const EllipticParams& par) {
  ix.validate();
  if (!ix.parity_ok()) return cplx(0.0);
  const int M = ix.m(), N = ix.n();
  if ((M + N) * (M + N) > kMaxLatticeCells)
    throw capacity_error("r6j_lattice_oracle: lattice cap exceeded");
  const std::uint32_t Tc = ~ix.T.mask & full_mask(M), Vc = ~ix.V.mask & full_mask(N);
  const std::uint32_t Sc = ~ix.S.mask & full_mask(M), Uc = ~ix.U.mask & full_mask(N);

  std::vector<cplx> cols = restrict_to(ix.w, ix.T.mask);
  auto append = [](std::vector<cplx>& dst, std::vector<cplx> src) {
    dst.insert(dst.end(), src.begin(), src.end());
  };
  append(cols, restrict_to(ix.w, Tc));
  append(cols, restrict_to(ix.z, ix.V.mask));
  append(cols, restrict_to(ix.z, Vc));

  std::vector<cplx> rows = restrict_to(ix.z, Uc);
  append(rows, restrict_to(ix.z, ix.U.mask));
  append(rows, restrict_to(ix.w, Sc));
  append(rows, restrict_to(ix.w, ix.S.mask));

  LatticeBoundary b;
  b.bottom = repeat_sign(1, M + N);
  b.top = repeat_sign(1, ix.T.size());
  append_signs(b.top, -1, M - ix.T.size());
  append_signs(b.top, 1, ix.V.size());
  append_signs(b.top, -1, N - ix.V.size());
  b.left = repeat_sign(-1, N - ix.U.size());
  append_signs(b.left, 1, ix.U.size());
  append_signs(b.left, -1, M - ix.S.size());
  append_signs(b.left, 1, ix.S.size());
  b.right = repeat_sign(1, M + N);

  cplx num = partition_function(ix.lambda, cols, rows, b, par);
  cplx den = coeff_a(ix.T, ix.w, ix.lambda, par) *
             coeff_a(ix.V, ix.z, ix.lambda + double(M - 2 * ix.T.size()), par);
  return guarded_div(num, den, "r6j_lattice_oracle");
}

/// Closed form for V = empty: nonzero only when S is contained in T and
/// |T \ S| = |U|.
inline cplx r6j_rese(const SixJIndex& ix, const EllipticParams& par) {
  ix.validate();
  if (ix.V.size() != 0) throw domain_error("r6j_rese: requires V = empty");
  const int M = ix.m(), N = ix.n();
  const std::uint32_t TS = ix.T.mask & ~ix.S.mask;
  if ((ix.S.mask & ~ix.T.mask) != 0 || __builtin_popcount(TS) != ix.U.size()) return cplx(0.0);
  const int nT = ix.T.size(), nS = ix.S.size(), nU = ix.U.size();
  using detail::tq;
  cplx r = detail::theta_q_pow(nU, par);
  r *= tq(TS, ix.U.mask, ix.w, ix.z, true, par);
  r *= tq(TS, ~ix.T.mask & full_mask(M), ix.w, ix.w, true, par);
  r *= tq(ix.T.mask, full_mask(N), ix.w, ix.z, false, par);
  r *= guarded_div(detail::poch_qshift(ix.lambda, 2 + M + N - 2 * nT, nS, par),
                   detail::poch_qshift(ix.lambda, 2 + M - 2 * nT, nT, par), "r6j_rese");
  r *= phi(restrict_to(ix.w, TS), restrict_to(ix.z, ix.U.mask),
           par.q_pow(ix.lambda + double(2 + N - nU)), par);
  return ensure_finite(r, "r6j_rese");
}

/// true (with the triggering condition named) when the symbol vanishes for a
/// structural reason; false makes no claim of nonvanishing.
struct VanishingWitness {
  bool vanishes = false;
  std::string reason;
};

inline VanishingWitness vanishes_trivially(const SixJIndex& ix, const EllipticParams& par) {
  ix.validate();
  const int M = ix.m(), N = ix.n();
  if (!ix.parity_ok()) return {true, "parity: |S|+|U| != |T|+|V|"};
  const int sT = __builtin_popcount(ix.S.mask & ~ix.T.mask);
  const int tS = __builtin_popcount(ix.T.mask & ~ix.S.mask);
  const int uV = __builtin_popcount(ix.U.mask & ~ix.V.mask);
  const int vU = __builtin_popcount(ix.V.mask & ~ix.U.mask);
  if (ix.V.size() < sT) return {true, "|V| < |S\\T|"};
  if (ix.U.size() < tS) return {true, "|U| < |T\\S|"};
  if (M - ix.S.size() < uV) return {true, "|S^c| < |U\\V|"};
  if (M - ix.T.size() < vU) return {true, "|T^c| < |V\\U|"};
  auto coincidence = [&](const SubsetOfN& big, const SubsetOfN& inner, const std::vector<cplx>& x,
                         const char* what) -> VanishingWitness {
    for (int i = 0; i < big.ambient; ++i) {
      if (!big.contains(i)) continue;
      for (int j = 0; j < big.ambient; ++j) {
        if (big.contains(j)) continue;
        if (std::abs(x[j] - par.q * x[i]) <= 1e-12 * std::abs(x[j])) {
          if (!(inner.contains(i) && !inner.contains(j)))
            return {true, std::string(what) + " coincidence at (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ") outside the allowed pattern"};
        }
      }
    }
    return {};
  };
  if (auto v = coincidence(ix.T, ix.S, ix.w, "w_j = q w_i"); v.vanishes) return v;
  if (auto v = coincidence(ix.V, ix.U, ix.z, "z_j = q z_i"); v.vanishes) return v;
  return {};
}

// ---------------------------------------------------------------------------
// Geometric specialization: w_j = q^{j-1} omega with S, T terminal intervals
// of [M], and z built from geometric blocks eta_i q^{0..k_i-1} on U & V and
// q^{1-l_i..0} / xi_i on U^c & V^c; the symmetric difference keeps free
// values.  Under this data the symbol collapses to a single multiple series.

struct GeometricSixJ {
  cplx lambda;
  cplx omega;
  int big_m = 0;            // M
  int s = 0, t = 0;         // S = [M-s+1, M], T = [M-t+1, M]
  std::vector<int> pos_uv;  // 0-based positions of U & V in [N]
  std::vector<int> pos_u_only, pos_v_only;
  std::vector<cplx> eta;
  std::vector<int> k;  // |U & V| = sum k
  std::vector<cplx> xi;
  std::vector<int> l;  // |U^c & V^c| = sum l
  std::vector<cplx> z_free;  // values on the symmetric difference, ascending

  int big_n() const { return mi_sum(k) + mi_sum(l) + int(pos_u_only.size() + pos_v_only.size()); }
  int level() const { return s + mi_sum(k) + int(pos_u_only.size()); }

  SixJIndex to_index(const EllipticParams& par) const {
    const int M = big_m, N = big_n();
    if (int(pos_uv.size()) != mi_sum(k))
      throw domain_error("GeometricSixJ: |U&V| positions must match sum(k)");
    SixJIndex ix;
    ix.lambda = lambda;
    for (int j = 0; j < M; ++j) ix.w.push_back(par.q_pow(j) * omega);
    ix.z.assign(std::size_t(N), cplx(0.0));
    std::vector<char> used(std::size_t(N), 0);
    {
      std::size_t idx = 0;
      std::vector<int> pos = pos_uv;
      std::sort(pos.begin(), pos.end());
      for (std::size_t bidx = 0; bidx < eta.size(); ++bidx)
        for (int r = 0; r < k[bidx]; ++r) {
          ix.z[pos[idx]] = eta[bidx] * par.q_pow(r);
          used[pos[idx]] = 1;
          ++idx;
        }
    }
    std::vector<int> sym = pos_u_only;
    sym.insert(sym.end(), pos_v_only.begin(), pos_v_only.end());
    std::sort(sym.begin(), sym.end());
    if (sym.size() != z_free.size())
      throw domain_error("GeometricSixJ: z_free size must match the symmetric difference");
    for (std::size_t i = 0; i < sym.size(); ++i) {
      ix.z[sym[i]] = z_free[i];
      used[sym[i]] = 1;
    }
    {
      std::vector<int> cc;
      for (int i = 0; i < N; ++i)
        if (!used[i]) cc.push_back(i);
      if (int(cc.size()) != mi_sum(l))
        throw domain_error("GeometricSixJ: |U^c&V^c| positions must match sum(l)");
      std::size_t idx = 0;
      for (std::size_t bidx = 0; bidx < xi.size(); ++bidx)
        for (int r = 0; r < l[bidx]; ++r) {
          ix.z[cc[idx]] = par.q_pow(1 - l[bidx] + r) / xi[bidx];
          ++idx;
        }
    }
    std::uint32_t umask = 0, vmask = 0;
    for (int i : pos_uv) {
      umask |= 1u << i;
      vmask |= 1u << i;
    }
    for (int i : pos_u_only) umask |= 1u << i;
    for (int i : pos_v_only) vmask |= 1u << i;
    ix.U = SubsetOfN(N, umask);
    ix.V = SubsetOfN(N, vmask);
    std::uint32_t smask = 0, tmask = 0;
    for (int j = M - s; j < M; ++j) smask |= 1u << j;
    for (int j = M - t; j < M; ++j) tmask |= 1u << j;
    ix.S = SubsetOfN(M, smask);
    ix.T = SubsetOfN(M, tmask);
    return ix;
  }

  /// The multiple series the specialized symbol reduces to (eta variables).
  VSeries series(const EllipticParams& par) const {
    const int M = big_m, N = big_n(), L = level(), ak = mi_sum(k);
    const int nU = ak + int(pos_u_only.size());
    VSeries v;
    v.a = par.q_pow(L - M - ak) / omega;
    v.b = {par.q_pow(L - M - ak), par.q_pow(1 + L - ak)};
    for (cplx x : xi) v.b.push_back(par.q_pow(1 + L - M - ak) / (omega * x));
    v.c = {par.q_pow(lambda + double(1 - t)) / omega,
           par.q_pow(-lambda + double(-1 + L + nU - M - N)) / omega};
    for (std::size_t i = 0; i < eta.size(); ++i) v.c.push_back(par.q_pow(-k[i]) / eta[i]);
    for (std::size_t i = 0; i < xi.size(); ++i) v.c.push_back(par.q_pow(l[i]) * xi[i]);
    v.z = eta;
    return v;
  }
};

namespace detail {

inline cplx geo_shared_prefactor(const GeometricSixJ& g, const SixJIndex& ix,
                                 const EllipticParams& par) {
  // factors common to both specialized expressions
  const int M = g.big_m;
  cplx pre(1.0);
  const cplx lam = g.lambda;
  const int L = g.level();
  const int nU = ix.U.size();
  for (int i : g.pos_v_only)
    for (int j : g.pos_u_only)
      pre *= guarded_div(theta(par.q * ix.z[i] / ix.z[j], par), theta(ix.z[i] / ix.z[j], par),
                         "geo prefactor");
  for (int i : g.pos_u_only) {
    pre *= guarded_div(theta(par.q_pow(lam + double(1 + M + g.big_n() - L - nU)) * g.omega / ix.z[i], par),
                       theta(par.q_pow(M) * g.omega / ix.z[i], par), "geo prefactor");
    for (std::size_t b = 0; b < g.eta.size(); ++b)
      pre *= guarded_div(theta(g.eta[b] * par.q_pow(g.k[b]) / ix.z[i], par),
                         theta(g.eta[b] / ix.z[i], par), "geo prefactor");
  }
  for (int i : g.pos_v_only) {
    pre *= guarded_div(theta(par.q_pow(-lam + double(g.t - 1)) * g.omega / ix.z[i], par),
                       theta(par.q_pow(M) * g.omega / ix.z[i], par), "geo prefactor");
    for (std::size_t b = 0; b < g.xi.size(); ++b)
      pre *= guarded_div(theta(par.q_pow(g.l[b]) * g.xi[b] * ix.z[i], par),
                         theta(g.xi[b] * ix.z[i], par), "geo prefactor");
  }
  return pre;
}

}  // namespace detail

/// Specialized value via the single-sum reduction (b-type style cut
/// |y| <= |k| + M - L in the eta-box).
inline cplx r6j_ahc(const GeometricSixJ& g, const EllipticParams& par) {
  const SixJIndex ix = g.to_index(par);
  const int M = g.big_m, N = g.big_n(), L = g.level();
  const int ak = mi_sum(g.k);
  const int nU = ix.U.size(), nV = ix.V.size();
  const cplx lam = g.lambda;
  if (ak + M - L < 0) return cplx(0.0);
  using detail::poch_qshift;
  cplx pre = guarded_div(
      pochhammer(par.q, M - g.s, par) * pochhammer(par.q, L - ak, par),
      pochhammer(par.q, g.t, par) * pochhammer(par.q, M + ak - L, par), "r6j_ahc");
  pre *= guarded_div(
      poch_qshift(lam, 2 + M + N - 2 * L, g.s, par) * poch_qshift(lam, 2 + N - nU - ak, ak, par),
      poch_qshift(lam, 2 + M - 2 * g.t, g.t, par) * poch_qshift(lam, 2 + M + N - 2 * L, nV, par) *
          detail::poch_qshift_neg(lam, 2 * g.t - M, nV - ak, par),
      "r6j_ahc");
  pre *= detail::geo_shared_prefactor(g, ix, par);
  for (std::size_t b = 0; b < g.eta.size(); ++b)
    pre *= guarded_div(pochhammer(par.q * g.eta[b] / g.omega, g.k[b], par),
                       pochhammer(par.q_pow(1 + L - M - ak) * g.eta[b] / g.omega, g.k[b], par),
                       "r6j_ahc");
  for (std::size_t b = 0; b < g.xi.size(); ++b)
    pre *= guarded_div(pochhammer(par.q_pow(M + ak - L) * g.omega * g.xi[b], g.l[b], par),
                       pochhammer(par.q_pow(M) * g.omega * g.xi[b], g.l[b], par), "r6j_ahc");
  return pre * v_sum(g.series(par), g.k, ak + M - L, par);
}

/// Specialized value via the reversed sum (valid for any L, with the
/// |y| >= L - M reinterpretation of the q-factorial prefactor).
inline cplx r6j_iri(const GeometricSixJ& g, const EllipticParams& par) {
  const SixJIndex ix = g.to_index(par);
  const int M = g.big_m, N = g.big_n(), L = g.level();
  const int ak = mi_sum(g.k);
  const int nU = ix.U.size(), nV = ix.V.size();
  const cplx lam = g.lambda;
  const cplx q = par.q;
  using detail::poch_qshift;
  cplx pre = par.q_pow(double((g.s + N - M - nV) * ak));
  pre *= guarded_div(pochhammer(q, M - g.s, par) * pochhammer(q, L, par),
                     pochhammer(q, g.t, par), "r6j_iri");
  pre *= guarded_div(poch_qshift(lam, 2 + M + N - 2 * L, g.s, par),
                     poch_qshift(lam, 2 + M - 2 * g.t, g.t, par) *
                         poch_qshift(lam, 2 + M + N - 2 * L, nV, par) *
                         detail::poch_qshift_neg(lam, 2 * g.t - M, nV, par),
                     "r6j_iri");
  pre *= detail::geo_shared_prefactor(g, ix, par);
  for (std::size_t bi = 0; bi < g.eta.size(); ++bi)
    for (std::size_t bj = 0; bj < g.xi.size(); ++bj)
      pre *= guarded_div(pochhammer(g.eta[bi] * g.xi[bj], g.k[bi] + g.l[bj], par),
                         pochhammer(g.eta[bi] * g.xi[bj], g.k[bi], par) *
                             pochhammer(g.eta[bi] * g.xi[bj], g.l[bj], par),
                         "r6j_iri");
  for (std::size_t b = 0; b < g.eta.size(); ++b)
    pre *= guarded_div(
        pochhammer(par.q_pow(-lam + double(-1 + L + nU - M - N)) * g.eta[b] / g.omega, g.k[b], par) *
            pochhammer(par.q_pow(lam + double(1 - g.t)) * g.eta[b] / g.omega, g.k[b], par),
        pochhammer(par.q_pow(L - M) * g.eta[b] / g.omega, g.k[b], par) *
            pochhammer(par.q_pow(-M) * g.eta[b] / g.omega, g.k[b], par),
        "r6j_iri");
  for (std::size_t b = 0; b < g.xi.size(); ++b)
    pre *= guarded_div(pochhammer(par.q_pow(M - L) * g.omega * g.xi[b], g.l[b], par),
                       pochhammer(par.q_pow(M) * g.omega * g.xi[b], g.l[b], par), "r6j_iri");

  // reversed series: a = q^{M-L} omega, with the c-entry "omega" handled via
  // the q-factorial reinterpretation 1/(q)_{M-L+|y|}, support |y| >= L-M.
  const int P = int(g.eta.size());
  VSeries v;
  v.a = par.q_pow(M - L) * g.omega;
  v.b = {par.q_pow(lam + double(1 + M - L - g.t)), par.q_pow(-lam + double(-1 - N + nU))};
  for (std::size_t b = 0; b < g.xi.size(); ++b)
    v.b.push_back(par.q_pow(M - L + g.l[b]) * g.xi[b] * g.omega);
  std::vector<cplx> c_rest = {par.q_pow(M + 1) * g.omega};
  for (cplx x : g.xi) c_rest.push_back(q / x);
  for (cplx e : g.eta) c_rest.push_back(e);
  for (std::size_t b = 0; b < g.eta.size(); ++b) v.z.push_back(par.q_pow(-g.k[b]) / g.eta[b]);

  cplx total(0.0);
  for_each_box(g.k, [&](const MultiIndex& y) {
    const int ay = mi_sum(y);
    if (ay < L - M) return;
    cplx t = delta_ratio(v.z, y, par) * par.q_pow(ay);
    for (int i = 0; i < P; ++i) {
      t *= guarded_div(theta(v.a * v.z[i] * par.q_pow(y[i] + ay), par), theta(v.a * v.z[i], par),
                       "r6j_iri term");
      t *= pochhammer(v.a * v.z[i], ay, par);
    }
    for (cplx b : v.b) t *= pochhammer(b, ay, par);
    for (cplx c : c_rest) t = guarded_div(t, pochhammer(v.a * q / c, ay, par), "r6j_iri term");
    t = guarded_div(t, pochhammer(q, M - L + ay, par), "r6j_iri term");
    for (int i = 0; i < P; ++i) {
      t *= pochhammer(g.omega * v.z[i], y[i], par);
      for (cplx c : c_rest) t *= pochhammer(c * v.z[i], y[i], par);
      for (int j = 0; j < P; ++j)
        t = guarded_div(t, pochhammer(q * v.z[i] / v.z[j], y[i], par), "r6j_iri term");
      for (cplx b : v.b)
        t = guarded_div(t, pochhammer(v.a * q * v.z[i] / b, y[i], par), "r6j_iri term");
    }
    total += t;
  });
  return ensure_finite(pre * total, "r6j_iri");
}

/// Detect the geometric structure of a raw index (w a q-progression, S and T
/// terminal intervals) and build the block data with unit block lengths.
inline GeometricSixJ detect_geometric(const SixJIndex& ix, const EllipticParams& par) {
  ix.validate();
  const int M = ix.m(), N = ix.n();
  GeometricSixJ g;
  g.lambda = ix.lambda;
  g.big_m = M;
  if (M == 0) throw domain_error("specialized evaluation needs M >= 1");
  g.omega = ix.w[0];
  for (int j = 1; j < M; ++j)
    if (rel_diff(ix.w[j], par.q * ix.w[j - 1]) > 1e-9)
      throw domain_error("specialized evaluation requires w_j = q^{j-1} w_1");
  auto terminal_size = [&](const SubsetOfN& s, const char* name) {
    const int sz = s.size();
    for (int j = M - sz; j < M; ++j)
      if (!s.contains(j))
        throw domain_error(std::string("specialized evaluation requires ") + name +
                           " to be a terminal interval of [M]");
    return sz;
  };
  g.s = terminal_size(ix.S, "S");
  g.t = terminal_size(ix.T, "T");
  for (int i = 0; i < N; ++i) {
    const bool u = ix.U.contains(i), v = ix.V.contains(i);
    if (u && v) {
      g.pos_uv.push_back(i);
      g.eta.push_back(ix.z[i]);
      g.k.push_back(1);
    } else if (u) {
      g.pos_u_only.push_back(i);
    } else if (v) {
      g.pos_v_only.push_back(i);
    } else {
      g.xi.push_back(cplx(1.0) / ix.z[i]);
      g.l.push_back(1);
    }
  }
  std::vector<int> sym = g.pos_u_only;
  sym.insert(sym.end(), g.pos_v_only.begin(), g.pos_v_only.end());
  std::sort(sym.begin(), sym.end());
  for (int i : sym) g.z_free.push_back(ix.z[i]);
  return g;
}

inline cplx r6j(const SixJIndex& ix, SixJMethod method, const EllipticParams& par) {
  switch (method) {
    case SixJMethod::mcmt: return r6j_mcmt(ix, par);
    case SixJMethod::rat1: return r6j_rat1(ix, par);
    case SixJMethod::rat2: return r6j_rat2(ix, par);
    case SixJMethod::lattice_oracle: return r6j_lattice_oracle(ix, par);
    case SixJMethod::specialized_ahc: return r6j_ahc(detect_geometric(ix, par), par);
    case SixJMethod::specialized_iri: return r6j_iri(detect_geometric(ix, par), par);
  }
  throw domain_error("r6j: unknown method");
}

// ---------------------------------------------------------------------------
// Symmetries and the braiding relations, all computed through r6j_mcmt.

inline std::vector<cplx> inverted(const std::vector<cplx>& v) {
  std::vector<cplx> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = cplx(1.0) / v[i];
  return r;
}

inline cplx sixj_g_ratio(const SixJIndex& ix, const EllipticParams& par) {
  const int M = ix.m(), N = ix.n(), L = ix.level();
  return guarded_div(
      coeff_g(ix.U, ix.z, ix.lambda + double(N - 2 * ix.U.size()), par) *
          coeff_g(ix.S, ix.w, ix.lambda + double(M + N - 2 * L), par),
      coeff_g(ix.T, ix.w, ix.lambda + double(M - 2 * ix.T.size()), par) *
          coeff_g(ix.V, ix.z, ix.lambda + double(M + N - 2 * L), par),
      "sixj_g_ratio");
}

enum class SixJSymmetry { op_flip, antipode_flip, combined };

/// Right-hand side of the named symmetry line; equals r6j(ix) when it holds.
inline cplx r6j_symmetry_rhs(const SixJIndex& ix, SixJSymmetry kind, const EllipticParams& par) {
  ix.validate();
  const int M = ix.m(), N = ix.n(), L = ix.level();
  switch (kind) {
    case SixJSymmetry::op_flip: {
      SixJIndex f;
      f.lambda = ix.lambda + double(M + N - 2 * L);
      f.w = inverted(ix.z);
      f.z = inverted(ix.w);
      f.S = ix.U.complement();
      f.T = ix.V.complement();
      f.U = ix.S.complement();
      f.V = ix.T.complement();
      return r6j_mcmt(f, par);
    }
    case SixJSymmetry::antipode_flip: {
      SixJIndex f;
      f.lambda = -ix.lambda - 2.0;
      f.w = inverted(ix.z);
      f.z = inverted(ix.w);
      f.S = ix.V.complement();
      f.T = ix.U.complement();
      f.U = ix.T.complement();
      f.V = ix.S.complement();
      return sixj_g_ratio(ix, par) * r6j_mcmt(f, par);
    }
    case SixJSymmetry::combined: {
      SixJIndex f = ix;
      f.lambda = -ix.lambda - 2.0 + double(2 * L - M - N);
      f.S = ix.T;
      f.T = ix.S;
      f.U = ix.V;
      f.V = ix.U;
      return sixj_g_ratio(ix, par) * r6j_mcmt(f, par);
    }
  }
  throw domain_error("r6j_symmetry_rhs: unknown kind");
}

/// Max residual of the dynamical hexagon relation over all admissible
/// (Q,R,S,T,U,V) at the given spectral data; residuals are normalized by the
/// largest term magnitude.
inline double check_qdyb(cplx lambda, const std::vector<cplx>& u, const std::vector<cplx>& w,
                         const std::vector<cplx>& z, const EllipticParams& par) {
  const int L = int(u.size()), M = int(w.size()), N = int(z.size());
  double worst = 0.0;
  auto r = [&](cplx lam, const std::vector<cplx>& x1, const std::vector<cplx>& x2,
               std::uint32_t s, std::uint32_t t, std::uint32_t uu, std::uint32_t vv) {
    SixJIndex ix;
    ix.lambda = lam;
    ix.w = x1;
    ix.z = x2;
    ix.S = SubsetOfN(int(x1.size()), s);
    ix.T = SubsetOfN(int(x1.size()), t);
    ix.U = SubsetOfN(int(x2.size()), uu);
    ix.V = SubsetOfN(int(x2.size()), vv);
    return r6j_mcmt(ix, par);
  };
  for_each_submask(full_mask(L), [&](std::uint32_t Q) {
    for_each_submask(full_mask(L), [&](std::uint32_t R) {
      for_each_submask(full_mask(M), [&](std::uint32_t S) {
        for_each_submask(full_mask(M), [&](std::uint32_t T) {
          for_each_submask(full_mask(N), [&](std::uint32_t U) {
            for_each_submask(full_mask(N), [&](std::uint32_t V) {
              const int nQ = __builtin_popcount(Q), nR = __builtin_popcount(R);
              const int nS = __builtin_popcount(S), nT = __builtin_popcount(T);
              const int nU = __builtin_popcount(U), nV = __builtin_popcount(V);
              if (nQ + nS + nU != nR + nT + nV) return;
              cplx lhs(0.0), rhs(0.0);
              double scale = 0.0;
              for_each_submask(full_mask(L), [&](std::uint32_t X) {
                for_each_submask_of_size(full_mask(M), nR + nT - __builtin_popcount(X),
                                         [&](std::uint32_t Y) {
                  for_each_submask_of_size(full_mask(N),
                                           nS + nU - __builtin_popcount(Y),
                                           [&](std::uint32_t Z) {
                    cplx t = r(lambda + double(N - 2 * nV), u, w, R, X, T, Y) *
                             r(lambda, u, z, X, Q, V, Z) *
                             r(lambda + double(L - 2 * nQ), w, z, Y, S, Z, U);
                    lhs += t;
                    scale = std::max(scale, std::abs(t));
                  });
                });
              });
              for_each_submask(full_mask(L), [&](std::uint32_t X) {
                for_each_submask_of_size(full_mask(M), nQ + nS - __builtin_popcount(X),
                                         [&](std::uint32_t Y) {
                  for_each_submask_of_size(full_mask(N),
                                           nT + nV - __builtin_popcount(Y),
                                           [&](std::uint32_t Z) {
                    cplx t = r(lambda, w, z, T, Y, V, Z) *
                             r(lambda + double(M - 2 * __builtin_popcount(Y)), u, z, R, X, Z, U) *
                             r(lambda, u, w, X, Q, Y, S);
                    rhs += t;
                    scale = std::max(scale, std::abs(t));
                  });
                });
              });
              worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, scale));
            });
          });
        });
      });
    });
  });
  return worst;
}

/// Max residual of sum_{X,Y} R^{XY}_{SU}(w,z) R^{VT}_{YX}(z,w) = delta
/// over all admissible (S,T,U,V).
inline double check_unitarity(cplx lambda, const std::vector<cplx>& w, const std::vector<cplx>& z,
                              const EllipticParams& par) {
  const int M = int(w.size()), N = int(z.size());
  double worst = 0.0;
  for_each_submask(full_mask(M), [&](std::uint32_t S) {
    for_each_submask(full_mask(M), [&](std::uint32_t T) {
      for_each_submask(full_mask(N), [&](std::uint32_t U) {
        for_each_submask(full_mask(N), [&](std::uint32_t V) {
          const int nS = __builtin_popcount(S), nT = __builtin_popcount(T);
          const int nU = __builtin_popcount(U), nV = __builtin_popcount(V);
          if (nS + nU != nT + nV) return;
          cplx sum(0.0);
          double scale = 0.0;
          for_each_submask(full_mask(M), [&](std::uint32_t X) {
            for_each_submask_of_size(full_mask(N), nS + nU - __builtin_popcount(X),
                                     [&](std::uint32_t Y) {
              SixJIndex a;
              a.lambda = lambda;
              a.w = w;
              a.z = z;
              a.S = SubsetOfN(M, S);
              a.T = SubsetOfN(M, X);
              a.U = SubsetOfN(N, U);
              a.V = SubsetOfN(N, Y);
              SixJIndex b;
              b.lambda = lambda;
              b.w = z;
              b.z = w;
              b.S = SubsetOfN(N, Y);
              b.T = SubsetOfN(N, V);
              b.U = SubsetOfN(M, X);
              b.V = SubsetOfN(M, T);
              cplx t = r6j_mcmt(a, par) * r6j_mcmt(b, par);
              sum += t;
              scale = std::max(scale, std::abs(t));
            });
          });
          const double tgt = (S == T && U == V) ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(sum - tgt) / std::max(1.0, scale));
        });
      });
    });
  });
  return worst;
}

/// Both sides of the V-empty summation corollary for |S|+|U| = |T|, S in T.
inline ValuePair vempty_summation_pair(cplx lambda, const std::vector<cplx>& w,
                                       const std::vector<cplx>& z, const SubsetOfN& S,
                                       const SubsetOfN& T, const SubsetOfN& U,
                                       const EllipticParams& par) {
  const int M = int(w.size()), N = int(z.size());
  if (S.size() + U.size() != T.size() || (S.mask & ~T.mask) != 0)
    throw domain_error("vempty_summation_pair: need S in T, |S|+|U| = |T|");
  const int nS = S.size(), nT = T.size(), nU = U.size();
  const cplx q = par.q;
  using detail::poch_qshift;
  using detail::tq;

  std::vector<cplx> qw = w;
  for (cplx& x : qw) x *= q;
  const std::uint32_t Uc = ~U.mask & full_mask(N);
  cplx lhs(0.0);
  for_each_submask(Uc, [&](std::uint32_t X) {
    const int ylen = N + nS - __builtin_popcount(X);
    for_each_submask_of_size(full_mask(M), ylen, [&](std::uint32_t Y) {
      const std::uint32_t Xc = ~X & full_mask(N), Yc = ~Y & full_mask(M);
      const std::uint32_t UcX = Uc & ~X;
      const std::uint32_t ScY = ~S.mask & full_mask(M) & Y;
      const std::uint32_t TcY = ~T.mask & full_mask(M) & Y;
      const std::uint32_t SYc = S.mask & Yc, TYc = T.mask & Yc;
      const std::uint32_t UcXc = Uc & Xc;
      const int nScY = __builtin_popcount(ScY), nTcY = __builtin_popcount(TcY);
      cplx t = detail::theta_q_pow(nScY + nTcY, par);
      t *= tq(UcX, X, z, z, true, par);
      t *= tq(Yc, Y, w, w, true, par);
      for (int i = 0; i < M; ++i) {
        if (!((Yc >> i) & 1u)) continue;
        for (int j = 0; j < N; ++j)
          if ((X >> j) & 1u)
            t *= guarded_div(theta(q * q * w[i] / z[j], par), theta(q * w[i] / z[j], par),
                             "vempty term");
      }
      for (int i = 0; i < M; ++i) {
        if (!((Y >> i) & 1u)) continue;
        for (int j = 0; j < N; ++j)
          if ((UcXc >> j) & 1u)
            t *= guarded_div(theta(z[j] / w[i], par), theta(z[j] / (q * w[i]), par), "vempty term");
      }
      t *= guarded_div(poch_qshift(lambda, 2 - nT + nTcY, N + nS - nTcY, par),
                       detail::poch_qshift_neg(lambda, -M - N + nT + nU, nScY, par), "vempty term");
      std::vector<cplx> first1 = restrict_to(z, Xc);
      for (cplx x : restrict_to(qw, SYc)) first1.push_back(x);
      t *= phi(first1, restrict_to(qw, ScY),
               par.q_pow(-lambda + double(-M - N + nT + nU + nScY)), par);
      std::vector<cplx> first2 = restrict_to(z, UcX);
      for (cplx x : restrict_to(qw, TYc)) first2.push_back(x);
      t *= phi(first2, restrict_to(qw, TcY), par.q_pow(lambda + double(2 - nT + nTcY)), par);
      lhs += t;
    });
  });

  cplx rhs = (nU % 2 ? -1.0 : 1.0) *
             par.q_pow(double((M - nT) * nS) - 0.5 * nU * (nU + 1)) * detail::theta_q_pow(nU, par);
  rhs *= guarded_div(
      poch_qshift(lambda, 1 - nT, M - nT, par) * poch_qshift(lambda, 2 + M - 2 * nT, N + nS, par),
      poch_qshift(lambda, 1 + N - 2 * nU, M - nS, par), "vempty rhs");
  rhs *= tq(S.mask, ~T.mask & full_mask(M), w, w, false, par);
  rhs *= tq(~T.mask & full_mask(M), full_mask(N), w, z, true, par);
  const std::uint32_t TS = T.mask & ~S.mask;
  rhs *= tq(TS, U.mask, w, z, true, par);
  rhs *= phi(restrict_to(w, TS), restrict_to(z, U.mask), par.q_pow(lambda + double(2 + N - nU)),
             par);
  return {lhs, rhs};
}

}  // namespace ell

#endif  // ELL_SIXJ_HPP
