#ifndef ELL_WEIGHT_HPP
#define ELL_WEIGHT_HPP

// The elliptic weight function Phi (a symmetrized n!-term sum equal to the
// domain-wall partition function up to an explicit prefactor) and the scalar
// coefficient families A, B, G, C, D attached to subsets of spectral
// parameters.

#include <algorithm>
#include <numeric>
#include <vector>

#include "ell/core.hpp"
#include "ell/subsets.hpp"

namespace ell {

/// Phi(w; z; a): sum over permutations sigma of
///   prod_{i<j} theta(q z_si/z_sj) theta(w_i/z_sj) /
///              (theta(z_si/z_sj) theta(q w_i/z_sj))
///   * prod_j theta(a q^{-j} w_j/z_sj) / theta(q w_j/z_sj).
/// Symmetric in z and in w; the only poles are at q w_i/z_j in p^Z.
inline cplx phi(const std::vector<cplx>& w, const std::vector<cplx>& z, cplx a,
                const EllipticParams& par, double* scale_out = nullptr) {
  const int n = int(w.size());
  if (int(z.size()) != n) throw domain_error("phi: need |w| == |z|");
  if (scale_out) *scale_out = 1.0;
  if (n == 0) return cplx(1.0);
  if (n > kMaxPermutationSize) throw capacity_error("phi: permutation cap exceeded (n > 8)");
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  cplx total(0.0);
  do {
    cplx t(1.0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        t *= guarded_div(theta2(par.q * z[sigma[i]] / z[sigma[j]], w[i] / z[sigma[j]], par),
                         theta2(z[sigma[i]] / z[sigma[j]], par.q * w[i] / z[sigma[j]], par),
                         "phi term");
    for (int j = 0; j < n; ++j)
      t *= guarded_div(theta(a * par.q_pow(-(j + 1)) * w[j] / z[sigma[j]], par),
                       theta(par.q * w[j] / z[sigma[j]], par), "phi term");
    if (scale_out) *scale_out = std::max(*scale_out, std::abs(t));
    total += t;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return ensure_finite(total, "phi");
}

namespace detail {
inline cplx theta_ratio_pairs(const std::vector<int>& rows, const std::vector<int>& cols,
                              const std::vector<cplx>& x, const std::vector<cplx>& y, bool q_on_top,
                              const EllipticParams& par) {
  cplx r(1.0);
  for (int i : rows)
    for (int j : cols) {
      cplx top = q_on_top ? par.q * x[i] / y[j] : x[i] / y[j];
      cplx bot = q_on_top ? x[i] / y[j] : par.q * x[i] / y[j];
      r *= guarded_div(theta(top, par), theta(bot, par), "theta ratio product");
    }
  return r;
}
}  // namespace detail

/// A_{S,z}(lambda) = (q^{l+2+N-2m})_m/(q^{l+2-m})_m prod_{i in S, j in S^c}
/// theta(z_i/z_j)/theta(q z_i/z_j), m = |S|.
inline cplx coeff_a(const SubsetOfN& s, const std::vector<cplx>& z, cplx lambda,
                    const EllipticParams& par) {
  const int N = s.ambient, m = s.size();
  if (int(z.size()) != N) throw domain_error("coeff_a: ambient mismatch");
  cplx r = guarded_div(pochhammer(par.q_pow(lambda + double(2 + N - 2 * m)), m, par),
                       pochhammer(par.q_pow(lambda + double(2 - m)), m, par), "coeff_a");
  return r * detail::theta_ratio_pairs(s.members(), s.complement().members(), z, z, false, par);
}

/// B_{S,z}(lambda) = q^{m(N-m)} (q^{l+1-m})_{N-m}/(q^{l+1})_{N-m}
/// prod_{i in S^c, j in S} theta(z_i/z_j)/theta(q z_i/z_j).
inline cplx coeff_b(const SubsetOfN& s, const std::vector<cplx>& z, cplx lambda,
                    const EllipticParams& par) {
  const int N = s.ambient, m = s.size();
  if (int(z.size()) != N) throw domain_error("coeff_b: ambient mismatch");
  cplx r = par.q_pow(m * (N - m)) *
           guarded_div(pochhammer(par.q_pow(lambda + double(1 - m)), N - m, par),
                       pochhammer(par.q_pow(lambda + 1.0), N - m, par), "coeff_b");
  return r * detail::theta_ratio_pairs(s.complement().members(), s.members(), z, z, false, par);
}

/// G_{S,z}(lambda) = (-1)^m q^{-C(m,2)} q^{-N lambda/2}
/// (q^{l+1+m-N})_m (q^{l+2+2m-N})_{N-m} prod theta(z_i/z_j)/theta(q z_i/z_j).
inline cplx coeff_g(const SubsetOfN& s, const std::vector<cplx>& z, cplx lambda,
                    const EllipticParams& par) {
  const int N = s.ambient, m = s.size();
  if (int(z.size()) != N) throw domain_error("coeff_g: ambient mismatch");
  cplx r = (m % 2 ? -1.0 : 1.0) * par.q_pow(-0.5 * m * (m - 1)) * par.q_pow(-0.5 * double(N) * lambda);
  r *= pochhammer(par.q_pow(lambda + double(1 + m - N)), m, par);
  r *= pochhammer(par.q_pow(lambda + double(2 + 2 * m - N)), N - m, par);
  return r * detail::theta_ratio_pairs(s.members(), s.complement().members(), z, z, false, par);
}

namespace detail {
inline void check_cd(const SubsetOfN& s, const SubsetOfN& t, const std::vector<cplx>& z) {
  if (s.ambient != t.ambient || int(z.size()) != s.ambient)
    throw domain_error("coeff C/D: ambient mismatch");
  if (s.size() != t.size()) throw domain_error("coeff C/D: |S| != |T|");
}
}  // namespace detail

/// C_{S,T,z}(lambda) with |S| = |T| = m, nn = |S \ T| = |T \ S|:
/// theta(q)^nn (q^{l+2+nn-m})_{m-nn}/(q^{l+2+N-2m})_m
/// * prod_{i in T, j in T^c} theta(q z_i/z_j)/theta(z_i/z_j)
/// * Phi(z_{T\S}; z_{S\T}; q^{l+2+nn-m}).
inline cplx coeff_c(const SubsetOfN& s, const SubsetOfN& t, const std::vector<cplx>& z, cplx lambda,
                    const EllipticParams& par) {
  detail::check_cd(s, t, z);
  const int N = s.ambient, m = s.size();
  const std::uint32_t st = s.mask & ~t.mask, ts = t.mask & ~s.mask;
  const int nn = __builtin_popcount(ts);
  cplx r = cplx(1.0);
  for (int i = 0; i < nn; ++i) r *= theta(par.q, par);
  r *= guarded_div(pochhammer(par.q_pow(lambda + double(2 + nn - m)), m - nn, par),
                   pochhammer(par.q_pow(lambda + double(2 + N - 2 * m)), m, par), "coeff_c");
  r *= detail::theta_ratio_pairs(t.members(), t.complement().members(), z, z, true, par);
  return r * phi(restrict_to(z, ts), restrict_to(z, st), par.q_pow(lambda + double(2 + nn - m)), par);
}

/// D_{S,T,z}(mu): theta(q)^nn (q^{mu+2-m})_m /
/// ((q^{-mu+m-N})_nn (q^{mu+2+N-2m})_m) * same theta product *
/// Phi(z_{T\S}; z_{S\T}; q^{-mu+m+nn-N}).
inline cplx coeff_d(const SubsetOfN& s, const SubsetOfN& t, const std::vector<cplx>& z, cplx mu,
                    const EllipticParams& par) {
  detail::check_cd(s, t, z);
  const int N = s.ambient, m = s.size();
  const std::uint32_t st = s.mask & ~t.mask, ts = t.mask & ~s.mask;
  const int nn = __builtin_popcount(ts);
  cplx r = cplx(1.0);
  for (int i = 0; i < nn; ++i) r *= theta(par.q, par);
  r *= guarded_div(pochhammer(par.q_pow(mu + double(2 - m)), m, par),
                   pochhammer(par.q_pow(-mu + double(m - N)), nn, par) *
                       pochhammer(par.q_pow(mu + double(2 + N - 2 * m)), m, par),
                   "coeff_d");
  r *= detail::theta_ratio_pairs(t.members(), t.complement().members(), z, z, true, par);
  return r * phi(restrict_to(z, ts), restrict_to(z, st), par.q_pow(-mu + double(m + nn - N)), par);
}

/// Right-hand side of the block decomposition of Phi for an ordered partition
/// [n] = S_1 u ... u S_K: the sum over all (T_1,..,T_K) with |T_k| = |S_k| of
/// cross-block theta ratios times prod_k Phi(w_{S_k}; z_{T_k}; q^{-offset} a).
inline cplx phi_decomposed(const std::vector<cplx>& w, const std::vector<cplx>& z, cplx a,
                           const std::vector<std::vector<int>>& blocks, const EllipticParams& par) {
  const int n = int(w.size());
  if (int(z.size()) != n) throw domain_error("phi_decomposed: need |w| == |z|");
  {
    std::uint32_t seen = 0;
    for (const auto& blk : blocks)
      for (int i : blk) {
        if (i < 0 || i >= n || (seen & (1u << i)))
          throw domain_error("phi_decomposed: blocks must partition [n]");
        seen |= 1u << i;
      }
    if (seen != full_mask(n)) throw domain_error("phi_decomposed: blocks must partition [n]");
  }
  const int K = int(blocks.size());
  cplx total(0.0);
  std::vector<std::uint32_t> tmask(K, 0);
  std::function<void(int, std::uint32_t)> rec = [&](int k, std::uint32_t remaining) {
    if (k == K) {
      cplx t(1.0);
      for (int kk = 0; kk < K; ++kk)
        for (int ll = kk + 1; ll < K; ++ll) {
          t *= detail::theta_ratio_pairs(blocks[kk], mask_members(tmask[ll], n), w, z, false, par);
          t *= detail::theta_ratio_pairs(mask_members(tmask[kk], n), mask_members(tmask[ll], n), z,
                                         z, true, par);
        }
      int off = 0;
      for (int kk = 0; kk < K; ++kk) {
        std::vector<cplx> wb;
        for (int i : blocks[kk]) wb.push_back(w[i]);
        t *= phi(wb, restrict_to(z, tmask[kk]), par.q_pow(-double(off)) * a, par);
        off += int(blocks[kk].size());
      }
      total += t;
      return;
    }
    for_each_submask_of_size(remaining, int(blocks[k].size()), [&](std::uint32_t sub) {
      tmask[k] = sub;
      rec(k + 1, remaining & ~sub);
    });
  };
  rec(0, full_mask(n));
  return ensure_finite(total, "phi_decomposed");
}

}  // namespace ell

#endif  // ELL_WEIGHT_HPP
