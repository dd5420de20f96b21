#ifndef ELL_SERIES_HPP
#define ELL_SERIES_HPP

// Multiple elliptic hypergeometric series of type A and the classical
// one-variable series, plus both sides of the transformation and summation
// identities the verification suites sample.
//
// The multiple series with parameters (a; b_1..b_{m+2}; c_1..c_{m+n+2};
// z_1..z_n) has terms
//   Delta(z q^y)/Delta(z) q^{|y|}
//   prod_i theta(a z_i q^{y_i+|y|})/theta(a z_i)
//   prod_i (a z_i)_{|y|} prod_i (b_i)_{|y|} / prod_i (a q/c_i)_{|y|}
//   prod_i [ prod_j (c_j z_i)_{y_i} / (prod_j (q z_i/z_j)_{y_i}
//            prod_j (a q z_i/b_j)_{y_i}) ],
// and is invariant under (a, c, z) -> (t a, t c, z / t).

#include <optional>
#include <utility>
#include <vector>

#include "ell/core.hpp"
#include "ell/subsets.hpp"

namespace ell {

struct VSeries {
  cplx a;
  std::vector<cplx> b;  // m+2 entries
  std::vector<cplx> c;  // m+n+2 entries
  std::vector<cplx> z;  // n entries

  int n() const { return int(z.size()); }
  int m() const { return int(b.size()) - 2; }
  void validate() const {
    if (int(b.size()) < 2 || int(c.size()) != m() + n() + 2)
      throw domain_error("VSeries: parameter list sizes must be (m+2, m+n+2, n)");
  }
  /// prod(b) prod(c) prod(z) == q^{m+1} a^{m+2} for a balanced series.
  cplx balance_product() const {
    cplx r(1.0);
    for (cplx x : b) r *= x;
    for (cplx x : c) r *= x;
    for (cplx x : z) r *= x;
    return r;
  }
};

inline cplx v_term(const VSeries& v, const MultiIndex& y, const EllipticParams& par) {
  const int n = v.n();
  const int ay = mi_sum(y);
  cplx t = delta_ratio(v.z, y, par) * par.q_pow(ay);
  for (int i = 0; i < n; ++i) {
    t *= guarded_div(theta(v.a * v.z[i] * par.q_pow(y[i] + ay), par), theta(v.a * v.z[i], par),
                     "v_term");
    t *= pochhammer(v.a * v.z[i], ay, par);
  }
  for (cplx b : v.b) t *= pochhammer(b, ay, par);
  for (cplx c : v.c) t = guarded_div(t, pochhammer(v.a * par.q / c, ay, par), "v_term");
  for (int i = 0; i < n; ++i) {
    for (cplx c : v.c) t *= pochhammer(c * v.z[i], y[i], par);
    for (int j = 0; j < n; ++j)
      t = guarded_div(t, pochhammer(par.q * v.z[i] / v.z[j], y[i], par), "v_term");
    for (cplx b : v.b) t = guarded_div(t, pochhammer(v.a * par.q * v.z[i] / b, y[i], par), "v_term");
  }
  return t;
}

/// Finite sum over the box 0 <= y_i <= caps[i], optionally cut to |y| <= total.
/// When scale_out is given it receives the largest term magnitude (for
/// cancellation-aware genericity checks).
inline cplx v_sum(const VSeries& v, const MultiIndex& caps, std::optional<int> total,
                  const EllipticParams& par, double* scale_out = nullptr) {
  v.validate();
  if (int(caps.size()) != v.n()) throw domain_error("v_sum: cap/variable size mismatch");
  if (scale_out) *scale_out = 1.0;
  if (v.n() == 0) return cplx(1.0);
  cplx r(0.0);
  for_each_box(caps, [&](const MultiIndex& y) {
    if (total && mi_sum(y) > *total) return;
    const cplx t = v_term(v, y, par);
    if (scale_out) *scale_out = std::max(*scale_out, std::abs(t));
    r += t;
  });
  return ensure_finite(r, "v_sum");
}

/// Declared termination of a series: either b-type (b_1 = q^{-N}, so the sum
/// runs over |y| <= N) or c-type (c_j = q^{-N_j}/z_j, so y_j <= N_j).
struct SeriesSpec {
  VSeries v;
  std::optional<int> b_termination;
  std::optional<MultiIndex> c_termination;

  void validate(const EllipticParams& par) const {
    v.validate();
    if (!b_termination && !c_termination)
      throw domain_error("SeriesSpec: nonterminating (declare b- or c-type termination)");
    if (b_termination) {
      if (*b_termination < 0 || v.b.empty() ||
          rel_diff(v.b[0], par.q_pow(-double(*b_termination))) > 1e-8)
        throw domain_error("SeriesSpec: b-type termination requires b_1 = q^{-N}");
    }
    if (c_termination) {
      if (int(c_termination->size()) != v.n())
        throw domain_error("SeriesSpec: c-type termination needs one N_j per variable");
      for (int j = 0; j < v.n(); ++j)
        if ((*c_termination)[j] < 0 ||
            rel_diff(v.c[j], par.q_pow(-double((*c_termination)[j])) / v.z[j]) > 1e-8)
          throw domain_error("SeriesSpec: c-type termination requires c_j = q^{-N_j}/z_j");
    }
  }

  /// Normal form under the scaling redundancy: a is scaled to 1.
  SeriesSpec normal_form() const {
    SeriesSpec s = *this;
    const cplx t = cplx(1.0) / v.a;
    s.v.a = cplx(1.0);
    for (cplx& c : s.v.c) c *= t;
    for (cplx& z : s.v.z) z /= t;
    return s;
  }

  cplx value(const EllipticParams& par) const {
    validate(par);
    MultiIndex caps = c_termination ? *c_termination
                                    : MultiIndex(std::size_t(v.n()), *b_termination);
    return v_sum(v, caps, b_termination, par);
  }
};

/// Terminating one-variable series sum_{y=0}^{N} theta(a q^{2y})/theta(a)
/// (a)_y prod (b_i)_y / ((q)_y prod (a q/b_i)_y) q^y.
inline cplx v_one(cplx a, const std::vector<cplx>& bs, int nmax, const EllipticParams& par,
                  double* scale_out = nullptr) {
  cplx total(0.0);
  if (scale_out) *scale_out = 1.0;
  for (int y = 0; y <= nmax; ++y) {
    cplx t = guarded_div(theta(a * par.q_pow(2 * y), par), theta(a, par), "v_one") * par.q_pow(y);
    t *= pochhammer(a, y, par);
    t = guarded_div(t, pochhammer(par.q, y, par), "v_one");
    for (cplx b : bs) {
      t *= pochhammer(b, y, par);
      t = guarded_div(t, pochhammer(a * par.q / b, y, par), "v_one");
    }
    if (scale_out) *scale_out = std::max(*scale_out, std::abs(t));
    total += t;
  }
  return ensure_finite(total, "v_one");
}

// ---------------------------------------------------------------------------
// Identity sides.  Each function returns both sides for explicitly supplied
// parameters; the caller is responsible for imposing the balance constraint
// (the suites solve it for the last free parameter).  `scale` carries the
// largest term magnitude seen while summing: samples whose value cancels far
// below the term scale carry no usable relative precision and are rejected
// by the verification suites like any other non-generic sample.

struct IdentitySample {
  cplx lhs, rhs;
  double scale = 1.0;

  double residual() const {
    const double s = std::abs(lhs) + std::abs(rhs);
    return s > 0.0 ? std::abs(lhs - rhs) / s : 0.0;
  }
  void reject_if_cancellation_dominated() const {
    if (std::abs(lhs) + std::abs(rhs) < 1e-5 * scale)
      throw singular_error("cancellation-dominated sample");
  }
};

using ValuePair = IdentitySample;

/// One-variable Jackson summation; requires a^2 q^{N+1} = bcde.
inline ValuePair jackson_pair(cplx a, cplx b, cplx c, cplx d, cplx e, int nmax,
                              const EllipticParams& par) {
  const cplx q = par.q;
  double scale = 1.0;
  cplx lhs = v_one(a, {par.q_pow(-nmax), b, c, d, e}, nmax, par, &scale);
  cplx rhs = guarded_div(
      poch_prod({a * q, a * q / (b * c), a * q / (b * d), a * q / (c * d)}, nmax, par),
      poch_prod({a * q / b, a * q / c, a * q / d, a * q / (b * c * d)}, nmax, par), "jackson");
  return {lhs, rhs, scale};
}

/// One-variable Bailey transformation; requires a^3 q^{N+2} = bcdefg.
inline ValuePair bailey_pair(cplx a, cplx b, cplx c, cplx d, cplx e, cplx f, cplx g, int nmax,
                             const EllipticParams& par) {
  const cplx q = par.q;
  const cplx lm = q * a * a / (b * c * d);
  double s1 = 1.0, s2 = 1.0;
  cplx lhs = v_one(a, {par.q_pow(-nmax), b, c, d, e, f, g}, nmax, par, &s1);
  cplx pref = guarded_div(poch_prod({a * q, a * q / (e * f), lm * q / e, lm * q / f}, nmax, par),
                          poch_prod({lm * q, lm * q / (e * f), a * q / e, a * q / f}, nmax, par),
                          "bailey");
  cplx rhs =
      pref * v_one(lm, {par.q_pow(-nmax), lm * b / a, lm * c / a, lm * d / a, e, f, g}, nmax, par,
                   &s2);
  return {lhs, rhs, std::max(s1, s2 * std::abs(pref))};
}

/// Equal-|y| transformation between an n-fold and an m-fold sum; requires
/// w_1...w_m = z_1...z_n a_1...a_{m+n}.
inline ValuePair composition_transform_pair(const std::vector<cplx>& as,
                                            const std::vector<cplx>& w, const std::vector<cplx>& z,
                                            int nmax, const EllipticParams& par) {
  const int m = int(w.size()), n = int(z.size());
  if (int(as.size()) != m + n) throw domain_error("composition_transform: need m+n upper entries");
  double scale = 1.0;
  auto side = [&](const std::vector<cplx>& big, const std::vector<cplx>& small, bool lhs_side) {
    const int k = int(big.size());
    cplx total(0.0);
    for_each_box(MultiIndex(std::size_t(k), nmax), [&](const MultiIndex& y) {
      if (mi_sum(y) != nmax) return;
      cplx t = delta_ratio(big, y, par);
      for (int i = 0; i < k; ++i) {
        for (cplx av : as)
          t *= pochhammer(lhs_side ? av * big[i] : big[i] / av, y[i], par);
        for (cplx sv : small)
          t = guarded_div(t, pochhammer(sv * big[i], y[i], par), "composition_transform");
        for (int j = 0; j < k; ++j)
          t = guarded_div(t, pochhammer(par.q * big[i] / big[j], y[i], par),
                          "composition_transform");
      }
      scale = std::max(scale, std::abs(t));
      total += t;
    });
    return total;
  };
  const cplx lhs = side(z, w, true), rhs = side(w, z, false);
  return {lhs, rhs, scale};
}

/// Multiple-to-multiple transformation; requires lambda = bc/aq = q^{|N|-|M|} a/(de).
inline ValuePair multiple_transform_pair(cplx a, cplx b, cplx c, cplx d, cplx e,
                                         const std::vector<cplx>& w, const std::vector<cplx>& z,
                                         const MultiIndex& mcaps, const MultiIndex& ncaps,
                                         const EllipticParams& par) {
  const cplx q = par.q;
  const int m = int(w.size()), n = int(z.size());
  if (int(mcaps.size()) != m || int(ncaps.size()) != n)
    throw domain_error("multiple_transform: cap sizes");
  const cplx lm = b * c / (a * q);
  VSeries lhs_v;
  lhs_v.a = a;
  lhs_v.b = {b, c};
  for (cplx wj : w) lhs_v.b.push_back(a * q / wj);
  for (int j = 0; j < n; ++j) lhs_v.c.push_back(par.q_pow(-ncaps[j]) / z[j]);
  for (int j = 0; j < m; ++j) lhs_v.c.push_back(par.q_pow(mcaps[j]) * w[j]);
  lhs_v.c.push_back(d);
  lhs_v.c.push_back(e);
  lhs_v.z = z;
  double s1 = 1.0;
  cplx lhs = v_sum(lhs_v, ncaps, std::nullopt, par, &s1);

  cplx pref = std::pow(c, double(mi_sum(ncaps) - mi_sum(mcaps)));
  pref *= guarded_div(
      poch_prod({lm * q * d, lm * q * e}, mi_sum(mcaps), par) *
          poch_prod({a * q / (c * d), a * q / (c * e)}, mi_sum(ncaps), par),
      poch_prod({lm * q * d / c, lm * q * e / c}, mi_sum(mcaps), par) *
          poch_prod({a * q / d, a * q / e}, mi_sum(ncaps), par),
      "multiple_transform prefactor");
  for (int j = 0; j < m; ++j)
    pref *= guarded_div(poch_prod({lm * q * w[j] / b, lm * q * w[j] / c}, mcaps[j], par),
                        poch_prod({lm * q * w[j] / (b * c), lm * q * w[j]}, mcaps[j], par),
                        "multiple_transform prefactor");
  for (int j = 0; j < n; ++j)
    pref *= guarded_div(poch_prod({a * q * z[j] / (b * c), a * q * z[j]}, ncaps[j], par),
                        poch_prod({a * q * z[j] / b, a * q * z[j] / c}, ncaps[j], par),
                        "multiple_transform prefactor");

  VSeries rhs_v;
  rhs_v.a = lm;
  rhs_v.b = {b, c};
  for (cplx zj : z) rhs_v.b.push_back(lm * q / zj);
  for (int j = 0; j < m; ++j) rhs_v.c.push_back(par.q_pow(-mcaps[j]) / w[j]);
  for (int j = 0; j < n; ++j) rhs_v.c.push_back(par.q_pow(ncaps[j]) * z[j]);
  rhs_v.c.push_back(cplx(1.0) / d);
  rhs_v.c.push_back(cplx(1.0) / e);
  rhs_v.z = w;
  double s2 = 1.0;
  cplx rhs = pref * v_sum(rhs_v, mcaps, std::nullopt, par, &s2);
  return {lhs, rhs, std::max(s1, s2 * std::abs(pref))};
}

/// Multiple Jackson summation with c-type termination; requires
/// a^2 q^{|N|+1} = bcde.
inline ValuePair multiple_jackson_pair(cplx a, cplx b, cplx c, cplx d, cplx e,
                                       const std::vector<cplx>& z, const MultiIndex& ncaps,
                                       const EllipticParams& par) {
  const cplx q = par.q;
  const int n = int(z.size());
  VSeries v;
  v.a = a;
  v.b = {b, c};
  for (int j = 0; j < n; ++j) v.c.push_back(par.q_pow(-ncaps[j]) / z[j]);
  v.c.push_back(d);
  v.c.push_back(e);
  v.z = z;
  double scale = 1.0;
  cplx lhs = v_sum(v, ncaps, std::nullopt, par, &scale);
  const int aN = mi_sum(ncaps);
  cplx rhs = std::pow(c, double(aN)) *
             guarded_div(poch_prod({a * q / (c * d), a * q / (c * e)}, aN, par),
                         poch_prod({a * q / d, a * q / e}, aN, par), "multiple_jackson");
  for (int j = 0; j < n; ++j)
    rhs *= guarded_div(poch_prod({a * q * z[j], a * q * z[j] / (b * c)}, ncaps[j], par),
                       poch_prod({a * q * z[j] / b, a * q * z[j] / c}, ncaps[j], par),
                       "multiple_jackson");
  return {lhs, rhs, scale};
}

/// Second multiple Jackson summation (box sum with mixed-length Pochhammers);
/// requires a^2 q^{|N|+1} = bcde.
inline ValuePair boxed_jackson_pair(cplx a, cplx b, cplx c, cplx d, cplx e,
                                    const std::vector<cplx>& x, const MultiIndex& ncaps,
                                    const EllipticParams& par) {
  const cplx q = par.q;
  const int n = int(x.size());
  const int aN = mi_sum(ncaps);
  cplx lhs(0.0);
  double scale = 1.0;
  for_each_box(ncaps, [&](const MultiIndex& y) {
    const int ay = mi_sum(y);
    cplx t = delta_ratio(x, y, par) * par.q_pow(ay);
    t *= guarded_div(theta(a * par.q_pow(2 * ay), par), theta(a, par), "boxed_jackson");
    for (int i = 0; i < n; ++i) {
      t *= pochhammer(a * par.q_pow(1 + aN) / (e * x[i]), ay - y[i], par);
      t *= pochhammer(d / x[i], ay, par);
      t *= pochhammer(e * x[i], y[i], par);
      t = guarded_div(t, pochhammer(d / x[i], ay - y[i], par), "boxed_jackson");
      t = guarded_div(t, pochhammer(a * par.q_pow(1 + aN - ncaps[i]) / (e * x[i]), ay, par),
                      "boxed_jackson");
      t = guarded_div(t, pochhammer(a * q * x[i] / d, y[i], par), "boxed_jackson");
    }
    t *= guarded_div(poch_prod({a, b, c}, ay, par),
                     poch_prod({a * par.q_pow(1 + aN), a * q / b, a * q / c}, ay, par),
                     "boxed_jackson");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        t *= guarded_div(pochhammer(par.q_pow(-ncaps[j]) * x[i] / x[j], y[i], par),
                         pochhammer(q * x[i] / x[j], y[i], par), "boxed_jackson");
    scale = std::max(scale, std::abs(t));
    lhs += t;
  });
  cplx rhs = guarded_div(poch_prod({a * q, a * q / (b * c)}, aN, par),
                         poch_prod({a * q / b, a * q / c}, aN, par), "boxed_jackson");
  for (int i = 0; i < n; ++i)
    rhs *= guarded_div(poch_prod({a * q * x[i] / (b * d), a * q * x[i] / (c * d)}, ncaps[i], par),
                       poch_prod({a * q * x[i] / d, a * q * x[i] / (b * c * d)}, ncaps[i], par),
                       "boxed_jackson");
  return {lhs, rhs, scale};
}

}  // namespace ell

#endif  // ELL_SERIES_HPP
