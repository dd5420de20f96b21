#ifndef ELL_BIORTHO_HPP
#define ELL_BIORTHO_HPP

// Biorthogonal pair f_u, g_u of multiple series on the finite grid
// 0 <= y_i <= N_i, with weight w(y) and norms Gamma_u:
//   sum_y w(y) f_u(y) g_v(y) = delta_{uv} Gamma_u,
// together with the triangular matrix-inversion pair (A, B) that underlies
// the direct proof.

#include <vector>

#include "ell/core.hpp"
#include "ell/series.hpp"
#include "ell/subsets.hpp"

namespace ell {

struct BiorthoParams {
  cplx a, b, c;
  std::vector<cplx> x;
  MultiIndex caps;  // N_1..N_n

  int n() const { return int(x.size()); }
  void validate() const {
    if (caps.size() != x.size()) throw domain_error("BiorthoParams: |N| must match |x|");
    for (int v : caps)
      if (v < 0) throw domain_error("BiorthoParams: N_i must be nonnegative");
  }
};

namespace detail {
inline void check_grid(const MultiIndex& y, const BiorthoParams& bp, const char* what) {
  if (int(y.size()) != bp.n()) throw domain_error(std::string(what) + ": grid size mismatch");
  for (int i = 0; i < bp.n(); ++i)
    if (y[i] < 0 || y[i] > bp.caps[i])
      throw domain_error(std::string(what) + ": grid point outside the box");
}
}  // namespace detail

inline cplx f_fn(const MultiIndex& u, const MultiIndex& y, const BiorthoParams& bp,
                 const EllipticParams& par) {
  bp.validate();
  detail::check_grid(u, bp, "f_fn");
  detail::check_grid(y, bp, "f_fn");
  const int n = bp.n();
  const int aN = mi_sum(bp.caps);
  VSeries v;
  v.a = bp.a / bp.b;
  v.b = {bp.a * par.q_pow(mi_sum(y)), bp.c * par.q_pow(mi_sum(u))};
  for (int i = 0; i < n; ++i) v.b.push_back(bp.a * par.q_pow(1 + bp.caps[i]) * bp.x[i] / bp.b);
  v.c = {cplx(1.0), bp.a * par.q_pow(1 - aN) / (bp.b * bp.b * bp.c)};
  for (int i = 0; i < n; ++i) v.c.push_back(par.q_pow(-y[i]) / bp.x[i]);
  for (int i = 0; i < n; ++i) v.c.push_back(par.q_pow(-u[i]) / bp.x[i]);
  v.z = bp.x;
  MultiIndex caps(n);
  for (int i = 0; i < n; ++i) caps[i] = std::min(u[i], y[i]);
  return v_sum(v, caps, std::nullopt, par);
}

inline cplx g_fn(const MultiIndex& u, const MultiIndex& y, const BiorthoParams& bp,
                 const EllipticParams& par) {
  bp.validate();
  detail::check_grid(u, bp, "g_fn");
  detail::check_grid(y, bp, "g_fn");
  const int n = bp.n();
  const int aN = mi_sum(bp.caps);
  VSeries v;
  v.a = par.q_pow(-aN) * bp.b / bp.a;
  v.b = {par.q_pow(-mi_sum(y) - aN) / bp.a, par.q_pow(-mi_sum(u) - aN) / bp.c};
  for (int i = 0; i < n; ++i) v.b.push_back(par.q_pow(1 - aN) * bp.b / (bp.a * bp.x[i]));
  v.c = {par.q, par.q_pow(aN) * bp.b * bp.b * bp.c / bp.a};
  for (int i = 0; i < n; ++i) v.c.push_back(par.q_pow(y[i]) * bp.x[i]);
  for (int i = 0; i < n; ++i) v.c.push_back(par.q_pow(u[i]) * bp.x[i]);
  for (int i = 0; i < n; ++i) v.z.push_back(par.q_pow(-bp.caps[i]) / bp.x[i]);
  MultiIndex caps(n);
  for (int i = 0; i < n; ++i) caps[i] = bp.caps[i] - std::max(u[i], y[i]);
  return v_sum(v, caps, std::nullopt, par);
}

/// The alternative series for g (its transformation partner).
inline cplx g_alt(const MultiIndex& u, const MultiIndex& y, const BiorthoParams& bp,
                  const EllipticParams& par) {
  bp.validate();
  detail::check_grid(u, bp, "g_alt");
  detail::check_grid(y, bp, "g_alt");
  const int n = bp.n();
  const int aN = mi_sum(bp.caps);
  const int au = mi_sum(u), ay = mi_sum(y);
  VSeries v;
  v.a = par.q_pow(-au - ay - aN - 1) / (bp.b * bp.c);
  v.b = {par.q_pow(-ay - aN) / bp.a, par.q_pow(-au - aN) / bp.c};
  for (int i = 0; i < n; ++i)
    v.b.push_back(par.q_pow(-au - ay - aN + bp.caps[i]) * bp.x[i] / (bp.b * bp.c));
  v.c = {cplx(1.0) / par.q, bp.a * par.q_pow(-aN) / (bp.b * bp.b * bp.c)};
  for (int i = 0; i < n; ++i) v.c.push_back(par.q_pow(-y[i]) / bp.x[i]);
  for (int i = 0; i < n; ++i) v.c.push_back(par.q_pow(-u[i]) / bp.x[i]);
  v.z = bp.x;
  MultiIndex caps(n);
  for (int i = 0; i < n; ++i) caps[i] = std::min(u[i], y[i]);
  return v_sum(v, caps, std::nullopt, par);
}

inline cplx weight_w(const MultiIndex& y, const BiorthoParams& bp, const EllipticParams& par) {
  bp.validate();
  detail::check_grid(y, bp, "weight_w");
  const int n = bp.n();
  const int ay = mi_sum(y), aN = mi_sum(bp.caps);
  cplx r = delta_ratio(bp.x, y, par) * par.q_pow(ay);
  r *= guarded_div(theta(bp.a * par.q_pow(2 * ay), par), theta(bp.a, par), "weight_w");
  r *= guarded_div(pochhammer(bp.a, ay, par), pochhammer(bp.a * par.q_pow(1 + aN), ay, par),
                   "weight_w");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r *= guarded_div(pochhammer(par.q_pow(-bp.caps[j]) * bp.x[i] / bp.x[j], y[i], par),
                       pochhammer(par.q * bp.x[i] / bp.x[j], y[i], par), "weight_w");
  for (int i = 0; i < n; ++i) {
    r *= guarded_div(theta(bp.b * par.q_pow(ay - y[i]) / bp.x[i], par),
                     theta(bp.b / bp.x[i], par), "weight_w");
    r *= guarded_div(pochhammer(bp.b / bp.x[i], ay, par),
                     pochhammer(bp.b * par.q_pow(1 - bp.caps[i]) / bp.x[i], ay, par), "weight_w");
    r *= guarded_div(pochhammer(par.q_pow(aN) * bp.a * bp.x[i] / bp.b, y[i], par),
                     pochhammer(bp.a * par.q * bp.x[i] / bp.b, y[i], par), "weight_w");
  }
  return ensure_finite(r, "weight_w");
}

inline cplx norm_gamma(const MultiIndex& u, const BiorthoParams& bp, const EllipticParams& par) {
  bp.validate();
  detail::check_grid(u, bp, "norm_gamma");
  const int n = bp.n();
  const int au = mi_sum(u), aN = mi_sum(bp.caps);
  cplx r = std::pow(bp.c, double(aN)) * par.q_pow(double(aN) * aN - au);
  r = guarded_div(r, delta_ratio(bp.x, u, par), "norm_gamma");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r *= guarded_div(pochhammer(par.q * bp.x[i] / bp.x[j], u[i], par),
                       pochhammer(par.q_pow(-bp.caps[j]) * bp.x[i] / bp.x[j], u[i], par),
                       "norm_gamma");
  r *= pochhammer(bp.a * par.q, aN, par);
  r *= pochhammer(par.q_pow(-au - aN) / bp.c, aN - au, par);
  r *= pochhammer(par.q_pow(1 - 2 * au) / bp.c, au, par);
  r = guarded_div(r,
                  pochhammer(bp.a * par.q / bp.b, aN, par) *
                      pochhammer(bp.b * bp.c * par.q_pow(aN), aN, par),
                  "norm_gamma");
  for (int i = 0; i < n; ++i) {
    r *= guarded_div(theta(par.q_pow(-au) * bp.a * bp.x[i] / (bp.b * bp.c), par),
                     theta(par.q_pow(-au + u[i]) * bp.a * bp.x[i] / (bp.b * bp.c), par),
                     "norm_gamma");
    r *= guarded_div(
        pochhammer(bp.x[i], bp.caps[i], par) *
            pochhammer(bp.a * par.q_pow(1 - aN) * bp.x[i] / (bp.b * bp.b * bp.c), bp.caps[i], par),
        pochhammer(bp.x[i] / bp.b, bp.caps[i], par) *
            pochhammer(par.q_pow(-au) * bp.a * bp.x[i] / (bp.b * bp.c), bp.caps[i], par),
        "norm_gamma");
    r *= guarded_div(
        pochhammer(par.q_pow(u[i] + aN) * bp.a * bp.x[i] / bp.b, bp.caps[i] - u[i], par),
        pochhammer(par.q_pow(1 + u[i]) * bp.a * bp.x[i] / bp.b, bp.caps[i] - u[i], par),
        "norm_gamma");
  }
  return ensure_finite(r, "norm_gamma");
}

/// |sum_y w(y) f_u(y) g_v(y) - delta_{uv} Gamma_u| / max(|Gamma_u|, |Gamma_v|)
inline double biortho_residual(const MultiIndex& u, const MultiIndex& v, const BiorthoParams& bp,
                               const EllipticParams& par) {
  cplx sum(0.0);
  for_each_box(bp.caps, [&](const MultiIndex& y) {
    sum += weight_w(y, bp, par) * f_fn(u, y, bp, par) * g_fn(v, y, bp, par);
  });
  const cplx gu = norm_gamma(u, bp, par);
  const cplx gv = norm_gamma(v, bp, par);
  const cplx tgt = (u == v) ? gu : cplx(0.0);
  return std::abs(sum - tgt) / std::max(std::abs(gu), std::abs(gv));
}

// ---------------------------------------------------------------------------
// Triangular matrix-inversion pair.  Entries vanish outside l <= k <= m
// (componentwise); A_kk = B_kk = 1.

inline cplx inv_matrix_a(const MultiIndex& m, const MultiIndex& k, cplx a, cplx b,
                         const std::vector<cplx>& x, const EllipticParams& par) {
  const int n = int(x.size());
  if (int(m.size()) != n || int(k.size()) != n) throw domain_error("inv_matrix_a: size mismatch");
  for (int i = 0; i < n; ++i)
    if (k[i] < 0 || k[i] > m[i]) return cplx(0.0);
  const int am = mi_sum(m), ak = mi_sum(k);
  cplx r = pochhammer(a * b * par.q_pow(2 * ak), am - ak, par);
  for (int i = 0; i < n; ++i) r *= pochhammer(a * par.q_pow(ak - k[i]) / x[i], am - ak, par);
  for (int i = 0; i < n; ++i) {
    r = guarded_div(r, pochhammer(b * x[i] * par.q_pow(1 + k[i] + ak), m[i] - k[i], par),
                    "inv_matrix_a");
    for (int j = 0; j < n; ++j)
      r = guarded_div(r, pochhammer(par.q_pow(1 + k[i] - k[j]) * x[i] / x[j], m[i] - k[i], par),
                      "inv_matrix_a");
  }
  return ensure_finite(r, "inv_matrix_a");
}

inline cplx inv_matrix_b(const MultiIndex& k, const MultiIndex& l, cplx a, cplx b,
                         const std::vector<cplx>& x, const EllipticParams& par) {
  const int n = int(x.size());
  if (int(k.size()) != n || int(l.size()) != n) throw domain_error("inv_matrix_b: size mismatch");
  for (int i = 0; i < n; ++i)
    if (l[i] < 0 || l[i] > k[i]) return cplx(0.0);
  const int ak = mi_sum(k), al = mi_sum(l);
  const int dk = ak - al;
  cplx r = (dk % 2 ? -1.0 : 1.0) * par.q_pow(0.5 * dk * (dk - 1));
  r *= guarded_div(theta(a * b * par.q_pow(2 * al), par), theta(a * b * par.q_pow(2 * ak), par),
                   "inv_matrix_b");
  for (int i = 0; i < n; ++i)
    r *= guarded_div(theta(a * par.q_pow(al - l[i]) / x[i], par),
                     theta(a * par.q_pow(ak - k[i]) / x[i], par), "inv_matrix_b");
  r *= pochhammer(a * b * par.q_pow(1 + al + ak), dk, par);
  for (int i = 0; i < n; ++i) r *= pochhammer(a * par.q_pow(1 + al - k[i]) / x[i], dk, par);
  for (int i = 0; i < n; ++i) {
    r = guarded_div(r, pochhammer(b * x[i] * par.q_pow(l[i] + ak), k[i] - l[i], par),
                    "inv_matrix_b");
    for (int j = 0; j < n; ++j)
      r = guarded_div(r, pochhammer(par.q_pow(1 + l[i] - l[j]) * x[i] / x[j], k[i] - l[i], par),
                      "inv_matrix_b");
  }
  return ensure_finite(r, "inv_matrix_b");
}

/// Max entrywise residual of sum_k A_{mk} B_{kl} = delta_{lm} and the product
/// in the other order, over the whole box.
inline double inversion_residual(const MultiIndex& box, cplx a, cplx b, const std::vector<cplx>& x,
                                 const EllipticParams& par) {
  double worst = 0.0;
  for_each_box(box, [&](const MultiIndex& m) {
    for_each_box(box, [&](const MultiIndex& l) {
      cplx s1(0.0), s2(0.0);
      for_each_box(box, [&](const MultiIndex& k) {
        s1 += inv_matrix_a(m, k, a, b, x, par) * inv_matrix_b(k, l, a, b, x, par);
        s2 += inv_matrix_b(m, k, a, b, x, par) * inv_matrix_a(k, l, a, b, x, par);
      });
      const double tgt = (m == l) ? 1.0 : 0.0;
      worst = std::max({worst, std::abs(s1 - tgt), std::abs(s2 - tgt)});
    });
  });
  return worst;
}

/// |r(y) - r(y0)| / |r(y0)| maximized over the grid for r = g_u / g_alt_u.
/// (The connecting factor, tested for independence of y.)
inline double g_alt_ratio_residual(const MultiIndex& u, const BiorthoParams& bp,
                                   const EllipticParams& par) {
  bool first = true;
  cplx r0(0.0);
  double worst = 0.0;
  for_each_box(bp.caps, [&](const MultiIndex& y) {
    const cplx r = guarded_div(g_fn(u, y, bp, par), g_alt(u, y, bp, par), "g_alt_ratio");
    if (first) {
      r0 = r;
      first = false;
    } else {
      worst = std::max(worst, std::abs(r - r0) / std::abs(r0));
    }
  });
  return worst;
}

/// The explicit sequence C_s of the direct inversion proof.
inline cplx c_seq(const MultiIndex& s, const BiorthoParams& bp, const EllipticParams& par) {
  bp.validate();
  const int n = bp.n();
  const int as = mi_sum(s), aN = mi_sum(bp.caps);
  long cross = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) cross += long(s[i]) * s[j];
  cplx r = par.q_pow(double(2 * cross));
  for (int i = 0; i < n; ++i) r /= std::pow(bp.x[i], double(2 * s[i]));
  r *= std::pow(bp.b * bp.b * bp.c / (par.q * bp.a), double(as));
  r = guarded_div(r, delta_ratio(bp.x, s, par), "c_seq");
  r *= guarded_div(pochhammer(bp.a, 2 * as, par) * pochhammer(bp.c, 2 * as, par),
                   pochhammer(bp.a * par.q / bp.b, as, par) *
                       pochhammer(par.q_pow(aN) * bp.b * bp.c, as, par),
                   "c_seq");
  for (int i = 0; i < n; ++i) {
    r *= pochhammer(bp.a * bp.x[i] / bp.b, as, par) *
         pochhammer(bp.a * par.q_pow(1 + bp.caps[i]) * bp.x[i] / bp.b, as, par);
    r *= pochhammer(bp.b / bp.x[i], as - s[i], par) *
         pochhammer(bp.b * bp.c / (bp.a * bp.x[i]), as - s[i], par);
    r *= pochhammer(bp.x[i], s[i], par) *
         pochhammer(bp.a * par.q_pow(1 - aN) * bp.x[i] / (bp.b * bp.b * bp.c), s[i], par);
    r = guarded_div(r,
                    pochhammer(bp.a * bp.x[i] / bp.b, as + s[i], par) *
                        pochhammer(bp.a * par.q * bp.x[i] / bp.b, as + s[i], par),
                    "c_seq");
    for (int j = 0; j < n; ++j)
      r = guarded_div(r,
                      pochhammer(par.q * bp.x[i] / bp.x[j], s[i], par) *
                          pochhammer(par.q_pow(-bp.caps[j]) * bp.x[i] / bp.x[j], s[i], par),
                      "c_seq");
  }
  return ensure_finite(r, "c_seq");
}

/// Independent rederivation of the biorthogonality from the inversion pair:
/// with the parameter substitution (a,b) -> (cb/a, a/b) and (c,d) -> (b, a/b),
/// assembles sum_y [sum_s C_s A_{us} A_{ys}] [sum_t C_{N-t}^{-1} B_{N-t,v}
/// B_{N-t,y}] and returns |result - delta_{uv}|.
inline double direct_route_residual(const MultiIndex& u, const MultiIndex& v,
                                    const BiorthoParams& bp, const EllipticParams& par) {
  bp.validate();
  const int n = bp.n();
  const cplx a1 = bp.c * bp.b / bp.a, b1 = bp.a / bp.b;
  const cplx a2 = bp.b, b2 = bp.a / bp.b;
  cplx total(0.0);
  for_each_box(bp.caps, [&](const MultiIndex& y) {
    MultiIndex caps1(n), caps2(n);
    for (int i = 0; i < n; ++i) {
      caps1[i] = std::min(u[i], y[i]);
      caps2[i] = bp.caps[i] - std::max(v[i], y[i]);
    }
    cplx s1(0.0);
    for_each_box(caps1, [&](const MultiIndex& s) {
      s1 += c_seq(s, bp, par) * inv_matrix_a(u, s, a1, b1, bp.x, par) *
            inv_matrix_a(y, s, a2, b2, bp.x, par);
    });
    cplx s2(0.0);
    for_each_box(caps2, [&](const MultiIndex& t) {
      MultiIndex nt(n);
      for (int i = 0; i < n; ++i) nt[i] = bp.caps[i] - t[i];
      s2 += guarded_div(inv_matrix_b(nt, v, a1, b1, bp.x, par) *
                            inv_matrix_b(nt, y, a2, b2, bp.x, par),
                        c_seq(nt, bp, par), "direct_route");
    });
    total += s1 * s2;
  });
  const double tgt = (u == v) ? 1.0 : 0.0;
  return std::abs(total - tgt);
}

}  // namespace ell

#endif  // ELL_BIORTHO_HPP
