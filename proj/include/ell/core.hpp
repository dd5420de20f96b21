#ifndef ELL_CORE_HPP
#define ELL_CORE_HPP

// Theta-function and elliptic Pochhammer kernel. Everything else in the
// library is built from the functions in this header.
//
// Conventions:
//   theta(x)   = prod_{j>=0} (1 - p^j x)(1 - p^{j+1}/x),   |p| < 1
//   (x)_k      = theta(x) theta(qx) ... theta(q^{k-1} x),  extended to k < 0
//               by (x)_k = 1 / (q^k x)_{-k}
//   q^lambda   = exp(lambda * log q) for one fixed branch of log q

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ell {

using cplx = std::complex<double>;

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// bad arguments (x = 0, size mismatch, nonterminating series, ...)
class domain_error : public error {
 public:
  using error::error;
};

// a denominator theta/Pochhammer too close to a zero of theta
class singular_error : public error {
 public:
  using error::error;
};

// NaN/Inf escaped an evaluation, or overflow
class numeric_error : public error {
 public:
  using error::error;
};

// request exceeds a hard enumeration/permutation cap
class capacity_error : public error {
 public:
  using error::error;
};

// parameter sampling could not reach a generic point
class sampling_error : public error {
 public:
  using error::error;
};

// Shared genericity floor: any denominator with modulus below this is treated
// as a singular configuration and reported (the samplers then retry).
inline constexpr double kSingularTol = 1e-8;

// Hard caps (worst-case cost is exponential past these).
inline constexpr int kMaxThetaFactors = 200;
inline constexpr int kMaxLatticeCells = 25;
inline constexpr int kMaxPermutationSize = 8;

inline cplx ensure_finite(cplx v, const char* what) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw numeric_error(std::string("non-finite value in ") + what);
  return v;
}

inline cplx guarded_div(cplx num, cplx den, const char* what) {
  if (std::abs(den) < kSingularTol)
    throw singular_error(std::string("singular denominator in ") + what);
  return num / den;
}

/// Global parameter triple (p, q, log q).  q^lambda always means
/// exp(lambda * log_q) with the stored branch, so that
/// q_pow(a + b) == q_pow(a) * q_pow(b) up to rounding.
struct EllipticParams {
  cplx p;
  cplx q;
  cplx log_q;

  static EllipticParams make(cplx p, cplx q) {
    if (std::abs(p) >= 1.0) throw domain_error("EllipticParams: |p| must be < 1");
    if (q == cplx(0.0)) throw domain_error("EllipticParams: q must be nonzero");
    return EllipticParams{p, q, std::log(q)};
  }

  static EllipticParams make_with_log(cplx p, cplx log_q) {
    if (std::abs(p) >= 1.0) throw domain_error("EllipticParams: |p| must be < 1");
    return EllipticParams{p, std::exp(log_q), log_q};
  }

  cplx q_pow(cplx lambda) const { return ensure_finite(std::exp(lambda * log_q), "q_pow"); }
  cplx q_pow(double lambda) const { return q_pow(cplx(lambda, 0.0)); }
  cplx q_pow(int k) const { return q_pow(cplx(double(k), 0.0)); }
};

/// Truncated theta product.  The tail is cut once |p|^J max(|x|,1/|x|)
/// drops below 1e-17 (at most kMaxThetaFactors factors), so the truncation
/// error sits below double rounding for |p| <= 0.5.
inline cplx theta(cplx x, const EllipticParams& par) {
  if (x == cplx(0.0)) throw domain_error("theta: x must be nonzero");
  const double ax = std::abs(x);
  const double mx = ax > 1.0 ? ax : 1.0 / ax;
  cplx r(1.0, 0.0);
  cplx pj(1.0, 0.0);
  for (int j = 0; j < kMaxThetaFactors; ++j) {
    r *= (1.0 - pj * x) * (1.0 - pj * par.p / x);
    pj *= par.p;
    if (std::abs(pj) * mx < 1e-17) break;
  }
  return ensure_finite(r, "theta");
}

inline cplx theta_prod(std::span<const cplx> xs, const EllipticParams& par) {
  cplx r(1.0, 0.0);
  for (cplx x : xs) r *= theta(x, par);
  return ensure_finite(r, "theta_prod");
}

inline cplx theta_prod(std::initializer_list<cplx> xs, const EllipticParams& par) {
  return theta_prod(std::span<const cplx>(xs.begin(), xs.size()), par);
}

inline cplx theta2(cplx x1, cplx x2, const EllipticParams& par) {
  return theta(x1, par) * theta(x2, par);
}

/// Elliptic Pochhammer (x)_k, any integer k.
inline cplx pochhammer(cplx x, long k, const EllipticParams& par) {
  if (x == cplx(0.0)) throw domain_error("pochhammer: x must be nonzero");
  if (k >= 0) {
    cplx r(1.0, 0.0);
    cplx xq = x;
    for (long j = 0; j < k; ++j) {
      r *= theta(xq, par);
      xq *= par.q;
    }
    return ensure_finite(r, "pochhammer");
  }
  cplx den = pochhammer(x * par.q_pow(cplx(double(k), 0.0)), -k, par);
  return guarded_div(cplx(1.0, 0.0), den, "pochhammer (negative index)");
}

inline cplx poch_prod(std::initializer_list<cplx> xs, long k, const EllipticParams& par) {
  cplx r(1.0, 0.0);
  for (cplx x : xs) r *= pochhammer(x, k, par);
  return r;
}

/// F(lambda) = q^{-lambda/2} theta(q^{lambda+1}); vanishes at lambda = -1.
inline cplx cap_f(cplx lambda, const EllipticParams& par) {
  return ensure_finite(par.q_pow(-lambda / 2.0) * theta(par.q_pow(lambda + 1.0), par), "cap_f");
}

/// prod_{j<k} q^{y_j} theta(q^{y_k - y_j} z_k/z_j) / theta(z_k/z_j)
inline cplx delta_ratio(std::span<const cplx> z, std::span<const int> y,
                        const EllipticParams& par) {
  const std::size_t n = z.size();
  if (y.size() != n) throw domain_error("delta_ratio: size mismatch");
  cplx r(1.0, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k)
      r *= par.q_pow(y[j]) *
           guarded_div(theta(par.q_pow(y[k] - y[j]) * z[k] / z[j], par),
                       theta(z[k] / z[j], par), "delta_ratio");
  return ensure_finite(r, "delta_ratio");
}

inline cplx delta_ratio(const std::vector<cplx>& z, const std::vector<int>& y,
                        const EllipticParams& par) {
  return delta_ratio(std::span<const cplx>(z), std::span<const int>(y), par);
}

inline double rel_diff(cplx a, cplx b) {
  double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

// |a - b| relative to max(|a|, |b|, floor); use floor = 1 for quantities that
// legitimately cancel to zero.
inline double rel_diff_floor(cplx a, cplx b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace ell

#endif  // ELL_CORE_HPP
