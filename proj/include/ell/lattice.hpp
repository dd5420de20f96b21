#ifndef ELL_LATTICE_HPP
#define ELL_LATTICE_HPP

// Exact enumeration of 8VSOS states with fixed boundary and the resulting
// partition functions.  This is the oracle every braiding-type quantity in
// the library is checked against.
//
// Grid convention: rows are indexed top to bottom by z_1..z_n, columns left
// to right by w_1..w_m.  For a single vertex, (south, north, west, east)
// edge signs map to the dynamical R-matrix entry r_entry(s,n,w,e); the
// north-west face label alpha shifts the dynamical parameter, the top-left
// face of the whole lattice carries 0, and crossing an edge of sign x going
// east or south adds x to the face label.

#include <cstdint>
#include <string>
#include <vector>

#include "ell/core.hpp"

namespace ell {

using SignVector = std::vector<int>;  // entries are +1 / -1

inline int sign_sum(const SignVector& v) {
  int s = 0;
  for (int x : v) s += x;
  return s;
}

inline SignVector repeat_sign(int sign, int n) { return SignVector(std::size_t(n), sign); }

inline SignVector signs_from_string(const std::string& s) {
  SignVector v;
  v.reserve(s.size());
  for (char c : s) {
    if (c == '+')
      v.push_back(1);
    else if (c == '-')
      v.push_back(-1);
    else
      throw domain_error("sign vector string must consist of '+'/'-'");
  }
  return v;
}

inline SignVector negate_reverse(const SignVector& v) {
  SignVector r(v.rbegin(), v.rend());
  for (int& x : r) x = -x;
  return r;
}

/// Dynamical R-matrix entry with south/north/west/east edge signs.
/// Diagonal sign patterns give 1, the four mixed patterns give theta ratios,
/// everything violating the ice rule gives 0.
inline cplx r_entry(int south, int north, int west, int east, cplx lambda, cplx z,
                    const EllipticParams& par) {
  if (z == cplx(0.0)) throw domain_error("r_entry: z must be nonzero");
  if (south + west != north + east) return cplx(0.0);
  if (south == north && west == east && south == west) return cplx(1.0);
  const cplx q = par.q;
  if (south == 1) {  // (south,west) = (+,-)
    if (north == 1)  // a-entry
      return guarded_div(theta2(z, par.q_pow(lambda + 2.0), par),
                         theta2(q * z, par.q_pow(lambda + 1.0), par), "r_entry a");
    return guarded_div(theta2(q, par.q_pow(-lambda - 1.0) * z, par),
                       theta2(q * z, par.q_pow(-lambda - 1.0), par), "r_entry b");
  }
  // (south,west) = (-,+)
  if (north == 1)  // c-entry
    return guarded_div(theta2(q, par.q_pow(lambda + 1.0) * z, par),
                       theta2(q * z, par.q_pow(lambda + 1.0), par), "r_entry c");
  return guarded_div(theta2(z, par.q_pow(-lambda), par),
                     theta2(q * z, par.q_pow(-lambda - 1.0), par), "r_entry d");
}

/// The four boundary sign vectors of an m x n lattice.
struct LatticeBoundary {
  SignVector bottom;  // length m
  SignVector top;     // length m
  SignVector left;    // length n, top row first
  SignVector right;   // length n

  int cols() const { return int(bottom.size()); }
  int rows() const { return int(left.size()); }

  void validate() const {
    if (top.size() != bottom.size() || right.size() != left.size())
      throw domain_error("LatticeBoundary: size mismatch");
    for (const SignVector* v : {&bottom, &top, &left, &right})
      for (int x : *v)
        if (x != 1 && x != -1) throw domain_error("LatticeBoundary: signs must be +-1");
  }

  bool parity_ok() const {
    return sign_sum(bottom) + sign_sum(left) == sign_sum(top) + sign_sum(right);
  }

  static LatticeBoundary domain_wall(int n) {
    return LatticeBoundary{repeat_sign(1, n), repeat_sign(-1, n), repeat_sign(-1, n),
                           repeat_sign(1, n)};
  }
};

/// One admissible edge labelling.  vert(i,j) is the vertical edge in column j
/// between row i and row i+1 (i = 0 is the top boundary); horiz(i,j) is the
/// horizontal edge in row i left of column j (j = 0 is the left boundary).
struct LatticeState {
  int rows = 0, cols = 0;
  std::vector<signed char> vert;   // (rows+1) x cols
  std::vector<signed char> horiz;  // rows x (cols+1)

  int vert_edge(int i, int j) const { return vert[std::size_t(i) * cols + j]; }
  int horiz_edge(int i, int j) const { return horiz[std::size_t(i) * (cols + 1) + j]; }

  /// Face label north-west of vertex (i,j), 0-based; face(0,0) = 0.
  int face(int i, int j) const {
    int a = 0;
    for (int r = 0; r < i; ++r) a += horiz_edge(r, 0);
    for (int c = 0; c < j; ++c) a += vert_edge(i, c);
    return a;
  }
};

namespace detail {

// Row-major DFS over vertices.  At each vertex north and west are known;
// the ice rule leaves south - east = north - west, so there are at most two
// branches, tried with south = +1 first.
template <class OnLeaf>
class LatticeScan {
 public:
  LatticeScan(const LatticeBoundary& b, OnLeaf on_leaf)
      : m_(b.cols()), n_(b.rows()), on_leaf_(on_leaf) {
    b.validate();
    if (m_ * n_ > kMaxLatticeCells)
      throw capacity_error("lattice enumeration cap exceeded (m*n > 25)");
    vert_.assign(std::size_t(n_ + 1) * m_, 0);
    horiz_.assign(std::size_t(n_) * (m_ + 1), 0);
    for (int j = 0; j < m_; ++j) {
      vert_[j] = (signed char)b.top[j];
      vert_[std::size_t(n_) * m_ + j] = (signed char)b.bottom[j];
    }
    for (int i = 0; i < n_; ++i) {
      horiz_[std::size_t(i) * (m_ + 1)] = (signed char)b.left[i];
      horiz_[std::size_t(i) * (m_ + 1) + m_] = (signed char)b.right[i];
    }
  }

  void run() {
    if (n_ == 0 || m_ == 0) {
      on_leaf_(vert_, horiz_);
      return;
    }
    dfs(0);
  }

 private:
  int vert_at(int i, int j) const { return vert_[std::size_t(i) * m_ + j]; }
  int horiz_at(int i, int j) const { return horiz_[std::size_t(i) * (m_ + 1) + j]; }

  void dfs(int idx) {
    if (idx == n_ * m_) {
      on_leaf_(vert_, horiz_);
      return;
    }
    const int i = idx / m_, j = idx % m_;
    const int t = vert_at(i, j) - horiz_at(i, j);
    for (int south : {1, -1}) {
      const int east = south - t;
      if (east != 1 && east != -1) continue;
      if (i == n_ - 1 && south != vert_at(n_, j)) continue;
      if (j == m_ - 1 && east != horiz_at(i, m_)) continue;
      if (i < n_ - 1) vert_[std::size_t(i + 1) * m_ + j] = (signed char)south;
      if (j < m_ - 1) horiz_[std::size_t(i) * (m_ + 1) + j + 1] = (signed char)east;
      dfs(idx + 1);
    }
  }

  int m_, n_;
  std::vector<signed char> vert_, horiz_;
  OnLeaf on_leaf_;
};

}  // namespace detail

/// All states with the given boundary, in deterministic row-major DFS order.
/// A parity-violating boundary yields no states (not an error).
inline std::vector<LatticeState> enumerate_states(const LatticeBoundary& b) {
  std::vector<LatticeState> out;
  if (!b.parity_ok()) return out;
  auto on_leaf = [&](const std::vector<signed char>& vert, const std::vector<signed char>& horiz) {
    LatticeState s;
    s.rows = b.rows();
    s.cols = b.cols();
    s.vert = vert;
    s.horiz = horiz;
    out.push_back(std::move(s));
  };
  detail::LatticeScan(b, on_leaf).run();
  return out;
}

/// Partition function Z(lambda; w; z) with fixed boundary: the state sum of
/// vertex weights r_entry(south,north,west,east; lambda - alpha_NW, w_j/z_i).
/// Zero when the boundary parity fails.
inline cplx partition_function(cplx lambda, const std::vector<cplx>& w, const std::vector<cplx>& z,
                               const LatticeBoundary& b, const EllipticParams& par,
                               double* scale_out = nullptr) {
  const int m = int(w.size()), n = int(z.size());
  if (b.cols() != m || b.rows() != n)
    throw domain_error("partition_function: boundary/spectral size mismatch");
  if (scale_out) *scale_out = 1.0;
  if (!b.parity_ok()) return cplx(0.0);
  if (m == 0 || n == 0) return cplx(1.0);

  // weight cache keyed by (vertex, edge pattern, NW face label)
  const int amax = m + n;
  const int arange = 2 * amax + 1;
  std::vector<cplx> cache(std::size_t(m) * n * 16 * arange);
  std::vector<unsigned char> seen(cache.size(), 0);

  cplx total(0.0);
  auto on_leaf = [&](const std::vector<signed char>& vert, const std::vector<signed char>& horiz) {
    cplx weight(1.0);
    int alpha_row = 0;
    for (int i = 0; i < n; ++i) {
      int alpha = alpha_row;
      for (int j = 0; j < m; ++j) {
        const int south = vert[std::size_t(i + 1) * m + j];
        const int north = vert[std::size_t(i) * m + j];
        const int west = horiz[std::size_t(i) * (m + 1) + j];
        const int east = horiz[std::size_t(i) * (m + 1) + j + 1];
        const int pattern = ((south > 0) << 3) | ((north > 0) << 2) | ((west > 0) << 1) | (east > 0);
        const std::size_t key =
            ((std::size_t(i) * m + j) * 16 + pattern) * arange + (alpha + amax);
        if (!seen[key]) {
          try {
            cache[key] = r_entry(south, north, west, east, lambda - double(alpha), w[j] / z[i], par);
          } catch (const singular_error&) {
            throw singular_error("partition_function: singular weight at vertex (" +
                                 std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
          }
          seen[key] = 1;
        }
        weight *= cache[key];
        alpha += north;
      }
      alpha_row += horiz[std::size_t(i) * (m + 1)];
    }
    if (scale_out) *scale_out = std::max(*scale_out, std::abs(weight));
    total += weight;
  };
  detail::LatticeScan(b, on_leaf).run();
  return ensure_finite(total, "partition_function");
}

/// Domain-wall partition function on an n x n lattice.
inline cplx domain_wall_pf(cplx lambda, const std::vector<cplx>& w, const std::vector<cplx>& z,
                           const EllipticParams& par) {
  if (w.size() != z.size()) throw domain_error("domain_wall_pf: need |w| == |z|");
  return partition_function(lambda, w, z, LatticeBoundary::domain_wall(int(w.size())), par);
}

/// Crossing-symmetry partner of Z: the right-hand side of the scalar crossing
/// identity, built from the reflected lattice with columns q^{-1} z reversed.
/// Z(lambda; w; z; b) equals this value when the identity holds.
inline cplx crossing_rhs(cplx lambda, const std::vector<cplx>& w, const std::vector<cplx>& z,
                         const LatticeBoundary& b, const EllipticParams& par) {
  const int m = int(w.size()), n = int(z.size());
  const int sc = sign_sum(b.left), sd = sign_sum(b.right), sb = sign_sum(b.top);
  cplx pref = ((sc - sd) / 2 % 2 == 0 ? 1.0 : -1.0) * par.q_pow(-0.5 * m * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      pref *= guarded_div(theta(z[i] / w[j], par), theta(z[i] / (par.q * w[j]), par),
                          "crossing_rhs");
  int pc = 0, pd = 0;
  for (int j = 0; j < n; ++j) {
    pc += b.left[j];
    pd += b.right[j];
    pref *= guarded_div(cap_f(lambda - double(pc), par),
                        cap_f(lambda - double(pd) - double(sb), par), "crossing_rhs F-ratio");
  }
  std::vector<cplx> cols(z.rbegin(), z.rend());
  for (cplx& x : cols) x /= par.q;
  LatticeBoundary flipped{negate_reverse(b.right), negate_reverse(b.left), b.bottom, b.top};
  return pref * partition_function(lambda - double(sc), cols, w, flipped, par);
}

}  // namespace ell

#endif  // ELL_LATTICE_HPP
