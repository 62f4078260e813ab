#pragma once
// Truncated Laurent series over exact coefficient rings (integers or
// rationals via GMP).  A series S knows its coefficients for exponents
// min_exp <= e < prec; reading below min_exp yields 0, reading at or
// beyond prec is an error.  Every operation computes the exact precision
// of its result from the precisions of its inputs, so a coefficient that
// can be read is always correct.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qv {

using Z = mpz_class;
using Q = mpq_class;

// p-adic order of a nonzero integer.
long padic_order(const Z& x, long p);

inline long floor_div(long a, long b) {
  long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}
inline long ceil_div(long a, long b) { return -floor_div(-a, b); }

namespace detail {
inline bool coeff_is_zero(const Z& v) { return sgn(v) == 0; }
inline bool coeff_is_zero(const Q& v) { return sgn(v) == 0; }
inline void addmul(Z& acc, const Z& a, const Z& b) {
  mpz_addmul(acc.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}
inline void addmul(Q& acc, const Q& a, const Q& b) { acc += a * b; }
inline void submul(Z& acc, const Z& a, const Z& b) {
  mpz_submul(acc.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}
inline void submul(Q& acc, const Q& a, const Q& b) { acc -= a * b; }
inline std::string coeff_str(const Z& v) { return v.get_str(); }
inline std::string coeff_str(const Q& v) { return v.get_str(); }
inline void coeff_parse(Z& out, const std::string& s) { out = Z(s); }
inline void coeff_parse(Q& out, const std::string& s) {
  out = Q(s);
  out.canonicalize();
}
}  // namespace detail

template <class C>
class Series {
 public:
  long min_exp = 0;  // lowest stored exponent
  long prec = 0;     // exponents < prec are known
  std::vector<C> c;  // c[i] is the coefficient of q^(min_exp + i)

  Series() = default;
  Series(long m, long p, std::vector<C> coeffs)
      : min_exp(m), prec(p), c(std::move(coeffs)) {
    if (prec < min_exp) throw std::invalid_argument("series: prec < min_exp");
    if ((long)c.size() != prec - min_exp)
      throw std::invalid_argument("series: coefficient count mismatch");
  }

  static Series zero(long prec, long min_exp = 0) {
    if (min_exp > prec) min_exp = prec;
    return Series(min_exp, prec, std::vector<C>(prec - min_exp));
  }
  static Series one(long prec) { return monomial(C(1), 0, prec); }
  static Series monomial(const C& v, long e, long prec) {
    if (e >= prec)
      throw std::invalid_argument("monomial exponent at or beyond precision");
    Series r = zero(prec, e);
    r.c[0] = v;
    return r;
  }

  long size() const { return (long)c.size(); }

  // Coefficient of q^e.  Zero below min_exp, error at or beyond prec.
  C get(long e) const {
    if (e >= prec)
      throw std::out_of_range("coefficient of q^" + std::to_string(e) +
                              " requested but series only known below q^" +
                              std::to_string(prec));
    if (e < min_exp) return C(0);
    return c[e - min_exp];
  }
  void set(long e, const C& v) {
    if (e < min_exp || e >= prec)
      throw std::out_of_range("set: exponent outside stored window");
    c[e - min_exp] = v;
  }

  bool is_zero() const {
    for (const auto& v : c)
      if (!detail::coeff_is_zero(v)) return false;
    return true;
  }

  // Drop leading zero coefficients (pure bookkeeping, same series).
  Series trimmed() const {
    long i = 0, n = size();
    while (i < n && detail::coeff_is_zero(c[i])) ++i;
    if (i == 0) return *this;
    return Series(min_exp + i, prec,
                  std::vector<C>(c.begin() + i, c.end()));
  }

  // Order of vanishing at q=0.  A series with no visible nonzero term
  // cannot certify its order.
  long ord_q() const {
    for (long i = 0; i < size(); ++i)
      if (!detail::coeff_is_zero(c[i])) return min_exp + i;
    throw std::domain_error("order undetermined at this precision");
  }

  Series cut(long new_prec) const {
    if (new_prec > prec)
      throw std::invalid_argument("cut cannot raise precision");
    if (new_prec <= min_exp) return zero(new_prec, new_prec);
    return Series(min_exp, new_prec,
                  std::vector<C>(c.begin(), c.begin() + (new_prec - min_exp)));
  }

  Series shift(long k) const {
    Series r = *this;
    r.min_exp += k;
    r.prec += k;
    return r;
  }

  Series neg() const {
    Series r = *this;
    for (auto& v : r.c) v = -v;
    return r;
  }

  Series scal(const C& s) const {
    Series r = *this;
    for (auto& v : r.c) v *= s;
    return r;
  }

  Series add(const Series& b) const {
    long p = std::min(prec, b.prec);
    long m = std::min(min_exp, b.min_exp);
    if (m > p) m = p;
    Series r = zero(p, m);
    for (long e = m; e < p; ++e) {
      C v(0);
      if (e >= min_exp && e < prec) v += c[e - min_exp];
      if (e >= b.min_exp && e < b.prec) v += b.c[e - b.min_exp];
      r.c[e - m] = v;
    }
    return r;
  }
  Series sub(const Series& b) const { return add(b.neg()); }

  Series mul(const Series& b) const {
    Series at = trimmed(), bt = b.trimmed();
    // Result precision from the trimmed orders: a term of a at its lowest
    // exponent multiplies the first unknown coefficient of b at
    // b.prec + at.min_exp, and symmetrically.
    long m = at.min_exp + bt.min_exp;
    long p = std::min(prec + bt.min_exp, b.prec + at.min_exp);
    if (at.size() == 0 || bt.size() == 0) return zero(p, std::min(m, p));
    if (m >= p) return zero(p, p);
    Series r = zero(p, m);
    long n = p - m;
    // iterate the sparser factor on the outside
    long anz = 0, bnz = 0;
    for (const auto& v : at.c)
      if (!detail::coeff_is_zero(v)) ++anz;
    for (const auto& v : bt.c)
      if (!detail::coeff_is_zero(v)) ++bnz;
    const Series& u = (anz <= bnz) ? at : bt;
    const Series& w = (anz <= bnz) ? bt : at;
    for (long i = 0; i < u.size(); ++i) {
      if (detail::coeff_is_zero(u.c[i])) continue;
      long base = u.min_exp + i + w.min_exp - m;
      if (base >= n) break;
      long hi = std::min<long>(w.size(), n - base);
      for (long j = 0; j < hi; ++j) {
        if (detail::coeff_is_zero(w.c[j])) continue;
        detail::addmul(r.c[base + j], u.c[i], w.c[j]);
      }
    }
    return r;
  }

  // Multiplicative inverse.  Over the integers the leading coefficient
  // must be a unit (+1 or -1); otherwise promote to rational coefficients
  // first.  Result precision: prec - 2*ord.
  Series invert() const {
    Series at = trimmed();
    long v;
    try {
      v = at.ord_q();
    } catch (const std::domain_error&) {
      throw std::domain_error("cannot invert: series has no visible nonzero term");
    }
    const C& u = at.c[0];
    if constexpr (std::is_same_v<C, Z>) {
      if (u != 1 && u != -1)
        throw std::domain_error(
            "cannot invert series over the integers: leading coefficient " +
            detail::coeff_str(u) +
            " is not a unit; promote to rational coefficients");
    }
    long rm = -v;
    long rp = prec - 2 * v;
    if (rp <= rm) return zero(rp, rp);
    Series r = zero(rp, rm);
    long len = rp - rm;
    std::vector<C> rc(len);
    C inv_u = unit_inverse(u);
    rc[0] = inv_u;
    for (long k = 1; k < len; ++k) {
      C s(0);
      long jmax = std::min<long>(k, at.size() - 1);
      for (long j = 1; j <= jmax; ++j) {
        if (detail::coeff_is_zero(at.c[j])) continue;
        detail::addmul(s, at.c[j], rc[k - j]);
      }
      rc[k] = -s * inv_u;
      if constexpr (std::is_same_v<C, Q>) rc[k].canonicalize();
    }
    r.c = std::move(rc);
    return r;
  }

  Series pow(long k) const {
    if (k < 0) return invert().pow(-k);
    if (k == 0) return one(prec - min_exp);
    // square-and-multiply; mul tracks the exact result precision
    Series result = *this;
    Series sq = *this;
    long e = k - 1;
    while (e > 0) {
      if (e & 1) result = result.mul(sq);
      e >>= 1;
      if (e > 0) sq = sq.mul(sq);
    }
    return result;
  }

  // q -> q^k substitution (k >= 1).
  Series subst_power(long k) const {
    if (k < 1) throw std::invalid_argument("subst_power requires k >= 1");
    Series r = zero(prec * k, min_exp * k);
    for (long i = 0; i < size(); ++i) r.c[i * k] = c[i];
    return r;
  }

  // Extract the arithmetic progression e = r (mod mod) and reindex by
  // n = (e - r)/mod.
  Series dissect(long mod, long r) const {
    if (mod < 1) throw std::invalid_argument("dissect requires mod >= 1");
    long m2 = ceil_div(min_exp - r, mod);
    long p2 = ceil_div(prec - r, mod);
    Series out = zero(p2, std::min(m2, p2));
    for (long n = m2; n < p2; ++n) {
      long e = r + mod * n;
      if (e >= min_exp && e < prec) out.c[n - m2] = c[e - min_exp];
    }
    return out;
  }

  // Atkin U_p: keep exponents divisible by p, divide them by p.
  Series u_p(long p) const { return dissect(p, 0); }

  // Compare up to min(prec, b.prec, upto).  Returns {true, bound} on
  // success, {false, first mismatching exponent} on failure.
  std::pair<bool, long> eq(const Series& b,
                           long upto = std::numeric_limits<long>::max()) const {
    long p = std::min({prec, b.prec, upto});
    long m = std::min(min_exp, b.min_exp);
    for (long e = m; e < p; ++e) {
      C va = (e >= min_exp && e < prec) ? c[e - min_exp] : C(0);
      C vb = (e >= b.min_exp && e < b.prec) ? b.c[e - b.min_exp] : C(0);
      if (va != vb) return {false, e};
    }
    return {true, p};
  }

  // Text form: "min_exp prec c_minexp ... c_{prec-1}".
  std::string serialize() const {
    std::ostringstream os;
    os << min_exp << ' ' << prec;
    for (const auto& v : c) os << ' ' << detail::coeff_str(v);
    return os.str();
  }
  static Series deserialize(const std::string& s) {
    std::istringstream is(s);
    long m, p;
    if (!(is >> m >> p)) throw std::invalid_argument("bad series text");
    Series r = zero(p, m);
    std::string tok;
    for (long i = 0; i < r.size(); ++i) {
      if (!(is >> tok)) throw std::invalid_argument("series text too short");
      detail::coeff_parse(r.c[i], tok);
    }
    if (is >> tok) throw std::invalid_argument("series text too long");
    return r;
  }

 private:
  static C unit_inverse(const C& u) {
    if constexpr (std::is_same_v<C, Z>) {
      return u;  // u is +1 or -1
    } else {
      return C(1) / u;
    }
  }
};

using ZSeries = Series<Z>;
using QSeries = Series<Q>;

QSeries to_rational(const ZSeries& a);
// Checks every coefficient is an integer.
ZSeries to_integer(const QSeries& a);

// ---- sparse helpers -------------------------------------------------------
// A sparse polynomial as sorted (exponent, small coefficient) pairs.
using SparsePoly = std::vector<std::pair<long, long>>;

// Euler product (q^d; q^d)_inf as pentagonal-number terms below prec.
SparsePoly pent_atom(long d, long prec);
// Jacobi cube: (q^d;q^d)_inf^3 = sum (-1)^k (2k+1) q^{d k(k+1)/2}.
SparsePoly jac_atom(long d, long prec);

template <class C>
Series<C> mul_sparse(const Series<C>& dense, const SparsePoly& t) {
  if (t.empty()) throw std::invalid_argument("mul_sparse: empty factor");
  long me = t.front().first;
  for (const auto& [e, v] : t) me = std::min(me, e);
  long m = dense.min_exp + me;
  long p = dense.prec + me;
  Series<C> r = Series<C>::zero(p, m);
  long n = p - m;
  for (const auto& [e, cv] : t) {
    long base = dense.min_exp + e - m;
    if (base >= n) continue;
    C cc((long)cv);
    long hi = std::min<long>(dense.size(), n - base);
    for (long j = 0; j < hi; ++j) {
      if (detail::coeff_is_zero(dense.c[j])) continue;
      detail::addmul(r.c[base + j], cc, dense.c[j]);
    }
  }
  return r;
}

// Exact division by a sparse polynomial whose lowest term is +-q^e.
template <class C>
Series<C> div_sparse(const Series<C>& dense, SparsePoly t) {
  if (t.empty()) throw std::invalid_argument("div_sparse: empty divisor");
  std::sort(t.begin(), t.end());
  long e0 = t[0].first;
  long c0 = t[0].second;
  if (c0 != 1 && c0 != -1)
    throw std::domain_error("div_sparse: lowest divisor term must be a unit");
  long m = dense.min_exp - e0;
  long p = dense.prec - e0;
  Series<C> r = Series<C>::zero(p, std::min(m, p));
  long n = p - m;
  for (long i = 0; i < n; ++i) {
    C acc(0);
    long de = m + e0 + i;
    if (de >= dense.min_exp && de < dense.prec)
      acc = dense.c[de - dense.min_exp];
    for (size_t ti = 1; ti < t.size(); ++ti) {
      long j = i - (t[ti].first - e0);
      if (j < 0) break;
      C cc(t[ti].second);
      detail::submul(acc, cc, r.c[j]);
    }
    r.c[i] = (c0 == 1) ? acc : C(-acc);
  }
  return r;
}

// Multiply dense by (q^d;q^d)_inf^m, walking in steps of +-3 (Jacobi cubes)
// and +-1 (Euler products).  Far cheaper than dense powering.
template <class C>
Series<C> eta_pow(Series<C> r, long d, long m) {
  while (m >= 3) {
    r = mul_sparse(r, jac_atom(d, r.prec - r.min_exp));
    m -= 3;
  }
  while (m <= -3) {
    r = div_sparse(r, jac_atom(d, r.prec - r.min_exp));
    m += 3;
  }
  while (m >= 1) {
    r = mul_sparse(r, pent_atom(d, r.prec - r.min_exp));
    m -= 1;
  }
  while (m <= -1) {
    r = div_sparse(r, pent_atom(d, r.prec - r.min_exp));
    m += 1;
  }
  return r;
}

// q^qshift * prod_d (q^d;q^d)_inf^{m_d}, known below q^prec.
ZSeries jquot(const std::map<long, long>& quot, long prec, long qshift = 0);

}  // namespace qv
