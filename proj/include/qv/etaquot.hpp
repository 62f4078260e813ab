#pragma once
// Eta quotients on Gamma_0(N): q-expansion, Newman modularity conditions,
// cusp enumeration, Ligozat orders, and sturm-style valence certificates
// that promote finite coefficient checks to identities.

#include <string>
#include <vector>

#include "qv/series.hpp"

namespace qv {

struct EtaQuotient {
  long level = 1;
  std::map<long, long> expo;  // d -> exponent of (q^d; q^d)_inf, d | level

  EtaQuotient() = default;
  EtaQuotient(long N, std::map<long, long> e);

  // sum d*m_d / 24, the q-exponent the product part gets multiplied by
  Q offset() const;
  long weight_twice() const;  // 2k = sum m_d
  EtaQuotient mul(const EtaQuotient& other) const;
  EtaQuotient pow(long k) const;

  std::string format() const;  // "49; 7^4 * 1^-4"
  static EtaQuotient parse(const std::string& text);
};

// Cusp a/c of Gamma_0(N) in lowest terms; the cusp at infinity is stored
// as 1/N (they are equivalent on Gamma_0(N)).
struct Cusp {
  long a = 0;
  long c = 1;
  long level = 1;

  static Cusp make(long a, long c, long N);
  static Cusp infinity(long N) { return make(1, N, N); }
  bool is_infinity() const { return c == level; }
  long width() const;  // N / gcd(c^2, N)
  std::string str() const;
};

long gamma0_index(long N);
// Chua-Lang representatives, one per cusp class, smallest admissible
// numerator; denominator 1 gives the cusp 0, denominator N gives infinity.
std::vector<Cusp> cusp_set(long N);

struct NewmanReport {
  bool sum_zero = false;     // sum m_d = 0 (weight zero)
  bool sum_d = false;        // sum d*m_d = 0 mod 24
  bool sum_nd = false;       // sum (N/d)*m_d = 0 mod 24
  bool square = false;       // prod d^{m_d} is a rational square
  long weight_twice = 0;
  long sum_d_value = 0;
  long sum_nd_value = 0;
  bool pass() const { return sum_zero && sum_d && sum_nd && square; }
};
NewmanReport newman_check(const EtaQuotient& f);

// Ligozat order at a cusp, in the local variable (rational in general).
Q cusp_order(const EtaQuotient& f, const Cusp& cusp);
// order times the cusp width; these sum to zero over all cusps for a
// weight-zero quotient.
Q cusp_ORD(const EtaQuotient& f, const Cusp& cusp);

// q-expansion below q^prec.  Errors when the exponent offset is fractional.
ZSeries expand(const EtaQuotient& f, long prec);

struct ValenceCertificate {
  long level = 0;
  long margin = 0;
  long term_count = 0;
  long weight_twice = 0;
  long index = 0;  // [SL2(Z) : Gamma_0(level)]
  struct Row {
    std::string cusp;
    long width = 0;
    Q min_ord;  // min over terms of ORD at this cusp
  };
  std::vector<Row> rows;  // cusps other than infinity
  Q bound_B;              // sum of the row minima
  long required_vanishing = 0;
  long achieved_vanishing = 0;
  bool found_nonzero = false;
  long first_nonzero = 0;
  bool pass = false;

  std::string to_json() const;
  std::string summary() const;
};

// Certify that sum_i coeff_i * quotient_i vanishes identically: bound the
// possible pole order over the finite cusps, then check enough q-expansion
// coefficients are zero to exceed the bound by `margin`.  All terms must
// share one weight; eta quotients have no interior zeros or poles, so a
// nonzero combination has order at infinity at most
// (weight_twice/24)*index - B.
ValenceCertificate prove_identity(
    const std::vector<std::pair<Z, EtaQuotient>>& terms, long N,
    long margin = 8);

}  // namespace qv
