#pragma once
// The coefficient streams under study (partition counts, the two
// third-order Eulerian series, the weighted parity stream beta), the
// published index families attached to them, and small combinatorial
// oracles that recompute the same numbers by brute force.

#include "qv/series.hpp"

namespace qv {

enum class StreamKind { partitions, a_f, a_omega, beta };

const char* stream_name(StreamKind k);
StreamKind stream_from_name(const std::string& name);

struct CoeffStream {
  StreamKind kind = StreamKind::partitions;
  ZSeries s;

  long prec() const { return s.prec; }
  // coefficient at n; negative indices read as zero
  Z coeff(long n) const {
    if (n < s.min_exp) return Z(0);
    return s.get(n);
  }
  // coeff(n/m), zero when m does not divide n
  Z coeff_div(long n, long m) const {
    if (n % m != 0) return Z(0);
    return coeff(n / m);
  }
};

CoeffStream gen_p(long prec);       // 1/(q;q)_inf
CoeffStream gen_af(long prec);      // sum q^{n^2} / (-q;q)_n^2
CoeffStream gen_aomega(long prec);  // sum q^{2n^2+2n} / (q;q^2)_{n+1}^2
CoeffStream gen_beta(long prec);    // (q;q)^3 / (q^2;q^2)^2

// smallest nonnegative solution of 24*delta = 1 mod p^alpha
Z delta_rank(long p, long alpha);
// smallest nonnegative solution of 3*delta = -2 mod p^alpha
Z delta_omega(long p, long alpha);
// lambda_alpha = 7*(1 - 7^(2*floor(alpha/2)))/24
Z lambda_index(long alpha);

// ---- enumeration oracles ---------------------------------------------------
std::vector<Z> partition_counts(long nmax);    // p(0..nmax) by recurrence
std::vector<Z> four_colour_counts(long nmax);  // coefficients of 1/(q;q)^4

// sum over partitions of n of (-1)^(largest - length)
Z rank_parity_enum(long n);
// sum over partitions of n of (-1)^crank (Andrews-Garvan crank)
Z crank_parity_enum(long n);

}  // namespace qv
