#include "qv/specfun.hpp"

namespace qv {

const char* stream_name(StreamKind k) {
  switch (k) {
    case StreamKind::partitions: return "p";
    case StreamKind::a_f: return "af";
    case StreamKind::a_omega: return "aomega";
    case StreamKind::beta: return "beta";
  }
  return "?";
}

StreamKind stream_from_name(const std::string& name) {
  if (name == "p") return StreamKind::partitions;
  if (name == "af") return StreamKind::a_f;
  if (name == "aomega") return StreamKind::a_omega;
  if (name == "beta") return StreamKind::beta;
  throw std::invalid_argument("unknown stream '" + name +
                              "' (expected p, af, aomega, beta)");
}

CoeffStream gen_p(long prec) { return {StreamKind::partitions, jquot({{1, -1}}, prec)}; }

CoeffStream gen_af(long prec) {
  ZSeries f = ZSeries::one(prec);
  ZSeries D = ZSeries::one(prec);
  for (long n = 1; n * n < prec; ++n) {
    // D_n = 1 / ((1+q)(1+q^2)...(1+q^n))^2, built incrementally
    SparsePoly fac = {{0, 1}, {n, 1}};
    D = div_sparse(div_sparse(D, fac), fac);
    f = f.add(D.shift(n * n));
  }
  return {StreamKind::a_f, f};
}

CoeffStream gen_aomega(long prec) {
  ZSeries w = ZSeries::zero(prec, 0);
  ZSeries E = ZSeries::one(prec);
  for (long n = 0; 2 * n * n + 2 * n < prec; ++n) {
    // E_n = 1 / ((1-q)(1-q^3)...(1-q^{2n+1}))^2
    SparsePoly fac = {{0, 1}, {2 * n + 1, -1}};
    E = div_sparse(div_sparse(E, fac), fac);
    w = w.add(E.shift(2 * n * n + 2 * n));
  }
  return {StreamKind::a_omega, w};
}

CoeffStream gen_beta(long prec) { return {StreamKind::beta, jquot({{1, 3}, {2, -2}}, prec)}; }

static Z mod_inverse_times(long mult, long rhs, long p, long alpha) {
  Z mod(1);
  for (long i = 0; i < alpha; ++i) mod *= p;
  Z inv;
  if (!mpz_invert(inv.get_mpz_t(), Z(mult).get_mpz_t(), mod.get_mpz_t()))
    throw std::domain_error("index family: multiplier not invertible");
  Z r = (inv * rhs) % mod;
  if (sgn(r) < 0) r += mod;
  return r;
}

Z delta_rank(long p, long alpha) {
  if (alpha < 1) throw std::invalid_argument("delta needs alpha >= 1");
  return mod_inverse_times(24, 1, p, alpha);
}

Z delta_omega(long p, long alpha) {
  if (alpha < 1) throw std::invalid_argument("delta needs alpha >= 1");
  return mod_inverse_times(3, -2, p, alpha);
}

Z lambda_index(long alpha) {
  if (alpha < 0) throw std::invalid_argument("lambda needs alpha >= 0");
  Z pw(1);
  for (long i = 0; i < 2 * (alpha / 2); ++i) pw *= 7;
  Z num = Z(7) * (Z(1) - pw);
  Z r = num / 24;
  if (r * 24 != num) throw std::logic_error("lambda index not integral");
  return r;
}

std::vector<Z> partition_counts(long nmax) {
  std::vector<Z> p(nmax + 1);
  p[0] = 1;
  for (long d = 1; d <= nmax; ++d)
    for (long n = d; n <= nmax; ++n) p[n] += p[n - d];
  return p;
}

std::vector<Z> four_colour_counts(long nmax) {
  std::vector<Z> p(nmax + 1);
  p[0] = 1;
  for (long rep = 0; rep < 4; ++rep)
    for (long d = 1; d <= nmax; ++d)
      for (long n = d; n <= nmax; ++n) p[n] += p[n - d];
  return p;
}

// visit all partitions of n as ascending part lists a[0..len-1]
template <class F>
static void for_each_partition(long n, F&& visit) {
  if (n <= 0) return;
  std::vector<long> a(n + 1, 0);
  long k = 1;
  long y = n - 1;
  while (k != 0) {
    long x = a[k - 1] + 1;
    --k;
    while (2 * x <= y) {
      a[k] = x;
      y -= x;
      ++k;
    }
    long l = k + 1;
    while (x <= y) {
      a[k] = x;
      a[l] = y;
      visit(a, k + 2);
      ++x;
      --y;
    }
    a[k] = x + y;
    y = x + y - 1;
    visit(a, k + 1);
  }
}

Z rank_parity_enum(long n) {
  if (n == 0) return Z(1);
  Z acc(0);
  for_each_partition(n, [&](const std::vector<long>& a, long len) {
    long rank = a[len - 1] - len;  // largest part minus number of parts
    acc += (rank % 2 == 0) ? 1 : -1;
  });
  return acc;
}

Z crank_parity_enum(long n) {
  if (n == 0) return Z(1);
  Z acc(0);
  for_each_partition(n, [&](const std::vector<long>& a, long len) {
    long ones = 0;
    while (ones < len && a[ones] == 1) ++ones;
    long crank;
    if (ones == 0) {
      crank = a[len - 1];
    } else {
      long big = 0;
      for (long i = len - 1; i >= 0 && a[i] > ones; --i) ++big;
      crank = big - ones;
    }
    acc += (crank % 2 == 0) ? 1 : -1;
  });
  return acc;
}

}  // namespace qv
