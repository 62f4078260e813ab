#pragma once
// Randomized property suites shared by the unit tests and the acceptance
// runner.  Each suite returns the number of cases it ran; a failure throws.

#include <random>
#include <stdexcept>
#include <string>

#include "qv/etaquot.hpp"
#include "qv/series.hpp"

namespace qvprop {

using namespace qv;

inline ZSeries random_series(std::mt19937_64& rng, long prec, long lead_lo = -6,
                             long lead_hi = 6, long coeff_abs = 9) {
  std::uniform_int_distribution<long> dm(lead_lo, lead_hi);
  std::uniform_int_distribution<long> dc(-coeff_abs, coeff_abs);
  long m = dm(rng);
  ZSeries r = ZSeries::zero(prec, m);
  for (long i = 0; i < r.size(); ++i) r.c[i] = Z(dc(rng));
  return r;
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error("property failed: " + what);
}

// associativity, commutativity, distributivity of the exact ring ops
inline int suite_ring_axioms(int cases, unsigned seed = 0xA5A5) {
  std::mt19937_64 rng(seed);
  const long P = 60;
  for (int it = 0; it < cases; ++it) {
    ZSeries a = random_series(rng, P), b = random_series(rng, P),
            c = random_series(rng, P);
    require(a.add(b).eq(b.add(a)).first, "add commutes");
    require(a.add(b).add(c).eq(a.add(b.add(c))).first, "add associates");
    require(a.mul(b).eq(b.mul(a)).first, "mul commutes");
    require(a.mul(b).mul(c).eq(a.mul(b.mul(c))).first, "mul associates");
    require(a.mul(b.add(c)).eq(a.mul(b).add(a.mul(c))).first, "distributes");
    require(a.sub(a).is_zero(), "a - a = 0");
    auto w = a.mul(b).mul(c).eq(a.mul(b.mul(c)));
    require(w.second > -30, "nonempty comparison window");
  }
  return cases;
}

// U_p extracts exactly the coefficients at multiples of p
inline int suite_u_p(int cases, unsigned seed = 0xBEEF) {
  std::mt19937_64 rng(seed);
  const long P = 90;
  const long primes[2] = {5, 7};
  for (int it = 0; it < cases; ++it) {
    long p = primes[it % 2];
    ZSeries a = random_series(rng, P, -10, 3);
    ZSeries u = a.u_p(p);
    for (long n = u.min_exp; n < u.prec; ++n) {
      long e = p * n;
      Z expect = (e >= a.min_exp && e < a.prec) ? a.get(e) : Z(0);
      require(u.get(n) == expect, "u_p coefficient match");
    }
    require(u.prec == ceil_div(a.prec, p), "u_p precision");
  }
  return cases;
}

// the m dissection slices reassemble to the original series
inline int suite_dissect_roundtrip(int cases, unsigned seed = 0xD15) {
  std::mt19937_64 rng(seed);
  const long P = 70;
  const long mods[3] = {2, 5, 7};
  for (int it = 0; it < cases; ++it) {
    long m = mods[it % 3];
    ZSeries a = random_series(rng, P, -8, 4);
    ZSeries acc = ZSeries::zero(a.prec, a.min_exp);
    long pmin = a.prec;
    for (long r = 0; r < m; ++r) {
      ZSeries part = a.dissect(m, r).subst_power(m).shift(r);
      pmin = std::min(pmin, part.prec);
      acc = acc.add(part);
    }
    auto w = acc.eq(a, pmin);
    require(w.first, "dissection slices reassemble");
    require(pmin >= a.prec, "reassembly covers the full window");
  }
  return cases;
}

// f * invert(f) = 1 over both coefficient rings
inline int suite_inverse(int cases, unsigned seed = 0x1271) {
  std::mt19937_64 rng(seed);
  const long P = 50;
  for (int it = 0; it < cases; ++it) {
    ZSeries a = random_series(rng, P, -5, 5);
    // force a unit leading coefficient
    if (a.size() == 0) continue;
    a.c[0] = (it % 2) ? Z(1) : Z(-1);
    ZSeries inv = a.invert();
    ZSeries prod = a.mul(inv);
    auto w = prod.eq(ZSeries::one(prod.prec));
    require(w.first, "integer series inverse");
    // rational: random nonzero lead
    QSeries b = to_rational(random_series(rng, P, -3, 3));
    b.c[0] = Q(2 + (it % 5), 3);
    b.c[0].canonicalize();
    QSeries prod2 = b.mul(b.invert());
    require(prod2.eq(QSeries::one(prod2.prec)).first, "rational series inverse");
  }
  return cases;
}

// computing at low precision agrees with computing high and cutting
inline int suite_precision_soundness(int cases, unsigned seed = 0x50F7) {
  std::mt19937_64 rng(seed);
  for (int it = 0; it < cases; ++it) {
    ZSeries ahi = random_series(rng, 80, -5, 5);
    ZSeries bhi = random_series(rng, 80, -5, 5);
    ZSeries alo = ahi.cut(40), blo = bhi.cut(40);
    ZSeries lo = alo.mul(blo);
    ZSeries hi = ahi.mul(bhi);
    require(hi.cut(lo.prec).eq(lo).first, "mul precision sound");
    ZSeries slo = alo.add(blo), shi = ahi.add(bhi);
    require(shi.cut(slo.prec).eq(slo).first, "add precision sound");
    alo.c[0] = Z(1);
    ahi.c[0] = Z(1);
    require(ahi.invert().cut(alo.invert().prec).eq(alo.invert()).first,
            "invert precision sound");
  }
  return cases;
}

// the cusp orders of a weight-zero eta quotient sum to zero, and the
// divisor degree of eta(d tau)^24 is the index, independent of d
inline int suite_valence_zero_sum(int cases, unsigned seed = 0xE7A) {
  std::mt19937_64 rng(seed);
  const long levels[5] = {6, 14, 20, 49, 98};
  for (int it = 0; it < cases; ++it) {
    long N = levels[it % 5];
    std::vector<long> divs;
    for (long d = 1; d <= N; ++d)
      if (N % d == 0) divs.push_back(d);
    std::uniform_int_distribution<long> dm(-3, 3);
    std::map<long, long> e;
    long sum = 0;
    for (long d : divs) {
      long m = dm(rng);
      e[d] = m;
      sum += m;
    }
    e[divs[it % divs.size()]] -= sum;  // force weight zero
    EtaQuotient f(N, e);
    Q total(0);
    for (const Cusp& z : cusp_set(N)) total += cusp_ORD(f, z);
    total.canonicalize();
    require(total == 0, "weight-zero ORD sum vanishes");

    long d24 = divs[(it + 1) % divs.size()];
    EtaQuotient g(N, {{d24, 24}});
    Q tg(0);
    for (const Cusp& z : cusp_set(N)) tg += cusp_ORD(g, z);
    tg.canonicalize();
    require(tg == gamma0_index(N), "eta(d tau)^24 divisor degree is the index");
  }
  return cases;
}

}  // namespace qvprop
