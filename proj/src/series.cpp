#include "qv/series.hpp"

namespace qv {

long padic_order(const Z& x, long p) {
  if (sgn(x) == 0) throw std::domain_error("padic_order of zero");
  Z rem;
  Z pz(p);
  return (long)mpz_remove(rem.get_mpz_t(), x.get_mpz_t(), pz.get_mpz_t());
}

QSeries to_rational(const ZSeries& a) {
  QSeries r = QSeries::zero(a.prec, a.min_exp);
  for (long i = 0; i < a.size(); ++i) r.c[i] = Q(a.c[i]);
  return r;
}

ZSeries to_integer(const QSeries& a) {
  ZSeries r = ZSeries::zero(a.prec, a.min_exp);
  for (long i = 0; i < a.size(); ++i) {
    if (a.c[i].get_den() != 1)
      throw std::domain_error("non-integer coefficient at q^" +
                              std::to_string(a.min_exp + i));
    r.c[i] = a.c[i].get_num();
  }
  return r;
}

SparsePoly pent_atom(long d, long prec) {
  SparsePoly out;
  if (0 < prec) out.push_back({0, 1});
  for (long k = 1;; ++k) {
    long e1 = d * k * (3 * k - 1) / 2;
    long e2 = d * k * (3 * k + 1) / 2;
    long s = (k % 2 == 0) ? 1 : -1;
    bool any = false;
    if (e1 < prec) {
      out.push_back({e1, s});
      any = true;
    }
    if (e2 < prec) {
      out.push_back({e2, s});
      any = true;
    }
    if (!any) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

SparsePoly jac_atom(long d, long prec) {
  SparsePoly out;
  for (long k = 0;; ++k) {
    long e = d * k * (k + 1) / 2;
    if (e >= prec) break;
    long c = 2 * k + 1;
    out.push_back({e, (k % 2 == 0) ? c : -c});
  }
  return out;
}

ZSeries jquot(const std::map<long, long>& quot, long prec, long qshift) {
  long work = prec + std::max(0L, -qshift) + 64;
  ZSeries r = ZSeries::one(work);
  std::vector<std::pair<long, long>> items(quot.begin(), quot.end());
  // positive exponents first keeps intermediate series integral
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [d, m] : items) {
    if (m == 0) continue;
    r = eta_pow(std::move(r), d, m);
  }
  return r.shift(qshift).cut(prec);
}

}  // namespace qv
