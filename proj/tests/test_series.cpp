#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qv/series.hpp"
#include "qv_properties.hpp"

using namespace qv;

static ZSeries from_list(long m, std::vector<long> v, long prec) {
  ZSeries r = ZSeries::zero(prec, m);
  for (size_t i = 0; i < v.size(); ++i) r.c[i] = Z(v[i]);
  return r;
}

TEST_CASE("geometric series") {
  ZSeries d = from_list(0, {1, -1}, 10);  // 1 - q
  ZSeries g = d.invert();
  CHECK(g.min_exp == 0);
  CHECK(g.prec == 10);
  for (long e = 0; e < 10; ++e) CHECK(g.get(e) == 1);
}

TEST_CASE("partition numbers via inversion and via eta quotient") {
  // 1/(q;q)_inf
  ZSeries euler = ZSeries::zero(12, 0);
  for (auto [e, c] : pent_atom(1, 12)) euler.c[e] = Z(c);
  ZSeries p = euler.invert();
  std::vector<long> expect = {1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42};
  for (size_t n = 0; n < expect.size(); ++n) CHECK(p.get(n) == expect[n]);
  ZSeries p2 = jquot({{1, -1}}, 12);
  CHECK(p.eq(p2).first);
  CHECK(p2.get(10) == 42);
}

TEST_CASE("four colour partitions") {
  ZSeries f = jquot({{1, -4}}, 4);
  CHECK(f.get(0) == 1);
  CHECK(f.get(1) == 4);
  CHECK(f.get(2) == 14);
  CHECK(f.get(3) == 40);
}

TEST_CASE("binomial powers") {
  ZSeries b = from_list(0, {1, 1}, 6);  // 1 + q
  ZSeries b5 = b.pow(5);
  std::vector<long> expect = {1, 5, 10, 10, 5, 1};
  for (long k = 0; k < (long)expect.size() && k < b5.prec; ++k)
    CHECK(b5.get(k) == expect[k]);
  CHECK(b.pow(0).eq(ZSeries::one(6)).first);
}

TEST_CASE("pow with negative exponent") {
  ZSeries b = from_list(0, {1, 1}, 8);
  ZSeries bm2 = b.pow(-2);
  // 1/(1+q)^2 = 1 - 2q + 3q^2 - 4q^3 + ...
  for (long k = 0; k < bm2.prec; ++k) {
    long expect = (k % 2 == 0) ? (k + 1) : -(k + 1);
    CHECK(bm2.get(k) == expect);
  }
}

TEST_CASE("substitute q -> q^3") {
  ZSeries b = from_list(0, {1, 1}, 2);
  ZSeries s = b.subst_power(3);
  CHECK(s.prec == 6);
  CHECK(s.get(0) == 1);
  CHECK(s.get(3) == 1);
  CHECK(s.get(1) == 0);
  CHECK(s.get(5) == 0);
}

TEST_CASE("dissection and U_p") {
  ZSeries f = ZSeries::zero(10, 0);
  for (long e = 0; e < 10; ++e) f.c[e] = Z(e);
  ZSeries d = f.dissect(5, 2);
  CHECK(d.min_exp == 0);
  CHECK(d.prec == 2);
  CHECK(d.get(0) == 2);
  CHECK(d.get(1) == 7);

  // negative exponents
  ZSeries g = ZSeries::zero(15, -3);
  g.set(-3, Z(9));
  g.set(14, Z(1));
  ZSeries u = g.u_p(7);
  CHECK(u.min_exp == 0);
  CHECK(u.prec == 3);
  CHECK(u.get(0) == 0);
  CHECK(u.get(1) == 0);
  CHECK(u.get(2) == 1);
}

TEST_CASE("mul precision follows the trimmed orders") {
  ZSeries a = from_list(2, {1, 1, 1, 1, 1, 1, 1, 1}, 10);  // q^2 * (...), prec 10
  ZSeries b = from_list(0, {1, 1, 1}, 3);
  ZSeries r = a.mul(b);
  CHECK(r.prec == 5);  // min(10 + 0, 3 + 2)
  CHECK(r.min_exp == 2);

  // a stored leading zero must not hurt the precision
  ZSeries az = from_list(0, {0, 1}, 2);  // q, stored from exponent 0
  ZSeries bz = from_list(0, {1, 1, 1}, 3);
  ZSeries rz = az.mul(bz);
  CHECK(rz.prec == 2);  // min(2 + 0, 3 + 1) with trimmed min_exp 1
  CHECK(rz.min_exp == 1);
  CHECK(rz.get(1) == 1);
}

TEST_CASE("coefficient access beyond precision is an error") {
  ZSeries a = from_list(0, {1, 2}, 2);
  CHECK(a.get(-5) == 0);
  CHECK_THROWS_AS((void)a.get(2), std::out_of_range);
}

TEST_CASE("integer inversion requires a unit leading coefficient") {
  ZSeries a = from_list(0, {2, 1}, 5);
  CHECK_THROWS_WITH_AS(
      (void)a.invert(),
      doctest::Contains("promote to rational coefficients"),
      std::domain_error);
  QSeries aq = to_rational(a);
  QSeries inv = aq.invert();
  CHECK(inv.get(0) == Q(1, 2));
  CHECK(aq.mul(inv).eq(QSeries::one(5)).first);
}

TEST_CASE("order of vanishing") {
  ZSeries a = from_list(3, {0, 0, 5, 1}, 7);
  CHECK(a.ord_q() == 5);
  ZSeries z = ZSeries::zero(4, 0);
  CHECK_THROWS_WITH_AS((void)z.ord_q(),
                       doctest::Contains("order undetermined"),
                       std::domain_error);
}

TEST_CASE("eq reports the first mismatch") {
  ZSeries a = from_list(0, {1, 2, 3, 4, 5}, 5);
  ZSeries b = from_list(0, {1, 2, 3, 9, 5}, 5);
  auto w = a.eq(b);
  CHECK_FALSE(w.first);
  CHECK(w.second == 3);
  auto w2 = a.eq(b, 3);
  CHECK(w2.first);
  CHECK(w2.second == 3);
}

TEST_CASE("serialization round trip") {
  ZSeries a = from_list(-2, {3, 0, -5}, 1);
  CHECK(a.serialize() == "-2 1 3 0 -5");
  ZSeries back = ZSeries::deserialize(a.serialize());
  CHECK(back.eq(a).first);
  CHECK(back.min_exp == a.min_exp);
  CHECK(back.prec == a.prec);

  QSeries q = QSeries::zero(2, 0);
  q.c[0] = Q(1, 3);
  q.c[1] = Q(-7, 2);
  QSeries qb = QSeries::deserialize(q.serialize());
  CHECK(qb.get(0) == Q(1, 3));
  CHECK(qb.get(1) == Q(-7, 2));
  CHECK_THROWS_AS((void)ZSeries::deserialize("0 3 1 2"), std::invalid_argument);
}

TEST_CASE("shift and cut") {
  ZSeries a = from_list(0, {1, 2, 3}, 3);
  ZSeries s = a.shift(-4);
  CHECK(s.min_exp == -4);
  CHECK(s.get(-3) == 2);
  ZSeries c = s.cut(-2);
  CHECK(c.prec == -2);
  CHECK(c.get(-4) == 1);
  CHECK_THROWS_AS((void)c.cut(5), std::invalid_argument);
}

TEST_CASE("rational promotion and integer check") {
  ZSeries a = from_list(0, {1, -3}, 2);
  QSeries q = to_rational(a);
  ZSeries back = to_integer(q);
  CHECK(back.eq(a).first);
  q.c[1] = Q(1, 2);
  CHECK_THROWS_AS((void)to_integer(q), std::domain_error);
}

TEST_CASE("sparse atoms match dense powering") {
  long P = 60;
  ZSeries euler = ZSeries::zero(P, 0);
  for (auto [e, c] : pent_atom(1, P)) euler.c[e] = Z(c);
  ZSeries cube = euler.mul(euler).mul(euler);
  ZSeries jac = ZSeries::zero(P, 0);
  for (auto [e, c] : jac_atom(1, P)) jac.c[e] = Z(c);
  CHECK(cube.eq(jac).first);

  // eta_pow walks the exponent in Jacobi and Euler steps
  ZSeries via_eta = eta_pow(ZSeries::one(P), 1, 3);
  CHECK(via_eta.eq(jac).first);
  ZSeries down = eta_pow(via_eta, 1, -3);
  CHECK(down.eq(ZSeries::one(P)).first);
}

TEST_CASE("div_sparse undoes mul_sparse") {
  ZSeries f = jquot({{1, -2}, {3, 1}}, 40);
  SparsePoly t = pent_atom(2, 60);
  ZSeries prod = mul_sparse(f, t);
  ZSeries back = div_sparse(prod, t);
  CHECK(back.eq(f, 40).first);

  SparsePoly bad = {{0, 2}, {1, 1}};
  CHECK_THROWS_AS((void)div_sparse(f, bad), std::domain_error);
}

TEST_CASE("jquot applies the shift and respects precision") {
  ZSeries t = jquot({{7, 4}, {1, -4}}, 30, 1);
  CHECK(t.ord_q() == 1);
  CHECK(t.get(1) == 1);
  CHECK(t.prec == 30);
  ZSeries ti = jquot({{1, 4}, {7, -4}}, 30, -1);
  ZSeries prod = t.mul(ti);
  CHECK(prod.eq(ZSeries::one(prod.prec)).first);
}

TEST_CASE("padic order") {
  CHECK(padic_order(Z(49), 7) == 2);
  CHECK(padic_order(Z(-686), 7) == 3);
  CHECK(padic_order(Z(10), 7) == 0);
  CHECK_THROWS_AS((void)padic_order(Z(0), 7), std::domain_error);
}

TEST_CASE("property suites (reduced counts)") {
  CHECK(qvprop::suite_ring_axioms(60) == 60);
  CHECK(qvprop::suite_u_p(40) == 40);
  CHECK(qvprop::suite_dissect_roundtrip(60) == 60);
  CHECK(qvprop::suite_inverse(40) == 40);
  CHECK(qvprop::suite_precision_soundness(20) == 20);
}
