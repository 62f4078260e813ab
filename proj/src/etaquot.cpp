#include "qv/etaquot.hpp"

#include <numeric>
#include <sstream>

#include "json.hpp"

namespace qv {

static long gcd_l(long a, long b) { return std::gcd(std::abs(a), std::abs(b)); }

EtaQuotient::EtaQuotient(long N, std::map<long, long> e)
    : level(N), expo(std::move(e)) {
  if (N < 1) throw std::invalid_argument("eta quotient: level must be >= 1");
  for (auto it = expo.begin(); it != expo.end();) {
    if (it->second == 0) {
      it = expo.erase(it);
      continue;
    }
    if (it->first < 1 || level % it->first != 0)
      throw std::invalid_argument("eta quotient: scale " +
                                  std::to_string(it->first) +
                                  " does not divide level " +
                                  std::to_string(level));
    ++it;
  }
}

Q EtaQuotient::offset() const {
  Z num(0);
  for (const auto& [d, m] : expo) num += Z(d) * Z(m);
  Q r(num, 24);
  r.canonicalize();
  return r;
}

long EtaQuotient::weight_twice() const {
  long s = 0;
  for (const auto& [d, m] : expo) s += m;
  return s;
}

EtaQuotient EtaQuotient::mul(const EtaQuotient& other) const {
  long N = std::lcm(level, other.level);
  std::map<long, long> e = expo;
  for (const auto& [d, m] : other.expo) e[d] += m;
  return EtaQuotient(N, std::move(e));
}

EtaQuotient EtaQuotient::pow(long k) const {
  std::map<long, long> e;
  for (const auto& [d, m] : expo) e[d] = m * k;
  return EtaQuotient(level, std::move(e));
}

std::string EtaQuotient::format() const {
  std::ostringstream os;
  os << level << ';';
  bool first = true;
  for (auto it = expo.rbegin(); it != expo.rend(); ++it) {
    os << (first ? " " : " * ") << it->first << '^' << it->second;
    first = false;
  }
  if (first) os << " 1^0";
  return os.str();
}

EtaQuotient EtaQuotient::parse(const std::string& text) {
  auto semi = text.find(';');
  if (semi == std::string::npos)
    throw std::invalid_argument("eta quotient text needs 'level; terms'");
  long N = std::stol(text.substr(0, semi));
  std::map<long, long> e;
  std::string rest = text.substr(semi + 1);
  std::string term;
  std::istringstream is(rest);
  while (std::getline(is, term, '*')) {
    auto caret = term.find('^');
    if (caret == std::string::npos) {
      // bare scale means exponent 1; skip pure whitespace
      std::istringstream ts(term);
      long d;
      if (ts >> d) e[d] += 1;
      continue;
    }
    long d = std::stol(term.substr(0, caret));
    long m = std::stol(term.substr(caret + 1));
    e[d] += m;
  }
  return EtaQuotient(N, std::move(e));
}

Cusp Cusp::make(long a, long c, long N) {
  if (N < 1) throw std::invalid_argument("cusp: level must be >= 1");
  if (c < 1 || N % c != 0)
    throw std::invalid_argument("cusp: denominator must divide the level");
  long g = gcd_l(a, c);
  if (g > 1) {
    a /= g;
    c /= g;
  }
  Cusp r;
  r.a = a;
  r.c = c;
  r.level = N;
  return r;
}

long Cusp::width() const { return level / gcd_l(c * c, level); }

std::string Cusp::str() const {
  if (is_infinity()) return "inf";
  if (c == 1) return std::to_string(a);
  return std::to_string(a) + "/" + std::to_string(c);
}

long gamma0_index(long N) {
  long idx = N;
  long n = N;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    idx = idx / p * (p + 1);
    while (n % p == 0) n /= p;
  }
  if (n > 1) idx = idx / n * (n + 1);
  return idx;
}

static long euler_phi(long n) {
  long r = n, m = n;
  for (long p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    r -= r / p;
    while (m % p == 0) m /= p;
  }
  if (m > 1) r -= r / m;
  return r;
}

std::vector<Cusp> cusp_set(long N) {
  std::vector<Cusp> out;
  for (long d = 1; d <= N; ++d) {
    if (N % d) continue;
    long e = gcd_l(d, N / d);
    long want = euler_phi(e);
    if (d == 1) {
      out.push_back(Cusp::make(0, 1, N));
      continue;
    }
    std::vector<long> seen;
    for (long x = 1; (long)seen.size() < want; ++x) {
      if (gcd_l(x, d) != 1) continue;
      bool dup = false;
      for (long s : seen)
        if ((x - s) % e == 0) dup = true;
      if (dup) continue;
      seen.push_back(x);
      out.push_back(Cusp::make(x, d, N));
    }
  }
  return out;
}

NewmanReport newman_check(const EtaQuotient& f) {
  NewmanReport r;
  long N = f.level;
  long sd = 0, snd = 0, sm = 0;
  std::map<long, long> prime_par;
  for (const auto& [d, m] : f.expo) {
    sm += m;
    sd += d * m;
    snd += (N / d) * m;
    long dd = d;
    for (long p = 2; p * p <= dd; ++p) {
      while (dd % p == 0) {
        prime_par[p] += m;
        dd /= p;
      }
    }
    if (dd > 1) prime_par[dd] += m;
  }
  r.weight_twice = sm;
  r.sum_d_value = sd;
  r.sum_nd_value = snd;
  r.sum_zero = (sm == 0);
  r.sum_d = (sd % 24 == 0);
  r.sum_nd = (snd % 24 == 0);
  r.square = true;
  for (const auto& [p, par] : prime_par)
    if (par % 2 != 0) r.square = false;
  return r;
}

Q cusp_order(const EtaQuotient& f, const Cusp& cusp) {
  Q total(0);
  long c = cusp.c;
  for (const auto& [d, m] : f.expo) {
    long g = gcd_l(d, c);
    Q term(Z(g) * Z(g) * Z(m), Z(24) * Z(d));
    term.canonicalize();
    total += term;
  }
  total.canonicalize();
  return total;
}

Q cusp_ORD(const EtaQuotient& f, const Cusp& cusp) {
  Q r = cusp_order(f, cusp) * Q(cusp.width());
  r.canonicalize();
  return r;
}

ZSeries expand(const EtaQuotient& f, long prec) {
  Q off = f.offset();
  if (off.get_den() != 1)
    throw std::domain_error(
        "eta quotient has fractional q-exponent offset " + off.get_str() +
        "; no single-valued q-expansion");
  long shift = (long)off.get_num().get_si();
  return jquot(f.expo, prec, shift);
}

static std::string q_str(const Q& v) { return v.get_str(); }

std::string ValenceCertificate::to_json() const {
  nlohmann::ordered_json j;
  j["level"] = level;
  j["index"] = index;
  j["weight_twice"] = weight_twice;
  j["margin"] = margin;
  j["terms"] = term_count;
  j["cusps"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json r;
    r["cusp"] = row.cusp;
    r["width"] = row.width;
    r["min_ORD"] = q_str(row.min_ord);
    j["cusps"].push_back(r);
  }
  j["B"] = q_str(bound_B);
  j["required_vanishing"] = required_vanishing;
  j["achieved_vanishing"] = achieved_vanishing;
  if (found_nonzero) j["first_nonzero"] = first_nonzero;
  j["verdict"] = pass ? "pass" : "fail";
  return j.dump(2);
}

std::string ValenceCertificate::summary() const {
  std::ostringstream os;
  os << "level " << level << ", B = " << q_str(bound_B)
     << ", need vanishing >= " << required_vanishing << ", verified to "
     << achieved_vanishing << ": " << (pass ? "pass" : "fail");
  return os.str();
}

ValenceCertificate prove_identity(
    const std::vector<std::pair<Z, EtaQuotient>>& terms, long N, long margin) {
  if (terms.empty()) throw std::invalid_argument("prove_identity: no terms");
  ValenceCertificate cert;
  cert.level = N;
  cert.margin = margin;
  cert.term_count = (long)terms.size();

  cert.index = gamma0_index(N);
  cert.weight_twice = terms.front().second.weight_twice();
  for (const auto& [coeff, f] : terms) {
    if (sgn(coeff) == 0)
      throw std::invalid_argument("prove_identity: zero coefficient term");
    if (N % f.level != 0)
      throw std::invalid_argument(
          "prove_identity: term level does not divide the ambient level");
    if (f.weight_twice() != cert.weight_twice)
      throw std::invalid_argument("prove_identity: terms of mixed weight");
  }

  Q B(0);
  for (const Cusp& cusp : cusp_set(N)) {
    if (cusp.is_infinity()) continue;
    bool first = true;
    Q mn(0);
    for (const auto& [coeff, f] : terms) {
      EtaQuotient lifted(N, f.expo);
      Q o = cusp_ORD(lifted, cusp);
      if (first || o < mn) mn = o;
      first = false;
    }
    cert.rows.push_back({cusp.str(), cusp.width(), mn});
    B += mn;
  }
  B.canonicalize();
  cert.bound_B = B;

  // strict lower bound the vanishing order must beat
  Q needed = Q(Z(cert.weight_twice) * Z(cert.index), 24) - B;
  needed.canonicalize();
  Z fl;
  mpz_fdiv_q(fl.get_mpz_t(), needed.get_num().get_mpz_t(),
             needed.get_den().get_mpz_t());
  cert.required_vanishing = (long)fl.get_si() + 1;

  long P = cert.required_vanishing + margin;
  ZSeries acc = ZSeries::zero(P, 0);
  for (const auto& [coeff, f] : terms) {
    ZSeries e = expand(f, P);
    acc = acc.add(e.scal(coeff));
  }
  cert.found_nonzero = false;
  for (long e = acc.min_exp; e < acc.prec; ++e) {
    if (sgn(acc.get(e)) != 0) {
      cert.found_nonzero = true;
      cert.first_nonzero = e;
      break;
    }
  }
  cert.achieved_vanishing = cert.found_nonzero ? cert.first_nonzero : acc.prec;
  cert.pass = !cert.found_nonzero &&
              cert.achieved_vanishing >= cert.required_vanishing;
  return cert;
}

}  // namespace qv
