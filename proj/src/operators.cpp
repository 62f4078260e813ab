#include "qv/operators.hpp"

#include <fstream>
#include <sstream>

#include "qv/specfun.hpp"

namespace qv {

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

const std::vector<UOperator>& u_operators() {
  static const std::vector<UOperator> ops = {
      {"UA", {{98, 2}, {2, -2}}, 8},
      {"UB", {{1, 3}, {49, -3}}, -6},
      {"U1", {{1, 3}, {98, 2}, {2, -2}, {49, -3}}, 2},
      {"U0", {}, 0},
  };
  return ops;
}

const UOperator& u_operator(const std::string& name) {
  for (const auto& op : u_operators())
    if (op.name == name) return op;
  throw std::invalid_argument("unknown operator " + name);
}

std::string default_data_dir() {
#ifdef QV_DATA_DIR
  return QV_DATA_DIR;
#else
  return "data";
#endif
}

std::string RelationRecord::id() const {
  std::string opn = op;
  opn.insert(1, "_");  // UA -> U_A
  std::string in;
  if (input_basis != "1") in = input_basis + "*";
  in += "t^" + std::to_string(input_tpow);
  return std::string(1, appendix) + "-" + group + " " + opn + "(" + in + ")";
}

bool RelationRecord::evaluable() const {
  for (const auto& t : terms)
    if (t.unreadable) return false;
  return true;
}

static std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<RelationRecord> load_relations(const std::string& dir) {
  std::ifstream in(dir + "/relations.dat", std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + dir + "/relations.dat");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  std::ifstream mf(dir + "/manifest.txt");
  if (!mf) throw std::runtime_error("cannot open " + dir + "/manifest.txt");
  bool verified = false;
  std::string hex, fname;
  while (mf >> hex >> fname) {
    if (fname == "relations.dat") {
      char out[17];
      snprintf(out, sizeof out, "%016llx",
               (unsigned long long)fnv1a64(text));
      if (hex != out)
        throw std::runtime_error("relations.dat checksum mismatch");
      verified = true;
    }
  }
  if (!verified)
    throw std::runtime_error("relations.dat missing from manifest");

  std::vector<RelationRecord> recs;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto parts = split_on(line, '|');
    if (parts.size() != 6)
      throw std::runtime_error("malformed relation line: " + line);
    RelationRecord r;
    r.appendix = parts[0].at(0);
    r.group = parts[1];
    r.op = parts[2];
    auto star = parts[3].find('*');
    r.input_basis = parts[3].substr(0, star);
    auto caret = parts[3].find('^', star);
    r.input_tpow = std::stol(parts[3].substr(caret + 1));
    for (const auto& ts : split_on(parts[4], ';')) {
      auto f = split_on(ts, ',');
      if (f.size() != 4)
        throw std::runtime_error("malformed term '" + ts + "' in: " + line);
      RelationRecord::Term t;
      t.basis = f[0];
      t.tpow = std::stol(f[1]);
      if (f[2] == "?") {
        t.unreadable = true;
      } else {
        t.coeff = Z(f[2]);
      }
      t.pow7 = std::stol(f[3]);
      r.terms.push_back(t);
    }
    r.suspect = (parts[5] == "true");
    recs.push_back(r);
  }
  return recs;
}

RelCtx::RelCtx(long tprec) : P(tprec), PQ(7 * tprec + 80) {
  t = jquot({{7, 4}, {1, -4}}, PQ, 1);
  ti = jquot({{1, 4}, {7, -4}}, PQ, -1);
  p0 = jquot({{14, 4}, {1, 4}, {7, -4}, {2, -4}}, PQ, 1);
  p1r = jquot({{1, 3}, {7, 3}, {2, -3}, {14, -3}}, PQ, -1).sub(p0);
  // the crank-side p1 carries a global factor 1/7 that must divide exactly
  ZSeries raw = jquot({{14, 1}, {1, 7}, {7, -1}, {2, -7}}, PQ, 0);
  raw.set(0, raw.get(0) - 1);
  p1c = raw;
  for (auto& v : p1c.c) {
    if (!mpz_divisible_ui_p(v.get_mpz_t(), 7))
      throw std::domain_error("crank basis series is not divisible by 7");
    mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), 7);
  }
  tpow_[0] = ZSeries::one(PQ);
  tpow_[1] = t;
  tpow_[-1] = ti;
}

const ZSeries& RelCtx::tpow(long k) {
  auto it = tpow_.find(k);
  if (it != tpow_.end()) return it->second;
  ZSeries v = (k > 0) ? tpow(k - 1).mul(t) : tpow(k + 1).mul(ti);
  return tpow_.emplace(k, std::move(v)).first->second;
}

ZSeries RelCtx::basis_series(char appendix, const std::string& name) {
  if (name == "1") return ZSeries::one(PQ);
  if (name == "p0") return p0;
  if (name == "p1") return appendix == 'A' ? p1r : p1c;
  throw std::invalid_argument("unknown basis element " + name);
}

ZSeries RelCtx::input_series(const RelationRecord& rec) {
  ZSeries u = basis_series(rec.appendix, rec.input_basis);
  if (rec.input_tpow == 0) return u;
  return u.mul(tpow(rec.input_tpow));
}

ZSeries RelCtx::apply_op(const std::string& op, const ZSeries& f) {
  const UOperator& o = u_operator(op);
  if (o.mult.empty()) return f.u_p(7);
  ZSeries m = jquot(o.mult, f.prec + std::labs(o.qshift) + 16, o.qshift);
  return m.mul(f).u_p(7);
}

std::pair<long, long> profile_bounds(const std::string& op,
                                     const std::string& u, long k,
                                     const std::string& b, long n) {
  const long FORBID = 1L << 40;
  if (op == "UA") {
    if (b == "p1") return {floor_div(k + 14, 7), floor_div(7 * n - k - 8, 4)};
    return {floor_div(k + 7, 7), floor_div(7 * n - k - 5, 4)};
  }
  if (op == "UB") {
    if (b == "p1") return {floor_div(k + 6, 7), floor_div(7 * n - k + 2, 4)};
    return {floor_div(k, 7), floor_div(7 * n - k + 5, 4)};
  }
  if (op == "U1") {
    if (b == "p0") return {floor_div(k, 7), floor_div(7 * n - k + 1, 4)};
    if (b == "p1")
      return {floor_div(k, 7),
              floor_div(7 * n - k + (u == "p1" ? 4 : 5), 4)};
    return {floor_div(k + 7, 7), floor_div(7 * n - k + 1, 4)};
  }
  if (op == "U0") {
    if (u == "1" && b != "1") return {FORBID, FORBID};
    if (u == "1") return {floor_div(k + 6, 7), floor_div(7 * n - k - 1, 4)};
    if (b == "p1") return {floor_div(k, 7), floor_div(7 * n - k + 2, 4)};
    return {floor_div(k + 7, 7), floor_div(7 * n - k - 1, 4)};
  }
  throw std::invalid_argument("unknown operator " + op);
}

RelationCheckResult verify_relation(RelCtx& ctx, const RelationRecord& rec) {
  RelationCheckResult res;
  res.id = rec.id();
  res.suspect = rec.suspect;
  res.evaluable = rec.evaluable();

  res.profile_ok = true;
  for (const auto& t : rec.terms) {
    auto [nmin, vmin] = profile_bounds(rec.op, rec.input_basis,
                                       rec.input_tpow, t.basis, t.tpow);
    std::ostringstream why;
    if (t.tpow < nmin) {
      why << t.basis << "*t^" << t.tpow << ": t-power below " << nmin;
    } else if (!t.unreadable && vmin > 0) {
      long v = t.pow7 + padic_order(t.coeff, 7);
      if (v < vmin)
        why << t.basis << "*t^" << t.tpow << ": valuation " << v << " below "
            << vmin;
    }
    if (!why.str().empty()) {
      res.profile_ok = false;
      if (!res.profile_note.empty()) res.profile_note += "; ";
      res.profile_note += why.str();
    }
  }

  if (!res.evaluable) return res;

  ZSeries lhs = ctx.apply_op(rec.op, ctx.input_series(rec));
  ZSeries rhs = ZSeries::zero(lhs.prec, lhs.min_exp);
  for (const auto& t : rec.terms) {
    Z c = t.coeff;
    mpz_class p7;
    mpz_ui_pow_ui(p7.get_mpz_t(), 7, t.pow7);
    c *= p7;
    ZSeries part = ctx.basis_series(rec.appendix, t.basis);
    if (t.tpow != 0) part = part.mul(ctx.tpow(t.tpow));
    rhs = rhs.add(part.scal(c));
  }
  auto [ok, w] = lhs.eq(rhs);
  res.printed_match = ok;
  if (ok)
    res.coeffs_checked = w;
  else
    res.first_mismatch = w;
  return res;
}

std::vector<RelationCheckResult> verify_relations(
    RelCtx& ctx, const std::vector<RelationRecord>& recs, char appendix) {
  std::vector<RelationCheckResult> out;
  for (const auto& r : recs) {
    if (appendix && r.appendix != appendix) continue;
    out.push_back(verify_relation(ctx, r));
  }
  return out;
}

const std::map<int, std::vector<AjEntry>>& aj_table() {
  static const std::map<int, std::vector<AjEntry>> table = {
      {0, {{1, 1, 0}}},
      {1, {{2, 1, 2}, {1, 4, 1}}},
      {2, {{3, 1, 4}, {2, 4, 3}, {1, 46, 1}}},
      {3, {{4, 1, 6}, {3, 4, 5}, {2, 46, 3}, {1, 272, 1}}},
      {4, {{5, 1, 8}, {4, 4, 7}, {3, 46, 5}, {2, 272, 3}, {1, 845, 1}}},
      {5,
       {{6, 1, 10}, {5, 4, 9}, {4, 46, 7}, {3, 272, 5}, {2, 845, 3},
        {1, 176, 2}}},
      {6,
       {{7, 1, 12}, {6, 4, 11}, {5, 46, 9}, {4, 272, 7}, {3, 845, 5},
        {2, 176, 4}, {1, 82, 2}}},
  };
  return table;
}

ModEqReport verify_modular_equation(long direct_prec) {
  ModEqReport rep;

  // direct expansion check of t^7 = sum_j a_j(t(7tau)) t^j
  {
    long QP = direct_prec + 80;
    ZSeries t = jquot({{7, 4}, {1, -4}}, QP, 1);
    ZSeries t7 = jquot({{49, 4}, {7, -4}}, QP, 7);
    std::map<long, ZSeries> t7pow{{0, ZSeries::one(QP)}};
    for (long l = 1; l <= 7; ++l) t7pow[l] = t7pow[l - 1].mul(t7);
    ZSeries rhs = ZSeries::zero(QP, 0);
    ZSeries tj = ZSeries::one(QP);
    for (const auto& [j, entries] : aj_table()) {
      if (j > 0) tj = tj.mul(t);
      ZSeries aj = ZSeries::zero(QP, 0);
      for (const auto& en : entries) {
        mpz_class p7;
        mpz_ui_pow_ui(p7.get_mpz_t(), 7, en.e);
        aj = aj.add(t7pow[en.l].scal(en.c * p7));
      }
      rhs = rhs.add(aj.mul(tj));
    }
    auto [ok, w] = t.pow(7).eq(rhs, direct_prec);
    rep.direct_ok = ok;
    rep.direct_to = w;
  }

  // valuation shape of the table entries
  rep.shape_ok = true;
  for (const auto& [j, entries] : aj_table())
    for (const auto& en : entries)
      if (en.e + padic_order(en.c, 7) < floor_div(7 * en.l + j - 4, 4))
        rep.shape_ok = false;

  // valence certificate for the identity divided by t^7:
  // sum_j sum_l c 7^e t^{j-7} T^l - 1 = 0 with T = t(7tau)
  std::vector<std::pair<Z, EtaQuotient>> terms;
  for (const auto& [j, entries] : aj_table())
    for (const auto& en : entries) {
      mpz_class p7;
      mpz_ui_pow_ui(p7.get_mpz_t(), 7, en.e);
      std::map<long, long> quot = {
          {1, -4 * (j - 7)}, {7, 4 * (j - 7) - 4 * en.l}, {49, 4 * en.l}};
      terms.push_back({en.c * p7, EtaQuotient(49, quot)});
    }
  terms.push_back({Z(-1), EtaQuotient(49, {})});
  rep.cert = prove_identity(terms, 49, 16);
  rep.valence_ok = rep.cert.pass;
  return rep;
}

const ProjectionReport::Item* ProjectionReport::find(
    const std::string& name) const {
  for (const auto& it : items)
    if (it.name == name) return &it;
  return nullptr;
}

ProjectionReport verify_holomorphic_projections(long prec_f5, long prec_f7,
                                                long prec_w) {
  ProjectionReport rep;
  auto push = [&](const std::string& name, const ZSeries& lhs,
                  const ZSeries& rhs) {
    auto [ok, w] = lhs.eq(rhs);
    ProjectionReport::Item it;
    it.name = name;
    it.pass = ok;
    if (ok)
      it.checked_to = w;
    else
      it.first_mismatch = w;
    rep.items.push_back(it);
  };

  {
    CoeffStream af = gen_af(5 * prec_f5 + 10);
    ZSeries s = ZSeries::zero(prec_f5, 0);
    for (long n = 0; n < prec_f5; ++n)
      s.set(n, af.coeff(5 * n - 1) + af.coeff_div(n, 5));
    ZSeries lhs = s.mul(jquot({{10, 2}, {5, -3}}, prec_f5));
    ZSeries rhs =
        jquot({{2, 4}, {10, 4}, {1, -1}, {4, -3}, {5, -3}, {20, -1}}, prec_f5)
            .sub(jquot({{1, 2}, {4, 3}, {10, 1}, {20, 1}, {2, -5}, {5, -2}},
                       prec_f5, 1)
                     .scal(Z(4)));
    push("f5q", lhs, rhs);
  }
  {
    CoeffStream af = gen_af(7 * prec_f7 + 10);
    ZSeries s = ZSeries::zero(prec_f7, 0);
    for (long n = 0; n < prec_f7; ++n)
      s.set(n, af.coeff(7 * n - 2) - af.coeff_div(n, 7));
    ZSeries lhs = s.mul(jquot({{14, 2}, {7, -3}}, prec_f7));
    ZSeries rhs = jquot({{1, 3}, {7, 3}, {2, -5}, {14, -1}}, prec_f7)
                      .neg()
                      .sub(jquot({{1, 4}, {14, 6}, {2, -6}, {7, -4}}, prec_f7,
                                 2)
                               .scal(Z(6)));
    push("f7q", lhs, rhs);
  }
  {
    CoeffStream aw = gen_aomega(5 * (prec_w / 2) + 30);
    ZSeries s = ZSeries::zero(prec_w, 0);
    for (long n = 0; 2 * n < prec_w; ++n)
      s.set(2 * n, aw.coeff(5 * n + 1) + aw.coeff_div(n - 3, 5));
    ZSeries rhs =
        jquot({{2, 4}, {10, 2}, {1, -3}, {4, -1}, {5, -1}}, prec_w)
            .add(jquot({{1, 3}, {4, 2}, {5, 1}, {20, 1}, {2, -5}, {10, -1}},
                       prec_w));
    push("genw", s, rhs);
  }
  rep.all_pass = true;
  for (const auto& it : rep.items)
    if (!it.pass) rep.all_pass = false;
  return rep;
}

}  // namespace qv
