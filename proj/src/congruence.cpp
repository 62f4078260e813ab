#include "qv/congruence.hpp"

#include <chrono>
#include <climits>
#include <sstream>

#include "json.hpp"

namespace qv {

using nlohmann::ordered_json;

const char* const kBasisNames[3] = {"p0", "p1", "1"};

int basis_index(const std::string& name) {
  for (int i = 0; i < 3; ++i)
    if (name == kBasisNames[i]) return i;
  throw std::invalid_argument("unknown basis element: " + name);
}

static Z pow7(long e) {
  Z r;
  mpz_ui_pow_ui(r.get_mpz_t(), 7, (unsigned long)e);
  return r;
}

std::string format_tpoly(const TPoly& p) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, cf] : p) {
    if (sgn(cf) == 0) continue;
    Z a = abs(cf);
    os << (first ? (sgn(cf) < 0 ? "-" : "") : (sgn(cf) < 0 ? " - " : " + "));
    first = false;
    long e = padic_order(a, 7);
    Z u = a / pow7(e);
    os << u.get_str();
    if (e > 0) os << "*7^" << e;
    if (key.first != 2) os << "*" << kBasisNames[key.first];
    if (key.second != 0) os << "*t^" << key.second;
  }
  if (first) return "0";
  return os.str();
}

ZSeries evaluate_tpoly(RelCtx& ctx, char appendix, const TPoly& p) {
  ZSeries acc;
  bool any = false;
  for (const auto& [key, cf] : p) {
    if (sgn(cf) == 0) continue;
    ZSeries b = ctx.basis_series(appendix, kBasisNames[key.first]);
    ZSeries term = (key.second == 0) ? b : b.mul(ctx.tpow(key.second));
    term = term.scal(cf);
    acc = any ? acc.add(term) : term;
    any = true;
  }
  if (!any) return ZSeries::zero(ctx.PQ, 0);
  return acc;
}

// ---- exact linear algebra ---------------------------------------------------

std::vector<Q> express_in_span(const std::vector<QSeries>& span,
                               const QSeries& f, long row_lo, long row_hi) {
  const long cols = (long)span.size();
  const long rows = row_hi - row_lo;
  if (cols == 0) throw std::invalid_argument("express_in_span: empty span");
  if (rows < cols + 8)
    throw std::invalid_argument(
        "express_in_span: window must comfortably exceed the unknown count");
  long vlo = std::min(row_lo, f.min_exp);
  for (const auto& s : span) {
    if (s.prec < row_hi)
      throw std::invalid_argument("express_in_span: candidate too short");
    vlo = std::min(vlo, s.min_exp);
  }
  if (f.prec < row_hi)
    throw std::invalid_argument("express_in_span: target too short");

  std::vector<std::vector<Q>> M(rows, std::vector<Q>(cols));
  std::vector<Q> rhs(rows);
  for (long r = 0; r < rows; ++r) {
    long e = row_lo + r;
    for (long j = 0; j < cols; ++j) M[r][j] = span[j].get(e);
    rhs[r] = f.get(e);
  }

  // row-echelon form, exact over Q
  std::vector<long> pivot_row(cols, -1);
  long rr = 0;
  for (long col = 0; col < cols; ++col) {
    long pr = -1;
    for (long r = rr; r < rows; ++r)
      if (sgn(M[r][col]) != 0) {
        pr = r;
        break;
      }
    if (pr < 0)
      throw std::runtime_error(
          "express_in_span: degenerate candidate set on this window");
    std::swap(M[rr], M[pr]);
    std::swap(rhs[rr], rhs[pr]);
    Q inv = Q(1) / M[rr][col];
    for (long j = col; j < cols; ++j) M[rr][j] *= inv;
    rhs[rr] *= inv;
    for (long r = rr + 1; r < rows; ++r) {
      if (sgn(M[r][col]) == 0) continue;
      Q fac = M[r][col];
      for (long j = col; j < cols; ++j) M[r][j] -= fac * M[rr][j];
      rhs[r] -= fac * rhs[rr];
    }
    pivot_row[col] = rr;
    ++rr;
  }
  for (long r = rr; r < rows; ++r)
    if (sgn(rhs[r]) != 0)
      throw std::runtime_error(
          "express_in_span: not in span at this degree bound");

  std::vector<Q> x(cols);
  for (long col = cols - 1; col >= 0; --col) {
    Q v = rhs[pivot_row[col]];
    for (long j = col + 1; j < cols; ++j) v -= M[pivot_row[col]][j] * x[j];
    x[col] = v;
  }

  // the solved window proves nothing about rows outside it: re-check all
  for (long e = vlo; e < row_hi; ++e) {
    Q acc(0);
    for (long j = 0; j < cols; ++j) {
      if (e < span[j].min_exp) continue;
      acc += x[j] * span[j].get(e);
    }
    Q want = (e < f.min_exp) ? Q(0) : f.get(e);
    if (acc != want)
      throw std::runtime_error(
          "express_in_span: not in span at this degree bound");
  }
  return x;
}

bool BasisDecomposition::integral() const {
  for (const auto& [k, v] : coeff)
    if (v.get_den() != 1) return false;
  return true;
}

TPoly BasisDecomposition::to_tpoly() const {
  TPoly out;
  for (const auto& [k, v] : coeff) {
    if (v.get_den() != 1)
      throw std::runtime_error("decomposition has a fractional coefficient");
    if (sgn(v) != 0) out[k] = v.get_num();
  }
  return out;
}

BasisDecomposition decompose(RelCtx& ctx, char appendix, const ZSeries& f,
                             long nmin, long nmax, long upto) {
  if (nmax < nmin) throw std::invalid_argument("decompose: empty t-range");
  std::vector<QSeries> span;
  std::vector<TKey> keys;
  long lo = f.is_zero() ? LONG_MAX : f.trimmed().min_exp;
  for (int b = 0; b < 3; ++b) {
    ZSeries bs = ctx.basis_series(appendix, kBasisNames[b]);
    for (long n = nmin; n <= nmax; ++n) {
      ZSeries cand = (n == 0) ? bs : bs.mul(ctx.tpow(n));
      lo = std::min(lo, cand.ord_q());
      span.push_back(to_rational(cand));
      keys.push_back({b, n});
    }
  }
  if (lo == LONG_MAX) lo = 0;
  if (upto - lo < (long)span.size() + 16)
    throw std::invalid_argument("decompose: window too small to overdetermine");
  std::vector<Q> x = express_in_span(span, to_rational(f), lo, upto);
  BasisDecomposition d;
  d.nmin = nmin;
  d.nmax = nmax;
  for (size_t i = 0; i < keys.size(); ++i)
    if (sgn(x[i]) != 0) d.coeff[keys[i]] = x[i];
  return d;
}

// ---- the table-backed operator engine ---------------------------------------

TBasisEngine::TBasisEngine(std::shared_ptr<RelCtx> c,
                           std::vector<RelationRecord> recs)
    : ctx(std::move(c)) {
  for (const auto& rec : recs) {
    auto key = std::make_tuple(rec.op, basis_index(rec.input_basis),
                               rec.input_tpow);
    TPoly printed;
    if (rec.evaluable())
      for (const auto& t : rec.terms)
        printed[{basis_index(t.basis), t.tpow}] += t.coeff * pow7(t.pow7);
    if (!rec.suspect) {
      base_[key] = std::move(printed);
      continue;
    }
    // damaged or doubtful line: rebuild it from the expansion itself
    ZSeries img = ctx->apply_op(rec.op, ctx->input_series(rec));
    TPoly rhs = decompose(*ctx, rec.appendix, img, -4, 16, 105).to_tpoly();
    bool match = rec.evaluable() && rhs == printed;
    base_[key] = rhs;
    recoveries_.push_back({rec.id(), std::move(rhs), match});
  }
}

TBasisEngine TBasisEngine::standard(long tprec) {
  return TBasisEngine(std::make_shared<RelCtx>(tprec), load_relations());
}

std::pair<long, long> TBasisEngine::base_range(const std::string& op,
                                               int u) const {
  if (op == "UB") return {-5, 1};
  if (op == "UA" && u == 0) return {-7, -1};
  if ((op == "U1" || op == "U0") && u == 1) return {-7, -1};
  return {-6, 0};
}

const TPoly& TBasisEngine::getU(const std::string& op, int u, long k) {
  auto key = std::make_tuple(op, u, k);
  if (auto it = base_.find(key); it != base_.end()) return it->second;
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  auto [kmin, kmax] = base_range(op, u);
  TPoly out;
  if (k > kmax) {
    // push upward through t^7 = sum_j a_j(t(7tau)) t^j
    for (int j = 0; j <= 6; ++j) {
      const TPoly& prev = getU(op, u, k - 7 + j);
      for (const auto& ent : aj_table().at(j)) {
        Z c = ent.c * pow7(ent.e);
        for (const auto& [bk, cf] : prev) out[{bk.first, bk.second + ent.l}] += cf * c;
      }
    }
  } else if (k < kmin) {
    // same identity solved for the j = 0 term, then one division by t
    TPoly acc = getU(op, u, k + 7);
    for (int j = 1; j <= 6; ++j) {
      const TPoly& pj = getU(op, u, k + j);
      for (const auto& ent : aj_table().at(j)) {
        Z c = ent.c * pow7(ent.e);
        for (const auto& [bk, cf] : pj) acc[{bk.first, bk.second + ent.l}] -= cf * c;
      }
    }
    // acc equals t times the wanted image; images of deep negative powers
    // are Laurent in t, so the shift needs no positivity guard
    for (const auto& [bk, cf] : acc) {
      if (sgn(cf) == 0) continue;
      out[{bk.first, bk.second - 1}] = cf;
    }
  } else {
    throw std::logic_error("relation table is missing " + op + " at k=" +
                           std::to_string(k));
  }
  for (auto it = out.begin(); it != out.end();)
    it = (sgn(it->second) == 0) ? out.erase(it) : std::next(it);
  return memo_.emplace(key, std::move(out)).first->second;
}

TPoly TBasisEngine::applyU(const std::string& op, const TPoly& L) {
  TPoly out;
  for (const auto& [key, cf] : L) {
    if (sgn(cf) == 0) continue;
    const TPoly& img = getU(op, key.first, key.second);
    for (const auto& [k2, c2] : img) out[k2] += cf * c2;
  }
  for (auto it = out.begin(); it != out.end();)
    it = (sgn(it->second) == 0) ? out.erase(it) : std::next(it);
  return out;
}

std::vector<TPoly> TBasisEngine::crank_chain(int steps) {
  std::vector<TPoly> out;
  TPoly L = {{{0, 0}, Z(2)}, {{1, 0}, Z(7)}};
  out.push_back(L);
  for (int i = 2; i <= steps; ++i) {
    L = applyU(i % 2 == 0 ? "U0" : "U1", L);
    out.push_back(L);
  }
  return out;
}

std::vector<TPoly> TBasisEngine::rank_chain(int steps) {
  std::vector<TPoly> out;
  TPoly L = {{{0, 0}, Z(7)}, {{1, 0}, Z(1)}};
  out.push_back(L);
  for (int i = 1; i <= steps; ++i) {
    L = applyU(i % 2 == 1 ? "UA" : "UB", L);
    out.push_back(L);
  }
  return out;
}

// ---- valuation profiles ------------------------------------------------------

ProfileResult check_profile(const TPoly& L, ProfileKind kind) {
  auto bound = [&](int b, long k) -> std::pair<long, long> {
    switch (kind) {
      case ProfileKind::crank_odd:
        if (b == 1) return {0, floor_div(7 * k + 4, 4)};
        return {b == 2 ? 1 : 0, floor_div(7 * k + 1, 4)};
      case ProfileKind::crank_even:
        if (b == 1) return {0, floor_div(7 * k + 2, 4)};
        return {1, floor_div(7 * k - 1, 4)};
      case ProfileKind::rank_xb:
        if (b == 1) return {2, floor_div(7 * k - 8, 4)};
        return {1, floor_div(7 * k - 5, 4)};
      case ProfileKind::rank_7xa:
        if (b == 1) return {1, 1 + floor_div(7 * k - 3, 4)};
        return {0, 1 + floor_div(7 * k, 4)};
    }
    throw std::logic_error("unreachable");
  };
  ProfileResult res;
  for (const auto& [key, cf] : L) {
    if (sgn(cf) == 0) continue;
    auto [kmin, fl] = bound(key.first, key.second);
    std::ostringstream os;
    if (key.second < kmin) {
      os << "(" << kBasisNames[key.first] << ", t^" << key.second
         << ") below the minimal t-power " << kmin;
      res.pass = false;
      if (res.note.empty()) res.note = os.str();
      continue;
    }
    long v = padic_order(cf, 7);
    if (v < fl) {
      os << "(" << kBasisNames[key.first] << ", t^" << key.second << "): 7-adic order "
         << v << " below the floor " << fl;
      res.pass = false;
      if (res.note.empty()) res.note = os.str();
    }
  }
  return res;
}

// ---- multiplier constants ----------------------------------------------------

static long mod_ratio(const Z& num, const Z& den, long mod) {
  Z m(mod), d = den % m, inv;
  if (!mpz_invert(inv.get_mpz_t(), d.get_mpz_t(), m.get_mpz_t()))
    throw std::runtime_error("chain constant: base coefficient is not a unit");
  Z r;
  mpz_fdiv_r(r.get_mpz_t(), Z(num * inv).get_mpz_t(), m.get_mpz_t());
  return r.get_si();
}

KExtraction chain_K(TBasisEngine& eng, int a) {
  if (a < 1 || a > 2)
    throw std::invalid_argument("chain_K covers a = 1 and a = 2 only");
  KExtraction r;
  r.a = a;
  r.modulus = (a == 1) ? 7 : 49;
  // a=1 compares L3 against L1 at (p0, t^0); a=2 compares L4 against L2
  // at (p1, t^0)
  auto chain = eng.crank_chain(a == 1 ? 3 : 4);
  TKey key = (a == 1) ? TKey{0, 0} : TKey{1, 0};
  const TPoly& top = (a == 1) ? chain[2] : chain[3];
  const TPoly& bot = (a == 1) ? chain[0] : chain[1];
  Z num = top.count(key) ? top.at(key) : Z(0);
  Z den = bot.at(key);
  r.K = mod_ratio(num, den, r.modulus);
  return r;
}

KEstimate estimate_K(const CoeffStream& beta, int a, long instances) {
  KEstimate r;
  r.a = a;
  long step = 1;
  for (int i = 0; i < a; ++i) step *= 7;
  r.modulus = step;
  long delta = (long)delta_rank(7, a).get_si();
  if (49 * (delta + step * (instances - 1)) - 2 >= beta.prec())
    throw std::invalid_argument("estimate_K: stream too short");
  Z m(step), K(-1);
  for (long j = 0; j < instances; ++j) {
    long n = delta + step * j;
    Z bm = beta.coeff(n);
    if (mpz_divisible_ui_p(bm.get_mpz_t(), 7)) continue;
    Z inv;
    mpz_invert(inv.get_mpz_t(), Z(bm % m).get_mpz_t(), m.get_mpz_t());
    mpz_fdiv_r(K.get_mpz_t(), Z(beta.coeff(49 * n - 2) * inv).get_mpz_t(),
               m.get_mpz_t());
    r.conclusive = true;
    r.K = K.get_si();
    break;
  }
  if (!r.conclusive) return r;
  for (long j = 0; j < instances; ++j) {
    long n = delta + step * j;
    Z d = beta.coeff(49 * n - 2) - K * beta.coeff(n);
    ++r.instances_checked;
    if (!mpz_divisible_p(d.get_mpz_t(), m.get_mpz_t())) ++r.failures;
  }
  return r;
}

// ---- q-series chains ----------------------------------------------------------

static ZSeries apply_u7(const std::string& opname, const ZSeries& f) {
  const UOperator& op = u_operator(opname);
  if (op.mult.empty()) return f.u_p(7);
  ZSeries m = jquot(op.mult, f.prec + std::labs(op.qshift) + 16, op.qshift);
  return m.mul(f).u_p(7);
}

// U_5(m*f) through residue classes; avoids the full-size product
static ZSeries u5_mul(const ZSeries& m, const ZSeries& f) {
  ZSeries acc;
  bool first = true;
  for (int r = 0; r < 5; ++r) {
    int s = (5 - r) % 5;
    ZSeries p = m.dissect(5, r).mul(f.dissect(5, s));
    if (r + s == 5) p = p.shift(1);
    acc = first ? p : acc.add(p);
    first = false;
  }
  return acc;
}

static ZSeries apply_u5(const std::map<long, long>& mult, long qshift,
                        const ZSeries& f) {
  ZSeries m = jquot(mult, f.prec + std::labs(qshift) + 16, qshift);
  return u5_mul(m, f);
}

static const std::map<long, long> kOmegaA = {{50, 2}, {4, 4}, {100, -4}, {2, -2}};
static const std::map<long, long> kOmegaB = {{100, 1}, {4, -1}};

static ZSeries omega_Pa(long prec) {
  ZSeries s = jquot({{20, 1}, {10, 2}, {2, 6}, {5, -1}, {4, -5}, {1, -3}}, prec, 1);
  return s.add(jquot({{20, 2}, {5, 1}, {1, 3}, {10, -1}, {4, -2}, {2, -3}}, prec, 1));
}

static ZSeries omega_Pb(long prec) {
  ZSeries s = jquot({{10, 6}, {4, 1}, {2, 2}, {20, -5}, {5, -3}, {1, -1}}, prec, -1);
  return s.sub(jquot({{5, 3}, {4, 2}, {1, 1}, {20, -2}, {10, -3}, {2, -1}}, prec, -1));
}

static ZSeries omega_t(long prec) {
  return jquot({{10, 4}, {4, 2}, {20, -2}, {2, -4}}, prec, 0);
}

std::vector<ZSeries> crank_qchain(long start_prec, int upto) {
  RelCtx c(std::max(1L, ceil_div(start_prec - 80, 7)));
  std::vector<ZSeries> out;
  ZSeries L = c.p0.scal(2).add(c.p1c.scal(7)).cut(start_prec);
  out.push_back(L);
  for (int i = 2; i <= upto; ++i) {
    L = apply_u7(i % 2 == 0 ? "U0" : "U1", L);
    out.push_back(L);
  }
  return out;
}

std::vector<ZSeries> rank_qchain(long start_prec, int upto) {
  RelCtx c(std::max(1L, ceil_div(start_prec - 80, 7)));
  std::vector<ZSeries> out;
  ZSeries L = c.p0.scal(7).add(c.p1r).cut(start_prec);
  out.push_back(L);
  for (int i = 1; i <= upto; ++i) {
    L = apply_u7(i % 2 == 1 ? "UA" : "UB", L);
    out.push_back(L);
  }
  return out;
}

std::vector<ZSeries> omega_qchain(long start_prec, int upto) {
  std::vector<ZSeries> out;
  ZSeries K = omega_Pa(start_prec);
  out.push_back(K);
  for (int i = 1; i <= upto; ++i) {
    K = (i % 2 == 1) ? apply_u5(kOmegaA, -12, K) : apply_u5(kOmegaB, 4, K);
    out.push_back(K);
  }
  return out;
}

// ---- iteration with a precision plan ------------------------------------------

IterationState iterate(const std::string& side, int alpha, long final_prec) {
  if (alpha < 1) throw std::invalid_argument("iterate: alpha must be positive");
  if (final_prec < 1) throw std::invalid_argument("iterate: empty window");
  const long kSlack = 8;
  long need = final_prec + kSlack;
  int cap;
  if (side == "crank") {
    cap = 4;
    if (alpha > cap)
      throw InfeasibleError(
          "crank iteration past level 4 would need a base window of about 7^" +
          std::to_string(alpha) + " times the target and operator images far "
          "outside the verified tables");
    for (int i = alpha; i >= 2; --i) need = 7 * need - (i % 2 == 0 ? 0 : 2);
  } else if (side == "rank") {
    cap = 2;
    if (alpha > cap)
      throw InfeasibleError(
          "rank iteration past level 2 leaves the verified operator tables");
    for (int i = alpha; i >= 1; --i) need = 7 * need - (i % 2 == 1 ? 8 : -6);
  } else if (side == "omega") {
    cap = 3;
    if (alpha > cap)
      throw InfeasibleError(
          "omega iteration past level 3 would need an infeasible base window");
    for (int i = alpha; i >= 1; --i) need = 5 * need - (i % 2 == 1 ? -12 : 4);
  } else {
    throw std::invalid_argument("iterate: side must be crank, rank or omega");
  }
  if (need > 130000)
    throw InfeasibleError("planned base precision " + std::to_string(need) +
                          " exceeds the feasible budget");
  IterationState st;
  st.side = side;
  st.alpha = alpha;
  st.start_prec = need;
  if (side == "crank")
    st.series = crank_qchain(need, alpha).back();
  else if (side == "rank")
    st.series = rank_qchain(need, alpha).back();
  else
    st.series = omega_qchain(need, alpha).back();
  st.retained = st.series.prec;
  if (st.retained < final_prec)
    throw std::logic_error("iteration plan fell short of the target window");
  return st;
}

// ---- reports -------------------------------------------------------------------

static ordered_json items_json(const std::vector<CheckItem>& items,
                               bool all_settled) {
  ordered_json j;
  j["items"] = ordered_json::array();
  for (const auto& it : items) {
    ordered_json r;
    r["name"] = it.name;
    r["pass"] = it.pass;
    r["flagged"] = it.flagged;
    r["checked_to"] = it.checked_to;
    r["first_mismatch"] = it.first_mismatch;
    r["note"] = it.note;
    j["items"].push_back(r);
  }
  j["all_settled_pass"] = all_settled;
  return j;
}

static bool settled_pass(const std::vector<CheckItem>& items) {
  for (const auto& it : items)
    if (!it.flagged && !it.pass) return false;
  return true;
}

const CheckItem* CrossRepReport::find(const std::string& name) const {
  for (const auto& it : items)
    if (it.name == name) return &it;
  return nullptr;
}
std::string CrossRepReport::to_json() const {
  return items_json(items, all_settled_pass).dump(2);
}

const CheckItem* ValuationReport::find(const std::string& name) const {
  for (const auto& it : items)
    if (it.name == name) return &it;
  return nullptr;
}
std::string ValuationReport::to_json() const {
  return items_json(items, all_settled_pass).dump(2);
}

static CheckItem eq_item(const std::string& name, const ZSeries& lhs,
                         const ZSeries& rhs, bool flagged = false,
                         const std::string& note = "") {
  CheckItem it;
  it.name = name;
  it.flagged = flagged;
  it.note = note;
  auto [ok, bound] = lhs.eq(rhs);
  it.pass = ok;
  if (ok)
    it.checked_to = bound;
  else
    it.first_mismatch = bound;
  return it;
}

// ---- cross representations ------------------------------------------------------

CrossRepReport verify_cross_representations(TBasisEngine& eng, long coeffs) {
  CrossRepReport rep;

  // crank side: windows for m = 1, 2, 3 sharing one beta stream
  const long W3 = std::max(48L, coeffs + 12);
  const long W2 = std::min(7 * W3 - 2, 340L);
  const long W1 = 700;
  const long V2 = coeffs + 6;
  const long V1 = 7 * V2 + 6;
  auto chain = crank_qchain(7 * (7 * W3 - 2), 3);
  auto rchain = rank_qchain(7 * V1 - 8, 2);
  {
    long bmax = std::max({7 * W1 + 5, 49 * W2 + 47, 343 * W3 + 243});
    CoeffStream beta = gen_beta(bmax + 8);
    auto progression = [&](long mod, long delta, long w) {
      ZSeries s = ZSeries::zero(w, 0);
      for (long n = 0; n < w; ++n) s.set(n, beta.coeff(mod * n + delta));
      return s;
    };
    ZSeries pref1 = jquot({{14, 2}, {7, -3}}, W1, 1);
    ZSeries pref1p = jquot({{14, 2}, {7, -3}}, W1, 0);
    ZSeries pref2 = jquot({{2, 2}, {1, -3}}, W2, 1);
    ZSeries pref3 = jquot({{14, 2}, {7, -3}}, W3, 1);
    ZSeries s1 = progression(7, delta_rank(7, 1).get_si(), W1);
    rep.items.push_back(eq_item("crank-m1", chain[0].cut(W1), pref1.mul(s1)));
    rep.items.push_back(eq_item(
        "crank-m1-printed", chain[0].cut(W1), pref1p.mul(s1), true,
        "published display omits the factor q in front of the quotient"));
    rep.items.push_back(
        eq_item("crank-m2", chain[1].cut(W2),
                pref2.mul(progression(49, delta_rank(7, 2).get_si(), W2))));
    rep.items.push_back(
        eq_item("crank-m3", chain[2].cut(W3),
                pref3.mul(progression(343, delta_rank(7, 3).get_si(), W3))));
  }

  // rank side: A(n) = a_f(n/7) - a_f(7n-2)
  {
    CoeffStream af = gen_af(49 * V1 + 8);
    auto bigA = [&](long n) -> Z {
      if (n < 0) return Z(0);
      return Z(af.coeff_div(n, 7) - af.coeff(7 * n - 2));
    };
    auto family = [&](int m, long w) {
      long lam = lambda_index(m).get_si();
      ZSeries s = ZSeries::zero(w, 0);
      long p7 = 1;
      for (int i = 0; i < m; ++i) p7 *= 7;
      for (long n = 0; n < w; ++n) s.set(n, bigA(p7 * n + lam));
      return s;
    };
    rep.items.push_back(
        eq_item("rank-m1", rchain[1].cut(V1),
                jquot({{14, 2}, {1, -3}}, V1, 1).mul(family(1, V1))));
    rep.items.push_back(
        eq_item("rank-m2", rchain[2].cut(V2),
                jquot({{2, 2}, {7, -3}}, V2, -1).mul(family(2, V2))));
  }

  // omega side: a(n) = a_omega(5n+1) + a_omega((n-3)/5), indices on q^(2n)
  {
    const long T2 = 2 * coeffs + 8;
    const long P0 = 5 * (5 * T2 - 4) + 12;
    auto K = omega_qchain(P0, 2);
    CoeffStream aw = gen_aomega(5 * P0 + 8);
    auto smalla = [&](long n) {
      Z v = aw.coeff(5 * n + 1);
      if (n >= 3 && (n - 3) % 5 == 0) v += aw.coeff((n - 3) / 5);
      return v;
    };
    auto family = [&](long step, long gamma, long w) {
      ZSeries s = ZSeries::zero(w, 0);
      for (long n = 0; 2 * n < w; ++n) s.set(2 * n, smalla(step * n + gamma));
      return s;
    };
    long w0 = K[0].prec, w1 = K[1].prec, w2 = K[2].prec;
    rep.items.push_back(
        eq_item("omega-K0", K[0],
                jquot({{20, 1}, {2, 2}, {4, -4}}, w0, 1).mul(family(1, 0, w0))));
    rep.items.push_back(
        eq_item("omega-K1", K[1],
                jquot({{10, 2}, {4, 1}, {20, -4}}, w1, -1).mul(family(5, 3, w1))));
    rep.items.push_back(
        eq_item("omega-K2", K[2],
                jquot({{20, 1}, {2, 2}, {4, -4}}, w2, 1).mul(family(25, 8, w2))));
  }

  // symbolic chains against the direct q-series chains
  {
    RelCtx ev(34);
    auto sym = eng.crank_chain(3);
    rep.items.push_back(eq_item("chain-sym-L2", evaluate_tpoly(ev, 'B', sym[1]),
                                chain[1]));
    rep.items.push_back(eq_item("chain-sym-L3", evaluate_tpoly(ev, 'B', sym[2]),
                                chain[2]));
    auto rsym = eng.rank_chain(2);
    rep.items.push_back(eq_item("chain-sym-LR1",
                                evaluate_tpoly(ev, 'A', rsym[1]), rchain[1]));
    rep.items.push_back(eq_item("chain-sym-LR2",
                                evaluate_tpoly(ev, 'A', rsym[2]), rchain[2]));
  }

  rep.all_settled_pass = settled_pass(rep.items);
  return rep;
}

// ---- valuation certificates -------------------------------------------------------

const std::vector<std::pair<long, Z>>& omega_k1_polynomial() {
  static const std::vector<std::pair<long, Z>> poly = {
      {1, Z(1)}, {2, Z(-50)}, {3, Z(350)}, {4, Z(-875)}, {5, Z(625)}};
  return poly;
}

DetCheck check_d_determinant(const TPoly& L1, const TPoly& L3) {
  DetCheck r;
  Z l1 = L1.at({0, 0}), l3 = L3.at({0, 0});
  std::map<TKey, int> keys;
  for (const auto& [k, v] : L1) keys[k] = 1;
  for (const auto& [k, v] : L3) keys[k] = 1;
  r.pass = true;
  for (const auto& [k, dummy] : keys) {
    Z a = L1.count(k) ? L1.at(k) : Z(0);
    Z b = L3.count(k) ? L3.at(k) : Z(0);
    Z d = l1 * b - l3 * a;
    if (sgn(d) == 0) continue;
    ++r.terms;
    if (padic_order(d, 7) < 1 + k.second) r.pass = false;
  }
  return r;
}

// solve f = base * poly(t) exactly on the whole available window
static std::vector<Q> omega_solve(const ZSeries& f, const ZSeries& base,
                                  const ZSeries& tw, int deg) {
  QSeries D = to_rational(f).mul(to_rational(base).invert());
  std::vector<QSeries> span;
  QSeries cur = to_rational(tw);
  long hi = std::min(D.prec, cur.prec);
  long lo = std::min(D.min_exp, cur.min_exp);
  for (int k = 1; k <= deg; ++k) {
    span.push_back(cur.cut(hi));
    if (k < deg) cur = cur.mul(to_rational(tw));
    hi = std::min(hi, cur.prec);
  }
  for (auto& s : span) s = s.cut(hi);
  return express_in_span(span, D.cut(hi), lo, hi - 1);
}

ValuationReport certify_valuations(TBasisEngine& eng, bool include_omega,
                                   long omega_prec) {
  ValuationReport rep;
  auto add = [&](CheckItem it) { rep.items.push_back(std::move(it)); };

  auto cr = eng.crank_chain(4);
  auto rk = eng.rank_chain(2);

  {  // base of the crank chain against the parity progression, exactly
    RelCtx& ctx = *eng.ctx;
    ZSeries lhs = evaluate_tpoly(ctx, 'B', cr[0]);
    long W = std::min<long>(lhs.prec, 820);
    CoeffStream beta = gen_beta(7 * W + 8);
    ZSeries s = ZSeries::zero(W, 0);
    for (long n = 0; n < W; ++n) s.set(n, beta.coeff(7 * n + 5));
    add(eq_item("crank-L1-exact", lhs.cut(W),
                jquot({{14, 2}, {7, -3}}, W, 1).mul(s)));
  }

  auto prof_item = [&](const std::string& name, const TPoly& L,
                       ProfileKind kind) {
    ProfileResult pr = check_profile(L, kind);
    CheckItem it;
    it.name = name;
    it.pass = pr.pass;
    it.checked_to = (long)L.size();
    it.note = pr.note;
    add(std::move(it));
  };
  prof_item("crank-L2-profile", cr[1], ProfileKind::crank_even);
  prof_item("crank-L3-profile", cr[2], ProfileKind::crank_odd);
  prof_item("crank-L4-profile", cr[3], ProfileKind::crank_even);
  prof_item("rank-LR1-profile", rk[1], ProfileKind::rank_xb);
  prof_item("rank-LR2-profile", rk[2], ProfileKind::rank_7xa);

  {
    DetCheck det = check_d_determinant(cr[0], cr[2]);
    CheckItem it;
    it.name = "crank-D-determinant";
    it.pass = det.pass;
    it.checked_to = det.terms;
    it.note = "7-adic order of every 2x2 determinant against the chain base "
              "meets the 1+n floor";
    add(std::move(it));
  }

  for (int a = 1; a <= 2; ++a) {
    CheckItem it;
    it.name = "crank-K" + std::to_string(a);
    try {
      KExtraction k = chain_K(eng, a);
      it.pass = true;
      it.note = "K_" + std::to_string(a) + " = " + std::to_string(k.K) +
                " (mod " + std::to_string(k.modulus) + ")";
    } catch (const std::exception& e) {
      it.pass = false;
      it.note = e.what();
    }
    add(std::move(it));
  }

  if (include_omega) {
    auto K = omega_qchain(omega_prec, 3);
    long w1 = K[1].prec, w2 = K[2].prec, w3 = K[3].prec;
    ZSeries tw = omega_t(w1 + 4);
    ZSeries pb = omega_Pb(w1 + 6);

    std::vector<Q> k1;
    {
      CheckItem it;
      it.name = "omega-K1-decomposition";
      try {
        k1 = omega_solve(K[1], pb.shift(-1), tw, 5);
        bool match = true;
        for (const auto& [k, c] : omega_k1_polynomial())
          if (k1[k - 1] != Q(c)) match = false;
        it.pass = match;
        it.checked_to = w1;
        it.note = match ? "exact degree-5 polynomial in the hauptmodul over "
                          "the normalized base"
                        : "polynomial found but with unexpected coefficients";
      } catch (const std::exception& e) {
        it.pass = false;
        it.note = e.what();
      }
      add(std::move(it));
    }
    {
      CheckItem it;
      it.name = "omega-K1-printed-normalization";
      it.flagged = true;
      try {
        omega_solve(K[1], pb, tw, 5);
        it.pass = true;
        it.note = "published base normalization unexpectedly works";
      } catch (const std::exception&) {
        it.pass = false;
        it.note = "over the base as published the quotient is not a "
                  "polynomial; one extra factor q in the base repairs it";
      }
      add(std::move(it));
    }
    {
      CheckItem it;
      it.name = "omega-K1-support-printed";
      it.flagged = true;
      it.pass = !k1.empty() && sgn(k1[0]) == 0;
      it.note = "published support starts at the square of the hauptmodul; "
                "the computed polynomial has a unit linear term";
      add(std::move(it));
    }
    {
      CheckItem it;
      it.name = "omega-K1-profile";
      it.pass = !k1.empty();
      for (size_t i = 1; i < k1.size(); ++i) {
        long kk = (long)i + 1;
        if (sgn(k1[i]) == 0) continue;
        if (padic_order(k1[i].get_num(), 5) < 1 + floor_div(3 * kk - 6, 4))
          it.pass = false;
      }
      it.note = "5-adic floors 1 + floor((3k-6)/4) on the terms from k = 2 on";
      add(std::move(it));
    }

    {
      CheckItem it;
      it.name = "omega-K2-decomposition";
      try {
        std::vector<Q> k2 =
            omega_solve(K[2], K[0].cut(w2 + 6), tw.cut(w2 + 4), 25);
        long deg = 0;
        bool prof = true;
        for (size_t i = 0; i < k2.size(); ++i) {
          if (sgn(k2[i]) == 0) continue;
          long kk = (long)i + 1;
          deg = kk;
          if (padic_order(k2[i].get_num(), 5) < 1 + floor_div(3 * kk - 3, 4))
            prof = false;
        }
        it.pass = (deg == 25);
        it.checked_to = w2;
        it.note = "exact polynomial of degree " + std::to_string(deg) +
                  (prof ? "; 5-adic floors 1 + floor((3k-3)/4) hold"
                        : "; 5-adic floor violated");
        if (!prof) it.pass = false;
      } catch (const std::exception& e) {
        it.pass = false;
        it.note = e.what();
      }
      add(std::move(it));
    }
    {
      CheckItem it;
      it.name = "omega-K3-not-polynomial";
      try {
        omega_solve(K[3], pb.shift(-1).cut(w3 + 6), tw.cut(w3 + 4), 40);
        it.pass = false;
        it.note = "unexpectedly expressible as a polynomial of degree <= 40";
      } catch (const std::runtime_error&) {
        it.pass = true;
        it.checked_to = w3;
        it.note = "no polynomial of degree <= 40 over the normalized base; "
                  "the third chain element leaves the polynomial ring";
      }
      add(std::move(it));
    }
  }

  rep.all_settled_pass = settled_pass(rep.items);
  return rep;
}

// ---- theorem instance checks ----------------------------------------------------

std::string TheoremReport::to_json(bool include_wall) const {
  ordered_json j;
  j["name"] = name;
  j["alpha"] = alpha;
  j["modulus"] = mpz_fits_slong_p(modulus.get_mpz_t())
                     ? ordered_json((long)modulus.get_si())
                     : ordered_json(modulus.get_str());
  j["instances_checked"] = instances_checked;
  j["failures"] = failures;
  if (K >= 0)
    j["K"] = K;
  else
    j["K"] = nullptr;
  j["precision_used"] = precision_used;
  if (include_wall) j["wall_time"] = wall_time;
  j["note"] = note;
  j["pass"] = pass;
  return j.dump(2);
}

static Z powl(long b, long e) {
  Z r;
  mpz_ui_pow_ui(r.get_mpz_t(), (unsigned long)b, (unsigned long)e);
  return r;
}

TheoremReport verify_theorem(const std::string& name, long alpha, long nmax) {
  auto t0 = std::chrono::steady_clock::now();
  TheoremReport rep;
  rep.name = name;
  rep.alpha = alpha;

  auto congr = [&](const CoeffStream& st, long step_hi, const Z& d_hi,
                   long step_lo, const Z& d_lo, int sign, const Z& mod) {
    long fails = 0;
    for (long n = 0; n <= nmax; ++n) {
      Z v = st.coeff(step_hi * n + d_hi.get_si()) +
            sign * st.coeff(step_lo * n + d_lo.get_si());
      ++rep.instances_checked;
      if (!mpz_divisible_p(v.get_mpz_t(), mod.get_mpz_t())) ++fails;
    }
    return fails;
  };

  if (name == "thm1.1") {
    if (alpha < 1) throw std::invalid_argument("thm1.1 needs alpha >= 1");
    Z M = powl(5, 2 * alpha + 1);
    Z inv24;
    mpz_invert(inv24.get_mpz_t(), Z(24).get_mpz_t(), M.get_mpz_t());
    rep.modulus = powl(5, alpha + 1);
    CoeffStream beta = gen_beta(nmax + 1);
    rep.precision_used = beta.prec();
    for (Z n = inv24; n <= nmax; n += M) {
      ++rep.instances_checked;
      Z v = beta.coeff(n.get_si());
      if (!mpz_divisible_p(v.get_mpz_t(), rep.modulus.get_mpz_t()))
        ++rep.failures;
    }
    rep.note = "parity stream vanishes to the stated depth on the arithmetic "
               "progression";
  } else if (name == "thm1.2") {
    if (alpha < 1 || alpha > 2)
      throw std::invalid_argument("thm1.2 supported for alpha = 1, 2");
    long step = (alpha == 1) ? 7 : 49;
    long delta = delta_rank(7, alpha).get_si();
    long mmax = delta + step * (nmax - 1);
    CoeffStream beta = gen_beta(49 * mmax - 2 + 8);
    rep.precision_used = beta.prec();
    KEstimate est = estimate_K(beta, (int)alpha, nmax);
    rep.modulus = est.modulus;
    rep.instances_checked = est.instances_checked;
    rep.failures = est.failures;
    rep.K = est.K;
    rep.note = est.conclusive
                   ? "multiplier fixed by the first unit instance, then "
                     "verified on every instance"
                   : "no unit instance found; inconclusive";
    rep.pass = est.conclusive && est.failures == 0;
    rep.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    return rep;
  } else if (name == "thm1.3" || name == "thm1.4") {
    long p = (name == "thm1.3") ? 5 : 7;
    int sign = (name == "thm1.3") ? 1 : -1;
    if (alpha < 2) throw std::invalid_argument(name + " needs alpha >= 2");
    rep.modulus = powl(p, (name == "thm1.3") ? alpha / 2 : (alpha - 1) / 2);
    Z dhi = delta_rank(p, alpha);
    Z dlo = (alpha >= 3) ? delta_rank(p, alpha - 2) : Z(0);
    long shi = powl(p, alpha).get_si();
    long slo = powl(p, alpha - 2).get_si();
    CoeffStream af = gen_af(shi * nmax + dhi.get_si() + 8);
    rep.precision_used = af.prec();
    rep.failures = congr(af, shi, dhi, slo, dlo, sign, rep.modulus);
    rep.note = (name == "thm1.3")
                   ? "sum congruence on the 5-power progressions"
                   : "difference congruence on the 7-power progressions";
  } else if (name == "thm1.5i" || name == "thm1.5ii") {
    long p = (name == "thm1.5i") ? 5 : 7;
    int sign = (name == "thm1.5i") ? 1 : -1;
    if (alpha < 2) throw std::invalid_argument(name + " needs alpha >= 2");
    rep.modulus = powl(p, (name == "thm1.5i") ? alpha / 2 : (alpha - 1) / 2);
    Z dhi = delta_omega(p, alpha);
    Z dlo = (alpha >= 3) ? delta_omega(p, alpha - 2) : Z(0);
    long shi = powl(p, alpha).get_si();
    long slo = powl(p, alpha - 2).get_si();
    CoeffStream aw = gen_aomega(shi * nmax + dhi.get_si() + 8);
    rep.precision_used = aw.prec();
    rep.failures = congr(aw, shi, dhi, slo, dlo, sign, rep.modulus);
    if (name == "thm1.5ii") {
      long plus_fails = congr(aw, shi, dhi, slo, dlo, 1, rep.modulus);
      rep.instances_checked -= nmax + 1;  // the probe pass is not an instance
      rep.note = "verified with the difference; the published sum form fails "
                 "at " +
                 std::to_string(plus_fails) + " of " +
                 std::to_string(nmax + 1) + " indices";
    } else {
      rep.note = "sum congruence on the 5-power progressions";
    }
  } else {
    throw std::invalid_argument("unknown theorem name: " + name);
  }

  rep.pass = (rep.failures == 0) && rep.instances_checked > 0;
  rep.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

}  // namespace qv
