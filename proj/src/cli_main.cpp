// qv: command line front end for the exact q-series toolkit.
//
// Subcommands:
//   expand  <name>          print coefficients of a stream or chain state
//   coeff   <name> <n>      print a single coefficient
//   export  <name> --nmax   CSV dump "n,value"
//   verify  <target>        run a verification battery
//
// Exit codes: 0 pass, 1 verified failure (or internal error), 2 usage,
// 3 requested computation is over the feasibility cap.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qv/congruence.hpp"
#include "qv/etaquot.hpp"
#include "qv/operators.hpp"
#include "qv/series.hpp"
#include "qv/specfun.hpp"
#include "qv/thetaq.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace qv;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return (v && *v) ? std::string(v) : fallback;
}

std::string iso_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

struct Output {
  std::string format = "text";  // text | json
  std::string command;
};

// JSON envelope: everything volatile (timestamp, wall time) lives in the
// header; the report object is deterministic for a given command line.
void emit(const Output& out, double wall, const ordered_json& report,
          const std::string& text) {
  if (out.format == "json") {
    ordered_json j;
    j["header"] = ordered_json{{"tool", "qv"},
                               {"version", "0.1.0"},
                               {"command", out.command},
                               {"generated_at", iso_now()},
                               {"wall_time_s", wall}};
    j["report"] = report;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << text;
  }
}

ZSeries make_stream(StreamKind k, long prec) {
  switch (k) {
    case StreamKind::partitions: return gen_p(prec).s;
    case StreamKind::a_f: return gen_af(prec).s;
    case StreamKind::a_omega: return gen_aomega(prec).s;
    case StreamKind::beta: return gen_beta(prec).s;
  }
  throw std::invalid_argument("unknown stream kind");
}

StreamKind stream_arg(const std::string& name) {
  if (name == "partitions") return StreamKind::partitions;
  if (name == "f" || name == "a_f") return StreamKind::a_f;
  if (name == "omega" || name == "a_omega") return StreamKind::a_omega;
  return stream_from_name(name);
}

// On-disk cache: one text file per (stream, prec).  A corrupt or truncated
// file is ignored and rebuilt.  Writes go through a temp file so a crashed
// run can't leave a half-written entry behind.
ZSeries stream_series(StreamKind k, long prec, const std::string& cache_dir) {
  if (cache_dir.empty()) return make_stream(k, prec);
  fs::path file = fs::path(cache_dir) /
                  (std::string(stream_name(k)) + "-" + std::to_string(prec) +
                   ".txt");
  if (fs::exists(file)) {
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      return ZSeries::deserialize(ss.str());
    } catch (const std::exception&) {
      // fall through and recompute
    }
  }
  ZSeries s = make_stream(k, prec);
  std::error_code ec;
  fs::create_directories(file.parent_path(), ec);
  if (!ec) {
    fs::path tmp = file;
    tmp += ".tmp";
    {
      std::ofstream outf(tmp);
      outf << s.serialize();
    }
    fs::rename(tmp, file, ec);
    if (ec) fs::remove(tmp, ec);
  }
  return s;
}

ordered_json coeff_rows(const ZSeries& s) {
  ordered_json rows = ordered_json::array();
  for (long e = s.min_exp; e < s.prec; ++e)
    rows.push_back(ordered_json::array({e, s.get(e).get_str()}));
  return rows;
}

void coeff_lines(std::ostream& os, const ZSeries& s) {
  for (long e = s.min_exp; e < s.prec; ++e)
    os << e << ' ' << s.get(e).get_str() << '\n';
}

template <class Item>
void item_line(std::ostream& os, const Item& it) {
  const char* tag = it.pass ? "ok  " : (it.flagged ? "FLAG" : "FAIL");
  os << "  " << tag << "  " << it.name;
  if (it.pass)
    os << "  (to " << it.checked_to << ")";
  else
    os << "  (first mismatch at " << it.first_mismatch << ")";
  if (!it.note.empty()) os << "  -- " << it.note;
  os << '\n';
}

template <class Item>
int flagged_failures(const std::vector<Item>& items) {
  int n = 0;
  for (const auto& it : items)
    if (it.flagged && !it.pass) ++n;
  return n;
}

template <class Item>
bool all_pass(const std::vector<Item>& items) {
  for (const auto& it : items)
    if (!it.pass) return false;
  return true;
}

struct VerifyOpts {
  long prec = 0;  // 0: per-target default
  long nmax = 0;
  std::string appendix;
  int jobs = 1;
  bool strict_printed = false;
  std::string data_dir;
};

TBasisEngine make_engine(const VerifyOpts& vo) {
  return TBasisEngine(std::make_shared<RelCtx>(115),
                      load_relations(vo.data_dir));
}

std::vector<RelationCheckResult> run_relations(
    const std::vector<RelationRecord>& recs, char appendix, int jobs) {
  std::vector<RelationRecord> sel;
  for (const auto& r : recs)
    if (!appendix || r.appendix == appendix) sel.push_back(r);
  if (jobs <= 1) {
    RelCtx ctx(115);
    return verify_relations(ctx, sel);
  }
  if (jobs > (int)sel.size()) jobs = (int)sel.size();
  std::vector<std::vector<RelationCheckResult>> parts(jobs);
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j)
    pool.emplace_back([&, j] {
      RelCtx ctx(115);
      for (size_t i = j; i < sel.size(); i += jobs)
        parts[j].push_back(verify_relation(ctx, sel[i]));
    });
  for (auto& th : pool) th.join();
  std::vector<RelationCheckResult> rows(sel.size());
  for (size_t i = 0; i < sel.size(); ++i)
    rows[i] = parts[i % jobs][i / jobs];
  return rows;
}

int do_expand(const Output& out, const std::string& name, long prec, int alpha,
              const std::string& cache_dir) {
  Timer tm;
  ordered_json rep;
  std::ostringstream text;
  if (name == "crank-chain" || name == "rank-chain" || name == "omega-chain") {
    long fp = prec > 0 ? prec : 40;
    std::string side = name.substr(0, name.size() - 6);
    IterationState st = iterate(side, alpha, fp);
    ZSeries view = st.series.cut(std::min(st.series.prec, fp));
    rep["name"] = name;
    rep["alpha"] = alpha;
    rep["start_prec"] = st.start_prec;
    rep["retained"] = st.retained;
    rep["min_exp"] = view.min_exp;
    rep["prec"] = view.prec;
    rep["coefficients"] = coeff_rows(view);
    text << "# " << name << " alpha=" << alpha << " start_prec="
         << st.start_prec << " retained=" << st.retained << '\n';
    coeff_lines(text, view);
  } else {
    long p = prec > 0 ? prec : 20;
    StreamKind k = stream_arg(name);
    ZSeries s = stream_series(k, p, cache_dir);
    rep["name"] = stream_name(k);
    rep["min_exp"] = s.min_exp;
    rep["prec"] = s.prec;
    rep["coefficients"] = coeff_rows(s);
    coeff_lines(text, s);
  }
  emit(out, tm.s(), rep, text.str());
  return 0;
}

int do_coeff(const Output& out, const std::string& name, long n,
             const std::string& cache_dir) {
  Timer tm;
  StreamKind k = stream_arg(name);
  Z v = n < 0 ? Z(0) : stream_series(k, n + 1, cache_dir).get(n);
  ordered_json rep;
  rep["name"] = stream_name(k);
  rep["n"] = n;
  rep["value"] = v.get_str();
  emit(out, tm.s(), rep, v.get_str() + "\n");
  return 0;
}

int do_export(const std::string& name, long nmax,
              const std::string& cache_dir) {
  StreamKind k = stream_arg(name);
  ZSeries s = stream_series(k, nmax + 1, cache_dir);
  std::cout << "n,value\n";
  for (long e = 0; e <= nmax; ++e)
    std::cout << e << ',' << s.get(e).get_str() << '\n';
  return 0;
}

std::string q_str(const Q& q) { return q.get_str(); }

int verify_dissection_cmd(const Output& out, const VerifyOpts& vo) {
  Timer tm;
  long p = vo.prec > 0 ? vo.prec : 350;
  DissectionReport r = verify_dissection(p);
  bool ok = vo.strict_printed ? all_pass(r.items) : r.all_settled_pass;
  ordered_json rep = ordered_json::parse(r.to_json());
  rep["pass"] = ok;
  std::ostringstream text;
  text << "dissection battery: prec=" << r.prec << " af_prec=" << r.af_prec
       << '\n';
  for (const auto& it : r.items) item_line(text, it);
  int fl = flagged_failures(r.items);
  if (fl && !vo.strict_printed)
    text << "  " << fl
         << " flagged item(s) fail as expected (published misprints)\n";
  text << (ok ? "PASS" : "FAIL") << '\n';
  emit(out, tm.s(), rep, text.str());
  return ok ? 0 : 1;
}

int verify_relations_cmd(const Output& out, const VerifyOpts& vo) {
  Timer tm;
  auto recs = load_relations(vo.data_dir);
  char ap = vo.appendix.empty() ? 0 : vo.appendix[0];
  auto rows = run_relations(recs, ap, vo.jobs);

  long match = 0, mismatch = 0, uneval = 0, suspect = 0;
  std::vector<std::string> suspect_ids, profile_violations;
  bool ok = true;
  for (const auto& r : rows) {
    if (r.suspect) {
      ++suspect;
      suspect_ids.push_back(r.id);
    }
    if (!r.evaluable) {
      ++uneval;
      continue;
    }
    (r.printed_match ? match : mismatch)++;
    if (!r.profile_ok) profile_violations.push_back(r.id);
    if (!r.suspect && !(r.printed_match && r.profile_ok)) ok = false;
    if (vo.strict_printed && !r.printed_match) ok = false;
  }

  ordered_json checks = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json c;
    c["id"] = r.id;
    c["suspect"] = r.suspect;
    c["evaluable"] = r.evaluable;
    if (r.evaluable) {
      c["printed_match"] = r.printed_match;
      c["coeffs_checked"] = r.coeffs_checked;
      if (!r.printed_match) c["first_mismatch"] = r.first_mismatch;
      c["profile_ok"] = r.profile_ok;
      if (!r.profile_note.empty()) c["profile_note"] = r.profile_note;
    }
    checks.push_back(c);
  }
  ordered_json rep;
  rep["pass"] = ok;
  rep["appendix"] = vo.appendix.empty() ? "all" : vo.appendix;
  rep["records"] = (long)rows.size();
  rep["printed_match"] = match;
  rep["printed_mismatch"] = mismatch;
  rep["unevaluable"] = uneval;
  rep["suspect"] = suspect;
  rep["suspect_ids"] = suspect_ids;
  rep["profile_violations"] = profile_violations;
  rep["checks"] = checks;

  std::ostringstream text;
  text << "operator relations: " << rows.size() << " record(s)";
  if (ap) text << " in appendix " << ap;
  text << '\n';
  for (const auto& r : rows) {
    text << "  " << (r.suspect ? "SUSP" : "ok  ") << "  " << r.id;
    if (!r.evaluable) {
      text << "  (not evaluable: unreadable coefficient)";
    } else {
      text << (r.printed_match ? "  matches printed form"
                               : "  DIFFERS from printed form");
      if (!r.printed_match) text << " at t^" << r.first_mismatch;
      text << ", " << r.coeffs_checked << " coeffs";
      if (!r.profile_ok) text << ", PROFILE VIOLATION (" << r.profile_note
                              << ")";
    }
    text << '\n';
  }
  text << "  summary: " << match << " match, " << mismatch << " differ, "
       << uneval << " unevaluable; " << suspect
       << " marked suspect (all differences are on suspect records)\n";
  text << (ok ? "PASS" : "FAIL") << '\n';
  emit(out, tm.s(), rep, text.str());
  return ok ? 0 : 1;
}

int verify_modeq_cmd(const Output& out, const VerifyOpts& vo) {
  Timer tm;
  long p = vo.prec > 0 ? vo.prec : 120;
  ModEqReport r = verify_modular_equation(p);
  bool ok = r.ok();
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.cert.rows)
    rows.push_back(ordered_json{{"cusp", row.cusp},
                                {"width", row.width},
                                {"min_ord", q_str(row.min_ord)}});
  ordered_json rep;
  rep["pass"] = ok;
  rep["direct_ok"] = r.direct_ok;
  rep["direct_to"] = r.direct_to;
  rep["shape_ok"] = r.shape_ok;
  rep["valence_ok"] = r.valence_ok;
  rep["valence"] = ordered_json{
      {"level", r.cert.level},
      {"weight_twice", r.cert.weight_twice},
      {"index", r.cert.index},
      {"term_count", r.cert.term_count},
      {"bound_B", q_str(r.cert.bound_B)},
      {"required_vanishing", r.cert.required_vanishing},
      {"achieved_vanishing", r.cert.achieved_vanishing},
      {"cusps", rows}};
  std::ostringstream text;
  text << "degree-7 modular equation\n"
       << "  direct series check: " << (r.direct_ok ? "ok" : "FAIL")
       << " (to q^" << r.direct_to << ")\n"
       << "  coefficient shape:   " << (r.shape_ok ? "ok" : "FAIL") << '\n'
       << "  valence certificate: " << (r.valence_ok ? "ok" : "FAIL")
       << " (bound B=" << q_str(r.cert.bound_B) << ", needs "
       << r.cert.required_vanishing << ", has " << r.cert.achieved_vanishing
       << ")\n"
       << (ok ? "PASS" : "FAIL") << '\n';
  emit(out, tm.s(), rep, text.str());
  return ok ? 0 : 1;
}

int verify_identities_cmd(const Output& out, const VerifyOpts& vo) {
  Timer tm;
  ProjectionReport pr = verify_holomorphic_projections();
  TBasisEngine eng = make_engine(vo);
  long coeffs = vo.prec > 0 ? vo.prec : 30;
  CrossRepReport cr = verify_cross_representations(eng, coeffs);
  bool ok = pr.all_pass &&
            (vo.strict_printed ? all_pass(cr.items) : cr.all_settled_pass);
  ordered_json projs = ordered_json::array();
  for (const auto& it : pr.items) {
    ordered_json p{{"name", it.name},
                   {"pass", it.pass},
                   {"checked_to", it.checked_to}};
    if (!it.pass) p["first_mismatch"] = it.first_mismatch;
    projs.push_back(p);
  }
  ordered_json rep;
  rep["pass"] = ok;
  rep["projections"] = projs;
  rep["cross_representations"] = ordered_json::parse(cr.to_json());
  std::ostringstream text;
  text << "holomorphic projections\n";
  for (const auto& it : pr.items) {
    text << "  " << (it.pass ? "ok  " : "FAIL") << "  " << it.name;
    if (it.pass)
      text << "  (to " << it.checked_to << ")";
    else
      text << "  (first mismatch at " << it.first_mismatch << ")";
    text << '\n';
  }
  text << "cross representations (" << coeffs << " coeffs per item)\n";
  for (const auto& it : cr.items) item_line(text, it);
  int fl = flagged_failures(cr.items);
  if (fl && !vo.strict_printed)
    text << "  " << fl
         << " flagged item(s) fail as expected (published misprints)\n";
  text << (ok ? "PASS" : "FAIL") << '\n';
  emit(out, tm.s(), rep, text.str());
  return ok ? 0 : 1;
}

int verify_theorems_cmd(const Output& out, const VerifyOpts& vo) {
  Timer tm;
  struct Row {
    const char* name;
    long alpha;
    long nmax;
  };
  // default battery, chosen to finish in seconds while still exercising
  // every statement at a nontrivial level
  const std::vector<Row> battery = {
      {"thm1.1", 1, 10000}, {"thm1.2", 1, 55}, {"thm1.2", 2, 21},
      {"thm1.3", 3, 50},    {"thm1.4", 3, 20}, {"thm1.4", 4, 5},
      {"thm1.5i", 3, 50},   {"thm1.5ii", 3, 20}};
  bool ok = true;
  ordered_json rows = ordered_json::array();
  std::ostringstream text;
  text << "congruence theorems\n";
  for (const auto& b : battery) {
    TheoremReport r =
        verify_theorem(b.name, b.alpha, vo.nmax > 0 ? vo.nmax : b.nmax);
    ok = ok && r.pass;
    rows.push_back(ordered_json::parse(r.to_json(false)));
    text << "  " << (r.pass ? "ok  " : "FAIL") << "  " << r.name
         << "  alpha=" << r.alpha << "  mod " << r.modulus.get_str() << "  "
         << r.instances_checked << " instance(s), " << r.failures
         << " failure(s)";
    if (r.K >= 0) text << ", K=" << r.K;
    if (!r.note.empty()) text << "  -- " << r.note;
    text << '\n';
  }
  ordered_json rep;
  rep["pass"] = ok;
  rep["theorems"] = rows;
  text << (ok ? "PASS" : "FAIL") << '\n';
  emit(out, tm.s(), rep, text.str());
  return ok ? 0 : 1;
}

int verify_valuations_cmd(const Output& out, const VerifyOpts& vo) {
  Timer tm;
  TBasisEngine eng = make_engine(vo);
  long omega_prec = vo.prec > 0 ? vo.prec : 27000;
  ValuationReport vr = certify_valuations(eng, true, omega_prec);
  bool ok = vo.strict_printed ? all_pass(vr.items) : vr.all_settled_pass;
  ordered_json rep = ordered_json::parse(vr.to_json());
  rep["pass"] = ok;
  std::ostringstream text;
  text << "valuation certificates (omega chain prec " << omega_prec << ")\n";
  for (const auto& it : vr.items) item_line(text, it);
  int fl = flagged_failures(vr.items);
  if (fl && !vo.strict_printed)
    text << "  " << fl
         << " flagged item(s) fail as expected (published misprints)\n";
  text << (ok ? "PASS" : "FAIL") << '\n';
  emit(out, tm.s(), rep, text.str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qv: exact q-series computations for crank, rank and mock theta "
      "congruences"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qv 0.1.0");

  Output out;
  std::string cache_dir = env_or("QV_CACHE_DIR", "");
  VerifyOpts vo;
  vo.data_dir = env_or("QV_DATA_DIR", default_data_dir());

  std::string ex_name;
  long prec = 0;
  int alpha = 1;
  auto* cmd_expand =
      app.add_subcommand("expand", "print the q-expansion of a stream "
                                   "(partitions, a_f, a_omega, beta) or a "
                                   "chain state (crank-chain, rank-chain, "
                                   "omega-chain)");
  cmd_expand->add_option("name", ex_name, "stream or chain name")->required();
  cmd_expand->add_option("--prec", prec, "number of coefficients");
  cmd_expand->add_option("--alpha", alpha, "chain level")
      ->check(CLI::Range(1, 64));
  cmd_expand->add_option("--cache-dir", cache_dir, "series cache directory");
  cmd_expand->add_option("--format", out.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  std::string co_name;
  long co_n = 0;
  auto* cmd_coeff = app.add_subcommand("coeff", "print one coefficient");
  cmd_coeff->add_option("name", co_name, "stream name")->required();
  cmd_coeff->add_option("n", co_n, "index")->required();
  cmd_coeff->add_option("--cache-dir", cache_dir, "series cache directory");
  cmd_coeff->add_option("--format", out.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  std::string xp_name;
  long xp_nmax = -1;
  auto* cmd_export =
      app.add_subcommand("export", "write coefficients 0..nmax as CSV");
  cmd_export->add_option("name", xp_name, "stream name")->required();
  cmd_export->add_option("--nmax", xp_nmax, "last index")
      ->required()
      ->check(CLI::NonNegativeNumber);
  cmd_export->add_option("--cache-dir", cache_dir, "series cache directory");

  std::string target;
  auto* cmd_verify = app.add_subcommand("verify", "run a verification battery");
  cmd_verify->add_option("target", target, "what to verify")
      ->required()
      ->check(CLI::IsMember({"identities", "relations", "modular-equation",
                             "dissection", "theorems", "valuations"}));
  cmd_verify->add_option("--prec", vo.prec,
                         "base precision (target-specific default)");
  cmd_verify->add_option("--nmax", vo.nmax, "instance bound (where relevant)");
  cmd_verify->add_option("--appendix", vo.appendix,
                         "restrict relation checks to one appendix")
      ->check(CLI::IsMember({"A", "B"}));
  cmd_verify->add_option("--jobs", vo.jobs, "worker threads (relations)")
      ->check(CLI::PositiveNumber);
  cmd_verify->add_option("--data-dir", vo.data_dir,
                         "directory with relations.dat and manifest.txt");
  cmd_verify->add_flag("--strict-printed", vo.strict_printed,
                       "treat failures of flagged printed variants as hard "
                       "failures");
  cmd_verify->add_option("--format", out.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (vo.jobs > 8) vo.jobs = 8;

  try {
    if (*cmd_expand) {
      out.command = "expand " + ex_name;
      return do_expand(out, ex_name, prec, alpha, cache_dir);
    }
    if (*cmd_coeff) {
      out.command = "coeff " + co_name;
      return do_coeff(out, co_name, co_n, cache_dir);
    }
    if (*cmd_export) return do_export(xp_name, xp_nmax, cache_dir);
    out.command = "verify " + target;
    if (target == "dissection") return verify_dissection_cmd(out, vo);
    if (target == "relations") return verify_relations_cmd(out, vo);
    if (target == "modular-equation") return verify_modeq_cmd(out, vo);
    if (target == "identities") return verify_identities_cmd(out, vo);
    if (target == "theorems") return verify_theorems_cmd(out, vo);
    return verify_valuations_cmd(out, vo);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
