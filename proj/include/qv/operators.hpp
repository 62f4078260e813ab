#pragma once
// The four U-type operators on the t-basis, the tabulated fundamental
// relations they satisfy, and the series checks that certify each table
// line: printed right-hand side against a direct expansion, 7-adic
// valuation bounds on every term, and the degree-7 modular equation with
// a valence certificate.

#include <map>
#include <string>
#include <vector>

#include "qv/etaquot.hpp"
#include "qv/series.hpp"

namespace qv {

uint64_t fnv1a64(const std::string& bytes);

// U_7 composed with multiplication by a fixed theta quotient
struct UOperator {
  std::string name;          // UA, UB, U1, U0
  std::map<long, long> mult; // eta-style exponent map of the multiplier
  long qshift = 0;           // power of q in front of the multiplier
};
const std::vector<UOperator>& u_operators();
const UOperator& u_operator(const std::string& name);

// one line of the published relation tables
struct RelationRecord {
  struct Term {
    std::string basis;      // 1, p0, p1
    long tpow = 0;
    Z coeff = 0;
    long pow7 = 0;
    bool unreadable = false;  // coefficient printed as '?'
  };
  char appendix = 'A';      // A: rank parity side, B: crank parity side
  std::string group;        // I..VI
  std::string op;           // UA, UB, U1, U0
  std::string input_basis;  // 1, p0, p1
  long input_tpow = 0;
  std::vector<Term> terms;
  bool suspect = false;

  std::string id() const;   // e.g. "A-I U_A(t^-2)"
  bool evaluable() const;   // false when any coefficient is unreadable
};

// Loads data/relations.dat and verifies its checksum against manifest.txt.
std::string default_data_dir();
std::vector<RelationRecord> load_relations(const std::string& dir = default_data_dir());

// Shared expansion context: the hauptmodul t, its inverse, the two basis
// functions of each appendix, and memoized powers of t, all at q-precision
// high enough to read P coefficients after one U_7.
struct RelCtx {
  long P;   // coefficients retained after applying an operator
  long PQ;  // working q-precision
  ZSeries t, ti, p0, p1r, p1c;

  explicit RelCtx(long tprec = 115);
  const ZSeries& tpow(long k);
  ZSeries basis_series(char appendix, const std::string& name);
  ZSeries input_series(const RelationRecord& rec);
  ZSeries apply_op(const std::string& op, const ZSeries& f);

 private:
  std::map<long, ZSeries> tpow_;
};

// minimal t-power and 7-adic valuation floor for a term with basis b and
// t-power n on the right-hand side of op applied to u*t^k
std::pair<long, long> profile_bounds(const std::string& op,
                                     const std::string& u, long k,
                                     const std::string& b, long n);

struct RelationCheckResult {
  std::string id;
  bool suspect = false;
  bool evaluable = true;
  bool printed_match = false;
  long coeffs_checked = 0;
  long first_mismatch = 0;  // valid when evaluable and not printed_match
  bool profile_ok = false;
  std::string profile_note;
};

RelationCheckResult verify_relation(RelCtx& ctx, const RelationRecord& rec);
std::vector<RelationCheckResult> verify_relations(
    RelCtx& ctx, const std::vector<RelationRecord>& recs, char appendix = 0);

// a_j coefficient polynomials of the degree-7 modular equation
struct AjEntry {
  long l;  // power of t(7tau)
  Z c;
  long e;  // power of 7
};
const std::map<int, std::vector<AjEntry>>& aj_table();

struct ModEqReport {
  bool direct_ok = false;
  long direct_to = 0;
  bool shape_ok = false;
  bool valence_ok = false;
  ValenceCertificate cert;
  bool ok() const { return direct_ok && shape_ok && valence_ok; }
};
ModEqReport verify_modular_equation(long direct_prec = 120);

// closed forms for the three holomorphic projections used downstream
struct ProjectionReport {
  struct Item {
    std::string name;
    bool pass = false;
    long checked_to = 0;
    long first_mismatch = 0;
  };
  std::vector<Item> items;
  bool all_pass = false;
  const Item* find(const std::string& name) const;
};
ProjectionReport verify_holomorphic_projections(long prec_f5 = 500,
                                                long prec_f7 = 500,
                                                long prec_w = 300);

}  // namespace qv
