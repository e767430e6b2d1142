#pragma once

// Test-only reference implementations. Nothing here calls the library's
// evaluator or engine: formulas are walked directly and equivalence is
// decided by plain brute force, so the library is checked against an
// independent computation.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "reqeq/ir.hpp"

namespace oracle {

using reqeq::Atom;
using reqeq::AtomKind;
using reqeq::CmpOp;
using reqeq::Formula;
using reqeq::FormulaKind;

/// One binding per variable: booleans as 0/1, numerics as integers, enums by
/// value name.
struct Env {
  std::map<std::string, std::int64_t> num;  // bool and numeric variables
  std::map<std::string, std::string> sym;   // enum variables
};

inline bool cmp(std::int64_t l, CmpOp op, std::int64_t r) {
  if (op == CmpOp::Lt) return l < r;
  if (op == CmpOp::Le) return l <= r;
  if (op == CmpOp::Eq) return l == r;
  if (op == CmpOp::Ge) return l >= r;
  if (op == CmpOp::Gt) return l > r;
  return l != r;
}

inline bool eval(const Formula& f, const Env& env) {
  if (f.is_atom()) {
    const Atom& a = f.atom_value();
    if (a.kind == AtomKind::BoolVar) return env.num.at(a.var) != 0;
    if (a.kind == AtomKind::EnumEq) return env.sym.at(a.var) == a.value;
    const std::int64_t rhs = a.rhs_is_constant() ? a.rhs_constant() : env.num.at(a.rhs_variable());
    return cmp(env.num.at(a.var), a.op, rhs);
  }
  const auto& kids = f.children();
  if (f.kind() == FormulaKind::Not) return !eval(kids[0], env);
  if (f.kind() == FormulaKind::And)
    return std::all_of(kids.begin(), kids.end(), [&](const Formula& c) { return eval(c, env); });
  if (f.kind() == FormulaKind::Or)
    return std::any_of(kids.begin(), kids.end(), [&](const Formula& c) { return eval(c, env); });
  const bool l = eval(kids[0], env);
  const bool r = eval(kids[1], env);
  if (f.kind() == FormulaKind::Implies) return !l || r;
  return l == r;
}

inline reqeq::Assignment to_assignment(const Env& env, const reqeq::Signature& sig) {
  reqeq::Assignment out;
  for (const auto& d : sig.decls()) {
    if (d.sort.is_bool()) out.emplace(d.name, reqeq::Value::boolean(env.num.at(d.name) != 0));
    else if (d.sort.is_numeric()) out.emplace(d.name, reqeq::Value::integer(env.num.at(d.name)));
    else out.emplace(d.name, reqeq::Value::enumerated(env.sym.at(d.name)));
  }
  return out;
}

inline Env from_assignment(const reqeq::Assignment& a) {
  Env env;
  for (const auto& [name, v] : a) {
    if (v.kind() == reqeq::SortKind::Enum) env.sym[name] = v.as_enum();
    else if (v.kind() == reqeq::SortKind::Bool) env.num[name] = v.as_bool() ? 1 : 0;
    else env.num[name] = v.as_int();
  }
  return env;
}

/// Integer constants appearing in numeric comparisons of either formula.
inline std::set<std::int64_t> constants(const Formula& a, const Formula& b) {
  std::set<std::int64_t> k;
  for (const Formula* f : {&a, &b})
    reqeq::for_each_atom(*f, [&](const Atom& at) {
      if (at.kind == AtomKind::NumCmp && at.rhs_is_constant()) k.insert(at.rhs_constant());
    });
  return k;
}

struct BruteResult {
  bool equivalent = true;
  std::uint64_t checked = 0;
};

/// Exhaustive comparison over every declared variable: booleans over {0,1},
/// enums over their values, numerics over [min K - 5, max K + 5] (or
/// [-5, 5] without constants).
inline BruteResult brute_force(const Formula& a, const Formula& b, const reqeq::Signature& sig) {
  const auto k = constants(a, b);
  const std::int64_t lo = (k.empty() ? 0 : *k.begin()) - 5;
  const std::int64_t hi = (k.empty() ? 0 : *k.rbegin()) + 5;

  struct Slot {
    std::string name;
    int kind;  // 0 numeric/bool, 1 enum
    std::vector<std::int64_t> ints;
    std::vector<std::string> names;
  };
  std::vector<Slot> slots;
  for (const auto& d : sig.decls()) {
    Slot s{d.name, 0, {}, {}};
    if (d.sort.is_bool()) s.ints = {0, 1};
    else if (d.sort.is_numeric()) for (std::int64_t v = lo; v <= hi; ++v) s.ints.push_back(v);
    else { s.kind = 1; s.names = d.sort.enum_values(); }
    slots.push_back(std::move(s));
  }

  BruteResult res;
  Env env;
  std::vector<std::size_t> idx(slots.size(), 0);
  for (;;) {
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i].kind == 0) env.num[slots[i].name] = slots[i].ints[idx[i]];
      else env.sym[slots[i].name] = slots[i].names[idx[i]];
    }
    ++res.checked;
    if (eval(a, env) != eval(b, env)) {
      res.equivalent = false;
      return res;
    }
    std::size_t i = 0;
    for (; i < slots.size(); ++i) {
      const std::size_t n = slots[i].kind == 0 ? slots[i].ints.size() : slots[i].names.size();
      if (++idx[i] < n) break;
      idx[i] = 0;
    }
    if (i == slots.size()) return res;
  }
}

/// Truth-table comparison for formulas over boolean variables only.
inline bool truth_table_equivalent(const Formula& a, const Formula& b, const std::vector<std::string>& vars) {
  Env env;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << vars.size()); ++mask) {
    for (std::size_t i = 0; i < vars.size(); ++i) env.num[vars[i]] = static_cast<std::int64_t>((mask >> i) & 1U);
    if (eval(a, env) != eval(b, env)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Random generation

class Generator {
 public:
  explicit Generator(std::uint32_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  /// Random formula whose leaves come from `leaf`.
  template <class Leaf>
  Formula formula(int depth, Leaf&& leaf) {
    if (depth <= 0 || coin(0.25)) return leaf();
    switch (uniform(0, 4)) {
      case 0: return Formula::negate(formula(depth - 1, leaf));
      case 1:
      case 2: {
        std::vector<Formula> kids;
        const int n = uniform(2, 3);
        for (int i = 0; i < n; ++i) kids.push_back(formula(depth - 1, leaf));
        return uniform(1, 2) == 1 ? Formula::all_of(std::move(kids)) : Formula::any_of(std::move(kids));
      }
      case 3: return Formula::implies(formula(depth - 1, leaf), formula(depth - 1, leaf));
      default: return Formula::iff(formula(depth - 1, leaf), formula(depth - 1, leaf));
    }
  }

  /// Equivalence-preserving rewrite applied at random positions: De Morgan,
  /// implication and biconditional expansion, double negation, commutation,
  /// and comparison-operator duals that keep the constant set unchanged.
  Formula rewrite(const Formula& f) {
    if (f.is_atom()) return rewrite_atom(f.atom_value());
    const auto& k = f.children();
    switch (f.kind()) {
      case FormulaKind::Not:
        if (coin(0.3)) return Formula::negate(rewrite(negation_normal(k[0])));
        return Formula::negate(rewrite(k[0]));
      case FormulaKind::And:
      case FormulaKind::Or: {
        std::vector<Formula> kids;
        for (const auto& c : k) kids.push_back(rewrite(c));
        std::shuffle(kids.begin(), kids.end(), rng_);
        if (coin(0.3)) {
          std::vector<Formula> neg;
          for (auto& c : kids) neg.push_back(Formula::negate(c));
          return Formula::negate(f.kind() == FormulaKind::And ? Formula::any_of(std::move(neg))
                                                              : Formula::all_of(std::move(neg)));
        }
        return f.kind() == FormulaKind::And ? Formula::all_of(std::move(kids)) : Formula::any_of(std::move(kids));
      }
      case FormulaKind::Implies:
        if (coin(0.4)) return Formula::any_of({Formula::negate(rewrite(k[0])), rewrite(k[1])});
        if (coin(0.3)) return Formula::implies(Formula::negate(rewrite(k[1])), Formula::negate(rewrite(k[0])));
        return Formula::implies(rewrite(k[0]), rewrite(k[1]));
      case FormulaKind::Iff:
        if (coin(0.4)) return Formula::all_of({Formula::implies(rewrite(k[0]), rewrite(k[1])),
                                               Formula::implies(rewrite(k[1]), rewrite(k[0]))});
        return Formula::iff(rewrite(k[1]), rewrite(k[0]));
      default: return f;
    }
  }

  /// Replaces one random leaf by `leaf()`; usually changes the meaning.
  template <class Leaf>
  Formula mutate(const Formula& f, Leaf&& leaf) {
    if (f.is_atom()) return leaf();
    std::vector<Formula> kids = f.children();
    const auto i = static_cast<std::size_t>(uniform(0, static_cast<int>(kids.size()) - 1));
    kids[i] = mutate(kids[i], leaf);
    switch (f.kind()) {
      case FormulaKind::Not: return Formula::negate(kids[0]);
      case FormulaKind::And: return Formula::all_of(std::move(kids));
      case FormulaKind::Or: return Formula::any_of(std::move(kids));
      case FormulaKind::Implies: return Formula::implies(kids[0], kids[1]);
      default: return Formula::iff(kids[0], kids[1]);
    }
  }

  std::mt19937& rng() { return rng_; }

 private:
  static Formula negation_normal(const Formula& f) {
    // not(not g) == g is the only push used; deeper pushes happen via De Morgan above
    return Formula::negate(Formula::negate(f));
  }

  Formula rewrite_atom(const Atom& a) {
    if (a.kind != AtomKind::NumCmp || coin(0.5)) return Formula::atom(a);
    const auto with = [&](CmpOp op) { return Formula::atom(Atom::compare(a.var, op, a.rhs)); };
    switch (a.op) {
      case CmpOp::Gt: return Formula::negate(with(CmpOp::Le));
      case CmpOp::Lt: return Formula::negate(with(CmpOp::Ge));
      case CmpOp::Ge: return Formula::any_of({with(CmpOp::Gt), with(CmpOp::Eq)});
      case CmpOp::Le: return Formula::negate(with(CmpOp::Gt));
      case CmpOp::Eq: return Formula::all_of({with(CmpOp::Ge), with(CmpOp::Le)});
      case CmpOp::Ne: return Formula::negate(with(CmpOp::Eq));
    }
    return Formula::atom(a);
  }

  std::mt19937 rng_;
};

inline reqeq::Signature bool_signature(const std::vector<std::string>& vars) {
  reqeq::Signature sig;
  for (const auto& v : vars) sig.add({v, reqeq::Sort::boolean()});
  return sig;
}

/// A random pair over `n` boolean variables: a rewritten copy (equivalent),
/// a mutated rewrite (usually not), or an unrelated formula.
inline std::pair<Formula, Formula> random_bool_pair(Generator& gen, const std::vector<std::string>& vars) {
  const auto leaf = [&] {
    return Formula::var(vars[static_cast<std::size_t>(gen.uniform(0, static_cast<int>(vars.size()) - 1))]);
  };
  Formula a = gen.formula(4, leaf);
  switch (gen.uniform(0, 2)) {
    case 0: return {a, gen.rewrite(a)};
    case 1: return {a, gen.mutate(gen.rewrite(a), leaf)};
    default: return {a, gen.formula(4, leaf)};
  }
}

/// Numeric variables and constants for one random pair.
struct NumericSetup {
  std::vector<std::string> vars;
  std::vector<std::int64_t> consts;
  reqeq::Signature sig;
};

inline NumericSetup random_numeric_setup(Generator& gen) {
  NumericSetup s;
  const int nv = gen.uniform(1, 3);
  const int nc = gen.uniform(0, 3);
  for (int i = 0; i < nv; ++i) s.vars.push_back(std::string(1, static_cast<char>('x' + i)));
  std::set<std::int64_t> c;
  while (static_cast<int>(c.size()) < nc) c.insert(gen.uniform(-8, 8));
  s.consts.assign(c.begin(), c.end());
  for (const auto& v : s.vars) s.sig.add({v, reqeq::Sort::numeric()});
  return s;
}

inline std::pair<Formula, Formula> random_numeric_pair(Generator& gen, const NumericSetup& s) {
  static const CmpOp kOps[] = {CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt, CmpOp::Ne};
  const auto leaf = [&] {
    const auto& x = s.vars[static_cast<std::size_t>(gen.uniform(0, static_cast<int>(s.vars.size()) - 1))];
    const CmpOp op = kOps[gen.uniform(0, 5)];
    const bool var_rhs = s.consts.empty() || (s.vars.size() > 1 && gen.coin(0.35));
    if (var_rhs) {
      std::string y = x;
      if (s.vars.size() > 1)
        while (y == x) y = s.vars[static_cast<std::size_t>(gen.uniform(0, static_cast<int>(s.vars.size()) - 1))];
      return Formula::atom(Atom::compare(x, op, y));
    }
    return Formula::atom(Atom::compare(x, op, s.consts[static_cast<std::size_t>(gen.uniform(0, static_cast<int>(s.consts.size()) - 1))]));
  };
  Formula a = gen.formula(3, leaf);
  switch (gen.uniform(0, 2)) {
    case 0: return {a, gen.rewrite(a)};
    case 1: return {a, gen.mutate(gen.rewrite(a), leaf)};
    default: return {a, gen.formula(3, leaf)};
  }
}

}  // namespace oracle
