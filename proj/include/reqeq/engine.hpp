#pragma once

// Biconditional equivalence by exhaustive enumeration over a finite domain
// plan. Booleans and enums enumerate their values; numeric variables draw
// from boundary candidates around the constants of their comparison class,
// which realizes every order type an order-comparison atom can observe.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reqeq/ir.hpp"

namespace reqeq {

inline constexpr std::uint64_t kDefaultPlanLimit = std::uint64_t{1} << 20;

struct VariablePlan {
  std::string name;
  Sort sort;
  std::vector<Value> values;  // ascending
};

/// Finite test set per variable. Variables are sorted by name; the first one
/// is the most significant digit of the enumeration order.
struct DomainPlan {
  std::vector<VariablePlan> variables;
  std::uint64_t total_size = 1;

  [[nodiscard]] const VariablePlan* find(std::string_view name) const {
    for (const auto& v : variables)
      if (v.name == name) return &v;
    return nullptr;
  }
};

namespace detail {

inline std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out))
    return b > 0 ? std::numeric_limits<std::int64_t>::max() : std::numeric_limits<std::int64_t>::min();
  return out;
}

class UnionFind {
 public:
  std::string find(const std::string& x) {
    auto it = parent_.find(x);
    if (it == parent_.end()) {
      parent_[x] = x;
      return x;
    }
    if (it->second == x) return x;
    std::string root = find(it->second);
    parent_[x] = root;
    return root;
  }
  void unite(const std::string& a, const std::string& b) {
    std::string ra = find(a), rb = find(b);
    if (ra != rb) parent_[std::max(ra, rb)] = std::min(ra, rb);
  }

 private:
  std::map<std::string, std::string> parent_;
};

/// Candidate integers for one comparison class with constants `k` and `m`
/// variables.
inline std::vector<std::int64_t> numeric_candidates(const std::set<std::int64_t>& k, std::size_t m) {
  std::set<std::int64_t> out;
  const auto width = static_cast<std::int64_t>(m);
  if (k.empty()) {
    for (std::int64_t v = 0; v <= 2 * width; ++v) out.insert(v);
    return {out.begin(), out.end()};
  }
  for (std::int64_t c : k) {
    out.insert(sat_add(c, -1));
    out.insert(c);
    out.insert(sat_add(c, 1));
  }
  const std::int64_t lo = *k.begin();
  const std::int64_t hi = *k.rbegin();
  out.insert(sat_add(lo, -2));
  out.insert(sat_add(hi, 2));
  // Room for m distinct values in every open region the constants cut out,
  // so chains like c < x < y < z stay representable.
  for (std::int64_t j = 1; j <= width; ++j) {
    out.insert(sat_add(lo, -j));
    out.insert(sat_add(hi, j));
  }
  for (auto it = k.begin(); std::next(it) != k.end(); ++it) {
    const std::int64_t a = *it;
    const std::int64_t b = *std::next(it);
    for (std::int64_t j = 1; j <= width && sat_add(a, j) < b; ++j) out.insert(sat_add(a, j));
  }
  return {out.begin(), out.end()};
}

}  // namespace detail

/// Builds the finite test domain for deciding `f_a` against `f_b` over `sig`.
///
/// Numeric variables are grouped into comparison classes (connected by
/// var-vs-var comparisons in either formula). With K the constants the class
/// is compared against and m its size, every variable of the class draws from
///   {c-1, c, c+1 : c in K} U {min K - 2, max K + 2}
/// extended with m consecutive values beyond each extreme and up to m values
/// in every gap between consecutive constants; when K is empty the set is
/// {0, 1, ..., 2m}.
inline DomainPlan build_domain_plan(const Signature& sig, const Formula& f_a, const Formula& f_b,
                                    std::uint64_t limit = kDefaultPlanLimit) {
  for (const Formula* f : {&f_a, &f_b}) {
    if (auto problem = well_formedness_error(*f, sig)) throw Error(ErrorCode::SignatureMismatch, *problem);
  }

  detail::UnionFind classes;
  std::map<std::string, std::set<std::int64_t>> var_constants;
  for (const auto& d : sig.decls())
    if (d.sort.is_numeric()) classes.find(d.name);
  for (const Formula* f : {&f_a, &f_b}) {
    for_each_atom(*f, [&](const Atom& a) {
      if (a.kind != AtomKind::NumCmp) return;
      if (a.rhs_is_constant()) {
        var_constants[a.var].insert(a.rhs_constant());
      } else {
        classes.unite(a.var, a.rhs_variable());
      }
    });
  }
  std::map<std::string, std::set<std::int64_t>> class_constants;
  std::map<std::string, std::size_t> class_size;
  for (const auto& d : sig.decls()) {
    if (!d.sort.is_numeric()) continue;
    const std::string root = classes.find(d.name);
    ++class_size[root];
    auto& ks = class_constants[root];
    if (auto it = var_constants.find(d.name); it != var_constants.end()) ks.insert(it->second.begin(), it->second.end());
  }

  DomainPlan plan;
  std::vector<const VariableDecl*> decls;
  for (const auto& d : sig.decls()) decls.push_back(&d);
  std::sort(decls.begin(), decls.end(), [](auto* a, auto* b) { return a->name < b->name; });

  bool overflow = false;
  for (const auto* d : decls) {
    VariablePlan vp{d->name, d->sort, {}};
    switch (d->sort.kind()) {
      case SortKind::Bool:
        vp.values = {Value::boolean(false), Value::boolean(true)};
        break;
      case SortKind::Enum: {
        auto names = d->sort.enum_values();
        std::sort(names.begin(), names.end());
        for (auto& n : names) vp.values.push_back(Value::enumerated(std::move(n)));
        break;
      }
      case SortKind::Numeric: {
        const std::string root = classes.find(d->name);
        for (std::int64_t n : detail::numeric_candidates(class_constants[root], class_size[root]))
          vp.values.push_back(Value::integer(n));
        break;
      }
    }
    const std::uint64_t n = vp.values.size();
    if (plan.total_size > std::numeric_limits<std::uint64_t>::max() / n) overflow = true;
    plan.total_size = overflow ? std::numeric_limits<std::uint64_t>::max() : plan.total_size * n;
    plan.variables.push_back(std::move(vp));
  }
  if (plan.total_size > limit) {
    throw Error(ErrorCode::PlanTooLarge, "domain plan has " + (overflow ? std::string("more than 2^64") : std::to_string(plan.total_size)) +
                                             " assignments, limit is " + std::to_string(limit));
  }
  return plan;
}

enum class Verdict { Equivalent, NotEquivalent, Aborted };

inline std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Equivalent: return "EQUIVALENT";
    case Verdict::NotEquivalent: return "NOT_EQUIVALENT";
    case Verdict::Aborted: return "ABORTED";
  }
  return "?";
}

inline constexpr std::string_view kSoundnessNote =
    "EQUIVALENT is a proof relative to the boundary-value domain plan, which is exact for order-comparison atoms: "
    "atom truth depends only on the order type of numeric bindings and every order type is realized by the plan.";

struct EquivalenceReport {
  Verdict verdict = Verdict::Aborted;
  bool forward_holds = false;  // P_A -> P_B valid
  bool reverse_holds = false;  // P_B -> P_A valid
  std::optional<Assignment> witness;
  bool left_at_witness = false;
  bool right_at_witness = false;
  std::uint64_t assignments_checked = 0;
  std::uint64_t plan_size = 0;
  std::vector<std::string> ungrounded_left;
  std::vector<std::string> ungrounded_right;
  std::string soundness_note{kSoundnessNote};
  std::string abort_reason;
};

namespace detail {

/// Formula compiled against a plan: variables become indices and enum values
/// become positions in the plan's sorted value list.
class CompiledFormula {
 public:
  CompiledFormula(const Formula& f, const DomainPlan& plan) { root_ = build(f, plan); }

  [[nodiscard]] bool eval(const std::vector<std::int64_t>& vals) const { return eval(root_, vals); }

 private:
  struct Node {
    FormulaKind kind;
    AtomKind atom_kind = AtomKind::BoolVar;
    std::size_t var = 0;
    CmpOp op = CmpOp::Eq;
    bool rhs_is_var = false;
    std::size_t rhs_var = 0;
    std::int64_t constant = 0;
    std::vector<std::size_t> kids;
  };

  static std::size_t index_of(const DomainPlan& plan, const std::string& name) {
    for (std::size_t i = 0; i < plan.variables.size(); ++i)
      if (plan.variables[i].name == name) return i;
    throw Error(ErrorCode::SignatureMismatch, "variable '" + name + "' missing from the domain plan");
  }

  std::size_t build(const Formula& f, const DomainPlan& plan) {
    Node n{f.kind(), AtomKind::BoolVar, 0, CmpOp::Eq, false, 0, 0, {}};
    if (f.is_atom()) {
      const Atom& a = f.atom_value();
      n.atom_kind = a.kind;
      n.var = index_of(plan, a.var);
      if (a.kind == AtomKind::EnumEq) {
        const auto& vals = plan.variables[n.var].values;
        const auto it = std::find(vals.begin(), vals.end(), Value::enumerated(a.value));
        n.constant = static_cast<std::int64_t>(it - vals.begin());
      } else if (a.kind == AtomKind::NumCmp) {
        n.op = a.op;
        if (a.rhs_is_constant()) {
          n.constant = a.rhs_constant();
        } else {
          n.rhs_is_var = true;
          n.rhs_var = index_of(plan, a.rhs_variable());
        }
      }
    } else {
      for (const auto& c : f.children()) n.kids.push_back(build(c, plan));
    }
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  bool eval(std::size_t at, const std::vector<std::int64_t>& vals) const {
    const Node& n = nodes_[at];
    switch (n.kind) {
      case FormulaKind::Atom:
        switch (n.atom_kind) {
          case AtomKind::BoolVar: return vals[n.var] != 0;
          case AtomKind::EnumEq: return vals[n.var] == n.constant;
          case AtomKind::NumCmp: return compare_ints(vals[n.var], n.op, n.rhs_is_var ? vals[n.rhs_var] : n.constant);
        }
        return false;
      case FormulaKind::Not: return !eval(n.kids[0], vals);
      case FormulaKind::And:
        for (auto k : n.kids)
          if (!eval(k, vals)) return false;
        return true;
      case FormulaKind::Or:
        for (auto k : n.kids)
          if (eval(k, vals)) return true;
        return false;
      case FormulaKind::Implies: return !eval(n.kids[0], vals) || eval(n.kids[1], vals);
      case FormulaKind::Iff: return eval(n.kids[0], vals) == eval(n.kids[1], vals);
    }
    return false;
  }

  std::vector<Node> nodes_;
  std::size_t root_ = 0;
};

/// Walks every assignment of `plan` in lexicographic order, calling
/// `visit(raw_values)`; stops early when `visit` returns false.
template <class Visit>
std::uint64_t enumerate_plan(const DomainPlan& plan, Visit&& visit) {
  const std::size_t n = plan.variables.size();
  std::vector<std::size_t> idx(n, 0);
  std::vector<std::int64_t> raw(n, 0);
  const auto encode = [&](std::size_t i) {
    const Value& v = plan.variables[i].values[idx[i]];
    switch (v.kind()) {
      case SortKind::Bool: raw[i] = v.as_bool() ? 1 : 0; break;
      case SortKind::Enum: raw[i] = static_cast<std::int64_t>(idx[i]); break;
      case SortKind::Numeric: raw[i] = v.as_int(); break;
    }
  };
  for (std::size_t i = 0; i < n; ++i) encode(i);
  std::uint64_t count = 0;
  for (;;) {
    ++count;
    if (!visit(raw)) return count;
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < plan.variables[i].values.size()) {
        encode(i);
        break;
      }
      idx[i] = 0;
      encode(i);
      if (i == 0) return count;
    }
    if (n == 0) return count;
  }
}

inline Assignment decode(const DomainPlan& plan, const std::vector<std::int64_t>& raw) {
  Assignment out;
  for (std::size_t i = 0; i < plan.variables.size(); ++i) {
    const auto& vp = plan.variables[i];
    switch (vp.sort.kind()) {
      case SortKind::Bool: out.emplace(vp.name, Value::boolean(raw[i] != 0)); break;
      case SortKind::Enum: out.emplace(vp.name, vp.values[static_cast<std::size_t>(raw[i])]); break;
      case SortKind::Numeric: out.emplace(vp.name, Value::integer(raw[i])); break;
    }
  }
  return out;
}

}  // namespace detail

/// Decides P_A <-> P_B over `sig`. The witness, when present, is the first
/// assignment in enumeration order where the two formulas disagree.
inline EquivalenceReport decide(const Formula& f_a, const Formula& f_b, const Signature& sig,
                                std::uint64_t limit = kDefaultPlanLimit) {
  if (limit < 1) throw Error(ErrorCode::Usage, "plan limit must be at least 1");
  const DomainPlan plan = build_domain_plan(sig, f_a, f_b, limit);
  const detail::CompiledFormula left(f_a, plan);
  const detail::CompiledFormula right(f_b, plan);

  EquivalenceReport report;
  report.plan_size = plan.total_size;
  report.forward_holds = true;
  report.reverse_holds = true;
  std::optional<std::vector<std::int64_t>> first_difference;
  report.assignments_checked = detail::enumerate_plan(plan, [&](const std::vector<std::int64_t>& raw) {
    const bool a = left.eval(raw);
    const bool b = right.eval(raw);
    if (a != b) {
      if (a) report.forward_holds = false;
      else report.reverse_holds = false;
      if (!first_difference) {
        first_difference = raw;
        report.left_at_witness = a;
        report.right_at_witness = b;
      }
    }
    return true;
  });
  if (first_difference) {
    report.verdict = Verdict::NotEquivalent;
    report.witness = detail::decode(plan, *first_difference);
  } else {
    report.verdict = Verdict::Equivalent;
  }
  return report;
}

enum class SatStatus { Sat, Unsat, TriviallyValid };

inline std::string_view sat_status_name(SatStatus s) {
  switch (s) {
    case SatStatus::Sat: return "SAT";
    case SatStatus::Unsat: return "UNSAT";
    case SatStatus::TriviallyValid: return "TRIVIALLY_VALID";
  }
  return "?";
}

struct SatResult {
  SatStatus status = SatStatus::Unsat;
  std::optional<Assignment> witness;  // first satisfying assignment (SAT only)
  std::optional<Assignment> falsifier;  // first falsifying assignment (SAT only)
  std::uint64_t assignments_checked = 0;
};

/// Satisfiability and validity of a single formula. TRIVIALLY_VALID flags a
/// formula true under every assignment, such as a vacuous requirement.
inline SatResult check_satisfiable(const Formula& f, const Signature& sig, std::uint64_t limit = kDefaultPlanLimit) {
  const DomainPlan plan = build_domain_plan(sig, f, f, limit);
  const detail::CompiledFormula compiled(f, plan);
  std::optional<std::vector<std::int64_t>> sat, unsat;
  SatResult result;
  result.assignments_checked = detail::enumerate_plan(plan, [&](const std::vector<std::int64_t>& raw) {
    if (compiled.eval(raw)) {
      if (!sat) sat = raw;
    } else if (!unsat) {
      unsat = raw;
    }
    return !(sat && unsat);
  });
  if (!sat) {
    result.status = SatStatus::Unsat;
  } else if (!unsat) {
    result.status = SatStatus::TriviallyValid;
  } else {
    result.status = SatStatus::Sat;
    result.witness = detail::decode(plan, *sat);
    result.falsifier = detail::decode(plan, *unsat);
  }
  return result;
}

}  // namespace reqeq
