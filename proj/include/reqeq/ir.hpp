#pragma once

// Typed propositional intermediate representation shared by the frontends,
// the grounding step, the Lean bridge and the equivalence engine.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "reqeq/error.hpp"
#include "reqeq/identifier.hpp"

namespace reqeq {

// ---------------------------------------------------------------------------
// Sorts and declarations
// ---------------------------------------------------------------------------

enum class SortKind { Bool, Enum, Numeric };

inline std::string_view sort_kind_name(SortKind kind) {
  switch (kind) {
    case SortKind::Bool: return "bool";
    case SortKind::Enum: return "enum";
    case SortKind::Numeric: return "numeric";
  }
  return "?";
}

/// The semantic type of a variable. ENUM sorts carry at least two distinct
/// value names; NUMERIC sorts range over the integers and may carry a unit.
class Sort {
 public:
  static Sort boolean() { return Sort(SortKind::Bool, {}, std::nullopt); }

  static Sort enumeration(std::vector<std::string> values) {
    if (values.size() < 2)
      throw Error(ErrorCode::SortError, "enum sort needs at least two values");
    std::set<std::string> seen;
    for (const auto& v : values) {
      if (!is_identifier(v))
        throw Error(ErrorCode::SortError, "enum value '" + v + "' is not an identifier");
      if (!seen.insert(v).second)
        throw Error(ErrorCode::SortError, "duplicate enum value '" + v + "'");
    }
    return Sort(SortKind::Enum, std::move(values), std::nullopt);
  }

  static Sort numeric(std::optional<std::string> unit = std::nullopt) {
    if (unit && unit->empty()) unit.reset();
    return Sort(SortKind::Numeric, {}, std::move(unit));
  }

  [[nodiscard]] SortKind kind() const { return kind_; }
  [[nodiscard]] bool is_bool() const { return kind_ == SortKind::Bool; }
  [[nodiscard]] bool is_enum() const { return kind_ == SortKind::Enum; }
  [[nodiscard]] bool is_numeric() const { return kind_ == SortKind::Numeric; }
  [[nodiscard]] const std::vector<std::string>& enum_values() const { return values_; }
  [[nodiscard]] const std::optional<std::string>& unit() const { return unit_; }

  [[nodiscard]] bool has_value(std::string_view v) const {
    return std::find(values_.begin(), values_.end(), v) != values_.end();
  }

  /// `bool`, `enum{a,b}`, `numeric` or `numeric[km/h]`, the IR spelling.
  [[nodiscard]] std::string str() const {
    switch (kind_) {
      case SortKind::Bool: return "bool";
      case SortKind::Numeric: return unit_ ? "numeric[" + *unit_ + "]" : "numeric";
      case SortKind::Enum: {
        std::string out = "enum{";
        for (std::size_t i = 0; i < values_.size(); ++i) {
          if (i) out += ',';
          out += values_[i];
        }
        return out + "}";
      }
    }
    return "?";
  }

  friend bool operator==(const Sort&, const Sort&) = default;

 private:
  Sort(SortKind kind, std::vector<std::string> values, std::optional<std::string> unit)
      : kind_(kind), values_(std::move(values)), unit_(std::move(unit)) {}

  SortKind kind_;
  std::vector<std::string> values_;
  std::optional<std::string> unit_;
};

struct VariableDecl {
  std::string name;
  Sort sort;

  friend bool operator==(const VariableDecl&, const VariableDecl&) = default;
};

/// Where a variable came from, kept for diagnostics only.
struct Provenance {
  std::string file;
  std::size_t line = 0;
  std::string original;  // source-text spelling before normalization
};

/// Ordered, name-unique variable declarations. Equality ignores provenance.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<VariableDecl> decls) {
    for (auto& d : decls) add(std::move(d));
  }

  void add(VariableDecl decl, std::optional<Provenance> origin = std::nullopt) {
    if (!is_identifier(decl.name))
      throw Error(ErrorCode::SortError, "'" + decl.name + "' is not a valid variable name");
    if (find(decl.name) != nullptr)
      throw Error(ErrorCode::SortError, "variable '" + decl.name + "' declared twice");
    if (origin) provenance_[decl.name] = std::move(*origin);
    decls_.push_back(std::move(decl));
  }

  /// Replaces the sort of an already declared variable.
  void set_sort(const std::string& name, Sort sort) {
    for (auto& d : decls_) {
      if (d.name == name) {
        d.sort = std::move(sort);
        return;
      }
    }
    throw Error(ErrorCode::UnboundVariable, "variable '" + name + "' is not declared");
  }

  void set_provenance(const std::string& name, Provenance origin) {
    provenance_[name] = std::move(origin);
  }

  [[nodiscard]] const VariableDecl* find(std::string_view name) const {
    for (const auto& d : decls_)
      if (d.name == name) return &d;
    return nullptr;
  }

  [[nodiscard]] bool contains(std::string_view name) const { return find(name) != nullptr; }

  [[nodiscard]] const Sort& sort_of(std::string_view name) const {
    if (const auto* d = find(name)) return d->sort;
    throw Error(ErrorCode::UnboundVariable, "variable '" + std::string(name) + "' is not declared");
  }

  [[nodiscard]] const std::vector<VariableDecl>& decls() const { return decls_; }
  [[nodiscard]] std::size_t size() const { return decls_.size(); }
  [[nodiscard]] bool empty() const { return decls_.empty(); }

  [[nodiscard]] const Provenance* provenance(std::string_view name) const {
    auto it = provenance_.find(std::string(name));
    return it == provenance_.end() ? nullptr : &it->second;
  }
  [[nodiscard]] const std::map<std::string, Provenance>& provenance() const { return provenance_; }

  friend bool operator==(const Signature& a, const Signature& b) { return a.decls_ == b.decls_; }

 private:
  std::vector<VariableDecl> decls_;
  std::map<std::string, Provenance> provenance_;
};

// ---------------------------------------------------------------------------
// Atoms
// ---------------------------------------------------------------------------

enum class CmpOp { Lt, Le, Eq, Ge, Gt, Ne };

inline std::string_view cmp_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

inline std::optional<CmpOp> cmp_from_symbol(std::string_view s) {
  if (s == "<") return CmpOp::Lt;
  if (s == "<=" || s == "≤") return CmpOp::Le;
  if (s == "=" || s == "==") return CmpOp::Eq;
  if (s == ">=" || s == "≥") return CmpOp::Ge;
  if (s == ">") return CmpOp::Gt;
  if (s == "!=" || s == "≠") return CmpOp::Ne;
  return std::nullopt;
}

/// `a op b` is equivalent to `b flip(op) a`.
inline CmpOp flip(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Ge: return CmpOp::Le;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Eq:
    case CmpOp::Ne: return op;
  }
  return op;
}

inline bool compare_ints(std::int64_t lhs, CmpOp op, std::int64_t rhs) {
  switch (op) {
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ge: return lhs >= rhs;
    case CmpOp::Gt: return lhs > rhs;
    case CmpOp::Ne: return lhs != rhs;
  }
  return false;
}

enum class AtomKind { BoolVar, EnumEq, NumCmp };

/// Right-hand side of a numeric comparison: an integer constant or the name
/// of a second NUMERIC variable.
using Operand = std::variant<std::int64_t, std::string>;

struct Atom {
  AtomKind kind = AtomKind::BoolVar;
  std::string var;
  std::string value;               // EnumEq only
  CmpOp op = CmpOp::Eq;            // NumCmp only
  Operand rhs = std::int64_t{0};   // NumCmp only

  static Atom boolean(std::string var) { return Atom{AtomKind::BoolVar, std::move(var), {}, CmpOp::Eq, std::int64_t{0}}; }

  static Atom enum_eq(std::string var, std::string value) {
    return Atom{AtomKind::EnumEq, std::move(var), std::move(value), CmpOp::Eq, std::int64_t{0}};
  }

  static Atom compare(std::string var, CmpOp op, Operand rhs) {
    return Atom{AtomKind::NumCmp, std::move(var), {}, op, std::move(rhs)};
  }

  [[nodiscard]] bool rhs_is_constant() const { return std::holds_alternative<std::int64_t>(rhs); }
  [[nodiscard]] std::int64_t rhs_constant() const { return std::get<std::int64_t>(rhs); }
  [[nodiscard]] const std::string& rhs_variable() const { return std::get<std::string>(rhs); }

  /// Variables mentioned by the atom (one, or two for var-vs-var comparisons).
  [[nodiscard]] std::vector<std::string> variables() const {
    if (kind == AtomKind::NumCmp && !rhs_is_constant()) return {var, rhs_variable()};
    return {var};
  }

  friend auto operator<=>(const Atom&, const Atom&) = default;
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// IR atom syntax: `x`, `(= x v)`, `(>= x 10)`, `(> x y)`.
inline std::string atom_to_sexpr(const Atom& a) {
  switch (a.kind) {
    case AtomKind::BoolVar: return a.var;
    case AtomKind::EnumEq: return "(= " + a.var + " " + a.value + ")";
    case AtomKind::NumCmp: {
      std::string rhs = a.rhs_is_constant() ? std::to_string(a.rhs_constant()) : a.rhs_variable();
      return "(" + std::string(cmp_symbol(a.op)) + " " + a.var + " " + rhs + ")";
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

enum class FormulaKind { Atom, Not, And, Or, Implies, Iff };

/// Immutable propositional formula with shared structure. And/Or carry at
/// least two children; Implies and Iff exactly two; Not exactly one.
class Formula {
 public:
  static Formula atom(Atom a) { return Formula(FormulaKind::Atom, std::move(a), {}); }
  static Formula var(std::string name) { return atom(Atom::boolean(std::move(name))); }

  static Formula negate(Formula f) { return Formula(FormulaKind::Not, {}, {std::move(f)}); }

  static Formula all_of(std::vector<Formula> children) {
    if (children.size() < 2) throw std::invalid_argument("And needs at least two children");
    return Formula(FormulaKind::And, {}, std::move(children));
  }

  static Formula any_of(std::vector<Formula> children) {
    if (children.size() < 2) throw std::invalid_argument("Or needs at least two children");
    return Formula(FormulaKind::Or, {}, std::move(children));
  }

  static Formula implies(Formula lhs, Formula rhs) {
    return Formula(FormulaKind::Implies, {}, {std::move(lhs), std::move(rhs)});
  }

  static Formula iff(Formula lhs, Formula rhs) {
    return Formula(FormulaKind::Iff, {}, {std::move(lhs), std::move(rhs)});
  }

  [[nodiscard]] FormulaKind kind() const { return node_->kind; }
  [[nodiscard]] bool is_atom() const { return node_->kind == FormulaKind::Atom; }
  [[nodiscard]] const Atom& atom_value() const { return node_->atom; }
  [[nodiscard]] const std::vector<Formula>& children() const { return node_->children; }
  [[nodiscard]] const Formula& child(std::size_t i) const { return node_->children.at(i); }

  friend std::strong_ordering compare(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.kind() <=> b.kind(); c != 0) return c;
    if (a.is_atom()) return a.atom_value() <=> b.atom_value();
    const auto& ca = a.children();
    const auto& cb = b.children();
    for (std::size_t i = 0; i < ca.size() && i < cb.size(); ++i) {
      if (auto c = compare(ca[i], cb[i]); c != 0) return c;
    }
    return ca.size() <=> cb.size();
  }

  friend bool operator==(const Formula& a, const Formula& b) { return compare(a, b) == 0; }
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b) { return compare(a, b); }

 private:
  struct Node {
    FormulaKind kind;
    Atom atom;
    std::vector<Formula> children;
  };

  Formula(FormulaKind kind, Atom a, std::vector<Formula> children)
      : node_(std::make_shared<const Node>(Node{kind, std::move(a), std::move(children)})) {}

  std::shared_ptr<const Node> node_;
};

/// And over `parts`, collapsing the one-element case. Throws on empty input.
inline Formula conjoin(std::vector<Formula> parts) {
  if (parts.empty()) throw std::invalid_argument("conjoin of nothing");
  if (parts.size() == 1) return std::move(parts.front());
  return Formula::all_of(std::move(parts));
}

inline Formula disjoin(std::vector<Formula> parts) {
  if (parts.empty()) throw std::invalid_argument("disjoin of nothing");
  if (parts.size() == 1) return std::move(parts.front());
  return Formula::any_of(std::move(parts));
}

/// Human-readable debugging form; the IR S-expression syntax.
inline std::string to_sexpr(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Atom: return atom_to_sexpr(f.atom_value());
    case FormulaKind::Not: return "(not " + to_sexpr(f.child(0)) + ")";
    default: break;
  }
  std::string head;
  switch (f.kind()) {
    case FormulaKind::And: head = "and"; break;
    case FormulaKind::Or: head = "or"; break;
    case FormulaKind::Implies: head = "implies"; break;
    case FormulaKind::Iff: head = "iff"; break;
    default: break;
  }
  std::string out = "(" + head;
  for (const auto& c : f.children()) out += " " + to_sexpr(c);
  return out + ")";
}

template <class Fn>
void for_each_atom(const Formula& f, Fn&& fn) {
  if (f.is_atom()) {
    fn(f.atom_value());
    return;
  }
  for (const auto& c : f.children()) for_each_atom(c, fn);
}

/// Rebuilds `f` bottom-up, replacing every atom by `fn(atom)`.
template <class Fn>
Formula map_atoms(const Formula& f, Fn&& fn) {
  switch (f.kind()) {
    case FormulaKind::Atom: return fn(f.atom_value());
    case FormulaKind::Not: return Formula::negate(map_atoms(f.child(0), fn));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> kids;
      kids.reserve(f.children().size());
      for (const auto& c : f.children()) kids.push_back(map_atoms(c, fn));
      return f.kind() == FormulaKind::And ? Formula::all_of(std::move(kids))
                                          : Formula::any_of(std::move(kids));
    }
    case FormulaKind::Implies: return Formula::implies(map_atoms(f.child(0), fn), map_atoms(f.child(1), fn));
    case FormulaKind::Iff: return Formula::iff(map_atoms(f.child(0), fn), map_atoms(f.child(1), fn));
  }
  return f;
}

inline std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> out;
  for_each_atom(f, [&](const Atom& a) {
    for (auto& v : a.variables()) out.insert(std::move(v));
  });
  return out;
}

/// Flattens nested And/Or, drops duplicate conjuncts/disjuncts, sorts their
/// children by structural order, and collapses singleton And/Or. Negation,
/// implication and biconditional are kept as written.
inline Formula normalize(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Atom: return f;
    case FormulaKind::Not: return Formula::negate(normalize(f.child(0)));
    case FormulaKind::Implies: return Formula::implies(normalize(f.child(0)), normalize(f.child(1)));
    case FormulaKind::Iff: return Formula::iff(normalize(f.child(0)), normalize(f.child(1)));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> flat;
      for (const auto& c : f.children()) {
        Formula n = normalize(c);
        if (n.kind() == f.kind()) {
          flat.insert(flat.end(), n.children().begin(), n.children().end());
        } else {
          flat.push_back(std::move(n));
        }
      }
      std::sort(flat.begin(), flat.end());
      flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
      return f.kind() == FormulaKind::And ? conjoin(std::move(flat)) : disjoin(std::move(flat));
    }
  }
  return f;
}

/// Describes the first way `f` is ill-formed over `sig`, or nullopt.
inline std::optional<std::string> well_formedness_error(const Formula& f, const Signature& sig) {
  std::optional<std::string> problem;
  for_each_atom(f, [&](const Atom& a) {
    if (problem) return;
    const auto* decl = sig.find(a.var);
    if (decl == nullptr) {
      problem = "undeclared variable '" + a.var + "'";
      return;
    }
    switch (a.kind) {
      case AtomKind::BoolVar:
        if (!decl->sort.is_bool()) problem = "'" + a.var + "' is used as bool but declared " + decl->sort.str();
        break;
      case AtomKind::EnumEq:
        if (!decl->sort.is_enum()) {
          problem = "'" + a.var + "' is compared to an enum value but declared " + decl->sort.str();
        } else if (!decl->sort.has_value(a.value)) {
          problem = "'" + a.value + "' is not a value of '" + a.var + "' : " + decl->sort.str();
        }
        break;
      case AtomKind::NumCmp:
        if (!decl->sort.is_numeric()) {
          problem = "'" + a.var + "' is compared numerically but declared " + decl->sort.str();
        } else if (!a.rhs_is_constant()) {
          const auto* other = sig.find(a.rhs_variable());
          if (other == nullptr) {
            problem = "undeclared variable '" + a.rhs_variable() + "'";
          } else if (!other->sort.is_numeric()) {
            problem = "'" + a.rhs_variable() + "' is compared numerically but declared " + other->sort.str();
          }
        }
        break;
    }
  });
  return problem;
}

// ---------------------------------------------------------------------------
// Values, assignments and evaluation
// ---------------------------------------------------------------------------

/// A variable binding: a boolean, an enum value name, or an integer.
class Value {
 public:
  static Value boolean(bool b) { return Value(Repr(std::in_place_index<0>, b)); }
  static Value enumerated(std::string v) { return Value(Repr(std::in_place_index<1>, std::move(v))); }
  static Value integer(std::int64_t n) { return Value(Repr(std::in_place_index<2>, n)); }

  [[nodiscard]] SortKind kind() const {
    switch (repr_.index()) {
      case 0: return SortKind::Bool;
      case 1: return SortKind::Enum;
      default: return SortKind::Numeric;
    }
  }
  [[nodiscard]] bool as_bool() const { return std::get<0>(repr_); }
  [[nodiscard]] const std::string& as_enum() const { return std::get<1>(repr_); }
  [[nodiscard]] std::int64_t as_int() const { return std::get<2>(repr_); }

  [[nodiscard]] std::string str() const {
    switch (repr_.index()) {
      case 0: return as_bool() ? "true" : "false";
      case 1: return as_enum();
      default: return std::to_string(as_int());
    }
  }

  [[nodiscard]] bool fits(const Sort& sort) const {
    if (kind() != sort.kind()) return false;
    return !sort.is_enum() || sort.has_value(as_enum());
  }

  friend bool operator==(const Value&, const Value&) = default;
  friend auto operator<=>(const Value&, const Value&) = default;

 private:
  using Repr = std::variant<bool, std::string, std::int64_t>;
  explicit Value(Repr r) : repr_(std::move(r)) {}
  Repr repr_;
};

/// Total map from variable name to value. Ordered by name, so iteration is
/// the variable-sorted order used in reports.
using Assignment = std::map<std::string, Value>;

namespace detail {

inline const Value& lookup(const Signature& sig, const Assignment& a, const std::string& name,
                           SortKind expected) {
  const auto* decl = sig.find(name);
  if (decl == nullptr)
    throw Error(ErrorCode::SortError, "variable '" + name + "' is not declared in the signature");
  auto it = a.find(name);
  if (it == a.end()) throw Error(ErrorCode::UnboundVariable, "no binding for '" + name + "'");
  if (decl->sort.kind() != expected || !it->second.fits(decl->sort))
    throw Error(ErrorCode::SortError, "binding " + name + " = " + it->second.str() +
                                          " does not fit sort " + decl->sort.str());
  return it->second;
}

inline bool eval_atom(const Atom& atom, const Signature& sig, const Assignment& a) {
  switch (atom.kind) {
    case AtomKind::BoolVar: return lookup(sig, a, atom.var, SortKind::Bool).as_bool();
    case AtomKind::EnumEq: return lookup(sig, a, atom.var, SortKind::Enum).as_enum() == atom.value;
    case AtomKind::NumCmp: {
      const std::int64_t lhs = lookup(sig, a, atom.var, SortKind::Numeric).as_int();
      const std::int64_t rhs = atom.rhs_is_constant()
                                   ? atom.rhs_constant()
                                   : lookup(sig, a, atom.rhs_variable(), SortKind::Numeric).as_int();
      return compare_ints(lhs, atom.op, rhs);
    }
  }
  return false;
}

}  // namespace detail

/// Truth value of `f` under `a`. Every binding the formula touches is checked
/// against its declared sort.
inline bool evaluate(const Formula& f, const Signature& sig, const Assignment& a) {
  switch (f.kind()) {
    case FormulaKind::Atom: return detail::eval_atom(f.atom_value(), sig, a);
    case FormulaKind::Not: return !evaluate(f.child(0), sig, a);
    case FormulaKind::And: {
      // no short-circuit: sort errors anywhere in the tree are reported
      bool all = true;
      for (const auto& c : f.children()) all = evaluate(c, sig, a) && all;
      return all;
    }
    case FormulaKind::Or: {
      bool any = false;
      for (const auto& c : f.children()) any = evaluate(c, sig, a) || any;
      return any;
    }
    case FormulaKind::Implies: {
      const bool lhs = evaluate(f.child(0), sig, a);
      const bool rhs = evaluate(f.child(1), sig, a);
      return !lhs || rhs;
    }
    case FormulaKind::Iff: return evaluate(f.child(0), sig, a) == evaluate(f.child(1), sig, a);
  }
  return false;
}

/// A formula together with the signature it is typed over.
struct Formalized {
  Formula formula;
  Signature signature;
};

}  // namespace reqeq
