#pragma once

// Grounding: merges two formalizations into one namespace. The right side is
// renamed into the left side's names; see parse_grounding_map for the file
// format and suggest_grounding for the similarity heuristic.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reqeq/identifier.hpp"
#include "reqeq/ir.hpp"
#include "reqeq/ir_text.hpp"
#include "reqeq/sexpr.hpp"

namespace reqeq {

struct VarAlias {
  std::string left;
  std::string right;
  SourceLocation where;
};

struct ValueAlias {
  std::string var;  // left-side name (a right-side name is accepted too)
  std::string left_value;
  std::string right_value;
  SourceLocation where;
};

struct AtomIdentification {
  SExpr left;   // written with left-side names
  SExpr right;  // written with the right side's original names
  SourceLocation where;
};

struct GroundingMap {
  std::vector<VarAlias> var_aliases;
  std::vector<ValueAlias> value_aliases;
  std::vector<AtomIdentification> atom_identifications;

  [[nodiscard]] bool empty() const {
    return var_aliases.empty() && value_aliases.empty() && atom_identifications.empty();
  }
};

/// Grounding map file, one entry per line:
///
///   var <left> = <right>
///   value <var>: <left-value> = <right-value>
///   atom <left-atom> = <right-atom>
///
/// Atoms use the IR atom syntax (`name`, `(= var value)`, `(>= x y)`).
/// `#` starts a comment running to the end of the line.
inline GroundingMap parse_grounding_map(std::string_view text, const std::string& file = {}) {
  GroundingMap map;
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    const std::size_t line_offset = pos;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    const std::size_t column = static_cast<std::size_t>(line.data() - raw.data()) + 1;
    const SourceLocation where{file, line_no, column, line_offset + column - 1};
    const auto fail = [&](const std::string& why) { throw Error(ErrorCode::ParseError, why, where); };

    const auto space = line.find_first_of(" \t");
    const std::string_view keyword = line.substr(0, space);
    const std::string_view rest = space == std::string_view::npos ? std::string_view{} : detail::trim(line.substr(space));

    // `a = b` with both sides identifiers
    const auto split_pair = [&](std::string_view body, const char* what) {
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) fail(std::string("expected '<left> = <right>' after '") + what + "'");
      std::string l(detail::trim(body.substr(0, eq)));
      std::string r(detail::trim(body.substr(eq + 1)));
      for (const auto* side : {&l, &r}) {
        if (!is_identifier(*side)) fail("'" + *side + "' is not a valid identifier");
      }
      return std::pair{std::move(l), std::move(r)};
    };

    if (keyword == "var") {
      auto [l, r] = split_pair(rest, "var");
      map.var_aliases.push_back({std::move(l), std::move(r), where});
    } else if (keyword == "value") {
      const auto colon = rest.find(':');
      if (colon == std::string_view::npos) fail("expected 'value <var>: <left> = <right>'");
      const std::string var(detail::trim(rest.substr(0, colon)));
      if (!is_identifier(var)) fail("'" + var + "' is not a valid identifier");
      auto [l, r] = split_pair(rest.substr(colon + 1), "value");
      map.value_aliases.push_back({var, std::move(l), std::move(r), where});
    } else if (keyword == "atom") {
      SExprReader reader(text.substr(line_offset, raw.size()), ErrorCode::ParseError, file, line_no);
      reader.read();  // the keyword itself
      SExpr left = reader.read();
      const SExpr eq = reader.read();
      if (!eq.is_symbol || eq.symbol != "=") fail("expected '=' between the two atoms");
      SExpr right = reader.read();
      if (!reader.at_end()) reader.fail("trailing input after the right atom");
      map.atom_identifications.push_back({std::move(left), std::move(right), where});
    } else {
      fail("unknown entry '" + std::string(keyword) + "', expected 'var', 'value' or 'atom'");
    }
  }
  return map;
}

inline std::string serialize_grounding_map(const GroundingMap& map) {
  std::string out;
  for (const auto& a : map.var_aliases) out += "var " + a.left + " = " + a.right + "\n";
  for (const auto& a : map.value_aliases) out += "value " + a.var + ": " + a.left_value + " = " + a.right_value + "\n";
  for (const auto& a : map.atom_identifications) out += "atom " + a.left.str() + " = " + a.right.str() + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Similarity suggestions

/// Scores how likely two variable names denote the same entity, in [0, 1].
/// Implementations must be symmetric.
class SimilarityScorer {
 public:
  virtual ~SimilarityScorer() = default;
  [[nodiscard]] virtual double score(std::string_view a, std::string_view b) const = 0;
};

/// Jaccard similarity of the snake_case token sets after folding synonyms:
///
///   average, avg -> mean      belt -> seatbelt
///   velocity -> speed         indicator -> indication
///
/// No stopwords are removed.
class TokenJaccardScorer final : public SimilarityScorer {
 public:
  static std::string fold(std::string_view token) {
    static const std::map<std::string_view, std::string_view> kSynonyms = {
        {"average", "mean"}, {"avg", "mean"}, {"belt", "seatbelt"}, {"velocity", "speed"}, {"indicator", "indication"},
    };
    const auto it = kSynonyms.find(token);
    return std::string(it == kSynonyms.end() ? token : it->second);
  }

  static std::set<std::string> tokens(std::string_view name) {
    std::set<std::string> out;
    std::size_t pos = 0;
    while (pos <= name.size()) {
      const auto us = name.find('_', pos);
      const auto tok = name.substr(pos, us == std::string_view::npos ? std::string_view::npos : us - pos);
      if (!tok.empty()) out.insert(fold(tok));
      if (us == std::string_view::npos) break;
      pos = us + 1;
    }
    return out;
  }

  [[nodiscard]] double score(std::string_view a, std::string_view b) const override {
    if (a == b) return 1.0;
    const auto ta = tokens(a);
    const auto tb = tokens(b);
    if (ta.empty() && tb.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& t : ta) common += tb.count(t);
    const std::size_t all = ta.size() + tb.size() - common;
    return static_cast<double>(common) / static_cast<double>(all);
  }
};

struct Suggestion {
  std::string left;
  std::string right;
  double score = 0.0;
  bool same_sort_kind = true;
};

inline constexpr double kDefaultSuggestionThreshold = 0.34;

/// Every cross pair scoring at least `threshold`, best first; ties are broken
/// by (left, right) name.
inline std::vector<Suggestion> suggest_grounding(const Signature& a, const Signature& b,
                                                 double threshold = kDefaultSuggestionThreshold,
                                                 const SimilarityScorer& scorer = TokenJaccardScorer{}) {
  std::vector<Suggestion> out;
  for (const auto& da : a.decls()) {
    for (const auto& db : b.decls()) {
      const double s = scorer.score(da.name, db.name);
      if (s >= threshold) out.push_back({da.name, db.name, s, da.sort.kind() == db.sort.kind()});
    }
  }
  std::sort(out.begin(), out.end(), [](const Suggestion& x, const Suggestion& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.left != y.left) return x.left < y.left;
    return x.right < y.right;
  });
  return out;
}

/// Greedy one-to-one selection from ranked suggestions: renaming aliases
/// first, then pairs that already share a name.
inline GroundingMap draft_grounding(const std::vector<Suggestion>& ranked) {
  std::set<std::string> used_left, used_right;
  std::vector<VarAlias> renames, identical;
  for (const auto& s : ranked) {
    if (used_left.contains(s.left) || used_right.contains(s.right)) continue;
    used_left.insert(s.left);
    used_right.insert(s.right);
    (s.left == s.right ? identical : renames).push_back({s.left, s.right, {}});
  }
  GroundingMap map;
  map.var_aliases = std::move(renames);
  map.var_aliases.insert(map.var_aliases.end(), identical.begin(), identical.end());
  return map;
}

// ---------------------------------------------------------------------------
// Applying a grounding map

struct SortWarning {
  std::string left_var;
  std::string left_sort;
  std::string right_var;
  std::string right_sort;
};

struct IdentifiedAtom {
  std::string fresh;       // BOOL variable standing for both atoms
  Atom left;               // in left names
  Atom right;              // in the right side's original names
};

struct GroundingDiagnostics {
  std::vector<std::string> ungrounded_left;
  std::vector<std::string> ungrounded_right;
  std::vector<SortWarning> sort_mismatches;  // same kind, differing detail (units)
  std::vector<Suggestion> suggestions;       // among ungrounded variables only
};

struct GroundedPair {
  Formula left;
  Formula right;
  Signature merged;
  GroundingDiagnostics diagnostics;
  std::map<std::string, std::string> renaming;  // right original name -> merged name (every right variable)
  std::map<std::string, std::map<std::string, std::string>> value_rewrites;  // right var -> right value -> left value
  std::vector<IdentifiedAtom> identified;
};

namespace detail {

inline std::string sort_description(const std::string& var, const Sort& sort) { return var + " : " + sort.str(); }

/// Resolves an identification atom; undeclared names are ALIAS_TO_UNDECLARED,
/// other defects SORT_MISMATCH.
inline Atom resolve_identified_atom(const SExpr& e, const Signature& sig, const char* side) {
  std::vector<const SExpr*> names;
  if (e.is_symbol) {
    names.push_back(&e);
  } else if (e.items.size() == 3 && e.items[1].is_symbol && e.items[2].is_symbol) {
    names.push_back(&e.items[1]);
    const auto* decl = sig.find(e.items[1].symbol);
    if (decl != nullptr && decl->sort.is_numeric() && !parse_integer(e.items[2].symbol)) names.push_back(&e.items[2]);
  }
  for (const auto* n : names) {
    if (!sig.contains(n->symbol))
      throw Error(ErrorCode::AliasToUndeclared, std::string(side) + " atom names undeclared variable '" + n->symbol + "'", n->where);
  }
  return atom_from_sexpr(e, sig, ErrorCode::SortMismatch);
}

inline Formula replace_atom(const Formula& f, const Atom& target, const std::string& fresh, bool& hit) {
  return map_atoms(f, [&](const Atom& a) {
    if (a == target) {
      hit = true;
      return Formula::var(fresh);
    }
    return Formula::atom(a);
  });
}

}  // namespace detail

/// Merges `b` into `a`'s namespace according to `g`.
inline GroundedPair apply_grounding(const Formalized& a, const Formalized& b, const GroundingMap& g) {
  const Signature& sa = a.signature;
  const Signature& sb = b.signature;

  // variable aliases: declared on both sides and a partial bijection
  std::map<std::string, std::string> left_of;   // right -> left
  std::map<std::string, std::string> right_of;  // left -> right
  for (const auto& alias : g.var_aliases) {
    if (!sa.contains(alias.left))
      throw Error(ErrorCode::AliasToUndeclared, "left variable '" + alias.left + "' is not declared", alias.where);
    if (!sb.contains(alias.right))
      throw Error(ErrorCode::AliasToUndeclared, "right variable '" + alias.right + "' is not declared", alias.where);
    if (auto it = right_of.find(alias.left); it != right_of.end() && it->second != alias.right)
      throw Error(ErrorCode::InvalidGrounding,
                  "left variable '" + alias.left + "' aliased to both '" + it->second + "' and '" + alias.right + "'",
                  alias.where);
    if (auto it = left_of.find(alias.right); it != left_of.end() && it->second != alias.left)
      throw Error(ErrorCode::InvalidGrounding,
                  "right variable '" + alias.right + "' aliased to both '" + it->second + "' and '" + alias.left + "'",
                  alias.where);
    right_of[alias.left] = alias.right;
    left_of[alias.right] = alias.left;
  }

  GroundedPair out{a.formula, b.formula, {}, {}, {}, {}, {}};
  // renaming: aliased names map to their partner, everything else keeps its name
  for (const auto& d : sb.decls()) {
    auto it = left_of.find(d.name);
    out.renaming[d.name] = it != left_of.end() ? it->second : d.name;
  }
  std::map<std::string, std::string> merged_partner;  // left name -> right original name
  for (const auto& [right, merged] : out.renaming) {
    if (!sa.contains(merged)) continue;
    if (auto it = merged_partner.find(merged); it != merged_partner.end()) {
      throw Error(ErrorCode::InvalidGrounding, "right variables '" + it->second + "' and '" + right +
                                                   "' would both merge into left variable '" + merged + "'");
    }
    merged_partner[merged] = right;
  }

  // sorts of merged pairs
  for (const auto& [left, right] : merged_partner) {
    const Sort& ls = sa.sort_of(left);
    const Sort& rs = sb.sort_of(right);
    if (ls.kind() != rs.kind()) {
      SourceLocation where;
      for (const auto& alias : g.var_aliases)
        if (alias.left == left) where = alias.where;
      throw Error(ErrorCode::SortMismatch, "cannot ground " + detail::sort_description(left, ls) + " (left) to " +
                                               detail::sort_description(right, rs) + " (right): sorts differ in kind",
                  where);
    }
    if (ls.is_numeric() && ls.unit() != rs.unit()) out.diagnostics.sort_mismatches.push_back({left, ls.str(), right, rs.str()});
  }

  // value aliases
  for (const auto& va : g.value_aliases) {
    std::string left = va.var;
    if (!sa.contains(left)) {
      if (auto it = out.renaming.find(va.var); it != out.renaming.end()) left = it->second;
    }
    if (!sa.contains(left))
      throw Error(ErrorCode::AliasToUndeclared, "value alias names undeclared variable '" + va.var + "'", va.where);
    const auto partner = merged_partner.find(left);
    if (partner == merged_partner.end())
      throw Error(ErrorCode::AliasToUndeclared, "no right-side variable is grounded to '" + left + "'", va.where);
    const Sort& ls = sa.sort_of(left);
    const Sort& rs = sb.sort_of(partner->second);
    if (!ls.is_enum())
      throw Error(ErrorCode::SortMismatch, "value alias on non-enum variable " + detail::sort_description(left, ls), va.where);
    if (!ls.has_value(va.left_value))
      throw Error(ErrorCode::AliasToUndeclared,
                  "'" + va.left_value + "' is not a value of " + detail::sort_description(left, ls), va.where);
    if (!rs.has_value(va.right_value))
      throw Error(ErrorCode::AliasToUndeclared,
                  "'" + va.right_value + "' is not a value of " + detail::sort_description(partner->second, rs), va.where);
    auto& rewrites = out.value_rewrites[partner->second];
    if (auto it = rewrites.find(va.right_value); it != rewrites.end() && it->second != va.left_value)
      throw Error(ErrorCode::InvalidGrounding, "value '" + va.right_value + "' aliased twice", va.where);
    for (const auto& [rv, lv] : rewrites) {
      if (lv == va.left_value && rv != va.right_value)
        throw Error(ErrorCode::InvalidGrounding, "value '" + va.left_value + "' aliased twice", va.where);
    }
    rewrites[va.right_value] = va.left_value;
  }

  const auto rewrite_value = [&](const std::string& right_var, const std::string& value) {
    auto it = out.value_rewrites.find(right_var);
    if (it == out.value_rewrites.end()) return value;
    auto jt = it->second.find(value);
    return jt == it->second.end() ? value : jt->second;
  };
  const auto rewritten_sort = [&](const VariableDecl& d) {
    if (!d.sort.is_enum()) return d.sort;
    std::vector<std::string> values;
    for (const auto& v : d.sort.enum_values()) {
      auto nv = rewrite_value(d.name, v);
      if (std::find(values.begin(), values.end(), nv) == values.end()) values.push_back(std::move(nv));
    }
    return Sort::enumeration(std::move(values));
  };

  // merged signature: left declarations (enum values unioned), then right-only ones
  for (const auto& d : sa.decls()) {
    Sort sort = d.sort;
    if (auto it = merged_partner.find(d.name); it != merged_partner.end() && sort.is_enum()) {
      std::vector<std::string> values = sort.enum_values();
      const Sort right_sort = rewritten_sort(*sb.find(it->second));
      for (const auto& v : right_sort.enum_values())
        if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
      sort = Sort::enumeration(std::move(values));
    }
    const Provenance* p = sa.provenance(d.name);
    out.merged.add({d.name, std::move(sort)}, p ? std::optional<Provenance>(*p) : std::nullopt);
  }
  for (const auto& d : sb.decls()) {
    const std::string& name = out.renaming.at(d.name);
    if (out.merged.contains(name)) continue;
    const Provenance* p = sb.provenance(d.name);
    out.merged.add({name, rewritten_sort(d)}, p ? std::optional<Provenance>(*p) : std::nullopt);
  }

  const auto translate = [&](const Atom& atom) {
    Atom t = atom;
    t.var = out.renaming.at(atom.var);
    if (atom.kind == AtomKind::EnumEq) t.value = rewrite_value(atom.var, atom.value);
    if (atom.kind == AtomKind::NumCmp && !atom.rhs_is_constant()) t.rhs = out.renaming.at(atom.rhs_variable());
    return t;
  };
  out.left = a.formula;
  out.right = map_atoms(b.formula, [&](const Atom& atom) { return Formula::atom(translate(atom)); });

  // atom identifications become fresh BOOL variables on both sides
  std::size_t counter = 0;
  for (const auto& id : g.atom_identifications) {
    Atom la = detail::resolve_identified_atom(id.left, sa, "left");
    Atom ra = detail::resolve_identified_atom(id.right, sb, "right");
    std::string fresh;
    do {
      fresh = "ident_" + std::to_string(++counter);
    } while (out.merged.contains(fresh));
    bool hit_left = false, hit_right = false;
    out.left = detail::replace_atom(out.left, la, fresh, hit_left);
    out.right = detail::replace_atom(out.right, translate(ra), fresh, hit_right);
    if (!hit_left)
      throw Error(ErrorCode::InvalidGrounding, "atom " + id.left.str() + " does not occur in the left formula", id.where);
    if (!hit_right)
      throw Error(ErrorCode::InvalidGrounding, "atom " + id.right.str() + " does not occur in the right formula", id.where);
    out.merged.add({fresh, Sort::boolean()}, Provenance{id.where.file, id.where.line, id.left.str() + " = " + id.right.str()});
    out.identified.push_back({fresh, std::move(la), std::move(ra)});
  }

  // ungrounded: no alias and no name-identical counterpart
  std::set<std::string> right_merged_names;
  for (const auto& [right, merged] : out.renaming) right_merged_names.insert(merged);
  Signature left_only, right_only;
  for (const auto& d : sa.decls()) {
    if (!right_merged_names.contains(d.name)) {
      out.diagnostics.ungrounded_left.push_back(d.name);
      left_only.add(d);
    }
  }
  for (const auto& d : sb.decls()) {
    if (!sa.contains(out.renaming.at(d.name))) {
      out.diagnostics.ungrounded_right.push_back(d.name);
      right_only.add(d);
    }
  }
  out.diagnostics.suggestions = suggest_grounding(left_only, right_only);
  return out;
}

}  // namespace reqeq
