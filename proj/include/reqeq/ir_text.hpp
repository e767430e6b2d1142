#pragma once

// IR text format, one formula per file:
//
//   ; origin <name>: <file>:<line> "<original spelling>"    (optional)
//   var <name> : bool | enum{v1,v2,...} | numeric | numeric[<unit>]
//   ...
//   <blank line>
//   <one S-expression formula>
//
// Formula keywords are `and or not implies iff`; atoms are a bare boolean
// variable, `(= var value)` for enums, or `(<op> var rhs)` with op one of
// `< <= = >= > !=` and rhs an integer or a numeric variable.

#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "reqeq/ir.hpp"
#include "reqeq/sexpr.hpp"

namespace reqeq {

namespace detail {

inline std::optional<std::int64_t> parse_integer(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t value = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

inline std::optional<std::string> unquote(std::string_view s) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') return std::nullopt;
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\' && i + 2 < s.size()) {
      ++i;
      out += s[i] == 'n' ? '\n' : s[i];
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace detail

/// Parses an IR sort spelling (`bool`, `enum{a,b}`, `numeric[km/h]`).
/// Returns nullopt with `why` filled when the text is not a sort.
inline std::optional<Sort> parse_sort(std::string_view text, std::string& why) {
  text = detail::trim(text);
  if (text == "bool") return Sort::boolean();
  if (text == "numeric") return Sort::numeric();
  if (text.starts_with("numeric[")) {
    if (!text.ends_with("]")) {
      why = "unterminated unit in '" + std::string(text) + "'";
      return std::nullopt;
    }
    return Sort::numeric(std::string(text.substr(8, text.size() - 9)));
  }
  if (text.starts_with("enum{")) {
    if (!text.ends_with("}")) {
      why = "unterminated value set in '" + std::string(text) + "'";
      return std::nullopt;
    }
    std::vector<std::string> values;
    std::string_view body = text.substr(5, text.size() - 6);
    while (!body.empty()) {
      const auto comma = body.find(',');
      values.emplace_back(detail::trim(body.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
      if (body.empty()) values.emplace_back();
    }
    try {
      return Sort::enumeration(std::move(values));
    } catch (const Error& e) {
      why = e.detail();
      return std::nullopt;
    }
  }
  why = "unknown sort '" + std::string(text) + "'";
  return std::nullopt;
}

/// Resolves one IR atom expression against `sig`. `=` becomes EnumEq for enum
/// variables and NumCmp for numeric ones. Throws `code`.
inline Atom atom_from_sexpr(const SExpr& e, const Signature& sig, ErrorCode code) {
  const auto fail = [&](const std::string& why) -> Atom { throw Error(code, why, e.where); };
  if (e.is_symbol) {
    if (!sig.contains(e.symbol)) return fail("undeclared variable '" + e.symbol + "'");
    if (!sig.sort_of(e.symbol).is_bool()) return fail("'" + e.symbol + "' is not a bool variable");
    return Atom::boolean(e.symbol);
  }
  if (e.items.size() != 3 || !e.items[0].is_symbol || !e.items[1].is_symbol || !e.items[2].is_symbol)
    return fail("expected an atom (<op> var rhs), got " + e.str());
  const auto op = cmp_from_symbol(e.items[0].symbol);
  if (!op) return fail("unknown comparison '" + e.items[0].symbol + "'");
  const std::string& var = e.items[1].symbol;
  const std::string& rhs = e.items[2].symbol;
  const auto* decl = sig.find(var);
  if (decl == nullptr) return fail("undeclared variable '" + var + "'");
  if (decl->sort.is_enum()) {
    if (*op != CmpOp::Eq) return fail("enum variable '" + var + "' only supports '='");
    if (!decl->sort.has_value(rhs)) return fail("'" + rhs + "' is not a value of " + var + " : " + decl->sort.str());
    return Atom::enum_eq(var, rhs);
  }
  if (!decl->sort.is_numeric()) return fail("'" + var + "' is not numeric or enum");
  if (auto n = detail::parse_integer(rhs)) return Atom::compare(var, *op, *n);
  const auto* other = sig.find(rhs);
  if (other == nullptr) return fail("undeclared variable '" + rhs + "'");
  if (!other->sort.is_numeric()) return fail("'" + rhs + "' is not numeric");
  return Atom::compare(var, *op, rhs);
}

inline Formula formula_from_sexpr(const SExpr& e, const Signature& sig, ErrorCode code) {
  if (e.is_symbol) return Formula::atom(atom_from_sexpr(e, sig, code));
  if (e.items.empty() || !e.items[0].is_symbol) throw Error(code, "expected a keyword after '('", e.where);
  const std::string& head = e.items[0].symbol;
  const std::size_t argc = e.items.size() - 1;
  const auto args = [&] {
    std::vector<Formula> out;
    for (std::size_t i = 1; i < e.items.size(); ++i) out.push_back(formula_from_sexpr(e.items[i], sig, code));
    return out;
  };
  const auto arity = [&](bool ok, const char* expected) {
    if (!ok) throw Error(code, "'" + head + "' takes " + expected + " argument(s), got " + std::to_string(argc), e.where);
  };
  if (head == "not") {
    arity(argc == 1, "1");
    return Formula::negate(args().front());
  }
  if (head == "and" || head == "or") {
    arity(argc >= 2, "at least 2");
    return head == "and" ? Formula::all_of(args()) : Formula::any_of(args());
  }
  if (head == "implies" || head == "iff") {
    arity(argc == 2, "2");
    auto kids = args();
    return head == "implies" ? Formula::implies(kids[0], kids[1]) : Formula::iff(kids[0], kids[1]);
  }
  if (cmp_from_symbol(head)) return Formula::atom(atom_from_sexpr(e, sig, code));
  throw Error(code, "unknown keyword '" + head + "'", e.where);
}

/// Writes `normalize(f)` with its signature in the IR text format.
inline std::string serialize_ir(const Formula& f, const Signature& sig) {
  if (auto problem = well_formedness_error(f, sig)) throw Error(ErrorCode::MalformedIr, *problem);
  std::ostringstream out;
  for (const auto& decl : sig.decls()) {
    if (const auto* p = sig.provenance(decl.name)) {
      out << "; origin " << decl.name << ": " << (p->file.empty() ? "<input>" : p->file) << ':' << p->line
          << ' ' << detail::quote(p->original) << '\n';
    }
  }
  for (const auto& decl : sig.decls()) out << "var " << decl.name << " : " << decl.sort.str() << '\n';
  out << '\n' << to_sexpr(normalize(f)) << '\n';
  return out.str();
}

inline std::string serialize_ir(const Formalized& fz) { return serialize_ir(fz.formula, fz.signature); }

/// Inverse of serialize_ir. The returned formula is normalized. Any defect is
/// a MALFORMED_IR error with a line/column position.
inline Formalized parse_ir(std::string_view text, const std::string& file = {}) {
  Signature sig;
  std::map<std::string, Provenance> origins;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::size_t body_start = std::string_view::npos;
  std::size_t body_line = 0;
  const auto fail = [&](const std::string& why, std::size_t column = 1) {
    throw Error(ErrorCode::MalformedIr, why, SourceLocation{file, line_no, column, pos});
  };
  while (pos < text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty()) {
      // skip
    } else if (line.starts_with(";")) {
      constexpr std::string_view tag = "; origin ";
      if (line.starts_with(tag)) {
        std::string_view rest = line.substr(tag.size());
        const auto colon = rest.find(": ");
        if (colon != std::string_view::npos) {
          const std::string name(rest.substr(0, colon));
          rest.remove_prefix(colon + 2);
          const auto space = rest.find(' ');
          const std::string_view where = rest.substr(0, space);
          Provenance p;
          const auto last_colon = where.rfind(':');
          p.file = std::string(where.substr(0, last_colon));
          if (p.file == "<input>") p.file.clear();
          if (last_colon != std::string_view::npos)
            p.line = detail::parse_integer(where.substr(last_colon + 1)).value_or(0);
          if (space != std::string_view::npos) p.original = detail::unquote(detail::trim(rest.substr(space))).value_or("");
          origins[name] = std::move(p);
        }
      }
    } else if (line.starts_with("var ") || line.starts_with("var\t")) {
      const std::string_view decl = detail::trim(line.substr(4));
      const auto colon = decl.find(':');
      if (colon == std::string_view::npos) fail("expected 'var <name> : <sort>'");
      const std::string name(detail::trim(decl.substr(0, colon)));
      if (!is_identifier(name)) fail("'" + name + "' is not a valid variable name", 5);
      if (sig.contains(name)) fail("variable '" + name + "' declared twice", 5);
      std::string why;
      auto sort = parse_sort(decl.substr(colon + 1), why);
      if (!sort) fail(why, 5 + colon + 1);
      sig.add(VariableDecl{name, *sort});
    } else {
      body_start = pos;
      body_line = line_no;
      break;
    }
    if (eol == std::string_view::npos) {
      pos = text.size();
      break;
    }
    pos = eol + 1;
  }
  if (body_start == std::string_view::npos) {
    line_no = std::max<std::size_t>(line_no, 1);
    fail(text.empty() ? "empty input" : "missing formula after the declarations");
  }
  for (auto& [name, origin] : origins) {
    if (sig.contains(name)) sig.set_provenance(name, std::move(origin));
  }
  SExprReader reader(text.substr(body_start), ErrorCode::MalformedIr, file, body_line);
  SExpr expr = reader.read();
  if (!reader.at_end()) reader.fail("trailing input after the formula");
  return Formalized{normalize(formula_from_sexpr(expr, sig, ErrorCode::MalformedIr)), std::move(sig)};
}

}  // namespace reqeq
