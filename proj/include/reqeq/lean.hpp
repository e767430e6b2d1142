#pragma once

// Lean 4 emission and ingestion for the propositional subset.
//
// Emitted shape of a definition:
//
//   inductive Seatbelt where
//     | inactive
//     | other
//     deriving DecidableEq
//
//   variable (seatbelt : Seatbelt)
//   -- unit: km/h
//   variable (speed : ℤ)
//   variable (chime : Bool)
//
//   def initiate_chime : Prop :=
//     (speed ≥ 10 ∨ seatbelt = Seatbelt.inactive) → chime = true
//
// Bool atoms are written `x = true`, numeric variables use ℤ, and compound
// operands are always parenthesized. The parser accepts the same subset plus
// ASCII connectives (`/\ \/ -> <-> && || !`), `Int`/`Nat`/`ℕ`/`Real`/`ℝ` as
// numeric types, `Prop` variables, `x = false`, `.v` constructor shorthand,
// def binders, and skips `import`/`open`/`theorem`/`lemma`/`example` blocks.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "reqeq/grounding.hpp"
#include "reqeq/identifier.hpp"
#include "reqeq/ir.hpp"
#include "reqeq/ir_text.hpp"

namespace reqeq {

namespace lean_detail {

inline bool is_keyword(std::string_view name) {
  static const std::set<std::string_view> kKeywords = {
      "at",       "by",      "def",     "deriving", "do",      "else",   "end",     "example", "false",
      "fun",      "have",    "if",      "import",   "in",      "inductive", "instance", "lemma", "let",
      "match",    "namespace", "open",  "section",  "show",    "structure", "then",  "theorem", "true",
      "variable", "where",   "with",    "from",     "for",     "return", "mut",     "class",   "abbrev",
      "axiom",    "universe", "macro",  "syntax",   "calc",    "suffices", "obtain", "nomatch", "nofun",
      "unless",   "try",     "catch",   "finally",  "break",   "continue", "sorry", "set_option", "local",
      "private",  "protected", "partial", "noncomputable", "attribute", "notation", "prefix", "infix",
      "infixl",   "infixr",  "postfix", "opaque",   "omit",    "include", "mutual", "termination_by",
      "decreasing_by", "this", "using", "λ",
  };
  return kKeywords.contains(name);
}

inline std::string ident(std::string_view name) {
  if (is_keyword(name)) return "«" + std::string(name) + "»";
  return std::string(name);
}

inline const std::set<std::string_view>& reserved_type_names() {
  static const std::set<std::string_view> kNames = {
      "Bool", "Prop", "Type", "Nat", "Int", "Real", "Rat", "String", "List", "Option", "Unit", "Char",
      "Float", "Fin", "Array", "Sort", "True", "False", "Iff", "And", "Or", "Not", "Eq", "Ne", "Decidable",
  };
  return kNames;
}

}  // namespace lean_detail

/// Name of the inductive type emitted for enum variable `var`.
inline std::string lean_type_name(std::string_view var) {
  std::string name = pascal_case(var);
  if (lean_detail::reserved_type_names().contains(name)) name += "Value";
  return name;
}

namespace lean_detail {

/// How each variable's type is spelled; enum types by name.
using TypeNames = std::map<std::string, std::string>;

inline std::string type_of(const std::string& var, const Sort& sort, const TypeNames& types) {
  switch (sort.kind()) {
    case SortKind::Bool: return "Bool";
    case SortKind::Numeric: return "ℤ";
    case SortKind::Enum: {
      auto it = types.find(var);
      return it != types.end() ? it->second : lean_type_name(var);
    }
  }
  return "?";
}

inline std::string atom_text(const Atom& a, const Signature& sig, const TypeNames& types) {
  switch (a.kind) {
    case AtomKind::BoolVar: return ident(a.var) + " = true";
    case AtomKind::EnumEq: return ident(a.var) + " = " + type_of(a.var, sig.sort_of(a.var), types) + "." + ident(a.value);
    case AtomKind::NumCmp: {
      static const std::map<CmpOp, std::string_view> kOps = {
          {CmpOp::Lt, "<"}, {CmpOp::Le, "≤"}, {CmpOp::Eq, "="}, {CmpOp::Ge, "≥"}, {CmpOp::Gt, ">"}, {CmpOp::Ne, "≠"},
      };
      const std::string rhs = a.rhs_is_constant() ? std::to_string(a.rhs_constant()) : ident(a.rhs_variable());
      return ident(a.var) + " " + std::string(kOps.at(a.op)) + " " + rhs;
    }
  }
  return "?";
}

inline std::string formula_text(const Formula& f, const Signature& sig, const TypeNames& types) {
  const auto operand = [&](const Formula& c) {
    const std::string inner = formula_text(c, sig, types);
    return c.is_atom() ? inner : "(" + inner + ")";
  };
  switch (f.kind()) {
    case FormulaKind::Atom: return atom_text(f.atom_value(), sig, types);
    case FormulaKind::Not: return "¬(" + formula_text(f.child(0), sig, types) + ")";
    case FormulaKind::And:
    case FormulaKind::Or: {
      const std::string_view sep = f.kind() == FormulaKind::And ? " ∧ " : " ∨ ";
      std::string out;
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += sep;
        out += operand(f.child(i));
      }
      return out;
    }
    case FormulaKind::Implies: return operand(f.child(0)) + " → " + operand(f.child(1));
    case FormulaKind::Iff: return operand(f.child(0)) + " ↔ " + operand(f.child(1));
  }
  return "?";
}

inline std::string inductive_text(const std::string& type, const Sort& sort) {
  std::string out = "inductive " + type + " where\n";
  for (const auto& v : sort.enum_values()) out += "  | " + ident(v) + "\n";
  out += "  deriving DecidableEq\n";
  return out;
}

inline std::string variable_line(const std::string& var, const Sort& sort, const TypeNames& types) {
  std::string out;
  if (sort.is_numeric() && sort.unit()) out += "-- unit: " + *sort.unit() + "\n";
  return out + "variable (" + ident(var) + " : " + type_of(var, sort, types) + ")\n";
}

inline bool valid_def_name(std::string_view name) {
  if (name.empty() || is_keyword(name)) return false;
  if (!std::isalpha(static_cast<unsigned char>(name.front())) && name.front() != '_') return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'';
  });
}

inline void check_emittable(const Formula& f, const Signature& sig, std::string_view name) {
  if (!valid_def_name(name)) throw Error(ErrorCode::EmitUnsupported, "'" + std::string(name) + "' is not a Lean identifier");
  if (auto problem = well_formedness_error(f, sig)) throw Error(ErrorCode::EmitUnsupported, *problem);
}

}  // namespace lean_detail

/// `def <name> : Prop :=` followed by the body on an indented line.
inline std::string emit_lean_def_body(const Formula& f, const Signature& sig, std::string_view name,
                                      const std::map<std::string, std::string>& type_names = {}) {
  lean_detail::check_emittable(f, sig, name);
  return "def " + std::string(name) + " : Prop :=\n  " + lean_detail::formula_text(f, sig, type_names) + "\n";
}

/// Self-contained Lean source: enum inductives, variable binders, then the def.
inline std::string emit_lean_def(const Formula& f, const Signature& sig, std::string_view name) {
  lean_detail::check_emittable(f, sig, name);
  lean_detail::TypeNames types;
  std::set<std::string> used;
  std::string out;
  for (const auto& d : sig.decls()) {
    if (!d.sort.is_enum()) continue;
    std::string type = lean_type_name(d.name);
    for (int k = 2; used.contains(type); ++k) type = lean_type_name(d.name) + std::to_string(k);
    used.insert(type);
    types[d.name] = type;
    out += lean_detail::inductive_text(type, d.sort) + "\n";
  }
  for (const auto& d : sig.decls()) out += lean_detail::variable_line(d.name, d.sort, types);
  out += "\n" + emit_lean_def_body(f, sig, name, types);
  return out;
}

inline std::string emit_lean_def(const Formalized& fz, std::string_view name) {
  return emit_lean_def(fz.formula, fz.signature, name);
}

/// `initiate_<x>` when the formula is an implication into a positive bool
/// atom (the action), otherwise `fallback`.
inline std::string default_def_name(const Formula& f, std::string_view fallback = "requirement") {
  if (f.kind() == FormulaKind::Implies && f.child(1).is_atom() && f.child(1).atom_value().kind == AtomKind::BoolVar)
    return "initiate_" + f.child(1).atom_value().var;
  return std::string(fallback);
}

// ---------------------------------------------------------------------------
// Parsing

namespace lean_detail {

enum class Tok { Ident, Number, Symbol, UnitNote, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;  // 1-based, in bytes
  std::size_t offset = 0;
  bool quoted = false;  // written as «name», never a keyword
};

class Lexer {
 public:
  Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments(out);
      if (pos_ >= text_.size()) break;
      out.push_back(next());
    }
    out.push_back(Token{Tok::End, "", line_, column(), pos_});
    return out;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::LeanParseError, why, SourceLocation{file_, line_, column(), pos_});
  }

 private:
  std::size_t column() const { return pos_ - line_start_ + 1; }

  void newline() {
    ++line_;
    line_start_ = pos_;
  }

  void skip_space_and_comments(std::vector<Token>& out) {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++pos_;
        newline();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (text_.substr(pos_).starts_with("--")) {
        const std::size_t start = pos_;
        const std::size_t col = column();
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
        const auto body = detail::trim(text_.substr(start + 2, pos_ - start - 2));
        if (body.starts_with("unit:"))
          out.push_back(Token{Tok::UnitNote, std::string(detail::trim(body.substr(5))), line_, col, start});
      } else if (text_.substr(pos_).starts_with("/-")) {
        int depth = 0;
        while (pos_ < text_.size()) {
          if (text_.substr(pos_).starts_with("/-")) {
            ++depth;
            pos_ += 2;
          } else if (text_.substr(pos_).starts_with("-/")) {
            pos_ += 2;
            if (--depth == 0) break;
          } else {
            if (text_[pos_] == '\n') {
              ++pos_;
              newline();
            } else {
              ++pos_;
            }
          }
        }
        if (depth != 0) fail("unterminated block comment");
      } else {
        break;
      }
    }
  }

  Token next() {
    Token t{Tok::Symbol, "", line_, column(), pos_};
    static const std::string_view kSymbols[] = {
        ":=", "<->", "->", "/\\", "\\/", "&&", "||", ">=", "<=", "!=", "==", "↔", "→", "∧", "∨", "¬", "≥", "≤", "≠",
        "∀", "∃", "λ", "ℤ", "ℕ", "ℝ", "ℚ", "×", "⟨", "⟩", "·", "(", ")", "{", "}", "[", "]", ":", ",", "|", "=",
        "<", ">", "+", "-", "*", "/", "!", "%", "^", "$", "@", "#", "'", "\"",
    };
    const std::string_view rest = text_.substr(pos_);
    if (rest.starts_with("«")) {
      const auto close = rest.find("»");
      if (close == std::string_view::npos) fail("unterminated «");
      t.kind = Tok::Ident;
      t.quoted = true;
      t.text = std::string(rest.substr(2, close - 2));
      pos_ += close + 2;
      return t;
    }
    const unsigned char c = static_cast<unsigned char>(rest.front());
    if (std::isdigit(c)) {
      t.kind = Tok::Number;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' || text_[pos_] == '_')) {
        if (text_[pos_] == '.' && !(pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) break;
        t.text += text_[pos_++];
      }
      return t;
    }
    if (std::isalpha(c) || c == '_' || c == '.') {
      // identifiers, dotted names (`T.v`) and the `.v` constructor shorthand
      t.kind = Tok::Ident;
      while (pos_ < text_.size()) {
        const char d = text_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.' || d == '\'') {
          t.text += d;
          ++pos_;
        } else if (text_.substr(pos_).starts_with("«")) {
          const auto close = text_.substr(pos_).find("»");
          if (close == std::string_view::npos) fail("unterminated «");
          t.text += text_.substr(pos_ + 2, close - 2);
          pos_ += close + 2;
        } else {
          break;
        }
      }
      if (t.text == ".") fail("unexpected '.'");
      return t;
    }
    for (auto sym : kSymbols) {
      if (rest.starts_with(sym)) {
        t.text = std::string(sym);
        pos_ += sym.size();
        return t;
      }
    }
    std::size_t len = 1;
    if (c >= 0xC0) len = c >= 0xF0 ? 4 : c >= 0xE0 ? 3 : 2;
    fail("unexpected character '" + std::string(rest.substr(0, std::min(len, rest.size()))) + "'");
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

inline const std::set<std::string_view>& command_keywords() {
  static const std::set<std::string_view> kCommands = {
      "import",    "open",     "variable", "inductive", "def",      "theorem",  "lemma",    "example", "namespace",
      "end",       "section",  "set_option", "structure", "abbrev", "instance", "class",    "axiom",   "#eval",
      "#check",    "noncomputable", "universe", "attribute", "@[",  "private",  "protected", "opaque", "mutual",
  };
  return kCommands;
}

/// One side of a comparison, before sorts are consulted.
struct Term {
  enum Kind { Var, Num, BoolLit, Ctor, Prop } kind = Var;
  std::string name;             // Var, Ctor (constructor), qualified type for Ctor in `type`
  std::string type;             // Ctor: explicit type prefix, may be empty
  std::int64_t number = 0;
  bool boolean = false;
  std::optional<Formula> prop;  // Prop
  Token at;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file) : toks_(std::move(tokens)), file_(std::move(file)) {}

  struct Result {
    std::string name;
    Formalized ir;
  };

  Result run() {
    std::optional<std::string> pending_unit;
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind == Tok::UnitNote) {
        pending_unit = t.text;
        ++pos_;
        continue;
      }
      if (t.kind == Tok::Symbol && t.text == "#") {
        skip_command();
        continue;
      }
      if (t.kind != Tok::Ident) fail(t, "expected a command, got '" + t.text + "'");
      const std::string cmd = t.text;
      if (cmd == "import" || cmd == "open" || cmd == "namespace" || cmd == "end" || cmd == "section" ||
          cmd == "set_option" || cmd == "universe") {
        skip_line(t.line);
      } else if (cmd == "theorem" || cmd == "lemma" || cmd == "example") {
        skip_command();
      } else if (cmd == "variable") {
        ++pos_;
        parse_binders(pending_unit);
        if (!at_command_start() && peek().kind != Tok::End) fail(peek(), "expected a binder '(name : Type)'");
      } else if (cmd == "inductive") {
        parse_inductive();
      } else if (cmd == "def" || cmd == "abbrev") {
        parse_def();
      } else if (cmd == "noncomputable" || cmd == "private" || cmd == "protected") {
        ++pos_;
      } else if (cmd == "structure" || cmd == "class" || cmd == "instance" || cmd == "axiom" || cmd == "opaque" ||
                 cmd == "mutual") {
        unsupported(t, "'" + cmd + "' declaration");
      } else {
        fail(t, "unexpected '" + cmd + "' at top level");
      }
      if (cmd != "variable") pending_unit.reset();
    }
    if (!def_) fail(peek(), "no 'def ... : Prop :=' found");
    return std::move(*def_);
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const Token& t, const std::string& why) const {
    throw Error(ErrorCode::LeanParseError, why, SourceLocation{file_, t.line, t.column, t.offset});
  }
  [[noreturn]] void unsupported(const Token& t, const std::string& what) const {
    throw Error(ErrorCode::UnsupportedLean, what, SourceLocation{file_, t.line, t.column, t.offset});
  }

  bool is_symbol(const Token& t, std::string_view s) const { return t.kind == Tok::Symbol && t.text == s; }
  bool accept(std::string_view s) {
    if (is_symbol(peek(), s)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail(peek(), "expected '" + std::string(s) + "', got '" + describe(peek()) + "'");
  }
  static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

  bool at_command_start() const {
    const Token& t = peek();
    if (t.kind == Tok::End || t.kind == Tok::UnitNote) return true;
    if (t.column != 1) return false;
    return (t.kind == Tok::Ident && command_keywords().contains(t.text)) || is_symbol(t, "#") || is_symbol(t, "@");
  }

  void skip_line(std::size_t line) {
    while (peek().kind != Tok::End && peek().line == line) ++pos_;
  }

  void skip_command() {
    ++pos_;
    while (!at_command_start()) ++pos_;
  }

  std::string name_of(const Token& t) const {
    if (t.kind != Tok::Ident) fail(t, "expected a name, got '" + describe(t) + "'");
    if (t.text.find('.') != std::string::npos) fail(t, "qualified name '" + t.text + "' is not allowed here");
    std::string n = is_identifier(t.text) ? t.text : snake_case_identifier(t.text);
    if (n.empty()) fail(t, "'" + t.text + "' is not a usable name");
    return n;
  }

  void declare(const Token& at, const std::string& name, Sort sort) {
    if (sig_.contains(name)) fail(at, "variable '" + name + "' declared twice");
    if (auto it = spelled_.find(name); it != spelled_.end() && it->second != at.text)
      fail(at, "'" + at.text + "' and '" + it->second + "' normalize to the same name '" + name + "'");
    spelled_[name] = at.text;
    sig_.add(VariableDecl{name, std::move(sort)});
    var_type_[name] = current_type_name_;
  }

  Sort parse_type(std::string& type_name) {
    const Token& t = take();
    type_name.clear();
    if (t.kind == Tok::Symbol) {
      if (t.text == "ℤ" || t.text == "ℕ" || t.text == "ℝ" || t.text == "ℚ") return Sort::numeric();
      fail(t, "expected a type, got '" + t.text + "'");
    }
    if (t.kind != Tok::Ident) fail(t, "expected a type, got '" + describe(t) + "'");
    if (t.text == "Bool" || t.text == "Prop") return Sort::boolean();
    if (t.text == "Int" || t.text == "Nat" || t.text == "Real" || t.text == "Rat") return Sort::numeric();
    if (t.text == "Float" || t.text == "String") unsupported(t, "type '" + t.text + "'");
    auto it = inductives_.find(t.text);
    if (it == inductives_.end()) fail(t, "unknown type '" + t.text + "'");
    type_name = t.text;
    return it->second;
  }

  /// `(a b : T)` groups; `{}` binders are treated alike, `[inst]` skipped.
  void parse_binders(std::optional<std::string>& unit) {
    for (;;) {
      if (accept("[")) {
        int depth = 1;
        while (depth > 0) {
          if (peek().kind == Tok::End) fail(peek(), "unclosed '['");
          if (is_symbol(peek(), "[")) ++depth;
          if (is_symbol(peek(), "]")) --depth;
          ++pos_;
        }
        continue;
      }
      std::string close;
      if (accept("(")) close = ")";
      else if (accept("{")) close = "}";
      else return;
      std::vector<Token> names;
      while (peek().kind == Tok::Ident) names.push_back(take());
      if (names.empty()) fail(peek(), "expected a variable name");
      expect(":");
      std::string type_name;
      Sort sort = parse_type(type_name);
      if (is_symbol(peek(), "→") || is_symbol(peek(), "->")) unsupported(peek(), "function-typed variable");
      expect(close);
      if (sort.is_numeric() && unit) sort = Sort::numeric(*unit);
      for (const auto& n : names) {
        current_type_name_ = type_name;
        declare(n, name_of(n), sort);
      }
      unit.reset();
    }
  }

  void parse_inductive() {
    ++pos_;
    const Token name_tok = take();
    if (name_tok.kind != Tok::Ident) fail(name_tok, "expected the inductive type's name");
    if (inductives_.contains(name_tok.text)) fail(name_tok, "type '" + name_tok.text + "' declared twice");
    if (peek().kind == Tok::Ident && peek().text == "where") ++pos_;
    std::vector<std::string> ctors;
    std::set<std::string> spelled;
    while (accept("|")) {
      const Token c = take();
      const std::string ctor = name_of(c);
      if (is_symbol(peek(), "(") || is_symbol(peek(), "{")) unsupported(peek(), "constructor with arguments");
      if (accept(":")) {
        const Token ty = take();
        if (ty.text != name_tok.text) unsupported(ty, "constructor with arguments");
      }
      if (std::find(ctors.begin(), ctors.end(), ctor) != ctors.end()) fail(c, "constructor '" + c.text + "' declared twice");
      ctors.push_back(ctor);
      ctor_spelling_[name_tok.text][c.text] = ctor;
    }
    if (peek().kind == Tok::Ident && peek().text == "deriving") {
      ++pos_;
      while (peek().kind == Tok::Ident && !at_command_start()) {
        ++pos_;
        if (!accept(",")) break;
      }
    }
    if (ctors.size() < 2) unsupported(name_tok, "inductive type with fewer than two constructors");
    try {
      inductives_.emplace(name_tok.text, Sort::enumeration(ctors));
    } catch (const Error& e) {
      fail(name_tok, e.detail());
    }
  }

  void parse_def() {
    const Token def_tok = take();
    const Token name_tok = take();
    if (name_tok.kind != Tok::Ident) fail(name_tok, "expected the definition's name");
    std::optional<std::string> no_unit;
    parse_binders(no_unit);
    expect(":");
    const Token type_tok = take();
    if (type_tok.kind != Tok::Ident || type_tok.text != "Prop") {
      unsupported(type_tok, "definition of type '" + describe(type_tok) + "' (only Prop is supported)");
    }
    expect(":=");
    if (def_) fail(def_tok, "more than one 'def ... : Prop' in the input");
    Formula body = parse_iff();
    if (!at_command_start()) fail(peek(), "unexpected '" + describe(peek()) + "' after the definition body");
    def_ = Result{name_tok.text, Formalized{normalize(body), sig_}};
  }

  // --- expressions -------------------------------------------------------

  static bool is_any(const Token& t, std::initializer_list<std::string_view> syms) {
    if (t.kind != Tok::Symbol) return false;
    return std::any_of(syms.begin(), syms.end(), [&](std::string_view s) { return t.text == s; });
  }

  Formula parse_iff() {
    Formula lhs = parse_implies();
    if (is_any(peek(), {"↔", "<->"})) {
      ++pos_;
      Formula rhs = parse_implies();
      if (is_any(peek(), {"↔", "<->"})) fail(peek(), "chained '↔' needs parentheses");
      return Formula::iff(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (is_any(peek(), {"→", "->"})) {
      ++pos_;
      return Formula::implies(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    if (is_any(peek(), {"∨", "\\/", "||"})) {
      ++pos_;
      return Formula::any_of({std::move(lhs), parse_or()});
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_not();
    if (is_any(peek(), {"∧", "/\\", "&&"})) {
      ++pos_;
      return Formula::all_of({std::move(lhs), parse_and()});
    }
    return lhs;
  }

  Formula parse_not() {
    if (is_any(peek(), {"¬", "!"})) {
      ++pos_;
      return Formula::negate(parse_not());
    }
    return parse_comparison();
  }

  static std::optional<CmpOp> comparison_op(const Token& t) {
    if (t.kind != Tok::Symbol) return std::nullopt;
    if (t.text == "≠") return CmpOp::Ne;
    if (t.text == "≥") return CmpOp::Ge;
    if (t.text == "≤") return CmpOp::Le;
    if (t.text == "==") return CmpOp::Eq;
    return cmp_from_symbol(t.text);
  }

  Formula parse_comparison() {
    Term lhs = parse_term();
    const auto op = comparison_op(peek());
    if (!op) {
      reject_operator(peek());
      return as_proposition(lhs);
    }
    const Token op_tok = take();
    Term rhs = parse_term();
    reject_operator(peek());
    if (comparison_op(peek())) fail(peek(), "chained comparison");
    return resolve(lhs, *op, rhs, op_tok);
  }

  void reject_operator(const Token& t) {
    if (is_any(t, {"+", "-", "*", "/", "%", "^"})) unsupported(t, "arithmetic '" + t.text + "'");
  }

  Term parse_term() {
    const Token t = peek();
    Term term;
    term.at = t;
    if (is_any(t, {"∀", "∃", "λ"}) || (t.kind == Tok::Ident && !t.quoted && (t.text == "fun" || t.text == "forall" || t.text == "exists")))
      unsupported(t, "quantifier");
    if (t.kind == Tok::Ident && !t.quoted && (t.text == "if" || t.text == "match" || t.text == "let" || t.text == "have"))
      unsupported(t, "'" + t.text + "' expression");
    if (accept("(")) {
      term.kind = Term::Prop;
      term.prop = parse_iff();
      expect(")");
      return term;
    }
    if (is_symbol(t, "-")) {
      ++pos_;
      const Token n = take();
      if (n.kind != Tok::Number) unsupported(t, "arithmetic '-'");
      term.kind = Term::Num;
      term.number = -number_of(n);
      return term;
    }
    if (t.kind == Tok::Number) {
      ++pos_;
      term.kind = Term::Num;
      term.number = number_of(t);
      return term;
    }
    if (t.kind != Tok::Ident) fail(t, "expected a term, got '" + describe(t) + "'");
    ++pos_;
    if (!t.quoted && (t.text == "true" || t.text == "false")) {
      term.kind = Term::BoolLit;
      term.boolean = t.text == "true";
      return term;
    }
    if (t.text == "True" || t.text == "False") unsupported(t, "propositional constant '" + t.text + "'");
    const auto dot = t.text.rfind('.');
    if (dot != std::string::npos) {
      term.kind = Term::Ctor;
      term.type = t.text.substr(0, dot);
      term.name = t.text.substr(dot + 1);
      if (term.name.empty()) fail(t, "malformed constructor '" + t.text + "'");
      if (!term.type.empty() && !inductives_.contains(term.type)) fail(t, "unknown type '" + term.type + "'");
      return term;
    }
    if (peek().kind == Tok::Ident || peek().kind == Tok::Number || is_symbol(peek(), "("))
      if (peek().line == t.line || !at_command_start()) unsupported(peek(), "function application");
    term.kind = Term::Var;
    term.name = t.text;
    return term;
  }

  std::int64_t number_of(const Token& t) const {
    if (t.text.find('.') != std::string::npos) unsupported(t, "decimal literal '" + t.text + "'");
    auto n = detail::parse_integer(t.text);
    if (!n) fail(t, "malformed number '" + t.text + "'");
    return *n;
  }

  /// Variable name for an identifier term, or nullopt if it is not a variable.
  std::optional<std::string> variable(const Term& t) const {
    if (t.kind != Term::Var) return std::nullopt;
    const std::string n = is_identifier(t.name) ? t.name : snake_case_identifier(t.name);
    if (sig_.contains(n) && spelled_.at(n) == t.name) return n;
    return std::nullopt;
  }

  /// Constructor of the enum sort of `var` named by `t`, if any.
  std::optional<std::string> constructor_for(const std::string& var, const Term& t) const {
    const std::string& type = var_type_.at(var);
    if (t.kind == Term::Ctor) {
      if (!t.type.empty() && t.type != type)
        fail(t.at, "'" + t.type + "." + t.name + "' does not belong to type '" + type + "' of '" + var + "'");
    } else if (t.kind != Term::Var || variable(t)) {
      return std::nullopt;
    }
    const auto& ctors = ctor_spelling_.at(type);
    auto it = ctors.find(t.name);
    if (it == ctors.end()) fail(t.at, "'" + t.name + "' is not a constructor of '" + type + "'");
    return it->second;
  }

  Formula as_proposition(const Term& t) const {
    if (t.kind == Term::Prop) return *t.prop;
    if (t.kind == Term::Var) {
      auto v = variable(t);
      if (!v) fail(t.at, "unknown identifier '" + t.name + "'");
      if (!sig_.sort_of(*v).is_bool()) fail(t.at, "'" + t.name + "' is not a proposition");
      return Formula::var(*v);
    }
    if (t.kind == Term::BoolLit) unsupported(t.at, "boolean constant used as a proposition");
    fail(t.at, "expected a proposition");
  }

  Formula resolve(const Term& lhs, CmpOp op, const Term& rhs, const Token& op_tok) const {
    const auto wrap = [&](Formula f) { return op == CmpOp::Ne ? Formula::negate(std::move(f)) : f; };
    const bool eq_like = op == CmpOp::Eq || op == CmpOp::Ne;
    const auto lv = variable(lhs);
    const auto rv = variable(rhs);
    const auto sort_of = [&](const std::optional<std::string>& v) { return v ? &sig_.sort_of(*v) : nullptr; };
    const Sort* ls = sort_of(lv);
    const Sort* rs = sort_of(rv);

    if (lhs.kind == Term::Prop || rhs.kind == Term::Prop) {
      if (!eq_like) fail(op_tok, "ordering comparison between propositions");
      return wrap(Formula::iff(as_proposition(lhs), as_proposition(rhs)));
    }
    // bool forms
    if ((ls && ls->is_bool()) || (rs && rs->is_bool())) {
      if (!eq_like) fail(op_tok, "ordering comparison on a Bool");
      if (lhs.kind == Term::BoolLit || rhs.kind == Term::BoolLit) {
        const std::string& v = lv ? *lv : *rv;
        const bool literal = lhs.kind == Term::BoolLit ? lhs.boolean : rhs.boolean;
        Formula atom = Formula::var(v);
        return wrap(literal ? atom : Formula::negate(atom));
      }
      if (ls && rs && ls->is_bool() && rs->is_bool()) return wrap(Formula::iff(Formula::var(*lv), Formula::var(*rv)));
      fail(op_tok, "Bool compared with a non-Bool");
    }
    // enum forms
    if ((ls && ls->is_enum()) || (rs && rs->is_enum())) {
      if (!eq_like) fail(op_tok, "ordering comparison on an enumeration");
      if (ls && rs) unsupported(op_tok, "equality between two enumeration variables");
      const std::string& v = ls ? *lv : *rv;
      const Term& other = ls ? rhs : lhs;
      auto ctor = constructor_for(v, other);
      if (!ctor) fail(other.at, "expected a constructor of '" + var_type_.at(v) + "'");
      return wrap(Formula::atom(Atom::enum_eq(v, *ctor)));
    }
    // numeric forms
    for (const Term* t : {&lhs, &rhs}) {
      if (t->kind == Term::Var && !variable(*t)) fail(t->at, "unknown identifier '" + t->name + "'");
      if (t->kind == Term::Ctor) fail(t->at, "constructor '" + t->name + "' compared with a number");
      if (t->kind == Term::BoolLit) fail(t->at, "boolean literal compared with a number");
    }
    if (lv && rv) return Formula::atom(Atom::compare(*lv, op, *rv));
    if (lv) return Formula::atom(Atom::compare(*lv, op, rhs.number));
    if (rv) return Formula::atom(Atom::compare(*rv, flip(op), lhs.number));
    unsupported(op_tok, "comparison between two constants");
  }

  std::vector<Token> toks_;
  std::string file_;
  std::size_t pos_ = 0;
  Signature sig_;
  std::map<std::string, std::string> spelled_;   // normalized name -> source spelling
  std::map<std::string, std::string> var_type_;  // variable -> enum type name ("" otherwise)
  std::string current_type_name_;
  std::map<std::string, Sort> inductives_;
  std::map<std::string, std::map<std::string, std::string>> ctor_spelling_;  // type -> spelling -> value
  std::optional<Result> def_;
};

}  // namespace lean_detail

struct LeanDefinition {
  std::string name;
  Formalized ir;
};

/// Parses the Lean subset back into the IR. The formula is normalized;
/// identifiers that are not already lowercase snake-case are converted.
inline LeanDefinition parse_lean_def(std::string_view text, const std::string& file = {}) {
  lean_detail::Lexer lexer(text, file);
  auto result = lean_detail::Parser(lexer.run(), file).run();
  return LeanDefinition{std::move(result.name), std::move(result.ir)};
}

// ---------------------------------------------------------------------------
// Equivalence theorem

struct LeanTheoremOptions {
  std::string theorem_name = "req1_eq_req2";
  std::string left_name;   // default_def_name when empty
  std::string right_name;
  std::string left_label = "requirement 1";
  std::string right_label = "gherkin output 1";
};

struct LeanTheorem {
  std::string header = "import Mathlib.Data.Real.Basic\n";
  std::string declarations;  // shared inductives and variable binders
  std::string left_def;
  std::string right_def;     // empty for a self-pair
  std::string statement;     // `theorem ... := by`
  std::string left_label;
  std::string right_label;

  /// Full source with a `sorry` proof.
  [[nodiscard]] std::string text() const { return body() + "  sorry\n"; }

  /// Everything up to and including `:= by`.
  [[nodiscard]] std::string body() const {
    std::string out = header + "\n" + declarations + "\n-- " + left_label + "\n" + left_def;
    if (!right_def.empty()) out += "\n-- " + right_label + "\n" + right_def;
    return out + "\n" + statement;
  }
};

/// Both definitions, one hypothesis per renaming alias and per identified
/// atom, and `theorem <name> ... : (A args) ↔ (B args) := by sorry`.
/// The right definition keeps the right side's own variable names so that the
/// hypotheses carry the grounding.
inline LeanTheorem emit_lean_theorem(const Formalized& a, const Formalized& b, const GroundingMap& g,
                                     const LeanTheoremOptions& options = {}) {
  const GroundedPair grounded = apply_grounding(a, b, g);
  LeanTheorem th;
  th.left_label = options.left_label;
  th.right_label = options.right_label;

  std::string left_name = options.left_name.empty() ? default_def_name(a.formula, "requirement_1") : options.left_name;
  std::string right_name = options.right_name.empty() ? default_def_name(b.formula, "requirement_2") : options.right_name;
  const bool self_pair = left_name == right_name && a.formula == b.formula && a.signature == b.signature && g.empty();
  if (!self_pair && left_name == right_name) right_name += "_2";

  // right formula with enum values rewritten into the shared types, names kept
  const auto rewrite = [&](const std::string& var, const std::string& value) {
    auto it = grounded.value_rewrites.find(var);
    if (it == grounded.value_rewrites.end()) return value;
    auto jt = it->second.find(value);
    return jt == it->second.end() ? value : jt->second;
  };
  const Formula right_formula = map_atoms(b.formula, [&](const Atom& atom) {
    Atom t = atom;
    if (t.kind == AtomKind::EnumEq) t.value = rewrite(atom.var, atom.value);
    return Formula::atom(std::move(t));
  });

  // declarations: left variables, then right variables under their own names
  Signature decls;
  lean_detail::TypeNames types;
  std::set<std::string> used_types;
  const auto type_for = [&](const std::string& base) {
    std::string name = lean_type_name(base);
    for (int k = 2; used_types.contains(name); ++k) name = lean_type_name(base) + std::to_string(k);
    used_types.insert(name);
    return name;
  };
  std::string inductives;
  for (const auto& d : a.signature.decls()) {
    const Sort& merged = grounded.merged.sort_of(d.name);
    if (merged.is_enum()) {
      types[d.name] = type_for(d.name);
      inductives += lean_detail::inductive_text(types[d.name], merged) + "\n";
    }
    decls.add({d.name, merged});
  }
  for (const auto& d : b.signature.decls()) {
    const std::string& merged_name = grounded.renaming.at(d.name);
    const Sort& merged = grounded.merged.sort_of(merged_name);
    if (merged.is_enum()) {
      if (a.signature.contains(merged_name)) {
        types[d.name] = types.at(merged_name);
      } else {
        types[d.name] = type_for(d.name);
        inductives += lean_detail::inductive_text(types[d.name], merged) + "\n";
      }
    }
    if (decls.contains(d.name)) {
      if (merged_name != d.name)
        throw Error(ErrorCode::EmitUnsupported, "right variable '" + d.name + "' is aliased to '" + merged_name +
                                                    "' but shares its name with a different left variable");
      continue;
    }
    decls.add({d.name, merged});
  }
  th.declarations = inductives;
  for (const auto& d : decls.decls()) th.declarations += lean_detail::variable_line(d.name, d.sort, types);

  th.left_def = emit_lean_def_body(a.formula, decls, left_name, types);
  if (!self_pair) th.right_def = emit_lean_def_body(right_formula, decls, right_name, types);

  const auto application = [&](const std::string& name, const Formula& f) {
    const auto used = free_variables(f);
    std::string out = "(" + name;
    for (const auto& d : decls.decls())
      if (used.contains(d.name)) out += " " + lean_detail::ident(d.name);
    return out + ")";
  };

  std::vector<std::string> hypotheses;
  for (const auto& alias : g.var_aliases) {
    if (alias.left == alias.right) continue;
    hypotheses.push_back("(h_" + alias.left + " : " + lean_detail::ident(alias.left) + " = " + lean_detail::ident(alias.right) + ")");
  }
  for (std::size_t k = 0; k < grounded.identified.size(); ++k) {
    const auto& id = grounded.identified[k];
    Atom right = id.right;
    if (right.kind == AtomKind::EnumEq) right.value = rewrite(right.var, right.value);
    hypotheses.push_back("(h_atom_" + std::to_string(k + 1) + " : (" + lean_detail::atom_text(id.left, decls, types) +
                         ") ↔ (" + lean_detail::atom_text(right, decls, types) + "))");
  }

  th.statement = "theorem " + options.theorem_name;
  if (hypotheses.empty()) {
    th.statement += " :\n";
  } else {
    for (std::size_t i = 0; i < hypotheses.size(); ++i) th.statement += "\n" + hypotheses[i];
    th.statement += ":\n";
  }
  th.statement += application(left_name, a.formula) + " ↔\n" +
                  application(self_pair ? left_name : right_name, self_pair ? a.formula : right_formula) + " := by\n";
  return th;
}

}  // namespace reqeq
