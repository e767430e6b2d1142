#pragma once

// Controlled-language phrase rules shared by the requirement and Gherkin
// frontends: tokenization, operator word forms, and the mapping from
// condition/action phrases to atoms.

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reqeq/error.hpp"
#include "reqeq/identifier.hpp"
#include "reqeq/ir.hpp"
#include "reqeq/ir_text.hpp"

namespace reqeq::phrase {

enum class TokenKind { Word, Number, Op, Comma, Quoted, Placeholder };

struct Token {
  TokenKind kind = TokenKind::Word;
  std::string text;      // operator tokens hold the IR symbol (">=", ...)
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string placeholder;  // set on tokens substituted for `<placeholder>`

  [[nodiscard]] bool is_word(std::string_view w) const {
    if (kind != TokenKind::Word || text.size() != w.size()) return false;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (reqeq::detail::ascii_lower(text[i]) != w[i]) return false;
    return true;
  }
};

using Tokens = std::vector<Token>;

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

struct SymbolOp {
  std::string_view spelling;
  std::string_view symbol;
};

// longest spellings first
inline constexpr std::array<SymbolOp, 10> kSymbolOps{{
    {"≥", ">="}, {"≤", "<="}, {"≠", "!="}, {">=", ">="}, {"<=", "<="},
    {"!=", "!="}, {"==", "="}, {"=", "="}, {">", ">"}, {"<", "<"},
}};

struct WordOp {
  std::vector<std::string_view> words;
  std::string_view symbol;
};

/// Word forms of the comparison operators. Strict forms map to strict
/// operators; "or equal to" and "at least"/"at most" are the non-strict ones.
inline const std::vector<WordOp>& word_ops() {
  static const std::vector<WordOp> ops = [] {
    std::vector<WordOp> v{
        {{"is", "greater", "than", "or", "equal", "to"}, ">="},
        {{"greater", "than", "or", "equal", "to"}, ">="},
        {{"is", "less", "than", "or", "equal", "to"}, "<="},
        {{"less", "than", "or", "equal", "to"}, "<="},
        {{"is", "not", "equal", "to"}, "!="},
        {{"is", "greater", "than"}, ">"},
        {{"greater", "than"}, ">"},
        {{"is", "less", "than"}, "<"},
        {{"less", "than"}, "<"},
        {{"is", "at", "least"}, ">="},
        {{"at", "least"}, ">="},
        {{"is", "at", "most"}, "<="},
        {{"at", "most"}, "<="},
        {{"is", "equal", "to"}, "="},
        {{"equal", "to"}, "="},
        {{"equals"}, "="},
    };
    std::stable_sort(v.begin(), v.end(), [](const WordOp& a, const WordOp& b) { return a.words.size() > b.words.size(); });
    return v;
  }();
  return ops;
}

}  // namespace detail

/// Splits a sentence into tokens. `<name>` is read as a placeholder only when
/// `placeholders` is set, so requirement text keeps `<` as less-than.
inline Tokens tokenize(std::string_view text, bool placeholders, const SourceLocation& origin) {
  Tokens out;
  std::size_t i = 0;
  const auto fail = [&](const std::string& why, std::size_t at) {
    SourceLocation where = origin;
    where.column = origin.column + at;
    where.offset = origin.offset + at;
    throw Error(ErrorCode::ParseError, why, where);
  };
  while (i < text.size()) {
    const char c = text[i];
    if (detail::is_space(c)) {
      ++i;
      continue;
    }
    if (c == ',') {
      out.push_back({TokenKind::Comma, ",", i, 1, {}});
      ++i;
      continue;
    }
    if (c == '"' || text.substr(i).starts_with("“")) {
      const bool curly = c != '"';
      const std::string_view close = curly ? "”" : "\"";
      const std::size_t start = i + (curly ? std::string_view("“").size() : 1);
      const std::size_t end = text.find(close, start);
      if (end == std::string_view::npos) fail("unterminated quotation", i);
      out.push_back({TokenKind::Quoted, std::string(text.substr(start, end - start)), i, end + close.size() - i, {}});
      i = end + close.size();
      continue;
    }
    if (placeholders && c == '<') {
      const std::size_t end = text.find('>', i);
      if (end != std::string_view::npos) {
        const std::string name(reqeq::detail::trim(text.substr(i + 1, end - i - 1)));
        if (!name.empty() && name.find('<') == std::string::npos) {
          out.push_back({TokenKind::Placeholder, name, i, end + 1 - i, {}});
          i = end + 1;
          continue;
        }
      }
    }
    bool matched = false;
    for (const auto& op : detail::kSymbolOps) {
      if (text.substr(i).starts_with(op.spelling)) {
        out.push_back({TokenKind::Op, std::string(op.symbol), i, op.spelling.size(), {}});
        i += op.spelling.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    const bool negative_number = c == '-' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || negative_number) {
      std::size_t j = i + 1;
      while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) ++j;
      std::string number(text.substr(i, j - i));
      // a trailing period ends the sentence, it is not a decimal point
      if (number.back() == '.') {
        number.pop_back();
      }
      out.push_back({TokenKind::Number, number, i, number.size(), {}});
      i += number.size();
      continue;
    }
    std::size_t j = i;
    while (j < text.size()) {
      const char d = text[j];
      if (detail::is_space(d) || d == ',' || d == '"') break;
      if (text.substr(j).starts_with("“")) break;
      bool op_start = false;
      for (const auto& op : detail::kSymbolOps)
        if (text.substr(j).starts_with(op.spelling)) op_start = true;
      if (op_start) break;
      ++j;
    }
    std::string word(text.substr(i, j - i));
    const std::size_t length = word.size();
    while (!word.empty() && (word.back() == '.' || word.back() == ';' || word.back() == ':')) word.pop_back();
    if (!word.empty()) out.push_back({TokenKind::Word, std::move(word), i, length, {}});
    i = j;
  }
  return out;
}

/// Replaces multi-word comparison phrases ("greater than or equal to") by a
/// single operator token, and folds an "is" directly before a symbolic
/// operator into it.
inline Tokens merge_operator_words(const Tokens& in) {
  Tokens out;
  for (std::size_t i = 0; i < in.size();) {
    bool merged = false;
    for (const auto& op : detail::word_ops()) {
      if (i + op.words.size() > in.size()) continue;
      bool all = true;
      for (std::size_t k = 0; k < op.words.size() && all; ++k) all = in[i + k].is_word(op.words[k]);
      if (!all) continue;
      const Token& last = in[i + op.words.size() - 1];
      out.push_back({TokenKind::Op, std::string(op.symbol), in[i].offset, last.offset + last.length - in[i].offset, {}});
      i += op.words.size();
      merged = true;
      break;
    }
    if (merged) continue;
    if (in[i].is_word("is") && i + 1 < in.size() && in[i + 1].kind == TokenKind::Op) {
      ++i;
      continue;
    }
    out.push_back(in[i]);
    ++i;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sort evidence
// ---------------------------------------------------------------------------

/// One piece of evidence about a variable's sort, recorded where a phrase
/// uses the variable.
struct Usage {
  std::string var;
  SortKind kind = SortKind::Bool;
  std::string enum_value;
  std::optional<std::string> unit;
  SourceLocation where;
  std::string original;
};

/// Accumulates usages into a Signature. Enum vocabularies grow with every
/// distinct value mentioned; a variable mentioned with a single value gets the
/// complement value `other` so its sort stays a proper enum.
class Vocabulary {
 public:
  static constexpr std::string_view kComplementValue = "other";

  void record(const Usage& u) {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == u.var; });
    if (it == entries_.end()) {
      entries_.push_back(Entry{u.var, u.kind, {}, u.unit, Provenance{u.where.file, u.where.line, u.original}});
      it = std::prev(entries_.end());
    } else if (it->kind != u.kind) {
      throw Error(ErrorCode::ConflictingSort,
                  "'" + u.var + "' is used as " + std::string(sort_kind_name(it->kind)) + " and as " +
                      std::string(sort_kind_name(u.kind)),
                  u.where);
    }
    if (u.kind == SortKind::Enum && std::find(it->values.begin(), it->values.end(), u.enum_value) == it->values.end())
      it->values.push_back(u.enum_value);
    if (u.kind == SortKind::Numeric && !it->unit && u.unit) it->unit = u.unit;
  }

  [[nodiscard]] Signature signature() const {
    Signature sig;
    for (const auto& e : entries_) {
      Sort sort = Sort::boolean();
      if (e.kind == SortKind::Numeric) {
        sort = Sort::numeric(e.unit);
      } else if (e.kind == SortKind::Enum) {
        auto values = e.values;
        if (values.size() == 1) values.emplace_back(kComplementValue);
        sort = Sort::enumeration(std::move(values));
      }
      sig.add(VariableDecl{e.name, std::move(sort)}, e.origin);
    }
    return sig;
  }

 private:
  struct Entry {
    std::string name;
    SortKind kind;
    std::vector<std::string> values;
    std::optional<std::string> unit;
    Provenance origin;
  };
  std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Phrase -> atom
// ---------------------------------------------------------------------------

enum class Form { Is, ChangesTo, Compare, Initiate, SetTo };

/// A compiled condition or action phrase.
struct PhraseAtom {
  Form form = Form::Is;
  std::string subject;  // noun-phrase variable name
  std::string var;      // variable actually used (differs when a placeholder names it)
  Formula formula = Formula::var("x");
  std::vector<Usage> usages;
};

/// Per-sentence context: where the tokens came from, and whether an enum
/// value drawn from a placeholder names the variable after the placeholder.
struct Context {
  std::string_view sentence;
  SourceLocation origin;
  bool placeholder_names = false;

  [[nodiscard]] SourceLocation at(std::size_t offset) const {
    SourceLocation where = origin;
    where.column = origin.column + offset;
    where.offset = origin.offset + offset;
    return where;
  }

  [[nodiscard]] std::string span_text(std::span<const Token> toks) const {
    if (toks.empty()) return {};
    const std::size_t begin = toks.front().offset;
    const std::size_t end = toks.back().offset + toks.back().length;
    if (sentence.empty() || end > sentence.size()) {
      std::string out;
      for (const auto& t : toks) out += (out.empty() ? "" : " ") + t.text;
      return out;
    }
    return std::string(sentence.substr(begin, end - begin));
  }

  [[noreturn]] void unsupported(std::span<const Token> toks, const std::string& why) const {
    const std::size_t at = toks.empty() ? 0 : toks.front().offset;
    throw Error(ErrorCode::UnsupportedPhrase, why + ": \"" + span_text(toks) + "\"", this->at(at));
  }

  [[noreturn]] void parse_error(std::size_t offset, const std::string& why) const {
    throw Error(ErrorCode::ParseError, why, at(offset));
  }
};

namespace detail {

inline bool is_article(const Token& t) { return t.is_word("the") || t.is_word("a") || t.is_word("an"); }

inline std::span<const Token> strip_articles(std::span<const Token> toks) {
  while (!toks.empty() && is_article(toks.front())) toks = toks.subspan(1);
  return toks;
}

inline std::string noun_phrase(std::span<const Token> toks, const Context& ctx, std::string_view role) {
  toks = strip_articles(toks);
  if (toks.empty()) ctx.unsupported(toks, "missing " + std::string(role));
  std::vector<std::string> words;
  for (const auto& t : toks) {
    if (t.kind == TokenKind::Op || t.kind == TokenKind::Comma) ctx.unsupported(toks, "unexpected operator in " + std::string(role));
    if (t.kind == TokenKind::Placeholder) ctx.unsupported(toks, "placeholder <" + t.text + "> has no value here");
    words.push_back(t.text);
  }
  std::string name = snake_case_words(words);
  if (name.empty()) ctx.unsupported(toks, "empty " + std::string(role));
  return name;
}

inline std::optional<bool> polarity(std::span<const Token> toks) {
  if (toks.size() != 1) return std::nullopt;
  const Token& t = toks.front();
  if (t.kind != TokenKind::Word && t.kind != TokenKind::Quoted) return std::nullopt;
  std::string lower;
  for (char c : t.text) lower += reqeq::detail::ascii_lower(c);
  if (lower == "true") return true;
  if (lower == "false") return false;
  return std::nullopt;
}

/// Name of the placeholder every token of `toks` was substituted from, if any.
inline std::optional<std::string> placeholder_source(std::span<const Token> toks) {
  if (toks.empty() || toks.front().placeholder.empty()) return std::nullopt;
  for (const auto& t : toks)
    if (t.placeholder != toks.front().placeholder) return std::nullopt;
  return toks.front().placeholder;
}

inline std::optional<std::int64_t> integer_token(const Token& t, const Context& ctx) {
  if (t.kind != TokenKind::Number) return std::nullopt;
  if (t.text.find('.') != std::string::npos) {
    std::array<Token, 1> one{t};
    ctx.unsupported(one, "non-integer constant");
  }
  auto n = reqeq::detail::parse_integer(t.text);
  if (!n) {
    std::array<Token, 1> one{t};
    ctx.unsupported(one, "integer out of range");
  }
  return n;
}

inline std::string original_text(std::span<const Token> toks, const Context& ctx) {
  return ctx.span_text(strip_articles(toks));
}

/// `<subject> is [not] <value>` and `<subject> changes to <value>` share the
/// value rules: TRUE/FALSE is a boolean polarity, an integer is a numeric
/// equality, anything else is an enum value.
inline PhraseAtom state_atom(Form form, std::span<const Token> subject_toks, std::span<const Token> value_toks,
                             bool negated, const Context& ctx) {
  PhraseAtom out;
  out.form = form;
  out.subject = noun_phrase(subject_toks, ctx, "subject");
  out.var = out.subject;
  const SourceLocation where = ctx.at(strip_articles(subject_toks).front().offset);
  const std::string original = original_text(subject_toks, ctx);
  if (value_toks.empty()) ctx.unsupported(subject_toks, "missing value after the verb");

  if (auto pol = polarity(value_toks)) {
    const bool positive = *pol != negated;
    out.formula = positive ? Formula::var(out.var) : Formula::negate(Formula::var(out.var));
    out.usages.push_back(Usage{out.var, SortKind::Bool, {}, std::nullopt, where, original});
    return out;
  }
  if (value_toks.size() <= 2 && value_toks.front().kind == TokenKind::Number) {
    const auto n = integer_token(value_toks.front(), ctx);
    std::optional<std::string> unit;
    if (value_toks.size() == 2) unit = value_toks[1].text;
    out.formula = Formula::atom(Atom::compare(out.var, negated ? CmpOp::Ne : CmpOp::Eq, *n));
    out.usages.push_back(Usage{out.var, SortKind::Numeric, {}, unit, where, original});
    return out;
  }

  std::vector<std::string> words;
  for (const auto& t : value_toks) {
    if (t.kind == TokenKind::Op || t.kind == TokenKind::Comma) ctx.unsupported(value_toks, "unexpected operator in value");
    if (t.kind == TokenKind::Placeholder) ctx.unsupported(value_toks, "placeholder <" + t.text + "> has no value here");
    words.push_back(t.text);
  }
  // "is not plugged in": a multi-word state after "not" names its own value;
  // "is not fastened" negates the single-word state.
  bool negate_atom = negated;
  if (negated && value_toks.size() > 1) {
    words.insert(words.begin(), "not");
    negate_atom = false;
  }
  const std::string value = snake_case_words(words);
  if (value.empty()) ctx.unsupported(value_toks, "empty value");
  if (ctx.placeholder_names) {
    if (auto ph = placeholder_source(value_toks)) {
      out.var = snake_case_identifier(*ph);
    }
  }
  Formula atom = Formula::atom(Atom::enum_eq(out.var, value));
  out.formula = negate_atom ? Formula::negate(std::move(atom)) : std::move(atom);
  out.usages.push_back(Usage{out.var, SortKind::Enum, value, std::nullopt, where,
                             out.var == out.subject ? original : std::string(*placeholder_source(value_toks))});
  return out;
}

inline PhraseAtom comparison_atom(std::span<const Token> toks, std::size_t op_at, const Context& ctx) {
  std::span<const Token> lhs = strip_articles(toks.subspan(0, op_at));
  std::span<const Token> rhs = strip_articles(toks.subspan(op_at + 1));
  CmpOp op = *cmp_from_symbol(toks[op_at].text);
  if (lhs.empty()) ctx.parse_error(toks[op_at].offset, "expected a quantity before '" + toks[op_at].text + "'");
  if (rhs.empty()) ctx.parse_error(toks[op_at].offset + toks[op_at].length, "expected a quantity or constant after '" + toks[op_at].text + "'");

  // "10 <= speed" reads as "speed >= 10"
  if (lhs.size() <= 2 && lhs.front().kind == TokenKind::Number && rhs.front().kind != TokenKind::Number) {
    std::swap(lhs, rhs);
    op = flip(op);
  }

  PhraseAtom out;
  out.form = Form::Compare;
  out.subject = noun_phrase(lhs, ctx, "quantity");
  out.var = out.subject;
  const std::string original = ctx.span_text(lhs);
  if (rhs.front().kind == TokenKind::Number) {
    if (rhs.size() > 2) ctx.unsupported(rhs, "expected '<integer> [unit]'");
    const auto n = integer_token(rhs.front(), ctx);
    std::optional<std::string> unit;
    if (rhs.size() == 2) unit = rhs[1].text;
    out.formula = Formula::atom(Atom::compare(out.var, op, *n));
    out.usages.push_back(Usage{out.var, SortKind::Numeric, {}, unit, ctx.at(lhs.front().offset), original});
    return out;
  }
  // "CALIBRATABLE <name>" stays in the variable name: it is a parameter.
  const std::string other = noun_phrase(rhs, ctx, "quantity");
  out.formula = Formula::atom(Atom::compare(out.var, op, other));
  out.usages.push_back(Usage{out.var, SortKind::Numeric, {}, std::nullopt, ctx.at(lhs.front().offset), original});
  out.usages.push_back(Usage{other, SortKind::Numeric, {}, std::nullopt, ctx.at(rhs.front().offset), ctx.span_text(rhs)});
  return out;
}

inline std::optional<std::size_t> find_word(std::span<const Token> toks, std::string_view w) {
  for (std::size_t i = 0; i < toks.size(); ++i)
    if (toks[i].is_word(w)) return i;
  return std::nullopt;
}

inline std::optional<std::size_t> find_sequence(std::span<const Token> toks, std::initializer_list<std::string_view> seq) {
  const std::vector<std::string_view> words(seq);
  for (std::size_t i = 0; i + words.size() <= toks.size(); ++i) {
    bool all = true;
    for (std::size_t k = 0; k < words.size() && all; ++k) all = toks[i + k].is_word(words[k]);
    if (all) return i;
  }
  return std::nullopt;
}

}  // namespace detail

/// Condition phrase: a comparison, "<X> changes to <v>", or "<X> is [not] <v>".
inline PhraseAtom condition(std::span<const Token> toks, const Context& ctx) {
  if (toks.empty()) ctx.parse_error(0, "expected a condition");
  for (std::size_t i = 0; i < toks.size(); ++i)
    if (toks[i].kind == TokenKind::Op) return detail::comparison_atom(toks, i, ctx);
  for (auto verb : {"changes", "change", "changed"}) {
    if (auto at = detail::find_sequence(toks, {verb, "to"})) {
      return detail::state_atom(Form::ChangesTo, toks.subspan(0, *at), toks.subspan(*at + 2), false, ctx);
    }
  }
  for (auto verb : {"is", "are"}) {
    if (auto at = detail::find_word(toks, verb)) {
      auto value = toks.subspan(*at + 1);
      const bool negated = !value.empty() && value.front().is_word("not");
      if (negated) value = value.subspan(1);
      return detail::state_atom(Form::Is, toks.subspan(0, *at), value, negated, ctx);
    }
  }
  ctx.unsupported(toks, "condition is not a comparison, 'is' or 'changes to' phrase");
}

/// Action phrase: "initiate <X>" or "<X> shall be set to <v>".
inline PhraseAtom action(std::span<const Token> toks, const Context& ctx) {
  if (toks.empty()) ctx.parse_error(0, "expected an action after 'then'");
  if (toks.front().is_word("initiate")) {
    PhraseAtom out;
    out.form = Form::Initiate;
    const auto rest = toks.subspan(1);
    out.subject = detail::noun_phrase(rest, ctx, "action object");
    out.var = out.subject;
    out.formula = Formula::var(out.var);
    out.usages.push_back(Usage{out.var, SortKind::Bool, {}, std::nullopt,
                               ctx.at(detail::strip_articles(rest).front().offset), detail::original_text(rest, ctx)});
    return out;
  }
  if (auto at = detail::find_sequence(toks, {"shall", "be", "set", "to"})) {
    PhraseAtom out = detail::state_atom(Form::SetTo, toks.subspan(0, *at), toks.subspan(*at + 4), false, ctx);
    return out;
  }
  ctx.unsupported(toks, "action is not 'initiate <X>' or '<X> shall be set to <value>'");
}

/// Renames `from` to `to` inside a compiled phrase.
inline void rename(PhraseAtom& p, const std::string& from, const std::string& to) {
  if (p.var == from) p.var = to;
  p.formula = map_atoms(p.formula, [&](Atom a) {
    if (a.var == from) a.var = to;
    if (a.kind == AtomKind::NumCmp && !a.rhs_is_constant() && a.rhs_variable() == from) a.rhs = to;
    return Formula::atom(std::move(a));
  });
  for (auto& u : p.usages)
    if (u.var == from) u.var = to;
}

}  // namespace reqeq::phrase
