#pragma once

// Rule-based formalizer for the controlled requirement grammar:
//
//   req    := opener cond (sep cond)* ["," ] "then" action
//   opener := "If" | "When" | "Given"
//   sep    := "AND" | "OR" | "," | "When" | "Given" | "If"   (case-insensitive)
//
// AND binds tighter than OR; a run of separators such as ", or" counts as OR
// when it contains "or" and as AND otherwise. See phrase.hpp for the
// condition and action phrase rules.

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reqeq/ir.hpp"
#include "reqeq/phrase.hpp"

namespace reqeq {

struct RequirementDoc {
  std::string id;
  std::string text;
  SourceLocation where;  // position of the first character of `text`
};

namespace detail {

inline bool is_opener(const phrase::Token& t) { return t.is_word("if") || t.is_word("when") || t.is_word("given"); }

inline bool is_separator(const phrase::Token& t) {
  return t.kind == phrase::TokenKind::Comma || t.is_word("and") || t.is_word("or") || is_opener(t);
}

}  // namespace detail

/// Compiles one requirement sentence to `conditions -> action`.
inline Formalized parse_requirement(const RequirementDoc& doc) {
  using phrase::Token;
  SourceLocation origin = doc.where;
  if (origin.line == 0) origin.line = 1;
  if (origin.column == 0) origin.column = 1;
  const phrase::Context ctx{doc.text, origin, false};

  if (reqeq::detail::trim(doc.text).empty()) ctx.parse_error(0, "empty requirement text");
  const phrase::Tokens tokens = phrase::merge_operator_words(phrase::tokenize(doc.text, false, origin));
  if (tokens.empty() || !detail::is_opener(tokens.front()))
    ctx.parse_error(tokens.empty() ? 0 : tokens.front().offset, "expected 'If', 'When' or 'Given' at the start");

  std::size_t then_at = 0;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (tokens[i].is_word("then")) {
      then_at = i;
      break;
    }
  }
  if (then_at == 0) ctx.parse_error(doc.text.size(), "expected 'then' before the action");

  std::span<const Token> conds(tokens.data() + 1, then_at - 1);
  while (!conds.empty() && conds.back().kind == phrase::TokenKind::Comma) conds = conds.first(conds.size() - 1);
  if (conds.empty()) ctx.parse_error(tokens[then_at].offset, "expected a condition before 'then'");

  // split into condition phrases; each separator run yields AND or OR
  std::vector<std::vector<Formula>> or_groups(1);
  std::vector<phrase::Usage> usages;
  std::size_t i = 0;
  while (i < conds.size()) {
    if (detail::is_separator(conds[i])) {
      const std::size_t run_start = i;
      bool is_or = false;
      while (i < conds.size() && detail::is_separator(conds[i])) {
        is_or = is_or || conds[i].is_word("or");
        ++i;
      }
      if (run_start == 0) ctx.parse_error(conds[0].offset, "expected a condition, got '" + conds[0].text + "'");
      if (i == conds.size())
        ctx.parse_error(tokens[then_at].offset, "expected a condition after '" + conds[run_start].text + "'");
      if (is_or) or_groups.emplace_back();
      continue;
    }
    const std::size_t start = i;
    while (i < conds.size() && !detail::is_separator(conds[i])) ++i;
    phrase::PhraseAtom atom = phrase::condition(conds.subspan(start, i - start), ctx);
    or_groups.back().push_back(atom.formula);
    usages.insert(usages.end(), atom.usages.begin(), atom.usages.end());
  }

  std::span<const Token> act(tokens.data() + then_at + 1, tokens.size() - then_at - 1);
  if (act.empty()) ctx.parse_error(doc.text.size(), "expected an action after 'then'");
  phrase::PhraseAtom action = phrase::action(act, ctx);
  usages.insert(usages.end(), action.usages.begin(), action.usages.end());

  phrase::Vocabulary vocab;
  for (const auto& u : usages) vocab.record(u);

  std::vector<Formula> disjuncts;
  for (auto& group : or_groups) disjuncts.push_back(conjoin(std::move(group)));
  return Formalized{normalize(Formula::implies(disjoin(std::move(disjuncts)), action.formula)), vocab.signature()};
}

inline Formalized parse_requirement(std::string_view text) {
  return parse_requirement(RequirementDoc{"requirement", std::string(text), {}});
}

/// Reads a requirement file: either one bare sentence (possibly wrapped over
/// several lines) or a list of blocks
///
///   id: r1
///   text: If ... then ...
///
/// separated by blank lines. Continuation lines extend the preceding `text:`.
inline std::vector<RequirementDoc> read_requirements(std::string_view content, const std::string& file = {},
                                                     const std::string& default_id = "requirement") {
  struct Line {
    std::size_t number;
    std::string_view text;
  };
  std::vector<Line> lines;
  {
    std::size_t pos = 0, number = 0;
    while (pos <= content.size()) {
      const auto eol = content.find('\n', pos);
      std::string_view raw = content.substr(pos, eol == std::string_view::npos ? content.size() - pos : eol - pos);
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      lines.push_back({++number, raw});
      if (eol == std::string_view::npos) break;
      pos = eol + 1;
    }
  }
  const auto first = std::find_if(lines.begin(), lines.end(), [](const Line& l) { return !reqeq::detail::trim(l.text).empty(); });
  if (first == lines.end()) throw Error(ErrorCode::ParseError, "empty requirement file", SourceLocation{file, 1, 1, 0});

  std::vector<RequirementDoc> docs;
  if (!reqeq::detail::trim(first->text).starts_with("id:")) {
    RequirementDoc doc{default_id, {}, SourceLocation{file, first->number, 1, 0}};
    for (auto it = first; it != lines.end(); ++it) {
      const auto t = reqeq::detail::trim(it->text);
      if (t.empty()) continue;
      if (!doc.text.empty()) doc.text += ' ';
      doc.text += t;
    }
    docs.push_back(std::move(doc));
    return docs;
  }

  std::optional<RequirementDoc> current;
  bool in_text = false;
  const auto flush = [&](std::size_t line) {
    if (!current) return;
    if (current->text.empty())
      throw Error(ErrorCode::ParseError, "requirement '" + current->id + "' has no text", SourceLocation{file, line, 1, 0});
    docs.push_back(std::move(*current));
    current.reset();
  };
  for (auto it = first; it != lines.end(); ++it) {
    const auto t = reqeq::detail::trim(it->text);
    if (t.empty()) {
      flush(it->number);
      in_text = false;
      continue;
    }
    if (t.starts_with("#")) continue;
    if (t.starts_with("id:")) {
      flush(it->number);
      const std::string id(reqeq::detail::trim(t.substr(3)));
      if (id.empty()) throw Error(ErrorCode::ParseError, "empty requirement id", SourceLocation{file, it->number, 1, 0});
      current = RequirementDoc{id, {}, {}};
      in_text = false;
    } else if (t.starts_with("text:")) {
      if (!current) throw Error(ErrorCode::ParseError, "'text:' without a preceding 'id:'", SourceLocation{file, it->number, 1, 0});
      const auto body = reqeq::detail::trim(t.substr(5));
      const std::size_t column = static_cast<std::size_t>(body.data() - it->text.data()) + 1;
      current->text = std::string(body);
      current->where = SourceLocation{file, it->number, column, 0};
      in_text = true;
    } else if (in_text) {
      current->text += ' ';
      current->text += t;
    } else {
      throw Error(ErrorCode::ParseError, "expected 'id:' or 'text:'", SourceLocation{file, it->number, 1, 0});
    }
  }
  flush(lines.back().number);
  return docs;
}

}  // namespace reqeq
