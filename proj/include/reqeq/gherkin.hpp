#pragma once

// Gherkin subset: Feature, Scenario / Scenario Outline, Given/When/Then/And/But
// steps and `|`-delimited Examples tables. A scenario compiles to the
// conjunction over its example rows of (Given ∧ When → Then).

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "reqeq/ir.hpp"
#include "reqeq/phrase.hpp"

namespace reqeq {

enum class StepGroup { Given, When, Then };

struct Step {
  std::string text;
  SourceLocation where;  // position of the first character of `text`
};

struct ExamplesTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<SourceLocation> row_where;
};

struct GherkinScenario {
  std::string title;
  bool outline = false;
  std::vector<Step> given_steps;
  std::vector<Step> when_steps;
  std::vector<Step> then_steps;
  ExamplesTable examples;
  SourceLocation where;
};

/// Placeholder names referenced by a step template, in order of appearance.
inline std::vector<std::string> step_placeholders(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string_view::npos) {
    const auto end = text.find('>', pos);
    if (end == std::string_view::npos) break;
    const std::string name(reqeq::detail::trim(text.substr(pos + 1, end - pos - 1)));
    if (!name.empty() && name.find('<') == std::string::npos) out.push_back(name);
    pos = end + 1;
  }
  return out;
}

namespace detail {

inline std::optional<std::string_view> strip_keyword(std::string_view line, std::string_view keyword) {
  if (!line.starts_with(keyword)) return std::nullopt;
  return trim(line.substr(keyword.size()));
}

/// Splits `| a | b |` into trimmed cells; `\|` escapes a literal bar.
inline std::vector<std::string> table_cells(std::string_view line) {
  std::vector<std::string> cells;
  std::string current;
  bool started = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '\\' && i + 1 < line.size() && line[i + 1] == '|') {
      current += '|';
      ++i;
    } else if (c == '|') {
      if (started) cells.emplace_back(trim(current));
      started = true;
      current.clear();
    } else {
      current += c;
    }
  }
  if (!trim(current).empty()) cells.emplace_back(trim(current));
  return cells;
}

inline void validate_scenario(const GherkinScenario& s) {
  if (s.then_steps.empty()) throw Error(ErrorCode::ParseError, "scenario '" + s.title + "' has no Then step", s.where);
  if (!s.examples.header.empty() && s.examples.rows.empty())
    throw Error(ErrorCode::TableShapeError, "Examples table of '" + s.title + "' has no data rows", s.where);
  const std::set<std::string> columns(s.examples.header.begin(), s.examples.header.end());
  for (const auto* group : {&s.given_steps, &s.when_steps, &s.then_steps}) {
    for (const auto& step : *group) {
      for (const auto& name : step_placeholders(step.text)) {
        if (!columns.contains(name))
          throw Error(ErrorCode::UnboundPlaceholder, "placeholder <" + name + "> has no Examples column", step.where);
      }
    }
  }
}

}  // namespace detail

/// Parses a `.feature` file into its scenarios.
inline std::vector<GherkinScenario> parse_feature(std::string_view text, const std::string& file = {}) {
  std::vector<GherkinScenario> scenarios;
  std::optional<GherkinScenario> current;
  StepGroup group = StepGroup::Given;
  bool have_group = false;
  bool in_examples = false;
  bool examples_header_seen = false;
  bool feature_seen = false;

  const auto finish = [&] {
    if (!current) return;
    detail::validate_scenario(*current);
    scenarios.push_back(std::move(*current));
    current.reset();
  };

  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    const std::string_view line = detail::trim(raw);
    const std::size_t indent = static_cast<std::size_t>(line.data() - raw.data());
    const auto here = [&](std::size_t column_offset = 0) {
      return SourceLocation{file, line_no, indent + column_offset + 1, 0};
    };
    if (line.empty() || line.starts_with("#") || line.starts_with("@")) continue;

    if (line.starts_with("\"\"\"") || line.starts_with("```"))
      throw Error(ErrorCode::ParseError, "doc strings are not supported", here());
    if (detail::strip_keyword(line, "Feature:")) {
      if (feature_seen) throw Error(ErrorCode::ParseError, "a second Feature in one file", here());
      feature_seen = true;
      continue;
    }
    if (detail::strip_keyword(line, "Background:") || detail::strip_keyword(line, "Rule:"))
      throw Error(ErrorCode::ParseError, "'" + std::string(line.substr(0, line.find(':'))) + "' is not supported", here());

    std::optional<std::string_view> title;
    bool outline = false;
    if ((title = detail::strip_keyword(line, "Scenario Outline:")) || (title = detail::strip_keyword(line, "Scenario Template:"))) {
      outline = true;
    } else if (!(title = detail::strip_keyword(line, "Scenario:"))) {
      title = detail::strip_keyword(line, "Example:");
    }
    if (title) {
      finish();
      current = GherkinScenario{std::string(*title), outline, {}, {}, {}, {}, here()};
      have_group = false;
      in_examples = false;
      examples_header_seen = false;
      continue;
    }

    if (detail::strip_keyword(line, "Examples:") || detail::strip_keyword(line, "Scenarios:")) {
      if (!current) throw Error(ErrorCode::ParseError, "Examples outside a scenario", here());
      in_examples = true;
      examples_header_seen = false;
      continue;
    }

    if (line.starts_with("|")) {
      if (!in_examples) throw Error(ErrorCode::ParseError, "data tables attached to steps are not supported", here());
      auto cells = detail::table_cells(line);
      auto& table = current->examples;
      if (!examples_header_seen) {
        examples_header_seen = true;
        if (cells.empty()) throw Error(ErrorCode::TableShapeError, "empty Examples header", here());
        std::set<std::string> unique(cells.begin(), cells.end());
        if (unique.size() != cells.size()) throw Error(ErrorCode::TableShapeError, "duplicate column in Examples header", here());
        if (!table.header.empty() && table.header != cells)
          throw Error(ErrorCode::TableShapeError, "Examples header differs from the previous Examples block", here());
        table.header = std::move(cells);
        continue;
      }
      if (cells.size() != table.header.size())
        throw Error(ErrorCode::TableShapeError,
                    "row has " + std::to_string(cells.size()) + " cells, header has " + std::to_string(table.header.size()),
                    here());
      table.rows.push_back(std::move(cells));
      table.row_where.push_back(here());
      continue;
    }

    struct Keyword {
      std::string_view word;
      StepGroup group;
      bool continues;  // And/But/*: stay in the previous group
    };
    static constexpr Keyword kSteps[] = {{"Given ", StepGroup::Given, false}, {"When ", StepGroup::When, false},
                                         {"Then ", StepGroup::Then, false},   {"And ", StepGroup::Given, true},
                                         {"But ", StepGroup::Given, true},    {"* ", StepGroup::Given, true}};
    bool is_step = false;
    for (const auto& kw : kSteps) {
      const bool bare = line == detail::trim(kw.word);
      if (!line.starts_with(kw.word) && !bare) continue;
      is_step = true;
      if (!current) throw Error(ErrorCode::ParseError, "step outside a scenario", here());
      if (in_examples) throw Error(ErrorCode::ParseError, "step after the Examples table", here());
      if (!kw.continues) {
        group = kw.group;
        have_group = true;
      } else if (!have_group) {
        throw Error(ErrorCode::ParseError, "'" + std::string(detail::trim(kw.word)) + "' without a preceding Given/When/Then", here());
      }
      const std::string_view body = bare ? std::string_view{} : detail::trim(line.substr(kw.word.size()));
      if (body.empty()) throw Error(ErrorCode::ParseError, "empty step", here());
      Step step{std::string(body), here(static_cast<std::size_t>(body.data() - line.data()))};
      switch (group) {
        case StepGroup::Given: current->given_steps.push_back(std::move(step)); break;
        case StepGroup::When: current->when_steps.push_back(std::move(step)); break;
        case StepGroup::Then: current->then_steps.push_back(std::move(step)); break;
      }
      break;
    }
    if (is_step) continue;

    // free-form description lines are allowed before the first step
    const bool has_steps = current && (!current->given_steps.empty() || !current->when_steps.empty() || !current->then_steps.empty());
    if (has_steps || in_examples)
      throw Error(ErrorCode::ParseError, "unexpected line '" + std::string(line) + "'", here());
  }
  finish();
  if (scenarios.empty()) throw Error(ErrorCode::ParseError, "no Scenario found", SourceLocation{file, 1, 1, 0});
  return scenarios;
}

namespace detail {

/// Tokenizes a step template for one example row, substituting each
/// placeholder with the tokens of its cell. Substituted tokens remember the
/// placeholder they came from.
inline phrase::Tokens instantiate_step(const Step& step, const ExamplesTable& table, const std::vector<std::string>* row) {
  phrase::Tokens out;
  for (auto& tok : phrase::tokenize(step.text, true, step.where)) {
    if (tok.kind != phrase::TokenKind::Placeholder) {
      out.push_back(std::move(tok));
      continue;
    }
    const auto col = std::find(table.header.begin(), table.header.end(), tok.text);
    if (row == nullptr || col == table.header.end())
      throw Error(ErrorCode::UnboundPlaceholder, "placeholder <" + tok.text + "> has no Examples column", step.where);
    const std::string& cell = (*row)[static_cast<std::size_t>(col - table.header.begin())];
    auto cell_tokens = phrase::tokenize(cell, false, step.where);
    if (cell_tokens.empty()) throw Error(ErrorCode::TableShapeError, "empty cell for <" + tok.text + ">", step.where);
    for (auto& ct : cell_tokens) {
      ct.offset = tok.offset;
      ct.length = tok.length;
      ct.placeholder = tok.text;
      out.push_back(std::move(ct));
    }
  }
  return phrase::merge_operator_words(out);
}

inline bool is_polarity_word(std::string_view cell) {
  std::string lower;
  for (char c : trim(cell)) lower += ascii_lower(c);
  return lower == "true" || lower == "false";
}

}  // namespace detail

/// Compiles a scenario. Each example row becomes
/// `(given ∧ when) → then`; the scenario is the conjunction of its rows.
///
/// A Given "<X> is <v>" followed by a When "<X> changes to <v'>" on the same
/// subject splits the state into `initial_<x>` and `final_<x>`. An enum value
/// drawn from a placeholder names its variable after the placeholder column.
inline Formalized compile_scenario(const GherkinScenario& s) {
  detail::validate_scenario(s);
  const ExamplesTable& table = s.examples;
  for (std::size_t col = 0; col < table.header.size(); ++col) {
    std::size_t polar = 0;
    for (const auto& row : table.rows) polar += detail::is_polarity_word(row[col]) ? 1 : 0;
    if (polar != 0 && polar != table.rows.size()) {
      throw Error(ErrorCode::ConflictingSort, "column <" + table.header[col] + "> mixes TRUE/FALSE with other values",
                  table.row_where.empty() ? s.where : table.row_where.front());
    }
  }

  std::vector<const std::vector<std::string>*> rows;
  for (const auto& r : table.rows) rows.push_back(&r);
  if (rows.empty()) rows.push_back(nullptr);

  phrase::Vocabulary vocab;
  std::vector<Formula> row_formulas;
  for (const auto* row : rows) {
    const auto compile_group = [&](const std::vector<Step>& steps, bool actions) {
      std::vector<phrase::PhraseAtom> out;
      for (const auto& step : steps) {
        const phrase::Tokens toks = detail::instantiate_step(step, table, row);
        const phrase::Context ctx{step.text, step.where, true};
        out.push_back(actions ? phrase::action(toks, ctx) : phrase::condition(toks, ctx));
      }
      return out;
    };
    auto given = compile_group(s.given_steps, false);
    auto when = compile_group(s.when_steps, false);
    auto then = compile_group(s.then_steps, true);

    for (auto& w : when) {
      if (w.form != phrase::Form::ChangesTo || w.var != w.subject) continue;
      const std::string subject = w.subject;
      bool split = false;
      for (auto& g : given) {
        if (g.form == phrase::Form::Is && g.var == subject) {
          phrase::rename(g, subject, "initial_" + subject);
          split = true;
        }
      }
      if (split) phrase::rename(w, subject, "final_" + subject);
    }

    std::vector<Formula> antecedent;
    for (const auto* group : {&given, &when}) {
      for (const auto& p : *group) {
        antecedent.push_back(p.formula);
        for (const auto& u : p.usages) vocab.record(u);
      }
    }
    std::vector<Formula> consequent;
    for (const auto& p : then) {
      consequent.push_back(p.formula);
      for (const auto& u : p.usages) vocab.record(u);
    }
    Formula outcome = conjoin(std::move(consequent));
    row_formulas.push_back(antecedent.empty() ? outcome : Formula::implies(conjoin(std::move(antecedent)), outcome));
  }
  return Formalized{normalize(conjoin(std::move(row_formulas))), vocab.signature()};
}

}  // namespace reqeq
