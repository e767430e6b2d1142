#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "reqeq/error.hpp"

namespace reqeq {

/// Minimal S-expression: either a symbol or a parenthesized list.
struct SExpr {
  bool is_symbol = true;
  std::string symbol;
  std::vector<SExpr> items;
  SourceLocation where;

  [[nodiscard]] bool is_list() const { return !is_symbol; }

  [[nodiscard]] std::string str() const {
    if (is_symbol) return symbol;
    std::string out = "(";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ' ';
      out += items[i].str();
    }
    return out + ")";
  }
};

/// Reads S-expressions from a text buffer. `;` starts a comment running to
/// the end of the line. Errors carry the given code so callers decide whether
/// a malformed expression is MALFORMED_IR or a grounding-map PARSE_ERROR.
class SExprReader {
 public:
  SExprReader(std::string_view text, ErrorCode error_code, std::string file = {},
              std::size_t first_line = 1)
      : text_(text), code_(error_code), file_(std::move(file)), line_(first_line) {}

  [[nodiscard]] bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input, expected an expression");
    const SourceLocation start = here();
    const char c = text_[pos_];
    if (c == ')') fail("unexpected ')'");
    if (c == '(') {
      advance();
      SExpr list{false, {}, {}, start};
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) fail("unclosed '(' opened at " + start.str());
        if (text_[pos_] == ')') {
          advance();
          return list;
        }
        list.items.push_back(read());
      }
    }
    std::string symbol;
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      symbol += d;
      advance();
    }
    return SExpr{true, std::move(symbol), {}, start};
  }

  [[nodiscard]] SourceLocation here() const { return SourceLocation{file_, line_, column_, pos_}; }

  [[noreturn]] void fail(const std::string& message) const { throw Error(code_, message, here()); }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  ErrorCode code_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace reqeq
