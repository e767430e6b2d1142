#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace reqeq {

/// `[a-z][a-z0-9_]*`
inline bool is_identifier(std::string_view name) {
  if (name.empty() || name.front() < 'a' || name.front() > 'z') return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

namespace detail {

inline bool ascii_alnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

inline char ascii_lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

inline std::string finish_identifier(std::string out) {
  while (!out.empty() && out.back() == '_') out.pop_back();
  if (out.empty()) return out;
  if (out.front() < 'a' || out.front() > 'z') out.insert(0, "v_");
  return out;
}

}  // namespace detail

/// Joins natural-language words into a snake-case identifier. Case is folded
/// per word ("SeatBelt" becomes "seatbelt"); punctuation inside a word acts as
/// a separator.
inline std::string snake_case_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& word : words) {
    for (char c : word) {
      if (detail::ascii_alnum(c)) {
        out += detail::ascii_lower(c);
      } else if (!out.empty() && out.back() != '_') {
        out += '_';
      }
    }
    if (!out.empty() && out.back() != '_') out += '_';
  }
  return detail::finish_identifier(std::move(out));
}

inline std::string snake_case_phrase(std::string_view phrase) {
  std::vector<std::string> words;
  std::string current;
  for (char c : phrase) {
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return snake_case_words(words);
}

/// Normalizes a program identifier (camelCase, PascalCase or snake_case) to
/// lowercase snake-case: `vehicleSpeed` and `VehicleSpeed` both give
/// `vehicle_speed`, acronym runs stay together (`ECUState` gives `ecu_state`).
inline std::string snake_case_identifier(std::string_view ident) {
  std::string out;
  for (std::size_t i = 0; i < ident.size(); ++i) {
    const char c = ident[i];
    if (!detail::ascii_alnum(c)) {
      if (!out.empty() && out.back() != '_') out += '_';
      continue;
    }
    const bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
    if (upper && i > 0 && !out.empty() && out.back() != '_') {
      const char prev = ident[i - 1];
      const bool prev_lower_or_digit =
          std::islower(static_cast<unsigned char>(prev)) != 0 ||
          std::isdigit(static_cast<unsigned char>(prev)) != 0;
      const bool next_lower = i + 1 < ident.size() &&
                              std::islower(static_cast<unsigned char>(ident[i + 1])) != 0;
      const bool prev_upper = std::isupper(static_cast<unsigned char>(prev)) != 0;
      if (prev_lower_or_digit || (prev_upper && next_lower)) out += '_';
    }
    out += detail::ascii_lower(c);
  }
  return detail::finish_identifier(std::move(out));
}

/// `seat_belt_status` -> `SeatBeltStatus`
inline std::string pascal_case(std::string_view snake) {
  std::string out;
  bool upper_next = true;
  for (char c : snake) {
    if (c == '_') {
      upper_next = true;
      continue;
    }
    out += upper_next ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
    upper_next = false;
  }
  if (out.empty() || !std::isalpha(static_cast<unsigned char>(out.front()))) out.insert(0, "T");
  return out;
}

}  // namespace reqeq
