#pragma once

// Structured check report: one `key: value` per line in a fixed order, list
// entries indented by two spaces. No timestamps, so identical inputs give
// byte-identical reports.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "reqeq/engine.hpp"
#include "reqeq/grounding.hpp"

namespace reqeq {

inline constexpr std::string_view kToolVersion = "reqeq 0.1.0";

struct CheckOutcome {
  std::string left_path;
  std::string right_path;
  std::string grounding_path;  // empty when no map was given
  EquivalenceReport result;
  GroundingDiagnostics diagnostics;
  std::map<std::string, std::string> renaming;  // only entries that change a name
  std::vector<IdentifiedAtom> identified;
  std::optional<std::string> prover_transcript;
};

namespace detail {

inline std::string join_or_none(const std::vector<std::string>& items) {
  if (items.empty()) return "(none)";
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out;
}

inline std::string format_score(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", s);
  return buf;
}

}  // namespace detail

inline std::string render_report(const CheckOutcome& o) {
  const auto& r = o.result;
  const auto yes_no = [](bool b) { return std::string(b ? "true" : "false"); };
  std::string out;
  out += "verdict: " + std::string(verdict_name(r.verdict)) + "\n";
  if (r.verdict == Verdict::Aborted) {
    out += "abort_reason: " + r.abort_reason + "\n";
  } else {
    out += "forward_holds: " + yes_no(r.forward_holds) + "\n";
    out += "reverse_holds: " + yes_no(r.reverse_holds) + "\n";
  }
  out += "left: " + o.left_path + "\n";
  out += "right: " + o.right_path + "\n";
  out += "grounding: " + (o.grounding_path.empty() ? std::string("(none)") : o.grounding_path) + "\n";
  if (r.witness) {
    out += "witness:\n";
    for (const auto& [name, value] : *r.witness) out += "  " + name + " = " + value.str() + "\n";
    out += "left_at_witness: " + yes_no(r.left_at_witness) + "\n";
    out += "right_at_witness: " + yes_no(r.right_at_witness) + "\n";
  } else {
    out += "witness: (none)\n";
  }
  out += "ungrounded_left: " + detail::join_or_none(o.diagnostics.ungrounded_left) + "\n";
  out += "ungrounded_right: " + detail::join_or_none(o.diagnostics.ungrounded_right) + "\n";
  if (o.diagnostics.sort_mismatches.empty()) {
    out += "sort_warnings: (none)\n";
  } else {
    out += "sort_warnings:\n";
    for (const auto& w : o.diagnostics.sort_mismatches)
      out += "  " + w.left_var + " : " + w.left_sort + " vs " + w.right_var + " : " + w.right_sort + "\n";
  }
  if (o.renaming.empty()) {
    out += "renaming: (none)\n";
  } else {
    out += "renaming:\n";
    for (const auto& [from, to] : o.renaming) out += "  " + from + " -> " + to + "\n";
  }
  if (o.identified.empty()) {
    out += "identified_atoms: (none)\n";
  } else {
    out += "identified_atoms:\n";
    for (const auto& id : o.identified)
      out += "  " + id.fresh + " = " + atom_to_sexpr(id.left) + " / " + atom_to_sexpr(id.right) + "\n";
  }
  if (!o.diagnostics.suggestions.empty()) {
    out += "suggestions:\n";
    for (const auto& s : o.diagnostics.suggestions)
      out += "  " + s.left + " = " + s.right + " (" + detail::format_score(s.score) + ")\n";
  }
  out += "domain_plan_size: " + std::to_string(r.plan_size) + "\n";
  out += "assignments_checked: " + std::to_string(r.assignments_checked) + "\n";
  out += "soundness_note: " + r.soundness_note + "\n";
  out += "tool_version: " + std::string(kToolVersion) + "\n";
  if (o.prover_transcript) {
    out += "prover_transcript: |\n";
    std::size_t pos = 0;
    const std::string& t = *o.prover_transcript;
    while (pos < t.size()) {
      const auto eol = t.find('\n', pos);
      out += "  " + t.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos) + "\n";
      if (eol == std::string::npos) break;
      pos = eol + 1;
    }
  }
  return out;
}

/// Short human-readable summary for the terminal.
inline std::string render_summary(const CheckOutcome& o) {
  const auto& r = o.result;
  std::string out = std::string(verdict_name(r.verdict));
  switch (r.verdict) {
    case Verdict::Equivalent: out += ": both directions hold"; break;
    case Verdict::Aborted: out += ": " + r.abort_reason; break;
    case Verdict::NotEquivalent:
      if (!r.forward_holds && !r.reverse_holds) out += ": neither direction holds";
      else out += r.forward_holds ? ": left -> right holds, right -> left fails" : ": right -> left holds, left -> right fails";
      break;
  }
  out += "\n";
  if (r.witness) {
    out += "  witness (left " + std::string(r.left_at_witness ? "true" : "false") + ", right " +
           (r.right_at_witness ? "true" : "false") + "):";
    for (const auto& [name, value] : *r.witness) out += " " + name + "=" + value.str();
    out += "\n";
  }
  if (!o.diagnostics.ungrounded_left.empty())
    out += "  warning: ungrounded left variables: " + detail::join_or_none(o.diagnostics.ungrounded_left) + "\n";
  if (!o.diagnostics.ungrounded_right.empty())
    out += "  warning: ungrounded right variables: " + detail::join_or_none(o.diagnostics.ungrounded_right) + "\n";
  for (const auto& w : o.diagnostics.sort_mismatches)
    out += "  warning: unit differs: " + w.left_var + " : " + w.left_sort + " vs " + w.right_var + " : " + w.right_sort + "\n";
  return out;
}

}  // namespace reqeq
