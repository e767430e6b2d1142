#pragma once

// Command implementations behind the `reqeq` executable. Each command takes
// an options struct and a context holding the output streams, and returns
// the process exit code:
//
//   0  EQUIVALENT (check/verify) or success
//   1  NOT_EQUIVALENT
//   2  usage error
//   3  I/O error
//   4  input error: parse, IR, phrase, sort, table, Lean, signature
//   5  grounding error: SORT_MISMATCH, ALIAS_TO_UNDECLARED, INVALID_GROUNDING
//   6  PLAN_TOO_LARGE (an ABORTED report is still written)
//   7  formalizer error: SERVICE_UNREACHABLE, TIMEOUT, NO_CODE_BLOCK,
//      INVALID_LEAN, REPLAY_MISMATCH
//   8  internal error

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "reqeq/engine.hpp"
#include "reqeq/formalizer.hpp"
#include "reqeq/gherkin.hpp"
#include "reqeq/grounding.hpp"
#include "reqeq/ir_text.hpp"
#include "reqeq/lean.hpp"
#include "reqeq/report.hpp"
#include "reqeq/requirement.hpp"

namespace reqeq::cli {

enum ExitCode : int {
  kExitEquivalent = 0,
  kExitNotEquivalent = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitInput = 4,
  kExitGrounding = 5,
  kExitPlanTooLarge = 6,
  kExitFormalizer = 7,
  kExitInternal = 8,
};

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage: return kExitUsage;
    case ErrorCode::Io: return kExitIo;
    case ErrorCode::UnboundVariable:
    case ErrorCode::SortError:
    case ErrorCode::MalformedIr:
    case ErrorCode::SignatureMismatch:
    case ErrorCode::ParseError:
    case ErrorCode::UnsupportedPhrase:
    case ErrorCode::ConflictingSort:
    case ErrorCode::TableShapeError:
    case ErrorCode::UnboundPlaceholder:
    case ErrorCode::EmitUnsupported:
    case ErrorCode::LeanParseError:
    case ErrorCode::UnsupportedLean: return kExitInput;
    case ErrorCode::SortMismatch:
    case ErrorCode::AliasToUndeclared:
    case ErrorCode::InvalidGrounding: return kExitGrounding;
    case ErrorCode::PlanTooLarge: return kExitPlanTooLarge;
    case ErrorCode::ServiceUnreachable:
    case ErrorCode::Timeout:
    case ErrorCode::NoCodeBlock:
    case ErrorCode::InvalidLean:
    case ErrorCode::ReplayMismatch: return kExitFormalizer;
  }
  return kExitInternal;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  FormalizerConfig formalizer = FormalizerConfig::from_environment();
  /// Builds the live transport; unset means only replay is available.
  std::function<std::unique_ptr<HttpTransport>()> live_transport;
};

/// Runs `body`, turning library errors into a message and an exit code.
template <class Body>
int guarded(Context& ctx, Body&& body) {
  try {
    return body();
  } catch (const FormalizerError& e) {
    ctx.err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const Error& e) {
    ctx.err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    ctx.err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

/// Which requirement block or scenario to use when a file holds several.
struct Selection {
  std::string requirement_id;
  std::string scenario;  // title or 1-based index
};

inline std::string extension_of(const std::string& path) { return std::filesystem::path(path).extension().string(); }

inline Formalized formalize_requirement_file(const std::string& path, const Selection& sel) {
  const std::string stem = std::filesystem::path(path).stem().string();
  const auto docs = read_requirements(read_file(path), path, stem.empty() ? "requirement" : stem);
  if (!sel.requirement_id.empty()) {
    for (const auto& d : docs)
      if (d.id == sel.requirement_id) return parse_requirement(d);
    throw Error(ErrorCode::Usage, "no requirement with id '" + sel.requirement_id + "' in '" + path + "'");
  }
  if (docs.size() > 1)
    throw Error(ErrorCode::Usage, "'" + path + "' holds " + std::to_string(docs.size()) + " requirements; choose one with --id");
  return parse_requirement(docs.front());
}

inline const GherkinScenario& select_scenario(const std::vector<GherkinScenario>& scenarios, const std::string& path,
                                              const Selection& sel) {
  if (scenarios.empty()) throw Error(ErrorCode::ParseError, "no scenario in '" + path + "'");
  if (sel.scenario.empty()) {
    if (scenarios.size() > 1)
      throw Error(ErrorCode::Usage, "'" + path + "' holds " + std::to_string(scenarios.size()) +
                                        " scenarios; choose one with --scenario");
    return scenarios.front();
  }
  for (const auto& s : scenarios)
    if (s.title == sel.scenario) return s;
  if (auto n = detail::parse_integer(sel.scenario); n && *n >= 1 && static_cast<std::size_t>(*n) <= scenarios.size())
    return scenarios[static_cast<std::size_t>(*n - 1)];
  throw Error(ErrorCode::Usage, "no scenario '" + sel.scenario + "' in '" + path + "'");
}

/// Loads a formula by file extension: `.req` and `.feature` through the rule
/// frontends, `.lean` through the Lean parser, anything else as IR text.
inline Formalized load_formalized(const std::string& path, const Selection& sel = {}) {
  const std::string ext = extension_of(path);
  if (ext == ".req") return formalize_requirement_file(path, sel);
  if (ext == ".feature") return compile_scenario(select_scenario(parse_feature(read_file(path), path), path, sel));
  if (ext == ".lean") return parse_lean_def(read_file(path), path).ir;
  return parse_ir(read_file(path), path);
}

inline std::unique_ptr<HttpTransport> make_transport(const Context& ctx, const std::string& replay) {
  if (!replay.empty()) return std::make_unique<ReplayTransport>(ReplayTransport::from_file(replay));
  if (ctx.formalizer.endpoint.empty())
    throw Error(ErrorCode::Usage, "no formalizer endpoint: set FORMALIZER_URL or pass --replay");
  if (!ctx.live_transport) throw Error(ErrorCode::Usage, "live formalizer transport is not available in this build");
  return ctx.live_transport();
}

// ---------------------------------------------------------------------------
// formalize

struct FormalizeOptions {
  std::string input;
  std::string engine = "rules";  // rules | llm
  std::string output;            // default: input with extension .ir
  Selection selection;
  std::string replay;            // llm: replay fixture instead of the network
  std::string record;            // llm: write the exchanges as a replay fixture
  std::string transcript;        // llm: write the conversation transcript
};

inline int cmd_formalize(const FormalizeOptions& opt, Context& ctx) {
  return guarded(ctx, [&] {
    const std::string output =
        opt.output.empty() ? std::filesystem::path(opt.input).replace_extension(".ir").string() : opt.output;
    const std::string ext = extension_of(opt.input);
    Formalized result{Formula::var("unset"), {}};
    if (opt.engine == "rules") {
      if (ext != ".req" && ext != ".feature")
        throw Error(ErrorCode::Usage, "the rules engine reads .req or .feature files, got '" + opt.input + "'");
      result = load_formalized(opt.input, opt.selection);
    } else if (opt.engine == "llm") {
      std::string text;
      if (ext == ".req") {
        const auto docs = read_requirements(read_file(opt.input), opt.input);
        const RequirementDoc* doc = &docs.front();
        if (!opt.selection.requirement_id.empty()) {
          doc = nullptr;
          for (const auto& d : docs)
            if (d.id == opt.selection.requirement_id) doc = &d;
          if (doc == nullptr) throw Error(ErrorCode::Usage, "no requirement with id '" + opt.selection.requirement_id + "'");
        } else if (docs.size() > 1) {
          throw Error(ErrorCode::Usage, "'" + opt.input + "' holds several requirements; choose one with --id");
        }
        text = doc->text;
      } else {
        text = std::string(detail::trim(read_file(opt.input)));
      }
      auto transport = make_transport(ctx, opt.replay);
      std::unique_ptr<RecordingTransport> recorder;
      HttpTransport* use = transport.get();
      if (!opt.record.empty()) {
        recorder = std::make_unique<RecordingTransport>(*transport);
        use = recorder.get();
      }
      const auto save_record = [&] {
        if (recorder) write_file(opt.record, recorder->fixture().dump(2) + "\n");
      };
      try {
        auto fr = formalize_remote(text, ctx.formalizer, *use);
        save_record();
        if (!opt.transcript.empty()) write_file(opt.transcript, fr.transcript.str());
        result = std::move(fr.ir);
      } catch (const FormalizerError& e) {
        save_record();
        if (!opt.transcript.empty()) write_file(opt.transcript, e.transcript().str());
        throw;
      }
    } else {
      throw Error(ErrorCode::Usage, "unknown engine '" + opt.engine + "', expected rules or llm");
    }
    write_file(output, serialize_ir(result));
    ctx.out << "wrote " << output << "\n";
    return 0;
  });
}

// ---------------------------------------------------------------------------
// suggest

struct SuggestOptions {
  std::string left;
  std::string right;
  double threshold = kDefaultSuggestionThreshold;
  Selection left_selection;
  Selection right_selection;
};

inline int cmd_suggest(const SuggestOptions& opt, Context& ctx) {
  return guarded(ctx, [&] {
    if (!(opt.threshold >= 0.0 && opt.threshold <= 1.0)) throw Error(ErrorCode::Usage, "threshold must lie in [0, 1]");
    const Formalized a = load_formalized(opt.left, opt.left_selection);
    const Formalized b = load_formalized(opt.right, opt.right_selection);
    const auto ranked = suggest_grounding(a.signature, b.signature, opt.threshold);
    const GroundingMap draft = draft_grounding(ranked);
    if (draft.var_aliases.empty()) {
      ctx.err << "warning: no variable pair scored at least " << detail::format_score(opt.threshold)
              << "; the draft is empty\n";
      return 0;
    }
    for (const auto& alias : draft.var_aliases) {
      const auto it = std::find_if(ranked.begin(), ranked.end(),
                                   [&](const Suggestion& s) { return s.left == alias.left && s.right == alias.right; });
      ctx.out << "var " << alias.left << " = " << alias.right << "  # score " << detail::format_score(it->score);
      if (!it->same_sort_kind)
        ctx.out << ", sorts differ: " << a.signature.sort_of(alias.left).str() << " vs " << b.signature.sort_of(alias.right).str();
      ctx.out << "\n";
    }
    return 0;
  });
}

// ---------------------------------------------------------------------------
// check / verify

struct CheckOptions {
  std::string left;
  std::string right;
  std::string grounding;
  std::string report;  // structured report path; empty: summary only
  std::uint64_t limit = kDefaultPlanLimit;
  Selection left_selection;
  Selection right_selection;
  bool also_prove = false;
  std::string replay;       // prover replay fixture
  LeanTheoremOptions theorem;
};

inline CheckOutcome run_check(const Formalized& a, const Formalized& b, const GroundingMap& g, const CheckOptions& opt) {
  const GroundedPair gp = apply_grounding(a, b, g);
  CheckOutcome outcome;
  outcome.left_path = opt.left;
  outcome.right_path = opt.right;
  outcome.grounding_path = opt.grounding;
  outcome.diagnostics = gp.diagnostics;
  outcome.identified = gp.identified;
  for (const auto& [from, to] : gp.renaming)
    if (from != to) outcome.renaming[from] = to;
  try {
    outcome.result = decide(gp.left, gp.right, gp.merged, opt.limit);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PlanTooLarge) throw;
    outcome.result.verdict = Verdict::Aborted;
    outcome.result.abort_reason = std::string(error_code_name(e.code())) + ": " + e.detail();
  }
  outcome.result.ungrounded_left = gp.diagnostics.ungrounded_left;
  outcome.result.ungrounded_right = gp.diagnostics.ungrounded_right;
  return outcome;
}

inline int check_loaded(const Formalized& a, const Formalized& b, const CheckOptions& opt, Context& ctx) {
  const GroundingMap g = opt.grounding.empty() ? GroundingMap{} : parse_grounding_map(read_file(opt.grounding), opt.grounding);
  if (opt.limit < 1) throw Error(ErrorCode::Usage, "--limit must be at least 1");
  CheckOutcome outcome = run_check(a, b, g, opt);

  if (opt.also_prove) {
    try {
      const LeanTheorem theorem = emit_lean_theorem(a, b, g, opt.theorem);
      auto transport = make_transport(ctx, opt.replay);
      auto proved = prove_remote(theorem, ctx.formalizer, *transport);
      outcome.prover_transcript = proved.transcript.str();
    } catch (const FormalizerError& e) {
      ctx.err << "warning: prover failed: " << e.what() << "\n";
      outcome.prover_transcript = e.transcript().str() + "=== error\n" + e.what() + "\n";
    }
  }

  if (!opt.report.empty()) write_file(opt.report, render_report(outcome));
  ctx.out << render_summary(outcome);
  switch (outcome.result.verdict) {
    case Verdict::Equivalent: return kExitEquivalent;
    case Verdict::NotEquivalent: return kExitNotEquivalent;
    case Verdict::Aborted: return kExitPlanTooLarge;
  }
  return kExitInternal;
}

inline int cmd_check(const CheckOptions& opt, Context& ctx) {
  return guarded(ctx, [&] {
    const Formalized a = load_formalized(opt.left, opt.left_selection);
    const Formalized b = load_formalized(opt.right, opt.right_selection);
    return check_loaded(a, b, opt, ctx);
  });
}

/// formalize (rules) + check for a requirement file against a feature file.
inline int cmd_verify(const CheckOptions& opt, Context& ctx) {
  return guarded(ctx, [&] {
    if (extension_of(opt.left) != ".req") throw Error(ErrorCode::Usage, "verify expects a .req file first, got '" + opt.left + "'");
    if (extension_of(opt.right) != ".feature")
      throw Error(ErrorCode::Usage, "verify expects a .feature file second, got '" + opt.right + "'");
    const Formalized a = load_formalized(opt.left, opt.left_selection);
    const Formalized b = load_formalized(opt.right, opt.right_selection);
    return check_loaded(a, b, opt, ctx);
  });
}

// ---------------------------------------------------------------------------
// emit-lean

struct EmitLeanOptions {
  std::string left;
  std::string right;  // empty: emit the left definition only
  std::string grounding;
  std::string output;  // empty: standard output
  Selection left_selection;
  Selection right_selection;
  LeanTheoremOptions theorem;
};

inline int cmd_emit_lean(const EmitLeanOptions& opt, Context& ctx) {
  return guarded(ctx, [&] {
    const Formalized a = load_formalized(opt.left, opt.left_selection);
    std::string text;
    if (opt.right.empty()) {
      if (!opt.grounding.empty()) throw Error(ErrorCode::Usage, "a grounding map needs a right-hand formula");
      const std::string name = opt.theorem.left_name.empty() ? default_def_name(a.formula) : opt.theorem.left_name;
      text = emit_lean_def(a, name);
    } else {
      const Formalized b = load_formalized(opt.right, opt.right_selection);
      const GroundingMap g = opt.grounding.empty() ? GroundingMap{} : parse_grounding_map(read_file(opt.grounding), opt.grounding);
      text = emit_lean_theorem(a, b, g, opt.theorem).text();
    }
    if (opt.output.empty()) {
      ctx.out << text;
    } else {
      write_file(opt.output, text);
      ctx.out << "wrote " << opt.output << "\n";
    }
    return 0;
  });
}

}  // namespace reqeq::cli
