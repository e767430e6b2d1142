// reqeq: requirements equivalence verifier.
//
//   reqeq formalize <input> [--engine rules|llm] [-o out.ir]
//   reqeq suggest <left> <right>
//   reqeq check <left> <right> [-g map] [-r report] [--limit N] [--also-prove]
//   reqeq verify <requirement.req> <scenario.feature> [-g map] [-r report]
//   reqeq emit-lean <left> [right] [-g map] [-o out.lean]
//
// Exit codes are listed in include/reqeq/cli.hpp and README.md.

#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "reqeq/cli.hpp"
#include "reqeq/http_transport.hpp"

namespace {

using namespace reqeq;

void add_selection(CLI::App* app, cli::Selection& left, cli::Selection* right) {
  app->add_option("--id", left.requirement_id, "requirement id when the left file holds several");
  app->add_option("--scenario", left.scenario, "scenario title or 1-based index for the left file");
  if (right != nullptr) {
    app->add_option("--right-id", right->requirement_id, "requirement id for the right file");
    app->add_option("--right-scenario", right->scenario, "scenario title or 1-based index for the right file");
  }
}

void add_lean_names(CLI::App* app, LeanTheoremOptions& th) {
  app->add_option("--theorem-name", th.theorem_name, "name of the emitted theorem")->capture_default_str();
  app->add_option("--left-name", th.left_name, "def name for the left formula");
  app->add_option("--right-name", th.right_name, "def name for the right formula");
  app->add_option("--right-label", th.right_label, "comment above the right definition");
}

/// "requirement 2" for a requirement file on the right unless set explicitly.
void default_right_label(LeanTheoremOptions& th, const std::string& right, const CLI::App* app) {
  if (app->count("--right-label") == 0 && cli::extension_of(right) == ".req") th.right_label = "requirement 2";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reqeq: decide whether two formalized requirements are logically equivalent"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  cli::Context ctx{std::cout, std::cerr, FormalizerConfig::from_environment(), {}};
  ctx.live_transport = [] { return std::make_unique<HttplibTransport>(); };
  int timeout = static_cast<int>(ctx.formalizer.timeout_seconds);
  const auto add_formalizer_flags = [&](CLI::App* sub) {
    sub->add_option("--timeout", timeout, "formalizer request timeout in seconds")->capture_default_str();
    sub->add_option("--retries", ctx.formalizer.max_retries, "formalizer retries")->capture_default_str();
    sub->add_option("--temperature", ctx.formalizer.temperature, "sampling temperature")->capture_default_str();
    sub->add_option("--samples", ctx.formalizer.samples, "choices per request (pass@k)")->capture_default_str();
  };

  cli::FormalizeOptions fopt;
  auto* formalize = app.add_subcommand("formalize", "formalize a .req or .feature file into IR text");
  formalize->add_option("input", fopt.input, "requirement (.req) or scenario (.feature) file")->required();
  formalize->add_option("--engine", fopt.engine, "rules or llm")->capture_default_str()->check(CLI::IsMember({"rules", "llm"}));
  formalize->add_option("-o,--output", fopt.output, "IR output path (default: input with .ir)");
  formalize->add_option("--replay", fopt.replay, "llm: replay fixture instead of the network");
  formalize->add_option("--record", fopt.record, "llm: save the exchanges as a replay fixture");
  formalize->add_option("--transcript", fopt.transcript, "llm: save the conversation transcript");
  add_selection(formalize, fopt.selection, nullptr);
  add_formalizer_flags(formalize);

  cli::SuggestOptions sopt;
  auto* suggest = app.add_subcommand("suggest", "print a draft grounding map from name similarity");
  suggest->add_option("left", sopt.left, "left formula")->required();
  suggest->add_option("right", sopt.right, "right formula")->required();
  suggest->add_option("--threshold", sopt.threshold, "minimum similarity score")->capture_default_str();
  add_selection(suggest, sopt.left_selection, &sopt.right_selection);

  cli::CheckOptions copt;
  auto* check = app.add_subcommand("check", "decide equivalence of two formulas");
  auto* verify = app.add_subcommand("verify", "formalize a requirement and a scenario, then check them");
  for (auto* sub : {check, verify}) {
    sub->add_option("left", copt.left, "left formula")->required();
    sub->add_option("right", copt.right, "right formula")->required();
    sub->add_option("-g,--grounding", copt.grounding, "grounding map");
    sub->add_option("-r,--report", copt.report, "structured report output path");
    sub->add_option("--limit", copt.limit, "maximum domain plan size")->capture_default_str();
    sub->add_flag("--also-prove", copt.also_prove, "attach the remote prover transcript to the report");
    sub->add_option("--replay", copt.replay, "prover replay fixture");
    add_selection(sub, copt.left_selection, &copt.right_selection);
    add_lean_names(sub, copt.theorem);
    add_formalizer_flags(sub);
  }

  cli::EmitLeanOptions eopt;
  auto* emit = app.add_subcommand("emit-lean", "write a Lean definition or equivalence theorem");
  emit->add_option("left", eopt.left, "left formula")->required();
  emit->add_option("right", eopt.right, "right formula");
  emit->add_option("-g,--grounding", eopt.grounding, "grounding map");
  emit->add_option("-o,--output", eopt.output, "Lean output path (default: standard output)");
  add_selection(emit, eopt.left_selection, &eopt.right_selection);
  add_lean_names(emit, eopt.theorem);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitUsage;
  }
  ctx.formalizer.timeout_seconds = timeout;

  if (*formalize) return cli::cmd_formalize(fopt, ctx);
  if (*suggest) return cli::cmd_suggest(sopt, ctx);
  if (*check || *verify) {
    auto* sub = *check ? check : verify;
    default_right_label(copt.theorem, copt.right, sub);
    return *check ? cli::cmd_check(copt, ctx) : cli::cmd_verify(copt, ctx);
  }
  if (*emit) {
    default_right_label(eopt.theorem, eopt.right, emit);
    return cli::cmd_emit_lean(eopt, ctx);
  }
  return cli::kExitUsage;
}
