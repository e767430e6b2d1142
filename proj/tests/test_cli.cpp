#include <gtest/gtest.h>

#include <filesystem>

#include "oracle.hpp"
#include "reqeq/cli.hpp"
#include "test_util.hpp"

using namespace reqeq;
using namespace reqeq::cli;
namespace fs = std::filesystem;

namespace {

struct Harness {
  std::ostringstream out, err;
  Context ctx{out, err, FormalizerConfig{}, {}};
};

std::string d(const std::string& name) { return reqeq_test::data_path(name); }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "reqeq_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

CheckOptions check(const std::string& left, const std::string& right, const std::string& map = {}) {
  CheckOptions o;
  o.left = d(left);
  o.right = d(right);
  if (!map.empty()) o.grounding = d(map);
  return o;
}

std::string field(const std::string& report, const std::string& key) {
  const auto at = report.find("\n" + key + ": ");
  if (at == std::string::npos) return report.rfind(key + ": ", 0) == 0 ? report.substr(key.size() + 2, report.find('\n') - key.size() - 2) : "";
  const auto start = at + key.size() + 3;
  return report.substr(start, report.find('\n', start) - start);
}

}  // namespace

TEST(ExitCodes, EveryErrorCodeMapsToOneDocumentedExit) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::Io); ++c) {
    const int code = exit_code_for(static_cast<ErrorCode>(c));
    EXPECT_GE(code, 2);
    EXPECT_LE(code, 7);
  }
  EXPECT_EQ(exit_code_for(ErrorCode::Usage), 2);
  EXPECT_EQ(exit_code_for(ErrorCode::Io), 3);
  EXPECT_EQ(exit_code_for(ErrorCode::MalformedIr), 4);
  EXPECT_EQ(exit_code_for(ErrorCode::SortMismatch), 5);
  EXPECT_EQ(exit_code_for(ErrorCode::PlanTooLarge), 6);
  EXPECT_EQ(exit_code_for(ErrorCode::NoCodeBlock), 7);
}

TEST(CmdFormalize, RulesForRequirementAndFeature) {
  Harness h;
  FormalizeOptions o;
  o.input = d("r1.req");
  o.output = scratch("r1.ir").string();
  ASSERT_EQ(cmd_formalize(o, h.ctx), 0) << h.err.str();
  const auto got = parse_ir(reqeq_test::slurp(o.output));
  const auto want = reqeq_test::load_ir("r1.ir");
  EXPECT_EQ(got.formula, want.formula);
  EXPECT_EQ(got.signature, want.signature);

  o.input = d("g3.feature");
  o.output = scratch("g3.ir").string();
  ASSERT_EQ(cmd_formalize(o, h.ctx), 0) << h.err.str();
  const auto g3 = parse_ir(reqeq_test::slurp(o.output));
  ASSERT_EQ(g3.formula.kind(), FormulaKind::And);
  EXPECT_EQ(g3.formula.children().size(), 4U);
}

TEST(CmdFormalize, MissingFileIsIoError) {
  Harness h;
  FormalizeOptions o;
  o.input = d("nope.req");
  o.output = scratch("nope.ir").string();
  EXPECT_EQ(cmd_formalize(o, h.ctx), 3);
  EXPECT_NE(h.err.str().find("IO_ERROR"), std::string::npos);
}

TEST(CmdFormalize, LlmEngineWithReplayAndTranscript) {
  Harness h;
  FormalizeOptions o;
  o.input = d("r1.req");
  o.engine = "llm";
  o.replay = d("fixtures/formalize_r1_success.json");
  o.output = scratch("r1_llm.ir").string();
  o.transcript = scratch("r1_llm.transcript").string();
  ASSERT_EQ(cmd_formalize(o, h.ctx), 0) << h.err.str();
  const auto got = parse_ir(reqeq_test::slurp(o.output));
  EXPECT_TRUE(got.signature.contains("seatbelt_chime"));
  EXPECT_NE(reqeq_test::slurp(o.transcript).find("=== assistant"), std::string::npos);

  o.replay = d("fixtures/formalize_no_code_block.json");
  EXPECT_EQ(cmd_formalize(o, h.ctx), 7);

  Harness offline;
  o.replay.clear();
  EXPECT_EQ(cmd_formalize(o, offline.ctx), 2) << "no endpoint and no replay is a usage error";
}

TEST(CmdSuggest, DraftsAndWarnings) {
  Harness h;
  SuggestOptions o{d("r1.ir"), d("r2.ir"), kDefaultSuggestionThreshold, {}, {}};
  ASSERT_EQ(cmd_suggest(o, h.ctx), 0);
  const std::string first = h.out.str().substr(0, h.out.str().find('\n'));
  EXPECT_EQ(first, "var vehicle_speed_average_driven = mean_vehicle_speed  # score 0.7500");

  Harness same;
  SuggestOptions s{d("r1.ir"), d("r1.ir"), kDefaultSuggestionThreshold, {}, {}};
  ASSERT_EQ(cmd_suggest(s, same.ctx), 0);
  std::istringstream lines(same.out.str());
  int n = 0;
  for (std::string line; std::getline(lines, line); ++n) EXPECT_NE(line.find("# score 1.0000"), std::string::npos) << line;
  EXPECT_EQ(n, 4);

  const auto left = scratch("door.ir"), right = scratch("rpm.ir");
  write_file(left.string(), "var door_open : bool\n\ndoor_open\n");
  write_file(right.string(), "var engine_rpm : numeric\n\n(> engine_rpm 3)\n");
  Harness none;
  SuggestOptions x{left.string(), right.string(), kDefaultSuggestionThreshold, {}, {}};
  EXPECT_EQ(cmd_suggest(x, none.ctx), 0);
  EXPECT_TRUE(none.out.str().empty());
  EXPECT_NE(none.err.str().find("warning"), std::string::npos);
}

TEST(CmdCheck, R1R2IsEquivalentAndReportIsStable) {
  Harness h;
  auto o = check("r1.ir", "r2.ir", "r1_r2.map");
  o.report = scratch("r1_r2.report").string();
  ASSERT_EQ(cmd_check(o, h.ctx), 0) << h.err.str();
  const std::string first = reqeq_test::slurp(o.report);
  ASSERT_EQ(cmd_check(o, h.ctx), 0);
  EXPECT_EQ(reqeq_test::slurp(o.report), first);
  EXPECT_EQ(first.rfind("verdict: EQUIVALENT\nforward_holds: true\nreverse_holds: true\n", 0), 0U) << first;
  EXPECT_EQ(field(first, "witness"), "(none)");
  EXPECT_EQ(field(first, "tool_version"), std::string(kToolVersion));
  EXPECT_EQ(field(first, "domain_plan_size"), field(first, "assignments_checked"));

  // field order is fixed
  std::vector<std::size_t> positions;
  for (const char* key : {"verdict:", "forward_holds:", "left:", "right:", "grounding:", "witness:", "ungrounded_left:",
                          "ungrounded_right:", "sort_warnings:", "renaming:", "identified_atoms:", "domain_plan_size:",
                          "assignments_checked:", "soundness_note:", "tool_version:"})
    positions.push_back(first.find(key));
  EXPECT_TRUE(std::is_sorted(positions.begin(), positions.end()));
  EXPECT_EQ(std::count(positions.begin(), positions.end(), std::string::npos), 0);
}

TEST(CmdCheck, R3G3PrintsAWitness) {
  Harness h;
  auto o = check("r3.ir", "g3.ir", "r3_g3.map");
  o.report = scratch("r3_g3.report").string();
  ASSERT_EQ(cmd_check(o, h.ctx), 1) << h.err.str();
  EXPECT_NE(h.out.str().find("witness"), std::string::npos);
  const std::string report = reqeq_test::slurp(o.report);
  EXPECT_EQ(field(report, "verdict"), "NOT_EQUIVALENT");
  EXPECT_EQ(field(report, "ungrounded_right"), "seat_occupancy, final_seatbelt_status");
  EXPECT_NE(report.find("  initial_seatbelt_status -> front_passenger_seat_belt_status\n"), std::string::npos);
  EXPECT_NE(report.find("  seat_occupancy = "), std::string::npos);
}

TEST(CmdCheck, NoMapOnDisjointNamesWarnsAboutEverything) {
  Harness h;
  auto o = check("r1.ir", "g3.ir");
  o.report = scratch("nomap.report").string();
  ASSERT_EQ(cmd_check(o, h.ctx), 1);
  const std::string report = reqeq_test::slurp(o.report);
  EXPECT_EQ(field(report, "ungrounded_left"),
            "vehicle_speed_average_driven, calibratable_seatbelt_reminder_speed, seatbelt, seatbelt_chime");
  EXPECT_NE(h.out.str().find("warning: ungrounded left variables"), std::string::npos);
  EXPECT_NE(h.out.str().find("warning: ungrounded right variables"), std::string::npos);
  // the oracle agrees the ungrounded pair differs
  const auto g = apply_grounding(reqeq_test::load_ir("r1.ir"), reqeq_test::load_ir("g3.ir"), {});
  EXPECT_FALSE(oracle::brute_force(g.left, g.right, g.merged).equivalent);
}

TEST(CmdCheck, PlanLimitAbortsWithAReport) {
  Harness h;
  auto o = check("r1.ir", "r2.ir", "r1_r2.map");
  o.limit = 10;
  o.report = scratch("aborted.report").string();
  EXPECT_EQ(cmd_check(o, h.ctx), 6);
  const std::string report = reqeq_test::slurp(o.report);
  EXPECT_EQ(field(report, "verdict"), "ABORTED");
  EXPECT_NE(field(report, "abort_reason").find("PLAN_TOO_LARGE"), std::string::npos);
}

TEST(CmdCheck, GroundingErrorsExitFive) {
  Harness h;
  const auto map = scratch("bad.map");
  write_file(map.string(), "var seatbelt_chime = seat_occupancy\n");
  auto o = check("r1.ir", "g3.ir");
  o.grounding = map.string();
  EXPECT_EQ(cmd_check(o, h.ctx), 5);
  EXPECT_NE(h.err.str().find("SORT_MISMATCH"), std::string::npos);
}

TEST(CmdCheck, AlsoProveAttachesTranscript) {
  Harness h;
  auto o = check("r1.ir", "r2.ir", "r1_r2.map");
  o.also_prove = true;
  o.replay = d("fixtures/prove_r1_r2.json");
  o.theorem.right_label = "requirement 2";
  o.report = scratch("prove.report").string();
  ASSERT_EQ(cmd_check(o, h.ctx), 0) << h.err.str();
  const std::string report = reqeq_test::slurp(o.report);
  EXPECT_NE(report.find("prover_transcript: |\n"), std::string::npos);
  EXPECT_NE(report.find("constructor"), std::string::npos);

  // a prover failure is a warning; the verdict still stands
  Harness w;
  const auto down = scratch("down.json");
  write_file(down.string(), R"({"exchanges":[{"error":"unreachable"},{"error":"unreachable"},{"error":"unreachable"}]})");
  o.replay = down.string();
  EXPECT_EQ(cmd_check(o, w.ctx), 0);
  EXPECT_NE(w.err.str().find("warning: prover failed"), std::string::npos);
  EXPECT_NE(reqeq_test::slurp(o.report).find("verdict: EQUIVALENT\n"), std::string::npos);
  EXPECT_NE(reqeq_test::slurp(o.report).find("=== error\n"), std::string::npos);
}

TEST(CmdVerify, RequirementAgainstFeature) {
  Harness h;
  auto o = check("r3.req", "g3.feature", "r3_g3.map");
  EXPECT_EQ(cmd_verify(o, h.ctx), 1) << h.err.str();

  const auto req = scratch("lamp.req"), feat = scratch("lamp.feature");
  write_file(req.string(), "If the door is open then the dome lamp shall be set to TRUE\n");
  write_file(feat.string(),
             "Feature: lamp\n  Scenario: open door\n    Given the door is open\n"
             "    Then the dome lamp shall be set to TRUE\n");
  CheckOptions same;
  same.left = req.string();
  same.right = feat.string();
  Harness e;
  EXPECT_EQ(cmd_verify(same, e.ctx), 0) << e.err.str() << e.out.str();

  write_file(feat.string(), "Feature: lamp\n  Scenario: broken\n    Then\n");
  Harness bad;
  EXPECT_EQ(cmd_verify(same, bad.ctx), 4);

  Harness wrong;
  CheckOptions swapped = same;
  std::swap(swapped.left, swapped.right);
  EXPECT_EQ(cmd_verify(swapped, wrong.ctx), 2);
}

TEST(CmdEmitLean, TheoremSelfPairAndBadInput) {
  Harness h;
  EmitLeanOptions o;
  o.left = d("r1.ir");
  o.right = d("r2.ir");
  o.grounding = d("r1_r2.map");
  ASSERT_EQ(cmd_emit_lean(o, h.ctx), 0) << h.err.str();
  EXPECT_NE(h.out.str().find("theorem req1_eq_req2"), std::string::npos);
  EXPECT_NE(h.out.str().find("↔\n"), std::string::npos);

  Harness self;
  EmitLeanOptions s;
  s.left = s.right = d("r1.ir");
  ASSERT_EQ(cmd_emit_lean(s, self.ctx), 0);
  EXPECT_NE(self.out.str().find("(initiate_seatbelt_chime vehicle_speed_average_driven calibratable_seatbelt_reminder_speed "
                                "seatbelt seatbelt_chime) ↔\n(initiate_seatbelt_chime"),
            std::string::npos)
      << self.out.str();

  const auto bad = scratch("bad.ir");
  write_file(bad.string(), "var p : bool\n\n(and p\n");
  Harness b;
  EmitLeanOptions e;
  e.left = bad.string();
  EXPECT_EQ(cmd_emit_lean(e, b.ctx), 4);
  EXPECT_NE(b.err.str().find("MALFORMED_IR"), std::string::npos);
}
