#pragma once

// Client for an external chat-completion formalizer. Requests go through an
// HttpTransport so tests and offline runs can replay recorded exchanges; the
// live transport lives in http_transport.hpp.
//
// Replay fixture layout (JSON):
//
//   {"exchanges": [
//     {"request":  {"messages": [{"role": "system", "content": "..."}, ...]},
//      "response": {"status": 200, "body": {"choices": [{"message": {"content": "..."}}]}}},
//     {"error": "unreachable" | "timeout"}
//   ]}
//
// Exchanges are consumed in order. When a recorded request carries
// "messages", the live request's messages must match them exactly.

#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "reqeq/error.hpp"
#include "reqeq/lean.hpp"

namespace reqeq {

struct FormalizerConfig {
  std::string endpoint;     // full chat-completions URL
  std::string model;
  std::string api_key_env;  // name of the environment variable holding the key
  double timeout_seconds = 120.0;
  int max_retries = 2;
  double temperature = 0.0;
  int samples = 1;          // choices requested per call; the first valid one is used

  void validate() const {
    if (!(timeout_seconds > 0)) throw Error(ErrorCode::Usage, "formalizer timeout must be positive");
    if (max_retries < 0) throw Error(ErrorCode::Usage, "formalizer max retries must be non-negative");
    if (samples < 1) throw Error(ErrorCode::Usage, "formalizer samples must be at least 1");
  }

  /// Reads FORMALIZER_URL, FORMALIZER_MODEL and FORMALIZER_API_KEY_ENV.
  static FormalizerConfig from_environment() {
    FormalizerConfig cfg;
    const auto get = [](const char* name) {
      const char* v = std::getenv(name);
      return v ? std::string(v) : std::string();
    };
    cfg.endpoint = get("FORMALIZER_URL");
    cfg.model = get("FORMALIZER_MODEL");
    cfg.api_key_env = get("FORMALIZER_API_KEY_ENV");
    return cfg;
  }
};

struct HttpRequest {
  std::string url;
  nlohmann::json body;
  std::vector<std::pair<std::string, std::string>> headers;
  double timeout_seconds = 120.0;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Posts one JSON request. Throws SERVICE_UNREACHABLE or TIMEOUT when no
/// response arrives.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

class ReplayTransport final : public HttpTransport {
 public:
  explicit ReplayTransport(nlohmann::json fixture, std::string origin = "fixture")
      : fixture_(std::move(fixture)), origin_(std::move(origin)) {
    if (!fixture_.is_object() || !fixture_.contains("exchanges") || !fixture_["exchanges"].is_array())
      throw Error(ErrorCode::ReplayMismatch, origin_ + ": expected an object with an \"exchanges\" array");
  }

  static ReplayTransport from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read replay fixture '" + path + "'");
    try {
      return ReplayTransport(nlohmann::json::parse(in), path);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ReplayMismatch, path + ": " + e.what());
    }
  }

  HttpResponse post(const HttpRequest& request) override {
    const auto& exchanges = fixture_["exchanges"];
    if (next_ >= exchanges.size())
      throw Error(ErrorCode::ReplayMismatch,
                  origin_ + ": request " + std::to_string(next_ + 1) + " has no recorded exchange");
    const auto& ex = exchanges[next_++];
    if (ex.contains("request") && ex["request"].contains("messages") && request.body.contains("messages") &&
        ex["request"]["messages"] != request.body["messages"]) {
      throw Error(ErrorCode::ReplayMismatch,
                  origin_ + ": request " + std::to_string(next_) + " differs from the recorded messages");
    }
    if (ex.contains("error")) {
      const std::string kind = ex["error"].get<std::string>();
      if (kind == "timeout") throw Error(ErrorCode::Timeout, "request timed out (replayed)");
      throw Error(ErrorCode::ServiceUnreachable, "service unreachable (replayed)");
    }
    const auto& resp = ex.at("response");
    HttpResponse out;
    out.status = resp.value("status", 200);
    const auto& body = resp.at("body");
    out.body = body.is_string() ? body.get<std::string>() : body.dump();
    return out;
  }

  [[nodiscard]] std::size_t consumed() const { return next_; }
  [[nodiscard]] std::size_t remaining() const { return fixture_["exchanges"].size() - next_; }

 private:
  nlohmann::json fixture_;
  std::string origin_;
  std::size_t next_ = 0;
};

/// Forwards to another transport and keeps every exchange in the replay
/// fixture format. Headers (and with them any credential) are not recorded.
class RecordingTransport final : public HttpTransport {
 public:
  explicit RecordingTransport(HttpTransport& inner) : inner_(inner) {}

  HttpResponse post(const HttpRequest& request) override {
    nlohmann::json ex;
    ex["request"] = {{"messages", request.body.value("messages", nlohmann::json::array())}};
    try {
      HttpResponse r = inner_.post(request);
      nlohmann::json body = nlohmann::json::parse(r.body, nullptr, false);
      ex["response"] = {{"status", r.status}, {"body", body.is_discarded() ? nlohmann::json(r.body) : body}};
      exchanges_.push_back(std::move(ex));
      return r;
    } catch (const Error& e) {
      ex["error"] = e.code() == ErrorCode::Timeout ? "timeout" : "unreachable";
      exchanges_.push_back(std::move(ex));
      throw;
    }
  }

  [[nodiscard]] nlohmann::json fixture() const { return {{"exchanges", exchanges_}}; }

 private:
  HttpTransport& inner_;
  nlohmann::json exchanges_ = nlohmann::json::array();
};

// ---------------------------------------------------------------------------
// Prompts

inline constexpr std::string_view kFormalizeSystemPrompt =
    "You formalize natural language requirements as Lean 4 propositions.";

inline constexpr std::string_view kProveSystemPrompt = "You are a Lean 4 theorem prover.";

/// Formalization prompt; `{requirement}` is replaced verbatim.
inline constexpr std::string_view kFormalizeTemplate =
    "# Formalize the following requirement using Lean syntax:\n"
    "{requirement}\n"
    "\n"
    "Translate the natural language requirement into a formal Lean 4 proposition. The result should be a `def` "
    "statement that defines a proposition (`Prop`).\n"
    "\n"
    "Complete the following code and substitute the brackets with appropriate variables from requirements:\n"
    "\n"
    "The definition should have the following structure:\n"
    "\n"
    "```lean4\n"
    "-- define variables here\n"
    "variable (<VARIABLE> : <TYPE>)\n"
    "variable (<VARIABLE> : <TYPE>)\n"
    "\n"
    "def <ACTION_name_FOR_function> : Prop :=\n"
    "-- include all conditions in the given here and finally they should either imply or not imply the action\n"
    "(CONDITION A ∧ CONDITION B ∧ ...) -> ACTION\n"
    "```\n";

/// Proof prompt preamble; the theorem source follows the opening fence.
inline constexpr std::string_view kProvePreamble =
    "Given the following Lean code, reason out and finally prove that either:\n"
    "- the given two functions are logically equivalent and consistent\n"
    "- the given two functions are inconsistent\n"
    "\n"
    "Continue and complete the theorem based on the provided code:\n"
    "\n"
    "```lean4\n";

inline std::string render_formalize_prompt(std::string_view requirement) {
  std::string out(kFormalizeTemplate);
  constexpr std::string_view slot = "{requirement}";
  out.replace(out.find(slot), slot.size(), requirement);
  return out;
}

inline std::string render_prove_prompt(const LeanTheorem& theorem) { return std::string(kProvePreamble) + theorem.body(); }

inline constexpr std::string_view kCorrectionTemplate =
    "The Lean code above could not be used: {error}\n"
    "Reply with a corrected version in a single ```lean4 block: `variable` binders, then exactly one "
    "`def ... : Prop :=` using only ∧ ∨ ¬ → ↔, comparisons, Bool, ℤ and inductive enumerations.";

// ---------------------------------------------------------------------------
// Transcript

struct TranscriptEntry {
  std::string role;  // system, user, assistant, error
  std::string content;
};

struct Transcript {
  std::vector<TranscriptEntry> entries;
  int attempts = 0;

  void add(std::string role, std::string content) { entries.push_back({std::move(role), std::move(content)}); }

  [[nodiscard]] std::string str() const {
    std::string out;
    for (const auto& e : entries) out += "=== " + e.role + "\n" + e.content + (e.content.ends_with('\n') ? "" : "\n");
    return out;
  }
};

/// A formalizer failure with the conversation that led to it.
class FormalizerError : public Error {
 public:
  FormalizerError(ErrorCode code, const std::string& detail, Transcript transcript)
      : Error(code, detail), transcript_(std::move(transcript)) {}
  [[nodiscard]] const Transcript& transcript() const { return transcript_; }

 private:
  Transcript transcript_;
};

/// First fenced ```lean4 or ```lean block; an unterminated block runs to the
/// end of the text.
inline std::optional<std::string> extract_lean_block(std::string_view text) {
  std::size_t pos = 0;
  while ((pos = text.find("```", pos)) != std::string_view::npos) {
    std::string_view rest = text.substr(pos + 3);
    std::size_t tag = 0;
    if (rest.starts_with("lean4")) tag = 5;
    else if (rest.starts_with("lean")) tag = 4;
    if (tag == 0 || (rest.size() > tag && !std::isspace(static_cast<unsigned char>(rest[tag])))) {
      pos += 3;
      continue;
    }
    rest.remove_prefix(tag);
    const auto eol = rest.find('\n');
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    const auto close = rest.find("```");
    return std::string(close == std::string_view::npos ? rest : rest.substr(0, close));
  }
  return std::nullopt;
}

namespace detail {

/// One chat call with transport-level retries. Returns the choices' contents.
inline std::vector<std::string> chat(HttpTransport& transport, const FormalizerConfig& cfg,
                                     const nlohmann::json& messages, Transcript& transcript) {
  HttpRequest req;
  req.url = cfg.endpoint;
  req.timeout_seconds = cfg.timeout_seconds;
  req.body = {{"model", cfg.model}, {"messages", messages}, {"temperature", cfg.temperature}, {"n", cfg.samples}};
  req.headers.emplace_back("Content-Type", "application/json");
  if (!cfg.api_key_env.empty()) {
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (key != nullptr && *key != '\0') req.headers.emplace_back("Authorization", std::string("Bearer ") + key);
  }

  std::optional<Error> last;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    ++transcript.attempts;
    try {
      const HttpResponse resp = transport.post(req);
      if (resp.status == 429 || resp.status >= 500) {
        transcript.add("error", "HTTP " + std::to_string(resp.status));
        last = Error(ErrorCode::ServiceUnreachable, "service answered HTTP " + std::to_string(resp.status));
        continue;
      }
      if (resp.status < 200 || resp.status >= 300)
        throw FormalizerError(ErrorCode::ServiceUnreachable, "service answered HTTP " + std::to_string(resp.status), transcript);
      const auto body = nlohmann::json::parse(resp.body, nullptr, false);
      if (body.is_discarded() || !body.contains("choices") || !body["choices"].is_array() || body["choices"].empty())
        throw FormalizerError(ErrorCode::ServiceUnreachable, "malformed chat-completion response", transcript);
      std::vector<std::string> out;
      for (const auto& choice : body["choices"]) {
        const auto& content = choice.contains("message") ? choice["message"].value("content", nlohmann::json()) : nlohmann::json();
        out.push_back(content.is_string() ? content.get<std::string>() : std::string());
      }
      return out;
    } catch (const FormalizerError&) {
      throw;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ServiceUnreachable && e.code() != ErrorCode::Timeout) throw;
      transcript.add("error", std::string(error_code_name(e.code())) + ": " + e.detail());
      last = e;
    }
  }
  throw FormalizerError(last->code(), last->detail() + " after " + std::to_string(cfg.max_retries + 1) + " attempt(s)",
                        transcript);
}

}  // namespace detail

struct FormalizeResult {
  Formalized ir;
  std::string def_name;
  std::string lean_source;
  Transcript transcript;
};

/// Sends the formalization prompt and validates the reply through
/// parse_lean_def, asking for a correction up to `max_retries` times.
inline FormalizeResult formalize_remote(std::string_view requirement, const FormalizerConfig& cfg,
                                        HttpTransport& transport) {
  cfg.validate();
  if (detail::trim(requirement).empty()) throw Error(ErrorCode::Usage, "requirement text is empty");
  Transcript transcript;
  nlohmann::json messages = nlohmann::json::array();
  const auto send = [&](std::string role, std::string content) {
    transcript.add(role, content);
    messages.push_back({{"role", std::move(role)}, {"content", std::move(content)}});
  };
  send("system", std::string(kFormalizeSystemPrompt));
  send("user", render_formalize_prompt(requirement));

  for (int round = 0;; ++round) {
    const auto choices = detail::chat(transport, cfg, messages, transcript);
    std::optional<Error> problem;
    bool any_block = false;
    for (const auto& content : choices) {
      transcript.add("assistant", content);
      const auto block = extract_lean_block(content);
      if (!block) continue;
      any_block = true;
      try {
        auto def = parse_lean_def(*block, "response");
        return FormalizeResult{std::move(def.ir), std::move(def.name), *block, std::move(transcript)};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::LeanParseError && e.code() != ErrorCode::UnsupportedLean) throw;
        if (!problem) problem = e;
      }
    }
    if (!any_block) throw FormalizerError(ErrorCode::NoCodeBlock, "response contains no ```lean4 code block", transcript);
    if (round >= cfg.max_retries)
      throw FormalizerError(ErrorCode::InvalidLean,
                            "no valid Lean after " + std::to_string(round + 1) + " response(s); last problem: " + problem->what(),
                            transcript);
    messages.push_back({{"role", "assistant"}, {"content", choices.front()}});
    std::string correction(kCorrectionTemplate);
    correction.replace(correction.find("{error}"), 7, problem->what());
    send("user", std::move(correction));
  }
}

struct ProveResult {
  std::string proof_text;  // the model's theorem text, unjudged
  Transcript transcript;
};

/// Asks the remote prover to complete `theorem`. The reply is returned as is;
/// the verdict of record stays with the enumeration engine.
inline ProveResult prove_remote(const LeanTheorem& theorem, const FormalizerConfig& cfg, HttpTransport& transport) {
  cfg.validate();
  Transcript transcript;
  nlohmann::json messages = nlohmann::json::array();
  for (auto [role, content] : {std::pair{std::string("system"), std::string(kProveSystemPrompt)},
                               std::pair{std::string("user"), render_prove_prompt(theorem)}}) {
    transcript.add(role, content);
    messages.push_back({{"role", role}, {"content", content}});
  }
  const auto choices = detail::chat(transport, cfg, messages, transcript);
  for (const auto& c : choices) transcript.add("assistant", c);
  for (const auto& c : choices) {
    if (auto block = extract_lean_block(c)) return ProveResult{*block, std::move(transcript)};
  }
  throw FormalizerError(ErrorCode::NoCodeBlock, "prover response contains no ```lean4 code block", transcript);
}

}  // namespace reqeq
