// Prompt construction, chat-completions client, response parsing and an
// on-disk response cache for LLM-based gender bias classification.
//
// The wire format is OpenAI-compatible JSON-over-HTTP: the request carries
// {model, messages, temperature}; the response must expose
// choices[0].message.content. Every classification request is sent with
// temperature exactly 0.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairrank/corpus.hpp"

namespace fairrank {

enum class PromptMode { ZeroShot, OneShot, ThreeShot, CoT };

/// Token form used in CLI flags, provenance strings and cache keys:
/// "zero" | "one" | "three" | "cot".
const char* to_string(PromptMode mode);
std::optional<PromptMode> prompt_mode_from_token(const std::string& token);

/// Participates in the cache key so prompt edits invalidate stored results.
inline constexpr const char* kPromptTemplateVersion = "1";

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;  // always 0 for classification calls
};

/// Builds the classification prompt as a single user message: the instruction
/// block with its three numbered criteria, the mode's demonstrations (none,
/// the neutral example alone, or all three), then "Document: {passage}" and a
/// trailing "Class:". CoT swaps the final instruction for the
/// reasoning-format directive and carries no demonstrations. Pure and
/// byte-deterministic. Throws on a document with no text and no title.
std::vector<ChatMessage> build_prompt(PromptMode mode, const Document& doc);

struct ClassifierOutput {
  GenderLabel label = GenderLabel::Unparseable;
  std::optional<std::string> reasoning;  // CoT only
  std::string raw;                       // verbatim completion
};

/// Never throws; anything that fails to yield a class token becomes
/// Unparseable with the raw completion preserved. Non-CoT completions are
/// trimmed of whitespace/punctuation and matched case-insensitively against
/// the class vocabulary; CoT extracts the token after the last "Class:"
/// marker and captures text after "Reasoning:" as the reasoning.
ClassifierOutput parse_response(const std::string& raw, PromptMode mode);

/// Content digest over (template version, model, mode, title, text); equal
/// inputs map to equal keys.
std::string cache_key(const std::string& model, PromptMode mode, const Document& doc);

/// Append-only on-disk store of raw completions keyed by cache_key. Records
/// are `key<TAB>label<TAB>base64(raw)` lines; a truncated trailing line from
/// an interrupted run is skipped on load. Reads and writes are serialized
/// internally, so one instance may be shared across threads.
class ResponseCache {
 public:
  explicit ResponseCache(std::string path);

  std::optional<std::string> find(const std::string& key) const;
  void put(const std::string& key, GenderLabel label, const std::string& raw);
  std::size_t size() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::map<std::string, std::string> raw_by_key_;
  mutable std::mutex mutex_;
};

/// Transport failures, HTTP non-success and malformed response envelopes.
/// Distinct from Unparseable, which is a well-formed completion without a
/// class token.
class ClientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EndpointConfig {
  std::string url;          // base URL; path defaults to /v1/chat/completions
  std::string model;
  std::string api_key_env;  // env var holding the bearer token; empty = none
  int max_attempts = 3;     // retries cover transport errors and 5xx only
  int backoff_initial_ms = 200;  // doubles per attempt
  int timeout_s = 120;
};

struct BatchFailure {
  std::string doc_id;
  std::string message;
};

/// Per-document failures never abort the batch; they are collected here.
struct BatchResult {
  LabelSet labels;
  std::vector<BatchFailure> failures;
};

class LlmClient {
 public:
  explicit LlmClient(EndpointConfig config, std::shared_ptr<ResponseCache> cache = nullptr);

  /// Cache hit returns the stored completion re-parsed, with no network I/O.
  ClassifierOutput classify(const Document& doc, PromptMode mode);

  /// Labels a document set with at most `parallelism` in-flight requests.
  /// Outcomes are keyed by doc_id and independent of completion order.
  /// Provenance is "llm:<model>:<mode>".
  BatchResult batch_classify(const std::vector<Document>& docs, PromptMode mode,
                             int parallelism);

  const EndpointConfig& config() const { return config_; }

 private:
  std::string post_chat(const ChatRequest& request);

  EndpointConfig config_;
  std::shared_ptr<ResponseCache> cache_;
};

}  // namespace fairrank
