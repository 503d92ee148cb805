#include "fairrank/llm_client.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "fairrank/digest.hpp"
#include "httplib.h"
#include "json.hpp"

namespace fairrank {

namespace {

// The classification instruction block, demonstrations included. Byte
// fidelity matters here: tests pin the output against golden files, and the
// template version below participates in cache keys.

const char* const kInstructionIntro =
    "Instruction: You are a document gender bias detector tasked with classifying documents "
    "into three categories: Male, Female, or Neutral.\n"
    "A document is classified as \"Male\" if it shows bias toward the male gender, \"Female\" "
    "if it shows bias toward the female gender, and \"Neutral\" if it is "
    "unbiased—either treating both genders equally or not focusing on any particular "
    "gender.";

const char* const kCriteria =
    "When classifying documents, take into account:\n"
    "1. The frequency of gender-specific terms such as \"male\", \"female\", \"she\", and "
    "\"he\".\n"
    "2. The fairness and balance of information and analysis for all genders.\n"
    "3. The equal representation of all genders in the document's lead.";

const char* const kClassOnlyInstruction =
    "Please, generate only the predicted class for the document, which must be strictly one "
    "of the following: Male, Female, or Neutral.";

const char* const kReasoningInstruction =
    "You must provide your reasoning and present the answer in the following format: the "
    "predicted class, strictly limited to Male, Female, or Neutral, must be included after "
    "the \"Class:\" label, and the reasoning must follow the \"Reasoning:\" label.";

const char* const kDemoNeutral =
    "Document 1: This helpful article dives into the 10-step Korean skincare routine for you "
    "and examines each of the steps in detail.\n"
    "Class: Neutral";

const char* const kDemoMale =
    "Document 2: It’s often frustrating for men to hear the popular sentiment that "
    "women make better entrepreneurs than men. It’s not fashionable to argue, but the "
    "truth is that the number of female-owned businesses are growing at a faster rate. In "
    "any case, we’d like to present 7 reasons why men make great entrepreneurs.\n"
    "Class: Male";

const char* const kDemoFemale =
    "Document 3: Popular press would suggest if you’re a mom you’re always happy, "
    "fulfilled and joyous—and if you’re not, somehow you’re not measuring up. "
    "Being a mom can be tough. In fact, as the saying goes, if you don’t find it hard "
    "sometimes, you may not be paying attention.\n"
    "Class: Female";

std::string strip_edges(const std::string& s) {
  static const std::string kStrip = " \t\r\n.,:;!?\"'()[]{}*`";
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && kStrip.find(s[begin]) != std::string::npos) ++begin;
  while (end > begin && kStrip.find(s[end - 1]) != std::string::npos) --end;
  return s.substr(begin, end - begin);
}

std::size_t find_last_ci(const std::string& haystack, const std::string& needle) {
  const std::string lower = to_lower(haystack);
  return lower.rfind(to_lower(needle));
}

std::size_t find_first_ci(const std::string& haystack, const std::string& needle) {
  const std::string lower = to_lower(haystack);
  return lower.find(to_lower(needle));
}

// First whitespace-delimited token at or after `pos`, with edge punctuation
// stripped.
std::string token_at(const std::string& s, std::size_t pos) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  std::size_t end = pos;
  while (end < s.size() && !std::isspace(static_cast<unsigned char>(s[end]))) ++end;
  return strip_edges(s.substr(pos, end - pos));
}

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_endpoint_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ClientError("endpoint URL must include a scheme: '" + url + "'");
  const std::size_t path_begin = url.find('/', scheme_end + 3);
  ParsedUrl parsed;
  if (path_begin == std::string::npos) {
    parsed.base = url;
    parsed.path = "/v1/chat/completions";
  } else {
    parsed.base = url.substr(0, path_begin);
    parsed.path = url.substr(path_begin);
    if (parsed.path == "/") parsed.path = "/v1/chat/completions";
  }
  return parsed;
}

nlohmann::json to_json(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& message : request.messages)
    messages.push_back({{"role", message.role}, {"content", message.content}});
  return {{"model", request.model}, {"messages", messages}, {"temperature", request.temperature}};
}

}  // namespace

const char* to_string(PromptMode mode) {
  switch (mode) {
    case PromptMode::ZeroShot: return "zero";
    case PromptMode::OneShot: return "one";
    case PromptMode::ThreeShot: return "three";
    case PromptMode::CoT: return "cot";
  }
  return "?";
}

std::optional<PromptMode> prompt_mode_from_token(const std::string& token) {
  const std::string t = to_lower(trim(token));
  if (t == "zero" || t == "zero-shot") return PromptMode::ZeroShot;
  if (t == "one" || t == "one-shot") return PromptMode::OneShot;
  if (t == "three" || t == "three-shot") return PromptMode::ThreeShot;
  if (t == "cot") return PromptMode::CoT;
  return std::nullopt;
}

std::vector<ChatMessage> build_prompt(PromptMode mode, const Document& doc) {
  if (doc.text.empty() && (!doc.title || doc.title->empty()))
    throw std::invalid_argument("cannot build a prompt for an empty document");

  std::string body;
  body += kInstructionIntro;
  body += "\n\n";
  body += kCriteria;
  body += "\n\n";
  body += mode == PromptMode::CoT ? kReasoningInstruction : kClassOnlyInstruction;
  body += "\n\n";
  if (mode == PromptMode::OneShot) {
    body += kDemoNeutral;
    body += "\n\n";
  } else if (mode == PromptMode::ThreeShot) {
    body += kDemoNeutral;
    body += "\n\n";
    body += kDemoMale;
    body += "\n\n";
    body += kDemoFemale;
    body += "\n\n";
  }
  body += "Document: ";
  body += doc.passage();
  body += "\nClass:";
  return {{"user", body}};
}

ClassifierOutput parse_response(const std::string& raw, PromptMode mode) {
  ClassifierOutput out;
  out.raw = raw;

  if (mode != PromptMode::CoT) {
    if (const auto label = gender_label_from_token(strip_edges(raw))) out.label = *label;
    return out;
  }

  const std::size_t class_pos = find_last_ci(raw, "class:");
  if (class_pos != std::string::npos) {
    const std::string token = token_at(raw, class_pos + 6);
    if (const auto label = gender_label_from_token(token)) out.label = *label;
  }
  const std::size_t reasoning_pos = find_first_ci(raw, "reasoning:");
  if (reasoning_pos != std::string::npos) {
    // A trailing "Class: X" block belongs to the label, not the reasoning.
    std::size_t end = raw.size();
    if (class_pos != std::string::npos && class_pos > reasoning_pos) end = class_pos;
    const std::string reasoning = trim(raw.substr(reasoning_pos + 10, end - reasoning_pos - 10));
    if (!reasoning.empty()) out.reasoning = reasoning;
  }
  return out;
}

std::string cache_key(const std::string& model, PromptMode mode, const Document& doc) {
  const nlohmann::json key = {
      {"template", kPromptTemplateVersion},
      {"model", model},
      {"mode", to_string(mode)},
      {"title", doc.title ? nlohmann::json(*doc.title) : nlohmann::json(nullptr)},
      {"text", doc.text},
  };
  return sha256_hex(key.dump());
}

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_tab(line);
    if (fields.size() != 3) continue;  // truncated tail from an interrupted run
    try {
      raw_by_key_.emplace(fields[0], base64_decode(fields[2]));
    } catch (const std::invalid_argument&) {
      continue;
    }
  }
}

std::optional<std::string> ResponseCache::find(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto it = raw_by_key_.find(key);
  if (it == raw_by_key_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const std::string& key, GenderLabel label, const std::string& raw) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!raw_by_key_.emplace(key, raw).second) return;  // keep the first stored completion
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot append to cache file '" + path_ + "'");
  out << key << '\t' << to_string(label) << '\t' << base64_encode(raw) << '\n';
  out.flush();
}

std::size_t ResponseCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return raw_by_key_.size();
}

LlmClient::LlmClient(EndpointConfig config, std::shared_ptr<ResponseCache> cache)
    : config_(std::move(config)), cache_(std::move(cache)) {
  if (config_.url.empty()) throw std::invalid_argument("endpoint URL is required");
  if (config_.model.empty()) throw std::invalid_argument("model name is required");
  if (config_.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
}

std::string LlmClient::post_chat(const ChatRequest& request) {
  const ParsedUrl url = parse_endpoint_url(config_.url);
  const std::string body = to_json(request).dump();

  std::string api_key;
  if (!config_.api_key_env.empty()) {
    if (const char* value = std::getenv(config_.api_key_env.c_str())) api_key = value;
  }

  std::string last_error;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      const auto delay = std::chrono::milliseconds(
          static_cast<long long>(config_.backoff_initial_ms) << (attempt - 2));
      std::this_thread::sleep_for(delay);
    }
    httplib::Client client(url.base);
    client.set_connection_timeout(config_.timeout_s, 0);
    client.set_read_timeout(config_.timeout_s, 0);
    client.set_write_timeout(config_.timeout_s, 0);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    auto result = client.Post(url.path, headers, body, "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 500) {
      last_error = "server error: HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status < 200 || result->status >= 300)
      throw ClientError("endpoint returned HTTP " + std::to_string(result->status));

    try {
      const nlohmann::json envelope = nlohmann::json::parse(result->body);
      return envelope.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ClientError(std::string("malformed response envelope: ") + e.what());
    }
  }
  throw ClientError("request failed after " + std::to_string(config_.max_attempts) +
                    " attempts; last error: " + last_error);
}

ClassifierOutput LlmClient::classify(const Document& doc, PromptMode mode) {
  const std::string key = cache_key(config_.model, mode, doc);
  if (cache_) {
    if (const auto raw = cache_->find(key)) return parse_response(*raw, mode);
  }
  ChatRequest request;
  request.model = config_.model;
  request.messages = build_prompt(mode, doc);
  request.temperature = 0.0;
  const std::string raw = post_chat(request);
  ClassifierOutput out = parse_response(raw, mode);
  if (cache_) cache_->put(key, out.label, raw);
  return out;
}

BatchResult LlmClient::batch_classify(const std::vector<Document>& docs, PromptMode mode,
                                      int parallelism) {
  if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
  BatchResult result;
  result.labels.provenance = "llm:" + config_.model + ":" + to_string(mode);

  std::mutex result_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= docs.size()) break;
      try {
        const ClassifierOutput out = classify(docs[i], mode);
        std::lock_guard<std::mutex> lock(result_mutex);
        result.labels.labels[docs[i].doc_id] = out.label;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(result_mutex);
        result.failures.push_back({docs[i].doc_id, e.what()});
      }
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(parallelism), docs.size());
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
  for (auto& thread : workers) thread.join();

  std::sort(result.failures.begin(), result.failures.end(),
            [](const BatchFailure& a, const BatchFailure& b) { return a.doc_id < b.doc_id; });
  return result;
}

}  // namespace fairrank
