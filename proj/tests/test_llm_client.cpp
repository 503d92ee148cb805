#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fairrank/llm_client.hpp"
#include "fairrank/report.hpp"
#include "mock_endpoint.hpp"

using namespace fairrank;
using test_support::MockEndpoint;
using test_support::MockReply;

namespace {

Document golden_doc() {
  Document doc;
  doc.doc_id = "g1";
  doc.title = "Example Title";
  doc.text = "An example passage about rankings.";
  return doc;
}

std::string golden_prompt(const char* name) {
  std::string content = read_file(std::string(FAIRRANK_SOURCE_DIR) + "/tests/golden/" + name);
  if (!content.empty() && content.back() == '\n') content.pop_back();
  return content;
}

std::filesystem::path temp_path(const char* stem) {
  return std::filesystem::temp_directory_path() /
         (std::string(stem) + std::to_string(::getpid()) + ".tsv");
}

EndpointConfig quick_config(const std::string& url) {
  EndpointConfig config;
  config.url = url;
  config.model = "mock-model";
  config.max_attempts = 3;
  config.backoff_initial_ms = 1;
  config.timeout_s = 10;
  return config;
}

}  // namespace

TEST_CASE("build_prompt matches the golden files byte for byte") {
  const Document doc = golden_doc();
  const struct {
    PromptMode mode;
    const char* file;
  } cases[] = {
      {PromptMode::ZeroShot, "prompt_zero.txt"},
      {PromptMode::OneShot, "prompt_one.txt"},
      {PromptMode::ThreeShot, "prompt_three.txt"},
      {PromptMode::CoT, "prompt_cot.txt"},
  };
  for (const auto& c : cases) {
    const auto messages = build_prompt(c.mode, doc);
    REQUIRE(messages.size() == 1);
    CHECK(messages[0].role == "user");
    CHECK(messages[0].content == golden_prompt(c.file));
  }
}

TEST_CASE("build_prompt structure per mode") {
  const Document doc = golden_doc();
  const std::string zero = build_prompt(PromptMode::ZeroShot, doc)[0].content;
  const std::string one = build_prompt(PromptMode::OneShot, doc)[0].content;
  const std::string three = build_prompt(PromptMode::ThreeShot, doc)[0].content;
  const std::string cot = build_prompt(PromptMode::CoT, doc)[0].content;

  CHECK(zero.find("Document 1:") == std::string::npos);
  CHECK(one.find("Document 1:") != std::string::npos);
  CHECK(one.find("Document 2:") == std::string::npos);
  CHECK(three.find("This helpful article dives") != std::string::npos);
  CHECK(three.find("7 reasons why men make great entrepreneurs") != std::string::npos);
  CHECK(three.find("Being a mom can be tough") != std::string::npos);
  CHECK(cot.find("\"Class:\" label") != std::string::npos);
  CHECK(cot.find("\"Reasoning:\" label") != std::string::npos);
  CHECK(cot.find("Please, generate only") == std::string::npos);

  // Deterministic: two builds are byte-identical.
  CHECK(build_prompt(PromptMode::ThreeShot, doc)[0].content == three);

  Document untitled;
  untitled.doc_id = "u";
  untitled.text = "body only";
  CHECK(build_prompt(PromptMode::ZeroShot, untitled)[0].content.find(
            "Document: body only\nClass:") != std::string::npos);

  Document empty;
  empty.doc_id = "e";
  CHECK_THROWS_AS(build_prompt(PromptMode::ZeroShot, empty), std::invalid_argument);
}

TEST_CASE("parse_response handles the class vocabulary and failure modes") {
  CHECK(parse_response("Neutral", PromptMode::ZeroShot).label == GenderLabel::Neutral);
  CHECK(parse_response("female ", PromptMode::OneShot).label == GenderLabel::Female);
  CHECK(parse_response("NEUTRAL", PromptMode::ThreeShot).label == GenderLabel::Neutral);
  CHECK(parse_response(" Male.", PromptMode::ZeroShot).label == GenderLabel::Male);
  CHECK(parse_response("", PromptMode::ZeroShot).label == GenderLabel::Unparseable);
  CHECK(parse_response("I think it's biased", PromptMode::ZeroShot).label ==
        GenderLabel::Unparseable);
  CHECK_FALSE(parse_response("Male", PromptMode::ZeroShot).reasoning.has_value());

  const auto cot =
      parse_response("Class: Male\nReasoning: the passage centers men.", PromptMode::CoT);
  CHECK(cot.label == GenderLabel::Male);
  REQUIRE(cot.reasoning.has_value());
  CHECK(*cot.reasoning == "the passage centers men.");

  const auto reversed =
      parse_response("Reasoning: focuses on women.\nClass: Female", PromptMode::CoT);
  CHECK(reversed.label == GenderLabel::Female);
  REQUIRE(reversed.reasoning.has_value());
  CHECK(*reversed.reasoning == "focuses on women.");

  // CoT without the marker is unparseable even if a class word appears.
  const auto no_marker = parse_response("The document is Male.", PromptMode::CoT);
  CHECK(no_marker.label == GenderLabel::Unparseable);
  CHECK(no_marker.raw == "The document is Male.");
}

TEST_CASE("cache keys separate every input dimension") {
  const Document doc = golden_doc();
  const std::string base = cache_key("m1", PromptMode::ZeroShot, doc);
  CHECK(base == cache_key("m1", PromptMode::ZeroShot, doc));
  CHECK(base != cache_key("m2", PromptMode::ZeroShot, doc));
  CHECK(base != cache_key("m1", PromptMode::OneShot, doc));

  Document other_text = doc;
  other_text.text += "!";
  CHECK(base != cache_key("m1", PromptMode::ZeroShot, other_text));

  Document no_title = doc;
  no_title.title.reset();
  CHECK(base != cache_key("m1", PromptMode::ZeroShot, no_title));

  // Empty title and absent title are distinct inputs.
  Document empty_title = doc;
  empty_title.title = "";
  CHECK(cache_key("m1", PromptMode::ZeroShot, no_title) !=
        cache_key("m1", PromptMode::ZeroShot, empty_title));
}

TEST_CASE("response cache persists and survives truncated tails") {
  const auto path = temp_path("fairrank_cache_");
  std::filesystem::remove(path);
  {
    ResponseCache cache(path.string());
    CHECK_FALSE(cache.find("k1").has_value());
    cache.put("k1", GenderLabel::Female, "Female\n");
    cache.put("k2", GenderLabel::Neutral, "Neutral");
    CHECK(cache.size() == 2);
    REQUIRE(cache.find("k1").has_value());
    CHECK(*cache.find("k1") == "Female\n");
  }
  {
    // Simulate an interrupted append.
    std::ofstream out(path, std::ios::app | std::ios::binary);
    out << "k3\tmale";
  }
  ResponseCache reloaded(path.string());
  CHECK(reloaded.size() == 2);
  CHECK(*reloaded.find("k2") == "Neutral");
  CHECK_FALSE(reloaded.find("k3").has_value());
  std::filesystem::remove(path);
}

TEST_CASE("classify talks to the endpoint once and then replays the cache") {
  MockEndpoint mock([](const nlohmann::json&, int) { return MockReply{200, "Female"}; });
  const auto path = temp_path("fairrank_classify_");
  std::filesystem::remove(path);
  auto cache = std::make_shared<ResponseCache>(path.string());
  LlmClient client(quick_config(mock.url()), cache);

  const ClassifierOutput first = client.classify(golden_doc(), PromptMode::ZeroShot);
  CHECK(first.label == GenderLabel::Female);
  CHECK(first.raw == "Female");
  CHECK(mock.requests() == 1);

  const ClassifierOutput second = client.classify(golden_doc(), PromptMode::ZeroShot);
  CHECK(second.label == first.label);
  CHECK(second.raw == first.raw);
  CHECK(mock.requests() == 1);  // served from cache
  CHECK(mock.nonzero_temperature() == 0);
  CHECK(mock.bad_requests() == 0);
  std::filesystem::remove(path);
}

TEST_CASE("transient 5xx responses are retried within the budget") {
  MockEndpoint mock([](const nlohmann::json&, int index) {
    if (index < 2) return MockReply{500, ""};
    return MockReply{200, "Neutral"};
  });
  LlmClient client(quick_config(mock.url()));
  const ClassifierOutput out = client.classify(golden_doc(), PromptMode::ZeroShot);
  CHECK(out.label == GenderLabel::Neutral);
  CHECK(mock.requests() == 3);
}

TEST_CASE("persistent 5xx exhausts the retry budget") {
  MockEndpoint mock([](const nlohmann::json&, int) { return MockReply{503, ""}; });
  LlmClient client(quick_config(mock.url()));
  CHECK_THROWS_AS(client.classify(golden_doc(), PromptMode::ZeroShot), ClientError);
  CHECK(mock.requests() == 3);
}

TEST_CASE("4xx responses are terminal, not retried") {
  MockEndpoint mock([](const nlohmann::json&, int) { return MockReply{401, ""}; });
  LlmClient client(quick_config(mock.url()));
  CHECK_THROWS_AS(client.classify(golden_doc(), PromptMode::ZeroShot), ClientError);
  CHECK(mock.requests() == 1);
}

TEST_CASE("a malformed response envelope is a client error") {
  // The mock always wraps content in a valid envelope, so use a bare server.
  httplib::Server server;
  server.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"unexpected\": true}", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&]() { server.listen_after_bind(); });
  server.wait_until_ready();
  LlmClient client(quick_config("http://127.0.0.1:" + std::to_string(port)));
  CHECK_THROWS_AS(client.classify(golden_doc(), PromptMode::ZeroShot), ClientError);
  server.stop();
  thread.join();
}

TEST_CASE("an unreachable endpoint raises a transport error after retries") {
  EndpointConfig config = quick_config("http://127.0.0.1:1");
  config.timeout_s = 1;
  LlmClient client(config);
  CHECK_THROWS_AS(client.classify(golden_doc(), PromptMode::ZeroShot), ClientError);
}

TEST_CASE("batch results are independent of parallelism and order") {
  auto by_passage = [](const nlohmann::json& request, int) {
    const std::string passage = MockEndpoint::passage_of(request);
    if (passage.find("alpha") != std::string::npos) return MockReply{200, "Male"};
    if (passage.find("beta") != std::string::npos) return MockReply{200, "Female"};
    return MockReply{200, "Neutral"};
  };

  std::vector<Document> docs;
  for (int i = 0; i < 12; ++i) {
    Document doc;
    doc.doc_id = "d" + std::to_string(i);
    doc.text = (i % 3 == 0 ? "alpha" : (i % 3 == 1 ? "beta" : "gamma")) + std::string(" passage ") +
               std::to_string(i);
    docs.push_back(doc);
  }

  MockEndpoint mock_a(by_passage);
  LlmClient serial(quick_config(mock_a.url()));
  const BatchResult a = serial.batch_classify(docs, PromptMode::ZeroShot, 1);

  MockEndpoint mock_b(by_passage);
  LlmClient parallel(quick_config(mock_b.url()));
  const BatchResult b = parallel.batch_classify(docs, PromptMode::ZeroShot, 8);

  CHECK(a.failures.empty());
  CHECK(b.failures.empty());
  CHECK(a.labels.labels == b.labels.labels);
  CHECK(a.labels.provenance == "llm:mock-model:zero");
  CHECK(a.labels.labels.at("d0") == GenderLabel::Male);
  CHECK(a.labels.labels.at("d1") == GenderLabel::Female);
  CHECK(a.labels.labels.at("d2") == GenderLabel::Neutral);
  CHECK(mock_a.requests() == 12);
  CHECK(mock_b.requests() == 12);
  CHECK(mock_b.nonzero_temperature() == 0);
}

TEST_CASE("a warm cache serves the whole batch with zero network calls") {
  auto ok = [](const nlohmann::json&, int) { return MockReply{200, "Neutral"}; };
  std::vector<Document> docs;
  for (int i = 0; i < 20; ++i) {
    Document doc;
    doc.doc_id = "d" + std::to_string(i);
    doc.text = "passage " + std::to_string(i);
    docs.push_back(doc);
  }
  const auto path = temp_path("fairrank_batch_cache_");
  std::filesystem::remove(path);

  MockEndpoint warmup(ok);
  {
    auto cache = std::make_shared<ResponseCache>(path.string());
    LlmClient client(quick_config(warmup.url()), cache);
    const BatchResult result = client.batch_classify(docs, PromptMode::OneShot, 4);
    CHECK(result.failures.empty());
    CHECK(warmup.requests() == 20);
  }

  MockEndpoint replay(ok);
  auto cache = std::make_shared<ResponseCache>(path.string());
  LlmClient client(quick_config(replay.url()), cache);
  const BatchResult result = client.batch_classify(docs, PromptMode::OneShot, 4);
  CHECK(result.failures.empty());
  CHECK(result.labels.labels.size() == 20);
  CHECK(replay.requests() == 0);
  std::filesystem::remove(path);
}

TEST_CASE("one scripted failure yields a partial result, not an abort") {
  auto flaky = [](const nlohmann::json& request, int) {
    if (MockEndpoint::passage_of(request).find("poison") != std::string::npos)
      return MockReply{400, ""};
    return MockReply{200, "Neutral"};
  };
  std::vector<Document> docs;
  for (int i = 0; i < 10; ++i) {
    Document doc;
    doc.doc_id = "d" + std::to_string(i);
    doc.text = i == 4 ? "poison pill" : "passage " + std::to_string(i);
    docs.push_back(doc);
  }
  MockEndpoint mock(flaky);
  LlmClient client(quick_config(mock.url()));
  const BatchResult result = client.batch_classify(docs, PromptMode::ZeroShot, 3);
  CHECK(result.labels.labels.size() == 9);
  REQUIRE(result.failures.size() == 1);
  CHECK(result.failures[0].doc_id == "d4");
  CHECK(result.labels.labels.find("d4") == result.labels.labels.end());
}

TEST_CASE("prompt mode tokens round-trip") {
  CHECK(prompt_mode_from_token("zero") == PromptMode::ZeroShot);
  CHECK(prompt_mode_from_token("one-shot") == PromptMode::OneShot);
  CHECK(prompt_mode_from_token("THREE") == PromptMode::ThreeShot);
  CHECK(prompt_mode_from_token("cot") == PromptMode::CoT);
  CHECK_FALSE(prompt_mode_from_token("five").has_value());
  CHECK(std::string(to_string(PromptMode::ThreeShot)) == "three");
}
