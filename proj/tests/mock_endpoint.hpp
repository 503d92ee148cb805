// In-process chat-completions mock for exercising the LLM client without a
// network. Scripts decide, per request, the HTTP status and completion text.

#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace test_support {

struct MockReply {
  int status = 200;
  std::string content;  // completion text for 200 replies
};

class MockEndpoint {
 public:
  // The handler receives the parsed request body and a 0-based request index.
  using Handler = std::function<MockReply(const nlohmann::json& request, int index)>;

  explicit MockEndpoint(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   const int index = requests_.fetch_add(1);
                   nlohmann::json body;
                   try {
                     body = nlohmann::json::parse(req.body);
                   } catch (const nlohmann::json::exception&) {
                     bad_requests_.fetch_add(1);
                     res.status = 400;
                     return;
                   }
                   if (!body.contains("temperature") ||
                       body["temperature"].get<double>() != 0.0)
                     nonzero_temperature_.fetch_add(1);
                   if (!body.contains("model") || !body.contains("messages"))
                     bad_requests_.fetch_add(1);
                   const MockReply reply = handler_(body, index);
                   res.status = reply.status;
                   if (reply.status == 200) {
                     const nlohmann::json envelope = {
                         {"choices",
                          {{{"message",
                             {{"role", "assistant"}, {"content", reply.content}}}}}}};
                     res.set_content(envelope.dump(), "application/json");
                   }
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this]() { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockEndpoint() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int requests() const { return requests_.load(); }
  int nonzero_temperature() const { return nonzero_temperature_.load(); }
  int bad_requests() const { return bad_requests_.load(); }

  // Extracts the passage from the prompt's trailing "Document: ...\nClass:".
  static std::string passage_of(const nlohmann::json& request) {
    const std::string content = request["messages"][0]["content"].get<std::string>();
    const std::size_t begin = content.rfind("Document: ");
    if (begin == std::string::npos) return {};
    const std::size_t end = content.rfind("\nClass:");
    if (end == std::string::npos || end < begin) return {};
    return content.substr(begin + 10, end - begin - 10);
  }

 private:
  httplib::Server server_;
  Handler handler_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::atomic<int> nonzero_temperature_{0};
  std::atomic<int> bad_requests_{0};
};

}  // namespace test_support
