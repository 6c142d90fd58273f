#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "dbgpilot/errors.hpp"
#include "dbgpilot/llm/openai.hpp"

using namespace dbgpilot;
using namespace dbgpilot::llm;
using nlohmann::json;

namespace {

constexpr const char* kKeyVar = "DBGPILOT_TEST_FAKE_KEY";

std::string chunk(const json& delta, const json& finish = nullptr) {
  json c = {{"choices", json::array({{{"index", 0}, {"delta", delta}, {"finish_reason", finish}}})}};
  return "data: " + c.dump() + "\n\n";
}

// Local chat-completions endpoint; the handler decides each response.
class FakeProvider {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit FakeProvider(Handler h) {
    server_.Post("/v1/chat/completions", [this, h](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      h(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeProvider() {
    server_.stop();
    thread_.join();
  }

  RemoteOptions options() const {
    return RemoteOptions{"http://127.0.0.1:" + std::to_string(port_) + "/v1", kKeyVar};
  }

  std::atomic<int> requests{0};
  std::string last_body;
  std::string last_auth;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

struct KeyGuard {
  explicit KeyGuard(const char* value) {
    if (value) ::setenv(kKeyVar, value, 1);
    else ::unsetenv(kKeyVar);
  }
  ~KeyGuard() { ::unsetenv(kKeyVar); }
};

std::vector<CompletionEvent> complete(RemoteBackend& b, ModelConfig cfg = {}) {
  std::vector<CompletionEvent> events;
  b.complete({ChatMessage::system("s"), ChatMessage::user("why?")}, default_tools(), cfg,
             [&](const CompletionEvent& e) { events.push_back(e); });
  return events;
}

Error error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error(Errc::ConfigError, "none");
}

}  // namespace

TEST(RemoteBackend, MissingKeyFailsWithoutNetwork) {
  KeyGuard key(nullptr);
  FakeProvider provider([](const httplib::Request&, httplib::Response& res) { res.status = 200; });
  RemoteBackend b(provider.options());
  EXPECT_EQ(error_of([&] { complete(b); }).code(), Errc::AuthError);
  EXPECT_EQ(provider.requests.load(), 0);
}

TEST(RemoteBackend, RequestBodyShape) {
  ModelConfig cfg;
  json body = RemoteBackend::request_body({ChatMessage::user("hi")}, default_tools(), cfg);
  EXPECT_EQ(body["model"], "gpt-4o");
  EXPECT_TRUE(body["stream"].get<bool>());
  EXPECT_FALSE(body.contains("temperature"));
  EXPECT_EQ(body["tools"].size(), 3u);
  cfg.temperature = 0.0;
  EXPECT_EQ(RemoteBackend::request_body({}, {}, cfg)["temperature"], 0.0);
}

TEST(RemoteBackend, StreamsTextAndAssemblesToolCalls) {
  KeyGuard key("sk-test");
  FakeProvider provider([](const httplib::Request&, httplib::Response& res) {
    std::string body;
    body += chunk({{"role", "assistant"}, {"content", "Let me "}});
    body += chunk({{"content", "check."}});
    body += chunk({{"tool_calls", json::array({{{"index", 0}, {"id", "call_a"},
                                                {"function", {{"name", "debug"}, {"arguments", "{\"comm"}}}}})}});
    body += chunk({{"tool_calls", json::array({{{"index", 1}, {"id", "call_b"},
                                                {"function", {{"name", "code"}, {"arguments", "{\"loc\":"}}}}})}});
    body += chunk({{"tool_calls", json::array({{{"index", 0}, {"function", {{"arguments", "and\":\"bt\"}"}}}}})}});
    body += chunk({{"tool_calls", json::array({{{"index", 1}, {"function", {{"arguments", "\"a.c:3\"}"}}}}})}});
    body += chunk(json::object(), "tool_calls");
    body += "data: [DONE]\n\n";
    res.set_content(body, "text/event-stream");
  });
  RemoteBackend b(provider.options());
  auto events = complete(b);
  ASSERT_EQ(events.size(), 5u);
  EXPECT_EQ(std::get<TextDelta>(events[0]).text, "Let me ");
  EXPECT_EQ(std::get<TextDelta>(events[1]).text, "check.");
  const auto& c0 = std::get<ToolCallEvent>(events[2]).call;
  EXPECT_EQ(c0.id, "call_a");
  EXPECT_EQ(c0.arguments["command"], "bt");
  const auto& c1 = std::get<ToolCallEvent>(events[3]).call;
  EXPECT_EQ(c1.arguments["loc"], "a.c:3");
  EXPECT_EQ(std::get<Done>(events[4]).finish_reason, "tool_calls");
  EXPECT_EQ(provider.last_auth, "Bearer sk-test");
  EXPECT_EQ(json::parse(provider.last_body)["messages"][1]["content"], "why?");
}

TEST(RemoteBackend, MalformedArgumentsReported) {
  KeyGuard key("sk-test");
  FakeProvider provider([](const httplib::Request&, httplib::Response& res) {
    std::string body = chunk({{"tool_calls", json::array({{{"index", 0}, {"id", "x"},
                                                           {"function", {{"name", "debug"}, {"arguments", "{bad"}}}}})}});
    body += "data: [DONE]\n\n";
    res.set_content(body, "text/event-stream");
  });
  RemoteBackend b(provider.options());
  auto events = complete(b);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(std::get<MalformedToolCall>(events[0]).call.raw_arguments, "{bad");
}

TEST(RemoteBackend, UnauthorizedIsAuthError) {
  KeyGuard key("sk-wrong");
  FakeProvider provider([](const httplib::Request&, httplib::Response& res) {
    res.status = 401;
    res.set_content(R"({"error":{"message":"Incorrect API key"}})", "application/json");
  });
  RemoteBackend b(provider.options());
  Error e = error_of([&] { complete(b); });
  EXPECT_EQ(e.code(), Errc::AuthError);
  EXPECT_NE(std::string(e.what()).find("Incorrect API key"), std::string::npos);
  EXPECT_EQ(provider.requests.load(), 1);
}

TEST(RemoteBackend, RateLimitCarriesRetryAfter) {
  KeyGuard key("sk-test");
  FakeProvider provider([](const httplib::Request&, httplib::Response& res) {
    res.status = 429;
    res.set_header("Retry-After", "0");
    res.set_content(R"({"error":{"message":"slow down"}})", "application/json");
  });
  RemoteBackend b(provider.options());
  ModelConfig cfg;
  cfg.max_retries = 2;
  Error e = error_of([&] { complete(b, cfg); });
  EXPECT_EQ(e.code(), Errc::RateLimited);
  EXPECT_EQ(e.detail(), 0);
  EXPECT_EQ(provider.requests.load(), 3);
}

TEST(RemoteBackend, ServerErrorRetriedThenSucceeds) {
  KeyGuard key("sk-test");
  std::atomic<int> calls{0};
  FakeProvider provider([&](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 500;
      res.set_header("Retry-After", "0");
      res.set_content("oops", "text/plain");
      return;
    }
    res.set_content(chunk({{"content", "fine"}}, "stop") + "data: [DONE]\n\n", "text/event-stream");
  });
  RemoteBackend b(provider.options());
  auto events = complete(b);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(std::get<TextDelta>(events[0]).text, "fine");
  EXPECT_EQ(std::get<Done>(events[1]).finish_reason, "stop");
  EXPECT_EQ(provider.requests.load(), 2);
}

TEST(RemoteBackend, ClientErrorNotRetried) {
  KeyGuard key("sk-test");
  FakeProvider provider([](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
    res.set_content(R"({"error":{"message":"bad request"}})", "application/json");
  });
  RemoteBackend b(provider.options());
  EXPECT_EQ(error_of([&] { complete(b); }).code(), Errc::TransportError);
  EXPECT_EQ(provider.requests.load(), 1);
}

TEST(RemoteBackend, UnreachableHostIsTransportError) {
  KeyGuard key("sk-test");
  RemoteBackend b(RemoteOptions{"http://127.0.0.1:1/v1", kKeyVar});
  ModelConfig cfg;
  cfg.max_retries = 0;
  EXPECT_EQ(error_of([&] { complete(b, cfg); }).code(), Errc::TransportError);
}
