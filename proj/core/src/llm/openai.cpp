#include "dbgpilot/llm/openai.hpp"

#include <curl/curl.h>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "dbgpilot/errors.hpp"
#include "dbgpilot/interrupt.hpp"
#include "dbgpilot/llm/sse.hpp"
#include "dbgpilot/text.hpp"

namespace dbgpilot::llm {

using nlohmann::json;

namespace {

void global_init() {
  static std::once_flag once;
  std::call_once(once, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

struct PartialCall {
  std::string id;
  std::string name;
  std::string arguments;
};

// Per-request state shared with the curl callbacks.
struct Exchange {
  const EventSink* sink = nullptr;
  CURL* curl = nullptr;
  long status = 0;
  std::string error_body;
  std::optional<long> retry_after;
  std::map<int, PartialCall> calls;
  std::string finish_reason;
  bool saw_done = false;
  bool emitted = false;
  std::optional<Error> failure;  // raised inside a callback
  std::unique_ptr<SseParser> sse;

  void on_event(const SseEvent& ev) {
    if (ev.data == "[DONE]") {
      saw_done = true;
      return;
    }
    json chunk = json::parse(ev.data, nullptr, false);
    if (chunk.is_discarded() || !chunk.is_object()) return;
    if (chunk.contains("error")) {
      failure = Error(Errc::TransportError, "provider error: " + chunk["error"].dump());
      return;
    }
    auto choices = chunk.find("choices");
    if (choices == chunk.end() || !choices->is_array() || choices->empty()) return;
    const json& choice = (*choices)[0];
    if (auto fr = choice.find("finish_reason"); fr != choice.end() && fr->is_string()) {
      finish_reason = fr->get<std::string>();
    }
    auto delta = choice.find("delta");
    if (delta == choice.end() || !delta->is_object()) return;
    if (auto content = delta->find("content"); content != delta->end() && content->is_string()) {
      std::string text = content->get<std::string>();
      if (!text.empty()) {
        emitted = true;
        (*sink)(TextDelta{std::move(text)});
      }
    }
    if (auto tcs = delta->find("tool_calls"); tcs != delta->end() && tcs->is_array()) {
      for (const json& tc : *tcs) {
        int index = tc.value("index", 0);
        PartialCall& pc = calls[index];
        if (tc.contains("id") && tc["id"].is_string()) pc.id = tc["id"].get<std::string>();
        if (auto fn = tc.find("function"); fn != tc.end() && fn->is_object()) {
          if (fn->contains("name") && (*fn)["name"].is_string()) {
            pc.name += (*fn)["name"].get<std::string>();
          }
          if (fn->contains("arguments") && (*fn)["arguments"].is_string()) {
            pc.arguments += (*fn)["arguments"].get<std::string>();
          }
        }
      }
    }
  }
};

size_t on_body(char* data, size_t size, size_t count, void* user) {
  auto* ex = static_cast<Exchange*>(user);
  const size_t n = size * count;
  if (ex->status == 0) curl_easy_getinfo(ex->curl, CURLINFO_RESPONSE_CODE, &ex->status);
  if (ex->status != 200) {
    ex->error_body.append(data, n);
    return n;
  }
  try {
    ex->sse->feed(std::string_view(data, n));
  } catch (const Error& e) {
    ex->failure = e;
    return 0;
  } catch (const std::exception& e) {
    ex->failure = Error(Errc::TransportError, e.what());
    return 0;
  }
  return ex->failure ? 0 : n;
}

size_t on_header(char* data, size_t size, size_t count, void* user) {
  auto* ex = static_cast<Exchange*>(user);
  const size_t n = size * count;
  std::string_view line(data, n);
  auto colon = line.find(':');
  if (colon != std::string_view::npos) {
    std::string name(trim(line.substr(0, colon)));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (name == "retry-after") {
      std::string value(trim(line.substr(colon + 1)));
      char* end = nullptr;
      long secs = std::strtol(value.c_str(), &end, 10);
      if (end != value.c_str()) ex->retry_after = secs;
    }
  }
  return n;
}

int on_progress(void*, curl_off_t, curl_off_t, curl_off_t, curl_off_t) {
  return interrupt_requested() ? 1 : 0;
}

std::string provider_message(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (!j.is_discarded() && j.contains("error")) {
    const json& e = j["error"];
    if (e.is_object() && e.contains("message") && e["message"].is_string()) {
      return e["message"].get<std::string>();
    }
    return e.dump();
  }
  return body.substr(0, 300);
}

bool retryable(const Error& e) {
  return e.code() == Errc::TransportError || e.code() == Errc::RateLimited;
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteOptions options) : options_(std::move(options)) {}

std::string RemoteBackend::describe() const { return "remote " + options_.base_url; }

json RemoteBackend::request_body(const std::vector<ChatMessage>& messages,
                                 const std::vector<ToolSpec>& tools, const ModelConfig& config) {
  json body = {{"model", config.model}, {"stream", true}};
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back(to_wire(m));
  body["messages"] = std::move(msgs);
  if (!tools.empty()) {
    json ts = json::array();
    for (const auto& t : tools) ts.push_back(to_wire(t));
    body["tools"] = std::move(ts);
  }
  if (config.temperature) body["temperature"] = *config.temperature;
  return body;
}

void RemoteBackend::complete(const std::vector<ChatMessage>& messages,
                             const std::vector<ToolSpec>& tools, const ModelConfig& config,
                             const EventSink& sink) {
  const char* key = std::getenv(options_.api_key_env.c_str());
  if (!key || !*key) {
    throw Error(Errc::AuthError,
                "no API key: set the " + options_.api_key_env + " environment variable");
  }
  global_init();
  const std::string body = request_body(messages, tools, config).dump();
  std::string url = options_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";

  for (int attempt = 0;; ++attempt) {
    Exchange ex;
    ex.sink = &sink;
    ex.sse = std::make_unique<SseParser>([&ex](const SseEvent& e) { ex.on_event(e); });

    std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
    if (!curl) throw Error(Errc::TransportError, "cannot initialise HTTP client");
    ex.curl = curl.get();
    curl_slist* headers = nullptr;
    headers = curl_slist_append(headers, "Content-Type: application/json");
    headers = curl_slist_append(headers, "Accept: text/event-stream");
    headers = curl_slist_append(headers, ("Authorization: Bearer " + std::string(key)).c_str());
    std::unique_ptr<curl_slist, decltype(&curl_slist_free_all)> header_guard(headers,
                                                                            curl_slist_free_all);
    curl_easy_setopt(ex.curl, CURLOPT_URL, url.c_str());
    curl_easy_setopt(ex.curl, CURLOPT_HTTPHEADER, headers);
    curl_easy_setopt(ex.curl, CURLOPT_POSTFIELDS, body.c_str());
    curl_easy_setopt(ex.curl, CURLOPT_POSTFIELDSIZE, static_cast<long>(body.size()));
    curl_easy_setopt(ex.curl, CURLOPT_WRITEFUNCTION, on_body);
    curl_easy_setopt(ex.curl, CURLOPT_WRITEDATA, &ex);
    curl_easy_setopt(ex.curl, CURLOPT_HEADERFUNCTION, on_header);
    curl_easy_setopt(ex.curl, CURLOPT_HEADERDATA, &ex);
    curl_easy_setopt(ex.curl, CURLOPT_XFERINFOFUNCTION, on_progress);
    curl_easy_setopt(ex.curl, CURLOPT_NOPROGRESS, 0L);
    curl_easy_setopt(ex.curl, CURLOPT_NOSIGNAL, 1L);
    curl_easy_setopt(ex.curl, CURLOPT_TIMEOUT_MS, static_cast<long>(config.request_timeout.count()));
    curl_easy_setopt(ex.curl, CURLOPT_CONNECTTIMEOUT_MS, 15'000L);

    CURLcode rc = curl_easy_perform(ex.curl);
    curl_easy_getinfo(ex.curl, CURLINFO_RESPONSE_CODE, &ex.status);

    std::optional<Error> err;
    if (rc == CURLE_ABORTED_BY_CALLBACK) {
      err = Error(Errc::Interrupted, "request interrupted");
    } else if (ex.failure) {
      err = ex.failure;
    } else if (rc != CURLE_OK) {
      err = Error(Errc::TransportError, std::string("HTTP request failed: ") + curl_easy_strerror(rc));
    } else if (ex.status == 401 || ex.status == 403) {
      err = Error(Errc::AuthError, "provider rejected the API key: " + provider_message(ex.error_body));
    } else if (ex.status == 429) {
      Error e(Errc::RateLimited, "rate limited: " + provider_message(ex.error_body));
      if (ex.retry_after) e.with_detail(*ex.retry_after);
      err = e;
    } else if (ex.status != 200) {
      err = Error(Errc::TransportError,
                  "HTTP " + std::to_string(ex.status) + ": " + provider_message(ex.error_body));
    }

    if (err) {
      const bool server_side = ex.status == 0 || ex.status == 429 || ex.status >= 500;
      if (!ex.emitted && retryable(*err) && server_side && attempt < config.max_retries) {
        long wait_s = ex.retry_after.value_or(1L << std::min(attempt, 4));
        for (long ms = 0; ms < std::min(wait_s, 30L) * 1000 && !interrupt_requested(); ms += 50) {
          std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        if (!interrupt_requested()) continue;
        throw Error(Errc::Interrupted, "request interrupted");
      }
      throw *err;
    }

    ex.sse->finish();
    for (auto& [index, pc] : ex.calls) {
      std::string id = pc.id.empty() ? "call_" + std::to_string(index) : pc.id;
      try {
        sink(ToolCallEvent{make_tool_call(id, pc.name, pc.arguments, tools)});
      } catch (const Error& e) {
        if (e.code() != Errc::MalformedToolArgs) throw;
        sink(MalformedToolCall{ToolCallRequest{id, pc.name, json::object(), pc.arguments},
                               e.what()});
      }
    }
    std::string finish = ex.finish_reason;
    if (finish.empty()) finish = ex.calls.empty() ? "stop" : "tool_calls";
    sink(Done{finish});
    return;
  }
}

}  // namespace dbgpilot::llm
