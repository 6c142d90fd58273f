#include "dbgpilot/lsp/client.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "dbgpilot/errors.hpp"

namespace dbgpilot::lsp {

using nlohmann::json;

namespace {

bool unreserved(unsigned char c) {
  return std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~' || c == '/';
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string path_to_uri(const std::filesystem::path& p) {
  static const char* digits = "0123456789ABCDEF";
  std::string out = "file://";
  for (unsigned char c : p.string()) {
    if (unreserved(c)) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += digits[c >> 4];
      out += digits[c & 15];
    }
  }
  return out;
}

std::optional<std::filesystem::path> uri_to_path(std::string_view uri) {
  constexpr std::string_view scheme = "file://";
  if (uri.substr(0, scheme.size()) != scheme) return std::nullopt;
  uri.remove_prefix(scheme.size());
  std::string out;
  for (std::size_t i = 0; i < uri.size(); ++i) {
    if (uri[i] == '%' && i + 2 < uri.size()) {
      int hi = hex_value(uri[i + 1]);
      int lo = hex_value(uri[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += uri[i];
  }
  return std::filesystem::path(out);
}

std::optional<Location> first_location(const json& result) {
  const json* item = &result;
  if (result.is_array()) {
    if (result.empty()) return std::nullopt;
    item = &result[0];
  }
  if (!item->is_object()) return std::nullopt;
  const char* uri_key = item->contains("targetUri") ? "targetUri" : "uri";
  const char* range_key = item->contains("targetSelectionRange") ? "targetSelectionRange"
                          : item->contains("targetRange")         ? "targetRange"
                                                                  : "range";
  if (!item->contains(uri_key) || !(*item)[uri_key].is_string()) return std::nullopt;
  auto file = uri_to_path((*item)[uri_key].get<std::string>());
  if (!file) return std::nullopt;
  const json& start = (*item).value(range_key, json::object()).value("start", json::object());
  if (!start.contains("line")) return std::nullopt;
  return Location{*file, start["line"].get<int>() + 1, start.value("character", 0)};
}

LspClient::LspClient(std::unique_ptr<Transport> transport, std::filesystem::path workspace_root,
                     std::chrono::milliseconds timeout)
    : transport_(std::move(transport)), root_(std::move(workspace_root)), timeout_(timeout) {
  std::error_code ec;
  auto canon = std::filesystem::weakly_canonical(std::filesystem::absolute(root_), ec);
  if (!ec) root_ = canon;
}

LspClient::~LspClient() {
  try {
    shutdown();
  } catch (...) {
  }
}

json LspClient::initialize() {
  if (initialized_) return json::object();
  const long id = next_id_++;
  json params = {
      {"processId", static_cast<long>(::getpid())},
      {"rootUri", path_to_uri(root_)},
      {"capabilities",
       {{"textDocument",
         {{"definition", {{"linkSupport", false}}},
          {"synchronization", {{"didSave", false}}}}}}},
      {"workspaceFolders", json::array({{{"uri", path_to_uri(root_)}, {"name", "workspace"}}})},
  };
  transport_->send({{"jsonrpc", "2.0"}, {"id", id}, {"method", "initialize"}, {"params", params}});
  json result = await_response(id, "initialize");
  initialized_ = true;
  notify("initialized", json::object());
  return result.is_object() ? result.value("capabilities", json::object()) : json::object();
}

json LspClient::request(const std::string& method, json params) {
  if (!initialized_ || shut_down_) {
    throw Error(Errc::LspNotInitialized, method + " sent before the handshake");
  }
  const long id = next_id_++;
  transport_->send(
      {{"jsonrpc", "2.0"}, {"id", id}, {"method", method}, {"params", std::move(params)}});
  return await_response(id, method);
}

json LspClient::await_response(long id, const std::string& method) {
  for (;;) {
    json msg = transport_->receive(timeout_);
    if (msg.contains("method")) {
      if (msg.contains("id")) {
        transport_->send({{"jsonrpc", "2.0"}, {"id", msg["id"]}, {"result", nullptr}});
      }
      continue;
    }
    if (msg.value("id", json()) != json(id)) continue;
    if (msg.contains("error")) {
      const json& err = msg["error"];
      throw Error(Errc::LspErrorResponse,
                  method + ": " + err.value("message", std::string("error response")))
          .with_detail(err.value("code", 0L));
    }
    return msg.value("result", json());
  }
}

void LspClient::notify(const std::string& method, json params) {
  if (!initialized_) throw Error(Errc::LspNotInitialized, method + " sent before the handshake");
  transport_->send({{"jsonrpc", "2.0"}, {"method", method}, {"params", std::move(params)}});
}

void LspClient::open_document(const std::filesystem::path& file) {
  const std::string uri = path_to_uri(file);
  if (opened_.count(uri)) return;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::SourceUnavailable, "cannot read " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  const std::string ext = file.extension().string();
  const char* language = (ext == ".c" || ext == ".h") ? "c" : "cpp";
  notify("textDocument/didOpen",
         {{"textDocument",
           {{"uri", uri}, {"languageId", language}, {"version", 1}, {"text", text.str()}}}});
  opened_.insert(uri);
}

std::optional<Location> LspClient::definition(const std::filesystem::path& file, int line,
                                              int column) {
  open_document(file);
  json result = request("textDocument/definition",
                        {{"textDocument", {{"uri", path_to_uri(file)}}},
                         {"position", {{"line", line - 1}, {"character", column}}}});
  return first_location(result);
}

void LspClient::shutdown() {
  if (!initialized_ || shut_down_) {
    if (transport_ && !shut_down_) transport_->close();
    shut_down_ = true;
    return;
  }
  try {
    request("shutdown", nullptr);
    notify("exit", nullptr);
  } catch (const Error&) {
  }
  shut_down_ = true;
  transport_->close();
}

}  // namespace dbgpilot::lsp
