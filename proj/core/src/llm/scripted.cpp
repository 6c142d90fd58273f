#include "dbgpilot/llm/scripted.hpp"

#include <fstream>
#include <sstream>

#include "dbgpilot/errors.hpp"

namespace dbgpilot::llm {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(Errc::ScriptParseError, "invalid script: " + what);
}

}  // namespace

ScriptedBackend ScriptedBackend::from_json(const json& script) {
  if (!script.is_object()) bad("top level must be an object");
  if (script.value("version", 0) != 1) bad("unsupported or missing version");
  auto turns = script.find("turns");
  if (turns == script.end() || !turns->is_array()) bad("'turns' must be an array");

  std::vector<std::vector<Item>> parsed;
  for (std::size_t t = 0; t < turns->size(); ++t) {
    const json& turn = (*turns)[t];
    const std::string where = "turn " + std::to_string(t + 1);
    if (!turn.is_array()) bad(where + " must be an array of items");
    std::vector<Item> items;
    for (const json& item : turn) {
      if (!item.is_object() || item.size() != 1) bad(where + ": each item needs exactly one key");
      if (auto text = item.find("text"); text != item.end()) {
        if (!text->is_string()) bad(where + ": text must be a string");
        items.push_back({false, text->get<std::string>(), {}});
      } else if (auto call = item.find("tool_call"); call != item.end()) {
        if (!call->is_object() || !call->contains("name") || !(*call)["name"].is_string()) {
          bad(where + ": tool_call needs a string name");
        }
        Item it{true, (*call)["name"].get<std::string>(), {}};
        if (call->contains("arguments_raw")) {
          if (!(*call)["arguments_raw"].is_string()) bad(where + ": arguments_raw must be text");
          it.raw_arguments = (*call)["arguments_raw"].get<std::string>();
        } else {
          it.raw_arguments = call->value("arguments", json::object()).dump();
        }
        items.push_back(std::move(it));
      } else {
        bad(where + ": unknown item kind");
      }
    }
    parsed.push_back(std::move(items));
  }
  return ScriptedBackend(std::move(parsed));
}

ScriptedBackend ScriptedBackend::from_string(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) bad("not valid JSON");
  return from_json(j);
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ScriptParseError, "cannot read script " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

void ScriptedBackend::complete(const std::vector<ChatMessage>&, const std::vector<ToolSpec>& tools,
                               const ModelConfig&, const EventSink& sink) {
  if (next_ >= turns_.size()) {
    throw Error(Errc::ScriptExhausted,
                "the script has no turn " + std::to_string(next_ + 1) + " (it has " +
                    std::to_string(turns_.size()) + ")");
  }
  const std::size_t turn = ++next_;
  bool any_call = false;
  std::size_t index = 0;
  for (const auto& item : turns_[turn - 1]) {
    ++index;
    if (!item.is_call) {
      sink(TextDelta{item.text});
      continue;
    }
    any_call = true;
    std::string id = "call_" + std::to_string(turn) + "_" + std::to_string(index);
    try {
      sink(ToolCallEvent{make_tool_call(id, item.text, item.raw_arguments, tools)});
    } catch (const Error& e) {
      if (e.code() != Errc::MalformedToolArgs) throw;
      sink(MalformedToolCall{ToolCallRequest{id, item.text, json::object(), item.raw_arguments},
                             e.what()});
    }
  }
  sink(Done{any_call ? "tool_calls" : "stop"});
}

std::string ScriptedBackend::describe() const {
  return "scripted (" + std::to_string(turns_.size()) + " turns)";
}

}  // namespace dbgpilot::llm
