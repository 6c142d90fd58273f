#include "dbgpilot/llm/chat.hpp"

#include <set>

#include "dbgpilot/errors.hpp"

namespace dbgpilot::llm {

using nlohmann::json;

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    case Role::Tool: return "tool";
  }
  return "user";
}

json ToolSpec::parameters_schema() const {
  json props = json::object();
  json required = json::array();
  for (const auto& p : params) {
    props[p.name] = {{"type", "string"}, {"description", p.description}};
    required.push_back(p.name);
  }
  return {{"type", "object"}, {"properties", props}, {"required", required}};
}

std::vector<ToolSpec> default_tools() {
  return {
      {"debug",
       "Run one debugger command on the stopped program and return its output.",
       {{"command", "The debugger command to run, for example `p x` or `bt`."}}},
      {"code",
       "Return the numbered source lines around a location.",
       {{"loc", "A location of the form filename:lineno."}}},
      {"definition",
       "Return the definition of the first occurrence of a symbol on a source line, "
       "with the source around it.",
       {{"loc", "A location of the form filename:lineno."},
        {"symbol", "The identifier to look up."}}},
  };
}

ToolCallRequest make_tool_call(std::string id, std::string name, std::string raw_arguments,
                               const std::vector<ToolSpec>& tools) {
  ToolCallRequest call{std::move(id), std::move(name), json::object(), std::move(raw_arguments)};
  const ToolSpec* spec = nullptr;
  for (const auto& t : tools) {
    if (t.name == call.name) spec = &t;
  }
  if (!spec) throw Error(Errc::MalformedToolArgs, "unknown tool '" + call.name + "'");

  json parsed = call.raw_arguments.empty() ? json::object()
                                           : json::parse(call.raw_arguments, nullptr, false);
  if (parsed.is_discarded()) {
    throw Error(Errc::MalformedToolArgs, "arguments for '" + call.name + "' are not valid JSON");
  }
  if (!parsed.is_object()) {
    throw Error(Errc::MalformedToolArgs, "arguments for '" + call.name + "' must be an object");
  }
  for (const auto& p : spec->params) {
    auto it = parsed.find(p.name);
    if (it == parsed.end()) {
      throw Error(Errc::MalformedToolArgs,
                  "'" + call.name + "' is missing the '" + p.name + "' argument");
    }
    if (!it->is_string()) {
      throw Error(Errc::MalformedToolArgs,
                  "'" + call.name + "' argument '" + p.name + "' must be a string");
    }
    call.arguments[p.name] = *it;
  }
  return call;
}

std::optional<std::string> validate_conversation(const std::vector<ChatMessage>& messages) {
  std::set<std::string> pending;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    const auto& m = messages[i];
    const std::string where = "message " + std::to_string(i);
    if (m.role == Role::Tool) {
      if (!m.tool_call_id) return where + ": tool message without a call id";
      if (!pending.erase(*m.tool_call_id)) {
        return where + ": tool message answers unknown call '" + *m.tool_call_id + "'";
      }
      continue;
    }
    if (!pending.empty()) return where + ": " + std::to_string(pending.size()) +
                                 " tool call(s) left unanswered";
    if (m.tool_call_id) return where + ": call id on a non-tool message";
    if (!m.tool_calls.empty() && m.role != Role::Assistant) {
      return where + ": tool calls on a non-assistant message";
    }
    for (const auto& c : m.tool_calls) {
      if (!pending.insert(c.id).second) return where + ": duplicate call id '" + c.id + "'";
    }
  }
  if (!pending.empty()) {
    return "end of conversation: " + std::to_string(pending.size()) +
           " tool call(s) left unanswered";
  }
  return std::nullopt;
}

json to_wire(const ChatMessage& m) {
  json j = {{"role", std::string(to_string(m.role))}};
  if (m.role == Role::Assistant && !m.tool_calls.empty()) {
    j["content"] = m.content.empty() ? json(nullptr) : json(m.content);
    json calls = json::array();
    for (const auto& c : m.tool_calls) {
      calls.push_back({{"id", c.id},
                       {"type", "function"},
                       {"function", {{"name", c.name}, {"arguments", c.raw_arguments}}}});
    }
    j["tool_calls"] = std::move(calls);
  } else {
    j["content"] = m.content;
  }
  if (m.tool_call_id) j["tool_call_id"] = *m.tool_call_id;
  return j;
}

json to_wire(const ToolSpec& tool) {
  return {{"type", "function"},
          {"function",
           {{"name", tool.name},
            {"description", tool.description},
            {"parameters", tool.parameters_schema()}}}};
}

}  // namespace dbgpilot::llm
