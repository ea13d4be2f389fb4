#include "therakit/chat.hpp"

#include <thread>

namespace therakit {

void AgentConfig::validate() const {
    if (temperature < 0.0) throw InputError("config: temperature must be >= 0");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw InputError("config: top_p must be in (0, 1]");
    if (max_turns < 2) throw InputError("config: max_turns must be >= 2 (two-phase minimum)");
    if (max_retries < 0) throw InputError("config: max_retries must be >= 0");
}

std::string role_name(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
        case Role::Tool: return "tool";
    }
    return "?";
}

ChatMessage ChatMessage::system(std::string text) { return {Role::System, std::move(text), {}, {}}; }
ChatMessage ChatMessage::user(std::string text) { return {Role::User, std::move(text), {}, {}}; }
ChatMessage ChatMessage::assistant(std::string text) {
    return {Role::Assistant, std::move(text), {}, {}};
}
ChatMessage ChatMessage::assistant_tool_call(std::string id, std::string function_name,
                                             std::string arguments_json) {
    ChatMessage m;
    m.role = Role::Assistant;
    m.tool_calls.push_back({std::move(id), std::move(function_name), std::move(arguments_json)});
    return m;
}
ChatMessage ChatMessage::tool(std::string tool_call_id, std::string content) {
    ChatMessage m;
    m.role = Role::Tool;
    m.content = std::move(content);
    m.tool_call_id = std::move(tool_call_id);
    return m;
}

Json to_json(const ChatMessage& message) {
    Json j;
    j["role"] = role_name(message.role);
    j["content"] = message.content;
    if (!message.tool_calls.empty()) {
        Json calls = Json::array();
        for (const auto& tc : message.tool_calls) {
            Json call;
            call["id"] = tc.id;
            call["type"] = "function";
            call["function"] = {{"name", tc.function_name}, {"arguments", tc.arguments_json}};
            calls.push_back(std::move(call));
        }
        j["tool_calls"] = std::move(calls);
    }
    if (!message.tool_call_id.empty()) j["tool_call_id"] = message.tool_call_id;
    return j;
}

Json transcript_to_json(const std::vector<ChatMessage>& transcript) {
    Json arr = Json::array();
    for (const auto& m : transcript) arr.push_back(to_json(m));
    return arr;
}

ScriptedBackend::ScriptedBackend(std::vector<ChatMessage> responses, bool repeat_last)
    : responses_(std::move(responses)), repeat_last_(repeat_last) {}

ChatMessage ScriptedBackend::complete(const std::vector<ChatMessage>& messages,
                                      const std::vector<Json>& tools, const AgentConfig&) {
    std::lock_guard lock(mutex_);
    seen_messages_.push_back(messages);
    seen_tools_.push_back(tools);
    if (next_ >= responses_.size()) {
        if (repeat_last_ && !responses_.empty()) return responses_.back();
        throw TransportError("scripted backend exhausted after " +
                             std::to_string(responses_.size()) + " responses");
    }
    return responses_[next_++];
}

std::size_t ScriptedBackend::calls() const {
    std::lock_guard lock(mutex_);
    return seen_messages_.size();
}

std::vector<ChatMessage> ScriptedBackend::request(std::size_t i) const {
    std::lock_guard lock(mutex_);
    return seen_messages_.at(i);
}

std::vector<Json> ScriptedBackend::request_tools(std::size_t i) const {
    std::lock_guard lock(mutex_);
    return seen_tools_.at(i);
}

ChatMessage complete_with_retries(ChatBackend& backend, const std::vector<ChatMessage>& messages,
                                  const std::vector<Json>& tools, const AgentConfig& config) {
    auto backoff = config.retry_backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            return backend.complete(messages, tools, config);
        } catch (const TransportError&) {
            if (attempt >= config.max_retries) throw;
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
}

}  // namespace therakit
