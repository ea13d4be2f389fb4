#pragma once

#include <chrono>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "therakit/common.hpp"

namespace therakit {

struct AgentConfig {
    std::string model_name = "qwen3-32b";
    std::string endpoint_url = "http://127.0.0.1:8000";
    std::string api_key;
    double temperature = 0.7;
    double top_p = 0.8;
    double repetition_penalty = 1.05;
    // Extension field name used to transmit the repetition penalty; empty
    // omits it for servers that reject unknown fields.
    std::string repetition_penalty_field = "repetition_penalty";
    int max_turns = 4;
    std::chrono::milliseconds request_timeout{30000};
    int max_retries = 2;
    std::chrono::milliseconds retry_backoff{500};
    bool fallback_enabled = true;

    void validate() const;
};

enum class Role { System, User, Assistant, Tool };

std::string role_name(Role role);

struct ToolCall {
    std::string id;
    std::string function_name;
    std::string arguments_json;
};

struct ChatMessage {
    Role role = Role::User;
    std::string content;
    std::vector<ToolCall> tool_calls;  // assistant messages only
    std::string tool_call_id;          // tool messages only

    static ChatMessage system(std::string text);
    static ChatMessage user(std::string text);
    static ChatMessage assistant(std::string text);
    static ChatMessage assistant_tool_call(std::string id, std::string function_name,
                                           std::string arguments_json);
    static ChatMessage tool(std::string tool_call_id, std::string content);
};

Json to_json(const ChatMessage& message);
Json transcript_to_json(const std::vector<ChatMessage>& transcript);

// One chat-completions exchange. Implementations must be safe for concurrent
// independent conversations. Transport problems surface as TransportError.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatMessage complete(const std::vector<ChatMessage>& messages,
                                 const std::vector<Json>& tools, const AgentConfig& config) = 0;
};

// OpenAI-compatible HTTP client. If the configured URL does not already name
// a chat/completions route, /v1/chat/completions is appended.
class HttpChatBackend : public ChatBackend {
public:
    ChatMessage complete(const std::vector<ChatMessage>& messages, const std::vector<Json>& tools,
                         const AgentConfig& config) override;
};

// Canned responses in order; used by tests and the CLI's offline mock mode.
class ScriptedBackend : public ChatBackend {
public:
    explicit ScriptedBackend(std::vector<ChatMessage> responses, bool repeat_last = false);

    ChatMessage complete(const std::vector<ChatMessage>& messages, const std::vector<Json>& tools,
                         const AgentConfig& config) override;

    std::size_t calls() const;
    // Snapshot of the message list seen by request #i.
    std::vector<ChatMessage> request(std::size_t i) const;
    std::vector<Json> request_tools(std::size_t i) const;

private:
    mutable std::mutex mutex_;
    std::vector<ChatMessage> responses_;
    bool repeat_last_;
    std::size_t next_ = 0;
    std::vector<std::vector<ChatMessage>> seen_messages_;
    std::vector<std::vector<Json>> seen_tools_;
};

// Arbitrary behavior from a lambda; handy for failure-injection tests.
class FunctionBackend : public ChatBackend {
public:
    using Handler = std::function<ChatMessage(const std::vector<ChatMessage>&,
                                              const std::vector<Json>&, const AgentConfig&)>;
    explicit FunctionBackend(Handler handler) : handler_(std::move(handler)) {}

    ChatMessage complete(const std::vector<ChatMessage>& messages, const std::vector<Json>& tools,
                         const AgentConfig& config) override {
        return handler_(messages, tools, config);
    }

private:
    Handler handler_;
};

// Runs backend.complete with config.max_retries retries and exponential
// backoff on TransportError; other errors propagate immediately.
ChatMessage complete_with_retries(ChatBackend& backend, const std::vector<ChatMessage>& messages,
                                  const std::vector<Json>& tools, const AgentConfig& config);

}  // namespace therakit
