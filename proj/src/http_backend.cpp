#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "therakit/chat.hpp"

namespace therakit {

namespace {

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // completions route
};

ParsedUrl parse_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw InputError("endpoint_url must start with http:// or https://: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl parsed;
    std::string path;
    if (path_start == std::string::npos) {
        parsed.base = url;
    } else {
        parsed.base = url.substr(0, path_start);
        path = url.substr(path_start);
    }
    while (path.size() > 1 && path.back() == '/') path.pop_back();
    if (path.find("chat/completions") != std::string::npos)
        parsed.path = path;
    else if (path.empty() || path == "/")
        parsed.path = "/v1/chat/completions";
    else
        parsed.path = path + "/chat/completions";
    return parsed;
}

Json build_body(const std::vector<ChatMessage>& messages, const std::vector<Json>& tools,
                const AgentConfig& config) {
    Json body;
    body["model"] = config.model_name;
    Json msgs = Json::array();
    for (const auto& m : messages) msgs.push_back(to_json(m));
    body["messages"] = std::move(msgs);
    if (!tools.empty()) {
        Json wrapped = Json::array();
        for (const auto& t : tools) wrapped.push_back({{"type", "function"}, {"function", t}});
        body["tools"] = std::move(wrapped);
        body["tool_choice"] = "auto";
    }
    body["temperature"] = config.temperature;
    body["top_p"] = config.top_p;
    if (!config.repetition_penalty_field.empty())
        body[config.repetition_penalty_field] = config.repetition_penalty;
    return body;
}

ChatMessage parse_response(const std::string& body) {
    Json doc;
    try {
        doc = Json::parse(body);
    } catch (const Json::parse_error&) {
        throw TransportError("backend returned malformed JSON: " + body.substr(0, 200));
    }
    if (doc.contains("error"))
        throw TransportError("backend error: " + doc["error"].dump());
    if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty())
        throw TransportError("backend response has no choices");
    const Json& msg = doc["choices"][0].value("message", Json::object());

    ChatMessage out;
    out.role = Role::Assistant;
    if (msg.contains("content") && msg["content"].is_string())
        out.content = msg["content"].get<std::string>();
    if (msg.contains("tool_calls") && msg["tool_calls"].is_array()) {
        std::size_t index = 0;
        for (const auto& call : msg["tool_calls"]) {
            ToolCall tc;
            tc.id = call.value("id", "call_" + std::to_string(index));
            const Json fn = call.value("function", Json::object());
            tc.function_name = fn.value("name", "");
            if (fn.contains("arguments")) {
                if (fn["arguments"].is_string())
                    tc.arguments_json = fn["arguments"].get<std::string>();
                else
                    tc.arguments_json = fn["arguments"].dump();
            }
            out.tool_calls.push_back(std::move(tc));
            ++index;
        }
    }
    return out;
}

}  // namespace

ChatMessage HttpChatBackend::complete(const std::vector<ChatMessage>& messages,
                                      const std::vector<Json>& tools, const AgentConfig& config) {
    const auto url = parse_endpoint(config.endpoint_url);

    httplib::Client client(url.base);
    const auto ms = config.request_timeout.count();
    const time_t sec = ms / 1000;
    const time_t usec = (ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    httplib::Headers headers;
    if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);

    const std::string payload = build_body(messages, tools, config).dump();
    auto res = client.Post(url.path, headers, payload, "application/json");
    if (!res)
        throw TransportError("request to " + url.base + url.path + " failed: " +
                             httplib::to_string(res.error()));
    if (res->status != 200)
        throw TransportError("HTTP " + std::to_string(res->status) + " from " + url.base +
                             url.path + ": " + res->body.substr(0, 200));
    return parse_response(res->body);
}

}  // namespace therakit
