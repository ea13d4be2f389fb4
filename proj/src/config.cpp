#include "therakit/config.hpp"

#include <cstdlib>
#include <fstream>

namespace therakit::cli {

namespace {

std::optional<std::string> env_value(const std::map<std::string, std::string>& env,
                                     const char* key) {
    const auto it = env.find(key);
    if (it == env.end()) return std::nullopt;
    return it->second;
}

const Json* section(const Json& file, const char* name) {
    if (file.is_object() && file.contains(name) && file.at(name).is_object())
        return &file.at(name);
    return nullptr;
}

template <typename T>
void from_file(const Json* sec, const char* key, T& target) {
    if (sec && sec->contains(key)) target = sec->at(key).get<T>();
}

std::string resolve_string(const std::optional<std::string>& flag,
                           const std::optional<std::string>& env, const Json* sec,
                           const char* file_key, std::string fallback) {
    std::string value = std::move(fallback);
    from_file(sec, file_key, value);
    if (env) value = *env;
    if (flag) value = *flag;
    return value;
}

}  // namespace

Json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open config file");
    try {
        Json doc = Json::parse(in);
        if (!doc.is_object()) throw InputError(path + ": config file must hold a JSON object");
        return doc;
    } catch (const Json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

RunConfig resolve_config(const CliFlags& flags, const std::map<std::string, std::string>& env,
                         const Json& config_file) {
    RunConfig config;
    const Json* agent = section(config_file, "agent");
    const Json* recommend = section(config_file, "recommend");
    const Json* paths = section(config_file, "paths");

    config.agent.endpoint_url =
        resolve_string(flags.endpoint_url, env_value(env, kEnvEndpoint), agent, "endpoint_url",
                       config.agent.endpoint_url);
    config.agent.api_key = resolve_string(flags.api_key, env_value(env, kEnvApiKey), agent,
                                          "api_key", config.agent.api_key);
    config.agent.model_name = resolve_string(flags.model_name, env_value(env, kEnvModel), agent,
                                             "model_name", config.agent.model_name);
    from_file(agent, "temperature", config.agent.temperature);
    from_file(agent, "top_p", config.agent.top_p);
    from_file(agent, "repetition_penalty", config.agent.repetition_penalty);
    from_file(agent, "repetition_penalty_field", config.agent.repetition_penalty_field);
    from_file(agent, "max_turns", config.agent.max_turns);
    from_file(agent, "max_retries", config.agent.max_retries);
    from_file(agent, "fallback_enabled", config.agent.fallback_enabled);
    if (agent && agent->contains("request_timeout_ms"))
        config.agent.request_timeout =
            std::chrono::milliseconds(agent->at("request_timeout_ms").get<long>());
    if (agent && agent->contains("retry_backoff_ms"))
        config.agent.retry_backoff =
            std::chrono::milliseconds(agent->at("retry_backoff_ms").get<long>());
    if (flags.no_fallback && *flags.no_fallback) config.agent.fallback_enabled = false;

    from_file(recommend, "exercise_offset_bpm", config.recommend.exercise_offset_bpm);
    if (flags.exercise_offset_bpm)
        config.recommend.exercise_offset_bpm = *flags.exercise_offset_bpm;

    config.music_db_path = resolve_string(flags.music_db_path, env_value(env, kEnvMusicDb), paths,
                                          "music_db", config.music_db_path);
    config.lexicon_path = resolve_string(flags.lexicon_path, env_value(env, kEnvLexicon), paths,
                                         "lexicon", config.lexicon_path);
    if (paths) from_file(paths, "output_dir", config.output_dir);
    if (flags.output_dir) config.output_dir = *flags.output_dir;

    config.agent.validate();
    return config;
}

std::map<std::string, std::string> environment_overrides() {
    std::map<std::string, std::string> env;
    for (const char* key : {kEnvEndpoint, kEnvApiKey, kEnvModel, kEnvMusicDb, kEnvLexicon}) {
        if (const char* value = std::getenv(key)) env[key] = value;
    }
    return env;
}

}  // namespace therakit::cli
