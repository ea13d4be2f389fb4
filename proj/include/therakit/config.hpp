#pragma once

#include <map>
#include <optional>
#include <string>

#include "therakit/chat.hpp"
#include "therakit/recommend.hpp"

namespace therakit {

// Values supplied on the command line; unset fields defer to the environment,
// the config file, then built-in defaults.
struct CliFlags {
    std::optional<std::string> endpoint_url;
    std::optional<std::string> api_key;
    std::optional<std::string> model_name;
    std::optional<std::string> music_db_path;
    std::optional<std::string> lexicon_path;
    std::optional<std::string> output_dir;
    std::optional<double> exercise_offset_bpm;
    std::optional<bool> no_fallback;
};

struct RunConfig {
    AgentConfig agent;
    RecommendOptions recommend;
    std::string music_db_path = "data/music_db.json";
    std::string lexicon_path;  // empty selects the built-in lexicon
    std::string output_dir = ".";
};

namespace cli {

inline constexpr const char* kEnvEndpoint = "THERAKIT_ENDPOINT";
inline constexpr const char* kEnvApiKey = "THERAKIT_API_KEY";
inline constexpr const char* kEnvModel = "THERAKIT_MODEL";
inline constexpr const char* kEnvMusicDb = "THERAKIT_MUSIC_DB";
inline constexpr const char* kEnvLexicon = "THERAKIT_LEXICON";

// Config file: one JSON document with per-module sections, e.g.
// {"agent": {...}, "recommend": {...}, "paths": {...}}.
Json load_config_file(const std::string& path);

// Precedence per setting: command-line flag > environment variable >
// config file > built-in default.
RunConfig resolve_config(const CliFlags& flags, const std::map<std::string, std::string>& env,
                         const Json& config_file);

// Reads the process environment for the variables above.
std::map<std::string, std::string> environment_overrides();

}  // namespace cli
}  // namespace therakit
