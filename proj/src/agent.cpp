#include "therakit/agent.hpp"

#include <cstdio>

namespace therakit::agent {

namespace {

std::string format_hz(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

std::string format_bpm(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", value);
    return buf;
}

const BandFeatures& band_of(const EegFeatureSet& features, Band band) {
    return features.per_band[static_cast<std::size_t>(band)];
}

// Markdown decoration and whitespace-insensitive header comparison.
std::string normalize_line(const std::string& line) {
    std::size_t begin = 0;
    while (begin < line.size() &&
           (line[begin] == ' ' || line[begin] == '\t' || line[begin] == '#' || line[begin] == '*'))
        ++begin;
    std::size_t end = line.size();
    while (end > begin && (line[end - 1] == ' ' || line[end - 1] == '\t' || line[end - 1] == '*'))
        --end;
    if (end > begin && line[end - 1] == ':') --end;
    std::string out;
    bool in_space = false;
    for (std::size_t i = begin; i < end; ++i) {
        const char c = line[i];
        if (c == ' ' || c == '\t') {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(c);
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\n\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\n\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t pos = text.find('\n', start);
        if (pos == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return lines;
}

std::string execute_tool(const ToolCall& call, const std::string& session_eeg_path,
                         const std::string& session_features_json) {
    if (call.function_name != "process_eeg")
        throw ProtocolError("tool call names unregistered function \"" + call.function_name +
                            "\"");
    Json args;
    try {
        args = Json::parse(call.arguments_json);
    } catch (const Json::parse_error&) {
        throw ProtocolError("tool call arguments are not valid JSON: " + call.arguments_json);
    }
    if (!args.is_object() || !args.contains("path") || !args.at("path").is_string())
        throw ProtocolError("process_eeg requires a string \"path\" argument");
    const std::string path = args.at("path").get<std::string>();
    if (path == session_eeg_path) return session_features_json;
    try {
        return signal::to_json_string(signal::process_eeg(path));
    } catch (const InputError& e) {
        Json err;
        err["error"] = e.what();
        return err.dump();
    }
}

}  // namespace

std::string provenance_name(Provenance provenance) {
    return provenance == Provenance::LlmGenerated ? "llm_generated" : "deterministic_fallback";
}

std::string build_system_prompt(const AgentConfig&) {
    std::string prompt;
    prompt +=
        "You are a Brain Signal Analysis and Music Therapy Expert with deep knowledge of "
        "neuroscience, EEG interpretation and therapeutic sound design.\n\n";
    prompt +=
        "Work through the analysis in two steps:\n"
        "Step 1: Tool invocation. Call the process_eeg tool with the EEG file path provided by "
        "the user and interpret the returned per-band trends and dominant frequencies.\n"
        "Step 2: Integration of results with music therapy theory. Turn the findings into "
        "practical, personalized therapeutic guidance.\n\n";
    prompt += "Format the final answer with exactly these three sections:\n\n";
    prompt += kAnalysisHeader +
              "\n<interpret each band's trend and dominant frequency in plain language>\n\n";
    prompt += kSoundTherapyHeader +
              "\n<numbered, actionable sound therapy steps grounded in the measured "
              "frequencies>\n\n";
    prompt += kMusicHeader + "\n<scenario-based listening suggestions>\n";
    return prompt;
}

std::vector<Json> register_tools() {
    Json schema;
    schema["name"] = "process_eeg";
    schema["description"] = "Process EEG signal to obtain trend and dominant frequency of each wave";
    Json path_prop;
    path_prop["type"] = "string";
    path_prop["description"] = "File path of the EEG signal";
    Json properties;
    properties["path"] = std::move(path_prop);
    Json parameters;
    parameters["type"] = "object";
    parameters["properties"] = std::move(properties);
    parameters["required"] = Json::array({"path"});
    schema["parameters"] = std::move(parameters);
    return {schema};
}

ReportSections parse_sections(const std::string& assistant_text) {
    const auto lines = split_lines(assistant_text);
    const std::array<const std::string*, 3> headers = {&kAnalysisHeader, &kSoundTherapyHeader,
                                                       &kMusicHeader};
    std::array<std::size_t, 3> positions{};
    std::size_t found = 0;
    for (std::size_t i = 0; i < lines.size() && found < 3; ++i) {
        if (normalize_line(lines[i]) == *headers[found]) positions[found++] = i;
    }
    if (found < 3)
        throw FormatError("assistant answer is missing section header \"" + *headers[found] +
                          "\"",
                          assistant_text);

    auto body = [&](std::size_t from, std::size_t to) {
        std::string out;
        for (std::size_t i = from; i < to; ++i) {
            out += lines[i];
            out += '\n';
        }
        return trim(out);
    };
    ReportSections sections;
    sections.analysis = body(positions[0] + 1, positions[1]);
    sections.sound_therapy = body(positions[1] + 1, positions[2]);
    sections.music = body(positions[2] + 1, lines.size());
    if (sections.analysis.empty())
        throw FormatError("empty \"" + kAnalysisHeader + "\" section", assistant_text);
    if (sections.sound_therapy.empty())
        throw FormatError("empty \"" + kSoundTherapyHeader + "\" section", assistant_text);
    return sections;
}

std::string analysis_section(const EegFeatureSet& features, const CardioSummary& summary) {
    struct Wording {
        const char* increasing;
        const char* decreasing;
    };
    static constexpr std::array<Wording, 4> kAssociations = {{
        {", consistent with a stronger pull toward deep rest",
         ", suggesting a reduced demand for deep rest"},
        {", often seen with relaxed, inward-focused attention",
         ", pointing to less inward-focused drowsiness"},
        {", reflecting a stronger capacity for wakeful relaxation",
         ", indicating reduced wakeful relaxation"},
        {", which can accompany heightened alertness or arousal",
         ", consistent with settling cortical activation"},
    }};

    std::string text;
    std::string flat_bands;
    for (const auto& bf : features.per_band) {
        const auto& wording = kAssociations[static_cast<std::size_t>(bf.band)];
        const bool up = bf.trend == Trend::Increasing;
        text += band_name(bf.band) + "-wave activity showed " +
                (up ? "an increase" : "a decrease") + " over the session, with a dominant "
                "frequency of " + format_hz(bf.dominant_freq_hz) + " Hz" +
                (up ? wording.increasing : wording.decreasing) + ". ";
        if (bf.flat_spectrum) {
            if (!flat_bands.empty()) flat_bands += ", ";
            flat_bands += band_name(bf.band);
        }
    }
    text += "Average heart rate was " + format_bpm(summary.avg_hr_bpm) + " BPM";
    if (summary.avg_spo2_pct)
        text += " with an average SpO2 of " + format_bpm(*summary.avg_spo2_pct) + "%";
    text += ".";
    if (!flat_bands.empty())
        text += "\nNote: the " + flat_bands +
                " band carried no measurable spectral power; the reported frequency falls back "
                "to the band floor.";
    return text;
}

std::string sound_therapy_section(const EegFeatureSet& features) {
    const double theta = band_of(features, Band::Theta).dominant_freq_hz;
    const double alpha = band_of(features, Band::Alpha).dominant_freq_hz;
    const auto& beta = band_of(features, Band::Beta);

    std::string text;
    text += "1. Frequency anchoring: pulse low-frequency textures at " + format_hz(theta) +
            " Hz and layer a steady ambient bed near " + format_hz(alpha) +
            " Hz to reinforce a relaxed baseline.\n";
    if (beta.trend == Trend::Increasing)
        text += "2. Dynamic regulation: introduce brief harmonic passages around " +
                format_hz(beta.dominant_freq_hz) +
                " Hz and taper their level gradually to ease elevated cortical activation.\n";
    else
        text += "2. Dynamic regulation: keep mid-range content sparse so the settled beta "
                "activity near " + format_hz(beta.dominant_freq_hz) + " Hz is not re-excited.\n";
    text += "3. Binaural pairing: deliver a " + format_hz(beta.dominant_freq_hz) +
            " Hz signal to the left ear (focus) and an " + format_hz(alpha) +
            " Hz signal to the right ear (relaxation) to balance engagement and rest.";
    return text;
}

TherapyReport run_session(const SessionRecording& recording, const MusicDatabase& db,
                          const AgentConfig& config, ChatBackend& backend) {
    config.validate();
    const auto path_it = recording.metadata.find("eeg_path");
    if (path_it == recording.metadata.end())
        throw InputError("run_session: recording has no eeg_path in metadata");
    const std::string& eeg_path = path_it->second;

    // Features and cardio are always computed locally; the report never
    // relies on the model echoing them back.
    const EegFeatureSet features = signal::process_eeg(eeg_path);
    const std::string features_json = signal::to_json_string(features);
    const CardioSummary summary = cardio::summarize(recording.cardio);
    const auto tools = register_tools();

    std::vector<ChatMessage> transcript;
    transcript.push_back(ChatMessage::system(build_system_prompt(config)));
    transcript.push_back(
        ChatMessage::user("EEG recording file path: " + eeg_path +
                          "\nPlease analyze this session and produce the report."));

    std::string final_text;
    bool have_final = false;
    try {
        for (int turn = 0; turn < config.max_turns && !have_final; ++turn) {
            ChatMessage reply = complete_with_retries(backend, transcript, tools, config);
            transcript.push_back(reply);
            if (reply.tool_calls.empty()) {
                final_text = reply.content;
                have_final = true;
                break;
            }
            for (const auto& call : reply.tool_calls)
                transcript.push_back(
                    ChatMessage::tool(call.id, execute_tool(call, eeg_path, features_json)));
        }
        if (!have_final)
            throw ProtocolError("turn limit reached: no final answer within " +
                                std::to_string(config.max_turns) + " requests");
    } catch (const TransportError&) {
        if (!config.fallback_enabled) throw;
        TherapyReport report = deterministic_report(features, summary, db);
        report.raw_transcript = std::move(transcript);
        return report;
    }

    const ReportSections sections = parse_sections(final_text);
    const auto recs = recommend::llm_recommend(summary, db, config, backend);

    TherapyReport report;
    report.physiological_analysis = sections.analysis;
    report.sound_therapy_recommendations = sections.sound_therapy;
    report.music_recommendations = {recs.first, recs.second};
    report.features = features;
    report.cardio = summary;
    report.provenance = Provenance::LlmGenerated;
    report.raw_transcript = std::move(transcript);
    return report;
}

TherapyReport deterministic_report(const EegFeatureSet& features, const CardioSummary& summary,
                                   const MusicDatabase& db, const RecommendOptions& options) {
    const auto recs = recommend::fallback_recommendations(summary.avg_hr_bpm, db, options);
    TherapyReport report;
    report.physiological_analysis = analysis_section(features, summary);
    report.sound_therapy_recommendations = sound_therapy_section(features);
    report.music_recommendations = {recs.first, recs.second};
    report.features = features;
    report.cardio = summary;
    report.provenance = Provenance::DeterministicFallback;
    return report;
}

std::string render_report_text(const TherapyReport& report) {
    const auto fragment =
        recommend::integrate(report.features, report.cardio, report.music_recommendations);
    auto section = [](const std::string& header, const std::string& body) {
        return header + "\n" + std::string(header.size(), '-') + "\n\n" + body + "\n\n";
    };
    return section(kAnalysisHeader, report.physiological_analysis) +
           section(kSoundTherapyHeader, report.sound_therapy_recommendations) +
           section(kMusicHeader, fragment.text);
}

Json report_to_json(const TherapyReport& report) {
    Json j;
    j["provenance"] = provenance_name(report.provenance);
    j["physiological_analysis"] = report.physiological_analysis;
    j["sound_therapy_recommendations"] = report.sound_therapy_recommendations;
    Json recs = Json::array();
    for (const auto& rec : report.music_recommendations) recs.push_back(recommend::to_json(rec));
    j["music_recommendations"] = std::move(recs);
    j["features"] = signal::to_json(report.features);
    j["cardio"] = cardio::to_json(report.cardio);
    j["source_path"] = report.features.source_path;
    j["sample_count"] = report.features.sample_count;
    return j;
}

}  // namespace therakit::agent
