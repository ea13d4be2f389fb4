#pragma once

#include <string>
#include <vector>

#include "therakit/cardio.hpp"
#include "therakit/chat.hpp"
#include "therakit/ingest.hpp"
#include "therakit/recommend.hpp"
#include "therakit/signal.hpp"

namespace therakit {

enum class Provenance { LlmGenerated, DeterministicFallback };

struct TherapyReport {
    std::string physiological_analysis;            // Output 1
    std::string sound_therapy_recommendations;     // Output 2
    std::vector<Recommendation> music_recommendations;  // Output 3
    EegFeatureSet features;
    CardioSummary cardio;
    Provenance provenance = Provenance::DeterministicFallback;
    std::vector<ChatMessage> raw_transcript;
};

namespace agent {

// The three report section headers; both the prompt exemplar and the final
// answer parser treat them as the format contract.
inline const std::string kAnalysisHeader = "Physiological Signal Analysis";
inline const std::string kSoundTherapyHeader = "Personalized Sound Therapy Recommendations";
inline const std::string kMusicHeader = "Personalized Music Recommendations";

std::string provenance_name(Provenance provenance);

// Role definition, two-step task decomposition and an output-format exemplar
// carrying the three section headers, in that order.
std::string build_system_prompt(const AgentConfig& config);

// Schemas of every registered tool; exactly one entry (process_eeg).
std::vector<Json> register_tools();

struct ReportSections {
    std::string analysis;
    std::string sound_therapy;
    std::string music;
};

// Splits an assistant answer on the three section headers (whitespace- and
// markdown-decoration-insensitive). Throws FormatError, carrying the raw
// text, when a header is missing, out of order, or a required body is empty.
ReportSections parse_sections(const std::string& assistant_text);

// Two-phase dialogue: phase 1 sends the prompt with the EEG file path and
// tool schemas and serves tool calls; phase 2 parses the final answer into
// report sections. Music recommendations run as a separate exchange and are
// merged. Transport failure after retries produces the deterministic
// fallback report when enabled.
TherapyReport run_session(const SessionRecording& recording, const MusicDatabase& db,
                          const AgentConfig& config, ChatBackend& backend);

// Fully offline report from locally computed features; total and
// deterministic for any complete feature set.
TherapyReport deterministic_report(const EegFeatureSet& features, const CardioSummary& summary,
                                   const MusicDatabase& db, const RecommendOptions& options = {});

// Section text builders used by the fallback path (and by the CLI's scripted
// mock backend).
std::string analysis_section(const EegFeatureSet& features, const CardioSummary& summary);
std::string sound_therapy_section(const EegFeatureSet& features);

// Plain-text rendering mirroring the three-section report layout.
std::string render_report_text(const TherapyReport& report);
Json report_to_json(const TherapyReport& report);

}  // namespace agent
}  // namespace therakit
