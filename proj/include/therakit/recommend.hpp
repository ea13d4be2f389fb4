#pragma once

#include <string>
#include <utility>
#include <vector>

#include "therakit/cardio.hpp"
#include "therakit/chat.hpp"
#include "therakit/ingest.hpp"
#include "therakit/signal.hpp"

namespace therakit {

enum class Scenario { Relaxation, Exercise };

enum class RecommendationMethod { DeterministicRetrieval, LlmRag };

struct Recommendation {
    Scenario scenario;
    MusicTrack track;
    std::string rationale;
    RecommendationMethod method;
};

struct RecommendOptions {
    // Exercise targets avg HR plus this offset, clamped to the corpus range.
    double exercise_offset_bpm = 30.0;
    double bpm_floor = 40.0;
    double bpm_ceiling = 130.0;
};

namespace recommend {

std::string scenario_name(Scenario scenario);       // JSON value: relaxation / exercise
std::string scenario_display(Scenario scenario);    // report label: Relaxation / Physical Activity
std::string method_name(RecommendationMethod method);

// Deterministic BPM retrieval. Relaxation ranks tracks at or below avg_bpm by
// closeness from below (falling back to the single slowest track when none
// qualify); Exercise ranks by distance to the clamped elevated target. Ties
// break on track_id.
std::vector<MusicTrack> retrieve_tracks(double avg_bpm, Scenario scenario,
                                        const MusicDatabase& db,
                                        const RecommendOptions& options = {});

// Top retrieval picks for both scenarios with templated rationales.
std::pair<Recommendation, Recommendation> fallback_recommendations(
    double avg_bpm, const MusicDatabase& db, const RecommendOptions& options = {});

// Prompt-guided selection over the full database embedded in context. Any
// transport or validation failure falls back to deterministic retrieval, so
// this never throws for a valid database.
std::pair<Recommendation, Recommendation> llm_recommend(const CardioSummary& summary,
                                                        const MusicDatabase& db,
                                                        const AgentConfig& config,
                                                        ChatBackend& backend,
                                                        const RecommendOptions& options = {});

struct ReportFragment {
    std::string text;
    Json json;
};

// Final music block binding band context, the average heart rate and the
// chosen tracks with links.
ReportFragment integrate(const EegFeatureSet& features, const CardioSummary& summary,
                         const std::vector<Recommendation>& recommendations);

Json to_json(const Recommendation& rec);

}  // namespace recommend
}  // namespace therakit
