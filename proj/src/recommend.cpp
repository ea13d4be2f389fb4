#include "therakit/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace therakit::recommend {

namespace {

std::string format_bpm(double value) {
    char buf[32];
    if (std::abs(value - std::round(value)) < 1e-9)
        std::snprintf(buf, sizeof(buf), "%.0f", value);
    else
        std::snprintf(buf, sizeof(buf), "%.1f", value);
    return buf;
}

std::string format_hz(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

Recommendation make_fallback(Scenario scenario, const MusicTrack& track, double avg_bpm,
                             const RecommendOptions& options) {
    std::string rationale;
    if (scenario == Scenario::Relaxation) {
        rationale = "Tempo " + format_bpm(track.bpm) +
                    " BPM matches or sits slightly below the session average heart rate of " +
                    format_bpm(avg_bpm) + " BPM.";
    } else {
        const double target =
            std::clamp(avg_bpm + options.exercise_offset_bpm, options.bpm_floor,
                       options.bpm_ceiling);
        rationale = "Tempo " + format_bpm(track.bpm) + " BPM approaches the elevated target of " +
                    format_bpm(target) + " BPM for physical activity.";
    }
    return {scenario, track, std::move(rationale), RecommendationMethod::DeterministicRetrieval};
}

// Pulls the first {...} block out of a model reply that may wrap the JSON in
// code fences or prose.
Json extract_json_object(const std::string& text) {
    const auto start = text.find('{');
    const auto end = text.rfind('}');
    if (start == std::string::npos || end == std::string::npos || end < start)
        throw InputError("no JSON object in model reply");
    return Json::parse(text.substr(start, end - start + 1));
}

}  // namespace

std::string scenario_name(Scenario scenario) {
    return scenario == Scenario::Relaxation ? "relaxation" : "exercise";
}

std::string scenario_display(Scenario scenario) {
    return scenario == Scenario::Relaxation ? "Relaxation" : "Physical Activity";
}

std::string method_name(RecommendationMethod method) {
    return method == RecommendationMethod::DeterministicRetrieval ? "deterministic_retrieval"
                                                                  : "llm_rag";
}

std::vector<MusicTrack> retrieve_tracks(double avg_bpm, Scenario scenario,
                                        const MusicDatabase& db,
                                        const RecommendOptions& options) {
    if (db.tracks.empty()) throw InputError("retrieve_tracks: empty music database");
    if (!(avg_bpm > 0.0)) throw InputError("retrieve_tracks: avg_bpm must be positive");

    std::vector<MusicTrack> ranked;
    if (scenario == Scenario::Relaxation) {
        for (const auto& t : db.tracks)
            if (t.bpm <= avg_bpm) ranked.push_back(t);
        if (ranked.empty()) {
            // No track at or below the heart rate: the slowest track is the
            // closest match available.
            auto slowest = std::min_element(db.tracks.begin(), db.tracks.end(),
                                            [](const MusicTrack& a, const MusicTrack& b) {
                                                if (a.bpm != b.bpm) return a.bpm < b.bpm;
                                                return a.track_id < b.track_id;
                                            });
            return {*slowest};
        }
        std::sort(ranked.begin(), ranked.end(), [&](const MusicTrack& a, const MusicTrack& b) {
            const double da = avg_bpm - a.bpm;
            const double db_ = avg_bpm - b.bpm;
            if (da != db_) return da < db_;
            return a.track_id < b.track_id;
        });
    } else {
        const double target = std::clamp(avg_bpm + options.exercise_offset_bpm, options.bpm_floor,
                                         options.bpm_ceiling);
        ranked = db.tracks;
        std::sort(ranked.begin(), ranked.end(), [&](const MusicTrack& a, const MusicTrack& b) {
            const double da = std::abs(a.bpm - target);
            const double db_ = std::abs(b.bpm - target);
            if (da != db_) return da < db_;
            return a.track_id < b.track_id;
        });
    }
    return ranked;
}

std::pair<Recommendation, Recommendation> fallback_recommendations(
    double avg_bpm, const MusicDatabase& db, const RecommendOptions& options) {
    const auto relax = retrieve_tracks(avg_bpm, Scenario::Relaxation, db, options);
    const auto exercise = retrieve_tracks(avg_bpm, Scenario::Exercise, db, options);
    return {make_fallback(Scenario::Relaxation, relax.front(), avg_bpm, options),
            make_fallback(Scenario::Exercise, exercise.front(), avg_bpm, options)};
}

std::pair<Recommendation, Recommendation> llm_recommend(const CardioSummary& summary,
                                                        const MusicDatabase& db,
                                                        const AgentConfig& config,
                                                        ChatBackend& backend,
                                                        const RecommendOptions& options) {
    if (db.tracks.empty()) throw InputError("llm_recommend: empty music database");

    const std::string system_text =
        "You are a music therapy recommendation assistant. Pick exactly one track per scenario "
        "from the database provided by the user. Reply with JSON only, shaped as "
        "{\"relaxation\": {\"track_id\": \"...\", \"reason\": \"...\"}, "
        "\"exercise\": {\"track_id\": \"...\", \"reason\": \"...\"}}. "
        "For relaxation choose a tempo matching or slightly below the average heart rate; "
        "for exercise choose an elevated tempo suited to physical activity.";
    const std::string user_text = "Average heart rate: " + format_bpm(summary.avg_hr_bpm) +
                                  " BPM\nMusic database:\n" + ingest::to_json(db).dump();

    try {
        const auto reply = complete_with_retries(
            backend, {ChatMessage::system(system_text), ChatMessage::user(user_text)}, {}, config);
        const Json parsed = extract_json_object(reply.content);
        auto pick = [&](Scenario scenario) -> Recommendation {
            const Json& entry = parsed.at(scenario_name(scenario));
            const std::string id = entry.at("track_id").get<std::string>();
            const MusicTrack* track = db.find(id);
            if (!track) throw InputError("track_id \"" + id + "\" not in database");
            std::string reason = entry.value("reason", "");
            if (reason.empty())
                reason = "Selected by the language model for the " + scenario_name(scenario) +
                         " scenario.";
            return {scenario, *track, std::move(reason), RecommendationMethod::LlmRag};
        };
        return {pick(Scenario::Relaxation), pick(Scenario::Exercise)};
    } catch (const std::exception&) {
        // Invalid or unreachable model output never escapes: deterministic
        // retrieval replaces it.
        return fallback_recommendations(summary.avg_hr_bpm, db, options);
    }
}

ReportFragment integrate(const EegFeatureSet& features, const CardioSummary& summary,
                         const std::vector<Recommendation>& recommendations) {
    std::string text =
        "Average heart rate across the session: " + format_bpm(summary.avg_hr_bpm) + " BPM.\n";
    text += "Band trends: ";
    for (std::size_t i = 0; i < features.per_band.size(); ++i) {
        const auto& bf = features.per_band[i];
        text += band_name(bf.band) + (bf.trend == Trend::Increasing ? " increasing (" :
                                                                      " decreasing (") +
                format_hz(bf.dominant_freq_hz) + " Hz)";
        text += i + 1 < features.per_band.size() ? "; " : ".\n";
    }
    for (const auto& rec : recommendations) {
        text += "\n" + scenario_display(rec.scenario) + ": " + rec.track.title + " (" +
                format_bpm(rec.track.bpm) + " BPM)\n";
        if (!rec.track.link.empty()) text += "  Link: " + rec.track.link + "\n";
        text += "  Why: " + rec.rationale + "\n";
    }

    Json j;
    j["avg_hr_bpm"] = summary.avg_hr_bpm;
    Json recs = Json::array();
    for (const auto& rec : recommendations) recs.push_back(to_json(rec));
    j["recommendations"] = std::move(recs);
    return {std::move(text), std::move(j)};
}

Json to_json(const Recommendation& rec) {
    Json j;
    j["scenario"] = scenario_name(rec.scenario);
    j["track_id"] = rec.track.track_id;
    j["title"] = rec.track.title;
    j["bpm"] = rec.track.bpm;
    if (!rec.track.link.empty()) j["link"] = rec.track.link;
    j["rationale"] = rec.rationale;
    j["method"] = method_name(rec.method);
    return j;
}

}  // namespace therakit::recommend
