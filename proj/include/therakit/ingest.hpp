#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "therakit/cardio.hpp"
#include "therakit/common.hpp"
#include "therakit/signal.hpp"

namespace therakit {

struct MusicTrack {
    std::string track_id;
    std::string title;
    double bpm = 0.0;
    std::string link;  // empty when absent
};

struct MusicDatabase {
    std::vector<MusicTrack> tracks;
    const MusicTrack* find(std::string_view track_id) const;
};

// One therapy session as captured on disk: the EEG log plus the oximeter log.
struct SessionRecording {
    EegSignal eeg;
    CardioSeries cardio;
    std::string session_id;
    std::int64_t started_at_ms = 0;
    std::map<std::string, std::string> metadata;  // carries eeg_path / oximeter_path
};

namespace ingest {

// EEG log: one `key=value[,key=value...]` header line (sampling_rate_hz
// mandatory, channel optional), then `timestamp_ms,voltage_uv` rows.
// UTF-8, LF line endings, `.` decimal separator.
EegSignal parse_eeg_log(const std::string& path);

// Oximeter log: headerless `timestamp_ms,hr_bpm[,spo2_pct]` rows at a fixed
// rate inferred from the first timestamp step (default 1 Hz).
CardioSeries parse_oximeter_log(const std::string& path);

// JSON array of {track_id, title, bpm[, link]}; validates non-empty content,
// unique ids and the 40-130 BPM corpus range.
MusicDatabase load_music_db(const std::string& path);

// Parses both logs and checks that the two recordings cover the same span
// (durations within 10% of each other).
SessionRecording load_session(const std::string& eeg_path, const std::string& oximeter_path);

// Writers emit the exact on-disk formats above; write -> parse -> write is
// byte-identical for well-formed files.
void write_eeg_log(const std::string& path, const EegSignal& signal);
void write_oximeter_log(const std::string& path, const CardioSeries& series);

Json to_json(const MusicTrack& track);
Json to_json(const MusicDatabase& db);

}  // namespace ingest
}  // namespace therakit
