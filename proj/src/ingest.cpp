#include "therakit/ingest.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace therakit {

const MusicTrack* MusicDatabase::find(std::string_view track_id) const {
    for (const auto& t : tracks)
        if (t.track_id == track_id) return &t;
    return nullptr;
}

namespace ingest {

namespace {

[[noreturn]] void fail_at(const std::string& path, std::size_t line, const std::string& what) {
    throw InputError(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

double parse_double(std::string_view token, const std::string& path, std::size_t line) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        fail_at(path, line, "expected a number, got \"" + std::string(token) + "\"");
    if (!std::isfinite(value))
        fail_at(path, line, "non-finite value \"" + std::string(token) + "\"");
    return value;
}

std::int64_t parse_timestamp(std::string_view token, const std::string& path, std::size_t line) {
    std::int64_t value = 0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        fail_at(path, line, "expected an integer timestamp, got \"" + std::string(token) + "\"");
    return value;
}

// Shortest representation that parses back to the identical double.
std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

struct EegLogContents {
    EegSignal signal;
    std::int64_t first_timestamp_ms = 0;
    std::map<std::string, std::string> extra_header;
};

EegLogContents parse_eeg_contents(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw InputError(path + ": missing header line");

    EegLogContents out;
    bool have_rate = false;
    for (const auto field : split(lines[0], ',')) {
        const std::size_t eq = field.find('=');
        if (eq == std::string_view::npos)
            fail_at(path, 1, "malformed header field \"" + std::string(field) + "\"");
        const std::string key(field.substr(0, eq));
        const std::string value(field.substr(eq + 1));
        if (key == "sampling_rate_hz") {
            out.signal.sampling_rate_hz = parse_double(value, path, 1);
            if (out.signal.sampling_rate_hz <= 0.0) fail_at(path, 1, "sampling rate must be positive");
            have_rate = true;
        } else if (key == "channel") {
            out.signal.channel_label = value;
        } else {
            out.extra_header[key] = value;
        }
    }
    if (!have_rate) fail_at(path, 1, "header is missing sampling_rate_hz");

    std::int64_t prev_ts = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto fields = split(lines[i], ',');
        if (fields.size() != 2)
            fail_at(path, line_no, "expected timestamp_ms,voltage_uv");
        const std::int64_t ts = parse_timestamp(fields[0], path, line_no);
        const double voltage = parse_double(fields[1], path, line_no);
        if (out.signal.samples.empty())
            out.first_timestamp_ms = ts;
        else if (ts < prev_ts)
            fail_at(path, line_no, "timestamps must be non-decreasing");
        prev_ts = ts;
        out.signal.samples.push_back(voltage);
    }
    if (out.signal.samples.empty()) throw InputError(path + ": empty body (no samples)");
    return out;
}

}  // namespace

EegSignal parse_eeg_log(const std::string& path) { return parse_eeg_contents(path).signal; }

CardioSeries parse_oximeter_log(const std::string& path) {
    const auto lines = read_lines(path);
    CardioSeries series;
    std::size_t field_count = 0;
    std::int64_t first_ts = 0, second_ts = 0, prev_ts = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty() && i + 1 == lines.size()) break;  // trailing blank line
        const std::size_t line_no = i + 1;
        const auto fields = split(lines[i], ',');
        if (fields.size() != 2 && fields.size() != 3)
            fail_at(path, line_no, "expected timestamp_ms,hr_bpm[,spo2_pct]");
        if (field_count == 0)
            field_count = fields.size();
        else if (fields.size() != field_count)
            fail_at(path, line_no, "inconsistent field count");
        const std::int64_t ts = parse_timestamp(fields[0], path, line_no);
        if (!series.hr_bpm.empty() && ts < prev_ts)
            fail_at(path, line_no, "timestamps must be non-decreasing");
        if (series.hr_bpm.empty()) first_ts = ts;
        if (series.hr_bpm.size() == 1) second_ts = ts;
        prev_ts = ts;
        series.hr_bpm.push_back(parse_double(fields[1], path, line_no));
        if (fields.size() == 3) series.spo2_pct.push_back(parse_double(fields[2], path, line_no));
    }
    if (series.hr_bpm.empty()) throw InputError(path + ": empty body (no measurements)");
    if (series.hr_bpm.size() >= 2 && second_ts > first_ts)
        series.sample_rate_hz = 1000.0 / static_cast<double>(second_ts - first_ts);
    return series;
}

MusicDatabase load_music_db(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    if (!doc.is_array()) throw InputError(path + ": expected a JSON array of tracks");
    if (doc.empty()) throw InputError(path + ": empty track list");

    MusicDatabase db;
    std::set<std::string> seen;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("track_id") || !item.contains("title") ||
            !item.contains("bpm"))
            throw InputError(path + ": each track needs track_id, title and bpm");
        MusicTrack track;
        track.track_id = item.at("track_id").get<std::string>();
        track.title = item.at("title").get<std::string>();
        track.bpm = item.at("bpm").get<double>();
        if (item.contains("link") && !item.at("link").is_null())
            track.link = item.at("link").get<std::string>();
        if (track.track_id.empty()) throw InputError(path + ": empty track_id");
        if (!seen.insert(track.track_id).second)
            throw InputError(path + ": duplicate track_id \"" + track.track_id + "\"");
        if (!(track.bpm >= 40.0 && track.bpm <= 130.0))
            throw InputError(path + ": track \"" + track.track_id + "\" bpm " +
                             format_double(track.bpm) + " outside [40, 130]");
        db.tracks.push_back(std::move(track));
    }
    return db;
}

SessionRecording load_session(const std::string& eeg_path, const std::string& oximeter_path) {
    auto eeg = parse_eeg_contents(eeg_path);
    auto cardio = parse_oximeter_log(oximeter_path);

    const double eeg_duration =
        static_cast<double>(eeg.signal.samples.size()) / eeg.signal.sampling_rate_hz;
    const double cardio_duration =
        static_cast<double>(cardio.hr_bpm.size()) / cardio.sample_rate_hz;
    const double longest = std::max(eeg_duration, cardio_duration);
    if (std::abs(eeg_duration - cardio_duration) > 0.10 * longest)
        throw InputError("session durations disagree by more than 10%: EEG " +
                         format_double(eeg_duration) + " s vs oximeter " +
                         format_double(cardio_duration) + " s");

    SessionRecording rec;
    rec.eeg = std::move(eeg.signal);
    rec.cardio = std::move(cardio);
    rec.session_id = std::filesystem::path(eeg_path).stem().string();
    rec.started_at_ms = eeg.first_timestamp_ms;
    rec.metadata = std::move(eeg.extra_header);
    rec.metadata["eeg_path"] = eeg_path;
    rec.metadata["oximeter_path"] = oximeter_path;
    return rec;
}

void write_eeg_log(const std::string& path, const EegSignal& signal) {
    if (signal.sampling_rate_hz <= 0.0) throw InputError("write_eeg_log: invalid sampling rate");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path + ": cannot open for writing");
    out << "sampling_rate_hz=" << format_double(signal.sampling_rate_hz) << ",channel="
        << signal.channel_label << "\n";
    for (std::size_t i = 0; i < signal.samples.size(); ++i) {
        const auto ts = std::llround(static_cast<double>(i) * 1000.0 / signal.sampling_rate_hz);
        out << ts << "," << format_double(signal.samples[i]) << "\n";
    }
    if (!out) throw InputError(path + ": write failed");
}

void write_oximeter_log(const std::string& path, const CardioSeries& series) {
    if (series.sample_rate_hz <= 0.0) throw InputError("write_oximeter_log: invalid sample rate");
    if (!series.spo2_pct.empty() && series.spo2_pct.size() != series.hr_bpm.size())
        throw InputError("write_oximeter_log: hr and spo2 series differ in length");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path + ": cannot open for writing");
    for (std::size_t i = 0; i < series.hr_bpm.size(); ++i) {
        const auto ts = std::llround(static_cast<double>(i) * 1000.0 / series.sample_rate_hz);
        out << ts << "," << format_double(series.hr_bpm[i]);
        if (!series.spo2_pct.empty()) out << "," << format_double(series.spo2_pct[i]);
        out << "\n";
    }
    if (!out) throw InputError(path + ": write failed");
}

Json to_json(const MusicTrack& track) {
    Json j;
    j["track_id"] = track.track_id;
    j["title"] = track.title;
    j["bpm"] = track.bpm;
    if (!track.link.empty()) j["link"] = track.link;
    return j;
}

Json to_json(const MusicDatabase& db) {
    Json arr = Json::array();
    for (const auto& t : db.tracks) arr.push_back(to_json(t));
    return arr;
}

}  // namespace ingest
}  // namespace therakit
