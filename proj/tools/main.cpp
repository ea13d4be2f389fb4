#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "therakit/agent.hpp"
#include "therakit/config.hpp"
#include "therakit/evaluation.hpp"
#include "therakit/synthgen.hpp"

namespace tk = therakit;

namespace {

struct SharedFlags {
    std::string config_path;
    tk::CliFlags flags;
};

tk::RunConfig resolve(const SharedFlags& shared) {
    tk::Json file = tk::Json::object();
    if (!shared.config_path.empty()) file = tk::cli::load_config_file(shared.config_path);
    return tk::cli::resolve_config(shared.flags, tk::cli::environment_overrides(), file);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw tk::InputError(path + ": cannot open for writing");
    out << content;
    if (!out) throw tk::InputError(path + ": write failed");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw tk::InputError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void warn_flat_bands(const tk::EegFeatureSet& features) {
    for (const auto& bf : features.per_band)
        if (bf.flat_spectrum)
            std::cerr << "warning: " << tk::band_name(bf.band)
                      << " band carried no spectral power; dominant frequency fell back to the "
                         "band floor\n";
}

int cmd_analyze(const std::string& eeg_path, const std::string& format) {
    const auto features = tk::signal::process_eeg(eeg_path);
    warn_flat_bands(features);
    if (format == "table") {
        std::printf("%-6s %-11s %14s %14s %14s\n", "Band", "Trend", "Dominant (Hz)",
                    "Median 1st", "Median 2nd");
        for (const auto& bf : features.per_band)
            std::printf("%-6s %-11s %14.3f %14.6g %14.6g\n", tk::band_name(bf.band).c_str(),
                        tk::signal::trend_name(bf.trend).c_str(), bf.dominant_freq_hz,
                        bf.median_first_half, bf.median_second_half);
    } else {
        std::cout << tk::signal::to_json(features).dump(2) << "\n";
    }
    return 0;
}

// Scripted stand-in for a live model: one tool call, then a three-section
// answer templated from the locally computed features, then a RAG reply
// naming the deterministic top picks.
std::unique_ptr<tk::ChatBackend> make_mock_backend(const tk::SessionRecording& recording,
                                                   const tk::MusicDatabase& db,
                                                   const tk::RunConfig& config) {
    const std::string eeg_path = recording.metadata.at("eeg_path");
    const auto features = tk::signal::analyze(recording.eeg, eeg_path);
    const auto summary = tk::cardio::summarize(recording.cardio);

    tk::Json args;
    args["path"] = eeg_path;
    auto tool_call =
        tk::ChatMessage::assistant_tool_call("call_1", "process_eeg", args.dump());

    std::string answer = tk::agent::kAnalysisHeader + "\n" +
                         tk::agent::analysis_section(features, summary) + "\n\n" +
                         tk::agent::kSoundTherapyHeader + "\n" +
                         tk::agent::sound_therapy_section(features) + "\n\n" +
                         tk::agent::kMusicHeader + "\n" +
                         "Selected below by tempo matching against the session heart rate.\n";

    const auto picks = tk::recommend::fallback_recommendations(summary.avg_hr_bpm, db,
                                                               config.recommend);
    tk::Json rag;
    rag["relaxation"] = {{"track_id", picks.first.track.track_id},
                         {"reason", picks.first.rationale}};
    rag["exercise"] = {{"track_id", picks.second.track.track_id},
                       {"reason", picks.second.rationale}};

    return std::make_unique<tk::ScriptedBackend>(std::vector<tk::ChatMessage>{
        std::move(tool_call), tk::ChatMessage::assistant(answer),
        tk::ChatMessage::assistant(rag.dump())});
}

int cmd_report(const SharedFlags& shared, const std::string& eeg_path,
               const std::string& oximeter_path, bool offline, bool mock, bool save_transcript) {
    const auto config = resolve(shared);
    const auto recording = tk::ingest::load_session(eeg_path, oximeter_path);
    const auto db = tk::ingest::load_music_db(config.music_db_path);

    tk::TherapyReport report;
    if (offline) {
        const auto features = tk::signal::analyze(recording.eeg, eeg_path);
        const auto summary = tk::cardio::summarize(recording.cardio);
        report = tk::agent::deterministic_report(features, summary, db, config.recommend);
    } else if (mock) {
        auto backend = make_mock_backend(recording, db, config);
        report = tk::agent::run_session(recording, db, config.agent, *backend);
    } else {
        tk::HttpChatBackend backend;
        report = tk::agent::run_session(recording, db, config.agent, backend);
    }
    warn_flat_bands(report.features);

    std::filesystem::create_directories(config.output_dir);
    const auto base = std::filesystem::path(config.output_dir);
    const auto json_path = (base / "report.json").string();
    const auto text_path = (base / "report.txt").string();
    write_file(json_path, tk::agent::report_to_json(report).dump(2) + "\n");
    write_file(text_path, tk::agent::render_report_text(report));
    if (save_transcript)
        write_file((base / "transcript.json").string(),
                   tk::transcript_to_json(report.raw_transcript).dump(2) + "\n");

    std::cout << tk::agent::report_to_json(report).dump(2) << "\n";
    std::cerr << "report written to " << json_path << " and " << text_path << "\n";
    return 0;
}

int cmd_recommend(const SharedFlags& shared, const std::string& oximeter_path,
                  bool deterministic, const std::string& scenario) {
    const auto config = resolve(shared);
    const auto series = tk::ingest::parse_oximeter_log(oximeter_path);
    const auto summary = tk::cardio::summarize(series);
    const auto db = tk::ingest::load_music_db(config.music_db_path);

    const bool want_relax = scenario == "both" || scenario == "relaxation";
    const bool want_exercise = scenario == "both" || scenario == "exercise";

    tk::Json out;
    out["avg_hr_bpm"] = summary.avg_hr_bpm;
    if (deterministic) {
        auto ranked_json = [&](tk::Scenario s) {
            tk::Json arr = tk::Json::array();
            for (const auto& t : tk::recommend::retrieve_tracks(summary.avg_hr_bpm, s, db,
                                                                config.recommend))
                arr.push_back(tk::ingest::to_json(t));
            return arr;
        };
        if (want_relax) out["relaxation"] = ranked_json(tk::Scenario::Relaxation);
        if (want_exercise) out["exercise"] = ranked_json(tk::Scenario::Exercise);
    } else {
        tk::HttpChatBackend backend;
        const auto recs =
            tk::recommend::llm_recommend(summary, db, config.agent, backend, config.recommend);
        tk::Json arr = tk::Json::array();
        if (want_relax) arr.push_back(tk::recommend::to_json(recs.first));
        if (want_exercise) arr.push_back(tk::recommend::to_json(recs.second));
        out["recommendations"] = std::move(arr);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    tk::Json spec;
    try {
        spec = tk::Json::parse(read_file(spec_path));
    } catch (const tk::Json::parse_error& e) {
        throw tk::InputError(spec_path + ": " + std::string(e.what()));
    }
    if (!spec.is_object() || (!spec.contains("eeg") && !spec.contains("cardio")))
        throw tk::InputError(spec_path + ": expected an object with \"eeg\" and/or \"cardio\"");

    std::filesystem::create_directories(out_dir);
    tk::Json manifest;
    if (spec.contains("eeg")) {
        const tk::Json& e = spec.at("eeg");
        std::vector<tk::ToneSpec> tones;
        for (const auto& t : e.value("tones", tk::Json::array()))
            tones.push_back({t.at("freq_hz").get<double>(),
                             t.at("amplitude_start").get<double>(),
                             t.at("amplitude_end").get<double>(), t.value("phase_rad", 0.0)});
        const auto signal = tk::synthgen::synth_eeg(
            tones, e.value("noise_amplitude", 0.0), e.value("fs_hz", 256.0),
            e.at("duration_s").get<double>(), e.value("seed", 0u));
        const auto path = (std::filesystem::path(out_dir) / "eeg.csv").string();
        tk::ingest::write_eeg_log(path, signal);
        manifest["eeg_path"] = path;
        manifest["eeg_samples"] = signal.samples.size();
    }
    if (spec.contains("cardio")) {
        const tk::Json& c = spec.at("cardio");
        const auto series = tk::synthgen::synth_cardio(
            c.at("base_bpm").get<double>(), c.value("jitter_bpm", 0.0),
            c.at("duration_s").get<double>(), c.value("seed", 0u));
        const auto path = (std::filesystem::path(out_dir) / "oximeter.csv").string();
        tk::ingest::write_oximeter_log(path, series);
        manifest["oximeter_path"] = path;
        manifest["cardio_samples"] = series.hr_bpm.size();
    }
    std::cout << manifest.dump(2) << "\n";
    return 0;
}

int cmd_score(const SharedFlags& shared, const std::string& report_path,
              const std::string& rankings_path) {
    if (report_path.empty() == rankings_path.empty())
        throw tk::InputError("score: pass exactly one of --report or --rankings");
    if (!report_path.empty()) {
        const auto config = resolve(shared);
        const auto lexicon = config.lexicon_path.empty()
                                 ? tk::evaluation::default_lexicon()
                                 : tk::evaluation::load_lexicon(config.lexicon_path);
        const auto score = tk::evaluation::keyword_score(read_file(report_path), lexicon);
        std::cout << tk::evaluation::to_json(score).dump(2) << "\n";
    } else {
        const auto cases = tk::evaluation::parse_rankings_csv(rankings_path);
        const auto summary = tk::evaluation::allocate_ranks(cases);
        std::cout << tk::evaluation::to_json(summary).dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Post-session EEG and heart-rate analysis with BPM-matched music "
                 "recommendations"};
    app.require_subcommand(1);
    app.fallthrough();

    SharedFlags shared;
    app.add_option("--config", shared.config_path, "JSON config file");
    app.add_option("--endpoint", shared.flags.endpoint_url, "Chat-completions endpoint URL");
    app.add_option("--api-key", shared.flags.api_key, "API key (never echoed)");
    app.add_option("--model", shared.flags.model_name, "Model name");
    app.add_option("--music-db", shared.flags.music_db_path, "Music database JSON");
    app.add_option("--lexicon", shared.flags.lexicon_path, "Keyword lexicon JSON");
    app.add_option("--exercise-offset", shared.flags.exercise_offset_bpm,
                   "BPM added to avg HR for the exercise scenario");

    auto* analyze = app.add_subcommand("analyze", "Extract per-band EEG features from a log");
    std::string eeg_path, format = "json";
    analyze->add_option("eeg_path", eeg_path, "EEG log file")->required();
    analyze->add_option("--format", format, "json or table")
        ->check(CLI::IsMember({"json", "table"}));

    auto* report = app.add_subcommand("report", "Produce the full therapy report");
    std::string oximeter_path;
    bool offline = false, mock = false, no_fallback = false, save_transcript = false;
    report->add_option("--eeg", eeg_path, "EEG log file")->required();
    report->add_option("--oximeter", oximeter_path, "Oximeter log file")->required();
    report->add_option("--out", shared.flags.output_dir, "Output directory");
    report->add_flag("--offline", offline, "Skip the model; deterministic report");
    report->add_flag("--mock-backend", mock, "Use the scripted in-process backend");
    report->add_flag("--no-fallback", no_fallback, "Fail instead of falling back");
    report->add_flag("--save-transcript", save_transcript, "Write transcript.json");

    auto* recommend = app.add_subcommand("recommend", "Recommend music from heart rate");
    bool deterministic = false;
    std::string scenario = "both";
    recommend->add_option("--oximeter", oximeter_path, "Oximeter log file")->required();
    recommend->add_flag("--deterministic", deterministic, "Ranked BPM retrieval, no model");
    recommend->add_option("--scenario", scenario, "relaxation, exercise or both")
        ->check(CLI::IsMember({"relaxation", "exercise", "both"}));

    auto* synth = app.add_subcommand("synth", "Generate synthetic session fixtures");
    std::string spec_path, out_dir = ".";
    synth->add_option("--spec", spec_path, "Fixture spec JSON")->required();
    synth->add_option("--out-dir", out_dir, "Destination directory");

    auto* score = app.add_subcommand("score", "Score a report or a rankings file");
    std::string report_path, rankings_path;
    score->add_option("--report", report_path, "Report text to keyword-score");
    score->add_option("--rankings", rankings_path, "Rankings CSV to aggregate");

    try {
        app.parse(argc, argv);
        if (no_fallback) shared.flags.no_fallback = true;

        if (app.got_subcommand(analyze)) return cmd_analyze(eeg_path, format);
        if (app.got_subcommand(report))
            return cmd_report(shared, eeg_path, oximeter_path, offline, mock, save_transcript);
        if (app.got_subcommand(recommend))
            return cmd_recommend(shared, oximeter_path, deterministic, scenario);
        if (app.got_subcommand(synth)) return cmd_synth(spec_path, out_dir);
        if (app.got_subcommand(score)) return cmd_score(shared, report_path, rankings_path);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tk::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tk::BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
