#include <doctest.h>

#include "support.hpp"
#include "therakit/agent.hpp"
#include "therakit/synthgen.hpp"

using namespace therakit;
using testsupport::TempDir;
using testsupport::run_cli;

namespace {

const std::string kMusicDb = std::string(THERAKIT_DATA_DIR) + "/music_db.json";

// A ready-to-use synthetic session on disk.
struct CliFixture {
    TempDir dir;
    std::string eeg_path;
    std::string oxi_path;

    CliFixture(double duration_s = 20.0) {
        const auto eeg = synthgen::synth_eeg({{5.0, 1.0, 3.0, 0.0}, {10.0, 3.0, 1.0, 0.4}}, 0.2,
                                             256.0, duration_s, 12);
        eeg_path = dir.file("eeg.csv");
        oxi_path = dir.file("oximeter.csv");
        ingest::write_eeg_log(eeg_path, eeg);
        ingest::write_oximeter_log(oxi_path, synthgen::synth_cardio(72.0, 2.0, duration_s, 12));
    }
};

}  // namespace

TEST_CASE("analyze: JSON on stdout, diagnostics on stderr") {
    CliFixture fx;
    SUBCASE("success prints parseable JSON") {
        const auto r = run_cli("analyze " + fx.eeg_path);
        CHECK(r.exit_code == 0);
        const auto doc = Json::parse(r.out);  // throws on junk -> test fails
        REQUIRE(doc.contains("bands"));
        CHECK(doc["bands"].size() == 4);
        CHECK(doc["bands"][1]["name"] == "Theta");
        CHECK(doc["bands"][1]["trend"] == "Increasing");
    }
    SUBCASE("table format") {
        const auto r = run_cli("analyze " + fx.eeg_path + " --format table");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("Band") != std::string::npos);
        CHECK(r.out.find("Theta") != std::string::npos);
    }
    SUBCASE("missing file exits 2 and names the path") {
        const auto r = run_cli("analyze /no/such/file.csv");
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("/no/such/file.csv") != std::string::npos);
        CHECK(r.out.empty());
    }
}

TEST_CASE("report: offline and mock paths") {
    CliFixture fx;
    SUBCASE("offline run writes both artifacts with fallback provenance") {
        const auto out_dir = fx.dir.file("out");
        const auto r = run_cli("report --eeg " + fx.eeg_path + " --oximeter " + fx.oxi_path +
                               " --offline --music-db " + kMusicDb + " --out " + out_dir);
        CHECK(r.exit_code == 0);
        const auto doc = Json::parse(testsupport::read_file(out_dir + "/report.json"));
        CHECK(doc["provenance"] == "deterministic_fallback");
        CHECK(doc["music_recommendations"].size() == 2);
        const auto text = testsupport::read_file(out_dir + "/report.txt");
        CHECK(text.find(agent::kAnalysisHeader) != std::string::npos);
        CHECK(text.find(agent::kSoundTherapyHeader) != std::string::npos);
        CHECK(text.find(agent::kMusicHeader) != std::string::npos);
        // stdout carries the same JSON
        CHECK(Json::parse(r.out)["provenance"] == "deterministic_fallback");
    }
    SUBCASE("mock backend exercises the live protocol") {
        const auto out_dir = fx.dir.file("out_mock");
        const auto r = run_cli("report --eeg " + fx.eeg_path + " --oximeter " + fx.oxi_path +
                               " --mock-backend --save-transcript --music-db " + kMusicDb +
                               " --out " + out_dir);
        CHECK(r.exit_code == 0);
        const auto doc = Json::parse(testsupport::read_file(out_dir + "/report.json"));
        CHECK(doc["provenance"] == "llm_generated");
        const auto transcript =
            Json::parse(testsupport::read_file(out_dir + "/transcript.json"));
        CHECK(transcript.size() >= 4);  // system, user, tool call, tool, answer
    }
    SUBCASE("unreachable endpoint with --no-fallback exits 3") {
        const auto cfg_path = fx.dir.file("cfg.json");
        testsupport::write_file(
            cfg_path, R"({"agent": {"max_retries": 0, "request_timeout_ms": 500}})");
        const auto r = run_cli("report --eeg " + fx.eeg_path + " --oximeter " + fx.oxi_path +
                               " --no-fallback --config " + cfg_path +
                               " --endpoint http://127.0.0.1:9 --music-db " + kMusicDb +
                               " --out " + fx.dir.file("out_nf"));
        CHECK(r.exit_code == 3);
    }
    SUBCASE("unreachable endpoint with fallback still produces a report") {
        const auto cfg_path = fx.dir.file("cfg2.json");
        testsupport::write_file(
            cfg_path,
            R"({"agent": {"max_retries": 0, "retry_backoff_ms": 1, "request_timeout_ms": 500}})");
        const auto out_dir = fx.dir.file("out_fb");
        const auto r = run_cli("report --eeg " + fx.eeg_path + " --oximeter " + fx.oxi_path +
                               " --config " + cfg_path +
                               " --endpoint http://127.0.0.1:9 --music-db " + kMusicDb +
                               " --out " + out_dir);
        CHECK(r.exit_code == 0);
        const auto doc = Json::parse(testsupport::read_file(out_dir + "/report.json"));
        CHECK(doc["provenance"] == "deterministic_fallback");
    }
    SUBCASE("corrupt oximeter file exits 2 with a line number") {
        const auto bad_path = fx.dir.file("bad_oxi.csv");
        testsupport::write_file(bad_path, "0,70\n1000,banana\n");
        const auto r = run_cli("report --eeg " + fx.eeg_path + " --oximeter " + bad_path +
                               " --offline --music-db " + kMusicDb + " --out " +
                               fx.dir.file("out_bad"));
        CHECK(r.exit_code == 2);
        CHECK(r.err.find(":2") != std::string::npos);
    }
}

TEST_CASE("recommend: deterministic ranking and scenario routing") {
    CliFixture fx;
    SUBCASE("both scenarios by default") {
        const auto r = run_cli("recommend --oximeter " + fx.oxi_path + " --deterministic" +
                               " --music-db " + kMusicDb);
        CHECK(r.exit_code == 0);
        const auto doc = Json::parse(r.out);
        CHECK(doc.contains("relaxation"));
        CHECK(doc.contains("exercise"));
        // relaxation picks never exceed the average heart rate
        const double avg = doc["avg_hr_bpm"].get<double>();
        CHECK(doc["relaxation"][0]["bpm"].get<double>() <= avg);
    }
    SUBCASE("--scenario exercise routes to the exercise branch only") {
        const auto r = run_cli("recommend --oximeter " + fx.oxi_path +
                               " --deterministic --scenario exercise --music-db " + kMusicDb);
        CHECK(r.exit_code == 0);
        const auto doc = Json::parse(r.out);
        CHECK(doc.contains("exercise"));
        CHECK_FALSE(doc.contains("relaxation"));
    }
    SUBCASE("empty database exits 2") {
        const auto db_path = fx.dir.file("empty_db.json");
        testsupport::write_file(db_path, "[]");
        const auto r = run_cli("recommend --oximeter " + fx.oxi_path +
                               " --deterministic --music-db " + db_path);
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("synth writes fixtures the other commands consume") {
    TempDir dir;
    const auto spec_path = dir.file("spec.json");
    testsupport::write_file(spec_path, R"({
      "eeg": {"fs_hz": 256, "duration_s": 8, "noise_amplitude": 0,
              "tones": [{"freq_hz": 6, "amplitude_start": 1, "amplitude_end": 1}]},
      "cardio": {"base_bpm": 70, "jitter_bpm": 0, "duration_s": 8}
    })");
    const auto out_dir = dir.file("fixtures");
    const auto r = run_cli("synth --spec " + spec_path + " --out-dir " + out_dir);
    CHECK(r.exit_code == 0);
    const auto manifest = Json::parse(r.out);
    CHECK(manifest["eeg_samples"] == 2048);
    CHECK(manifest["cardio_samples"] == 8);
    const auto analyze = run_cli("analyze " + out_dir + "/eeg.csv");
    CHECK(analyze.exit_code == 0);
    const auto doc = Json::parse(analyze.out);
    CHECK(doc["bands"][1]["dominant_freq_hz"].get<double>() == doctest::Approx(6.0).epsilon(0.03));
}

TEST_CASE("score command") {
    TempDir dir;
    SUBCASE("rankings CSV") {
        const auto path = dir.file("ranks.csv");
        testsupport::write_file(path,
                                "case_id,expert_id,first,second,third\nc1,e1,A,B,C\n");
        const auto r = run_cli("score --rankings " + path);
        CHECK(r.exit_code == 0);
        const auto doc = Json::parse(r.out);
        CHECK(doc["per_system_mean"]["A"] == 20.0);
        CHECK(doc["per_system_mean"]["B"] == 10.0);
        CHECK(doc["per_system_mean"]["C"] == 0.0);
    }
    SUBCASE("report text with the default lexicon") {
        const auto path = dir.file("report.txt");
        testsupport::write_file(path, "A calm, relaxed session with no stress at all.");
        const auto r = run_cli("score --report " + path);
        CHECK(r.exit_code == 0);
        const auto doc = Json::parse(r.out);
        CHECK(doc["positive_count"] == 2.0);
        CHECK(doc["negative_count"] == 1.0);
        CHECK(doc["score"] == 1.0);
    }
    SUBCASE("both modes at once is a usage error") {
        const auto r = run_cli("score --report a --rankings b");
        CHECK(r.exit_code == 2);
    }
    SUBCASE("neither mode is a usage error") {
        const auto r = run_cli("score");
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("unknown subcommand exits 2") {
    const auto r = run_cli("frobnicate");
    CHECK(r.exit_code == 2);
}
