#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "therakit/common.hpp"

namespace therakit {

// Pulse-oximeter streams, time-aligned, typically sampled at 1 Hz.
struct CardioSeries {
    std::vector<double> hr_bpm;
    std::vector<double> spo2_pct;  // may be empty when the device reported none
    double sample_rate_hz = 1.0;
};

struct CardioSummary {
    double avg_hr_bpm = 0.0;
    std::optional<double> avg_spo2_pct;
    std::size_t valid_sample_count = 0;
    std::size_t rejected_sample_count = 0;
};

namespace cardio {

// Physiological plausibility bounds; samples outside are dropped as sensor
// dropouts before averaging.
inline constexpr double kMinValidHr = 20.0;
inline constexpr double kMaxValidHr = 250.0;
inline constexpr double kMinValidSpo2 = 50.0;
inline constexpr double kMaxValidSpo2 = 100.0;

// Mean heart rate (and SpO2 when present) over the in-range samples.
// valid/rejected counts refer to the HR stream. Throws InputError when no
// valid HR sample remains.
CardioSummary summarize(const CardioSeries& series);

Json to_json(const CardioSummary& summary);

}  // namespace cardio
}  // namespace therakit
