#include "therakit/cardio.hpp"

#include <cmath>

namespace therakit::cardio {

CardioSummary summarize(const CardioSeries& series) {
    CardioSummary summary;
    double hr_sum = 0.0;
    for (double hr : series.hr_bpm) {
        if (std::isfinite(hr) && hr > kMinValidHr && hr < kMaxValidHr) {
            hr_sum += hr;
            ++summary.valid_sample_count;
        } else {
            ++summary.rejected_sample_count;
        }
    }
    if (summary.valid_sample_count == 0)
        throw InputError("summarize: no valid heart-rate sample in range (" +
                         std::to_string(kMinValidHr) + ", " + std::to_string(kMaxValidHr) + ")");
    summary.avg_hr_bpm = hr_sum / static_cast<double>(summary.valid_sample_count);

    double spo2_sum = 0.0;
    std::size_t spo2_valid = 0;
    for (double s : series.spo2_pct) {
        if (std::isfinite(s) && s > kMinValidSpo2 && s <= kMaxValidSpo2) {
            spo2_sum += s;
            ++spo2_valid;
        }
    }
    if (spo2_valid > 0) summary.avg_spo2_pct = spo2_sum / static_cast<double>(spo2_valid);
    return summary;
}

Json to_json(const CardioSummary& summary) {
    Json j;
    j["avg_hr_bpm"] = summary.avg_hr_bpm;
    if (summary.avg_spo2_pct)
        j["avg_spo2_pct"] = *summary.avg_spo2_pct;
    else
        j["avg_spo2_pct"] = nullptr;
    j["valid_sample_count"] = summary.valid_sample_count;
    j["rejected_sample_count"] = summary.rejected_sample_count;
    return j;
}

}  // namespace therakit::cardio
