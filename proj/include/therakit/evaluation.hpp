#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "therakit/common.hpp"

namespace therakit {

// Emotional keyword sets, lowercase, disjoint, single alphabetic words.
struct Lexicon {
    std::set<std::string> positive;
    std::set<std::string> negative;
};

// Counts are reals: per-report scores are integers, but group aggregates are
// means over reports.
struct TendencyScore {
    double positive_count = 0.0;
    double negative_count = 0.0;
    double score = 0.0;  // positive_count - negative_count
};

// One expert's ranking of three systems for one case, best first.
struct RankedCase {
    std::string case_id;
    std::string expert_id;
    std::array<std::string, 3> ranking;
};

struct RankSummary {
    // 20 / 10 / 0 points per case, keyed by system id.
    std::vector<std::map<std::string, double>> per_case_scores;
    std::map<std::string, double> per_system_mean;
    std::size_t case_count = 0;
};

namespace evaluation {

Lexicon default_lexicon();
Lexicon load_lexicon(const std::string& path);

// Case-insensitive whole-word occurrence counts over non-letter boundaries;
// every occurrence counts, not just distinct keywords.
TendencyScore keyword_score(const std::string& report_text, const Lexicon& lexicon);

TendencyScore tendency_from_counts(double positive_count, double negative_count);

// Mean of per-report scores, the group-level aggregate.
TendencyScore mean_tendency(const std::vector<TendencyScore>& scores);

// 20/10/0 allocation per case plus per-system means across all cases.
RankSummary allocate_ranks(const std::vector<RankedCase>& cases);

// CSV with mandatory header `case_id,expert_id,first,second,third`.
std::vector<RankedCase> parse_rankings_csv(const std::string& path);

Json to_json(const TendencyScore& score);
Json to_json(const RankSummary& summary);

}  // namespace evaluation
}  // namespace therakit
