#include "therakit/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace therakit::evaluation {

namespace {

std::string to_lower(std::string_view word) {
    std::string out(word);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_alpha_word(const std::string& word) {
    return !word.empty() && std::all_of(word.begin(), word.end(), [](unsigned char c) {
        return std::isalpha(c) != 0;
    });
}

void validate_lexicon(const Lexicon& lex, const std::string& context) {
    if (lex.positive.empty() || lex.negative.empty())
        throw InputError(context + ": both keyword sets must be non-empty");
    for (const auto& w : lex.positive)
        if (!is_alpha_word(w))
            throw InputError(context + ": keyword \"" + w + "\" is not a single alphabetic word");
    for (const auto& w : lex.negative) {
        if (!is_alpha_word(w))
            throw InputError(context + ": keyword \"" + w + "\" is not a single alphabetic word");
        if (lex.positive.count(w))
            throw InputError(context + ": keyword \"" + w + "\" appears in both sets");
    }
}

}  // namespace

Lexicon default_lexicon() {
    Lexicon lex;
    lex.positive = {"relaxed",  "relaxation", "calm",     "calming",  "focused",  "focus",
                    "balanced", "balance",    "improved", "enhanced", "restful",  "soothing",
                    "stable",   "clarity",    "refreshed", "tranquil", "serene",  "comfortable",
                    "positive", "restorative", "harmonious", "settled"};
    lex.negative = {"anxious",  "anxiety",  "stressed", "stress",   "tense",     "tension",
                    "fatigue",  "fatigued", "restless", "agitated", "irritable", "overloaded",
                    "hyperactivation", "strained", "worried",  "worry",    "insomnia",
                    "exhausted", "negative", "uneasy"};
    return lex;
}

Lexicon load_lexicon(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("positive") || !doc.contains("negative"))
        throw InputError(path + ": expected {\"positive\": [...], \"negative\": [...]}");
    Lexicon lex;
    for (const auto& w : doc.at("positive")) lex.positive.insert(to_lower(w.get<std::string>()));
    for (const auto& w : doc.at("negative")) lex.negative.insert(to_lower(w.get<std::string>()));
    validate_lexicon(lex, path);
    return lex;
}

TendencyScore keyword_score(const std::string& report_text, const Lexicon& lexicon) {
    validate_lexicon(lexicon, "keyword_score");
    TendencyScore score;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        if (lexicon.positive.count(token)) score.positive_count += 1.0;
        else if (lexicon.negative.count(token)) score.negative_count += 1.0;
        token.clear();
    };
    for (unsigned char c : report_text) {
        if (std::isalpha(c))
            token.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    score.score = score.positive_count - score.negative_count;
    return score;
}

TendencyScore tendency_from_counts(double positive_count, double negative_count) {
    return {positive_count, negative_count, positive_count - negative_count};
}

TendencyScore mean_tendency(const std::vector<TendencyScore>& scores) {
    if (scores.empty()) throw InputError("mean_tendency: empty score list");
    double pos = 0.0, neg = 0.0;
    for (const auto& s : scores) {
        pos += s.positive_count;
        neg += s.negative_count;
    }
    const auto n = static_cast<double>(scores.size());
    return tendency_from_counts(pos / n, neg / n);
}

RankSummary allocate_ranks(const std::vector<RankedCase>& cases) {
    if (cases.empty()) throw InputError("allocate_ranks: no cases");
    static constexpr std::array<double, 3> kPoints = {20.0, 10.0, 0.0};

    RankSummary summary;
    summary.case_count = cases.size();
    std::map<std::string, double> totals;
    std::map<std::string, std::size_t> appearances;
    for (const auto& c : cases) {
        if (c.ranking[0] == c.ranking[1] || c.ranking[0] == c.ranking[2] ||
            c.ranking[1] == c.ranking[2])
            throw InputError("allocate_ranks: case \"" + c.case_id +
                             "\" ranks a system more than once");
        std::map<std::string, double> scores;
        for (std::size_t i = 0; i < 3; ++i) {
            scores[c.ranking[i]] = kPoints[i];
            totals[c.ranking[i]] += kPoints[i];
            appearances[c.ranking[i]] += 1;
        }
        summary.per_case_scores.push_back(std::move(scores));
    }
    for (const auto& [system, total] : totals)
        summary.per_system_mean[system] = total / static_cast<double>(appearances[system]);
    return summary;
}

std::vector<RankedCase> parse_rankings_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");

    std::vector<RankedCase> cases;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (line_no == 1) {
            if (fields != std::vector<std::string>{"case_id", "expert_id", "first", "second",
                                                   "third"})
                throw InputError(path + ":1: expected header case_id,expert_id,first,second,third");
            continue;
        }
        if (fields.size() != 5)
            throw InputError(path + ":" + std::to_string(line_no) + ": expected 5 fields");
        cases.push_back({fields[0], fields[1], {fields[2], fields[3], fields[4]}});
    }
    if (cases.empty()) throw InputError(path + ": no ranking rows");
    return cases;
}

Json to_json(const TendencyScore& score) {
    Json j;
    j["positive_count"] = score.positive_count;
    j["negative_count"] = score.negative_count;
    j["score"] = score.score;
    return j;
}

Json to_json(const RankSummary& summary) {
    Json means;
    for (const auto& [system, mean] : summary.per_system_mean) means[system] = mean;
    Json j;
    j["case_count"] = summary.case_count;
    j["per_system_mean"] = std::move(means);
    return j;
}

}  // namespace therakit::evaluation
