#include "sentistock/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sentistock/error.hpp"

namespace sentistock {

namespace {

std::unordered_set<std::string> load_word_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open word list " + path);
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == ';') continue;
        std::istringstream ss(line);
        std::string w;
        if (ss >> w) words.insert(w);
    }
    return words;
}

}  // namespace

Lexicon load_lexicon(const std::string& positive_path, const std::string& negative_path) {
    Lexicon lex;
    lex.positive = load_word_list(positive_path);
    lex.negative = load_word_list(negative_path);
    if (lex.positive.empty()) throw ValidationError(positive_path + ": empty word list");
    if (lex.negative.empty()) throw ValidationError(negative_path + ": empty word list");
    for (const auto& w : lex.positive)
        if (lex.negative.count(w))
            throw ValidationError("lexicon lists are not disjoint: '" + w + "' in both");
    return lex;
}

long score_terms(const std::vector<std::string>& phrase_keys, const Lexicon& lex) {
    long score = 0;
    for (const auto& key : phrase_keys) {
        std::istringstream ss(key);
        std::string word;
        while (ss >> word) {
            if (lex.positive.count(word)) ++score;
            else if (lex.negative.count(word)) --score;
        }
    }
    return score;
}

DailySentiment daily_sentiment(Date date, const std::vector<std::string>& day_terms,
                               long article_count, const Lexicon& lex) {
    DailySentiment day;
    day.date = date;
    day.score = score_terms(day_terms, lex);
    day.article_count = article_count;
    day.tag = day.score > 0   ? SentTag::Positive
              : day.score < 0 ? SentTag::Negative
                              : SentTag::Neutral;
    return day;
}

double change_rate(double prev, double cur, ChangeRatePolicy policy) {
    if (policy == ChangeRatePolicy::Literal) {
        if (prev == 0.0)
            throw ValidationError("change_rate: previous value is zero");
        return 100.0 * (cur - prev) / prev;
    }
    const double denom = prev == 0.0 ? 1.0 : std::abs(prev);
    return 100.0 * (cur - prev) / denom;
}

std::vector<double> normalize_series(const std::vector<double>& values) {
    if (values.empty()) throw ValidationError("normalize_series: empty series");
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    const double mn = *mn_it, mx = *mx_it;
    std::vector<double> out(values.size());
    if (mx == mn) return out;  // constant series -> all zero
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = 2.0 * (values[i] - mn) / (mx - mn) - 1.0;
    return out;
}

std::vector<double> scale_unit(const std::vector<double>& values) {
    if (values.empty()) throw ValidationError("scale_unit: empty series");
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    const double mn = *mn_it, mx = *mx_it;
    std::vector<double> out(values.size());
    if (mx == mn) {
        std::fill(out.begin(), out.end(), 0.5);
        return out;
    }
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mn) / (mx - mn);
    return out;
}

std::vector<double> normalize_series_fit_prefix(const std::vector<double>& values,
                                                std::size_t fit_count) {
    if (values.empty()) throw ValidationError("normalize_series: empty series");
    if (fit_count == 0 || fit_count > values.size())
        throw ValidationError("normalize_series: fit prefix out of range");
    const auto fit_end = values.begin() + static_cast<std::ptrdiff_t>(fit_count);
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), fit_end);
    const double mn = *mn_it, mx = *mx_it;
    std::vector<double> out(values.size());
    if (mx == mn) return out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double z = 2.0 * (values[i] - mn) / (mx - mn) - 1.0;
        out[i] = std::clamp(z, -1.0, 1.0);
    }
    return out;
}

std::vector<SeriesPoint> make_change_series(const std::vector<Date>& dates,
                                            const std::vector<double>& levels,
                                            ChangeRatePolicy policy) {
    if (dates.size() != levels.size())
        throw ValidationError("make_change_series: dates and levels differ in length");
    if (dates.size() < 2)
        throw ValidationError("make_change_series: need at least 2 points");

    std::vector<SeriesPoint> out;
    out.reserve(dates.size() - 1);
    std::vector<double> rates;
    rates.reserve(dates.size() - 1);
    for (std::size_t i = 1; i < dates.size(); ++i)
        rates.push_back(change_rate(levels[i - 1], levels[i], policy));
    const auto norm = normalize_series(rates);
    for (std::size_t i = 1; i < dates.size(); ++i) {
        SeriesPoint p;
        p.date = dates[i];
        p.raw = levels[i];
        p.change_rate = rates[i - 1];
        p.normalized = norm[i - 1];
        out.push_back(p);
    }
    return out;
}

}  // namespace sentistock
