#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "sentistock/date.hpp"

namespace sentistock {

// Positive/negative opinion word lists. Disjoint and non-empty after load.
struct Lexicon {
    std::unordered_set<std::string> positive;
    std::unordered_set<std::string> negative;
};

// Plain-text word lists, one lowercase word per line, ';' comment lines.
Lexicon load_lexicon(const std::string& positive_path, const std::string& negative_path);

// #(positive words) - #(negative words) over all words of all phrases,
// with multiplicity.
long score_terms(const std::vector<std::string>& phrase_keys, const Lexicon& lex);

enum class SentTag { Positive, Negative, Neutral };

struct DailySentiment {
    Date date;
    long score = 0;
    long article_count = 0;
    SentTag tag = SentTag::Neutral;
};

DailySentiment daily_sentiment(Date date, const std::vector<std::string>& day_terms,
                               long article_count, const Lexicon& lex);

enum class ChangeRatePolicy {
    FallbackAbs,  // divide by |prev|, or 1 when prev == 0 (default)
    Literal,      // divide by prev; prev == 0 is an error
};

// Percent day-over-day change.
double change_rate(double prev, double cur,
                   ChangeRatePolicy policy = ChangeRatePolicy::FallbackAbs);

// Min-max map onto [-1, 1]; a constant series maps to all zeros.
std::vector<double> normalize_series(const std::vector<double>& values);

// Min-max map onto [0, 1]; a constant series maps to all 0.5.
std::vector<double> scale_unit(const std::vector<double>& values);

// Train-only variant: min/max fitted on the first fit_count values, applied to
// the whole series, clamped into [-1, 1].
std::vector<double> normalize_series_fit_prefix(const std::vector<double>& values,
                                                std::size_t fit_count);

// One point of a derived series: raw level, its percent change from the
// previous point, and the [-1,1]-normalized change.
struct SeriesPoint {
    Date date;
    double raw = 0;
    double change_rate = 0;
    double normalized = 0;
};

// Change-rate series over (date, level) pairs; the first day has no previous
// value and is dropped, so the result is one shorter than the input.
std::vector<SeriesPoint> make_change_series(const std::vector<Date>& dates,
                                            const std::vector<double>& levels,
                                            ChangeRatePolicy policy = ChangeRatePolicy::FallbackAbs);

}  // namespace sentistock
