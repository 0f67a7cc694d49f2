#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "sentistock/error.hpp"
#include "sentistock/sentiment.hpp"

using namespace sentistock;

namespace {

Lexicon tiny_lexicon() {
    Lexicon lex;
    lex.positive = {"gain", "strong", "win", "boost", "rally"};
    lex.negative = {"loss", "weak", "fail", "drop", "crisis"};
    return lex;
}

// Brute-force word-level recount, independent of score_terms' tokenization.
long reference_score(const std::vector<std::string>& keys, const Lexicon& lex) {
    long score = 0;
    for (const auto& key : keys) {
        std::string word;
        std::istringstream ss(key);
        std::vector<std::string> words;
        while (ss >> word) words.push_back(word);
        for (const auto& w : words) {
            if (lex.positive.count(w)) score += 1;
            if (lex.negative.count(w)) score -= 1;
        }
    }
    return score;
}

}  // namespace

TEST_CASE("shipped lexicon loads, is non-empty and disjoint") {
    const std::string root(SENTISTOCK_SOURCE_DIR);
    Lexicon lex = load_lexicon(root + "/data/lexicon/positive-words.txt",
                               root + "/data/lexicon/negative-words.txt");
    CHECK(lex.positive.size() > 100);
    CHECK(lex.negative.size() > 100);
    for (const auto& w : lex.positive) {
        CAPTURE(w);
        CHECK(lex.negative.count(w) == 0);
    }
    CHECK(lex.positive.count("gain") == 1);
    CHECK(lex.negative.count("crisis") == 1);

    CHECK_THROWS_AS(load_lexicon("/nonexistent/pos.txt", "/nonexistent/neg.txt"), IoError);
}

TEST_CASE("term scoring counts words with multiplicity") {
    Lexicon lex = tiny_lexicon();
    CHECK(score_terms({"gain"}, lex) == 1);
    CHECK(score_terms({"loss"}, lex) == -1);
    CHECK(score_terms({"market"}, lex) == 0);
    CHECK(score_terms({}, lex) == 0);
    // Multi-word phrases score every word.
    CHECK(score_terms({"strong gain"}, lex) == 2);
    CHECK(score_terms({"strong loss"}, lex) == 0);
    // Multiplicity across the list.
    CHECK(score_terms({"gain", "gain", "loss"}, lex) == 1);

    SUBCASE("matches brute force on random term lists") {
        std::vector<std::string> vocab{"gain", "loss",  "strong", "weak",  "market",
                                       "win",  "fail",  "trade",  "boost", "drop",
                                       "rally", "crisis", "summit", "deal", "talk"};
        std::mt19937 rng(2718);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<std::string> keys;
            int n = static_cast<int>(rng() % 30);
            for (int i = 0; i < n; ++i) {
                int words = 1 + static_cast<int>(rng() % 3);
                std::string key;
                for (int w = 0; w < words; ++w) {
                    if (w) key += ' ';
                    key += vocab[rng() % vocab.size()];
                }
                keys.push_back(std::move(key));
            }
            CHECK(score_terms(keys, lex) == reference_score(keys, lex));
        }
    }
    SUBCASE("additive over concatenation") {
        std::vector<std::string> a{"gain", "weak market"};
        std::vector<std::string> b{"strong rally", "crisis"};
        std::vector<std::string> both = a;
        both.insert(both.end(), b.begin(), b.end());
        CHECK(score_terms(both, lex) == score_terms(a, lex) + score_terms(b, lex));
    }
}

TEST_CASE("daily sentiment tag trichotomy") {
    Lexicon lex = tiny_lexicon();
    Date d = Date::parse("2019-04-01");

    auto pos = daily_sentiment(d, {"gain", "strong"}, 3, lex);
    CHECK(pos.score == 2);
    CHECK(pos.tag == SentTag::Positive);
    CHECK(pos.article_count == 3);

    auto neg = daily_sentiment(d, {"loss"}, 1, lex);
    CHECK(neg.score == -1);
    CHECK(neg.tag == SentTag::Negative);

    auto neu = daily_sentiment(d, {"gain", "loss"}, 2, lex);
    CHECK(neu.score == 0);
    CHECK(neu.tag == SentTag::Neutral);

    SUBCASE("tag is exhaustive over scores -3..3") {
        for (long s = -3; s <= 3; ++s) {
            std::vector<std::string> keys;
            for (long i = 0; i < std::abs(s); ++i) keys.push_back(s > 0 ? "gain" : "loss");
            auto day = daily_sentiment(d, keys, 1, lex);
            CHECK(day.score == s);
            if (s > 0) CHECK(day.tag == SentTag::Positive);
            else if (s < 0) CHECK(day.tag == SentTag::Negative);
            else CHECK(day.tag == SentTag::Neutral);
        }
    }
}

TEST_CASE("change rate examples") {
    CHECK(change_rate(100, 103) == doctest::Approx(3.0));
    CHECK(change_rate(100, 97) == doctest::Approx(-3.0));
    CHECK(change_rate(50, 50) == doctest::Approx(0.0));
    CHECK(change_rate(200, 100) == doctest::Approx(-50.0));

    SUBCASE("fallback policy divides by 1 when prev is zero") {
        CHECK(change_rate(0, 2) == doctest::Approx(200.0));
        CHECK(change_rate(0, -2) == doctest::Approx(-200.0));
        CHECK(change_rate(0, 0) == doctest::Approx(0.0));
        // Negative prev divides by |prev| so the sign tracks the move.
        CHECK(change_rate(-4, -2) == doctest::Approx(50.0));
        CHECK(change_rate(-2, -4) == doctest::Approx(-100.0));
    }
    SUBCASE("literal policy rejects a zero base") {
        CHECK(change_rate(100, 103, ChangeRatePolicy::Literal) == doctest::Approx(3.0));
        CHECK_THROWS_AS(change_rate(0, 2, ChangeRatePolicy::Literal), ValidationError);
    }
    SUBCASE("sign follows the direction of the move") {
        std::mt19937 rng(55);
        std::uniform_real_distribution<double> level(-100, 100);
        for (int i = 0; i < 300; ++i) {
            double prev = level(rng), cur = level(rng);
            double r = change_rate(prev, cur);
            if (cur > prev) CHECK(r > 0);
            else if (cur < prev) CHECK(r < 0);
            else CHECK(r == 0);
        }
    }
}

TEST_CASE("normalize_series maps onto [-1, 1] with endpoints pinned") {
    auto out = normalize_series({-5, 0, 5});
    REQUIRE(out.size() == 3);
    CHECK(out[0] == doctest::Approx(-1.0));
    CHECK(out[1] == doctest::Approx(0.0));
    CHECK(out[2] == doctest::Approx(1.0));

    auto skew = normalize_series({2, 4, 6});
    CHECK(skew[0] == doctest::Approx(-1.0));
    CHECK(skew[1] == doctest::Approx(0.0));
    CHECK(skew[2] == doctest::Approx(1.0));

    auto constant = normalize_series({7, 7, 7});
    for (double v : constant) CHECK(v == doctest::Approx(0.0));

    CHECK_THROWS_AS(normalize_series({}), ValidationError);

    SUBCASE("random series stay in range, min at -1, max at +1") {
        std::mt19937 rng(31337);
        std::uniform_real_distribution<double> value(-50, 50);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> xs(2 + rng() % 40);
            for (auto& x : xs) x = value(rng);
            auto norm = normalize_series(xs);
            const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
            if (*mn == *mx) continue;
            for (double v : norm) {
                CHECK(v >= -1.0);
                CHECK(v <= 1.0);
            }
            CHECK(norm[mn - xs.begin()] == doctest::Approx(-1.0));
            CHECK(norm[mx - xs.begin()] == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("scale_unit maps onto [0, 1]") {
    auto out = scale_unit({2, 4, 6});
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[1] == doctest::Approx(0.5));
    CHECK(out[2] == doctest::Approx(1.0));

    auto constant = scale_unit({3, 3});
    CHECK(constant[0] == doctest::Approx(0.5));
    CHECK(constant[1] == doctest::Approx(0.5));

    CHECK_THROWS_AS(scale_unit({}), ValidationError);
}

TEST_CASE("prefix-fitted normalization clamps the tail") {
    // Fit on the first 3 values (range 0..10); later values exceed the range
    // and must clamp instead of rescaling the whole series.
    auto out = normalize_series_fit_prefix({0, 5, 10, 20, -10}, 3);
    CHECK(out[0] == doctest::Approx(-1.0));
    CHECK(out[1] == doctest::Approx(0.0));
    CHECK(out[2] == doctest::Approx(1.0));
    CHECK(out[3] == doctest::Approx(1.0));   // clamped high
    CHECK(out[4] == doctest::Approx(-1.0));  // clamped low

    CHECK_THROWS_AS(normalize_series_fit_prefix({1, 2}, 0), ValidationError);
    CHECK_THROWS_AS(normalize_series_fit_prefix({1, 2}, 3), ValidationError);

    SUBCASE("constant prefix maps everything to zero") {
        auto z = normalize_series_fit_prefix({4, 4, 9}, 2);
        for (double v : z) CHECK(v == doctest::Approx(0.0));
    }
    SUBCASE("full-length prefix equals plain normalization") {
        std::vector<double> xs{3, -2, 8, 0};
        auto a = normalize_series_fit_prefix(xs, xs.size());
        auto b = normalize_series(xs);
        for (std::size_t i = 0; i < xs.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]));
    }
}

TEST_CASE("change series drops the first day and normalizes the rates") {
    std::vector<Date> dates{Date::parse("2019-04-01"), Date::parse("2019-04-02"),
                            Date::parse("2019-04-03"), Date::parse("2019-04-04")};
    std::vector<double> levels{100, 103, 103, 98};

    auto series = make_change_series(dates, levels);
    REQUIRE(series.size() == 3);  // one shorter than the input
    CHECK(series[0].date == dates[1]);
    CHECK(series[0].raw == doctest::Approx(103));
    CHECK(series[0].change_rate == doctest::Approx(3.0));
    CHECK(series[1].change_rate == doctest::Approx(0.0));
    CHECK(series[2].change_rate == doctest::Approx(100.0 * (98 - 103) / 103));

    // Normalized column is the min-max map of the three rates.
    CHECK(series[0].normalized == doctest::Approx(1.0));   // 3.0 is the max
    CHECK(series[2].normalized == doctest::Approx(-1.0));  // the drop is the min

    SUBCASE("zero level with the fallback policy") {
        auto fb = make_change_series({dates[0], dates[1]}, {0, 2});
        REQUIRE(fb.size() == 1);
        CHECK(fb[0].change_rate == doctest::Approx(200.0));
    }
    SUBCASE("literal policy propagates the error") {
        CHECK_THROWS_AS(
            make_change_series({dates[0], dates[1]}, {0, 2}, ChangeRatePolicy::Literal),
            ValidationError);
    }
    SUBCASE("length mismatch and short input rejected") {
        CHECK_THROWS_AS(make_change_series(dates, {1, 2}), ValidationError);
        CHECK_THROWS_AS(make_change_series({dates[0]}, {1}), ValidationError);
    }
}
