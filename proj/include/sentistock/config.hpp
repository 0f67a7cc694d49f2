#pragma once

#include <string>
#include <vector>

#include "sentistock/embeddings.hpp"
#include "sentistock/harness.hpp"
#include "sentistock/ingest.hpp"
#include "sentistock/sentiment.hpp"

namespace sentistock {

// Parsed INI-style file: [section] headers, key = value lines, '#' or ';'
// comments. '|' separates list values. Section and key order is preserved.
struct IniEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct IniSection {
    std::string name;
    std::vector<IniEntry> entries;
    int line = 0;
};

std::vector<IniSection> parse_ini(std::istream& in, const std::string& origin);
std::vector<std::string> split_list(const std::string& value);

enum class SentimentMode {
    Terms,     // score the day's TF-IDF-selected terms (default)
    Document,  // score every lemma of the day's selected articles
};

struct MarketConfig {
    std::string name;
    std::vector<std::string> aliases;
    int min_keyword_count = 1;
    int date_shift = 1;
    std::vector<std::string> news_files;
    std::vector<std::string> stock_files;
};

struct RunConfig {
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    double dedup_threshold = 0.8;
    int min_chars = 400;
    int max_chars = 20000;
    int top_k_articles = 25;
    int candidate_max_len = 4;
    double tau = 0.70;
    int tfidf_top_k = 50;
    SentimentMode sentiment_mode = SentimentMode::Terms;
    WeekendPolicy weekend_policy = WeekendPolicy::RollForward;
    ChangeRatePolicy change_rate_policy = ChangeRatePolicy::FallbackAbs;
    bool normalize_train_only = false;
    bool drop_zero_labels = false;

    std::vector<MarketConfig> markets;

    std::string stopwords_path;
    std::string tagger_lexicon_path;
    std::string irregular_lemmas_path;
    std::string lexicon_positive_path;
    std::string lexicon_negative_path;
    std::string embeddings_path;  // empty: synonym clustering degenerates to singletons
    EmbeddingFormat embeddings_format = EmbeddingFormat::Auto;

    GridSpec grid;
    Hyperparams hp;
    SynthParams synth;
};

// Parses and validates a config file. All relative paths are resolved against
// the config file's directory. Throws ConfigError naming the offending
// section/key/file.
RunConfig load_run_config(const std::string& path);

// File-existence and market checks needed before running the pipeline; synth
// generation alone does not need markets or assets.
void validate_for_pipeline(const RunConfig& cfg);

}  // namespace sentistock
