#include "sentistock/config.hpp"

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_set>

#include "sentistock/error.hpp"

namespace sentistock {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    std::ostringstream out;
    out << origin << ":" << line << ": " << msg;
    throw ConfigError(out.str());
}

// Context for typed value extraction; remembers which keys were consumed so
// leftovers can be reported as unknown.
class SectionReader {
public:
    SectionReader(const IniSection& section, const std::string& origin)
        : section_(section), origin_(origin) {}

    const IniEntry* find(const std::string& key) {
        const IniEntry* hit = nullptr;
        for (const auto& e : section_.entries) {
            if (e.key != key) continue;
            if (hit != nullptr)
                fail(origin_, e.line, "duplicate key '" + key + "' in [" + section_.name + "]");
            hit = &e;
        }
        if (hit != nullptr) used_.insert(key);
        return hit;
    }

    bool get_string(const std::string& key, std::string& out) {
        const IniEntry* e = find(key);
        if (e == nullptr) return false;
        if (e->value.empty()) fail(origin_, e->line, "key '" + key + "' has an empty value");
        out = e->value;
        return true;
    }

    bool get_list(const std::string& key, std::vector<std::string>& out) {
        const IniEntry* e = find(key);
        if (e == nullptr) return false;
        out = split_list(e->value);
        if (out.empty()) fail(origin_, e->line, "key '" + key + "' has an empty list value");
        return true;
    }

    bool get_double(const std::string& key, double& out) {
        const IniEntry* e = find(key);
        if (e == nullptr) return false;
        out = parse_double(*e);
        return true;
    }

    bool get_int(const std::string& key, int& out) {
        const IniEntry* e = find(key);
        if (e == nullptr) return false;
        const double v = parse_double(*e);
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            fail(origin_, e->line, "key '" + key + "' expects an integer, got '" + e->value + "'");
        out = i;
        return true;
    }

    bool get_uint64(const std::string& key, std::uint64_t& out) {
        const IniEntry* e = find(key);
        if (e == nullptr) return false;
        const std::string v = e->value;
        try {
            std::size_t pos = 0;
            const unsigned long long parsed = std::stoull(v, &pos);
            if (pos != v.size() || v[0] == '-') throw std::invalid_argument(v);
            out = parsed;
        } catch (const std::exception&) {
            fail(origin_, e->line,
                 "key '" + key + "' expects an unsigned integer, got '" + v + "'");
        }
        return true;
    }

    bool get_bool(const std::string& key, bool& out) {
        const IniEntry* e = find(key);
        if (e == nullptr) return false;
        if (e->value == "true" || e->value == "1") {
            out = true;
        } else if (e->value == "false" || e->value == "0") {
            out = false;
        } else {
            fail(origin_, e->line,
                 "key '" + key + "' expects true/false, got '" + e->value + "'");
        }
        return true;
    }

    // Call after all known keys were read.
    void reject_unknown() const {
        for (const auto& e : section_.entries) {
            if (!used_.contains(e.key))
                fail(origin_, e.line, "unknown key '" + e.key + "' in [" + section_.name + "]");
        }
    }

    const IniSection& section() const { return section_; }
    const std::string& origin() const { return origin_; }

private:
    double parse_double(const IniEntry& e) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(e.value, &pos);
            if (pos != e.value.size()) throw std::invalid_argument(e.value);
            return v;
        } catch (const std::exception&) {
            fail(origin_, e.line,
                 "key '" + e.key + "' expects a number, got '" + e.value + "'");
        }
    }

    const IniSection& section_;
    std::string origin_;
    std::unordered_set<std::string> used_;
};

template <typename Enum>
bool get_enum(SectionReader& r, const std::string& key,
              std::initializer_list<std::pair<const char*, Enum>> choices, Enum& out) {
    const IniEntry* e = r.find(key);
    if (e == nullptr) return false;
    for (const auto& [name, value] : choices) {
        if (e->value == name) {
            out = value;
            return true;
        }
    }
    std::string allowed;
    for (const auto& [name, value] : choices) {
        (void)value;
        if (!allowed.empty()) allowed += ", ";
        allowed += name;
    }
    fail(r.origin(), e->line,
         "key '" + key + "' must be one of {" + allowed + "}, got '" + e->value + "'");
}

std::string resolve_path(const std::filesystem::path& base_dir, const std::string& value) {
    std::filesystem::path p(value);
    if (p.is_relative()) p = base_dir / p;
    return p.lexically_normal().string();
}

void resolve_paths(const std::filesystem::path& base_dir, std::vector<std::string>& values) {
    for (auto& v : values) v = resolve_path(base_dir, v);
}

bool valid_market_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

void check_range(bool ok, const std::string& origin, const std::string& what) {
    if (!ok) throw ConfigError(origin + ": " + what);
}

void read_run(SectionReader& r, const std::filesystem::path& base_dir, RunConfig& cfg) {
    r.get_uint64("seed", cfg.seed);
    if (r.get_string("out_dir", cfg.out_dir))
        cfg.out_dir = resolve_path(base_dir, cfg.out_dir);
    r.reject_unknown();
}

void read_pipeline(SectionReader& r, RunConfig& cfg) {
    r.get_double("dedup_threshold", cfg.dedup_threshold);
    r.get_int("min_chars", cfg.min_chars);
    r.get_int("max_chars", cfg.max_chars);
    r.get_int("top_k_articles", cfg.top_k_articles);
    r.get_int("candidate_max_len", cfg.candidate_max_len);
    r.get_double("tau", cfg.tau);
    r.get_int("tfidf_top_k", cfg.tfidf_top_k);
    get_enum(r, "sentiment_mode",
             {std::pair{"terms", SentimentMode::Terms},
              std::pair{"document", SentimentMode::Document}},
             cfg.sentiment_mode);
    get_enum(r, "weekend_policy",
             {std::pair{"roll_forward", WeekendPolicy::RollForward},
              std::pair{"drop", WeekendPolicy::Drop}},
             cfg.weekend_policy);
    get_enum(r, "change_rate_policy",
             {std::pair{"fallback_abs", ChangeRatePolicy::FallbackAbs},
              std::pair{"literal", ChangeRatePolicy::Literal}},
             cfg.change_rate_policy);
    r.get_bool("normalize_train_only", cfg.normalize_train_only);
    r.get_bool("drop_zero_labels", cfg.drop_zero_labels);
    r.reject_unknown();
}

void read_grid(SectionReader& r, RunConfig& cfg) {
    std::vector<std::string> tokens;
    if (r.get_list("windows", tokens)) {
        cfg.grid.windows.clear();
        for (const auto& t : tokens) {
            try {
                cfg.grid.windows.push_back(parse_window(t));
            } catch (const Error& e) {
                fail(r.origin(), r.section().line, std::string(e.what()));
            }
        }
    }
    if (r.get_list("directions", tokens)) {
        cfg.grid.directions.clear();
        for (const auto& t : tokens) {
            try {
                cfg.grid.directions.push_back(direction_from_name(t));
            } catch (const Error& e) {
                fail(r.origin(), r.section().line, std::string(e.what()));
            }
        }
    }
    if (r.get_list("tasks", tokens)) {
        cfg.grid.tasks.clear();
        for (const auto& t : tokens) {
            try {
                cfg.grid.tasks.push_back(task_from_name(t));
            } catch (const Error& e) {
                fail(r.origin(), r.section().line, std::string(e.what()));
            }
        }
    }
    if (r.get_list("models", tokens)) {
        cfg.grid.models.clear();
        for (const auto& t : tokens) {
            try {
                cfg.grid.models.push_back(model_kind_from_name(t));
            } catch (const Error& e) {
                fail(r.origin(), r.section().line, std::string(e.what()));
            }
        }
    }
    r.get_bool("include_aux", cfg.grid.include_aux);
    r.reject_unknown();
}

void read_market(SectionReader& r, const std::filesystem::path& base_dir, RunConfig& cfg) {
    MarketConfig m;
    m.name = r.section().name.substr(std::string("market:").size());
    if (!valid_market_name(m.name))
        fail(r.origin(), r.section().line,
             "market name '" + m.name + "' must be non-empty [A-Za-z0-9_-]");
    for (const auto& other : cfg.markets) {
        if (other.name == m.name)
            fail(r.origin(), r.section().line, "duplicate market section '" + m.name + "'");
    }
    if (!r.get_list("aliases", m.aliases))
        fail(r.origin(), r.section().line,
             "[" + r.section().name + "] requires an aliases list");
    r.get_int("min_keyword_count", m.min_keyword_count);
    r.get_int("date_shift", m.date_shift);
    r.get_list("news", m.news_files);
    r.get_list("stock", m.stock_files);
    r.reject_unknown();
    const std::string origin = r.origin();
    check_range(m.min_keyword_count >= 1, origin,
                "[" + r.section().name + "] min_keyword_count must be >= 1");
    check_range(m.date_shift >= 0, origin,
                "[" + r.section().name + "] date_shift must be >= 0");
    resolve_paths(base_dir, m.news_files);
    resolve_paths(base_dir, m.stock_files);
    cfg.markets.push_back(std::move(m));
}

void read_assets(SectionReader& r, const std::filesystem::path& base_dir, RunConfig& cfg) {
    if (r.get_string("stopwords", cfg.stopwords_path))
        cfg.stopwords_path = resolve_path(base_dir, cfg.stopwords_path);
    if (r.get_string("tagger_lexicon", cfg.tagger_lexicon_path))
        cfg.tagger_lexicon_path = resolve_path(base_dir, cfg.tagger_lexicon_path);
    if (r.get_string("irregular_lemmas", cfg.irregular_lemmas_path))
        cfg.irregular_lemmas_path = resolve_path(base_dir, cfg.irregular_lemmas_path);
    r.reject_unknown();
}

void read_lexicon(SectionReader& r, const std::filesystem::path& base_dir, RunConfig& cfg) {
    if (r.get_string("positive", cfg.lexicon_positive_path))
        cfg.lexicon_positive_path = resolve_path(base_dir, cfg.lexicon_positive_path);
    if (r.get_string("negative", cfg.lexicon_negative_path))
        cfg.lexicon_negative_path = resolve_path(base_dir, cfg.lexicon_negative_path);
    r.reject_unknown();
}

void read_embeddings(SectionReader& r, const std::filesystem::path& base_dir, RunConfig& cfg) {
    if (r.get_string("path", cfg.embeddings_path))
        cfg.embeddings_path = resolve_path(base_dir, cfg.embeddings_path);
    get_enum(r, "format",
             {std::pair{"auto", EmbeddingFormat::Auto}, std::pair{"text", EmbeddingFormat::Text},
              std::pair{"binary", EmbeddingFormat::Binary}},
             cfg.embeddings_format);
    r.reject_unknown();
}

void read_models(SectionReader& r, RunConfig& cfg) {
    Hyperparams& hp = cfg.hp;
    r.get_double("gp_length_scale", hp.gp_length_scale);
    r.get_double("gp_noise", hp.gp_noise);
    r.get_double("lr_lambda", hp.lr_lambda);
    r.get_int("mlp_hidden", hp.mlp_hidden);
    r.get_double("mlp_learning_rate", hp.mlp_learning_rate);
    r.get_double("mlp_momentum", hp.mlp_momentum);
    r.get_int("mlp_epochs", hp.mlp_epochs);
    r.get_double("svr_c", hp.svr_c);
    r.get_double("svr_epsilon", hp.svr_epsilon);
    r.get_double("svr_tolerance", hp.svr_tolerance);
    get_enum(r, "svr_kernel",
             {std::pair{"linear", SvrKernel::Linear}, std::pair{"rbf", SvrKernel::Rbf}},
             hp.svr_kernel);
    r.get_double("svr_gamma", hp.svr_gamma);
    r.get_int("rf_trees", hp.rf_trees);
    get_enum(r, "rf_feature_rule",
             {std::pair{"sqrt", RfFeatureRule::Sqrt}, std::pair{"third", RfFeatureRule::Third},
              std::pair{"all", RfFeatureRule::All}},
             hp.rf_feature_rule);
    r.get_int("rf_min_leaf", hp.rf_min_leaf);
    r.get_bool("rf_bootstrap", hp.rf_bootstrap);
    r.reject_unknown();
}

void read_synth(SectionReader& r, RunConfig& cfg) {
    r.get_int("n_days", cfg.synth.n_days);
    r.get_int("lag", cfg.synth.lag);
    r.get_double("coupling", cfg.synth.coupling);
    r.get_double("noise_sd", cfg.synth.noise_sd);
    r.reject_unknown();
}

}  // namespace

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const std::size_t bar = value.find('|', start);
        const std::size_t end = bar == std::string::npos ? value.size() : bar;
        const std::string piece = trim(value.substr(start, end - start));
        if (!piece.empty()) out.push_back(piece);
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    return out;
}

std::vector<IniSection> parse_ini(std::istream& in, const std::string& origin) {
    std::vector<IniSection> sections;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(origin, line_no, "malformed section header '" + line + "'");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) fail(origin, line_no, "empty section name");
            sections.push_back(IniSection{name, {}, line_no});
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(origin, line_no, "expected 'key = value', got '" + line + "'");
        if (sections.empty())
            fail(origin, line_no, "key before any [section] header");
        IniEntry entry;
        entry.key = trim(line.substr(0, eq));
        entry.value = trim(line.substr(eq + 1));
        entry.line = line_no;
        if (entry.key.empty()) fail(origin, line_no, "empty key");
        sections.back().entries.push_back(std::move(entry));
    }
    return sections;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    const auto sections = parse_ini(in, path);
    const std::filesystem::path base_dir = std::filesystem::path(path).parent_path();

    RunConfig cfg;
    std::unordered_set<std::string> seen;
    for (const auto& section : sections) {
        const bool is_market = section.name.rfind("market:", 0) == 0;
        if (!is_market && !seen.insert(section.name).second)
            fail(path, section.line, "duplicate section [" + section.name + "]");
        SectionReader r(section, path);
        if (section.name == "run") {
            read_run(r, base_dir, cfg);
        } else if (section.name == "pipeline") {
            read_pipeline(r, cfg);
        } else if (section.name == "grid") {
            read_grid(r, cfg);
        } else if (is_market) {
            read_market(r, base_dir, cfg);
        } else if (section.name == "assets") {
            read_assets(r, base_dir, cfg);
        } else if (section.name == "lexicon") {
            read_lexicon(r, base_dir, cfg);
        } else if (section.name == "embeddings") {
            read_embeddings(r, base_dir, cfg);
        } else if (section.name == "models") {
            read_models(r, cfg);
        } else if (section.name == "synth") {
            read_synth(r, cfg);
        } else {
            fail(path, section.line, "unknown section [" + section.name + "]");
        }
    }

    check_range(cfg.dedup_threshold >= 0.0 && cfg.dedup_threshold <= 1.0, path,
                "pipeline.dedup_threshold must be in [0, 1]");
    check_range(cfg.min_chars >= 0, path, "pipeline.min_chars must be >= 0");
    check_range(cfg.max_chars >= cfg.min_chars, path,
                "pipeline.max_chars must be >= min_chars");
    check_range(cfg.top_k_articles >= 1, path, "pipeline.top_k_articles must be >= 1");
    check_range(cfg.candidate_max_len >= 1, path, "pipeline.candidate_max_len must be >= 1");
    check_range(cfg.tau >= 0.0 && cfg.tau <= 1.0, path, "pipeline.tau must be in [0, 1]");
    check_range(cfg.tfidf_top_k >= 1, path, "pipeline.tfidf_top_k must be >= 1");
    check_range(cfg.synth.n_days > cfg.synth.lag + 10, path,
                "synth.n_days must exceed synth.lag + 10");
    check_range(cfg.synth.lag >= 0, path, "synth.lag must be >= 0");
    check_range(cfg.synth.noise_sd >= 0.0, path, "synth.noise_sd must be >= 0");

    cfg.hp.seed = cfg.seed;
    cfg.synth.seed = cfg.seed;
    cfg.grid.seed = cfg.seed;
    cfg.grid.drop_zero_labels = cfg.drop_zero_labels;
    cfg.grid.markets.clear();
    for (const auto& m : cfg.markets) cfg.grid.markets.push_back(m.name);

    try {
        cfg.hp.validate();
    } catch (const Error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return cfg;
}

void validate_for_pipeline(const RunConfig& cfg) {
    if (cfg.markets.empty())
        throw ConfigError("config declares no [market:NAME] sections");
    if (cfg.grid.windows.empty())
        throw ConfigError("config declares no grid.windows");
    const auto require_file = [](const std::string& path, const std::string& what) {
        if (path.empty()) throw ConfigError("config is missing " + what);
        if (!std::filesystem::exists(path))
            throw ConfigError(what + " file not found: " + path);
    };
    require_file(cfg.stopwords_path, "assets.stopwords");
    require_file(cfg.tagger_lexicon_path, "assets.tagger_lexicon");
    require_file(cfg.irregular_lemmas_path, "assets.irregular_lemmas");
    require_file(cfg.lexicon_positive_path, "lexicon.positive");
    require_file(cfg.lexicon_negative_path, "lexicon.negative");
    for (const auto& market : cfg.markets) {
        if (market.news_files.empty())
            throw ConfigError("market:" + market.name + " declares no news files");
        if (market.stock_files.empty())
            throw ConfigError("market:" + market.name + " declares no stock files");
        for (const auto& f : market.news_files)
            require_file(f, "market:" + market.name + " news");
        for (const auto& f : market.stock_files)
            require_file(f, "market:" + market.name + " stock");
    }
    if (!cfg.embeddings_path.empty() && !std::filesystem::exists(cfg.embeddings_path))
        throw ConfigError("embeddings file not found: " + cfg.embeddings_path);
}

}  // namespace sentistock
