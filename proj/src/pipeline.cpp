#include "sentistock/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "sentistock/dataset.hpp"
#include "sentistock/error.hpp"
#include "sentistock/features.hpp"
#include "sentistock/harness.hpp"
#include "sentistock/models.hpp"
#include "sentistock/sentiment.hpp"
#include "sentistock/textprep.hpp"
#include "sentistock/util.hpp"

namespace sentistock {
namespace {

namespace fs = std::filesystem;

void require_artifact(const fs::path& path, const std::string& producer) {
    if (!fs::exists(path))
        throw IoError(path.string() + " not found; run the '" + producer + "' stage first");
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void write_articles_jsonl(const std::vector<Article>& articles, const fs::path& path) {
    std::ofstream out = open_out(path);
    for (const Article& a : articles) {
        nlohmann::json j;
        j["source"] = a.source;
        j["url"] = a.url;
        j["published_date"] = a.published_date.to_string();
        j["title"] = a.title;
        j["body"] = a.body;
        out << j.dump() << "\n";
    }
}

void write_stock_csv(const StockSeries& series, const fs::path& path) {
    std::ofstream out = open_out(path);
    out << "date,open,high,low,close,volume\n";
    for (const StockBar& bar : series.bars) {
        out << bar.date.to_string() << ',' << format_g17(bar.open) << ','
            << format_g17(bar.high) << ',' << format_g17(bar.low) << ','
            << format_g17(bar.close) << ',' << format_g17(bar.volume) << '\n';
    }
}

void sort_articles(std::vector<Article>& articles) {
    std::sort(articles.begin(), articles.end(), [](const Article& a, const Article& b) {
        if (a.published_date != b.published_date) return a.published_date < b.published_date;
        return a.id < b.id;
    });
}

// Per-day top TF-IDF terms, one row per kept term.
void write_terms_csv(const std::map<Date, std::vector<TermScore>>& by_day,
                     const fs::path& path) {
    std::ofstream out = open_out(path);
    out << "date,term,tfidf,freq\n";
    for (const auto& [date, terms] : by_day)
        for (const TermScore& t : terms)
            out << date.to_string() << ',' << t.term << ',' << format_g17(t.tfidf) << ','
                << t.freq << '\n';
}

std::map<Date, std::vector<std::string>> read_terms_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "date,term,tfidf,freq")
        throw ValidationError(path.string() + ": expected header date,term,tfidf,freq");
    std::map<Date, std::vector<std::string>> by_day;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 4)
            throw ValidationError(path.string() + ": line " + std::to_string(line_no) +
                                  ": expected 4 fields");
        by_day[Date::parse(fields[0])].push_back(fields[1]);
    }
    return by_day;
}

}  // namespace

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {}

std::string Pipeline::artifact_path(const std::string& name) const {
    return (fs::path(cfg_.out_dir) / name).string();
}

void Pipeline::stage_ingest() {
    if (cfg_.markets.empty())
        throw ConfigError("ingest: config declares no [market:NAME] sections");
    fs::create_directories(cfg_.out_dir);
    for (const MarketConfig& m : cfg_.markets) {
        if (m.news_files.empty())
            throw ConfigError("ingest: [market:" + m.name + "] has no news files");
        if (m.stock_files.empty())
            throw ConfigError("ingest: [market:" + m.name + "] has no stock files");

        std::vector<Article> articles;
        for (const std::string& file : m.news_files) {
            std::vector<Article> part = load_articles(file, m.name, m.date_shift);
            articles.insert(articles.end(), part.begin(), part.end());
        }
        sort_articles(articles);
        // Merging several feeds can repeat a URL; keep the first copy only.
        std::unordered_set<std::string> seen;
        std::vector<Article> unique;
        for (Article& a : articles)
            if (seen.insert(a.id).second) unique.push_back(std::move(a));
        write_articles_jsonl(unique, artifact_path(m.name + "_articles.jsonl"));

        std::vector<StockSeries> parts;
        for (const std::string& file : m.stock_files)
            parts.push_back(load_stock_csv(file, m.name));
        write_stock_csv(composite_close(parts), artifact_path(m.name + "_stock.csv"));
    }
}

void Pipeline::stage_prep() {
    if (cfg_.markets.empty())
        throw ConfigError("prep: config declares no [market:NAME] sections");
    fs::create_directories(cfg_.out_dir);
    for (const MarketConfig& m : cfg_.markets) {
        const fs::path in_path = artifact_path(m.name + "_articles.jsonl");
        require_artifact(in_path, "ingest");
        std::vector<Article> articles = load_articles(in_path.string(), m.name, m.date_shift);

        articles = length_filter(articles, cfg_.min_chars, cfg_.max_chars);
        sort_articles(articles);
        articles = dedup_by_title(articles, cfg_.dedup_threshold);
        const std::vector<ScoredArticle> kept =
            keyword_filter(score_articles(articles, m.aliases), m.min_keyword_count);

        std::map<Date, std::vector<ScoredArticle>> by_day;
        for (const ScoredArticle& sa : kept) by_day[sa.article.effective_date].push_back(sa);

        std::vector<Article> selected;
        for (const auto& [date, day_articles] : by_day)
            for (const ScoredArticle& sa : select_top(day_articles, cfg_.top_k_articles))
                selected.push_back(sa.article);
        sort_articles(selected);
        write_articles_jsonl(selected, artifact_path(m.name + "_selected.jsonl"));
    }
}

void Pipeline::stage_features() {
    if (cfg_.markets.empty())
        throw ConfigError("features: config declares no [market:NAME] sections");
    if (cfg_.tagger_lexicon_path.empty() || cfg_.irregular_lemmas_path.empty() ||
        cfg_.stopwords_path.empty())
        throw ConfigError("features: assets.tagger_lexicon, assets.irregular_lemmas and "
                          "assets.stopwords must be configured");
    fs::create_directories(cfg_.out_dir);

    const LexiconSuffixTagger tagger = LexiconSuffixTagger::load(cfg_.tagger_lexicon_path);
    const Lemmatizer lemmatizer = Lemmatizer::load(cfg_.irregular_lemmas_path);
    const std::set<std::string> stoplist = load_stopwords(cfg_.stopwords_path);
    EmbeddingTable table;
    if (!cfg_.embeddings_path.empty())
        table = load_embeddings(cfg_.embeddings_path, cfg_.embeddings_format);

    for (const MarketConfig& m : cfg_.markets) {
        const fs::path in_path = artifact_path(m.name + "_selected.jsonl");
        require_artifact(in_path, "prep");
        const std::vector<Article> selected =
            load_articles(in_path.string(), m.name, m.date_shift);

        std::vector<Candidate> all_candidates;
        std::vector<DocTerms> docs;
        for (const Article& a : selected) {
            CleanArticle doc;
            doc.article_id = a.id;
            doc.date = a.effective_date;
            doc.tokens = tokenize_and_tag(clean_text(a.body), tagger);
            doc.lemmas.reserve(doc.tokens.size());
            for (const Token& tok : doc.tokens)
                doc.lemmas.push_back(lemmatizer.lemma(tok.text, tok.pos));

            std::vector<Candidate> cands = extract_candidates(doc, cfg_.candidate_max_len);
            cands = stopword_filter(cands, stoplist);

            DocTerms dt;
            dt.article_id = a.id;
            dt.date = a.effective_date;
            for (const Candidate& c : cands) dt.counts[phrase_key(c.phrase)] += c.freq;
            docs.push_back(std::move(dt));
            all_candidates.insert(all_candidates.end(), cands.begin(), cands.end());
        }

        const std::vector<SynonymCluster> clusters =
            cluster_synonyms(all_candidates, table, cfg_.tau);
        const TermCorpus corpus = build_term_corpus(docs, canonical_map(clusters));

        std::map<Date, std::vector<TermScore>> by_day;
        for (const auto& [date, tf] : corpus.day_tf)
            by_day[date] = select_terms(day_scores(corpus, date), cfg_.tfidf_top_k);
        write_terms_csv(by_day, artifact_path(m.name + "_terms.csv"));
    }
}

void Pipeline::stage_sentiment() {
    if (cfg_.markets.empty())
        throw ConfigError("sentiment: config declares no [market:NAME] sections");
    if (cfg_.lexicon_positive_path.empty() || cfg_.lexicon_negative_path.empty())
        throw ConfigError("sentiment: lexicon.positive and lexicon.negative must be configured");
    fs::create_directories(cfg_.out_dir);

    const Lexicon lex = load_lexicon(cfg_.lexicon_positive_path, cfg_.lexicon_negative_path);

    // Document mode rescans article bodies instead of the selected terms.
    LexiconSuffixTagger tagger;
    Lemmatizer lemmatizer;
    if (cfg_.sentiment_mode == SentimentMode::Document) {
        if (cfg_.tagger_lexicon_path.empty() || cfg_.irregular_lemmas_path.empty())
            throw ConfigError("sentiment: document mode needs assets.tagger_lexicon and "
                              "assets.irregular_lemmas");
        tagger = LexiconSuffixTagger::load(cfg_.tagger_lexicon_path);
        lemmatizer = Lemmatizer::load(cfg_.irregular_lemmas_path);
    }

    for (const MarketConfig& m : cfg_.markets) {
        const fs::path stock_path = artifact_path(m.name + "_stock.csv");
        const fs::path selected_path = artifact_path(m.name + "_selected.jsonl");
        require_artifact(stock_path, "ingest");
        require_artifact(selected_path, "prep");
        const StockSeries stock = load_stock_csv(stock_path.string(), m.name);
        const std::vector<Article> selected =
            load_articles(selected_path.string(), m.name, m.date_shift);

        std::map<Date, std::vector<std::string>> terms_by_day;
        if (cfg_.sentiment_mode == SentimentMode::Terms) {
            const fs::path terms_path = artifact_path(m.name + "_terms.csv");
            require_artifact(terms_path, "features");
            terms_by_day = read_terms_csv(terms_path);
        } else {
            for (const Article& a : selected) {
                auto& day_terms = terms_by_day[a.effective_date];
                for (const Token& tok : tokenize_and_tag(clean_text(a.body), tagger))
                    day_terms.push_back(lemmatizer.lemma(tok.text, tok.pos));
            }
        }
        std::map<Date, long> counts_by_day;
        for (const Article& a : selected) counts_by_day[a.effective_date] += 1;

        // Trading-day axis from the composite close; text days that fall on
        // non-trading dates roll to the next session or drop, per policy.
        std::vector<Date> dates;
        std::vector<double> closes, volumes;
        for (const StockBar& bar : stock.bars) {
            dates.push_back(bar.date);
            closes.push_back(bar.close);
            volumes.push_back(bar.volume);
        }
        std::vector<double> scores(dates.size(), 0.0);
        std::vector<double> counts(dates.size(), 0.0);
        for (const auto& [day, article_count] : counts_by_day) {
            const auto it = std::lower_bound(dates.begin(), dates.end(), day);
            if (it == dates.end()) continue;
            if (*it != day && cfg_.weekend_policy == WeekendPolicy::Drop) continue;
            const auto idx = static_cast<std::size_t>(it - dates.begin());
            const auto terms_it = terms_by_day.find(day);
            const std::vector<std::string> empty;
            const DailySentiment ds = daily_sentiment(
                day, terms_it == terms_by_day.end() ? empty : terms_it->second,
                article_count, lex);
            scores[idx] += static_cast<double>(ds.score);
            counts[idx] += static_cast<double>(ds.article_count);
        }

        const std::size_t prefix =
            cfg_.normalize_train_only && dates.size() > 1 ? (dates.size() - 1) * 66 / 100 : 0;
        const MarketSeries series =
            make_market_series(m.name, dates, closes, scores, volumes, counts,
                               cfg_.change_rate_policy, prefix);
        std::ofstream out = open_out(artifact_path(m.name + "_series.csv"));
        write_market_series_csv(series, out);
    }
}

void Pipeline::stage_dataset() {
    if (cfg_.markets.empty())
        throw ConfigError("dataset: config declares no [market:NAME] sections");
    if (cfg_.grid.windows.empty())
        throw ConfigError("dataset: config declares no grid.windows");
    fs::create_directories(fs::path(cfg_.out_dir) / "datasets");

    for (const MarketConfig& m : cfg_.markets) {
        const fs::path series_path = artifact_path(m.name + "_series.csv");
        require_artifact(series_path, "sentiment");
        std::ifstream in(series_path);
        if (!in) throw IoError("cannot open " + series_path.string());
        const MarketSeries series = read_market_series_csv(in, m.name);

        for (TaskKind task : cfg_.grid.tasks) {
            for (const WindowSpec& win : cfg_.grid.windows) {
                for (Direction dir : cfg_.grid.directions) {
                    const SupervisedDataset ds =
                        build_dataset(series, dir, task, win, cfg_.grid.include_aux,
                                      cfg_.drop_zero_labels);
                    const std::string name = m.name + "_" + task_name(task) + "_" +
                                             win.slug() + "_" + direction_name(dir) + ".csv";
                    write_dataset_csv_file(ds, artifact_path("datasets/" + name));
                }
            }
        }
    }
}

void Pipeline::stage_train() {
    if (cfg_.markets.empty())
        throw ConfigError("train: config declares no [market:NAME] sections");
    if (cfg_.grid.windows.empty())
        throw ConfigError("train: config declares no grid.windows");
    fs::create_directories(fs::path(cfg_.out_dir) / "models");

    for (const MarketConfig& m : cfg_.markets) {
        for (TaskKind task : cfg_.grid.tasks) {
            for (const WindowSpec& win : cfg_.grid.windows) {
                for (Direction dir : cfg_.grid.directions) {
                    const std::string ds_name = m.name + "_" + task_name(task) + "_" +
                                                win.slug() + "_" + direction_name(dir) + ".csv";
                    const fs::path ds_path = artifact_path("datasets/" + ds_name);
                    require_artifact(ds_path, "dataset");
                    std::ifstream in(ds_path);
                    if (!in) throw IoError("cannot open " + ds_path.string());
                    const SupervisedDataset ds = read_dataset_csv(in);
                    const SplitView views = split(ds);

                    Matrix train_x;
                    std::vector<double> train_y;
                    for (const Instance& inst : views.train) {
                        train_x.push_back(inst.x);
                        train_y.push_back(inst.y);
                    }

                    for (ModelKind kind : cfg_.grid.models) {
                        ExperimentConfig cell;
                        cell.market = m.name;
                        cell.direction = dir;
                        cell.task = task;
                        cell.window = win;
                        cell.model = kind;
                        cell.include_aux = cfg_.grid.include_aux;
                        cell.drop_zero_labels = cfg_.drop_zero_labels;
                        cell.seed = cfg_.grid.seed;
                        const Hyperparams hp = cell_hyperparams(cell, cfg_.hp);
                        const auto model = fit_model(kind, train_x, train_y, hp);
                        const std::string name = m.name + "_" + task_name(task) + "_" +
                                                 win.slug() + "_" + direction_name(dir) + "_" +
                                                 model_kind_name(kind) + ".model";
                        save_model_file(*model, artifact_path("models/" + name));
                    }
                }
            }
        }
    }
}

void Pipeline::stage_report() {
    if (cfg_.markets.empty())
        throw ConfigError("report: config declares no [market:NAME] sections");
    if (cfg_.grid.windows.empty())
        throw ConfigError("report: config declares no grid.windows");
    fs::create_directories(cfg_.out_dir);

    SeriesBundle bundle;
    for (const MarketConfig& m : cfg_.markets) {
        const fs::path series_path = artifact_path(m.name + "_series.csv");
        require_artifact(series_path, "sentiment");
        std::ifstream in(series_path);
        if (!in) throw IoError("cannot open " + series_path.string());
        bundle.emplace(m.name, read_market_series_csv(in, m.name));
    }

    const ReportTable table = run_grid(cfg_.grid, bundle, cfg_.hp);
    {
        std::ofstream out = open_out(artifact_path("report.csv"));
        write_report_csv(table, out);
    }
    {
        std::ofstream out = open_out(artifact_path("report.txt"));
        format_report_text(table, out);
    }
}

void Pipeline::stage_synth() {
    fs::create_directories(cfg_.out_dir);
    const SyntheticBundle bundle = gen_synthetic(cfg_.synth);
    {
        std::ofstream out = open_out(artifact_path("synthetic_series.csv"));
        write_market_series_csv(bundle.series, out);
    }
    {
        std::ofstream out = open_out(artifact_path("synthetic_plot.csv"));
        write_series_plot_csv(bundle.series, out);
    }
}

void Pipeline::run_stage(const std::string& name) {
    if (name == "ingest") stage_ingest();
    else if (name == "prep") stage_prep();
    else if (name == "features") stage_features();
    else if (name == "sentiment") stage_sentiment();
    else if (name == "dataset") stage_dataset();
    else if (name == "train") stage_train();
    else if (name == "report") stage_report();
    else if (name == "synth") stage_synth();
    else throw ConfigError("unknown stage '" + name + "'");
}

void Pipeline::run_all() {
    for (const std::string& name : run_stage_order()) run_stage(name);
}

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names{"ingest", "prep",    "features", "sentiment",
                                                "dataset", "train",  "report",   "synth"};
    return names;
}

const std::vector<std::string>& run_stage_order() {
    static const std::vector<std::string> names{"ingest",  "prep",  "features", "sentiment",
                                                "dataset", "train", "report"};
    return names;
}

}  // namespace sentistock
