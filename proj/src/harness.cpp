#include "sentistock/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "sentistock/error.hpp"
#include "sentistock/util.hpp"

namespace sentistock {

namespace {

std::string model_display_name(ModelKind k) {
    switch (k) {
        case ModelKind::GP: return "GPs";
        case ModelKind::LR: return "LR";
        case ModelKind::MLP: return "MLP";
        case ModelKind::SMOREG: return "SMOreg";
        case ModelKind::RF: return "RF";
    }
    return "?";
}

std::string cell_key(const ExperimentConfig& cfg) {
    return cfg.market + "|" + direction_name(cfg.direction) + "|" + task_name(cfg.task) + "|" +
           cfg.window.slug() + "|" + model_kind_name(cfg.model) + "|" +
           (cfg.include_aux ? "aux" : "noaux");
}

bool is_weekend(Date d) {
    const int since_epoch = d - Date::from_ymd(1970, 1, 1);  // 1970-01-01 was a Thursday
    const int dow = since_epoch % 7;
    return dow == 2 || dow == 3;
}

Date next_trading_day(Date d) {
    Date n = d.plus_days(1);
    while (is_weekend(n)) n = n.plus_days(1);
    return n;
}

}  // namespace

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ValidationError("pearson: length mismatch (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    const std::size_t n = a.size();
    if (n < 2) throw ValidationError("pearson: need at least 2 points");

    double mean_a = 0, mean_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);

    double cov = 0, var_a = 0, var_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) return std::nullopt;
    return cov / std::sqrt(var_a * var_b);
}

Hyperparams cell_hyperparams(const ExperimentConfig& cfg, const Hyperparams& base_hp) {
    Hyperparams hp = base_hp;
    hp.seed = splitmix64(cfg.seed ^ fnv1a64(cell_key(cfg)));
    hp.rf_feature_rule =
        cfg.task == TaskKind::Classification ? RfFeatureRule::Sqrt : RfFeatureRule::Third;
    return hp;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const MarketSeries& data,
                                const Hyperparams& base_hp) {
    SupervisedDataset ds = build_dataset(data, cfg.direction, cfg.task, cfg.window,
                                         cfg.include_aux, cfg.drop_zero_labels);
    const SplitView views = split(ds);

    Matrix train_x, test_x;
    std::vector<double> train_y, test_y;
    for (const Instance& inst : views.train) {
        train_x.push_back(inst.x);
        train_y.push_back(inst.y);
    }
    for (const Instance& inst : views.test) {
        test_x.push_back(inst.x);
        test_y.push_back(inst.y);
    }
    if (test_x.empty()) throw ValidationError("run_experiment: empty test split");

    const Hyperparams hp = cell_hyperparams(cfg, base_hp);
    const auto model = fit_model(cfg.model, train_x, train_y, hp);
    const std::vector<double> pred = model->predict(test_x);

    ExperimentResult result;
    result.config = cfg;
    result.correlation = pearson(pred, test_y);
    result.n_test = static_cast<int>(test_y.size());
    if (cfg.task == TaskKind::Classification) {
        int hits = 0;
        for (std::size_t i = 0; i < pred.size(); ++i)
            if (labelize(pred[i]) == test_y[i]) ++hits;
        result.sign_accuracy = static_cast<double>(hits) / static_cast<double>(pred.size());
    }
    return result;
}

ReportTable run_grid(const GridSpec& grid, const SeriesBundle& data,
                     const Hyperparams& base_hp) {
    if (grid.markets.empty() || grid.directions.empty() || grid.tasks.empty() ||
        grid.windows.empty() || grid.models.empty())
        throw ValidationError("run_grid: empty grid axis");

    ReportTable table;
    table.models = grid.models;

    std::map<std::string, std::pair<double, int>> window_sums;
    std::vector<std::string> window_order;
    for (const auto& win : grid.windows) {
        if (!window_sums.count(win.label())) window_order.push_back(win.label());
        window_sums[win.label()];
    }

    for (TaskKind task : grid.tasks) {
        for (const WindowSpec& win : grid.windows) {
            for (Direction dir : grid.directions) {
                for (const std::string& market : grid.markets) {
                    ReportRow row;
                    row.task = task;
                    row.window = win;
                    row.direction = dir;
                    row.market = market;

                    double sum = 0;
                    int defined = 0;
                    for (ModelKind model : grid.models) {
                        ExperimentConfig cfg{market,           dir,
                                             task,             win,
                                             model,            grid.include_aux,
                                             grid.drop_zero_labels, grid.seed};
                        ReportCell cell;
                        try {
                            const auto it = data.find(market);
                            if (it == data.end())
                                throw ValidationError("market '" + market +
                                                      "' not in series bundle");
                            ExperimentResult res = run_experiment(cfg, it->second, base_hp);
                            cell.correlation = res.correlation;
                            cell.sign_accuracy = res.sign_accuracy;
                            cell.n_test = res.n_test;
                            if (cell.correlation) {
                                sum += *cell.correlation;
                                ++defined;
                                auto& ws = window_sums[win.label()];
                                ws.first += *cell.correlation;
                                ws.second += 1;
                            } else {
                                ++row.undefined_cells;
                                ++table.total_undefined;
                            }
                        } catch (const std::exception& e) {
                            cell.failed = true;
                            cell.error = e.what();
                            ++table.total_failed;
                        }
                        row.cells.push_back(std::move(cell));
                    }
                    if (defined > 0) row.average = sum / defined;
                    table.rows.push_back(std::move(row));
                }
            }
        }
    }

    for (const auto& label : window_order) {
        const auto& [total, count] = window_sums[label];
        table.window_grand_averages.emplace_back(
            label, count > 0 ? std::optional<double>(total / count) : std::nullopt);
    }
    return table;
}

namespace {

std::string cell_text(const ReportCell& cell) {
    if (cell.failed) return "ERROR";
    if (!cell.correlation) return "UNDEF";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.3f", *cell.correlation);
    return buf;
}

}  // namespace

void format_report_text(const ReportTable& table, std::ostream& out) {
    std::size_t window_w = std::string("Window").size();
    std::size_t dir_w = std::string("Direction").size();
    std::size_t market_w = std::string("Market").size();
    for (const auto& row : table.rows) {
        window_w = std::max(window_w, row.window.label().size());
        dir_w = std::max(dir_w, direction_name(row.direction).size());
        market_w = std::max(market_w, row.market.size());
    }

    out << "Correlation report\n";
    out << "==================\n";

    TaskKind current = TaskKind::Regression;
    bool first_section = true;
    for (const auto& row : table.rows) {
        if (first_section || row.task != current) {
            current = row.task;
            out << "\n-- " << (current == TaskKind::Regression ? "Regression analysis"
                                                               : "Classification analysis")
                << " --\n";
            out << std::left << std::setw(static_cast<int>(window_w) + 2) << "Window"
                << std::setw(static_cast<int>(dir_w) + 2) << "Direction"
                << std::setw(static_cast<int>(market_w) + 2) << "Market";
            for (ModelKind m : table.models)
                out << std::setw(9) << model_display_name(m);
            out << std::setw(9) << "Average" << "\n";
            first_section = false;
        }
        out << std::left << std::setw(static_cast<int>(window_w) + 2) << row.window.label()
            << std::setw(static_cast<int>(dir_w) + 2) << direction_name(row.direction)
            << std::setw(static_cast<int>(market_w) + 2) << row.market;
        for (const auto& cell : row.cells) out << std::setw(9) << cell_text(cell);
        if (row.average) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%+.3f", *row.average);
            out << std::setw(9) << buf;
        } else {
            out << std::setw(9) << "UNDEF";
        }
        out << "\n";
    }

    out << "\nWindow grand averages (defined cells across tasks, directions, markets):\n";
    for (const auto& [label, avg] : table.window_grand_averages) {
        out << "  " << std::left << std::setw(static_cast<int>(window_w) + 2) << label;
        if (avg) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%+.3f", *avg);
            out << buf;
        } else {
            out << "UNDEF";
        }
        out << "\n";
    }
    if (table.total_undefined > 0)
        out << "\n" << table.total_undefined
            << " undefined cell(s) (constant test-side series) excluded from averages.\n";
    if (table.total_failed > 0) {
        out << "\n" << table.total_failed << " cell(s) failed:\n";
        for (const auto& row : table.rows)
            for (std::size_t i = 0; i < row.cells.size(); ++i)
                if (row.cells[i].failed)
                    out << "  " << task_name(row.task) << "/" << row.window.slug() << "/"
                        << direction_name(row.direction) << "/" << row.market << "/"
                        << model_kind_name(table.models[i]) << ": " << row.cells[i].error
                        << "\n";
    }
}

void write_report_csv(const ReportTable& table, std::ostream& out) {
    out << "task,window,direction,market,model,correlation,n_test\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.cells.size(); ++i) {
            const ReportCell& cell = row.cells[i];
            out << task_name(row.task) << ',' << row.window.label() << ','
                << direction_name(row.direction) << ',' << row.market << ','
                << model_kind_name(table.models[i]) << ',';
            if (cell.failed) out << "ERROR";
            else if (!cell.correlation) out << "UNDEFINED";
            else out << format_g17(*cell.correlation);
            out << ',' << cell.n_test << '\n';
        }
    }
}

namespace {

std::optional<double> table_grand_average(const ReportTable& table) {
    double sum = 0;
    int count = 0;
    for (const auto& row : table.rows)
        for (const auto& cell : row.cells)
            if (!cell.failed && cell.correlation) {
                sum += *cell.correlation;
                ++count;
            }
    if (count == 0) return std::nullopt;
    return sum / count;
}

}  // namespace

AblationResult ablation(const GridSpec& grid, const SeriesBundle& data,
                        const Hyperparams& base_hp) {
    AblationResult result;
    GridSpec with = grid;
    with.include_aux = true;
    GridSpec without = grid;
    without.include_aux = false;
    result.with_aux = run_grid(with, data, base_hp);
    result.without_aux = run_grid(without, data, base_hp);
    result.grand_average_with = table_grand_average(result.with_aux);
    result.grand_average_without = table_grand_average(result.without_aux);
    return result;
}

SyntheticBundle gen_synthetic(const SynthParams& params) {
    if (params.lag < 0) throw ValidationError("gen_synthetic: lag must be >= 0");
    if (params.n_days <= params.lag + 10)
        throw ValidationError("gen_synthetic: n_days must exceed lag + 10");
    if (params.noise_sd < 0) throw ValidationError("gen_synthetic: noise_sd must be >= 0");

    const int n = params.n_days;
    std::mt19937_64 rng(splitmix64(params.seed));
    std::normal_distribution<double> pct(0.0, 2.0);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> vol(1e5, 1e6);
    std::uniform_int_distribution<int> articles(5, 30);

    // Percent change rates with pre-history so lagged sentiment is defined
    // from the first trading day.
    const int pre = params.lag + 2;
    std::vector<double> rho(static_cast<std::size_t>(n + pre));
    for (auto& r : rho) r = pct(rng);
    const auto rho_at = [&](int t) { return rho[static_cast<std::size_t>(t + pre)]; };

    SyntheticBundle bundle;
    Date day = Date::from_ymd(2019, 1, 2);
    for (int t = 0; t < n; ++t) {
        bundle.dates.push_back(day);
        day = next_trading_day(day);
    }

    bundle.stock_close.resize(static_cast<std::size_t>(n));
    bundle.stock_close[0] = 100.0;
    for (int t = 1; t < n; ++t)
        bundle.stock_close[static_cast<std::size_t>(t)] =
            bundle.stock_close[static_cast<std::size_t>(t - 1)] * (1.0 + rho_at(t) / 100.0);

    // Published score on day d echoes the stock move `lag` days earlier; the
    // big positive base keeps change rates small and sign-consistent with the
    // underlying move. The effective series the pipeline would see shifts
    // publication forward one day, so day t carries the score published at t-1.
    const double base = 100.0;
    const double gain = params.coupling * 10.0;
    std::vector<double> published(static_cast<std::size_t>(n + 1));
    for (int d = -1; d < n; ++d)
        published[static_cast<std::size_t>(d + 1)] =
            base + gain * rho_at(d - params.lag) + params.noise_sd * unit(rng);

    bundle.sentiment_score.resize(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
        bundle.sentiment_score[static_cast<std::size_t>(t)] =
            published[static_cast<std::size_t>(t)];  // published at t-1, effective at t

    bundle.volume.resize(static_cast<std::size_t>(n));
    bundle.article_count.resize(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        bundle.volume[static_cast<std::size_t>(t)] = std::floor(vol(rng));
        bundle.article_count[static_cast<std::size_t>(t)] = articles(rng);
    }

    bundle.series = make_market_series("synthetic", bundle.dates, bundle.stock_close,
                                       bundle.sentiment_score, bundle.volume,
                                       bundle.article_count);
    return bundle;
}

void write_series_plot_csv(const MarketSeries& series, std::ostream& out) {
    out << "date,stock_norm,sent_norm\n";
    for (std::size_t i = 0; i < series.size(); ++i)
        out << series.stock[i].date.to_string() << ',' << format_g17(series.stock[i].normalized)
            << ',' << format_g17(series.sentiment[i].normalized) << '\n';
}

void write_market_series_csv(const MarketSeries& series, std::ostream& out) {
    out << "date,stock_raw,stock_rate,stock_norm,sent_raw,sent_rate,sent_norm,"
           "volume_scaled,count_scaled\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.stock[i].date.to_string() << ',' << format_g17(series.stock[i].raw) << ','
            << format_g17(series.stock[i].change_rate) << ','
            << format_g17(series.stock[i].normalized) << ','
            << format_g17(series.sentiment[i].raw) << ','
            << format_g17(series.sentiment[i].change_rate) << ','
            << format_g17(series.sentiment[i].normalized) << ','
            << format_g17(series.volume_scaled[i]) << ',' << format_g17(series.count_scaled[i])
            << '\n';
    }
}

MarketSeries read_market_series_csv(std::istream& in, const std::string& market) {
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("series csv: empty input");
    if (line != "date,stock_raw,stock_rate,stock_norm,sent_raw,sent_rate,sent_norm,"
                "volume_scaled,count_scaled")
        throw ValidationError("series csv: unexpected header");

    MarketSeries ms;
    ms.market = market;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 9)
            throw ValidationError("series csv: line " + std::to_string(line_no) +
                                  ": expected 9 fields");
        const auto num = [&](const std::string& s) {
            try {
                return std::stod(s);
            } catch (const std::exception&) {
                throw ValidationError("series csv: line " + std::to_string(line_no) +
                                      ": bad number '" + s + "'");
            }
        };
        SeriesPoint stock{Date::parse(fields[0]), num(fields[1]), num(fields[2]),
                          num(fields[3])};
        SeriesPoint sent{stock.date, num(fields[4]), num(fields[5]), num(fields[6])};
        ms.stock.push_back(stock);
        ms.sentiment.push_back(sent);
        ms.volume_scaled.push_back(num(fields[7]));
        ms.count_scaled.push_back(num(fields[8]));
    }
    return ms;
}

}  // namespace sentistock
