#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentistock/dataset.hpp"
#include "sentistock/models.hpp"

namespace sentistock {

// Sample Pearson correlation; nullopt when either side has zero variance.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

struct ExperimentConfig {
    std::string market;
    Direction direction = Direction::ArticleToStock;
    TaskKind task = TaskKind::Regression;
    WindowSpec window;
    ModelKind model = ModelKind::LR;
    bool include_aux = true;
    bool drop_zero_labels = false;
    std::uint64_t seed = 1;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::optional<double> correlation;  // nullopt: constant predictions or targets
    std::optional<double> sign_accuracy;  // classification diagnostic only
    int n_test = 0;
};

// Hyperparameters for one cell: base values, a seed derived from cfg.seed and
// the cell identity (so results never depend on evaluation order), and the
// split-candidate rule matching the target type.
Hyperparams cell_hyperparams(const ExperimentConfig& cfg, const Hyperparams& base_hp = {});

// Fit on the chronological train split, predict the test split, correlate raw
// predictions with targets.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const MarketSeries& data,
                                const Hyperparams& base_hp = {});

struct GridSpec {
    std::vector<std::string> markets;
    std::vector<Direction> directions{Direction::ArticleToStock, Direction::StockToArticle};
    std::vector<TaskKind> tasks{TaskKind::Regression, TaskKind::Classification};
    std::vector<WindowSpec> windows;
    std::vector<ModelKind> models{ModelKind::GP, ModelKind::LR, ModelKind::MLP,
                                  ModelKind::SMOREG, ModelKind::RF};
    bool include_aux = true;
    bool drop_zero_labels = false;
    std::uint64_t seed = 1;
};

struct ReportCell {
    std::optional<double> correlation;
    std::optional<double> sign_accuracy;
    int n_test = 0;
    bool failed = false;
    std::string error;
};

struct ReportRow {
    TaskKind task = TaskKind::Regression;
    WindowSpec window;
    Direction direction = Direction::ArticleToStock;
    std::string market;
    std::vector<ReportCell> cells;         // one per model column
    std::optional<double> average;         // over defined, non-failed cells
    int undefined_cells = 0;
};

struct ReportTable {
    std::vector<ModelKind> models;  // column order
    std::vector<ReportRow> rows;
    // Window label -> mean over every defined cell with that window.
    std::vector<std::pair<std::string, std::optional<double>>> window_grand_averages;
    int total_undefined = 0;
    int total_failed = 0;
};

using SeriesBundle = std::map<std::string, MarketSeries>;

// Every (task, window, direction, market) row times every model column; cell
// failures are recorded in place and never abort the rest of the grid.
ReportTable run_grid(const GridSpec& grid, const SeriesBundle& data,
                     const Hyperparams& base_hp = {});

void format_report_text(const ReportTable& table, std::ostream& out);
// One line per cell: task,window,direction,market,model,correlation,n_test.
void write_report_csv(const ReportTable& table, std::ostream& out);

struct AblationResult {
    ReportTable with_aux;
    ReportTable without_aux;
    std::optional<double> grand_average_with;
    std::optional<double> grand_average_without;
};

// The grid run twice, with and without the aux features.
AblationResult ablation(const GridSpec& grid, const SeriesBundle& data,
                        const Hyperparams& base_hp = {});

struct SynthParams {
    std::uint64_t seed = 1;
    int n_days = 120;
    int lag = 1;
    double coupling = 0.9;
    double noise_sd = 0.1;
};

// Synthetic market where article sentiment echoes the stock change rate `lag`
// publication days earlier; the one-day publication shift is applied on top,
// like the real collection model. Raw levels are kept so the bundle can be
// serialized and replayed through the dataset stages.
struct SyntheticBundle {
    std::vector<Date> dates;  // trading days
    std::vector<double> stock_close;
    std::vector<double> sentiment_score;
    std::vector<double> volume;
    std::vector<double> article_count;
    MarketSeries series;
};

SyntheticBundle gen_synthetic(const SynthParams& params);

// Plot data mirroring the normalized stock-vs-sentiment comparison curves:
// date,stock_norm,sent_norm.
void write_series_plot_csv(const MarketSeries& series, std::ostream& out);

// Full aligned-series table used as the stage interchange format:
// date,stock_raw,stock_rate,stock_norm,sent_raw,sent_rate,sent_norm,
// volume_scaled,count_scaled.
void write_market_series_csv(const MarketSeries& series, std::ostream& out);
MarketSeries read_market_series_csv(std::istream& in, const std::string& market);

}  // namespace sentistock
