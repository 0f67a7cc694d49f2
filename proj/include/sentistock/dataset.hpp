#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sentistock/date.hpp"
#include "sentistock/sentiment.hpp"

namespace sentistock {

// Lag window around the base date: [t - past_days, t] plus an optional t + 1.
struct WindowSpec {
    int past_days = 0;
    bool include_future_day = false;

    int span() const { return past_days + 1 + (include_future_day ? 1 : 0); }
    std::string label() const;
    // Compact config/file token: "5+1" (past 5 with future day), "0" (base only).
    std::string slug() const;
};

WindowSpec parse_window(const std::string& token);

enum class Direction {
    ArticleToStock,  // sentiment change + scaled article count -> stock change
    StockToArticle,  // stock change + scaled volume -> sentiment change
};

enum class TaskKind { Regression, Classification };

std::string direction_name(Direction d);
Direction direction_from_name(const std::string& name);
std::string task_name(TaskKind t);
TaskKind task_from_name(const std::string& name);

// Both change-rate series on one trading-date axis, plus the [0,1]-scaled
// auxiliary series. All vectors run parallel to `stock`/`sentiment` dates.
struct MarketSeries {
    std::string market;
    std::vector<SeriesPoint> stock;
    std::vector<SeriesPoint> sentiment;
    std::vector<double> volume_scaled;
    std::vector<double> count_scaled;

    std::size_t size() const { return stock.size(); }
};

// Derives a MarketSeries from per-trading-day levels: computes both change-rate
// series (dropping the first day), normalizes them, and unit-scales the aux
// columns over the remaining days.
MarketSeries make_market_series(const std::string& market, const std::vector<Date>& dates,
                                const std::vector<double>& stock_levels,
                                const std::vector<double>& sentiment_levels,
                                const std::vector<double>& volumes,
                                const std::vector<double>& article_counts,
                                ChangeRatePolicy policy = ChangeRatePolicy::FallbackAbs,
                                std::size_t normalize_fit_prefix = 0);

struct Instance {
    Date base_date;
    std::vector<double> x;
    double y = 0;
};

struct SupervisedDataset {
    std::vector<Instance> instances;  // chronological
    std::size_t split_index = 0;      // train = [0, split_index)
    std::vector<std::string> feature_names;
};

// -1 below zero, +1 above; exactly zero maps to +1 so labeling stays total.
double labelize(double rate);

// One instance per base date t with the full window in range. Features
// interleave, day by day, the driving series' normalized change rate and (when
// include_aux) its scaled companion column. Regression targets are the target
// series' normalized change rate at t; classification targets are the sign of
// the raw change rate at t. drop_zero_labels removes classification instances
// whose raw target rate is exactly zero instead of labeling them +1.
SupervisedDataset build_dataset(const MarketSeries& data, Direction dir, TaskKind task,
                                const WindowSpec& win, bool include_aux,
                                bool drop_zero_labels = false);

struct SplitView {
    std::span<const Instance> train;
    std::span<const Instance> test;
};

// Chronological 66/34 split; requires at least 3 instances.
SplitView split(const SupervisedDataset& ds);

// CSV export: header `base_date,f1..fk,target`.
void write_dataset_csv(const SupervisedDataset& ds, std::ostream& out);
void write_dataset_csv_file(const SupervisedDataset& ds, const std::string& path);
SupervisedDataset read_dataset_csv(std::istream& in);

}  // namespace sentistock
