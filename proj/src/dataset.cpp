#include "sentistock/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sentistock/error.hpp"
#include "sentistock/util.hpp"

namespace sentistock {

std::string WindowSpec::label() const {
    std::string s;
    if (past_days > 0)
        s = "Past " + std::to_string(past_days) + " days + base date";
    else
        s = "Base date";
    if (include_future_day) s += " + future 1 day";
    return s;
}

std::string WindowSpec::slug() const {
    std::string s = std::to_string(past_days);
    if (include_future_day) s += "+1";
    return s;
}

WindowSpec parse_window(const std::string& token) {
    WindowSpec w;
    std::size_t used = 0;
    try {
        w.past_days = std::stoi(token, &used);
    } catch (const std::exception&) {
        throw ConfigError("bad window '" + token + "', expected e.g. '5+1' or '0'");
    }
    if (w.past_days < 0)
        throw ConfigError("bad window '" + token + "': past days must be >= 0");
    std::string rest = token.substr(used);
    if (rest == "+1")
        w.include_future_day = true;
    else if (!rest.empty())
        throw ConfigError("bad window '" + token + "', expected e.g. '5+1' or '0'");
    return w;
}

std::string direction_name(Direction d) {
    return d == Direction::ArticleToStock ? "articleToStock" : "stockToArticle";
}

Direction direction_from_name(const std::string& name) {
    if (name == "articleToStock") return Direction::ArticleToStock;
    if (name == "stockToArticle") return Direction::StockToArticle;
    throw ConfigError("unknown direction '" + name + "'");
}

std::string task_name(TaskKind t) {
    return t == TaskKind::Regression ? "regression" : "classification";
}

TaskKind task_from_name(const std::string& name) {
    if (name == "regression") return TaskKind::Regression;
    if (name == "classification") return TaskKind::Classification;
    throw ConfigError("unknown task '" + name + "'");
}

MarketSeries make_market_series(const std::string& market, const std::vector<Date>& dates,
                                const std::vector<double>& stock_levels,
                                const std::vector<double>& sentiment_levels,
                                const std::vector<double>& volumes,
                                const std::vector<double>& article_counts,
                                ChangeRatePolicy policy, std::size_t normalize_fit_prefix) {
    const std::size_t n = dates.size();
    if (stock_levels.size() != n || sentiment_levels.size() != n || volumes.size() != n ||
        article_counts.size() != n)
        throw ValidationError("make_market_series: level vectors differ in length");
    if (n < 2) throw ValidationError("make_market_series: need at least 2 trading days");

    MarketSeries ms;
    ms.market = market;
    ms.stock = make_change_series(dates, stock_levels, policy);
    ms.sentiment = make_change_series(dates, sentiment_levels, policy);
    if (normalize_fit_prefix > 0) {
        auto refit = [&](std::vector<SeriesPoint>& pts) {
            std::vector<double> rates(pts.size());
            for (std::size_t i = 0; i < pts.size(); ++i) rates[i] = pts[i].change_rate;
            auto norm = normalize_series_fit_prefix(rates, normalize_fit_prefix);
            for (std::size_t i = 0; i < pts.size(); ++i) pts[i].normalized = norm[i];
        };
        refit(ms.stock);
        refit(ms.sentiment);
    }
    ms.volume_scaled = scale_unit({volumes.begin() + 1, volumes.end()});
    ms.count_scaled = scale_unit({article_counts.begin() + 1, article_counts.end()});
    return ms;
}

double labelize(double rate) { return rate < 0 ? -1.0 : 1.0; }

SupervisedDataset build_dataset(const MarketSeries& data, Direction dir, TaskKind task,
                                const WindowSpec& win, bool include_aux,
                                bool drop_zero_labels) {
    const std::size_t n = data.size();
    if (data.sentiment.size() != n || data.volume_scaled.size() != n ||
        data.count_scaled.size() != n)
        throw ValidationError("build_dataset: series lengths differ");
    for (std::size_t i = 0; i < n; ++i)
        if (data.stock[i].date != data.sentiment[i].date)
            throw ValidationError("build_dataset: misaligned date axes at index " +
                                  std::to_string(i) + " (" + data.stock[i].date.to_string() +
                                  " vs " + data.sentiment[i].date.to_string() + ")");

    const int past = win.past_days;
    const int future = win.include_future_day ? 1 : 0;
    const std::size_t min_days = static_cast<std::size_t>(past + future + 1);
    if (n < min_days)
        throw ValidationError("build_dataset: window needs at least " +
                              std::to_string(min_days) + " aligned days, got " +
                              std::to_string(n));

    const std::vector<SeriesPoint>& drive =
        dir == Direction::ArticleToStock ? data.sentiment : data.stock;
    const std::vector<SeriesPoint>& target =
        dir == Direction::ArticleToStock ? data.stock : data.sentiment;
    const std::vector<double>& aux =
        dir == Direction::ArticleToStock ? data.count_scaled : data.volume_scaled;

    SupervisedDataset ds;
    const int width = win.span() * (include_aux ? 2 : 1);
    for (int i = 1; i <= width; ++i) ds.feature_names.push_back("f" + std::to_string(i));

    for (std::size_t t = static_cast<std::size_t>(past); t + future < n; ++t) {
        Instance inst;
        inst.base_date = data.stock[t].date;
        inst.x.reserve(static_cast<std::size_t>(width));
        for (int off = -past; off <= future; ++off) {
            const auto d = static_cast<std::size_t>(static_cast<long>(t) + off);
            inst.x.push_back(drive[d].normalized);
            if (include_aux) inst.x.push_back(aux[d]);
        }
        if (task == TaskKind::Regression) {
            inst.y = target[t].normalized;
        } else {
            if (drop_zero_labels && target[t].change_rate == 0.0) continue;
            inst.y = labelize(target[t].change_rate);
        }
        ds.instances.push_back(std::move(inst));
    }
    ds.split_index = ds.instances.size() * 66 / 100;
    return ds;
}

SplitView split(const SupervisedDataset& ds) {
    const std::size_t n = ds.instances.size();
    if (n < 3)
        throw ValidationError("split: need at least 3 instances, got " + std::to_string(n));
    std::span<const Instance> all(ds.instances);
    return SplitView{all.subspan(0, ds.split_index), all.subspan(ds.split_index)};
}

void write_dataset_csv(const SupervisedDataset& ds, std::ostream& out) {
    out << "base_date";
    for (const auto& name : ds.feature_names) out << ',' << name;
    out << ",target\n";
    for (const auto& inst : ds.instances) {
        out << inst.base_date.to_string();
        for (double v : inst.x) out << ',' << format_g17(v);
        out << ',' << format_g17(inst.y) << '\n';
    }
}

void write_dataset_csv_file(const SupervisedDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset file " + path);
    write_dataset_csv(ds, out);
}

SupervisedDataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("dataset csv: empty input");

    SupervisedDataset ds;
    {
        std::stringstream header(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(header, field, ',')) fields.push_back(field);
        if (fields.size() < 2 || fields.front() != "base_date" || fields.back() != "target")
            throw ValidationError("dataset csv: expected header base_date,f1..fk,target");
        ds.feature_names.assign(fields.begin() + 1, fields.end() - 1);
    }

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != ds.feature_names.size() + 2)
            throw ValidationError("dataset csv: line " + std::to_string(line_no) +
                                  ": wrong field count");
        Instance inst;
        inst.base_date = Date::parse(fields.front());
        for (std::size_t i = 1; i + 1 < fields.size(); ++i) {
            try {
                inst.x.push_back(std::stod(fields[i]));
            } catch (const std::exception&) {
                throw ValidationError("dataset csv: line " + std::to_string(line_no) +
                                      ": bad number '" + fields[i] + "'");
            }
        }
        try {
            inst.y = std::stod(fields.back());
        } catch (const std::exception&) {
            throw ValidationError("dataset csv: line " + std::to_string(line_no) +
                                  ": bad number '" + fields.back() + "'");
        }
        ds.instances.push_back(std::move(inst));
    }
    ds.split_index = ds.instances.size() * 66 / 100;
    return ds;
}

}  // namespace sentistock
