#include "sentistock/ingest.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "sentistock/error.hpp"
#include "sentistock/util.hpp"

namespace sentistock {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, const std::string& context) {
    try {
        std::size_t used = 0;
        double v = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ValidationError(context + ": bad numeric field '" + field + "'");
    }
}

}  // namespace

std::string article_id_from_url(const std::string& url) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(url)));
    return buf;
}

void validate_bar(const StockBar& bar, const std::string& context) {
    if (bar.low > bar.high)
        throw ValidationError(context + ": low " + std::to_string(bar.low) +
                              " exceeds high " + std::to_string(bar.high));
    if (bar.open < bar.low || bar.open > bar.high)
        throw ValidationError(context + ": open outside [low, high]");
    if (bar.close < bar.low || bar.close > bar.high)
        throw ValidationError(context + ": close outside [low, high]");
    if (bar.close <= 0)
        throw ValidationError(context + ": close must be positive");
    if (bar.volume < 0)
        throw ValidationError(context + ": negative volume");
}

std::vector<Article> load_articles(const std::string& path, const std::string& market,
                                   int shift_days) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open news file " + path);

    std::vector<Article> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path + ": malformed line " + std::to_string(line_no) +
                                  ": " + e.what());
        }
        for (const char* field : {"source", "url", "published_date", "title", "body"}) {
            if (!j.contains(field))
                throw ValidationError(path + ": missing field " + field + " at line " +
                                      std::to_string(line_no));
        }
        Article a;
        a.source = j.at("source").get<std::string>();
        a.url = j.at("url").get<std::string>();
        a.title = trim(j.at("title").get<std::string>());
        a.body = trim(j.at("body").get<std::string>());
        try {
            a.published_date = Date::parse(j.at("published_date").get<std::string>());
        } catch (const ValidationError& e) {
            throw ValidationError(path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        if (a.title.empty())
            throw ValidationError(path + ": empty title at line " + std::to_string(line_no));
        if (a.body.empty())
            throw ValidationError(path + ": empty body at line " + std::to_string(line_no));
        a.market = market;
        a.id = article_id_from_url(a.url);
        a.effective_date = a.published_date.plus_days(shift_days);
        out.push_back(std::move(a));
    }
    return out;
}

StockSeries load_stock_csv(const std::string& path, const std::string& market) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stock file " + path);

    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
    if (trim(line) != "date,open,high,low,close,volume")
        throw ValidationError(path + ": expected header date,open,high,low,close,volume");

    StockSeries series;
    series.market = market;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(trim(f));
        if (fields.size() != 6)
            throw ValidationError(path + ": line " + std::to_string(line_no) +
                                  ": expected 6 fields, got " + std::to_string(fields.size()));
        const std::string context = path + ": line " + std::to_string(line_no);
        StockBar bar;
        bar.date = Date::parse(fields[0]);
        bar.open = parse_number(fields[1], context);
        bar.high = parse_number(fields[2], context);
        bar.low = parse_number(fields[3], context);
        bar.close = parse_number(fields[4], context);
        bar.volume = parse_number(fields[5], context);
        validate_bar(bar, context);
        series.bars.push_back(bar);
    }

    std::stable_sort(series.bars.begin(), series.bars.end(),
                     [](const StockBar& a, const StockBar& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < series.bars.size(); ++i) {
        if (series.bars[i].date == series.bars[i - 1].date)
            throw ValidationError(path + ": duplicate date " + series.bars[i].date.to_string());
    }
    return series;
}

StockSeries composite_close(const std::vector<StockSeries>& series_list) {
    if (series_list.empty()) throw ValidationError("composite_close: no input series");

    // Dates present in every series.
    std::map<Date, int> presence;
    for (const auto& s : series_list)
        for (const auto& bar : s.bars) presence[bar.date] += 1;

    StockSeries out;
    out.market = series_list.front().market;
    const auto n = series_list.size();
    for (const auto& [date, count] : presence) {
        if (static_cast<std::size_t>(count) != n) continue;
        StockBar acc;
        acc.date = date;
        for (const auto& s : series_list) {
            auto it = std::lower_bound(s.bars.begin(), s.bars.end(), date,
                                       [](const StockBar& b, const Date& d) { return b.date < d; });
            acc.open += it->open;
            acc.high += it->high;
            acc.low += it->low;
            acc.close += it->close;
            acc.volume += it->volume;
        }
        acc.open /= static_cast<double>(n);
        acc.high /= static_cast<double>(n);
        acc.low /= static_cast<double>(n);
        acc.close /= static_cast<double>(n);
        out.bars.push_back(acc);
    }
    if (out.bars.empty())
        throw ValidationError("composite_close: input series share no dates");
    return out;
}

std::vector<AlignedDay> align(const StockSeries& series, const std::vector<Article>& articles,
                              WeekendPolicy policy) {
    std::vector<AlignedDay> days;
    days.reserve(series.bars.size());
    for (const auto& bar : series.bars)
        days.push_back(AlignedDay{bar.date, bar.close, bar.volume, {}});

    for (const auto& article : articles) {
        auto it = std::lower_bound(days.begin(), days.end(), article.effective_date,
                                   [](const AlignedDay& d, const Date& t) { return d.date < t; });
        if (it == days.end()) continue;  // beyond the last trading date
        if (it->date != article.effective_date && policy == WeekendPolicy::Drop) continue;
        it->articles.push_back(article);
    }
    return days;
}

}  // namespace sentistock
