#pragma once

#include <string>
#include <vector>

#include "sentistock/date.hpp"

namespace sentistock {

// One news document. `effective_date` is the publication date shifted by the
// market's configured offset so overnight coverage lines up with the next
// trading session.
struct Article {
    std::string id;  // stable content hash of the URL
    std::string source;
    std::string url;
    Date published_date;
    std::string title;
    std::string body;
    std::string market;
    Date effective_date;
};

struct StockBar {
    Date date;
    double open = 0;
    double high = 0;
    double low = 0;
    double close = 0;
    double volume = 0;
};

struct StockSeries {
    std::string market;
    std::vector<StockBar> bars;  // strictly increasing by date
};

// One trading day with the articles mapped onto it.
struct AlignedDay {
    Date date;
    double close = 0;
    double volume = 0;
    std::vector<Article> articles;
};

enum class WeekendPolicy {
    RollForward,  // attach to the next trading day (default)
    Drop,         // discard articles landing on non-trading days
};

std::string article_id_from_url(const std::string& url);

// Validates a bar against the OHLCV invariants, throws ValidationError.
void validate_bar(const StockBar& bar, const std::string& context);

// JSONL loader: one object per line with keys source,url,published_date,title,body.
// Assigns ids and computes effective_date = published_date + shift_days.
std::vector<Article> load_articles(const std::string& path, const std::string& market,
                                   int shift_days);

// CSV loader, header `date,open,high,low,close,volume`. Bars are returned
// sorted ascending; duplicate dates are rejected.
StockSeries load_stock_csv(const std::string& path, const std::string& market);

// Equal-weight composite over the dates present in every input series.
// Prices are averaged, volumes summed.
StockSeries composite_close(const std::vector<StockSeries>& series_list);

// Attach each article to the trading day equal to its effective_date, or per
// policy when that date is not a trading day.
std::vector<AlignedDay> align(const StockSeries& series, const std::vector<Article>& articles,
                              WeekendPolicy policy = WeekendPolicy::RollForward);

// News source abstraction. The default implementation reads local fixture
// directories so experiments stay reproducible offline; the HTTP client is
// opt-in. Implementations either keep no mutable state or document themselves
// as single-use.
class Fetcher {
public:
    virtual ~Fetcher() = default;
    virtual std::vector<Article> fetch(const std::vector<std::string>& query_aliases,
                                       Date from, Date to) = 0;
};

// Reads one JSON article object per *.json file in `dir`, in filename order.
// Keeps articles whose published_date falls in [from, to] and whose title or
// body mentions one of the query aliases (case-insensitive).
class FixtureFetcher : public Fetcher {
public:
    FixtureFetcher(std::string dir, std::string market, int shift_days);
    std::vector<Article> fetch(const std::vector<std::string>& query_aliases,
                               Date from, Date to) override;

private:
    std::string dir_;
    std::string market_;
    int shift_days_;
};

// Talks to a NewsAPI-shaped endpoint: GET <base>/everything with q, from, to
// and apiKey query parameters, expecting {"articles":[{source:{name},url,
// publishedAt,title,content}, ...]}. The key comes from NEWS_API_KEY unless
// set explicitly. Stateless between calls.
class HttpFetcher : public Fetcher {
public:
    HttpFetcher(std::string host, int port, std::string market, int shift_days,
                std::string api_key = "");
    std::vector<Article> fetch(const std::vector<std::string>& query_aliases,
                               Date from, Date to) override;

private:
    std::string host_;
    int port_;
    std::string market_;
    int shift_days_;
    std::string api_key_;
};

std::vector<Article> fetch_news(Fetcher& client, const std::vector<std::string>& query_aliases,
                                Date from, Date to);

}  // namespace sentistock
