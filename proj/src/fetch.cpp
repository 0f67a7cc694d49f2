#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "sentistock/error.hpp"
#include "sentistock/ingest.hpp"

namespace sentistock {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool mentions_any(const Article& a, const std::vector<std::string>& aliases) {
    if (aliases.empty()) return true;
    const std::string text = lower(a.title + " " + a.body);
    for (const auto& alias : aliases)
        if (text.find(lower(alias)) != std::string::npos) return true;
    return false;
}

Article article_from_json(const nlohmann::json& j, const std::string& origin,
                          const std::string& market, int shift_days) {
    for (const char* field : {"source", "url", "published_date", "title", "body"}) {
        if (!j.contains(field))
            throw ValidationError(origin + ": missing field " + field);
    }
    Article a;
    a.source = j.at("source").get<std::string>();
    a.url = j.at("url").get<std::string>();
    a.published_date = Date::parse(j.at("published_date").get<std::string>());
    a.title = j.at("title").get<std::string>();
    a.body = j.at("body").get<std::string>();
    if (a.title.empty()) throw ValidationError(origin + ": empty title");
    if (a.body.empty()) throw ValidationError(origin + ": empty body");
    a.market = market;
    a.id = article_id_from_url(a.url);
    a.effective_date = a.published_date.plus_days(shift_days);
    return a;
}

}  // namespace

FixtureFetcher::FixtureFetcher(std::string dir, std::string market, int shift_days)
    : dir_(std::move(dir)), market_(std::move(market)), shift_days_(shift_days) {}

std::vector<Article> FixtureFetcher::fetch(const std::vector<std::string>& query_aliases,
                                           Date from, Date to) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir_)) throw IoError("fixture directory not found: " + dir_);

    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir_)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());

    std::vector<Article> out;
    for (const auto& path : paths) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open fixture file " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path + ": malformed JSON: " + e.what());
        }
        Article a = article_from_json(j, path, market_, shift_days_);
        if (a.published_date < from || to < a.published_date) continue;
        if (!mentions_any(a, query_aliases)) continue;
        out.push_back(std::move(a));
    }
    return out;
}

HttpFetcher::HttpFetcher(std::string host, int port, std::string market, int shift_days,
                         std::string api_key)
    : host_(std::move(host)), port_(port), market_(std::move(market)),
      shift_days_(shift_days), api_key_(std::move(api_key)) {
    if (api_key_.empty()) {
        if (const char* env = std::getenv("NEWS_API_KEY")) api_key_ = env;
    }
}

std::vector<Article> HttpFetcher::fetch(const std::vector<std::string>& query_aliases,
                                        Date from, Date to) {
    httplib::Client client(host_, port_);
    client.set_connection_timeout(5);
    client.set_read_timeout(10);

    std::string q;
    for (const auto& alias : query_aliases) {
        if (!q.empty()) q += " OR ";
        q += alias;
    }
    httplib::Params params{{"q", q},
                           {"from", from.to_string()},
                           {"to", to.to_string()},
                           {"apiKey", api_key_}};
    auto res = client.Get("/everything", params, httplib::Headers{});
    if (!res)
        throw FetchError("no response from " + host_ + ":" + std::to_string(port_), true);
    if (res->status == 401 || res->status == 403)
        throw FetchError("authentication rejected by news endpoint (HTTP " +
                             std::to_string(res->status) + ")",
                         false);
    if (res->status != 200)
        throw FetchError("news endpoint returned HTTP " + std::to_string(res->status), true);

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw FetchError(std::string("unparseable response body: ") + e.what(), true);
    }
    if (!j.contains("articles") || !j.at("articles").is_array())
        throw FetchError("response lacks an articles array", true);

    std::vector<Article> out;
    for (const auto& item : j.at("articles")) {
        nlohmann::json flat;
        flat["source"] = item.contains("source") && item.at("source").contains("name")
                             ? item.at("source").at("name").get<std::string>()
                             : std::string("unknown");
        flat["url"] = item.value("url", "");
        std::string published = item.value("publishedAt", "");
        if (published.size() > 10) published.resize(10);  // keep the date part of the timestamp
        flat["published_date"] = published;
        flat["title"] = item.value("title", "");
        flat["body"] = item.value("content", "");
        Article a = article_from_json(flat, "response article", market_, shift_days_);
        if (a.published_date < from || to < a.published_date) continue;
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<Article> fetch_news(Fetcher& client, const std::vector<std::string>& query_aliases,
                                Date from, Date to) {
    return client.fetch(query_aliases, from, to);
}

}  // namespace sentistock
