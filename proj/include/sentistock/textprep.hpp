#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentistock/date.hpp"
#include "sentistock/ingest.hpp"

namespace sentistock {

enum class Pos { Noun, Adj, Verb, Adv, Other };

std::string pos_name(Pos p);
Pos pos_from_name(std::string_view name);

struct Token {
    std::string text;  // lowercase, no whitespace
    Pos pos = Pos::Noun;
};

// An article after cleaning, tagging and lemmatization. `lemmas` is
// parallel to `tokens`.
struct CleanArticle {
    std::string article_id;
    Date date;
    std::vector<Token> tokens;
    std::vector<std::string> lemmas;
    int keyword_count = 0;
};

struct DayDocs {
    Date date;
    std::vector<CleanArticle> selected;
};

struct ScoredArticle {
    Article article;
    int keyword_count = 0;
};

// Minimal insert/delete/substitute edit count.
std::size_t levenshtein(std::string_view a, std::string_view b);

// 1 - levenshtein(a,b) / max(|a|,|b|); two empty strings compare as 1.0.
double title_similarity(std::string_view a, std::string_view b);

// Greedy keep-list scan over articles already sorted by (published_date, id).
// An article survives iff its title similarity to every previously kept title
// is <= threshold.
std::vector<Article> dedup_by_title(const std::vector<Article>& articles,
                                    double threshold = 0.8);

// Keeps articles whose body length is within [min_chars, max_chars], inclusive.
std::vector<Article> length_filter(const std::vector<Article>& articles,
                                   int min_chars, int max_chars);

// Case-insensitive count of non-overlapping alias occurrences in title+body,
// longest alias matched first.
int keyword_count(const Article& article, const std::vector<std::string>& aliases);

std::vector<ScoredArticle> score_articles(const std::vector<Article>& articles,
                                          const std::vector<std::string>& aliases);

std::vector<ScoredArticle> keyword_filter(const std::vector<ScoredArticle>& articles,
                                          int min_count);

// Top k by keyword count descending; ties by earlier published_date, then id.
std::vector<ScoredArticle> select_top(const std::vector<ScoredArticle>& day_articles,
                                      int k = 25);

// Lowercase, strip everything outside [a-z0-9 ], collapse runs of spaces, trim.
std::string clean_text(std::string_view raw);

// Part-of-speech assignment for a single lowercase word.
class Tagger {
public:
    virtual ~Tagger() = default;
    virtual Pos tag(std::string_view word) const = 0;
};

// Shipped default: exact lexicon lookup, then suffix heuristics, then NOUN.
class LexiconSuffixTagger : public Tagger {
public:
    LexiconSuffixTagger() = default;
    static LexiconSuffixTagger load(const std::string& lexicon_path);

    void add(std::string word, Pos pos) { lexicon_[std::move(word)] = pos; }
    Pos tag(std::string_view word) const override;

private:
    std::unordered_map<std::string, Pos> lexicon_;
};

// Whitespace tokenization of already-cleaned text, tagged with `tagger`.
std::vector<Token> tokenize_and_tag(std::string_view clean, const Tagger& tagger);

// Exception dictionary plus suffix strips (nouns: -ies, -ses, -s; verbs:
// -ing/-ed with doubled-consonant repair). Unknown shapes pass through.
class Lemmatizer {
public:
    Lemmatizer() = default;
    static Lemmatizer load(const std::string& irregulars_path);

    void add_irregular(std::string word, std::string lemma);
    std::string lemma(std::string_view word, Pos pos) const;

private:
    std::unordered_map<std::string, std::string> irregulars_;
};

}  // namespace sentistock
