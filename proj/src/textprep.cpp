#include "sentistock/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "sentistock/error.hpp"

namespace sentistock {

std::string pos_name(Pos p) {
    switch (p) {
        case Pos::Noun: return "NOUN";
        case Pos::Adj: return "ADJ";
        case Pos::Verb: return "VERB";
        case Pos::Adv: return "ADV";
        case Pos::Other: return "OTHER";
    }
    return "OTHER";
}

Pos pos_from_name(std::string_view name) {
    if (name == "NOUN") return Pos::Noun;
    if (name == "ADJ") return Pos::Adj;
    if (name == "VERB") return Pos::Verb;
    if (name == "ADV") return Pos::Adv;
    if (name == "OTHER") return Pos::Other;
    throw ValidationError("unknown part-of-speech tag '" + std::string(name) + "'");
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);  // keep the rolling row short
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t subst = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            diag = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, subst});
        }
    }
    return row[b.size()];
}

double title_similarity(std::string_view a, std::string_view b) {
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

std::vector<Article> dedup_by_title(const std::vector<Article>& articles, double threshold) {
    std::vector<Article> kept;
    for (const auto& article : articles) {
        bool duplicate = false;
        for (const auto& k : kept) {
            if (title_similarity(article.title, k.title) > threshold) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) kept.push_back(article);
    }
    return kept;
}

std::vector<Article> length_filter(const std::vector<Article>& articles, int min_chars,
                                   int max_chars) {
    if (min_chars > max_chars)
        throw ValidationError("length_filter: min_chars exceeds max_chars");
    std::vector<Article> out;
    for (const auto& a : articles) {
        const auto len = static_cast<long long>(a.body.size());
        if (len >= min_chars && len <= max_chars) out.push_back(a);
    }
    return out;
}

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

int keyword_count(const Article& article, const std::vector<std::string>& aliases) {
    if (aliases.empty()) throw ValidationError("keyword_count: empty alias set");

    std::vector<std::string> lowered;
    lowered.reserve(aliases.size());
    for (const auto& a : aliases) lowered.push_back(lowercase(a));
    std::sort(lowered.begin(), lowered.end(),
              [](const std::string& a, const std::string& b) { return a.size() > b.size(); });

    const std::string text = lowercase(article.title) + " " + lowercase(article.body);
    int count = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t matched = 0;
        for (const auto& alias : lowered) {
            if (!alias.empty() && text.compare(pos, alias.size(), alias) == 0) {
                matched = alias.size();
                break;
            }
        }
        if (matched > 0) {
            ++count;
            pos += matched;
        } else {
            ++pos;
        }
    }
    return count;
}

std::vector<ScoredArticle> score_articles(const std::vector<Article>& articles,
                                          const std::vector<std::string>& aliases) {
    std::vector<ScoredArticle> out;
    out.reserve(articles.size());
    for (const auto& a : articles) out.push_back({a, keyword_count(a, aliases)});
    return out;
}

std::vector<ScoredArticle> keyword_filter(const std::vector<ScoredArticle>& articles,
                                          int min_count) {
    if (min_count < 0) throw ValidationError("keyword_filter: negative min_count");
    std::vector<ScoredArticle> out;
    for (const auto& a : articles)
        if (a.keyword_count >= min_count) out.push_back(a);
    return out;
}

std::vector<ScoredArticle> select_top(const std::vector<ScoredArticle>& day_articles, int k) {
    if (k < 1) throw ValidationError("select_top: k must be >= 1");
    std::vector<ScoredArticle> sorted = day_articles;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ScoredArticle& a, const ScoredArticle& b) {
                         if (a.keyword_count != b.keyword_count)
                             return a.keyword_count > b.keyword_count;
                         if (a.article.published_date != b.article.published_date)
                             return a.article.published_date < b.article.published_date;
                         return a.article.id < b.article.id;
                     });
    if (sorted.size() > static_cast<std::size_t>(k)) sorted.resize(static_cast<std::size_t>(k));
    return sorted;
}

std::string clean_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char ch : raw) {
        const auto c = static_cast<unsigned char>(ch);
        char mapped;
        if (std::isalpha(c))
            mapped = static_cast<char>(std::tolower(c));
        else if (std::isdigit(c))
            mapped = ch;
        else
            mapped = ' ';
        if (mapped == ' ') {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(mapped);
        }
    }
    return out;
}

LexiconSuffixTagger LexiconSuffixTagger::load(const std::string& lexicon_path) {
    std::ifstream in(lexicon_path);
    if (!in) throw IoError("cannot open tagger lexicon " + lexicon_path);
    LexiconSuffixTagger tagger;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ValidationError(lexicon_path + ": line " + std::to_string(line_no) +
                                  ": expected word<TAB>tag");
        std::string word = line.substr(0, tab);
        std::string tag = line.substr(tab + 1);
        while (!tag.empty() && (tag.back() == '\r' || tag.back() == ' ')) tag.pop_back();
        tagger.add(std::move(word), pos_from_name(tag));
    }
    return tagger;
}

Pos LexiconSuffixTagger::tag(std::string_view word) const {
    if (auto it = lexicon_.find(std::string(word)); it != lexicon_.end()) return it->second;

    auto ends_with = [&](std::string_view suffix) {
        return word.size() > suffix.size() + 1 &&
               word.substr(word.size() - suffix.size()) == suffix;
    };
    if (ends_with("ly")) return Pos::Adv;
    for (const char* s : {"ous", "al", "ic", "ive", "ful", "less", "ish", "able", "ible"})
        if (ends_with(s)) return Pos::Adj;
    if (ends_with("ing") || ends_with("ed")) return Pos::Verb;
    return Pos::Noun;
}

std::vector<Token> tokenize_and_tag(std::string_view clean, const Tagger& tagger) {
    std::vector<Token> tokens;
    std::size_t pos = 0;
    while (pos < clean.size()) {
        while (pos < clean.size() && clean[pos] == ' ') ++pos;
        std::size_t end = pos;
        while (end < clean.size() && clean[end] != ' ') ++end;
        if (end > pos) {
            std::string word(clean.substr(pos, end - pos));
            Pos p = tagger.tag(word);
            tokens.push_back(Token{std::move(word), p});
        }
        pos = end;
    }
    return tokens;
}

Lemmatizer Lemmatizer::load(const std::string& irregulars_path) {
    std::ifstream in(irregulars_path);
    if (!in) throw IoError("cannot open lemma dictionary " + irregulars_path);
    Lemmatizer lem;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ValidationError(irregulars_path + ": line " + std::to_string(line_no) +
                                  ": expected word<TAB>lemma");
        std::string word = line.substr(0, tab);
        std::string lemma = line.substr(tab + 1);
        while (!lemma.empty() && (lemma.back() == '\r' || lemma.back() == ' ')) lemma.pop_back();
        lem.add_irregular(std::move(word), std::move(lemma));
    }
    return lem;
}

void Lemmatizer::add_irregular(std::string word, std::string lemma) {
    irregulars_[std::move(word)] = std::move(lemma);
}

namespace {

bool ends_with(std::string_view w, std::string_view suffix) {
    return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

// Undo consonant doubling after -ing/-ed removal (stopp -> stop). Stems that
// legitimately end in ll/ss/ff are left alone.
void repair_doubling(std::string& stem) {
    if (stem.size() < 3) return;
    const char last = stem[stem.size() - 1];
    if (last != stem[stem.size() - 2]) return;
    static const std::string repairable = "bdgmnprt";
    if (repairable.find(last) != std::string::npos) stem.pop_back();
}

}  // namespace

std::string Lemmatizer::lemma(std::string_view word, Pos pos) const {
    if (auto it = irregulars_.find(std::string(word)); it != irregulars_.end())
        return it->second;

    std::string w(word);
    if (pos == Pos::Noun) {
        if (ends_with(w, "ies") && w.size() > 4) {
            w.erase(w.size() - 3);
            w.push_back('y');
        } else if (ends_with(w, "ses") && w.size() > 4) {
            w.erase(w.size() - 2);
        } else if (ends_with(w, "s") && w.size() > 3 && !ends_with(w, "ss") &&
                   !ends_with(w, "us") && !ends_with(w, "is")) {
            w.pop_back();
        }
    } else if (pos == Pos::Verb) {
        if (ends_with(w, "ing") && w.size() > 5) {
            w.erase(w.size() - 3);
            repair_doubling(w);
        } else if (ends_with(w, "ed") && w.size() > 4) {
            w.erase(w.size() - 2);
            repair_doubling(w);
        }
    }
    return w;
}

}  // namespace sentistock
