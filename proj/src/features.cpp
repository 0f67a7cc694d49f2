#include "sentistock/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sentistock/error.hpp"

namespace sentistock {

std::string phrase_key(const std::vector<std::string>& phrase) {
    std::string key;
    for (std::size_t i = 0; i < phrase.size(); ++i) {
        if (i) key.push_back(' ');
        key += phrase[i];
    }
    return key;
}

std::vector<std::string> phrase_from_key(const std::string& key) {
    std::vector<std::string> words;
    std::istringstream ss(key);
    std::string w;
    while (ss >> w) words.push_back(std::move(w));
    return words;
}

std::vector<Candidate> extract_candidates(const CleanArticle& doc, int max_len) {
    if (max_len < 1) throw ValidationError("extract_candidates: max_len must be >= 1");

    std::map<std::string, long> counts;
    std::map<std::string, std::vector<std::string>> phrases;

    const auto& tokens = doc.tokens;
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (tokens[i].pos != Pos::Noun && tokens[i].pos != Pos::Adj) {
            ++i;
            continue;
        }
        std::size_t run_end = i;
        while (run_end < tokens.size() &&
               (tokens[run_end].pos == Pos::Noun || tokens[run_end].pos == Pos::Adj))
            ++run_end;

        for (std::size_t begin = i; begin < run_end; ++begin) {
            bool has_noun = false;
            std::vector<std::string> span;
            for (std::size_t end = begin;
                 end < run_end && end - begin < static_cast<std::size_t>(max_len); ++end) {
                span.push_back(doc.lemmas[end]);
                if (tokens[end].pos == Pos::Noun) has_noun = true;
                if (has_noun) {
                    auto key = phrase_key(span);
                    counts[key] += 1;
                    phrases.emplace(std::move(key), span);
                }
            }
        }
        i = run_end;
    }

    std::vector<Candidate> out;
    out.reserve(counts.size());
    for (const auto& [key, freq] : counts)
        out.push_back(Candidate{phrases.at(key), doc.date, freq});
    return out;
}

std::vector<Candidate> stopword_filter(const std::vector<Candidate>& candidates,
                                       const std::set<std::string>& stoplist) {
    std::vector<Candidate> out;
    for (const auto& c : candidates) {
        const bool all_stop = std::all_of(c.phrase.begin(), c.phrase.end(),
                                          [&](const std::string& w) { return stoplist.count(w) > 0; });
        if (!all_stop) out.push_back(c);
    }
    return out;
}

std::set<std::string> load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stop-word list " + path);
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string w;
        while (ss >> w) words.insert(w);
    }
    return words;
}

std::optional<std::vector<float>> candidate_vector(const std::vector<std::string>& phrase,
                                                   const EmbeddingTable& table) {
    std::vector<float> acc(static_cast<std::size_t>(table.dim), 0.0f);
    int hits = 0;
    for (const auto& lemma : phrase) {
        if (const auto* vec = table.find(lemma)) {
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += (*vec)[i];
            ++hits;
        }
    }
    if (hits == 0) return std::nullopt;
    for (auto& x : acc) x /= static_cast<float>(hits);
    return acc;
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<SynonymCluster> cluster_synonyms(const std::vector<Candidate>& candidates,
                                             const EmbeddingTable& table, double tau) {
    if (tau <= 0.0 || tau > 1.0)
        throw ValidationError("cluster_synonyms: tau must be in (0, 1]");

    // Pool duplicate phrases first; clustering works on distinct phrases.
    std::map<std::string, long> pooled;
    std::map<std::string, std::vector<std::string>> phrase_of;
    for (const auto& c : candidates) {
        auto key = phrase_key(c.phrase);
        pooled[key] += c.freq;
        phrase_of.emplace(std::move(key), c.phrase);
    }

    std::vector<std::string> keys;
    keys.reserve(pooled.size());
    for (const auto& [key, _] : pooled) keys.push_back(key);

    std::vector<std::optional<std::vector<float>>> vectors(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i)
        vectors[i] = candidate_vector(phrase_of.at(keys[i]), table);

    UnionFind uf(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (!vectors[i]) continue;
        for (std::size_t j = i + 1; j < keys.size(); ++j) {
            if (!vectors[j]) continue;
            double sim;
            try {
                sim = cosine(*vectors[i], *vectors[j]);
            } catch (const ValidationError&) {
                continue;  // zero vector: leave unlinked
            }
            if (sim >= tau) uf.unite(i, j);
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < keys.size(); ++i) groups[uf.find(i)].push_back(i);

    std::vector<SynonymCluster> out;
    out.reserve(groups.size());
    for (const auto& [root, members] : groups) {
        SynonymCluster cluster;
        std::size_t best = members.front();
        for (std::size_t idx : members) {
            cluster.members.push_back(phrase_of.at(keys[idx]));
            cluster.pooled_freq += pooled.at(keys[idx]);
            const bool better = pooled.at(keys[idx]) > pooled.at(keys[best]) ||
                                (pooled.at(keys[idx]) == pooled.at(keys[best]) &&
                                 keys[idx] < keys[best]);
            if (better) best = idx;
        }
        cluster.representative = phrase_of.at(keys[best]);
        out.push_back(std::move(cluster));
    }
    std::sort(out.begin(), out.end(), [](const SynonymCluster& a, const SynonymCluster& b) {
        return phrase_key(a.representative) < phrase_key(b.representative);
    });
    return out;
}

std::map<std::string, std::string> canonical_map(const std::vector<SynonymCluster>& clusters) {
    std::map<std::string, std::string> canon;
    for (const auto& c : clusters) {
        const auto rep = phrase_key(c.representative);
        for (const auto& m : c.members) canon[phrase_key(m)] = rep;
    }
    return canon;
}

TermCorpus build_term_corpus(const std::vector<DocTerms>& docs,
                             const std::map<std::string, std::string>& canon) {
    TermCorpus corpus;
    corpus.n_docs = static_cast<long>(docs.size());
    for (const auto& doc : docs) {
        std::map<std::string, long> mapped;
        for (const auto& [term, count] : doc.counts) {
            auto it = canon.find(term);
            mapped[it == canon.end() ? term : it->second] += count;
        }
        for (const auto& [term, count] : mapped) {
            corpus.df[term] += 1;
            corpus.day_tf[doc.date][term] += count;
            corpus.pooled_freq[term] += count;
        }
    }
    return corpus;
}

double tfidf(const TermCorpus& corpus, const std::string& term, Date day) {
    if (corpus.n_docs <= 0) throw ValidationError("tfidf: empty corpus");
    const auto df_it = corpus.df.find(term);
    if (df_it == corpus.df.end() || df_it->second == 0)
        throw ValidationError("tfidf: term '" + term + "' not in corpus");

    long tf = 0;
    if (auto day_it = corpus.day_tf.find(day); day_it != corpus.day_tf.end()) {
        if (auto it = day_it->second.find(term); it != day_it->second.end()) tf = it->second;
    }
    return static_cast<double>(tf) *
           std::log(static_cast<double>(corpus.n_docs) / static_cast<double>(df_it->second));
}

std::vector<TermScore> day_scores(const TermCorpus& corpus, Date day) {
    std::vector<TermScore> scores;
    auto day_it = corpus.day_tf.find(day);
    if (day_it == corpus.day_tf.end()) return scores;
    scores.reserve(day_it->second.size());
    for (const auto& [term, _] : day_it->second) {
        TermScore s;
        s.term = term;
        s.date = day;
        s.tfidf = tfidf(corpus, term, day);
        s.freq = corpus.pooled_freq.at(term);
        scores.push_back(std::move(s));
    }
    return scores;
}

std::vector<TermScore> select_terms(std::vector<TermScore> scores, int top_k) {
    if (top_k < 1) throw ValidationError("select_terms: top_k must be >= 1");
    std::stable_sort(scores.begin(), scores.end(), [](const TermScore& a, const TermScore& b) {
        if (a.tfidf != b.tfidf) return a.tfidf > b.tfidf;
        if (a.freq != b.freq) return a.freq > b.freq;
        return a.term < b.term;
    });
    if (scores.size() > static_cast<std::size_t>(top_k))
        scores.resize(static_cast<std::size_t>(top_k));
    return scores;
}

}  // namespace sentistock
