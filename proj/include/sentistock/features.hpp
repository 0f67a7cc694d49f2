#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sentistock/date.hpp"
#include "sentistock/embeddings.hpp"
#include "sentistock/textprep.hpp"

namespace sentistock {

// An adjective/noun phrase observed in one day's selected articles.
struct Candidate {
    std::vector<std::string> phrase;  // 1..max_len lemmas, at least one noun
    Date date;
    long freq = 0;
};

std::string phrase_key(const std::vector<std::string>& phrase);
std::vector<std::string> phrase_from_key(const std::string& key);

struct SynonymCluster {
    std::vector<std::string> representative;
    std::vector<std::vector<std::string>> members;
    long pooled_freq = 0;
};

struct TermScore {
    std::string term;  // phrase key
    Date date;
    double tfidf = 0;
    long freq = 0;  // pooled frequency, used for tie-breaks
};

// Phrase counts for a single document (one selected article).
struct DocTerms {
    std::string article_id;
    Date date;
    std::map<std::string, long> counts;
};

// All sub-spans (length <= max_len, containing at least one noun) of maximal
// contiguous ADJ/NOUN runs, with per-document frequencies.
std::vector<Candidate> extract_candidates(const CleanArticle& doc, int max_len = 4);

// Drops candidates whose every lemma is stop-listed.
std::vector<Candidate> stopword_filter(const std::vector<Candidate>& candidates,
                                       const std::set<std::string>& stoplist);

std::set<std::string> load_stopwords(const std::string& path);

// Mean of the in-vocabulary lemma vectors; nullopt when every lemma is OOV.
std::optional<std::vector<float>> candidate_vector(const std::vector<std::string>& phrase,
                                                   const EmbeddingTable& table);

// Single-linkage grouping of phrases whose vectors have cosine >= tau.
// Phrases without a vector stay singletons. The representative is the member
// with the highest pooled frequency (ties: lexicographically smallest).
std::vector<SynonymCluster> cluster_synonyms(const std::vector<Candidate>& candidates,
                                             const EmbeddingTable& table, double tau = 0.70);

// Corpus view for TF-IDF: document = one selected article.
struct TermCorpus {
    long n_docs = 0;
    std::map<std::string, long> df;                       // term -> documents containing it
    std::map<Date, std::map<std::string, long>> day_tf;   // date -> term -> raw tf
    std::map<std::string, long> pooled_freq;              // term -> corpus-wide frequency
};

// Builds the corpus view, mapping each phrase through `canon` (synonym
// representative); pass an empty map to keep phrases as-is.
TermCorpus build_term_corpus(const std::vector<DocTerms>& docs,
                             const std::map<std::string, std::string>& canon = {});

// Map phrase key -> representative key implied by a clustering.
std::map<std::string, std::string> canonical_map(const std::vector<SynonymCluster>& clusters);

// tf_raw * ln(N / df). Throws if the term does not occur in the corpus.
double tfidf(const TermCorpus& corpus, const std::string& term, Date day);

// All term scores for one day.
std::vector<TermScore> day_scores(const TermCorpus& corpus, Date day);

// Top `top_k` by tfidf descending; ties by pooled frequency, then term.
std::vector<TermScore> select_terms(std::vector<TermScore> scores, int top_k = 50);

}  // namespace sentistock
