#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace sentistock {

// Word -> vector table. Immutable after load; safe to share across threads.
struct EmbeddingTable {
    int dim = 0;
    std::unordered_map<std::string, std::vector<float>> entries;

    const std::vector<float>* find(const std::string& word) const {
        auto it = entries.find(word);
        return it == entries.end() ? nullptr : &it->second;
    }
};

enum class EmbeddingFormat { Auto, Text, Binary };

// Text format: header `vocab_size dim`, then `word v1 .. vdim` per line.
EmbeddingTable load_embeddings_text(const std::string& path);

// Binary format: ASCII header line `vocab_size dim\n`, then per entry the word
// bytes, a single space, and dim little-endian float32 values.
EmbeddingTable load_embeddings_binary(const std::string& path);

EmbeddingTable load_embeddings(const std::string& path,
                               EmbeddingFormat format = EmbeddingFormat::Auto);

void save_embeddings_text(const EmbeddingTable& table, const std::string& path);
void save_embeddings_binary(const EmbeddingTable& table, const std::string& path);

// u.v / (|u||v|); throws on length mismatch or zero vector.
double cosine(std::span<const float> u, std::span<const float> v);

}  // namespace sentistock
