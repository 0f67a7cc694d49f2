#include "sentistock/embeddings.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "sentistock/error.hpp"

namespace sentistock {

namespace {

void parse_header(std::istream& in, const std::string& path, long& vocab, int& dim) {
    std::string header;
    if (!std::getline(in, header)) throw IoError(path + ": missing embedding header");
    std::istringstream hs(header);
    if (!(hs >> vocab >> dim) || vocab < 0 || dim <= 0)
        throw ValidationError(path + ": bad embedding header '" + header + "'");
}

void check_finite(const std::vector<float>& v, const std::string& path,
                  const std::string& word) {
    for (float x : v)
        if (!std::isfinite(x))
            throw ValidationError(path + ": non-finite component in vector for '" + word + "'");
}

}  // namespace

EmbeddingTable load_embeddings_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embedding file " + path);

    long vocab = 0;
    int dim = 0;
    parse_header(in, path, vocab, dim);

    EmbeddingTable table;
    table.dim = dim;
    table.entries.reserve(static_cast<std::size_t>(vocab));
    std::string line;
    long loaded = 0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        std::vector<float> vec;
        vec.reserve(static_cast<std::size_t>(dim));
        float x;
        while (ls >> x) vec.push_back(x);
        if (static_cast<int>(vec.size()) != dim)
            throw ValidationError(path + ": line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(dim) + " components, got " +
                                  std::to_string(vec.size()));
        check_finite(vec, path, word);
        table.entries[word] = std::move(vec);
        ++loaded;
    }
    if (loaded != vocab)
        throw IoError(path + ": truncated table: header declares " + std::to_string(vocab) +
                      " words, file holds " + std::to_string(loaded));
    return table;
}

EmbeddingTable load_embeddings_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open embedding file " + path);

    long vocab = 0;
    int dim = 0;
    parse_header(in, path, vocab, dim);

    EmbeddingTable table;
    table.dim = dim;
    table.entries.reserve(static_cast<std::size_t>(vocab));
    for (long i = 0; i < vocab; ++i) {
        std::string word;
        char c;
        while (in.get(c) && c != ' ') {
            if (c != '\n') word.push_back(c);
        }
        std::vector<float> vec(static_cast<std::size_t>(dim));
        in.read(reinterpret_cast<char*>(vec.data()),
                static_cast<std::streamsize>(vec.size() * sizeof(float)));
        if (!in)
            throw IoError(path + ": truncated while reading entry " + std::to_string(i + 1) +
                          " of " + std::to_string(vocab));
        check_finite(vec, path, word);
        table.entries[std::move(word)] = std::move(vec);
    }
    return table;
}

EmbeddingTable load_embeddings(const std::string& path, EmbeddingFormat format) {
    if (format == EmbeddingFormat::Text) return load_embeddings_text(path);
    if (format == EmbeddingFormat::Binary) return load_embeddings_binary(path);

    // Sniff: float32 payloads almost always contain control bytes, text never does.
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open embedding file " + path);
    std::string header;
    std::getline(in, header);
    char buf[4096];
    in.read(buf, sizeof buf);
    const auto got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
        const auto c = static_cast<unsigned char>(buf[i]);
        if (c < 9 || (c > 13 && c < 32) || c > 126) return load_embeddings_binary(path);
    }
    return load_embeddings_text(path);
}

void save_embeddings_text(const EmbeddingTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write embedding file " + path);
    out << table.entries.size() << ' ' << table.dim << '\n';
    out.precision(std::numeric_limits<float>::max_digits10);
    for (const auto& [word, vec] : table.entries) {
        out << word;
        for (float x : vec) out << ' ' << x;
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
}

void save_embeddings_binary(const EmbeddingTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write embedding file " + path);
    out << table.entries.size() << ' ' << table.dim << '\n';
    for (const auto& [word, vec] : table.entries) {
        out << word << ' ';
        out.write(reinterpret_cast<const char*>(vec.data()),
                  static_cast<std::streamsize>(vec.size() * sizeof(float)));
    }
    if (!out) throw IoError("failed writing " + path);
}

double cosine(std::span<const float> u, std::span<const float> v) {
    if (u.size() != v.size())
        throw ValidationError("cosine: dimension mismatch " + std::to_string(u.size()) +
                              " vs " + std::to_string(v.size()));
    double dot = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += static_cast<double>(u[i]) * v[i];
        nu += static_cast<double>(u[i]) * u[i];
        nv += static_cast<double>(v[i]) * v[i];
    }
    if (nu == 0.0 || nv == 0.0) throw ValidationError("cosine: zero vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

}  // namespace sentistock
