#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sentistock/error.hpp"
#include "sentistock/models.hpp"
#include "sentistock/util.hpp"

namespace sentistock {

namespace {

void expect(std::istream& in, const std::string& word) {
    std::string tok;
    if (!(in >> tok) || tok != word)
        throw ValidationError("model file: expected '" + word + "', got '" + tok + "'");
}

double read_double(std::istream& in) {
    std::string tok;
    if (!(in >> tok)) throw ValidationError("model file: truncated numeric field");
    return parse_hex(tok);
}

long read_count(std::istream& in, const char* what) {
    long v;
    if (!(in >> v) || v < 0)
        throw ValidationError(std::string("model file: bad ") + what + " count");
    return v;
}

std::unique_ptr<Model> load_lr(std::istream& in) {
    expect(in, "features");
    const long d = read_count(in, "feature");
    std::vector<double> w(static_cast<std::size_t>(d));
    for (auto& v : w) v = read_double(in);
    const double bias = read_double(in);
    return std::make_unique<LrModel>(std::move(w), bias);
}

std::unique_ptr<Model> load_gp(std::istream& in) {
    expect(in, "rows");
    const long n = read_count(in, "row");
    expect(in, "features");
    const long d = read_count(in, "feature");
    const double mean = read_double(in);
    const double length_scale = read_double(in);
    Matrix X(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(d)));
    std::vector<double> alpha(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < d; ++j)
            X[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = read_double(in);
        alpha[static_cast<std::size_t>(i)] = read_double(in);
    }
    return std::make_unique<GpModel>(std::move(X), std::move(alpha), mean, length_scale);
}

std::unique_ptr<Model> load_mlp(std::istream& in) {
    expect(in, "inputs");
    const long inputs = read_count(in, "input");
    expect(in, "hidden");
    const long hidden = read_count(in, "hidden unit");
    MlpNetwork net;
    net.inputs = static_cast<int>(inputs);
    net.hidden = static_cast<int>(hidden);
    net.w1.resize(static_cast<std::size_t>(inputs * hidden));
    net.b1.resize(static_cast<std::size_t>(hidden));
    net.w2.resize(static_cast<std::size_t>(hidden));
    for (auto& v : net.w1) v = read_double(in);
    for (auto& v : net.b1) v = read_double(in);
    for (auto& v : net.w2) v = read_double(in);
    net.b2 = read_double(in);
    return std::make_unique<MlpModel>(std::move(net));
}

std::unique_ptr<Model> load_smoreg(std::istream& in) {
    expect(in, "kernel");
    std::string kernel_name;
    in >> kernel_name;
    SvrKernel kernel;
    if (kernel_name == "linear") kernel = SvrKernel::Linear;
    else if (kernel_name == "rbf") kernel = SvrKernel::Rbf;
    else throw ValidationError("model file: unknown kernel '" + kernel_name + "'");
    expect(in, "gamma");
    const double gamma = read_double(in);
    expect(in, "vectors");
    const long n = read_count(in, "support vector");
    expect(in, "features");
    const long d = read_count(in, "feature");
    const double bias = read_double(in);
    Matrix sv(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(d)));
    std::vector<double> beta(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < d; ++j)
            sv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = read_double(in);
        beta[static_cast<std::size_t>(i)] = read_double(in);
    }
    return std::make_unique<SmoregModel>(std::move(sv), std::move(beta), bias, kernel, gamma,
                                         static_cast<std::size_t>(d));
}

std::unique_ptr<Model> load_rf(std::istream& in) {
    expect(in, "trees");
    const long t = read_count(in, "tree");
    expect(in, "features");
    const long d = read_count(in, "feature");
    std::vector<RfTree> trees(static_cast<std::size_t>(t));
    for (long i = 0; i < t; ++i) {
        expect(in, "nodes");
        const long k = read_count(in, "node");
        auto& nodes = trees[static_cast<std::size_t>(i)].nodes;
        nodes.resize(static_cast<std::size_t>(k));
        for (long j = 0; j < k; ++j) {
            RfNode& node = nodes[static_cast<std::size_t>(j)];
            if (!(in >> node.feature)) throw ValidationError("model file: truncated tree node");
            node.threshold = read_double(in);
            if (!(in >> node.left >> node.right))
                throw ValidationError("model file: truncated tree node");
            node.value = read_double(in);
        }
    }
    return std::make_unique<RfModel>(std::move(trees), static_cast<std::size_t>(d));
}

}  // namespace

void save_model(const Model& model, std::ostream& out) {
    out << "sentistock-model 1\n";
    out << "kind " << model_kind_name(model.kind()) << "\n";
    model.save(out);
}

std::unique_ptr<Model> load_model(std::istream& in) {
    expect(in, "sentistock-model");
    long version;
    if (!(in >> version) || version != 1)
        throw ValidationError("model file: unsupported container version");
    expect(in, "kind");
    std::string kind_name;
    if (!(in >> kind_name)) throw ValidationError("model file: missing kind");
    ModelKind kind;
    try {
        kind = model_kind_from_name(kind_name);
    } catch (const ConfigError&) {
        throw ValidationError("model file: unknown kind '" + kind_name + "'");
    }
    switch (kind) {
        case ModelKind::LR: return load_lr(in);
        case ModelKind::GP: return load_gp(in);
        case ModelKind::MLP: return load_mlp(in);
        case ModelKind::SMOREG: return load_smoreg(in);
        case ModelKind::RF: return load_rf(in);
    }
    throw ValidationError("unreachable model kind");
}

void save_model_file(const Model& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file " + path);
    save_model(model, out);
}

std::unique_ptr<Model> load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file " + path);
    return load_model(in);
}

}  // namespace sentistock
