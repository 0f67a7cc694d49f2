#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "models_detail.hpp"
#include "sentistock/error.hpp"
#include "sentistock/models.hpp"
#include "sentistock/util.hpp"

namespace sentistock {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::size_t MlpNetwork::parameter_count() const {
    return w1.size() + b1.size() + w2.size() + 1;
}

double MlpNetwork::forward(std::span<const double> x, std::vector<double>* activations) const {
    double out = b2;
    if (activations) activations->resize(static_cast<std::size_t>(hidden));
    for (int h = 0; h < hidden; ++h) {
        double z = b1[static_cast<std::size_t>(h)];
        const double* row = &w1[static_cast<std::size_t>(h) * static_cast<std::size_t>(inputs)];
        for (int j = 0; j < inputs; ++j) z += row[j] * x[static_cast<std::size_t>(j)];
        const double a = sigmoid(z);
        if (activations) (*activations)[static_cast<std::size_t>(h)] = a;
        out += w2[static_cast<std::size_t>(h)] * a;
    }
    return out;
}

MlpNetwork mlp_init(int inputs, int hidden, std::uint64_t seed) {
    if (inputs < 1 || hidden < 1)
        throw ValidationError("mlp_init: inputs and hidden must be >= 1");
    MlpNetwork net;
    net.inputs = inputs;
    net.hidden = hidden;
    net.w1.resize(static_cast<std::size_t>(hidden) * static_cast<std::size_t>(inputs));
    net.b1.resize(static_cast<std::size_t>(hidden));
    net.w2.resize(static_cast<std::size_t>(hidden));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    for (auto& w : net.w1) w = dist(rng);
    for (auto& w : net.b1) w = dist(rng);
    for (auto& w : net.w2) w = dist(rng);
    net.b2 = dist(rng);
    return net;
}

double mlp_loss(const MlpNetwork& net, const Matrix& X, const std::vector<double>& y) {
    double sum = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double e = net.forward(X[i]) - y[i];
        sum += e * e;
    }
    return sum / static_cast<double>(X.size());
}

MlpNetwork mlp_gradient(const MlpNetwork& net, const Matrix& X, const std::vector<double>& y) {
    MlpNetwork g;
    g.inputs = net.inputs;
    g.hidden = net.hidden;
    g.w1.assign(net.w1.size(), 0.0);
    g.b1.assign(net.b1.size(), 0.0);
    g.w2.assign(net.w2.size(), 0.0);
    g.b2 = 0.0;

    std::vector<double> act;
    const double scale = 2.0 / static_cast<double>(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double out = net.forward(X[i], &act);
        const double delta = scale * (out - y[i]);
        g.b2 += delta;
        for (int h = 0; h < net.hidden; ++h) {
            const auto hu = static_cast<std::size_t>(h);
            const double a = act[hu];
            g.w2[hu] += delta * a;
            const double dpre = delta * net.w2[hu] * a * (1.0 - a);
            g.b1[hu] += dpre;
            double* grow = &g.w1[hu * static_cast<std::size_t>(net.inputs)];
            for (int j = 0; j < net.inputs; ++j) grow[j] += dpre * X[i][static_cast<std::size_t>(j)];
        }
    }
    return g;
}

MlpModel::MlpModel(MlpNetwork net) : net_(std::move(net)) {}

double MlpModel::predict_raw(std::span<const double> x) const { return net_.forward(x); }

void MlpModel::save(std::ostream& out) const {
    out << "inputs " << net_.inputs << " hidden " << net_.hidden << "\n";
    for (double w : net_.w1) out << format_hex(w) << "\n";
    for (double w : net_.b1) out << format_hex(w) << "\n";
    for (double w : net_.w2) out << format_hex(w) << "\n";
    out << format_hex(net_.b2) << "\n";
}

std::unique_ptr<MlpModel> fit_mlp(const Matrix& X, const std::vector<double>& y,
                                  const Hyperparams& hp) {
    hp.validate();
    detail::check_training_data(X, y, 1, "fit_mlp");

    const int d = static_cast<int>(X.front().size());
    const std::size_t du = static_cast<std::size_t>(d);

    // Train in normalized coordinates (each feature and the target mapped to
    // [-1, 1]); the affine maps are folded back into the weights afterwards,
    // so callers only ever see a plain network. Constant columns map to 0.
    std::vector<double> f_scale(du, 0.0), f_shift(du, 0.0);
    for (std::size_t j = 0; j < du; ++j) {
        double lo = X[0][j], hi = X[0][j];
        for (const auto& row : X) {
            lo = std::min(lo, row[j]);
            hi = std::max(hi, row[j]);
        }
        if (hi > lo) {
            f_scale[j] = 2.0 / (hi - lo);
            f_shift[j] = -(hi + lo) / (hi - lo);
        }
    }
    const auto [y_lo_it, y_hi_it] = std::minmax_element(y.begin(), y.end());
    const double y_half = (*y_hi_it - *y_lo_it) / 2.0;
    const double y_mid = (*y_hi_it + *y_lo_it) / 2.0;

    Matrix Xn(X.size(), std::vector<double>(du));
    std::vector<double> yn(y.size(), 0.0);
    for (std::size_t i = 0; i < X.size(); ++i) {
        for (std::size_t j = 0; j < du; ++j) Xn[i][j] = f_scale[j] * X[i][j] + f_shift[j];
        if (y_half > 0) yn[i] = (y[i] - y_mid) / y_half;
    }

    const int hidden = hp.mlp_hidden > 0 ? hp.mlp_hidden : (d + 2) / 2;  // ceil((d+1)/2)
    MlpNetwork net = mlp_init(d, hidden, hp.seed);

    MlpNetwork velocity = net;
    std::fill(velocity.w1.begin(), velocity.w1.end(), 0.0);
    std::fill(velocity.b1.begin(), velocity.b1.end(), 0.0);
    std::fill(velocity.w2.begin(), velocity.w2.end(), 0.0);
    velocity.b2 = 0.0;

    for (int epoch = 0; epoch < hp.mlp_epochs; ++epoch) {
        const MlpNetwork g = mlp_gradient(net, Xn, yn);
        auto step = [&](std::vector<double>& w, std::vector<double>& v,
                        const std::vector<double>& grad) {
            for (std::size_t i = 0; i < w.size(); ++i) {
                v[i] = hp.mlp_momentum * v[i] - hp.mlp_learning_rate * grad[i];
                w[i] += v[i];
            }
        };
        step(net.w1, velocity.w1, g.w1);
        step(net.b1, velocity.b1, g.b1);
        step(net.w2, velocity.w2, g.w2);
        velocity.b2 = hp.mlp_momentum * velocity.b2 - hp.mlp_learning_rate * g.b2;
        net.b2 += velocity.b2;

        if (!std::isfinite(net.b2) || !std::isfinite(g.b2)) {
            throw Error("fit_mlp: loss diverged at epoch " + std::to_string(epoch) +
                        "; lower mlp_learning_rate");
        }
    }
    if (!std::isfinite(mlp_loss(net, Xn, yn)))
        throw Error("fit_mlp: training ended with non-finite loss; lower mlp_learning_rate");

    // Fold the normalization into the network: x'_j = a_j x_j + c_j composes
    // into layer 1, and y = y_half * out + y_mid composes into the output.
    for (int h = 0; h < hidden; ++h) {
        const auto hu = static_cast<std::size_t>(h);
        double shift = 0;
        for (std::size_t j = 0; j < du; ++j) {
            shift += net.w1[hu * du + j] * f_shift[j];
            net.w1[hu * du + j] *= f_scale[j];
        }
        net.b1[hu] += shift;
        net.w2[hu] *= y_half;
    }
    net.b2 = y_half * net.b2 + y_mid;

    return std::make_unique<MlpModel>(std::move(net));
}

}  // namespace sentistock
