#include <cmath>

#include "sentistock/error.hpp"
#include "sentistock/models.hpp"

namespace sentistock {

std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::GP: return "gp";
        case ModelKind::LR: return "lr";
        case ModelKind::MLP: return "mlp";
        case ModelKind::SMOREG: return "smoreg";
        case ModelKind::RF: return "rf";
    }
    throw ValidationError("unreachable model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "gp") return ModelKind::GP;
    if (name == "lr") return ModelKind::LR;
    if (name == "mlp") return ModelKind::MLP;
    if (name == "smoreg") return ModelKind::SMOREG;
    if (name == "rf") return ModelKind::RF;
    throw ConfigError("unknown model kind '" + name + "'");
}

void Hyperparams::validate() const {
    if (gp_length_scale <= 0) throw ConfigError("gp_length_scale must be > 0");
    if (gp_noise <= 0) throw ConfigError("gp_noise must be > 0");
    if (lr_lambda < 0) throw ConfigError("lr_lambda must be >= 0");
    if (mlp_hidden < 0) throw ConfigError("mlp_hidden must be >= 0");
    if (mlp_learning_rate <= 0) throw ConfigError("mlp_learning_rate must be > 0");
    if (mlp_momentum < 0 || mlp_momentum >= 1)
        throw ConfigError("mlp_momentum must be in [0, 1)");
    if (mlp_epochs < 1) throw ConfigError("mlp_epochs must be >= 1");
    if (svr_c <= 0) throw ConfigError("svr_c must be > 0");
    if (svr_epsilon < 0) throw ConfigError("svr_epsilon must be >= 0");
    if (svr_tolerance <= 0) throw ConfigError("svr_tolerance must be > 0");
    if (svr_gamma <= 0) throw ConfigError("svr_gamma must be > 0");
    if (rf_trees < 1) throw ConfigError("rf_trees must be >= 1");
    if (rf_min_leaf < 1) throw ConfigError("rf_min_leaf must be >= 1");
}

double Model::predict_one(std::span<const double> x) const {
    if (x.size() != feature_count())
        throw ValidationError("predict: expected " + std::to_string(feature_count()) +
                              " features, got " + std::to_string(x.size()));
    return predict_raw(x);
}

std::vector<double> Model::predict(const Matrix& X) const {
    std::vector<double> out;
    out.reserve(X.size());
    for (const auto& row : X) out.push_back(predict_one(row));
    return out;
}

std::unique_ptr<Model> fit_model(ModelKind kind, const Matrix& X, const std::vector<double>& y,
                                 const Hyperparams& hp) {
    switch (kind) {
        case ModelKind::GP: return fit_gp(X, y, hp);
        case ModelKind::LR: return fit_lr(X, y, hp);
        case ModelKind::MLP: return fit_mlp(X, y, hp);
        case ModelKind::SMOREG: return fit_smoreg(X, y, hp);
        case ModelKind::RF: return fit_rf(X, y, hp);
    }
    throw ValidationError("unreachable model kind");
}

namespace detail {

void check_training_data(const Matrix& X, const std::vector<double>& y, std::size_t min_rows,
                         const char* what) {
    if (X.size() != y.size())
        throw ValidationError(std::string(what) + ": X and y row counts differ");
    if (X.size() < min_rows)
        throw ValidationError(std::string(what) + ": need at least " +
                              std::to_string(min_rows) + " training rows, got " +
                              std::to_string(X.size()));
    const std::size_t d = X.front().size();
    if (d == 0) throw ValidationError(std::string(what) + ": zero-width feature vectors");
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].size() != d)
            throw ValidationError(std::string(what) + ": ragged feature row " +
                                  std::to_string(i));
        for (double v : X[i])
            if (!std::isfinite(v))
                throw ValidationError(std::string(what) + ": non-finite feature in row " +
                                      std::to_string(i));
        if (!std::isfinite(y[i]))
            throw ValidationError(std::string(what) + ": non-finite target in row " +
                                  std::to_string(i));
    }
}

}  // namespace detail

}  // namespace sentistock
