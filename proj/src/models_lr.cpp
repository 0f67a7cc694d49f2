#include <Eigen/Dense>
#include <cmath>
#include <ostream>

#include "models_detail.hpp"
#include "sentistock/error.hpp"
#include "sentistock/models.hpp"
#include "sentistock/util.hpp"

namespace sentistock {

LrModel::LrModel(std::vector<double> weights, double bias)
    : weights_(std::move(weights)), bias_(bias) {}

double LrModel::predict_raw(std::span<const double> x) const {
    double v = bias_;
    for (std::size_t i = 0; i < weights_.size(); ++i) v += weights_[i] * x[i];
    return v;
}

void LrModel::save(std::ostream& out) const {
    out << "features " << weights_.size() << "\n";
    for (double w : weights_) out << format_hex(w) << "\n";
    out << format_hex(bias_) << "\n";
}

namespace {

// Solves (A^T A + R) w = A^T y where A carries a trailing all-ones column and
// R penalizes the weights but not the bias.
std::vector<double> solve_normal_equations(const Matrix& X, const std::vector<double>& y,
                                           double lambda) {
    const auto n = static_cast<Eigen::Index>(X.size());
    const auto d = static_cast<Eigen::Index>(X.front().size());
    Eigen::MatrixXd A(n, d + 1);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) A(i, j) = X[i][j];
        A(i, d) = 1.0;
        b(i) = y[i];
    }
    Eigen::MatrixXd gram = A.transpose() * A;
    for (Eigen::Index j = 0; j < d; ++j) gram(j, j) += lambda;
    Eigen::VectorXd rhs = A.transpose() * b;
    Eigen::VectorXd w = gram.ldlt().solve(rhs);

    // Accept the solution only if it actually satisfies the system; a singular
    // gram matrix can produce garbage without Eigen reporting failure.
    const double residual = (gram * w - rhs).norm();
    const double scale = rhs.norm() + 1.0;
    if (!w.allFinite() || residual > 1e-6 * scale) return {};
    return {w.data(), w.data() + w.size()};
}

}  // namespace

std::unique_ptr<LrModel> fit_lr(const Matrix& X, const std::vector<double>& y,
                                const Hyperparams& hp) {
    hp.validate();
    detail::check_training_data(X, y, 2, "fit_lr");

    std::vector<double> sol = solve_normal_equations(X, y, hp.lr_lambda);
    if (sol.empty()) sol = solve_normal_equations(X, y, std::max(hp.lr_lambda, 1e-8));
    if (sol.empty())
        throw Error("fit_lr: normal equations unsolvable even with ridge fallback");

    double bias = sol.back();
    sol.pop_back();
    return std::make_unique<LrModel>(std::move(sol), bias);
}

}  // namespace sentistock
