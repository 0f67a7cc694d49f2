#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <ostream>

#include "models_detail.hpp"
#include "sentistock/error.hpp"
#include "sentistock/models.hpp"
#include "sentistock/util.hpp"

namespace sentistock {

namespace {

double rbf(std::span<const double> u, std::span<const double> v, double length_scale) {
    double d2 = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double diff = u[i] - v[i];
        d2 += diff * diff;
    }
    return std::exp(-d2 / (2.0 * length_scale * length_scale));
}

}  // namespace

GpModel::GpModel(Matrix train_x, std::vector<double> alpha, double mean, double length_scale)
    : train_x_(std::move(train_x)), alpha_(std::move(alpha)), mean_(mean),
      length_scale_(length_scale) {}

std::size_t GpModel::feature_count() const { return train_x_.front().size(); }

double GpModel::predict_raw(std::span<const double> x) const {
    double v = mean_;
    for (std::size_t i = 0; i < train_x_.size(); ++i)
        v += alpha_[i] * rbf(x, train_x_[i], length_scale_);
    return v;
}

void GpModel::save(std::ostream& out) const {
    out << "rows " << train_x_.size() << " features " << train_x_.front().size() << "\n";
    out << format_hex(mean_) << " " << format_hex(length_scale_) << "\n";
    for (std::size_t i = 0; i < train_x_.size(); ++i) {
        for (double v : train_x_[i]) out << format_hex(v) << " ";
        out << format_hex(alpha_[i]) << "\n";
    }
}

std::unique_ptr<GpModel> fit_gp(const Matrix& X, const std::vector<double>& y,
                                const Hyperparams& hp) {
    hp.validate();
    detail::check_training_data(X, y, 1, "fit_gp");

    const auto n = static_cast<Eigen::Index>(X.size());
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double k = rbf(X[static_cast<std::size_t>(i)], X[static_cast<std::size_t>(j)],
                                 hp.gp_length_scale);
            K(i, j) = k;
            K(j, i) = k;
        }
        K(i, i) += hp.gp_noise;
    }
    Eigen::VectorXd centered(n);
    for (Eigen::Index i = 0; i < n; ++i) centered(i) = y[static_cast<std::size_t>(i)] - mean;

    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        throw Error("fit_gp: kernel matrix not positive definite; increase gp_noise");
    Eigen::VectorXd alpha = llt.solve(centered);
    if (!alpha.allFinite())
        throw Error("fit_gp: solve produced non-finite coefficients; increase gp_noise");

    return std::make_unique<GpModel>(X, std::vector<double>(alpha.data(), alpha.data() + n),
                                     mean, hp.gp_length_scale);
}

}  // namespace sentistock
