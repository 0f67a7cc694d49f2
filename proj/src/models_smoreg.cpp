#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "models_detail.hpp"
#include "sentistock/error.hpp"
#include "sentistock/models.hpp"
#include "sentistock/util.hpp"

namespace sentistock {

namespace {

double kernel_eval(SvrKernel kernel, double gamma, std::span<const double> u,
                   std::span<const double> v) {
    if (kernel == SvrKernel::Linear) {
        double dot = 0;
        for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
        return dot;
    }
    double d2 = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double diff = u[i] - v[i];
        d2 += diff * diff;
    }
    return std::exp(-gamma * d2);
}

// One SMO pair step: minimize the dual restricted to beta[a] + beta[b] = s.
// The epsilon terms make the objective piecewise quadratic with breakpoints
// where either variable crosses zero, so the exact minimum is found by
// checking each piece.
struct PairObjective {
    double kaa, kbb, kab;
    double ra, rb;  // other rows' contribution to out[a], out[b]
    double ya, yb;
    double s, eps;

    double eval(double t) const {
        const double u = s - t;
        return 0.5 * kaa * t * t + 0.5 * kbb * u * u + kab * t * u + ra * t + rb * u -
               ya * t - yb * u + eps * (std::abs(t) + std::abs(u));
    }

    double minimize(double lo, double hi) const {
        const double eta = kaa + kbb - 2.0 * kab;
        const double c0 = s * (kab - kbb) + (ra - rb) - (ya - yb);

        std::vector<double> pts{lo, hi};
        if (lo < 0 && 0 < hi) pts.push_back(0.0);
        if (lo < s && s < hi) pts.push_back(s);
        std::sort(pts.begin(), pts.end());

        std::vector<double> candidates(pts.begin(), pts.end());
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            if (eta <= 0) continue;
            const double mid = 0.5 * (pts[i] + pts[i + 1]);
            const double sg = (mid > 0 ? 1.0 : mid < 0 ? -1.0 : 0.0) -
                              (s - mid > 0 ? 1.0 : s - mid < 0 ? -1.0 : 0.0);
            const double vertex = -(c0 + eps * sg) / eta;
            if (vertex >= pts[i] && vertex <= pts[i + 1]) candidates.push_back(vertex);
        }

        double best = candidates.front();
        double best_val = eval(best);
        for (double t : candidates) {
            const double v = eval(t);
            if (v < best_val) {
                best_val = v;
                best = t;
            }
        }
        return best;
    }
};

struct BiasBounds {
    double low = -std::numeric_limits<double>::infinity();
    double up = std::numeric_limits<double>::infinity();
    std::size_t i_low = 0;
    std::size_t i_up = 0;
};

// KKT feasibility interval for the bias. At the optimum every row's allowed
// range intersects, i.e. low <= up; the maximal violating pair is (i_low, i_up).
BiasBounds bias_bounds(const std::vector<double>& beta, const std::vector<double>& f_minus_out,
                       double c, double eps) {
    const double edge = 1e-8 * c;
    BiasBounds b;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        const double fi = f_minus_out[i];
        if (beta[i] < c - edge) {
            const double lower = beta[i] < -edge ? fi + eps : fi - eps;
            if (lower > b.low) {
                b.low = lower;
                b.i_low = i;
            }
        }
        if (beta[i] > -c + edge) {
            const double upper = beta[i] > edge ? fi - eps : fi + eps;
            if (upper < b.up) {
                b.up = upper;
                b.i_up = i;
            }
        }
    }
    return b;
}

}  // namespace

SmoregModel::SmoregModel(Matrix support_x, std::vector<double> beta, double bias,
                         SvrKernel kernel, double gamma, std::size_t features)
    : support_x_(std::move(support_x)), beta_(std::move(beta)), bias_(bias), kernel_(kernel),
      gamma_(gamma), features_(features) {}

double SmoregModel::predict_raw(std::span<const double> x) const {
    double v = bias_;
    for (std::size_t i = 0; i < support_x_.size(); ++i)
        v += beta_[i] * kernel_eval(kernel_, gamma_, support_x_[i], x);
    return v;
}

void SmoregModel::save(std::ostream& out) const {
    out << "kernel " << (kernel_ == SvrKernel::Linear ? "linear" : "rbf") << " gamma "
        << format_hex(gamma_) << "\n";
    out << "vectors " << support_x_.size() << " features " << features_ << "\n";
    out << format_hex(bias_) << "\n";
    for (std::size_t i = 0; i < support_x_.size(); ++i) {
        for (double v : support_x_[i]) out << format_hex(v) << " ";
        out << format_hex(beta_[i]) << "\n";
    }
}

std::unique_ptr<SmoregModel> fit_smoreg(const Matrix& X, const std::vector<double>& y,
                                        const Hyperparams& hp, SmoregFitInfo* info) {
    hp.validate();
    detail::check_training_data(X, y, 1, "fit_smoreg");

    const std::size_t n = X.size();
    const double c = hp.svr_c;
    const double eps = hp.svr_epsilon;

    Matrix K(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            K[i][j] = K[j][i] = kernel_eval(hp.svr_kernel, hp.svr_gamma, X[i], X[j]);

    std::vector<double> beta(n, 0.0);
    std::vector<double> out(n, 0.0);
    std::vector<double> f(n);  // y_i - out_i
    for (std::size_t i = 0; i < n; ++i) f[i] = y[i];

    const long max_iter = 100000 + 1000 * static_cast<long>(n);
    long iter = 0;
    for (; iter < max_iter; ++iter) {
        const BiasBounds bounds = bias_bounds(beta, f, c, eps);
        if (bounds.low <= bounds.up + hp.svr_tolerance) break;

        const std::size_t a = bounds.i_low;
        const std::size_t b = bounds.i_up;
        const double s = beta[a] + beta[b];

        PairObjective obj;
        obj.kaa = K[a][a];
        obj.kbb = K[b][b];
        obj.kab = K[a][b];
        obj.ra = out[a] - beta[a] * K[a][a] - beta[b] * K[a][b];
        obj.rb = out[b] - beta[a] * K[a][b] - beta[b] * K[b][b];
        obj.ya = y[a];
        obj.yb = y[b];
        obj.s = s;
        obj.eps = eps;

        const double lo = std::max(-c, s - c);
        const double hi = std::min(c, s + c);
        double t = obj.minimize(lo, hi);
        const double snap = 1e-10 * (1.0 + c);
        if (t > hi - snap) t = hi;
        else if (t < lo + snap) t = lo;
        if (std::abs(t) < 1e-12) t = 0;
        else if (std::abs(t - s) < 1e-12) t = s;  // leaves beta[b] at exactly zero

        const double delta = t - beta[a];
        if (std::abs(delta) < 1e-14) break;  // numerically stuck at the optimum

        beta[a] = t;
        beta[b] = s - t;
        for (std::size_t k = 0; k < n; ++k) {
            out[k] += delta * (K[a][k] - K[b][k]);
            f[k] = y[k] - out[k];
        }
    }
    if (iter >= max_iter)
        throw Error("fit_smoreg: no convergence after " + std::to_string(iter) + " iterations");

    const BiasBounds final_bounds = bias_bounds(beta, f, c, eps);
    const double bias = 0.5 * (final_bounds.low + final_bounds.up);

    if (info) {
        info->beta = beta;
        info->bias = bias;
        info->iterations = iter;
    }

    Matrix support_x;
    std::vector<double> support_beta;
    for (std::size_t i = 0; i < n; ++i) {
        if (beta[i] != 0.0) {
            support_x.push_back(X[i]);
            support_beta.push_back(beta[i]);
        }
    }
    return std::make_unique<SmoregModel>(std::move(support_x), std::move(support_beta), bias,
                                         hp.svr_kernel, hp.svr_gamma, X.front().size());
}

}  // namespace sentistock
