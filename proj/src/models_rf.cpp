#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "models_detail.hpp"
#include "sentistock/error.hpp"
#include "sentistock/models.hpp"
#include "sentistock/util.hpp"

namespace sentistock {

double RfTree::predict(std::span<const double> x) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const RfNode& n = nodes[static_cast<std::size_t>(node)];
        node = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(node)].value;
}

namespace {

struct TreeBuilder {
    const Matrix& X;
    const std::vector<double>& y;
    int mtry;
    int min_leaf;
    std::mt19937_64& rng;
    std::vector<RfNode> nodes;
    std::vector<int> feature_pool;

    int build(std::vector<std::size_t>& rows, std::size_t begin, std::size_t end) {
        const auto count = end - begin;
        double sum = 0, sum2 = 0;
        for (std::size_t i = begin; i < end; ++i) {
            sum += y[rows[i]];
            sum2 += y[rows[i]] * y[rows[i]];
        }
        const double mean = sum / static_cast<double>(count);
        const double sse = sum2 - sum * mean;

        const auto leaf = [&] {
            nodes.push_back(RfNode{-1, 0, -1, -1, mean});
            return static_cast<int>(nodes.size() - 1);
        };
        if (count < 2 * static_cast<std::size_t>(min_leaf) || sse <= 1e-12) return leaf();

        // Sample candidate features without replacement.
        for (std::size_t i = 0; i < feature_pool.size(); ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, feature_pool.size() - 1);
            std::swap(feature_pool[i], feature_pool[pick(rng)]);
        }

        int best_feature = -1;
        double best_threshold = 0;
        double best_score = sse;  // weighted child SSE; must strictly improve
        std::vector<std::size_t> order(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                       rows.begin() + static_cast<std::ptrdiff_t>(end));
        for (int fi = 0; fi < mtry; ++fi) {
            const int feature = feature_pool[static_cast<std::size_t>(fi)];
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return X[a][static_cast<std::size_t>(feature)] <
                       X[b][static_cast<std::size_t>(feature)];
            });
            double left_sum = 0, left_sum2 = 0;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                const double yi = y[order[i]];
                left_sum += yi;
                left_sum2 += yi * yi;
                const double xa = X[order[i]][static_cast<std::size_t>(feature)];
                const double xb = X[order[i + 1]][static_cast<std::size_t>(feature)];
                if (xa == xb) continue;
                const auto nl = i + 1;
                const auto nr = order.size() - nl;
                if (nl < static_cast<std::size_t>(min_leaf) ||
                    nr < static_cast<std::size_t>(min_leaf))
                    continue;
                const double right_sum = sum - left_sum;
                const double right_sum2 = sum2 - left_sum2;
                const double score =
                    (left_sum2 - left_sum * left_sum / static_cast<double>(nl)) +
                    (right_sum2 - right_sum * right_sum / static_cast<double>(nr));
                if (score < best_score - 1e-12) {
                    best_score = score;
                    best_feature = feature;
                    best_threshold = 0.5 * (xa + xb);
                }
            }
        }
        if (best_feature < 0) return leaf();

        const auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                        rows.begin() + static_cast<std::ptrdiff_t>(end),
                                        [&](std::size_t r) {
                                            return X[r][static_cast<std::size_t>(best_feature)] <=
                                                   best_threshold;
                                        });
        const auto split_at = static_cast<std::size_t>(mid - rows.begin());
        nodes.push_back(RfNode{best_feature, best_threshold, -1, -1, 0});
        const auto self = static_cast<int>(nodes.size() - 1);
        const int left = build(rows, begin, split_at);
        const int right = build(rows, split_at, end);
        nodes[static_cast<std::size_t>(self)].left = left;
        nodes[static_cast<std::size_t>(self)].right = right;
        return self;
    }
};

}  // namespace

RfModel::RfModel(std::vector<RfTree> trees, std::size_t features)
    : trees_(std::move(trees)), features_(features) {}

double RfModel::predict_raw(std::span<const double> x) const {
    double sum = 0;
    for (const auto& tree : trees_) sum += tree.predict(x);
    return sum / static_cast<double>(trees_.size());
}

void RfModel::save(std::ostream& out) const {
    out << "trees " << trees_.size() << " features " << features_ << "\n";
    for (const auto& tree : trees_) {
        out << "nodes " << tree.nodes.size() << "\n";
        for (const auto& n : tree.nodes)
            out << n.feature << " " << format_hex(n.threshold) << " " << n.left << " "
                << n.right << " " << format_hex(n.value) << "\n";
    }
}

std::unique_ptr<RfModel> fit_rf(const Matrix& X, const std::vector<double>& y,
                                const Hyperparams& hp) {
    hp.validate();
    detail::check_training_data(X, y, 1, "fit_rf");

    const std::size_t n = X.size();
    const int d = static_cast<int>(X.front().size());
    int mtry = d;
    if (hp.rf_feature_rule == RfFeatureRule::Sqrt)
        mtry = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
    else if (hp.rf_feature_rule == RfFeatureRule::Third)
        mtry = std::max(1, d / 3);
    mtry = std::clamp(mtry, 1, d);

    std::vector<RfTree> trees;
    trees.reserve(static_cast<std::size_t>(hp.rf_trees));
    std::vector<std::vector<std::uint8_t>> in_bag(
        static_cast<std::size_t>(hp.rf_trees), std::vector<std::uint8_t>(n, 0));

    for (int t = 0; t < hp.rf_trees; ++t) {
        std::mt19937_64 rng(splitmix64(hp.seed + static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> rows;
        rows.reserve(n);
        if (hp.rf_bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t r = pick(rng);
                rows.push_back(r);
                in_bag[static_cast<std::size_t>(t)][r] = 1;
            }
        } else {
            rows.resize(n);
            std::iota(rows.begin(), rows.end(), std::size_t{0});
            std::fill(in_bag[static_cast<std::size_t>(t)].begin(),
                      in_bag[static_cast<std::size_t>(t)].end(), std::uint8_t{1});
        }

        TreeBuilder builder{X, y, mtry, hp.rf_min_leaf, rng, {}, {}};
        builder.feature_pool.resize(static_cast<std::size_t>(d));
        std::iota(builder.feature_pool.begin(), builder.feature_pool.end(), 0);
        builder.build(rows, 0, rows.size());  // pushes the root at index 0
        trees.push_back(RfTree{std::move(builder.nodes)});
    }

    auto model = std::make_unique<RfModel>(std::move(trees), static_cast<std::size_t>(d));

    model->oob_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0;
        int used = 0;
        for (int t = 0; t < hp.rf_trees; ++t) {
            if (in_bag[static_cast<std::size_t>(t)][i]) continue;
            sum += model->trees()[static_cast<std::size_t>(t)].predict(X[i]);
            ++used;
        }
        model->oob_[i] = used > 0 ? sum / used : model->predict_one(X[i]);
    }
    return model;
}

}  // namespace sentistock
