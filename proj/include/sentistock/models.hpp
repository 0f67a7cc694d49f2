#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sentistock {

enum class ModelKind { GP, LR, MLP, SMOREG, RF };

std::string model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

enum class RfFeatureRule {
    Sqrt,   // ceil(sqrt(d)) candidates per split (sign targets)
    Third,  // max(1, d/3) candidates per split (regression targets)
    All,
};

enum class SvrKernel { Linear, Rbf };

struct Hyperparams {
    double gp_length_scale = 1.0;
    double gp_noise = 1.0;  // sigma^2

    double lr_lambda = 0.0;  // ridge strength; singular systems refit with 1e-8

    int mlp_hidden = 0;  // 0 -> ceil((features + 1) / 2)
    double mlp_learning_rate = 0.3;
    double mlp_momentum = 0.2;
    int mlp_epochs = 500;

    double svr_c = 1.0;
    double svr_epsilon = 1e-3;
    double svr_tolerance = 1e-3;
    SvrKernel svr_kernel = SvrKernel::Linear;
    double svr_gamma = 1.0;  // RBF exp(-gamma * |u-v|^2)

    int rf_trees = 100;
    RfFeatureRule rf_feature_rule = RfFeatureRule::Third;
    int rf_min_leaf = 1;
    bool rf_bootstrap = true;

    std::uint64_t seed = 1;

    void validate() const;  // throws ConfigError on out-of-range fields
};

using Matrix = std::vector<std::vector<double>>;

class Model {
public:
    virtual ~Model() = default;

    double predict_one(std::span<const double> x) const;
    std::vector<double> predict(const Matrix& X) const;

    virtual ModelKind kind() const = 0;
    virtual std::size_t feature_count() const = 0;
    virtual void save(std::ostream& out) const = 0;

protected:
    virtual double predict_raw(std::span<const double> x) const = 0;
};

// ---- Linear regression (ridge-stabilized normal equations) ----

class LrModel : public Model {
public:
    LrModel(std::vector<double> weights, double bias);

    ModelKind kind() const override { return ModelKind::LR; }
    std::size_t feature_count() const override { return weights_.size(); }
    void save(std::ostream& out) const override;

    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }

protected:
    double predict_raw(std::span<const double> x) const override;

private:
    std::vector<double> weights_;
    double bias_;
};

// ---- Gaussian process regression (RBF kernel, centered targets) ----

class GpModel : public Model {
public:
    GpModel(Matrix train_x, std::vector<double> alpha, double mean, double length_scale);

    ModelKind kind() const override { return ModelKind::GP; }
    std::size_t feature_count() const override;
    void save(std::ostream& out) const override;

protected:
    double predict_raw(std::span<const double> x) const override;

private:
    Matrix train_x_;
    std::vector<double> alpha_;
    double mean_;
    double length_scale_;
};

// ---- Multilayer perceptron (1 hidden sigmoid layer, linear output) ----

// Exposed so loss/gradient can be checked against finite differences.
struct MlpNetwork {
    int inputs = 0;
    int hidden = 0;
    std::vector<double> w1;  // hidden x inputs, row-major
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // hidden
    double b2 = 0;

    std::size_t parameter_count() const;
    double forward(std::span<const double> x, std::vector<double>* activations = nullptr) const;
};

MlpNetwork mlp_init(int inputs, int hidden, std::uint64_t seed);
double mlp_loss(const MlpNetwork& net, const Matrix& X, const std::vector<double>& y);
// Gradient of mlp_loss w.r.t. every parameter, same shape as the network.
MlpNetwork mlp_gradient(const MlpNetwork& net, const Matrix& X, const std::vector<double>& y);

class MlpModel : public Model {
public:
    explicit MlpModel(MlpNetwork net);

    ModelKind kind() const override { return ModelKind::MLP; }
    std::size_t feature_count() const override { return static_cast<std::size_t>(net_.inputs); }
    void save(std::ostream& out) const override;

    const MlpNetwork& network() const { return net_; }

protected:
    double predict_raw(std::span<const double> x) const override;

private:
    MlpNetwork net_;
};

// ---- Support vector regression via sequential minimal optimization ----

class SmoregModel : public Model {
public:
    SmoregModel(Matrix support_x, std::vector<double> beta, double bias, SvrKernel kernel,
                double gamma, std::size_t features);

    ModelKind kind() const override { return ModelKind::SMOREG; }
    std::size_t feature_count() const override { return features_; }
    void save(std::ostream& out) const override;

    // beta_i = alpha_i - alpha*_i for the retained support vectors.
    const std::vector<double>& beta() const { return beta_; }
    double bias() const { return bias_; }

protected:
    double predict_raw(std::span<const double> x) const override;

private:
    Matrix support_x_;
    std::vector<double> beta_;
    double bias_;
    SvrKernel kernel_;
    double gamma_;
    std::size_t features_;
};

// Dual state of the fit, exposed for KKT checks.
struct SmoregFitInfo {
    std::vector<double> beta;  // one per training row, in [-C, C], summing to ~0
    double bias = 0;
    long iterations = 0;
};

// ---- Random forest of variance-reduction CART trees ----

struct RfNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;
};

struct RfTree {
    std::vector<RfNode> nodes;  // nodes[0] is the root
    double predict(std::span<const double> x) const;
};

class RfModel : public Model {
public:
    RfModel(std::vector<RfTree> trees, std::size_t features);

    ModelKind kind() const override { return ModelKind::RF; }
    std::size_t feature_count() const override { return features_; }
    void save(std::ostream& out) const override;

    const std::vector<RfTree>& trees() const { return trees_; }
    // Mean over trees whose bootstrap sample missed the row; rows seen by
    // every tree fall back to the full-forest prediction. Empty when the
    // forest was loaded from a file rather than fitted.
    const std::vector<double>& oob_predictions() const { return oob_; }

protected:
    double predict_raw(std::span<const double> x) const override;

private:
    friend std::unique_ptr<RfModel> fit_rf(const Matrix&, const std::vector<double>&,
                                           const Hyperparams&);
    std::vector<RfTree> trees_;
    std::size_t features_;
    std::vector<double> oob_;
};

// ---- Fitting ----

std::unique_ptr<LrModel> fit_lr(const Matrix& X, const std::vector<double>& y,
                                const Hyperparams& hp = {});
std::unique_ptr<GpModel> fit_gp(const Matrix& X, const std::vector<double>& y,
                                const Hyperparams& hp = {});
std::unique_ptr<MlpModel> fit_mlp(const Matrix& X, const std::vector<double>& y,
                                  const Hyperparams& hp = {});
std::unique_ptr<SmoregModel> fit_smoreg(const Matrix& X, const std::vector<double>& y,
                                        const Hyperparams& hp = {},
                                        SmoregFitInfo* info = nullptr);
std::unique_ptr<RfModel> fit_rf(const Matrix& X, const std::vector<double>& y,
                                const Hyperparams& hp = {});

std::unique_ptr<Model> fit_model(ModelKind kind, const Matrix& X, const std::vector<double>& y,
                                 const Hyperparams& hp = {});

// ---- Persistence ----
// Text container, one token stream: "sentistock-model 1", kind line, then
// kind-specific payload with doubles in hexfloat so round trips are bit-exact.

void save_model(const Model& model, std::ostream& out);
std::unique_ptr<Model> load_model(std::istream& in);
void save_model_file(const Model& model, const std::string& path);
std::unique_ptr<Model> load_model_file(const std::string& path);

}  // namespace sentistock
