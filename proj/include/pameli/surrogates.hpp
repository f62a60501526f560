#ifndef PAMELI_SURROGATES_HPP
#define PAMELI_SURROGATES_HPP

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pameli/core.hpp"
#include "pameli/rng.hpp"

namespace pameli {

enum class SurrogateFamily { MLP, TSFIS, SVR };

std::string to_string(SurrogateFamily family);

struct MlpHyper {
    int layers = 1;        // hidden layers, 1..4
    int width = 8;         // 2^3 .. 2^10
    double learning_rate = 1e-3;
};

struct TsfisHyper {
    int rules = 8;         // 2^3 .. 2^8
    double learning_rate = 1e-3;
};

struct SvrHyper {
    double regularization = 1.0; // C
    double epsilon = 0.1;        // insensitive tube half-width
};

// One gene of an LI: a regression family plus its hyperparameters, drawn
// from the fixed grids.
struct SurrogateSpec {
    SurrogateFamily family = SurrogateFamily::MLP;
    MlpHyper mlp{};
    TsfisHyper tsfis{};
    SvrHyper svr{};

    std::string summary() const;
};

struct TrainingReport {
    double initial_train_mse = 0.0;
    double final_train_mse = 0.0;
    double final_validation_mse = 0.0;
    int epochs_run = 0;
    bool degenerate_targets = false;
    double solver_residual = 0.0; // SVR: KKT violation at convergence
};

// Immutable fitted regressor; safe to share across threads.
class TrainedSurrogate {
public:
    virtual ~TrainedSurrogate() = default;

    virtual double predict(const Solution& x) const;
    virtual std::vector<double> predict_batch(std::span<const Solution> xs) const = 0;

    // Flat parameter vector (weights/biases, rule parameters, or dual
    // coefficients + bias).
    virtual const std::vector<double>& parameters() const = 0;

    const SurrogateSpec& spec() const { return spec_; }
    const TrainingReport& report() const { return report_; }

protected:
    TrainedSurrogate(SurrogateSpec spec, TrainingReport report)
        : spec_(std::move(spec)), report_(std::move(report)) {}

    SurrogateSpec spec_;
    TrainingReport report_;
};

struct TrainerOptions {
    double train_fraction = 0.7;
    int max_epochs = 1000;
    int patience = 50;
    int batch_size = 32;
};

// Fits the spec'd regressor to (inputs, targets). Inputs are min-max
// normalized with the search-space bounds; targets are used raw. MLP/TSFIS
// run mini-batch Adam with early stopping on the 30% validation split; SVR
// solves the epsilon-insensitive dual. Constant targets yield a flagged
// constant predictor.
std::unique_ptr<TrainedSurrogate> train_surrogate(const SurrogateSpec& spec,
                                                  std::span<const Solution> inputs,
                                                  std::span<const double> targets,
                                                  const SearchSpace& space,
                                                  RngStream& rng,
                                                  const TrainerOptions& options = {});

// Uniform draw of a family from the pool and of each hyperparameter from its
// grid.
SurrogateSpec sample_surrogate_spec(std::span<const SurrogateFamily> pool, RngStream& rng);

// Mean squared prediction error over the dataset, averaged over points and
// objectives: (1 / (m N)) sum_x sum_j (F~_j(x) - F_j(x))^2.
double approximation_error(std::span<const TrainedSurrogate* const> per_objective, const Dataset& dataset);

// ---------------------------------------------------------------------------
// Differentiable cores. Exposed so gradient checks can compare the analytic
// loss gradients against finite differences.

class DifferentiableCore {
public:
    virtual ~DifferentiableCore() = default;
    virtual std::size_t parameter_count() const = 0;
    virtual void initialize(std::vector<double>& theta, RngStream& rng) const = 0;
    // Batch MSE and its gradient; X has one normalized input per row.
    virtual double loss_and_gradient(const std::vector<double>& theta, const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& y, std::vector<double>& grad) const = 0;
    virtual Eigen::VectorXd predict(const std::vector<double>& theta, const Eigen::MatrixXd& X) const = 0;
};

// Fully-connected ReLU network, scalar ReLU output, Glorot-uniform init.
class MlpCore final : public DifferentiableCore {
public:
    MlpCore(std::size_t input_dim, int hidden_layers, int width);
    std::size_t parameter_count() const override;
    void initialize(std::vector<double>& theta, RngStream& rng) const override;
    double loss_and_gradient(const std::vector<double>& theta, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, std::vector<double>& grad) const override;
    Eigen::VectorXd predict(const std::vector<double>& theta, const Eigen::MatrixXd& X) const override;

private:
    std::size_t input_dim_;
    int layers_;
    int width_;
};

// First-order Takagi-Sugeno fuzzy system with Gaussian memberships (product
// t-norm, evaluated in log space), affine consequents and a ReLU output.
class TsfisCore final : public DifferentiableCore {
public:
    TsfisCore(std::size_t input_dim, int rules);
    std::size_t parameter_count() const override;
    void initialize(std::vector<double>& theta, RngStream& rng) const override;
    double loss_and_gradient(const std::vector<double>& theta, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, std::vector<double>& grad) const override;
    Eigen::VectorXd predict(const std::vector<double>& theta, const Eigen::MatrixXd& X) const override;

    // Normalized rule weights at one input; positive, sum to 1.
    Eigen::VectorXd rule_weights(const std::vector<double>& theta, const Eigen::VectorXd& x) const;

    // Centers are seeded from training rows, rule constants from their
    // targets; called by the trainer before initialize() draws are used.
    void seed_from_data(std::vector<double>& theta, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        RngStream& rng) const;

private:
    std::size_t input_dim_;
    int rules_;
};

// Epsilon-insensitive SVR dual, solved by SMO-style maximal-violating-pair
// updates on beta = alpha - alpha*.
struct SvrDualSolution {
    std::vector<double> beta;
    double bias = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
};

SvrDualSolution solve_svr_dual(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& y,
                               double C, double epsilon, double tolerance = 1e-3,
                               int max_iterations = 200000);

} // namespace pameli

#endif
