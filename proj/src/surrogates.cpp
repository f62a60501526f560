#include "pameli/surrogates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace pameli {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double WIDTH_FLOOR = 1e-12; // widths enter as s^2 + floor

Eigen::MatrixXd normalize_inputs(std::span<const Solution> xs, const SearchSpace& space)
{
    const std::size_t d = space.dimension();
    Eigen::MatrixXd X(xs.size(), d);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i].size() != d)
            throw std::invalid_argument("train_surrogate: input dimension mismatch");
        for (std::size_t k = 0; k < d; ++k)
            X(i, k) = (xs[i][k] - space.lower()[k]) / (space.upper()[k] - space.lower()[k]);
    }
    return X;
}

double mean_squared_error(const Eigen::VectorXd& pred, const Eigen::VectorXd& y)
{
    return (pred - y).squaredNorm() / static_cast<double>(y.size());
}

} // namespace

std::string to_string(SurrogateFamily family)
{
    switch (family) {
    case SurrogateFamily::MLP:
        return "MLP";
    case SurrogateFamily::TSFIS:
        return "TSFIS";
    case SurrogateFamily::SVR:
        return "SVR";
    }
    return "?";
}

std::string SurrogateSpec::summary() const
{
    char buf[96];
    switch (family) {
    case SurrogateFamily::MLP:
        std::snprintf(buf, sizeof(buf), "MLP(layers=%d,width=%d,lr=%g)", mlp.layers, mlp.width, mlp.learning_rate);
        break;
    case SurrogateFamily::TSFIS:
        std::snprintf(buf, sizeof(buf), "TSFIS(rules=%d,lr=%g)", tsfis.rules, tsfis.learning_rate);
        break;
    case SurrogateFamily::SVR:
        std::snprintf(buf, sizeof(buf), "SVR(C=%g,eps=%g)", svr.regularization, svr.epsilon);
        break;
    }
    return buf;
}

double TrainedSurrogate::predict(const Solution& x) const
{
    return predict_batch(std::span<const Solution>(&x, 1))[0];
}

// ---------------------------------------------------------------------------
// MLP

MlpCore::MlpCore(std::size_t input_dim, int hidden_layers, int width)
    : input_dim_(input_dim), layers_(hidden_layers), width_(width)
{
    if (input_dim_ == 0 || layers_ < 1 || width_ < 1)
        throw std::invalid_argument("MlpCore: bad dimensions");
}

std::size_t MlpCore::parameter_count() const
{
    const std::size_t w = static_cast<std::size_t>(width_);
    std::size_t n = w * input_dim_ + w;                                  // first hidden layer
    n += static_cast<std::size_t>(layers_ - 1) * (w * w + w);            // further hidden layers
    n += w + 1;                                                          // output neuron
    return n;
}

void MlpCore::initialize(std::vector<double>& theta, RngStream& rng) const
{
    theta.assign(parameter_count(), 0.0);
    std::size_t off = 0;
    auto glorot = [&](std::size_t rows, std::size_t cols) {
        const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
        for (std::size_t i = 0; i < rows * cols; ++i)
            theta[off + i] = rng.uniform(-bound, bound);
        off += rows * cols;
        off += rows; // biases stay zero
    };
    glorot(width_, input_dim_);
    for (int l = 1; l < layers_; ++l)
        glorot(width_, width_);
    // output weights
    const double bound = std::sqrt(6.0 / static_cast<double>(width_ + 1));
    for (int i = 0; i < width_; ++i)
        theta[off + i] = rng.uniform(-bound, bound);
}

namespace {

struct MlpViews {
    std::vector<Eigen::Map<const RowMat>> weights;
    std::vector<Eigen::Map<const Eigen::VectorXd>> biases;
    Eigen::Map<const Eigen::VectorXd> out_w;
    const double* out_b;
};

MlpViews map_mlp(const std::vector<double>& theta, std::size_t d, int layers, int width)
{
    std::vector<Eigen::Map<const RowMat>> ws;
    std::vector<Eigen::Map<const Eigen::VectorXd>> bs;
    std::size_t off = 0;
    std::size_t in = d;
    for (int l = 0; l < layers; ++l) {
        ws.emplace_back(theta.data() + off, width, in);
        off += static_cast<std::size_t>(width) * in;
        bs.emplace_back(theta.data() + off, width);
        off += width;
        in = width;
    }
    Eigen::Map<const Eigen::VectorXd> ow(theta.data() + off, width);
    off += width;
    return {std::move(ws), std::move(bs), ow, theta.data() + off};
}

} // namespace

Eigen::VectorXd MlpCore::predict(const std::vector<double>& theta, const Eigen::MatrixXd& X) const
{
    const MlpViews v = map_mlp(theta, input_dim_, layers_, width_);
    Eigen::MatrixXd a = X;
    for (int l = 0; l < layers_; ++l)
        a = ((a * v.weights[l].transpose()).rowwise() + v.biases[l].transpose()).cwiseMax(0.0);
    Eigen::VectorXd z = a * v.out_w;
    z.array() += *v.out_b;
    return z.cwiseMax(0.0);
}

double MlpCore::loss_and_gradient(const std::vector<double>& theta, const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y, std::vector<double>& grad) const
{
    const MlpViews v = map_mlp(theta, input_dim_, layers_, width_);
    const std::size_t B = X.rows();

    std::vector<Eigen::MatrixXd> acts;
    acts.reserve(layers_ + 1);
    acts.push_back(X);
    for (int l = 0; l < layers_; ++l)
        acts.push_back(((acts.back() * v.weights[l].transpose()).rowwise() + v.biases[l].transpose()).cwiseMax(0.0));

    Eigen::VectorXd z = acts.back() * v.out_w;
    z.array() += *v.out_b;
    const Eigen::VectorXd out = z.cwiseMax(0.0);
    const double loss = mean_squared_error(out, y);

    grad.assign(theta.size(), 0.0);
    Eigen::VectorXd dz = (2.0 / static_cast<double>(B)) * (out - y);
    dz = (z.array() > 0.0).select(dz, 0.0);

    // output layer
    std::size_t out_off = theta.size() - width_ - 1;
    Eigen::Map<Eigen::VectorXd>(grad.data() + out_off, width_) = acts.back().transpose() * dz;
    grad[theta.size() - 1] = dz.sum();

    Eigen::MatrixXd da = dz * v.out_w.transpose(); // B x W
    std::size_t off_end = out_off;
    for (int l = layers_ - 1; l >= 0; --l) {
        const Eigen::MatrixXd dzl = (acts[l + 1].array() > 0.0).select(da, 0.0);
        const std::size_t in = (l == 0) ? input_dim_ : static_cast<std::size_t>(width_);
        const std::size_t w_off = off_end - width_ - static_cast<std::size_t>(width_) * in;
        Eigen::Map<RowMat>(grad.data() + w_off, width_, in) = dzl.transpose() * acts[l];
        Eigen::Map<Eigen::VectorXd>(grad.data() + w_off + static_cast<std::size_t>(width_) * in, width_) = dzl.colwise().sum();
        if (l > 0)
            da = dzl * v.weights[l];
        off_end = w_off;
    }
    return loss;
}

// ---------------------------------------------------------------------------
// TSFIS

TsfisCore::TsfisCore(std::size_t input_dim, int rules)
    : input_dim_(input_dim), rules_(rules)
{
    if (input_dim_ == 0 || rules_ < 1)
        throw std::invalid_argument("TsfisCore: bad dimensions");
}

std::size_t TsfisCore::parameter_count() const
{
    return static_cast<std::size_t>(rules_) * (3 * input_dim_ + 1);
}

namespace {

struct TsfisViews {
    Eigen::Map<const RowMat> centers, widths, linear;
    Eigen::Map<const Eigen::VectorXd> constants;
};

TsfisViews map_tsfis(const std::vector<double>& theta, std::size_t d, int rules)
{
    const std::size_t rd = static_cast<std::size_t>(rules) * d;
    return {Eigen::Map<const RowMat>(theta.data(), rules, d),
            Eigen::Map<const RowMat>(theta.data() + rd, rules, d),
            Eigen::Map<const RowMat>(theta.data() + 2 * rd, rules, d),
            Eigen::Map<const Eigen::VectorXd>(theta.data() + 3 * rd, rules)};
}

// log firing strengths, one row per input, one column per rule
Eigen::MatrixXd tsfis_log_firing(const TsfisViews& v, const Eigen::MatrixXd& X)
{
    const Eigen::ArrayXXd inv2den = 0.5 / (v.widths.array().square() + WIDTH_FLOOR); // R x d
    Eigen::MatrixXd logw(X.rows(), v.centers.rows());
    for (Eigen::Index r = 0; r < v.centers.rows(); ++r) {
        const Eigen::ArrayXXd diff = X.rowwise() - v.centers.row(r);
        logw.col(r) = -(diff.square().rowwise() * inv2den.row(r)).rowwise().sum();
    }
    return logw;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logw)
{
    Eigen::MatrixXd w = (logw.colwise() - logw.rowwise().maxCoeff()).array().exp();
    return w.array().colwise() / w.rowwise().sum().array();
}

} // namespace

void TsfisCore::initialize(std::vector<double>& theta, RngStream& rng) const
{
    theta.assign(parameter_count(), 0.0);
    const std::size_t rd = static_cast<std::size_t>(rules_) * input_dim_;
    for (std::size_t i = 0; i < rd; ++i)
        theta[i] = rng.uniform01();                       // centers
    const double width = 0.5 / static_cast<double>(rules_);
    for (std::size_t i = 0; i < rd; ++i)
        theta[rd + i] = width;                            // widths
    // linear terms and constants stay zero
}

void TsfisCore::seed_from_data(std::vector<double>& theta, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               RngStream& rng) const
{
    theta.assign(parameter_count(), 0.0);
    const std::size_t rd = static_cast<std::size_t>(rules_) * input_dim_;
    const double width = 0.5 / static_cast<double>(rules_);
    for (int r = 0; r < rules_; ++r) {
        const std::size_t row = rng.uniform_index(static_cast<std::size_t>(X.rows()));
        for (std::size_t k = 0; k < input_dim_; ++k) {
            theta[static_cast<std::size_t>(r) * input_dim_ + k] = X(row, k);
            theta[rd + static_cast<std::size_t>(r) * input_dim_ + k] = width;
        }
        theta[3 * rd + static_cast<std::size_t>(r)] = y(row); // rule constant
    }
}

Eigen::VectorXd TsfisCore::rule_weights(const std::vector<double>& theta, const Eigen::VectorXd& x) const
{
    const TsfisViews v = map_tsfis(theta, input_dim_, rules_);
    const Eigen::MatrixXd logw = tsfis_log_firing(v, x.transpose());
    return softmax_rows(logw).row(0);
}

Eigen::VectorXd TsfisCore::predict(const std::vector<double>& theta, const Eigen::MatrixXd& X) const
{
    const TsfisViews v = map_tsfis(theta, input_dim_, rules_);
    const Eigen::MatrixXd wn = softmax_rows(tsfis_log_firing(v, X));
    Eigen::MatrixXd q = X * v.linear.transpose();
    q.rowwise() += v.constants.transpose();
    return (wn.array() * q.array()).rowwise().sum().cwiseMax(0.0);
}

double TsfisCore::loss_and_gradient(const std::vector<double>& theta, const Eigen::MatrixXd& X,
                                    const Eigen::VectorXd& y, std::vector<double>& grad) const
{
    const TsfisViews v = map_tsfis(theta, input_dim_, rules_);
    const std::size_t B = X.rows();
    const std::size_t rd = static_cast<std::size_t>(rules_) * input_dim_;

    const Eigen::MatrixXd logw = tsfis_log_firing(v, X);
    const Eigen::MatrixXd wn = softmax_rows(logw);
    Eigen::MatrixXd q = X * v.linear.transpose();
    q.rowwise() += v.constants.transpose();
    const Eigen::VectorXd z = (wn.array() * q.array()).rowwise().sum();
    const Eigen::VectorXd out = z.cwiseMax(0.0);
    const double loss = mean_squared_error(out, y);

    Eigen::VectorXd dz = (2.0 / static_cast<double>(B)) * (out - y);
    dz = (z.array() > 0.0).select(dz, 0.0);

    grad.assign(theta.size(), 0.0);
    Eigen::Map<RowMat> g_centers(grad.data(), rules_, input_dim_);
    Eigen::Map<RowMat> g_widths(grad.data() + rd, rules_, input_dim_);
    Eigen::Map<RowMat> g_linear(grad.data() + 2 * rd, rules_, input_dim_);
    Eigen::Map<Eigen::VectorXd> g_constants(grad.data() + 3 * rd, rules_);

    // consequents
    const Eigen::MatrixXd gq = wn.array().colwise() * dz.array(); // B x R
    g_linear = gq.transpose() * X;
    g_constants = gq.colwise().sum();

    // memberships, through the softmax
    const Eigen::MatrixXd gl = (wn.array() * (q.colwise() - z).array()).colwise() * dz.array(); // B x R
    const Eigen::ArrayXXd inv2den = 0.5 / (v.widths.array().square() + WIDTH_FLOOR);
    for (int r = 0; r < rules_; ++r) {
        const Eigen::ArrayXXd diff = X.rowwise() - v.centers.row(r);
        const Eigen::ArrayXd glr = gl.col(r).array();
        g_centers.row(r) = ((diff.colwise() * glr).colwise().sum()) * (2.0 * inv2den.row(r));
        g_widths.row(r) = ((diff.square().colwise() * glr).colwise().sum())
            * (4.0 * v.widths.row(r).array() * inv2den.row(r).square());
    }
    return loss;
}

// ---------------------------------------------------------------------------
// SVR dual

SvrDualSolution solve_svr_dual(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& y,
                               double C, double epsilon, double tolerance, int max_iterations)
{
    const Eigen::Index n = y.size();
    if (kernel.rows() != n || kernel.cols() != n)
        throw std::invalid_argument("solve_svr_dual: kernel/target size mismatch");

    SvrDualSolution sol;
    sol.beta.assign(n, 0.0);
    Eigen::Map<Eigen::VectorXd> beta(sol.beta.data(), n);
    Eigen::VectorXd f0 = Eigen::VectorXd::Zero(n); // K beta

    const double at_bound = 1e-12 * C;
    const double inf = std::numeric_limits<double>::infinity();

    for (int it = 0; it < max_iterations; ++it) {
        // Feasible bias range implied by each coefficient's KKT case.
        Eigen::Index i_max = 0, j_min = 0;
        double max_lo = -inf, min_hi = inf;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double g = y(i) - f0(i);
            double lo, hi;
            if (beta(i) >= C - at_bound) {
                lo = -inf;
                hi = g - epsilon;
            } else if (beta(i) > at_bound) {
                lo = hi = g - epsilon;
            } else if (beta(i) >= -at_bound) {
                lo = g - epsilon;
                hi = g + epsilon;
            } else if (beta(i) > -C + at_bound) {
                lo = hi = g + epsilon;
            } else {
                lo = g + epsilon;
                hi = inf;
            }
            if (lo > max_lo) {
                max_lo = lo;
                i_max = i;
            }
            if (hi < min_hi) {
                min_hi = hi;
                j_min = i;
            }
        }

        sol.kkt_residual = std::max(0.0, max_lo - min_hi);
        sol.iterations = it;
        sol.bias = 0.5 * (max_lo + min_hi);
        if (!std::isfinite(sol.bias))
            sol.bias = std::isfinite(max_lo) ? max_lo : (std::isfinite(min_hi) ? min_hi : 0.0);
        if (sol.kkt_residual < tolerance)
            return sol;

        const Eigen::Index i = i_max, j = j_min;
        const double gi = y(i) - f0(i);
        const double gj = y(j) - f0(j);
        const double a = kernel(i, i) + kernel(j, j) - 2.0 * kernel(i, j);
        const double upper = std::min(C - beta(i), beta(j) + C);

        // Maximize the piecewise-quadratic gain over t in [0, upper];
        // kinks where beta_i + t or beta_j - t crosses zero.
        std::vector<double> knots{0.0, upper};
        if (-beta(i) > 0.0 && -beta(i) < upper)
            knots.push_back(-beta(i));
        if (beta(j) > 0.0 && beta(j) < upper)
            knots.push_back(beta(j));
        std::sort(knots.begin(), knots.end());

        auto gain = [&](double t) {
            return -0.5 * a * t * t + (gi - gj) * t
                - epsilon * (std::abs(beta(i) + t) - std::abs(beta(i)))
                - epsilon * (std::abs(beta(j) - t) - std::abs(beta(j)));
        };

        double best_t = 0.0, best_gain = 0.0;
        for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
            const double ta = knots[s], tb = knots[s + 1];
            if (!(tb > ta))
                continue;
            const double mid = 0.5 * (ta + tb);
            const double s1 = (beta(i) + mid >= 0.0) ? 1.0 : -1.0;
            const double s2 = (beta(j) - mid >= 0.0) ? 1.0 : -1.0;
            const double slope0 = (gi - gj) - epsilon * s1 + epsilon * s2;
            double cand;
            if (a > 1e-300)
                cand = std::clamp(slope0 / a, ta, tb);
            else
                cand = (slope0 > 0.0) ? tb : ta;
            for (double t : {cand, tb}) {
                const double g = gain(t);
                if (g > best_gain) {
                    best_gain = g;
                    best_t = t;
                }
            }
        }

        if (best_gain <= 0.0 || best_t == 0.0)
            return sol; // no achievable progress at this precision

        beta(i) += best_t;
        beta(j) -= best_t;
        f0 += best_t * (kernel.col(i) - kernel.col(j));
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Trained model wrappers

namespace {

struct Normalizer {
    std::vector<double> lower;
    std::vector<double> inv_span;

    explicit Normalizer(const SearchSpace& space)
        : lower(space.lower()), inv_span(space.dimension())
    {
        for (std::size_t k = 0; k < space.dimension(); ++k)
            inv_span[k] = 1.0 / (space.upper()[k] - space.lower()[k]);
    }

    Eigen::MatrixXd operator()(std::span<const Solution> xs) const
    {
        Eigen::MatrixXd X(xs.size(), lower.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i].size() != lower.size())
                throw std::invalid_argument("predict: input dimension mismatch");
            for (std::size_t k = 0; k < lower.size(); ++k)
                X(i, k) = (xs[i][k] - lower[k]) * inv_span[k];
        }
        return X;
    }
};

class ConstantSurrogate final : public TrainedSurrogate {
public:
    ConstantSurrogate(SurrogateSpec spec, TrainingReport report, double value)
        : TrainedSurrogate(std::move(spec), std::move(report)), params_{value} {}

    std::vector<double> predict_batch(std::span<const Solution> xs) const override
    {
        return std::vector<double>(xs.size(), params_[0]);
    }
    const std::vector<double>& parameters() const override { return params_; }

private:
    std::vector<double> params_;
};

template <typename Core>
class CoreSurrogate final : public TrainedSurrogate {
public:
    CoreSurrogate(SurrogateSpec spec, TrainingReport report, Core core, std::vector<double> theta, Normalizer norm)
        : TrainedSurrogate(std::move(spec), std::move(report)), core_(std::move(core)), theta_(std::move(theta)), norm_(std::move(norm)) {}

    std::vector<double> predict_batch(std::span<const Solution> xs) const override
    {
        if (xs.empty())
            return {};
        const Eigen::VectorXd out = core_.predict(theta_, norm_(xs));
        return {out.data(), out.data() + out.size()};
    }
    const std::vector<double>& parameters() const override { return theta_; }

private:
    Core core_;
    std::vector<double> theta_;
    Normalizer norm_;
};

class SvrSurrogate final : public TrainedSurrogate {
public:
    SvrSurrogate(SurrogateSpec spec, TrainingReport report, Eigen::MatrixXd support, std::vector<double> params,
                 double gamma, Normalizer norm)
        : TrainedSurrogate(std::move(spec), std::move(report)), support_(std::move(support)), params_(std::move(params)),
          gamma_(gamma), norm_(std::move(norm))
    {
        support_sq_ = support_.rowwise().squaredNorm();
    }

    std::vector<double> predict_batch(std::span<const Solution> xs) const override
    {
        if (xs.empty())
            return {};
        const Eigen::MatrixXd X = norm_(xs);
        const Eigen::Map<const Eigen::VectorXd> beta(params_.data(), support_.rows());
        const double bias = params_.back();
        Eigen::MatrixXd d2 = (-2.0 * X * support_.transpose());
        d2.rowwise() += support_sq_.transpose();
        d2.colwise() += X.rowwise().squaredNorm();
        const Eigen::VectorXd out = ((-gamma_ * d2.array()).exp().matrix() * beta).array() + bias;
        return {out.data(), out.data() + out.size()};
    }
    const std::vector<double>& parameters() const override { return params_; }

private:
    Eigen::MatrixXd support_;
    Eigen::VectorXd support_sq_;
    std::vector<double> params_; // dual coefficients then bias
    double gamma_;
    Normalizer norm_;
};

// Mini-batch Adam with early stopping on the validation split; restores the
// best-validation parameters.
struct AdamOutcome {
    std::vector<double> theta;
    TrainingReport report;
};

AdamOutcome run_adam(const DifferentiableCore& core, std::vector<double> theta,
                     const Eigen::MatrixXd& Xtr, const Eigen::VectorXd& ytr,
                     const Eigen::MatrixXd& Xval, const Eigen::VectorXd& yval,
                     double lr, const TrainerOptions& opt, RngStream& rng)
{
    constexpr double BETA1 = 0.9, BETA2 = 0.999, ADAM_EPS = 1e-8;
    const std::size_t ntr = Xtr.rows();
    const std::size_t P = theta.size();

    TrainingReport report;
    report.initial_train_mse = mean_squared_error(core.predict(theta, Xtr), ytr);

    const std::vector<double> theta0 = theta;
    std::vector<double> best = theta;
    double best_val = mean_squared_error(core.predict(theta, Xval), yval);

    std::vector<double> m(P, 0.0), v(P, 0.0), grad(P, 0.0);
    long step = 0;
    int since_best = 0;

    const std::size_t bs = std::min<std::size_t>(std::max(1, opt.batch_size), ntr);
    Eigen::MatrixXd Xb(bs, Xtr.cols());
    Eigen::VectorXd yb(bs);

    for (int epoch = 1; epoch <= opt.max_epochs; ++epoch) {
        const std::vector<std::size_t> perm = rng.permutation(ntr);
        for (std::size_t start = 0; start < ntr; start += bs) {
            const std::size_t count = std::min(bs, ntr - start);
            Xb.conservativeResize(count, Eigen::NoChange);
            yb.conservativeResize(count);
            for (std::size_t i = 0; i < count; ++i) {
                Xb.row(i) = Xtr.row(perm[start + i]);
                yb(i) = ytr(perm[start + i]);
            }
            core.loss_and_gradient(theta, Xb, yb, grad);
            ++step;
            const double c1 = 1.0 - std::pow(BETA1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(BETA2, static_cast<double>(step));
            for (std::size_t p = 0; p < P; ++p) {
                m[p] = BETA1 * m[p] + (1.0 - BETA1) * grad[p];
                v[p] = BETA2 * v[p] + (1.0 - BETA2) * grad[p] * grad[p];
                theta[p] -= lr * (m[p] / c1) / (std::sqrt(v[p] / c2) + ADAM_EPS);
            }
        }
        report.epochs_run = epoch;
        const double val = mean_squared_error(core.predict(theta, Xval), yval);
        if (val < best_val) {
            best_val = val;
            best = theta;
            since_best = 0;
        } else if (++since_best >= opt.patience) {
            break;
        }
    }

    double final_train = mean_squared_error(core.predict(best, Xtr), ytr);
    if (final_train > report.initial_train_mse) {
        // dead start (e.g. all-negative output preactivations): keep the
        // initial parameters rather than a worse fit
        best = theta0;
        final_train = report.initial_train_mse;
        best_val = mean_squared_error(core.predict(best, Xval), yval);
    }
    report.final_train_mse = final_train;
    report.final_validation_mse = best_val;
    return {std::move(best), std::move(report)};
}

} // namespace

std::unique_ptr<TrainedSurrogate> train_surrogate(const SurrogateSpec& spec,
                                                  std::span<const Solution> inputs,
                                                  std::span<const double> targets,
                                                  const SearchSpace& space,
                                                  RngStream& rng,
                                                  const TrainerOptions& options)
{
    if (inputs.size() != targets.size())
        throw std::invalid_argument("train_surrogate: inputs/targets size mismatch");
    if (inputs.size() < 10)
        throw std::invalid_argument("train_surrogate: need at least 10 samples");
    for (double t : targets)
        if (!std::isfinite(t))
            throw std::invalid_argument("train_surrogate: non-finite target");

    Normalizer norm(space);

    // Degenerate targets: constant predictor, flagged, never an error.
    const auto [tmin, tmax] = std::minmax_element(targets.begin(), targets.end());
    if (*tmin == *tmax) {
        double value = *tmin;
        if (spec.family != SurrogateFamily::SVR)
            value = std::max(0.0, value); // ReLU-output families stay non-negative
        TrainingReport report;
        report.degenerate_targets = true;
        const double err = (value - *tmin) * (value - *tmin);
        report.initial_train_mse = report.final_train_mse = report.final_validation_mse = err;
        return std::make_unique<ConstantSurrogate>(spec, report, value);
    }

    const Eigen::MatrixXd X = normalize_inputs(inputs, space);
    Eigen::VectorXd y(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
        y(i) = targets[i];

    // 70/30 split
    const std::size_t n = inputs.size();
    std::vector<std::size_t> perm = rng.permutation(n);
    std::size_t ntr = static_cast<std::size_t>(std::llround(options.train_fraction * static_cast<double>(n)));
    ntr = std::clamp<std::size_t>(ntr, 1, n - 1);
    Eigen::MatrixXd Xtr(ntr, X.cols()), Xval(n - ntr, X.cols());
    Eigen::VectorXd ytr(ntr), yval(n - ntr);
    for (std::size_t i = 0; i < ntr; ++i) {
        Xtr.row(i) = X.row(perm[i]);
        ytr(i) = y(perm[i]);
    }
    for (std::size_t i = ntr; i < n; ++i) {
        Xval.row(i - ntr) = X.row(perm[i]);
        yval(i - ntr) = y(perm[i]);
    }

    switch (spec.family) {
    case SurrogateFamily::MLP: {
        MlpCore core(space.dimension(), spec.mlp.layers, spec.mlp.width);
        std::vector<double> theta;
        core.initialize(theta, rng);
        AdamOutcome out = run_adam(core, std::move(theta), Xtr, ytr, Xval, yval, spec.mlp.learning_rate, options, rng);
        return std::make_unique<CoreSurrogate<MlpCore>>(spec, out.report, core, std::move(out.theta), norm);
    }
    case SurrogateFamily::TSFIS: {
        TsfisCore core(space.dimension(), spec.tsfis.rules);
        std::vector<double> theta;
        core.seed_from_data(theta, Xtr, ytr, rng);
        AdamOutcome out = run_adam(core, std::move(theta), Xtr, ytr, Xval, yval, spec.tsfis.learning_rate, options, rng);
        return std::make_unique<CoreSurrogate<TsfisCore>>(spec, out.report, core, std::move(out.theta), norm);
    }
    case SurrogateFamily::SVR: {
        // Kernel scale gamma = 1 / (d * var(X)) over all entries of the
        // (normalized) training inputs.
        const double mean = Xtr.mean();
        const double var = (Xtr.array() - mean).square().mean();
        const double gamma = 1.0 / (static_cast<double>(space.dimension()) * std::max(var, 1e-12));

        const Eigen::VectorXd sq = Xtr.rowwise().squaredNorm();
        Eigen::MatrixXd K = -2.0 * Xtr * Xtr.transpose();
        K.rowwise() += sq.transpose();
        K.colwise() += sq;
        K = (-gamma * K.array()).exp();

        const SvrDualSolution dual = solve_svr_dual(K, ytr, spec.svr.regularization, spec.svr.epsilon);

        const Eigen::Map<const Eigen::VectorXd> beta_full(dual.beta.data(), ntr);
        const Eigen::VectorXd pred_tr = (K * beta_full).array() + dual.bias;

        Eigen::MatrixXd Kval = -2.0 * Xval * Xtr.transpose();
        Kval.rowwise() += sq.transpose();
        Kval.colwise() += Xval.rowwise().squaredNorm();
        Kval = (-gamma * Kval.array()).exp();
        const Eigen::VectorXd pred_val = (Kval * beta_full).array() + dual.bias;

        TrainingReport report;
        report.initial_train_mse = ytr.squaredNorm() / static_cast<double>(ntr);
        report.final_train_mse = mean_squared_error(pred_tr, ytr);
        report.final_validation_mse = mean_squared_error(pred_val, yval);
        report.solver_residual = dual.kkt_residual;

        // keep only the active coefficients
        std::vector<Eigen::Index> active;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(ntr); ++i)
            if (std::abs(dual.beta[i]) > 1e-12)
                active.push_back(i);
        if (active.empty())
            active.push_back(0);
        Eigen::MatrixXd support(active.size(), X.cols());
        std::vector<double> params;
        params.reserve(active.size() + 1);
        for (std::size_t i = 0; i < active.size(); ++i) {
            support.row(i) = Xtr.row(active[i]);
            params.push_back(dual.beta[static_cast<std::size_t>(active[i])]);
        }
        params.push_back(dual.bias);
        return std::make_unique<SvrSurrogate>(spec, report, std::move(support), std::move(params), gamma, norm);
    }
    }
    throw std::logic_error("unreachable");
}

SurrogateSpec sample_surrogate_spec(std::span<const SurrogateFamily> pool, RngStream& rng)
{
    if (pool.empty())
        throw std::invalid_argument("sample_surrogate_spec: empty pool");
    SurrogateSpec spec;
    spec.family = pool[rng.uniform_index(pool.size())];
    switch (spec.family) {
    case SurrogateFamily::MLP:
        spec.mlp.layers = 1 + static_cast<int>(rng.uniform_index(4));
        spec.mlp.width = 1 << (3 + rng.uniform_index(8));
        spec.mlp.learning_rate = std::pow(10.0, -4.0 + static_cast<double>(rng.uniform_index(3)));
        break;
    case SurrogateFamily::TSFIS:
        spec.tsfis.rules = 1 << (3 + rng.uniform_index(6));
        spec.tsfis.learning_rate = std::pow(10.0, -4.0 + static_cast<double>(rng.uniform_index(3)));
        break;
    case SurrogateFamily::SVR:
        break;
    }
    return spec;
}

double approximation_error(std::span<const TrainedSurrogate* const> per_objective, const Dataset& dataset)
{
    if (dataset.empty())
        throw std::invalid_argument("approximation_error: empty dataset");
    const std::size_t m = per_objective.size();
    if (m == 0 || m != dataset.objectives().front().size())
        throw std::invalid_argument("approximation_error: one surrogate per objective required");

    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const std::vector<double> pred = per_objective[j]->predict_batch(dataset.solutions());
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double e = pred[i] - dataset.objectives()[i][j];
            total += e * e;
        }
    }
    return total / (static_cast<double>(m) * static_cast<double>(dataset.size()));
}

} // namespace pameli
