#include "srf/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace srf {

void to_json(nlohmann::json& j, const TrainConfig& config) {
    j = nlohmann::json{{"window", config.window},
                       {"layers", config.layers},
                       {"hidden", config.hidden},
                       {"dropout", config.dropout},
                       {"epochs", config.epochs},
                       {"batch", config.batch},
                       {"split_ratio", config.split_ratio},
                       {"seed", config.seed},
                       {"learn_rate", config.learn_rate}};
}

void from_json(const nlohmann::json& j, TrainConfig& config) {
    config = TrainConfig{};
    config.window = j.value("window", config.window);
    config.layers = j.value("layers", config.layers);
    config.hidden = j.value("hidden", config.hidden);
    config.dropout = j.value("dropout", config.dropout);
    config.epochs = j.value("epochs", config.epochs);
    config.batch = j.value("batch", config.batch);
    config.split_ratio = j.value("split_ratio", config.split_ratio);
    config.seed = j.value("seed", config.seed);
    config.learn_rate = j.value("learn_rate", config.learn_rate);
}

void validate(const TrainConfig& config) {
    if (config.window < 1 || config.layers < 1 || config.hidden < 1 || config.epochs < 1 ||
        config.batch < 1) {
        throw std::invalid_argument("train config: window/layers/hidden/epochs/batch must be >= 1");
    }
    if (!(config.dropout >= 0.0 && config.dropout < 1.0)) {
        throw std::invalid_argument("train config: dropout must be in [0, 1)");
    }
    if (!(config.split_ratio > 0.0 && config.split_ratio < 1.0)) {
        throw std::invalid_argument("train config: split_ratio must be in (0, 1)");
    }
    if (!(config.learn_rate > 0.0)) {
        throw std::invalid_argument("train config: learn_rate must be positive");
    }
}

WindowSets make_windows(const std::vector<DefectSeries>& series_set, const TrainConfig& config,
                        Rng& rng) {
    validate(config);
    const auto window = static_cast<std::size_t>(config.window);
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < series_set.size(); ++i) {
        if (series_set[i].size() >= window + 1) eligible.push_back(i);
    }
    if (eligible.empty()) {
        throw NoTrainingData("no series long enough for an input window of " +
                             std::to_string(config.window));
    }
    rng.shuffle(eligible);
    std::size_t n_train = eligible.size();
    if (eligible.size() > 1) {
        const auto rounded = static_cast<std::size_t>(
            std::llround(config.split_ratio * static_cast<double>(eligible.size())));
        n_train = std::clamp<std::size_t>(rounded, 1, eligible.size() - 1);
    }

    auto slice = [&](const DefectSeries& series, std::vector<WindowSample>& out) {
        const std::vector<double>& counts = series.counts();
        for (std::size_t s = 0; s + window < counts.size(); ++s) {
            WindowSample sample;
            sample.input.assign(counts.begin() + static_cast<std::ptrdiff_t>(s),
                                counts.begin() + static_cast<std::ptrdiff_t>(s + window));
            sample.lo = *std::min_element(sample.input.begin(), sample.input.end());
            sample.hi = *std::max_element(sample.input.begin(), sample.input.end());
            const double span = sample.hi > sample.lo ? sample.hi - sample.lo : 1.0;
            for (double& v : sample.input) v = (v - sample.lo) / span;
            sample.target = (counts[s + window] - sample.lo) / span;
            out.push_back(std::move(sample));
        }
    };

    WindowSets sets;
    for (std::size_t i = 0; i < eligible.size(); ++i) {
        slice(series_set[eligible[i]], i < n_train ? sets.train : sets.val);
    }
    return sets;
}

// ---------------------------------------------------------------------------
// Parameter block

namespace {

constexpr int kGates = 4;  // input, forget, candidate, output

}  // namespace

LstmParams::LstmParams(int layers, int hidden) : layers_(layers), hidden_(hidden) {
    std::size_t offset = 0;
    for (int l = 0; l < layers_; ++l) {
        wx_off_.push_back(offset);
        offset += static_cast<std::size_t>(kGates * hidden_) * input_dim(l);
        wh_off_.push_back(offset);
        offset += static_cast<std::size_t>(kGates * hidden_) * hidden_;
        b_off_.push_back(offset);
        offset += static_cast<std::size_t>(kGates * hidden_);
    }
    w_out_off_ = offset;
    offset += static_cast<std::size_t>(hidden_);
    b_out_off_ = offset;
    offset += 1;
    data_.assign(offset, 0.0);
}

Eigen::Map<Eigen::MatrixXd> LstmParams::wx(int layer) {
    return {data_.data() + wx_off_[static_cast<std::size_t>(layer)], kGates * hidden_,
            input_dim(layer)};
}
Eigen::Map<Eigen::MatrixXd> LstmParams::wh(int layer) {
    return {data_.data() + wh_off_[static_cast<std::size_t>(layer)], kGates * hidden_, hidden_};
}
Eigen::Map<Eigen::VectorXd> LstmParams::bias(int layer) {
    return {data_.data() + b_off_[static_cast<std::size_t>(layer)], kGates * hidden_};
}
Eigen::Map<Eigen::RowVectorXd> LstmParams::w_out() {
    return {data_.data() + w_out_off_, hidden_};
}
double& LstmParams::b_out() { return data_[b_out_off_]; }

Eigen::Map<const Eigen::MatrixXd> LstmParams::wx(int layer) const {
    return {data_.data() + wx_off_[static_cast<std::size_t>(layer)], kGates * hidden_,
            input_dim(layer)};
}
Eigen::Map<const Eigen::MatrixXd> LstmParams::wh(int layer) const {
    return {data_.data() + wh_off_[static_cast<std::size_t>(layer)], kGates * hidden_, hidden_};
}
Eigen::Map<const Eigen::VectorXd> LstmParams::bias(int layer) const {
    return {data_.data() + b_off_[static_cast<std::size_t>(layer)], kGates * hidden_};
}
Eigen::Map<const Eigen::RowVectorXd> LstmParams::w_out() const {
    return {data_.data() + w_out_off_, hidden_};
}
double LstmParams::b_out() const { return data_[b_out_off_]; }

void LstmParams::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

void init_weights(LstmParams& params, Rng& rng) {
    const int hidden = params.hidden();
    for (int l = 0; l < params.layers(); ++l) {
        auto wx = params.wx(l);
        const double sx = 1.0 / std::sqrt(static_cast<double>(params.input_dim(l)));
        for (Eigen::Index i = 0; i < wx.size(); ++i) wx.data()[i] = rng.uniform(-sx, sx);
        auto wh = params.wh(l);
        const double sh = 1.0 / std::sqrt(static_cast<double>(hidden));
        for (Eigen::Index i = 0; i < wh.size(); ++i) wh.data()[i] = rng.uniform(-sh, sh);
        auto bias = params.bias(l);
        bias.setZero();
        bias.segment(hidden, hidden).setConstant(1.0);  // forget gate opens by default
    }
    auto w_out = params.w_out();
    const double so = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (Eigen::Index i = 0; i < w_out.size(); ++i) w_out.data()[i] = rng.uniform(-so, so);
    params.b_out() = 0.0;
}

// ---------------------------------------------------------------------------
// Batched forward / backward

namespace {

using Matrix = Eigen::MatrixXd;

struct LayerCache {
    std::vector<Matrix> x;       // layer input per timestep (B x in)
    std::vector<Matrix> gate_i, gate_f, gate_g, gate_o;
    std::vector<Matrix> cell, tanh_cell, h;
    std::vector<Matrix> mask;    // scaled dropout multiplier on h (may be empty)
};

struct Forward {
    std::vector<LayerCache> layers;
    Eigen::VectorXd preds;
};

/// Runs the full stack on a batch. `X` is batch x timesteps. When
/// `dropout > 0` and `rng` is given, scaled inverted-dropout masks are
/// applied between layers and recorded for the backward pass.
Forward forward_pass(const LstmParams& params, const Matrix& X, double dropout, Rng* rng) {
    const auto batch = X.rows();
    const auto steps = X.cols();
    const int hidden = params.hidden();
    const int layers = params.layers();
    const bool use_dropout = dropout > 0.0 && rng != nullptr;
    const double keep = 1.0 - dropout;

    Forward fwd;
    fwd.layers.resize(static_cast<std::size_t>(layers));
    for (auto& cache : fwd.layers) {
        cache.x.resize(static_cast<std::size_t>(steps));
        cache.gate_i.resize(static_cast<std::size_t>(steps));
        cache.gate_f.resize(static_cast<std::size_t>(steps));
        cache.gate_g.resize(static_cast<std::size_t>(steps));
        cache.gate_o.resize(static_cast<std::size_t>(steps));
        cache.cell.resize(static_cast<std::size_t>(steps));
        cache.tanh_cell.resize(static_cast<std::size_t>(steps));
        cache.h.resize(static_cast<std::size_t>(steps));
        cache.mask.resize(static_cast<std::size_t>(steps));
    }

    std::vector<Matrix> h_prev(static_cast<std::size_t>(layers)),
        c_prev(static_cast<std::size_t>(layers));
    for (int l = 0; l < layers; ++l) {
        h_prev[static_cast<std::size_t>(l)] = Matrix::Zero(batch, hidden);
        c_prev[static_cast<std::size_t>(l)] = Matrix::Zero(batch, hidden);
    }

    Matrix acts;
    for (Eigen::Index t = 0; t < steps; ++t) {
        Matrix input = X.col(t);
        for (int l = 0; l < layers; ++l) {
            auto& cache = fwd.layers[static_cast<std::size_t>(l)];
            cache.x[static_cast<std::size_t>(t)] = input;

            acts.noalias() = input * params.wx(l).transpose();
            acts.noalias() += h_prev[static_cast<std::size_t>(l)] * params.wh(l).transpose();
            acts.rowwise() += params.bias(l).transpose();

            auto i = (1.0 / (1.0 + (-acts.leftCols(hidden).array()).exp())).matrix().eval();
            auto f =
                (1.0 / (1.0 + (-acts.middleCols(hidden, hidden).array()).exp())).matrix().eval();
            auto g = acts.middleCols(2 * hidden, hidden).array().tanh().matrix().eval();
            auto o =
                (1.0 / (1.0 + (-acts.rightCols(hidden).array()).exp())).matrix().eval();

            Matrix cell = f.cwiseProduct(c_prev[static_cast<std::size_t>(l)]) + i.cwiseProduct(g);
            Matrix tanh_cell = cell.array().tanh().matrix();
            Matrix h = o.cwiseProduct(tanh_cell);

            c_prev[static_cast<std::size_t>(l)] = cell;
            h_prev[static_cast<std::size_t>(l)] = h;

            cache.gate_i[static_cast<std::size_t>(t)] = std::move(i);
            cache.gate_f[static_cast<std::size_t>(t)] = std::move(f);
            cache.gate_g[static_cast<std::size_t>(t)] = std::move(g);
            cache.gate_o[static_cast<std::size_t>(t)] = std::move(o);
            cache.cell[static_cast<std::size_t>(t)] = std::move(cell);
            cache.tanh_cell[static_cast<std::size_t>(t)] = std::move(tanh_cell);
            cache.h[static_cast<std::size_t>(t)] = h_prev[static_cast<std::size_t>(l)];

            if (l + 1 < layers) {
                if (use_dropout) {
                    Matrix mask(batch, hidden);
                    for (Eigen::Index row = 0; row < batch; ++row) {
                        for (Eigen::Index col = 0; col < hidden; ++col) {
                            mask(row, col) = rng->uniform01() < keep ? 1.0 / keep : 0.0;
                        }
                    }
                    input = h_prev[static_cast<std::size_t>(l)].cwiseProduct(mask);
                    cache.mask[static_cast<std::size_t>(t)] = std::move(mask);
                } else {
                    input = h_prev[static_cast<std::size_t>(l)];
                }
            }
        }
    }

    const auto& top = fwd.layers[static_cast<std::size_t>(layers - 1)];
    fwd.preds = (top.h[static_cast<std::size_t>(steps - 1)] * params.w_out().transpose())
                    .col(0);
    fwd.preds.array() += params.b_out();
    return fwd;
}

void backward_pass(const LstmParams& params, const Forward& fwd, const Eigen::VectorXd& y,
                   LstmParams& grad) {
    const int layers = params.layers();
    const int hidden = params.hidden();
    const auto steps = static_cast<Eigen::Index>(fwd.layers[0].x.size());
    const auto batch = fwd.preds.size();

    const Eigen::VectorXd dpred =
        2.0 / static_cast<double>(batch) * (fwd.preds - y);  // d(mean sq err)/d(pred)

    const auto& top = fwd.layers[static_cast<std::size_t>(layers - 1)];
    grad.w_out().noalias() +=
        dpred.transpose() * top.h[static_cast<std::size_t>(steps - 1)];
    grad.b_out() += dpred.sum();

    // Gradient injected into each layer's hidden outputs from above.
    std::vector<std::vector<Matrix>> dh_inject(static_cast<std::size_t>(layers));
    for (auto& per_t : dh_inject) {
        per_t.assign(static_cast<std::size_t>(steps), Matrix());
    }
    dh_inject[static_cast<std::size_t>(layers - 1)][static_cast<std::size_t>(steps - 1)] =
        dpred * params.w_out();

    Matrix dh_next, dc_next, dh, dc, d_acts;
    for (int l = layers - 1; l >= 0; --l) {
        const auto& cache = fwd.layers[static_cast<std::size_t>(l)];
        dh_next = Matrix::Zero(batch, hidden);
        dc_next = Matrix::Zero(batch, hidden);
        auto grad_wx = grad.wx(l);
        auto grad_wh = grad.wh(l);
        auto grad_b = grad.bias(l);
        for (Eigen::Index t = steps - 1; t >= 0; --t) {
            const auto ts = static_cast<std::size_t>(t);
            dh = dh_next;
            if (dh_inject[static_cast<std::size_t>(l)][ts].size() > 0) {
                dh += dh_inject[static_cast<std::size_t>(l)][ts];
            }

            const Matrix& i = cache.gate_i[ts];
            const Matrix& f = cache.gate_f[ts];
            const Matrix& g = cache.gate_g[ts];
            const Matrix& o = cache.gate_o[ts];
            const Matrix& tanh_cell = cache.tanh_cell[ts];

            dc = dc_next;
            dc.array() += dh.array() * o.array() * (1.0 - tanh_cell.array().square());

            d_acts.resize(batch, kGates * hidden);
            d_acts.leftCols(hidden).array() =
                dc.array() * g.array() * i.array() * (1.0 - i.array());
            if (t > 0) {
                d_acts.middleCols(hidden, hidden).array() =
                    dc.array() * cache.cell[ts - 1].array() * f.array() * (1.0 - f.array());
            } else {
                d_acts.middleCols(hidden, hidden).setZero();  // initial cell state is zero
            }
            d_acts.middleCols(2 * hidden, hidden).array() =
                dc.array() * i.array() * (1.0 - g.array().square());
            d_acts.rightCols(hidden).array() =
                dh.array() * tanh_cell.array() * o.array() * (1.0 - o.array());

            grad_wx.noalias() += d_acts.transpose() * cache.x[ts];
            if (t > 0) {
                grad_wh.noalias() += d_acts.transpose() * cache.h[ts - 1];
                dh_next.noalias() = d_acts * params.wh(l);
            } else {
                dh_next.setZero();
            }
            grad_b += d_acts.colwise().sum().transpose();

            dc_next = dc.cwiseProduct(f);

            if (l > 0) {
                // The input seen here was layer l-1's output through its
                // dropout mask, so the gradient routes back through it.
                Matrix dx = d_acts * params.wx(l);
                const Matrix& below_mask = fwd.layers[static_cast<std::size_t>(l - 1)].mask[ts];
                if (below_mask.size() > 0) dx = dx.cwiseProduct(below_mask);
                dh_inject[static_cast<std::size_t>(l - 1)][ts] = std::move(dx);
            }
        }
    }
}

Matrix batch_inputs(const std::vector<WindowSample>& samples,
                    std::span<const std::size_t> indices, int window) {
    Matrix X(static_cast<Eigen::Index>(indices.size()), window);
    for (std::size_t row = 0; row < indices.size(); ++row) {
        const auto& input = samples[indices[row]].input;
        for (int col = 0; col < window; ++col) {
            X(static_cast<Eigen::Index>(row), col) = input[static_cast<std::size_t>(col)];
        }
    }
    return X;
}

Eigen::VectorXd batch_targets(const std::vector<WindowSample>& samples,
                              std::span<const std::size_t> indices) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t row = 0; row < indices.size(); ++row) {
        y[static_cast<Eigen::Index>(row)] = samples[indices[row]].target;
    }
    return y;
}

/// Mean squared error over a whole sample set, evaluated in batches with
/// dropout off.
double evaluate_loss(const LstmParams& params, const std::vector<WindowSample>& samples,
                     int window, int batch_size) {
    double total_sq = 0.0;
    std::vector<std::size_t> indices(samples.size());
    std::iota(indices.begin(), indices.end(), 0);
    for (std::size_t start = 0; start < samples.size();
         start += static_cast<std::size_t>(batch_size)) {
        const std::size_t count =
            std::min<std::size_t>(static_cast<std::size_t>(batch_size), samples.size() - start);
        std::span<const std::size_t> chunk(indices.data() + start, count);
        const Matrix X = batch_inputs(samples, chunk, window);
        const Eigen::VectorXd y = batch_targets(samples, chunk);
        const Forward fwd = forward_pass(params, X, 0.0, nullptr);
        total_sq += (fwd.preds - y).squaredNorm();
    }
    return total_sq / static_cast<double>(samples.size());
}

struct AdamState {
    std::vector<double> m, v;
    long step = 0;
};

void adam_update(LstmParams& params, const LstmParams& grad, AdamState& state, double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++state.step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    std::vector<double>& w = params.raw();
    const std::vector<double>& g = grad.raw();
    for (std::size_t i = 0; i < w.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g[i] * g[i];
        w[i] -= lr * (state.m[i] / bc1) / (std::sqrt(state.v[i] / bc2) + eps);
    }
}

}  // namespace

double lstm_loss_and_grad(const LstmParams& params, const std::vector<WindowSample>& samples,
                          LstmParams* grad) {
    if (samples.empty()) throw NoTrainingData("empty sample set");
    const auto window = static_cast<int>(samples[0].input.size());
    std::vector<std::size_t> indices(samples.size());
    std::iota(indices.begin(), indices.end(), 0);
    const Matrix X = batch_inputs(samples, indices, window);
    const Eigen::VectorXd y = batch_targets(samples, indices);
    const Forward fwd = forward_pass(params, X, 0.0, nullptr);
    if (grad) {
        grad->set_zero();
        backward_pass(params, fwd, y, *grad);
    }
    return (fwd.preds - y).squaredNorm() / static_cast<double>(samples.size());
}

ForecastModel train(const WindowSets& sets, const TrainConfig& config) {
    validate(config);
    if (sets.train.empty()) throw NoTrainingData("empty training set");
    for (const auto& sample : sets.train) {
        if (static_cast<int>(sample.input.size()) != config.window) {
            throw std::invalid_argument("training sample window mismatch");
        }
    }

    Rng rng(config.seed);
    LstmParams params(config.layers, config.hidden);
    init_weights(params, rng);
    LstmParams grad(config.layers, config.hidden);
    AdamState adam;
    adam.m.assign(params.raw().size(), 0.0);
    adam.v.assign(params.raw().size(), 0.0);

    LstmParams best = params;
    double best_val = std::numeric_limits<double>::infinity();
    int epoch_of_best = 0;
    TrainStats stats;

    std::vector<std::size_t> order(sets.train.size());
    std::iota(order.begin(), order.end(), 0);

    double val_loss = 0.0;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_sq = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch)) {
            const std::size_t count = std::min<std::size_t>(
                static_cast<std::size_t>(config.batch), order.size() - start);
            std::span<const std::size_t> chunk(order.data() + start, count);
            const Matrix X = batch_inputs(sets.train, chunk, config.window);
            const Eigen::VectorXd y = batch_targets(sets.train, chunk);
            const Forward fwd = forward_pass(params, X, config.dropout, &rng);
            const double batch_sq = (fwd.preds - y).squaredNorm();
            if (!std::isfinite(batch_sq)) {
                throw NonFiniteLoss("non-finite training loss at epoch " +
                                    std::to_string(epoch) + ", sample offset " +
                                    std::to_string(start));
            }
            epoch_sq += batch_sq;
            grad.set_zero();
            backward_pass(params, fwd, y, grad);
            adam_update(params, grad, adam, config.learn_rate);
        }
        const double train_loss = epoch_sq / static_cast<double>(sets.train.size());
        if (epoch == 1) stats.first_epoch_train_loss = train_loss;
        stats.last_epoch_train_loss = train_loss;

        // Checkpoint on validation loss; training loss stands in when the
        // split produced no validation series.
        val_loss = sets.val.empty()
                       ? train_loss
                       : evaluate_loss(params, sets.val, config.window, config.batch);
        if (!std::isfinite(val_loss)) {
            throw NonFiniteLoss("non-finite validation loss at epoch " + std::to_string(epoch));
        }
        if (val_loss < best_val) {
            best_val = val_loss;
            best = params;
            epoch_of_best = epoch;
        }
    }
    stats.final_val_loss = val_loss;
    return ForecastModel(std::move(best), config, best_val, epoch_of_best, stats);
}

// ---------------------------------------------------------------------------
// Model

ForecastModel::ForecastModel(LstmParams params, TrainConfig config, double best_val_loss,
                             int epoch_of_best, TrainStats stats)
    : params_(std::move(params)),
      config_(config),
      best_val_loss_(best_val_loss),
      epoch_of_best_(epoch_of_best),
      stats_(stats) {}

double ForecastModel::predict_scaled(std::span<const double> scaled_window) const {
    if (static_cast<int>(scaled_window.size()) != config_.window) {
        throw std::invalid_argument("predict_scaled: window length mismatch");
    }
    Matrix X(1, config_.window);
    for (int t = 0; t < config_.window; ++t) X(0, t) = scaled_window[static_cast<std::size_t>(t)];
    return forward_pass(params_, X, 0.0, nullptr).preds[0];
}

namespace {

constexpr char kWeightsMagic[4] = {'S', 'R', 'F', 'W'};
constexpr std::uint32_t kWeightsVersion = 1;

}  // namespace

void ForecastModel::save(const std::filesystem::path& manifest_path) const {
    std::filesystem::path weights_path = manifest_path;
    weights_path.replace_extension(".bin");

    {
        std::ofstream out(weights_path, std::ios::binary);
        if (!out) throw ParseError("cannot write " + weights_path.string());
        out.write(kWeightsMagic, sizeof(kWeightsMagic));
        const std::uint32_t version = kWeightsVersion;
        out.write(reinterpret_cast<const char*>(&version), sizeof(version));
        const std::uint64_t count = params_.raw().size();
        out.write(reinterpret_cast<const char*>(&count), sizeof(count));
        out.write(reinterpret_cast<const char*>(params_.raw().data()),
                  static_cast<std::streamsize>(count * sizeof(double)));
        if (!out) throw ParseError("write failed for " + weights_path.string());
    }

    nlohmann::json manifest{{"format_version", kWeightsVersion},
                            {"config", config_},
                            {"seed", config_.seed},
                            {"best_val_loss", best_val_loss_},
                            {"epoch_of_best", epoch_of_best_},
                            {"weights_file", weights_path.filename().string()},
                            {"parameter_count", params_.raw().size()}};
    std::ofstream out(manifest_path);
    if (!out) throw ParseError("cannot write " + manifest_path.string());
    out << manifest.dump(2) << '\n';
}

ForecastModel ForecastModel::load(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw ParseError("cannot open " + manifest_path.string());
    nlohmann::json manifest;
    in >> manifest;
    const auto config = manifest.at("config").get<TrainConfig>();
    const auto expected = manifest.at("parameter_count").get<std::uint64_t>();

    const std::filesystem::path weights_path =
        manifest_path.parent_path() / manifest.at("weights_file").get<std::string>();
    std::ifstream bin(weights_path, std::ios::binary);
    if (!bin) throw ParseError("cannot open " + weights_path.string());
    char magic[4];
    bin.read(magic, sizeof(magic));
    if (std::memcmp(magic, kWeightsMagic, sizeof(magic)) != 0) {
        throw ParseError(weights_path.string() + ": bad magic");
    }
    std::uint32_t version = 0;
    bin.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != kWeightsVersion) {
        throw ParseError(weights_path.string() + ": unsupported version " +
                         std::to_string(version));
    }
    std::uint64_t count = 0;
    bin.read(reinterpret_cast<char*>(&count), sizeof(count));

    LstmParams params(config.layers, config.hidden);
    if (count != params.raw().size() || count != expected) {
        throw ParseError(weights_path.string() + ": parameter count mismatch");
    }
    bin.read(reinterpret_cast<char*>(params.raw().data()),
             static_cast<std::streamsize>(count * sizeof(double)));
    if (!bin) throw ParseError(weights_path.string() + ": truncated weights");

    return ForecastModel(std::move(params), config, manifest.at("best_val_loss").get<double>(),
                         manifest.at("epoch_of_best").get<int>(), TrainStats{});
}

std::vector<double> recursive_forecast(
    const std::function<double(std::span<const double>)>& predict_scaled,
    std::span<const double> observed, int window, int horizon) {
    if (static_cast<int>(observed.size()) < window) {
        throw std::invalid_argument("recursive_forecast: need at least `window` observed values");
    }
    if (horizon < 0) throw std::invalid_argument("recursive_forecast: negative horizon");
    std::vector<double> current(observed.end() - window, observed.end());
    std::vector<double> scaled(static_cast<std::size_t>(window));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(horizon));
    for (int step = 0; step < horizon; ++step) {
        const double lo = *std::min_element(current.begin(), current.end());
        const double hi = *std::max_element(current.begin(), current.end());
        const double span = hi > lo ? hi - lo : 1.0;
        for (std::size_t i = 0; i < current.size(); ++i) scaled[i] = (current[i] - lo) / span;
        const double next = lo + predict_scaled(scaled) * span;
        out.push_back(next);
        current.erase(current.begin());
        current.push_back(next);
    }
    return out;
}

std::vector<double> forecast(const ForecastModel& model, const DefectSeries& observed,
                             int horizon) {
    return recursive_forecast(
        [&model](std::span<const double> w) { return model.predict_scaled(w); },
        observed.counts(), model.config().window, horizon);
}

}  // namespace srf
