#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "srf/corpus.hpp"
#include "srf/rng.hpp"

namespace srf {

/// Training hyperparameters. Defaults: 8-step input window, 4 stacked
/// recurrent layers of 128 units, inter-layer dropout 0.2, 300 epochs,
/// batch 64, series-level 80:20 train/validation split, adaptive-moment
/// gradient descent at 1e-3.
struct TrainConfig {
    int window = 8;
    int layers = 4;
    int hidden = 128;
    double dropout = 0.2;
    int epochs = 300;
    int batch = 64;
    double split_ratio = 0.8;
    std::uint64_t seed = 0;
    double learn_rate = 1e-3;
};

void to_json(nlohmann::json& j, const TrainConfig& config);
void from_json(const nlohmann::json& j, TrainConfig& config);
void validate(const TrainConfig& config);

struct NoTrainingData : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFiniteLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One supervised slice: `window` inputs scaled into [0, 1] by the raw
/// input window's own min/max, and the next value scaled by the same
/// bounds (targets may exceed 1 on growing series). A flat window scales
/// with a substituted unit span, so inputs become all zeros.
struct WindowSample {
    std::vector<double> input;
    double target = 0.0;
    double lo = 0.0;  // raw input-window minimum
    double hi = 0.0;  // raw input-window maximum
};

struct WindowSets {
    std::vector<WindowSample> train;
    std::vector<WindowSample> val;
};

/// Slice every eligible series into window samples after a series-level
/// 80:20 shuffle split (windows of one series never straddle the split).
/// Throws NoTrainingData when every series is shorter than window + 1.
WindowSets make_windows(const std::vector<DefectSeries>& series_set, const TrainConfig& config,
                        Rng& rng);

/// Flat parameter block of the stacked-LSTM network with typed views into
/// each weight matrix. Gate blocks are ordered input, forget, candidate,
/// output along the 4*hidden dimension.
class LstmParams {
public:
    LstmParams(int layers, int hidden);

    int layers() const { return layers_; }
    int hidden() const { return hidden_; }
    int input_dim(int layer) const { return layer == 0 ? 1 : hidden_; }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    Eigen::Map<Eigen::MatrixXd> wx(int layer);
    Eigen::Map<Eigen::MatrixXd> wh(int layer);
    Eigen::Map<Eigen::VectorXd> bias(int layer);
    Eigen::Map<Eigen::RowVectorXd> w_out();
    double& b_out();
    Eigen::Map<const Eigen::MatrixXd> wx(int layer) const;
    Eigen::Map<const Eigen::MatrixXd> wh(int layer) const;
    Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
    Eigen::Map<const Eigen::RowVectorXd> w_out() const;
    double b_out() const;

    void set_zero();

private:
    int layers_;
    int hidden_;
    std::vector<std::size_t> wx_off_, wh_off_, b_off_;
    std::size_t w_out_off_ = 0, b_out_off_ = 0;
    std::vector<double> data_;
};

/// Fan-in uniform weight init with forget-gate bias 1, drawn from `rng`.
void init_weights(LstmParams& params, Rng& rng);

/// Batch MSE loss over `samples` and (optionally) its analytic parameter
/// gradient, with dropout inactive. This is the evaluation-time path and
/// the surface checked against finite differences.
double lstm_loss_and_grad(const LstmParams& params, const std::vector<WindowSample>& samples,
                          LstmParams* grad = nullptr);

struct TrainStats {
    double first_epoch_train_loss = 0.0;
    double last_epoch_train_loss = 0.0;
    double final_val_loss = 0.0;
};

/// A trained network: the checkpointed weights (epoch with the lowest
/// validation loss), their config and training provenance. Immutable;
/// inference is const and dropout-free, so repeated forecasts are
/// identical.
class ForecastModel {
public:
    ForecastModel(LstmParams params, TrainConfig config, double best_val_loss,
                  int epoch_of_best, TrainStats stats);

    const TrainConfig& config() const { return config_; }
    const LstmParams& params() const { return params_; }
    double best_val_loss() const { return best_val_loss_; }
    int epoch_of_best() const { return epoch_of_best_; }
    const TrainStats& stats() const { return stats_; }

    /// One-step prediction from a scaled input window of length
    /// config().window.
    double predict_scaled(std::span<const double> scaled_window) const;

    /// Writes `<path>` (JSON manifest) plus the raw weight tensor next to
    /// it; load() restores a model that forecasts bit-identically.
    void save(const std::filesystem::path& manifest_path) const;
    static ForecastModel load(const std::filesystem::path& manifest_path);

private:
    LstmParams params_;
    TrainConfig config_;
    double best_val_loss_;
    int epoch_of_best_;
    TrainStats stats_;
};

/// Mini-batch training with adaptive-moment updates; fully deterministic
/// given config.seed. Returns the weights of the epoch with the lowest
/// validation loss. Throws NonFiniteLoss if the loss leaves the finite
/// range, NoTrainingData on an empty training set.
ForecastModel train(const WindowSets& sets, const TrainConfig& config);

/// Recursive multi-step forecast: scale the trailing window by its own
/// min/max, predict one scaled step, denormalize with those bounds, append,
/// slide. Exposed with a pluggable predictor so the recursion can be
/// exercised independently of a trained network.
std::vector<double> recursive_forecast(
    const std::function<double(std::span<const double>)>& predict_scaled,
    std::span<const double> observed, int window, int horizon);

/// Forecast `horizon` steps beyond `observed` (requires
/// observed.size() >= window).
std::vector<double> forecast(const ForecastModel& model, const DefectSeries& observed,
                             int horizon);

}  // namespace srf
