#ifndef CHAOSSEP_MLP_HPP
#define CHAOSSEP_MLP_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaossep/pl_function.hpp"

namespace chaossep {

/// Dense ReLU network for 1-D regression: `depth` hidden layers of `width`
/// units, scalar linear output. weights[k] is row-major (fan_out x fan_in);
/// connection layer k = depth is the output layer.
struct MlpModel {
    int depth = 0;
    int width = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    int layer_count() const { return depth + 1; }
    int fan_in(int layer) const { return layer == 0 ? 1 : width; }
    int fan_out(int layer) const { return layer == depth ? 1 : width; }
    std::size_t param_count() const;
    bool finite() const;
};

/// Deterministic Glorot-uniform initialization; biases start at zero.
MlpModel mlp_init(int depth, int width, std::uint64_t seed);

double mlp_forward(const MlpModel& m, double x);

/// Batched forward pass (structure-of-arrays inner loops).
void mlp_forward_batch(const MlpModel& m, std::span<const double> xs,
                       std::span<double> out);

/// Mean squared error over a sample set.
double mlp_loss(const MlpModel& m, std::span<const double> xs,
                std::span<const double> targets);

struct MlpGradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

/// Analytic full-batch MSE gradients.
MlpGradients mlp_gradients(const MlpModel& m, std::span<const double> xs,
                           std::span<const double> targets);

struct TrainConfig {
    int epochs = 1500;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    int sample_count = 4096;  // fixed uniform grid over the target domain
    std::uint64_t seed = 0;   // initialization seed
};

struct TrainResult {
    double final_mse = 0.0;
    double l1 = 0.0;               // exact when the PL route fits the budget
    double l1_error_estimate = 0.0;  // two-resolution difference (quadrature route)
    bool l1_exact = false;
    bool saturated = false;  // relative loss change < 1e-5 over final 100 epochs
    std::vector<double> loss_curve;
    double wall_time_s = 0.0;
};

/// Regression target on [-1, 1]. `exact` enables the exact-L1 route.
struct RegressionTarget {
    std::string name;
    std::function<double(double)> eval;
    std::optional<PLFunction> exact;
};

/// Full-batch Adam on MSE over a uniform grid; deterministic given seeds.
/// Throws on divergence (NaN loss), reporting the epoch.
TrainResult train(MlpModel& m, const RegressionTarget& target, const TrainConfig& cfg);

/// Exact PL form of the network on [-1, 1], built by layerwise partition
/// refinement; piece count never exceeds (2 width)^depth.
PLFunction model_to_pl(const MlpModel& m,
                       std::size_t piece_budget = kDefaultPieceBudget);

enum class TaskKind { Hard, Easy };

/// Number of self-compositions defining each task (hard: f^40, easy: f^8).
int task_compositions(TaskKind task);

/// The regression target for a task over hard_family(3).
RegressionTarget make_task_target(TaskKind task);

struct ExperimentRun {
    std::string task;
    int depth = 0;
    int width = 0;
    std::uint64_t seed = 0;
    int epochs = 0;
    double floor_headline = 0.0;  // theoretical floor for this depth (0 if none)
    TrainResult result;
    MlpModel model;
};

/// Trains one model per (depth, seed); runs execute in parallel with no
/// shared mutable state.
std::vector<ExperimentRun> run_experiment(TaskKind task,
                                          const std::vector<int>& depths,
                                          int width, const TrainConfig& cfg,
                                          const std::vector<std::uint64_t>& seeds,
                                          int parallelism = 0);

}  // namespace chaossep

#endif
