#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dacfl/config.hpp"
#include "dacfl/data.hpp"
#include "dacfl/matrix.hpp"
#include "dacfl/metrics.hpp"
#include "dacfl/model.hpp"
#include "dacfl/rng.hpp"

namespace dacfl {

// Per-node training state. `estimate` is populated by dacfl only and stays
// empty for the other algorithms. `prev_model` is the model at the previous
// round start (equal to `model` before the first round).
struct NodeState {
    ParamVector model;
    ParamVector prev_model;
    ParamVector estimate;
    Rng rng;
};

// One evaluation unit: node id for per-node outputs (dacfl, cdsgd) or -1 for
// the single shared model (dpsgd, fedavg).
struct EvalRow {
    int node = -1;
    double accuracy = 0.0;
    double mean_loss = 0.0;
};

// Round engine with value semantics: copying a Trainer checkpoints the run,
// and step_round depends only on stored state and the round counter, so a
// restored copy replays identically.
class Trainer {
public:
    // Keeps pointers to the datasets; both must outlive the trainer.
    Trainer(const ExperimentConfig& cfg, const Dataset& train, const Dataset& test);

    // Runs one round and returns its metrics row (round numbers are 1-based).
    MetricsRecord step_round();

    int rounds_done() const { return t_; }
    const ExperimentConfig& config() const { return cfg_; }
    const ModelShape& shape() const { return shape_; }
    const std::vector<NodeState>& nodes() const { return nodes_; }
    const Partition& partition() const { return part_; }

    // Total SGD steps taken so far, for budget accounting.
    long long grad_steps() const { return grad_steps_; }

    // Running max of the squared batch-gradient norms (empirical G^2) and of
    // the per-round squared model displacements (empirical theta^2).
    double g_sq_max() const { return g_sq_max_; }
    double theta_sq_max() const { return theta_sq_max_; }

    ParamVector average_model() const;

    // Loss and gradient over the full training set at arbitrary parameters.
    LossGrad full_loss_grad(const ParamVector& params) const;

    // Evaluation units per the algorithm's output contract: dacfl evaluates
    // the consensus estimates, cdsgd the per-node models, dpsgd the exact
    // network mean, fedavg the shared global model.
    std::vector<EvalRow> eval_rows() const;

private:
    // steps_mode-aware local SGD from `params` in place; accumulates squared
    // gradient norms and the step count for the round's metrics. When
    // `recorded` is set, every raw gradient is stored so the step sequence
    // can be replayed onto a different base point (dpsgd evaluates gradients
    // pre-mixing but applies them post-mixing).
    void local_update(int node, ParamVector& params, double lr, int round,
                      double& sq_grad_sum, long long& steps,
                      std::vector<ParamVector>* recorded = nullptr);

    ExperimentConfig cfg_;
    const Dataset* train_;
    const Dataset* test_;
    ModelShape shape_;
    Partition part_;
    TopologySchedule schedule_;
    std::vector<NodeState> nodes_;
    std::vector<int> full_batch_;  // 0..m-1, for full-data gradient passes
    int t_ = 0;
    long long grad_steps_ = 0;
    double g_sq_max_ = 0.0;
    double theta_sq_max_ = 0.0;
};

struct RunResult {
    std::vector<MetricsRecord> records;
    std::vector<EvalRow> final_eval;
    // Populated when bound_check is requested: measured constants, the
    // resulting bound, and the measured left-hand side
    // (1/T) sum_t ||grad f(average model at round-start t)||^2.
    std::optional<Theorem1Inputs> bound_inputs;
    std::optional<Theorem1Bound> bound;
    double bound_lhs = 0.0;
};

// Trains per cfg on the given datasets. bound_check adds one full-data
// gradient evaluation per round at the node-average model.
RunResult run_training(const ExperimentConfig& cfg, const Dataset& train,
                       const Dataset& test, bool bound_check = false);

// Named entry points; each forces cfg.algorithm and delegates to run_training.
RunResult run_dacfl(ExperimentConfig cfg, const Dataset& train, const Dataset& test);
RunResult run_cdsgd(ExperimentConfig cfg, const Dataset& train, const Dataset& test);
RunResult run_dpsgd(ExperimentConfig cfg, const Dataset& train, const Dataset& test);
RunResult run_fedavg(ExperimentConfig cfg, const Dataset& train, const Dataset& test);

// Builds the datasets cfg names (synthetic split, or an IDX pair standardized
// with its own statistics and evaluated on itself), then trains.
RunResult run_experiment(const ExperimentConfig& cfg, bool bound_check = false);

// Writes metrics.csv, final_eval.csv and resolved_config.txt into cfg.out,
// creating the directory if needed.
void write_outputs(const ExperimentConfig& cfg, const RunResult& result);

}  // namespace dacfl
