#pragma once

#include <string>
#include <utility>
#include <vector>

namespace dacfl {

struct MetricsRecord {
    int round = 0;
    double avg_acc = 0.0;
    double var_acc = 0.0;
    double avg_loss = 0.0;
    double avg_sq_grad_norm = 0.0;
    double lambda = 0.0;
};

// Mean and population variance (divide by N) of per-node accuracies.
std::pair<double, double> accuracy_stats(const std::vector<double>& per_node_acc);

struct Theorem1Inputs {
    double lambda = 0.0;   // learning rate
    int T = 0;             // rounds
    double g_sq = 0.0;     // max ||grad_i||^2 over the run
    double theta_sq = 0.0; // max ||w_i^t - w_i^{t-1}||^2 over the run
    double L = 0.0;        // smoothness estimate
    double f0 = 0.0;       // loss of the average model at round 0
    double f_star = 0.0;   // lower bound on the loss
};

struct Theorem1Bound {
    double c0 = 0.0;  // (2/(lambda*T)) * (f0 - f_star)
    double c1 = 0.0;  // g_sq + theta_sq/lambda^2 + L*theta_sq/lambda
    double bound = 0.0;
    double kappa = 0.0;  // 2*sqrt(theta_sq), reported alongside
};

Theorem1Bound theorem1_bound(const Theorem1Inputs& inp);

// Per-run trace feeding the bound check: per-round squared gradient norms of
// the full-data gradient at the average model, plus the raw gradients
// themselves for the smoothness estimate.
struct BoundTrace {
    std::vector<double> avg_model_sq_grad;              // per round
    std::vector<std::vector<double>> avg_model_grads;   // per round, full gradient
    std::vector<std::vector<double>> avg_models;        // per round, parameters
    double g_sq = 0.0;
    double theta_sq = 0.0;
    double f0 = 0.0;
};

// L = 2 * max over sampled parameter pairs of ||grad_a - grad_b|| / ||w_a - w_b||,
// pairs drawn from the recorded trajectory (consecutive plus wider lags until
// at least min_pairs are used).
double estimate_smoothness(const BoundTrace& trace, int min_pairs = 100);

// Header: round,avg_acc,var_acc,avg_loss,avg_sq_grad_norm,lambda
// 17 significant digits, LF line endings.
void write_csv(const std::vector<MetricsRecord>& records, const std::string& path);

std::string format_g17(double v);

}  // namespace dacfl
