#pragma once

#include <vector>

#include "dacfl/matrix.hpp"

namespace dacfl {

using Payload = std::vector<double>;

// One first-order dynamic average consensus step for all nodes:
//   x_i <- x_i + sum_{j != i} w_ij (x_j - x_i) + delta_i
// The difference form keeps two exact properties the matrix form loses to
// rounding: identical estimates are a fixed point of the consensus term, and
// the estimate mean shifts by exactly mean(delta) (symmetric w_ij cancel
// pairwise). Throws TopologyError when w fails validation and DimensionError
// on shape mismatches.
std::vector<Payload> fodac_step(const std::vector<Payload>& estimates,
                                const std::vector<Payload>& deltas,
                                const MixingMatrix& w);

// Per-node neighborhood weighted average: out_i = sum_j w_ij v_j.
std::vector<Payload> neighborhood_average(const std::vector<Payload>& values,
                                          const MixingMatrix& w);

// Exact mean over nodes.
Payload network_average(const std::vector<Payload>& values);

// Scalar reference signals used by the tracking experiment. Node index i and
// time t are both 1-based:
//   kind I:  r_i(t) = sin(t) + (1/t)^i + t + i
//   kind II: r_i(t) = sin(t) + (1/t)^i + t
enum class SignalKind { inputs_i, inputs_ii };

double reference_signal(SignalKind kind, int node, int t);

// Tracking-experiment trace for one estimator: series[i][k] is node i's
// estimate at t = k+1; true_mean[k] is the network mean of the references.
struct TrackingSeries {
    std::vector<std::vector<double>> estimates;  // n x T
    std::vector<double> true_mean;               // T
};

struct TrackingResult {
    TrackingSeries fodac;
    TrackingSeries neighborhood;  // per-round neighborhood average of references
    TrackingSeries exact;         // running exact mean (central aggregation)
};

// Runs the three estimators side by side on the scalar signals for t = 1..T.
// FODAC initializes x at t=1 to the reference r_i(1) and applies first-order
// differences from then on.
TrackingResult run_tracking_experiment(SignalKind kind, const MixingMatrix& w, int T);

}  // namespace dacfl
