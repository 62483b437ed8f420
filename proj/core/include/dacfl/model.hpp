#pragma once

#include <cstdint>
#include <vector>

#include "dacfl/data.hpp"
#include "dacfl/rng.hpp"

namespace dacfl {

// MLP with at most one ReLU hidden layer; hidden_dim == 0 means a plain
// linear softmax classifier.
struct ModelShape {
    int input_dim = 0;
    int hidden_dim = 0;
    int num_classes = 0;

    int param_count() const {
        if (hidden_dim > 0) {
            return hidden_dim * input_dim + hidden_dim + num_classes * hidden_dim + num_classes;
        }
        return num_classes * input_dim + num_classes;
    }
};

// Flattened parameters. Layout: [W1 (h x d), b1 (h), W2 (C x h), b2 (C)] for
// hidden models, [W (C x d), b (C)] for linear ones.
using ParamVector = std::vector<double>;

// Glorot-uniform weights per block (limit sqrt(6/(fan_in+fan_out))), zero biases.
ParamVector init_params(const ModelShape& shape, Rng& rng);

struct LossGrad {
    double loss = 0.0;
    ParamVector grad;
};

// Mean cross-entropy over the batch (stable log-softmax) and its gradient by
// backpropagation. `batch` holds indices into ds.
LossGrad loss_and_grad(const ParamVector& params, const ModelShape& shape, const Dataset& ds,
                       const std::vector<int>& batch);

// Central finite differences, the gradient oracle for tests.
ParamVector finite_diff_grad(const ParamVector& params, const ModelShape& shape,
                             const Dataset& ds, const std::vector<int>& batch,
                             double eps = 1e-5);

void sgd_step(ParamVector& params, const ParamVector& grad, double lr);

struct Evaluation {
    double accuracy = 0.0;
    double mean_loss = 0.0;
};

// Argmax-logit accuracy (ties broken by lowest class index) and mean
// cross-entropy over the whole dataset.
Evaluation evaluate(const ParamVector& params, const ModelShape& shape, const Dataset& ds);

}  // namespace dacfl
