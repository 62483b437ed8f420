#include "dacfl/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dacfl/error.hpp"

namespace dacfl {

namespace {

void check_shape(const ParamVector& params, const ModelShape& shape) {
    if (shape.input_dim < 1 || shape.num_classes < 2 || shape.hidden_dim < 0) {
        throw DimensionError("model: bad shape (d=" + std::to_string(shape.input_dim) +
                             ", h=" + std::to_string(shape.hidden_dim) +
                             ", C=" + std::to_string(shape.num_classes) + ")");
    }
    if (static_cast<int>(params.size()) != shape.param_count()) {
        throw DimensionError("model: params has " + std::to_string(params.size()) +
                             " entries, shape needs " + std::to_string(shape.param_count()));
    }
}

void check_batch(const ModelShape& shape, const Dataset& ds, const std::vector<int>& batch) {
    if (batch.empty()) throw DimensionError("model: empty batch");
    if (ds.dim != shape.input_dim) {
        throw DimensionError("model: dataset dim " + std::to_string(ds.dim) +
                             " != input dim " + std::to_string(shape.input_dim));
    }
    for (int idx : batch) {
        if (idx < 0 || idx >= ds.size()) {
            throw DimensionError("model: batch index " + std::to_string(idx) + " out of range");
        }
        int y = ds.labels[static_cast<std::size_t>(idx)];
        if (y < 0 || y >= shape.num_classes) {
            throw DimensionError("model: label " + std::to_string(y) + " outside [0, " +
                                 std::to_string(shape.num_classes) + ")");
        }
    }
}

// log-softmax of logits in place; returns the log of the normalizer path so
// the caller gets both loss terms and probabilities cheaply.
void softmax_stable(std::vector<double>& logits, std::vector<double>& probs) {
    double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    probs.resize(logits.size());
    for (std::size_t c = 0; c < logits.size(); ++c) {
        probs[c] = std::exp(logits[c] - mx);
        sum += probs[c];
    }
    for (double& p : probs) p /= sum;
}

struct Views {
    // Offsets into the flat parameter vector.
    int w1 = 0, b1 = 0, w2 = 0, b2 = 0;
};

Views views_of(const ModelShape& s) {
    Views v;
    if (s.hidden_dim > 0) {
        v.w1 = 0;
        v.b1 = s.hidden_dim * s.input_dim;
        v.w2 = v.b1 + s.hidden_dim;
        v.b2 = v.w2 + s.num_classes * s.hidden_dim;
    } else {
        v.w1 = v.b1 = 0;
        v.w2 = 0;
        v.b2 = s.num_classes * s.input_dim;
    }
    return v;
}

}  // namespace

ParamVector init_params(const ModelShape& shape, Rng& rng) {
    if (shape.input_dim < 1 || shape.num_classes < 2 || shape.hidden_dim < 0) {
        throw DimensionError("init_params: bad shape");
    }
    ParamVector p(static_cast<std::size_t>(shape.param_count()), 0.0);
    Views v = views_of(shape);
    auto glorot = [&](int offset, int rows, int cols) {
        double lim = std::sqrt(6.0 / (rows + cols));
        for (int k = 0; k < rows * cols; ++k) p[static_cast<std::size_t>(offset + k)] = rng.uniform(-lim, lim);
    };
    if (shape.hidden_dim > 0) {
        glorot(v.w1, shape.hidden_dim, shape.input_dim);
        glorot(v.w2, shape.num_classes, shape.hidden_dim);
    } else {
        glorot(v.w2, shape.num_classes, shape.input_dim);
    }
    return p;
}

LossGrad loss_and_grad(const ParamVector& params, const ModelShape& shape, const Dataset& ds,
                       const std::vector<int>& batch) {
    check_shape(params, shape);
    check_batch(shape, ds, batch);

    const int d = shape.input_dim, h = shape.hidden_dim, C = shape.num_classes;
    Views v = views_of(shape);
    LossGrad out;
    out.grad.assign(params.size(), 0.0);
    double inv_m = 1.0 / static_cast<double>(batch.size());

    std::vector<double> hidden(static_cast<std::size_t>(std::max(h, 1)));
    std::vector<double> logits(static_cast<std::size_t>(C));
    std::vector<double> probs;

    for (int idx : batch) {
        const double* x = ds.row(idx);
        int y = ds.labels[static_cast<std::size_t>(idx)];

        if (h > 0) {
            for (int j = 0; j < h; ++j) {
                double a = params[static_cast<std::size_t>(v.b1 + j)];
                const double* w = params.data() + v.w1 + static_cast<std::size_t>(j) * d;
                for (int k = 0; k < d; ++k) a += w[k] * x[k];
                hidden[static_cast<std::size_t>(j)] = a > 0.0 ? a : 0.0;
            }
            for (int c = 0; c < C; ++c) {
                double a = params[static_cast<std::size_t>(v.b2 + c)];
                const double* w = params.data() + v.w2 + static_cast<std::size_t>(c) * h;
                for (int j = 0; j < h; ++j) a += w[j] * hidden[static_cast<std::size_t>(j)];
                logits[static_cast<std::size_t>(c)] = a;
            }
        } else {
            for (int c = 0; c < C; ++c) {
                double a = params[static_cast<std::size_t>(v.b2 + c)];
                const double* w = params.data() + v.w2 + static_cast<std::size_t>(c) * d;
                for (int k = 0; k < d; ++k) a += w[k] * x[k];
                logits[static_cast<std::size_t>(c)] = a;
            }
        }

        softmax_stable(logits, probs);
        double py = probs[static_cast<std::size_t>(y)];
        out.loss -= inv_m * std::log(std::max(py, 1e-300));

        // dL/dlogit_c = (p_c - [c == y]) / m
        for (int c = 0; c < C; ++c) {
            double g = (probs[static_cast<std::size_t>(c)] - (c == y ? 1.0 : 0.0)) * inv_m;
            if (g == 0.0) continue;
            out.grad[static_cast<std::size_t>(v.b2 + c)] += g;
            if (h > 0) {
                double* gw = out.grad.data() + v.w2 + static_cast<std::size_t>(c) * h;
                for (int j = 0; j < h; ++j) gw[j] += g * hidden[static_cast<std::size_t>(j)];
            } else {
                double* gw = out.grad.data() + v.w2 + static_cast<std::size_t>(c) * d;
                for (int k = 0; k < d; ++k) gw[k] += g * x[k];
            }
        }
        if (h > 0) {
            for (int j = 0; j < h; ++j) {
                if (hidden[static_cast<std::size_t>(j)] <= 0.0) continue;
                double gh = 0.0;
                for (int c = 0; c < C; ++c) {
                    double g = (probs[static_cast<std::size_t>(c)] - (c == ds.labels[static_cast<std::size_t>(idx)] ? 1.0 : 0.0)) * inv_m;
                    gh += g * params[static_cast<std::size_t>(v.w2 + c * h + j)];
                }
                out.grad[static_cast<std::size_t>(v.b1 + j)] += gh;
                double* gw = out.grad.data() + v.w1 + static_cast<std::size_t>(j) * d;
                for (int k = 0; k < d; ++k) gw[k] += gh * x[k];
            }
        }
    }
    return out;
}

ParamVector finite_diff_grad(const ParamVector& params, const ModelShape& shape,
                             const Dataset& ds, const std::vector<int>& batch, double eps) {
    check_shape(params, shape);
    if (eps <= 0.0) throw DimensionError("finite_diff_grad: eps must be > 0");
    ParamVector g(params.size(), 0.0);
    ParamVector p = params;
    for (std::size_t k = 0; k < p.size(); ++k) {
        double orig = p[k];
        p[k] = orig + eps;
        double fp = loss_and_grad(p, shape, ds, batch).loss;
        p[k] = orig - eps;
        double fm = loss_and_grad(p, shape, ds, batch).loss;
        p[k] = orig;
        g[k] = (fp - fm) / (2.0 * eps);
    }
    return g;
}

void sgd_step(ParamVector& params, const ParamVector& grad, double lr) {
    if (params.size() != grad.size()) throw DimensionError("sgd_step: shape mismatch");
    if (lr <= 0.0) throw DimensionError("sgd_step: lr must be > 0");
    for (std::size_t k = 0; k < params.size(); ++k) params[k] -= lr * grad[k];
}

Evaluation evaluate(const ParamVector& params, const ModelShape& shape, const Dataset& ds) {
    check_shape(params, shape);
    if (ds.size() == 0) throw DimensionError("evaluate: empty dataset");
    if (ds.dim != shape.input_dim) {
        throw DimensionError("evaluate: dataset dim " + std::to_string(ds.dim) +
                             " != input dim " + std::to_string(shape.input_dim));
    }

    const int d = shape.input_dim, h = shape.hidden_dim, C = shape.num_classes;
    Views v = views_of(shape);
    std::vector<double> hidden(static_cast<std::size_t>(std::max(h, 1)));
    std::vector<double> logits(static_cast<std::size_t>(C));
    std::vector<double> probs;

    int correct = 0;
    double loss = 0.0;
    for (int i = 0; i < ds.size(); ++i) {
        const double* x = ds.row(i);
        if (h > 0) {
            for (int j = 0; j < h; ++j) {
                double a = params[static_cast<std::size_t>(v.b1 + j)];
                const double* w = params.data() + v.w1 + static_cast<std::size_t>(j) * d;
                for (int k = 0; k < d; ++k) a += w[k] * x[k];
                hidden[static_cast<std::size_t>(j)] = a > 0.0 ? a : 0.0;
            }
            for (int c = 0; c < C; ++c) {
                double a = params[static_cast<std::size_t>(v.b2 + c)];
                const double* w = params.data() + v.w2 + static_cast<std::size_t>(c) * h;
                for (int j = 0; j < h; ++j) a += w[j] * hidden[static_cast<std::size_t>(j)];
                logits[static_cast<std::size_t>(c)] = a;
            }
        } else {
            for (int c = 0; c < C; ++c) {
                double a = params[static_cast<std::size_t>(v.b2 + c)];
                const double* w = params.data() + v.w2 + static_cast<std::size_t>(c) * d;
                for (int k = 0; k < d; ++k) a += w[k] * x[k];
                logits[static_cast<std::size_t>(c)] = a;
            }
        }
        int best = 0;
        for (int c = 1; c < C; ++c) {
            if (logits[static_cast<std::size_t>(c)] > logits[static_cast<std::size_t>(best)]) best = c;
        }
        int y = ds.labels[static_cast<std::size_t>(i)];
        if (best == y) ++correct;
        softmax_stable(logits, probs);
        loss -= std::log(std::max(probs[static_cast<std::size_t>(y)], 1e-300));
    }
    Evaluation e;
    e.accuracy = static_cast<double>(correct) / ds.size();
    e.mean_loss = loss / ds.size();
    return e;
}

}  // namespace dacfl
