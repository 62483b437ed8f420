#include "dacfl/consensus.hpp"

#include <cmath>
#include <string>

#include "dacfl/error.hpp"

namespace dacfl {

namespace {

void check_matrix(const MixingMatrix& w, std::size_t nodes) {
    if (static_cast<std::size_t>(w.n) != nodes) {
        throw DimensionError("consensus: matrix is " + std::to_string(w.n) + "x" +
                             std::to_string(w.n) + " but there are " + std::to_string(nodes) +
                             " payloads");
    }
    ValidationReport r = validate(w);
    if (!r.ok()) {
        throw TopologyError("consensus: mixing matrix failed validation (row dev " +
                            std::to_string(r.max_row_dev) + ", col dev " +
                            std::to_string(r.max_col_dev) + ", asymmetry " +
                            std::to_string(r.max_asymmetry) + ", min entry " +
                            std::to_string(r.min_entry) +
                            (r.connected ? "" : ", disconnected") + ")");
    }
}

void check_shapes(const std::vector<Payload>& values, const char* what) {
    if (values.empty()) throw DimensionError(std::string(what) + ": no payloads");
    std::size_t dim = values[0].size();
    for (const auto& v : values) {
        if (v.size() != dim) {
            throw DimensionError(std::string(what) + ": payload dims differ (" +
                                 std::to_string(v.size()) + " vs " + std::to_string(dim) + ")");
        }
    }
}

}  // namespace

std::vector<Payload> fodac_step(const std::vector<Payload>& estimates,
                                const std::vector<Payload>& deltas,
                                const MixingMatrix& w) {
    check_shapes(estimates, "fodac_step");
    check_shapes(deltas, "fodac_step deltas");
    if (estimates.size() != deltas.size() || estimates[0].size() != deltas[0].size()) {
        throw DimensionError("fodac_step: estimates and deltas disagree in shape");
    }
    check_matrix(w, estimates.size());

    int n = w.n;
    std::size_t dim = estimates[0].size();
    std::vector<Payload> out(static_cast<std::size_t>(n), Payload(dim, 0.0));
    for (int i = 0; i < n; ++i) {
        const Payload& xi = estimates[static_cast<std::size_t>(i)];
        Payload& oi = out[static_cast<std::size_t>(i)];
        oi = xi;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double wij = w.at(i, j);
            if (wij == 0.0) continue;
            const Payload& xj = estimates[static_cast<std::size_t>(j)];
            for (std::size_t k = 0; k < dim; ++k) oi[k] += wij * (xj[k] - xi[k]);
        }
        const Payload& di = deltas[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < dim; ++k) oi[k] += di[k];
    }
    return out;
}

std::vector<Payload> neighborhood_average(const std::vector<Payload>& values,
                                          const MixingMatrix& w) {
    check_shapes(values, "neighborhood_average");
    check_matrix(w, values.size());

    int n = w.n;
    std::size_t dim = values[0].size();
    std::vector<Payload> out(static_cast<std::size_t>(n), Payload(dim, 0.0));
    for (int i = 0; i < n; ++i) {
        Payload& oi = out[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            double wij = w.at(i, j);
            if (wij == 0.0) continue;
            const Payload& vj = values[static_cast<std::size_t>(j)];
            for (std::size_t k = 0; k < dim; ++k) oi[k] += wij * vj[k];
        }
    }
    return out;
}

Payload network_average(const std::vector<Payload>& values) {
    check_shapes(values, "network_average");
    std::size_t dim = values[0].size();
    Payload mean(dim, 0.0);
    for (const auto& v : values)
        for (std::size_t k = 0; k < dim; ++k) mean[k] += v[k];
    double inv = 1.0 / static_cast<double>(values.size());
    for (double& m : mean) m *= inv;
    return mean;
}

double reference_signal(SignalKind kind, int node, int t) {
    if (node < 1 || t < 1) {
        throw DimensionError("reference_signal: node and t are 1-based, got node=" +
                             std::to_string(node) + " t=" + std::to_string(t));
    }
    double base = std::sin(static_cast<double>(t)) +
                  std::pow(1.0 / static_cast<double>(t), static_cast<double>(node)) +
                  static_cast<double>(t);
    if (kind == SignalKind::inputs_i) base += static_cast<double>(node);
    return base;
}

TrackingResult run_tracking_experiment(SignalKind kind, const MixingMatrix& w, int T) {
    if (T < 1) throw DimensionError("run_tracking_experiment: T must be >= 1");
    int n = w.n;
    TrackingResult res;
    for (TrackingSeries* s : {&res.fodac, &res.neighborhood, &res.exact}) {
        s->estimates.assign(static_cast<std::size_t>(n), std::vector<double>());
        s->true_mean.clear();
    }

    std::vector<Payload> x;        // fodac estimates, one scalar per node
    std::vector<Payload> prev_ref;
    for (int t = 1; t <= T; ++t) {
        std::vector<Payload> ref(static_cast<std::size_t>(n), Payload(1, 0.0));
        double mean = 0.0;
        for (int i = 0; i < n; ++i) {
            ref[static_cast<std::size_t>(i)][0] = reference_signal(kind, i + 1, t);
            mean += ref[static_cast<std::size_t>(i)][0];
        }
        mean /= static_cast<double>(n);

        if (t == 1) {
            x = ref;
        } else {
            std::vector<Payload> deltas(static_cast<std::size_t>(n), Payload(1, 0.0));
            for (int i = 0; i < n; ++i) {
                deltas[static_cast<std::size_t>(i)][0] =
                    ref[static_cast<std::size_t>(i)][0] - prev_ref[static_cast<std::size_t>(i)][0];
            }
            x = fodac_step(x, deltas, w);
        }
        prev_ref = ref;

        std::vector<Payload> nb = neighborhood_average(ref, w);
        for (int i = 0; i < n; ++i) {
            res.fodac.estimates[static_cast<std::size_t>(i)].push_back(
                x[static_cast<std::size_t>(i)][0]);
            res.neighborhood.estimates[static_cast<std::size_t>(i)].push_back(
                nb[static_cast<std::size_t>(i)][0]);
            res.exact.estimates[static_cast<std::size_t>(i)].push_back(mean);
        }
        res.fodac.true_mean.push_back(mean);
        res.neighborhood.true_mean.push_back(mean);
        res.exact.true_mean.push_back(mean);
    }
    return res;
}

}  // namespace dacfl
