#include <cmath>
#include <vector>

#include "dacfl/consensus.hpp"
#include "dacfl/error.hpp"
#include "dacfl/matrix.hpp"
#include "dacfl/rng.hpp"
#include "doctest.h"

using namespace dacfl;

namespace {

double mean_of(const std::vector<Payload>& v, std::size_t k) {
    double s = 0.0;
    for (const Payload& p : v) s += p[k];
    return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("reference signals match their closed forms") {
    // node 1, t=1: sin(1) + 1 + 1 + 1
    CHECK(reference_signal(SignalKind::inputs_i, 1, 1) ==
          doctest::Approx(std::sin(1.0) + 3.0).epsilon(1e-15));
    // node 2, t=4: sin(4) + (1/4)^2 + 4 + 2
    CHECK(reference_signal(SignalKind::inputs_i, 2, 4) ==
          doctest::Approx(std::sin(4.0) + 0.0625 + 6.0).epsilon(1e-15));
    // inputs II drops the +i term
    CHECK(reference_signal(SignalKind::inputs_ii, 2, 4) ==
          doctest::Approx(std::sin(4.0) + 0.0625 + 4.0).epsilon(1e-15));
    CHECK(reference_signal(SignalKind::inputs_i, 3, 5) -
              reference_signal(SignalKind::inputs_ii, 3, 5) ==
          doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("identical estimates with zero deltas are a bitwise fixed point") {
    MixingMatrix w = build_random_doubly_stochastic(6, 2);
    std::vector<Payload> est(6, Payload{0.3, -1.7, 2.25});
    std::vector<Payload> deltas(6, Payload{0.0, 0.0, 0.0});
    std::vector<Payload> out = fodac_step(est, deltas, w);
    for (int i = 0; i < 6; ++i) {
        CHECK(out[i] == est[i]);
    }
}

TEST_CASE("one step shifts the estimate mean by exactly the delta mean") {
    Rng rng(5);
    for (MatrixKind kind :
         {MatrixKind::uniform, MatrixKind::dense_random, MatrixKind::sparse_random}) {
        TopologySchedule s;
        s.n = 10;
        s.kind = kind;
        s.psi = 0.5;
        s.seed = 3;
        MixingMatrix w = schedule_matrix(s, 0);
        std::vector<Payload> est(10, Payload(4));
        std::vector<Payload> deltas(10, Payload(4));
        for (auto& p : est)
            for (double& x : p) x = rng.uniform(-5.0, 5.0);
        for (auto& p : deltas)
            for (double& x : p) x = rng.uniform(-1.0, 1.0);
        std::vector<Payload> out = fodac_step(est, deltas, w);
        for (std::size_t k = 0; k < 4; ++k) {
            double expected = mean_of(est, k) + mean_of(deltas, k);
            CHECK(std::abs(mean_of(out, k) - expected) <= 1e-12);
        }
    }
}

TEST_CASE("fodac_step validates shapes and the matrix") {
    MixingMatrix w = build_uniform(3);
    std::vector<Payload> est(3, Payload{1.0, 2.0});
    std::vector<Payload> deltas(3, Payload{0.0, 0.0});

    std::vector<Payload> wrong_count(2, Payload{1.0, 2.0});
    CHECK_THROWS_AS(fodac_step(wrong_count, deltas, w), DimensionError);

    std::vector<Payload> wrong_dim(3, Payload{1.0});
    CHECK_THROWS_AS(fodac_step(est, wrong_dim, w), DimensionError);

    MixingMatrix bad = build_uniform(3);
    bad.entries[1] = 0.9;  // breaks symmetry and sums
    CHECK_THROWS_AS(fodac_step(est, deltas, bad), TopologyError);
}

TEST_CASE("neighborhood average with uniform weights is the exact mean") {
    MixingMatrix w = build_uniform(5);
    std::vector<Payload> vals(5, Payload(2));
    Rng rng(8);
    for (auto& p : vals)
        for (double& x : p) x = rng.normal();
    std::vector<Payload> mixed = neighborhood_average(vals, w);
    Payload mean = network_average(vals);
    for (int i = 0; i < 5; ++i) {
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(mixed[i][k] == doctest::Approx(mean[k]).epsilon(1e-14));
        }
    }
}

TEST_CASE("tracking reproduces the uniform-topology exactness") {
    MixingMatrix w = build_uniform(10);
    TrackingResult tr = run_tracking_experiment(SignalKind::inputs_ii, w, 20);
    for (int i = 0; i < 10; ++i) {
        for (int k = 0; k < 20; ++k) {
            CHECK(std::abs(tr.neighborhood.estimates[i][k] - tr.neighborhood.true_mean[k]) <=
                  1e-12);
            CHECK(std::abs(tr.exact.estimates[i][k] - tr.exact.true_mean[k]) <= 1e-12);
        }
    }
}

TEST_CASE("tracking beats one-hop averaging at the horizon on a dense topology") {
    MixingMatrix w = build_random_doubly_stochastic(10, 1);
    TrackingResult tr = run_tracking_experiment(SignalKind::inputs_i, w, 20);
    auto max_err_at = [&](const TrackingSeries& series, int k) {
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            worst = std::max(worst, std::abs(series.estimates[i][k] - series.true_mean[k]));
        }
        return worst;
    };
    CHECK(max_err_at(tr.fodac, 19) < max_err_at(tr.neighborhood, 19));
}

TEST_CASE("fodac transient decays on a static-mean signal") {
    // Constant references: deltas vanish, estimates converge to the mean.
    MixingMatrix w = build_random_doubly_stochastic(8, 4);
    std::vector<Payload> est(8, Payload(1));
    for (int i = 0; i < 8; ++i) est[i][0] = static_cast<double>(i);
    std::vector<Payload> zeros(8, Payload{0.0});
    double mean0 = mean_of(est, 0);
    for (int t = 0; t < 200; ++t) est = fodac_step(est, zeros, w);
    for (int i = 0; i < 8; ++i) {
        CHECK(est[i][0] == doctest::Approx(mean0).epsilon(1e-9));
    }
}

TEST_CASE("network_average rejects empty input") {
    CHECK_THROWS_AS(network_average({}), DimensionError);
}
