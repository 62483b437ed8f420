#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dacfl/consensus.hpp"
#include "dacfl/config.hpp"
#include "dacfl/error.hpp"
#include "dacfl/fedsim.hpp"
#include "dacfl/matrix.hpp"
#include "dacfl/metrics.hpp"
#include "dacfl/model.hpp"
#include "dacfl/rng.hpp"

namespace {

// Config keys accepted both in the file and as flag overrides.
const std::vector<std::string> kConfigKeys = {
    "algorithm", "nodes",       "rounds",          "batch_size", "local_epochs",
    "steps_mode", "lr",         "lr_decay",        "topology",   "density",
    "time_varying", "tv_period", "partition",      "shards_per_node", "data",
    "images",     "labels",     "classes",         "dim",        "per_class",
    "spread",     "seed",       "out"};

dacfl::MatrixKind parse_kind(const std::string& v) {
    if (v == "uniform") return dacfl::MatrixKind::uniform;
    if (v == "dense") return dacfl::MatrixKind::dense_random;
    return dacfl::MatrixKind::sparse_random;
}

int cmd_train(const std::string& config_path, CLI::App* cmd,
              const std::map<std::string, std::string>& overrides, bool bound_check) {
    dacfl::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = dacfl::parse_config_file(config_path);
    for (const auto& [key, value] : overrides) {
        if (cmd->count("--" + key) > 0) dacfl::apply_override(cfg, key, value);
    }
    cfg.validate();

    std::cout << "resolved configuration:\n" << dacfl::resolved_config_text(cfg);
    std::cout.flush();

    dacfl::RunResult res = dacfl::run_experiment(cfg, bound_check);
    dacfl::write_outputs(cfg, res);

    const dacfl::MetricsRecord& last = res.records.back();
    std::cout << "round " << last.round << ": avg_acc=" << dacfl::format_g17(last.avg_acc)
              << " var_acc=" << dacfl::format_g17(last.var_acc)
              << " avg_loss=" << dacfl::format_g17(last.avg_loss) << "\n";
    if (res.bound) {
        const dacfl::Theorem1Bound& b = *res.bound;
        const dacfl::Theorem1Inputs& in = *res.bound_inputs;
        std::cout << "bound check: lhs=" << dacfl::format_g17(res.bound_lhs)
                  << " c0=" << dacfl::format_g17(b.c0) << " c1=" << dacfl::format_g17(b.c1)
                  << " bound=" << dacfl::format_g17(b.bound)
                  << " kappa=" << dacfl::format_g17(b.kappa)
                  << " g_sq=" << dacfl::format_g17(in.g_sq)
                  << " theta_sq=" << dacfl::format_g17(in.theta_sq)
                  << " L=" << dacfl::format_g17(in.L)
                  << " holds=" << (res.bound_lhs <= b.bound ? "yes" : "no") << "\n";
    }
    std::cout << "outputs written to " << cfg.out << "\n";
    return 0;
}

int cmd_matrix(int n, const std::string& kind, double density, std::uint64_t seed) {
    dacfl::TopologySchedule s;
    s.n = n;
    s.kind = parse_kind(kind);
    s.psi = density;
    s.seed = seed;
    dacfl::MixingMatrix m = dacfl::schedule_matrix(s, 0);
    for (int i = 0; i < m.n; ++i) {
        for (int j = 0; j < m.n; ++j) {
            if (j) std::fputc(',', stdout);
            std::fputs(dacfl::format_g17(m.at(i, j)).c_str(), stdout);
        }
        std::fputc('\n', stdout);
    }
    dacfl::ValidationReport r = dacfl::validate(m);
    std::fprintf(stderr,
                 "n=%d kind=%s max_row_dev=%.3g max_col_dev=%.3g max_asymmetry=%.3g "
                 "min_entry=%.3g connected=%s ok=%s\n",
                 m.n, dacfl::to_string(m.kind).c_str(), r.max_row_dev, r.max_col_dev,
                 r.max_asymmetry, r.min_entry, r.connected ? "yes" : "no",
                 r.ok() ? "yes" : "no");
    return r.ok() ? 0 : 2;
}

int cmd_consensus_demo(const std::string& inputs, const std::string& kind, int n, int rounds,
                       double density, std::uint64_t seed, const std::string& out_path) {
    dacfl::SignalKind sk =
        (inputs == "I") ? dacfl::SignalKind::inputs_i : dacfl::SignalKind::inputs_ii;
    dacfl::TopologySchedule s;
    s.n = n;
    s.kind = parse_kind(kind);
    s.psi = density;
    s.seed = seed;
    dacfl::MixingMatrix w = dacfl::schedule_matrix(s, 0);
    dacfl::TrackingResult tr = dacfl::run_tracking_experiment(sk, w, rounds);

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw dacfl::IoError("cannot open '" + out_path + "' for writing");
        os = &file;
    }
    *os << "method,node,t,estimate,true_mean,abs_err\n";
    auto emit = [&](const char* name, const dacfl::TrackingSeries& series) {
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < rounds; ++k) {
                double est = series.estimates[static_cast<std::size_t>(i)]
                                             [static_cast<std::size_t>(k)];
                double mean = series.true_mean[static_cast<std::size_t>(k)];
                *os << name << ',' << i << ',' << (k + 1) << ','
                    << dacfl::format_g17(est) << ',' << dacfl::format_g17(mean) << ','
                    << dacfl::format_g17(std::abs(est - mean)) << '\n';
            }
        }
    };
    emit("fodac", tr.fodac);
    emit("neighborhood", tr.neighborhood);
    emit("exact", tr.exact);
    if (!os->good()) throw dacfl::IoError("write failed for consensus demo output");

    auto final_max_err = [&](const dacfl::TrackingSeries& series) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            double e = std::abs(series.estimates[static_cast<std::size_t>(i)].back() -
                                series.true_mean.back());
            if (e > worst) worst = e;
        }
        return worst;
    };
    std::fprintf(stderr, "final max abs err: fodac=%.6g neighborhood=%.6g exact=%.6g\n",
                 final_max_err(tr.fodac), final_max_err(tr.neighborhood),
                 final_max_err(tr.exact));
    return 0;
}

int cmd_gradcheck(int dim, int hidden, int classes, int batch, int trials,
                  std::uint64_t seed) {
    dacfl::ModelShape shape{dim, hidden, classes};
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        dacfl::Rng rng(dacfl::derive_seed(seed, dacfl::Stream::misc,
                                          static_cast<std::uint64_t>(trial)));
        dacfl::Dataset ds;
        ds.num_classes = classes;
        ds.dim = dim;
        ds.features.resize(static_cast<std::size_t>(batch) * dim);
        for (double& v : ds.features) v = rng.normal();
        ds.labels.resize(static_cast<std::size_t>(batch));
        for (int& l : ds.labels) l = static_cast<int>(rng.uniform_index(classes));

        dacfl::ParamVector params = dacfl::init_params(shape, rng);
        for (double& p : params) p += 0.1 * rng.normal();

        std::vector<int> all(static_cast<std::size_t>(batch));
        for (int i = 0; i < batch; ++i) all[static_cast<std::size_t>(i)] = i;

        dacfl::LossGrad lg = dacfl::loss_and_grad(params, shape, ds, all);
        dacfl::ParamVector fd = dacfl::finite_diff_grad(params, shape, ds, all);

        double diff = 0.0, ga = 0.0, fa = 0.0;
        for (std::size_t k = 0; k < fd.size(); ++k) {
            diff = std::max(diff, std::abs(lg.grad[k] - fd[k]));
            ga = std::max(ga, std::abs(lg.grad[k]));
            fa = std::max(fa, std::abs(fd[k]));
        }
        double rel = diff / std::max({1.0, ga, fa});
        if (rel > worst) worst = rel;
    }
    std::printf("max relative error over %d trials: %.6g (threshold 1e-4): %s\n", trials,
                worst, worst <= 1e-4 ? "pass" : "fail");
    return worst <= 1e-4 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serverless decentralized federated learning simulator"};
    app.require_subcommand(1);

    CLI::App* train = app.add_subcommand("train", "run a training experiment");
    std::string config_path;
    bool bound_check = false;
    std::map<std::string, std::string> overrides;
    train->add_option("--config", config_path, "key=value config file");
    train->add_flag("--bound-check", bound_check,
                    "evaluate the convergence bound (one extra full-gradient pass per round)");
    for (const std::string& key : kConfigKeys) {
        train->add_option("--" + key, overrides[key], "override config key " + key);
    }

    CLI::App* matrix = app.add_subcommand("matrix", "construct and print a mixing matrix");
    int mx_n = 10;
    std::string mx_kind = "uniform";
    double mx_density = 0.5;
    std::uint64_t mx_seed = 1;
    matrix->add_option("--n", mx_n, "matrix size")->required();
    matrix->add_option("--kind", mx_kind, "uniform|dense|sparse")
        ->check(CLI::IsMember({"uniform", "dense", "sparse"}));
    matrix->add_option("--density", mx_density, "nonzero fraction for sparse matrices");
    matrix->add_option("--seed", mx_seed, "construction seed");

    CLI::App* demo = app.add_subcommand("consensus-demo", "signal-tracking comparison");
    std::string dm_inputs = "I";
    std::string dm_kind = "dense";
    int dm_n = 10;
    int dm_rounds = 20;
    double dm_density = 0.5;
    std::uint64_t dm_seed = 1;
    std::string dm_out;
    demo->add_option("--inputs", dm_inputs, "signal family I|II")
        ->check(CLI::IsMember({"I", "II"}));
    demo->add_option("--matrix", dm_kind, "uniform|dense|sparse")
        ->check(CLI::IsMember({"uniform", "dense", "sparse"}));
    demo->add_option("--n", dm_n, "node count");
    demo->add_option("--rounds", dm_rounds, "tracking steps");
    demo->add_option("--density", dm_density, "nonzero fraction for sparse matrices");
    demo->add_option("--seed", dm_seed, "construction seed");
    demo->add_option("--out", dm_out, "CSV output path (default: standard output)");

    CLI::App* gradcheck =
        app.add_subcommand("gradcheck", "compare analytic gradients with finite differences");
    int gc_dim = 8;
    int gc_hidden = 16;
    int gc_classes = 4;
    int gc_batch = 10;
    int gc_trials = 50;
    std::uint64_t gc_seed = 1;
    gradcheck->add_option("--input-dim", gc_dim, "feature dimension");
    gradcheck->add_option("--hidden", gc_hidden, "hidden width (0 = linear model)");
    gradcheck->add_option("--classes", gc_classes, "class count");
    gradcheck->add_option("--batch", gc_batch, "batch size per trial");
    gradcheck->add_option("--trials", gc_trials, "number of random draws");
    gradcheck->add_option("--seed", gc_seed, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*train) return cmd_train(config_path, train, overrides, bound_check);
        if (*matrix) return cmd_matrix(mx_n, mx_kind, mx_density, mx_seed);
        if (*demo) {
            return cmd_consensus_demo(dm_inputs, dm_kind, dm_n, dm_rounds, dm_density,
                                      dm_seed, dm_out);
        }
        if (*gradcheck) {
            return cmd_gradcheck(gc_dim, gc_hidden, gc_classes, gc_batch, gc_trials, gc_seed);
        }
    } catch (const dacfl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const dacfl::DimensionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const dacfl::DensityError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const dacfl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
