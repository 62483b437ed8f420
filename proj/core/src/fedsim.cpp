#include "dacfl/fedsim.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <utility>

#include "dacfl/consensus.hpp"
#include "dacfl/error.hpp"

namespace dacfl {

namespace {

Partition make_partition(const ExperimentConfig& cfg, const Dataset& train) {
    if (cfg.partition == PartitionMode::iid) {
        return partition_iid(train, cfg.nodes, cfg.seed);
    }
    return partition_noniid(train, cfg.nodes, cfg.shards_per_node, cfg.seed);
}

TopologySchedule make_schedule(const ExperimentConfig& cfg) {
    TopologySchedule s;
    s.mode = cfg.time_varying ? ScheduleMode::time_varying : ScheduleMode::time_invariant;
    s.period = cfg.tv_period;
    s.n = cfg.nodes;
    s.kind = cfg.topology;
    s.psi = cfg.density;
    s.seed = cfg.seed;
    return s;
}

double sq_norm(const ParamVector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double sq_dist(const ParamVector& a, const ParamVector& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

}  // namespace

Trainer::Trainer(const ExperimentConfig& cfg, const Dataset& train, const Dataset& test)
    : cfg_(cfg), train_(&train), test_(&test) {
    cfg_.validate();
    shape_ = ModelShape{train.dim, 0, train.num_classes};
    part_ = make_partition(cfg_, train);
    schedule_ = make_schedule(cfg_);

    // Shared initialization: one stream, bit-identical parameters everywhere.
    Rng init_rng(derive_seed(cfg_.seed, Stream::init));
    ParamVector w0 = init_params(shape_, init_rng);
    nodes_.reserve(static_cast<std::size_t>(cfg_.nodes));
    for (int i = 0; i < cfg_.nodes; ++i) {
        NodeState st{w0, w0, {}, Rng(derive_seed(cfg_.seed, Stream::batch,
                                                 static_cast<std::uint64_t>(i)))};
        if (cfg_.algorithm == Algorithm::dacfl) st.estimate = w0;
        nodes_.push_back(std::move(st));
    }

    full_batch_.resize(train.size());
    std::iota(full_batch_.begin(), full_batch_.end(), 0);
}

void Trainer::local_update(int node, ParamVector& params, double lr, int round,
                           double& sq_grad_sum, long long& steps,
                           std::vector<ParamVector>* recorded) {
    auto do_step = [&](const std::vector<int>& batch) {
        LossGrad lg = loss_and_grad(params, shape_, *train_, batch);
        if (!std::isfinite(lg.loss)) {
            throw DivergenceError(
                "training loss became non-finite at round " + std::to_string(round), round);
        }
        double g2 = sq_norm(lg.grad);
        sq_grad_sum += g2;
        ++steps;
        ++grad_steps_;
        if (g2 > g_sq_max_) g_sq_max_ = g2;
        sgd_step(params, lg.grad, lr);
        if (recorded) recorded->push_back(std::move(lg.grad));
    };
    if (cfg_.steps_mode == StepsMode::single_batch) {
        do_step(sample_batch(part_, node, cfg_.batch_size, nodes_[node].rng));
    } else {
        for (int e = 0; e < cfg_.local_epochs; ++e) {
            for (const auto& b :
                 epoch_batches(part_, node, cfg_.batch_size, nodes_[node].rng)) {
                do_step(b);
            }
        }
    }
}

MetricsRecord Trainer::step_round() {
    const int t = t_;
    const int round = t + 1;
    const int n = cfg_.nodes;
    const double lr = cfg_.lr * std::pow(cfg_.lr_decay, t);

    std::vector<Payload> start(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) start[static_cast<std::size_t>(i)] = nodes_[i].model;

    double sq_grad_sum = 0.0;
    long long steps = 0;

    switch (cfg_.algorithm) {
        case Algorithm::dacfl: {
            MixingMatrix w = schedule_matrix(schedule_, t);
            std::vector<Payload> mixed = neighborhood_average(start, w);
            for (int i = 0; i < n; ++i) {
                nodes_[i].model = std::move(mixed[static_cast<std::size_t>(i)]);
                local_update(i, nodes_[i].model, lr, round, sq_grad_sum, steps);
            }
            std::vector<Payload> deltas(static_cast<std::size_t>(n));
            std::vector<Payload> est(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const ParamVector& before = start[static_cast<std::size_t>(i)];
                ParamVector d(before.size());
                for (std::size_t k = 0; k < before.size(); ++k) {
                    d[k] = nodes_[i].model[k] - before[k];
                }
                deltas[static_cast<std::size_t>(i)] = std::move(d);
                est[static_cast<std::size_t>(i)] = nodes_[i].estimate;
            }
            std::vector<Payload> next = fodac_step(est, deltas, w);
            for (int i = 0; i < n; ++i) {
                nodes_[i].estimate = std::move(next[static_cast<std::size_t>(i)]);
            }
            break;
        }
        case Algorithm::cdsgd: {
            MixingMatrix w = schedule_matrix(schedule_, t);
            std::vector<Payload> mixed = neighborhood_average(start, w);
            for (int i = 0; i < n; ++i) {
                nodes_[i].model = std::move(mixed[static_cast<std::size_t>(i)]);
                local_update(i, nodes_[i].model, lr, round, sq_grad_sum, steps);
            }
            break;
        }
        case Algorithm::dpsgd: {
            MixingMatrix w = schedule_matrix(schedule_, t);
            std::vector<std::vector<ParamVector>> grads(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                ParamVector z = start[static_cast<std::size_t>(i)];
                local_update(i, z, lr, round, sq_grad_sum, steps,
                             &grads[static_cast<std::size_t>(i)]);
            }
            std::vector<Payload> mixed = neighborhood_average(start, w);
            for (int i = 0; i < n; ++i) {
                nodes_[i].model = std::move(mixed[static_cast<std::size_t>(i)]);
                for (const ParamVector& g : grads[static_cast<std::size_t>(i)]) {
                    sgd_step(nodes_[i].model, g, lr);
                }
            }
            break;
        }
        case Algorithm::fedavg: {
            for (int i = 0; i < n; ++i) {
                local_update(i, nodes_[i].model, lr, round, sq_grad_sum, steps);
            }
            ParamVector avg(start[0].size(), 0.0);
            for (int i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += nodes_[i].model[k];
            }
            for (double& v : avg) v /= static_cast<double>(n);
            for (int i = 0; i < n; ++i) nodes_[i].model = avg;
            break;
        }
    }

    for (int i = 0; i < n; ++i) {
        double th = sq_dist(nodes_[i].model, start[static_cast<std::size_t>(i)]);
        if (th > theta_sq_max_) theta_sq_max_ = th;
        nodes_[i].prev_model = std::move(start[static_cast<std::size_t>(i)]);
    }
    ++t_;

    MetricsRecord rec;
    rec.round = round;
    rec.lambda = lr;
    rec.avg_sq_grad_norm = (steps > 0) ? sq_grad_sum / static_cast<double>(steps) : 0.0;

    std::vector<EvalRow> rows = eval_rows();
    std::vector<double> accs;
    accs.reserve(rows.size());
    double loss_sum = 0.0;
    for (const EvalRow& r : rows) {
        if (!std::isfinite(r.mean_loss)) {
            throw DivergenceError(
                "evaluation loss became non-finite at round " + std::to_string(round), round);
        }
        accs.push_back(r.accuracy);
        loss_sum += r.mean_loss;
    }
    auto [avg_acc, var_acc] = accuracy_stats(accs);
    rec.avg_acc = avg_acc;
    rec.var_acc = var_acc;
    rec.avg_loss = loss_sum / static_cast<double>(rows.size());
    return rec;
}

ParamVector Trainer::average_model() const {
    ParamVector avg(nodes_[0].model.size(), 0.0);
    for (const NodeState& st : nodes_) {
        for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += st.model[k];
    }
    for (double& v : avg) v /= static_cast<double>(nodes_.size());
    return avg;
}

LossGrad Trainer::full_loss_grad(const ParamVector& params) const {
    return loss_and_grad(params, shape_, *train_, full_batch_);
}

std::vector<EvalRow> Trainer::eval_rows() const {
    std::vector<EvalRow> rows;
    switch (cfg_.algorithm) {
        case Algorithm::dacfl:
            for (int i = 0; i < cfg_.nodes; ++i) {
                Evaluation e = evaluate(nodes_[i].estimate, shape_, *test_);
                rows.push_back({i, e.accuracy, e.mean_loss});
            }
            break;
        case Algorithm::cdsgd:
            for (int i = 0; i < cfg_.nodes; ++i) {
                Evaluation e = evaluate(nodes_[i].model, shape_, *test_);
                rows.push_back({i, e.accuracy, e.mean_loss});
            }
            break;
        case Algorithm::dpsgd: {
            Evaluation e = evaluate(average_model(), shape_, *test_);
            rows.push_back({-1, e.accuracy, e.mean_loss});
            break;
        }
        case Algorithm::fedavg: {
            Evaluation e = evaluate(nodes_[0].model, shape_, *test_);
            rows.push_back({-1, e.accuracy, e.mean_loss});
            break;
        }
    }
    return rows;
}

RunResult run_training(const ExperimentConfig& cfg, const Dataset& train,
                       const Dataset& test, bool bound_check) {
    Trainer tr(cfg, train, test);
    RunResult out;
    out.records.reserve(static_cast<std::size_t>(cfg.rounds));
    BoundTrace trace;
    for (int t = 0; t < cfg.rounds; ++t) {
        if (bound_check) {
            ParamVector avg = tr.average_model();
            LossGrad lg = tr.full_loss_grad(avg);
            if (t == 0) trace.f0 = lg.loss;
            trace.avg_model_sq_grad.push_back(sq_norm(lg.grad));
            trace.avg_model_grads.push_back(std::move(lg.grad));
            trace.avg_models.push_back(std::move(avg));
        }
        out.records.push_back(tr.step_round());
    }
    out.final_eval = tr.eval_rows();
    if (bound_check) {
        trace.g_sq = tr.g_sq_max();
        trace.theta_sq = tr.theta_sq_max();
        Theorem1Inputs inp;
        inp.lambda = cfg.lr;
        inp.T = cfg.rounds;
        inp.g_sq = trace.g_sq;
        inp.theta_sq = trace.theta_sq;
        inp.L = estimate_smoothness(trace);
        inp.f0 = trace.f0;
        inp.f_star = 0.0;
        out.bound_inputs = inp;
        out.bound = theorem1_bound(inp);
        double s = 0.0;
        for (double v : trace.avg_model_sq_grad) s += v;
        out.bound_lhs = s / static_cast<double>(trace.avg_model_sq_grad.size());
    }
    return out;
}

RunResult run_dacfl(ExperimentConfig cfg, const Dataset& train, const Dataset& test) {
    cfg.algorithm = Algorithm::dacfl;
    return run_training(cfg, train, test);
}

RunResult run_cdsgd(ExperimentConfig cfg, const Dataset& train, const Dataset& test) {
    cfg.algorithm = Algorithm::cdsgd;
    return run_training(cfg, train, test);
}

RunResult run_dpsgd(ExperimentConfig cfg, const Dataset& train, const Dataset& test) {
    cfg.algorithm = Algorithm::dpsgd;
    return run_training(cfg, train, test);
}

RunResult run_fedavg(ExperimentConfig cfg, const Dataset& train, const Dataset& test) {
    cfg.algorithm = Algorithm::fedavg;
    return run_training(cfg, train, test);
}

RunResult run_experiment(const ExperimentConfig& cfg, bool bound_check) {
    cfg.validate();
    if (cfg.data == DataSource::synthetic) {
        SyntheticSplit split =
            gen_synthetic_split(cfg.classes, cfg.dim, cfg.per_class, cfg.spread, cfg.seed);
        return run_training(cfg, split.train, split.test, bound_check);
    }
    Dataset ds = load_idx(cfg.images, cfg.labels);
    Standardizer sc = Standardizer::fit(ds);
    sc.apply(ds);
    return run_training(cfg, ds, ds, bound_check);
}

void write_outputs(const ExperimentConfig& cfg, const RunResult& result) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + cfg.out + "': " + ec.message());
    }

    write_csv(result.records, (fs::path(cfg.out) / "metrics.csv").string());

    const std::string eval_path = (fs::path(cfg.out) / "final_eval.csv").string();
    {
        std::ofstream f(eval_path, std::ios::binary);
        if (!f) throw IoError("cannot open '" + eval_path + "' for writing");
        f << "node,acc,loss\n";
        for (const EvalRow& r : result.final_eval) {
            if (r.node < 0) {
                f << "global";
            } else {
                f << r.node;
            }
            f << ',' << format_g17(r.accuracy) << ',' << format_g17(r.mean_loss) << '\n';
        }
        if (!f.good()) throw IoError("write failed for '" + eval_path + "'");
    }

    const std::string cfg_path = (fs::path(cfg.out) / "resolved_config.txt").string();
    {
        std::ofstream f(cfg_path, std::ios::binary);
        if (!f) throw IoError("cannot open '" + cfg_path + "' for writing");
        f << resolved_config_text(cfg);
        if (!f.good()) throw IoError("write failed for '" + cfg_path + "'");
    }
}

}  // namespace dacfl
