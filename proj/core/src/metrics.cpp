#include "dacfl/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dacfl/error.hpp"

namespace dacfl {

std::pair<double, double> accuracy_stats(const std::vector<double>& per_node_acc) {
    if (per_node_acc.empty()) throw DimensionError("accuracy_stats: empty input");
    double mean = 0.0;
    for (double a : per_node_acc) mean += a;
    mean /= per_node_acc.size();
    double var = 0.0;
    for (double a : per_node_acc) var += (a - mean) * (a - mean);
    var /= per_node_acc.size();
    return {mean, var};
}

Theorem1Bound theorem1_bound(const Theorem1Inputs& inp) {
    if (inp.lambda <= 0.0 || inp.T < 1) {
        throw DimensionError("theorem1_bound: need lambda > 0 and T >= 1");
    }
    Theorem1Bound b;
    b.c0 = (2.0 / (inp.lambda * inp.T)) * (inp.f0 - inp.f_star);
    b.c1 = inp.g_sq + inp.theta_sq / (inp.lambda * inp.lambda) +
           inp.L * inp.theta_sq / inp.lambda;
    b.bound = b.c0 + b.c1;
    b.kappa = 2.0 * std::sqrt(inp.theta_sq);
    return b;
}

double estimate_smoothness(const BoundTrace& trace, int min_pairs) {
    std::size_t T = trace.avg_models.size();
    if (T < 2 || trace.avg_model_grads.size() != T) {
        throw DimensionError("estimate_smoothness: trace too short");
    }
    double max_ratio = 0.0;
    int pairs = 0;
    for (std::size_t lag = 1; lag < T && (pairs < min_pairs || lag == 1); ++lag) {
        for (std::size_t t = 0; t + lag < T; ++t) {
            const auto& wa = trace.avg_models[t];
            const auto& wb = trace.avg_models[t + lag];
            const auto& ga = trace.avg_model_grads[t];
            const auto& gb = trace.avg_model_grads[t + lag];
            double dw = 0.0, dg = 0.0;
            for (std::size_t k = 0; k < wa.size(); ++k) {
                double a = wb[k] - wa[k];
                double b = gb[k] - ga[k];
                dw += a * a;
                dg += b * b;
            }
            if (dw > 0.0) {
                max_ratio = std::max(max_ratio, std::sqrt(dg / dw));
                ++pairs;
            }
        }
    }
    if (pairs == 0) throw DimensionError("estimate_smoothness: no usable parameter pairs");
    return 2.0 * max_ratio;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::vector<MetricsRecord>& records, const std::string& path) {
    std::ofstream f(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!f) throw IoError("write_csv: cannot open " + path);
    f << "round,avg_acc,var_acc,avg_loss,avg_sq_grad_norm,lambda\n";
    for (const auto& r : records) {
        f << r.round << ',' << format_g17(r.avg_acc) << ',' << format_g17(r.var_acc) << ','
          << format_g17(r.avg_loss) << ',' << format_g17(r.avg_sq_grad_norm) << ','
          << format_g17(r.lambda) << '\n';
    }
    if (!f) throw IoError("write_csv: failed writing " + path);
}

}  // namespace dacfl
