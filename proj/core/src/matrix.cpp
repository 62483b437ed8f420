#include "dacfl/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dacfl/error.hpp"
#include "dacfl/rng.hpp"

namespace dacfl {

std::string to_string(MatrixKind k) {
    switch (k) {
        case MatrixKind::uniform: return "uniform";
        case MatrixKind::dense_random: return "dense_random";
        case MatrixKind::sparse_random: return "sparse_random";
    }
    return "?";
}

MixingMatrix build_uniform(int n) {
    if (n < 1) throw DimensionError("build_uniform: n must be >= 1, got " + std::to_string(n));
    MixingMatrix m;
    m.n = n;
    m.kind = MatrixKind::uniform;
    m.entries.assign(static_cast<std::size_t>(n) * n, 1.0 / n);
    return m;
}

namespace {

// One attempt at the randomized construction. Returns false when a completion
// entry goes nonpositive; tiny negatives within tol are clamped to zero.
bool try_random_ds(int n, Rng& rng, std::vector<double>& a) {
    constexpr double kClampTol = 1e-12;
    a.assign(static_cast<std::size_t>(n) * n, 0.0);
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };

    at(0, 0) = rng.open01();
    for (int j = 1; j < n - 1; ++j) {
        double d = 1.0;
        for (int k = 0; k < j; ++k) d -= at(0, k);
        at(0, j) = d * rng.open01();
    }
    for (int i = 1; i < n - 1; ++i) {
        double d = 1.0;
        for (int k = 0; k < i; ++k) d -= at(k, 0);
        at(i, 0) = d * rng.open01();
    }
    for (int i = 1; i < n - 1; ++i) {
        for (int j = 1; j < n - 1; ++j) {
            double d1 = 1.0, d2 = 1.0;
            for (int k = 0; k < j; ++k) d1 -= at(i, k);
            for (int k = 0; k < i; ++k) d2 -= at(k, j);
            at(i, j) = std::min(d1, d2) * rng.open01();
        }
    }
    if (n > 1) {
        for (int j = 0; j < n - 1; ++j) {
            double d = 1.0;
            for (int k = 0; k < n - 1; ++k) d -= at(k, j);
            at(n - 1, j) = d;
        }
        for (int i = 0; i < n; ++i) {
            double d = 1.0;
            for (int k = 0; k < n - 1; ++k) d -= at(i, k);
            at(i, n - 1) = d;
        }
    } else {
        at(0, 0) = 1.0;
    }

    for (double& v : a) {
        if (v <= 0.0) {
            if (v >= -kClampTol) {
                v = 0.0;
            } else {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

MixingMatrix build_random_doubly_stochastic(int n, std::uint64_t seed, int max_retries) {
    if (n < 1) {
        throw DimensionError("build_random_doubly_stochastic: n must be >= 1, got " +
                             std::to_string(n));
    }
    Rng rng(seed);
    std::vector<double> a;
    for (int attempt = 1; attempt <= max_retries; ++attempt) {
        if (!try_random_ds(n, rng, a)) continue;
        MixingMatrix m;
        m.n = n;
        m.kind = MatrixKind::dense_random;
        m.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) {
            m.entries[static_cast<std::size_t>(i) * n + i] = a[static_cast<std::size_t>(i) * n + i];
            for (int j = i + 1; j < n; ++j) {
                double w = 0.5 * (a[static_cast<std::size_t>(i) * n + j] +
                                  a[static_cast<std::size_t>(j) * n + i]);
                m.entries[static_cast<std::size_t>(i) * n + j] = w;
                m.entries[static_cast<std::size_t>(j) * n + i] = w;
            }
        }
        return m;
    }
    throw ConstructionError(
        "build_random_doubly_stochastic: no nonnegative completion after " +
            std::to_string(max_retries) + " attempts (n=" + std::to_string(n) + ")",
        max_retries);
}

namespace {

// Symmetric pattern: ring backbone plus random symmetric pairs until the
// nonzero count reaches target (may overshoot by one cell on parity).
std::vector<char> sparse_pattern(int n, int target, Rng& rng) {
    std::vector<char> pat(static_cast<std::size_t>(n) * n, 0);
    auto set = [&](int i, int j) {
        pat[static_cast<std::size_t>(i) * n + j] = 1;
        pat[static_cast<std::size_t>(j) * n + i] = 1;
    };
    int count = 0;
    for (int i = 0; i < n; ++i) {
        if (!pat[static_cast<std::size_t>(i) * n + i]) { set(i, i); ++count; }
        int next = (i + 1) % n;
        if (next != i && !pat[static_cast<std::size_t>(i) * n + next]) {
            set(i, next);
            count += 2;
        }
    }
    std::vector<std::pair<int, int>> free_pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!pat[static_cast<std::size_t>(i) * n + j]) free_pairs.emplace_back(i, j);
    rng.shuffle(free_pairs);
    for (const auto& [i, j] : free_pairs) {
        if (count >= target) break;
        set(i, j);
        count += 2;
    }
    return pat;
}

}  // namespace

MixingMatrix build_sparse_doubly_stochastic(int n, double psi, std::uint64_t seed,
                                            int max_iters, double tol) {
    if (n < 2) {
        throw DimensionError("build_sparse_doubly_stochastic: n must be >= 2, got " +
                             std::to_string(n));
    }
    if (psi <= 0.0 || psi > 1.0) {
        throw DensityError("build_sparse_doubly_stochastic: density must be in (0,1], got " +
                           std::to_string(psi));
    }
    int target = static_cast<int>(std::ceil(psi * n * n));
    int backbone = (n == 2) ? 4 : 3 * n;
    if (target < backbone) {
        throw DensityError("build_sparse_doubly_stochastic: density " + std::to_string(psi) +
                           " cannot host the connected backbone for n=" + std::to_string(n) +
                           " (needs " + std::to_string(backbone) + " nonzeros, budget " +
                           std::to_string(target) + ")");
    }

    Rng rng(seed);
    std::vector<char> pat = sparse_pattern(n, target, rng);

    // Positive symmetric fill on the pattern.
    std::vector<double> s(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            if (!pat[static_cast<std::size_t>(i) * n + j]) continue;
            double v = rng.open01();
            s[static_cast<std::size_t>(i) * n + j] = v;
            s[static_cast<std::size_t>(j) * n + i] = v;
        }
    }

    // Symmetric Sinkhorn scaling: w_ij = x_i x_j s_ij with x <- sqrt(x/(Sx)).
    // Damped halfway toward the update to keep the iteration stable.
    std::vector<double> x(n, 1.0), sx(n, 0.0);
    double dev = 0.0;
    bool converged = false;
    for (int it = 0; it < max_iters; ++it) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += s[static_cast<std::size_t>(i) * n + j] * x[j];
            sx[i] = acc;
        }
        dev = 0.0;
        for (int i = 0; i < n; ++i) dev = std::max(dev, std::abs(x[i] * sx[i] - 1.0));
        if (dev <= tol) {
            converged = true;
            break;
        }
        for (int i = 0; i < n; ++i) {
            double next = std::sqrt(x[i] / sx[i]);
            x[i] = 0.5 * (x[i] + next);
        }
    }
    if (!converged) {
        throw ScalingError("build_sparse_doubly_stochastic: Sinkhorn scaling stalled after " +
                               std::to_string(max_iters) + " iterations (deviation " +
                               std::to_string(dev) + ")",
                           dev);
    }

    MixingMatrix m;
    m.n = n;
    m.kind = MatrixKind::sparse_random;
    m.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double v = x[i] * x[j] * s[static_cast<std::size_t>(i) * n + j];
            m.entries[static_cast<std::size_t>(i) * n + j] = v;
            m.entries[static_cast<std::size_t>(j) * n + i] = v;
        }
    }
    return m;
}

ValidationReport validate(const MixingMatrix& m) {
    ValidationReport r;
    int n = m.n;
    if (n <= 0 || m.entries.size() != static_cast<std::size_t>(n) * n) {
        throw DimensionError("validate: matrix storage does not match n=" + std::to_string(n));
    }
    r.min_entry = m.entries.empty() ? 0.0 : m.entries[0];
    for (int i = 0; i < n; ++i) {
        double row = 0.0, col = 0.0;
        for (int j = 0; j < n; ++j) {
            row += m.at(i, j);
            col += m.at(j, i);
            r.min_entry = std::min(r.min_entry, m.at(i, j));
            r.max_asymmetry = std::max(r.max_asymmetry, std::abs(m.at(i, j) - m.at(j, i)));
        }
        r.max_row_dev = std::max(r.max_row_dev, std::abs(row - 1.0));
        r.max_col_dev = std::max(r.max_col_dev, std::abs(col - 1.0));
    }

    // BFS over off-diagonal positive entries.
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        for (int j = 0; j < n; ++j) {
            if (j != i && m.at(i, j) > 0.0 && !seen[j]) {
                seen[j] = 1;
                ++reached;
                stack.push_back(j);
            }
        }
    }
    r.connected = (n == 1) || (reached == n);
    return r;
}

MixingMatrix schedule_matrix(const TopologySchedule& s, int t) {
    if (t < 0) throw DimensionError("schedule_matrix: round must be >= 0, got " + std::to_string(t));
    if (s.period < 1) throw DimensionError("schedule_matrix: period must be >= 1");
    std::uint64_t block =
        (s.mode == ScheduleMode::time_varying) ? static_cast<std::uint64_t>(t / s.period) : 0;
    std::uint64_t seed = derive_seed(s.seed, Stream::matrix, block);
    switch (s.kind) {
        case MatrixKind::uniform: return build_uniform(s.n);
        case MatrixKind::dense_random: return build_random_doubly_stochastic(s.n, seed);
        case MatrixKind::sparse_random: return build_sparse_doubly_stochastic(s.n, s.psi, seed);
    }
    throw ConfigError("schedule_matrix: unknown matrix kind");
}

}  // namespace dacfl
