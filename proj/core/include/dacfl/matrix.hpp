#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dacfl {

enum class MatrixKind { uniform, dense_random, sparse_random };

std::string to_string(MatrixKind k);

// Symmetric doubly stochastic connection-weight matrix. Row-major, immutable
// after construction.
struct MixingMatrix {
    int n = 0;
    std::vector<double> entries;  // n*n
    MatrixKind kind = MatrixKind::uniform;

    double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * n + j]; }
};

struct ValidationReport {
    double max_row_dev = 0.0;
    double max_col_dev = 0.0;
    double max_asymmetry = 0.0;
    double min_entry = 0.0;
    bool connected = false;

    bool ok(double tol = 1e-9) const {
        return max_row_dev <= tol && max_col_dev <= tol && max_asymmetry == 0.0 &&
               min_entry >= 0.0 && connected;
    }
};

MixingMatrix build_uniform(int n);

// Heuristic randomized construction: fill budget-constrained random entries,
// complete the last row/column to force unit sums, retry whenever any entry
// goes negative, then symmetrize W = (A + A^T)/2.
MixingMatrix build_random_doubly_stochastic(int n, std::uint64_t seed,
                                            int max_retries = 1000);

// Sparse construction: ring-backbone symmetric pattern grown with random
// symmetric pairs to ceil(psi*n^2) nonzeros, positive random fill, then
// symmetric Sinkhorn scaling until row sums deviate <= tol. The zero pattern
// survives scaling bit-for-bit.
MixingMatrix build_sparse_doubly_stochastic(int n, double psi, std::uint64_t seed,
                                            int max_iters = 10000, double tol = 1e-12);

ValidationReport validate(const MixingMatrix& m);

enum class ScheduleMode { time_invariant, time_varying };

// Generator parameters for per-round matrices. time_varying reconstructs at
// every round index divisible by period; time_invariant always returns the
// block-0 matrix.
struct TopologySchedule {
    ScheduleMode mode = ScheduleMode::time_invariant;
    int period = 10;
    int n = 0;
    MatrixKind kind = MatrixKind::uniform;
    double psi = 1.0;
    std::uint64_t seed = 0;
};

// Pure function of (schedule, t): equal arguments give bit-identical matrices.
MixingMatrix schedule_matrix(const TopologySchedule& s, int t);

}  // namespace dacfl
