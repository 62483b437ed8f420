#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dacfl/rng.hpp"

namespace dacfl {

// Flat feature matrix (m x d, row-major) with integer labels in [0, C).
struct Dataset {
    int num_classes = 0;
    int dim = 0;
    std::vector<double> features;  // m * dim
    std::vector<int> labels;       // m

    int size() const { return static_cast<int>(labels.size()); }
    const double* row(int i) const { return features.data() + static_cast<std::size_t>(i) * dim; }
};

// Big-endian IDX pair (images magic 0x00000803, labels magic 0x00000801).
// Pixels are scaled to [0,1]; standardization is a separate, split-aware step.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Serializes to the same IDX layout; features must be in [0,1] and are
// quantized back to bytes. rows*cols must equal dim.
void write_idx(const Dataset& ds, int rows, int cols, const std::string& images_path,
               const std::string& labels_path);

// Zero-mean unit-variance transform with statistics taken from one split.
class Standardizer {
public:
    static Standardizer fit(const Dataset& train);
    void apply(Dataset& ds) const;

private:
    std::vector<double> mean_, scale_;
};

// Isotropic unit-variance Gaussian blobs around per-class centers drawn as
// random unit directions scaled by `spread`. Deterministic given seed.
Dataset gen_synthetic(int classes, int dim, int per_class, double spread, std::uint64_t seed);

// Train/test pair sharing one set of centers: noise comes from separate
// streams so the splits are disjoint but identically distributed.
struct SyntheticSplit {
    Dataset train;
    Dataset test;
};
SyntheticSplit gen_synthetic_split(int classes, int dim, int per_class, double spread,
                                   std::uint64_t seed);

enum class PartitionMode { iid, noniid };

// Per-node sample index lists; pairwise disjoint, equal length (surplus
// samples dropped).
struct Partition {
    PartitionMode mode = PartitionMode::iid;
    int shards_per_node = 2;
    std::vector<std::vector<int>> node_indices;
};

Partition partition_iid(const Dataset& ds, int nodes, std::uint64_t seed);

// Stable-sort by label, cut into nodes*shards_per_node equal shards, deal
// shards to nodes by a seeded permutation.
Partition partition_noniid(const Dataset& ds, int nodes, int shards_per_node,
                           std::uint64_t seed);

// B indices drawn uniformly without replacement from node i's list.
std::vector<int> sample_batch(const Partition& part, int node, int batch_size, Rng& rng);

// Shuffles node i's list and cuts it into floor(len/B) batches of size B:
// one epoch, each sample at most once.
std::vector<std::vector<int>> epoch_batches(const Partition& part, int node, int batch_size,
                                            Rng& rng);

}  // namespace dacfl
