#include "dacfl/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "dacfl/error.hpp"

namespace dacfl {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::vector<unsigned char> read_all(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IdxParseError("cannot open " + path, 0);
    f.seekg(0, std::ios::end);
    auto len = f.tellg();
    f.seekg(0, std::ios::beg);
    std::vector<unsigned char> buf(static_cast<std::size_t>(len));
    if (len > 0) f.read(reinterpret_cast<char*>(buf.data()), len);
    if (!f) throw IdxParseError("short read from " + path, 0);
    return buf;
}

std::uint32_t be32(const std::vector<unsigned char>& b, std::size_t off, const std::string& path) {
    if (off + 4 > b.size()) {
        throw IdxParseError("truncated header in " + path + " (need 4 bytes at offset " +
                                std::to_string(off) + ", file has " + std::to_string(b.size()) + ")",
                            off);
    }
    return (static_cast<std::uint32_t>(b[off]) << 24) |
           (static_cast<std::uint32_t>(b[off + 1]) << 16) |
           (static_cast<std::uint32_t>(b[off + 2]) << 8) | static_cast<std::uint32_t>(b[off + 3]);
}

std::string hex32(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", v);
    return buf;
}

void put32(std::ofstream& f, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<char*>(b), 4);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    auto img = read_all(images_path);
    std::uint32_t magic = be32(img, 0, images_path);
    if (magic != kImagesMagic) {
        throw IdxParseError("wrong magic in " + images_path + ": got " + hex32(magic) +
                                ", expected " + hex32(kImagesMagic),
                            0);
    }
    std::uint32_t count = be32(img, 4, images_path);
    std::uint32_t rows = be32(img, 8, images_path);
    std::uint32_t cols = be32(img, 12, images_path);
    std::size_t need = 16 + static_cast<std::size_t>(count) * rows * cols;
    if (img.size() < need) {
        throw IdxParseError("truncated image payload in " + images_path + " (need " +
                                std::to_string(need) + " bytes, file has " +
                                std::to_string(img.size()) + ")",
                            img.size());
    }

    auto lab = read_all(labels_path);
    std::uint32_t lmagic = be32(lab, 0, labels_path);
    if (lmagic != kLabelsMagic) {
        throw IdxParseError("wrong magic in " + labels_path + ": got " + hex32(lmagic) +
                                ", expected " + hex32(kLabelsMagic),
                            0);
    }
    std::uint32_t lcount = be32(lab, 4, labels_path);
    if (lcount != count) {
        throw IdxParseError("count mismatch: " + images_path + " has " + std::to_string(count) +
                                " images, " + labels_path + " has " + std::to_string(lcount) +
                                " labels",
                            4);
    }
    if (lab.size() < 8 + static_cast<std::size_t>(lcount)) {
        throw IdxParseError("truncated label payload in " + labels_path, lab.size());
    }

    Dataset ds;
    ds.dim = static_cast<int>(rows * cols);
    ds.features.resize(static_cast<std::size_t>(count) * ds.dim);
    ds.labels.resize(count);
    int max_label = 0;
    for (std::size_t i = 0; i < count; ++i) {
        ds.labels[i] = lab[8 + i];
        max_label = std::max(max_label, ds.labels[i]);
        for (std::size_t k = 0; k < static_cast<std::size_t>(ds.dim); ++k) {
            ds.features[i * ds.dim + k] =
                static_cast<double>(img[16 + i * ds.dim + k]) / 255.0;
        }
    }
    ds.num_classes = max_label + 1;
    return ds;
}

void write_idx(const Dataset& ds, int rows, int cols, const std::string& images_path,
               const std::string& labels_path) {
    if (rows * cols != ds.dim) {
        throw DimensionError("write_idx: rows*cols = " + std::to_string(rows * cols) +
                             " != dim " + std::to_string(ds.dim));
    }
    std::ofstream fi(images_path, std::ios::binary);
    if (!fi) throw IoError("write_idx: cannot open " + images_path);
    put32(fi, kImagesMagic);
    put32(fi, static_cast<std::uint32_t>(ds.size()));
    put32(fi, static_cast<std::uint32_t>(rows));
    put32(fi, static_cast<std::uint32_t>(cols));
    for (double v : ds.features) {
        double clamped = std::min(1.0, std::max(0.0, v));
        fi.put(static_cast<char>(static_cast<int>(std::lround(clamped * 255.0))));
    }
    if (!fi) throw IoError("write_idx: failed writing " + images_path);

    std::ofstream fl(labels_path, std::ios::binary);
    if (!fl) throw IoError("write_idx: cannot open " + labels_path);
    put32(fl, kLabelsMagic);
    put32(fl, static_cast<std::uint32_t>(ds.size()));
    for (int y : ds.labels) fl.put(static_cast<char>(y));
    if (!fl) throw IoError("write_idx: failed writing " + labels_path);
}

Standardizer Standardizer::fit(const Dataset& train) {
    if (train.size() == 0) throw DimensionError("Standardizer::fit: empty dataset");
    Standardizer s;
    int d = train.dim;
    s.mean_.assign(static_cast<std::size_t>(d), 0.0);
    s.scale_.assign(static_cast<std::size_t>(d), 1.0);
    for (int i = 0; i < train.size(); ++i) {
        const double* x = train.row(i);
        for (int k = 0; k < d; ++k) s.mean_[static_cast<std::size_t>(k)] += x[k];
    }
    for (double& m : s.mean_) m /= train.size();
    std::vector<double> var(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < train.size(); ++i) {
        const double* x = train.row(i);
        for (int k = 0; k < d; ++k) {
            double dlt = x[k] - s.mean_[static_cast<std::size_t>(k)];
            var[static_cast<std::size_t>(k)] += dlt * dlt;
        }
    }
    for (int k = 0; k < d; ++k) {
        double sd = std::sqrt(var[static_cast<std::size_t>(k)] / train.size());
        s.scale_[static_cast<std::size_t>(k)] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

void Standardizer::apply(Dataset& ds) const {
    if (static_cast<std::size_t>(ds.dim) != mean_.size()) {
        throw DimensionError("Standardizer::apply: dim mismatch");
    }
    for (int i = 0; i < ds.size(); ++i) {
        double* x = ds.features.data() + static_cast<std::size_t>(i) * ds.dim;
        for (int k = 0; k < ds.dim; ++k) {
            x[k] = (x[k] - mean_[static_cast<std::size_t>(k)]) / scale_[static_cast<std::size_t>(k)];
        }
    }
}

namespace {

std::vector<double> blob_centers(int classes, int dim, double spread, std::uint64_t seed) {
    Rng rng(derive_seed(seed, Stream::data_centers));
    std::vector<double> centers(static_cast<std::size_t>(classes) * dim);
    for (int c = 0; c < classes; ++c) {
        double norm2 = 0.0;
        double* ctr = centers.data() + static_cast<std::size_t>(c) * dim;
        for (int k = 0; k < dim; ++k) {
            ctr[k] = rng.normal();
            norm2 += ctr[k] * ctr[k];
        }
        double inv = spread / std::sqrt(norm2);
        for (int k = 0; k < dim; ++k) ctr[k] *= inv;
    }
    return centers;
}

Dataset blobs_from_centers(const std::vector<double>& centers, int classes, int dim,
                           int per_class, std::uint64_t noise_seed) {
    Rng rng(noise_seed);
    Dataset ds;
    ds.num_classes = classes;
    ds.dim = dim;
    ds.features.resize(static_cast<std::size_t>(classes) * per_class * dim);
    ds.labels.resize(static_cast<std::size_t>(classes) * per_class);
    std::size_t row = 0;
    for (int c = 0; c < classes; ++c) {
        const double* ctr = centers.data() + static_cast<std::size_t>(c) * dim;
        for (int s = 0; s < per_class; ++s, ++row) {
            double* x = ds.features.data() + row * dim;
            for (int k = 0; k < dim; ++k) x[k] = ctr[k] + rng.normal();
            ds.labels[row] = c;
        }
    }
    return ds;
}

void check_synth_args(int classes, int dim, int per_class) {
    if (classes < 2 || dim < 1 || per_class < 1) {
        throw DimensionError("gen_synthetic: need classes >= 2, dim >= 1, per_class >= 1");
    }
}

}  // namespace

Dataset gen_synthetic(int classes, int dim, int per_class, double spread, std::uint64_t seed) {
    check_synth_args(classes, dim, per_class);
    auto centers = blob_centers(classes, dim, spread, seed);
    return blobs_from_centers(centers, classes, dim, per_class,
                              derive_seed(seed, Stream::data_train));
}

SyntheticSplit gen_synthetic_split(int classes, int dim, int per_class, double spread,
                                   std::uint64_t seed) {
    check_synth_args(classes, dim, per_class);
    auto centers = blob_centers(classes, dim, spread, seed);
    SyntheticSplit split;
    split.train = blobs_from_centers(centers, classes, dim, per_class,
                                     derive_seed(seed, Stream::data_train));
    split.test = blobs_from_centers(centers, classes, dim, per_class,
                                    derive_seed(seed, Stream::data_test));
    return split;
}

Partition partition_iid(const Dataset& ds, int nodes, std::uint64_t seed) {
    if (nodes < 1) throw DimensionError("partition_iid: nodes must be >= 1");
    if (ds.size() < nodes) {
        throw DimensionError("partition_iid: " + std::to_string(ds.size()) + " samples for " +
                             std::to_string(nodes) + " nodes");
    }
    std::vector<int> idx(static_cast<std::size_t>(ds.size()));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(derive_seed(seed, Stream::partition));
    rng.shuffle(idx);

    Partition p;
    p.mode = PartitionMode::iid;
    int per = ds.size() / nodes;
    p.node_indices.resize(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) {
        p.node_indices[static_cast<std::size_t>(i)].assign(
            idx.begin() + static_cast<std::ptrdiff_t>(i) * per,
            idx.begin() + static_cast<std::ptrdiff_t>(i + 1) * per);
    }
    return p;
}

Partition partition_noniid(const Dataset& ds, int nodes, int shards_per_node,
                           std::uint64_t seed) {
    if (nodes < 1 || shards_per_node < 1) {
        throw DimensionError("partition_noniid: nodes and shards_per_node must be >= 1");
    }
    int num_shards = nodes * shards_per_node;
    if (ds.size() < num_shards) {
        throw DimensionError("partition_noniid: " + std::to_string(ds.size()) +
                             " samples cannot fill " + std::to_string(num_shards) + " shards");
    }
    std::vector<int> idx(static_cast<std::size_t>(ds.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return ds.labels[static_cast<std::size_t>(a)] < ds.labels[static_cast<std::size_t>(b)];
    });

    int shard_len = ds.size() / num_shards;
    std::vector<int> shard_order(static_cast<std::size_t>(num_shards));
    std::iota(shard_order.begin(), shard_order.end(), 0);
    Rng rng(derive_seed(seed, Stream::partition));
    rng.shuffle(shard_order);

    Partition p;
    p.mode = PartitionMode::noniid;
    p.shards_per_node = shards_per_node;
    p.node_indices.resize(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) {
        auto& list = p.node_indices[static_cast<std::size_t>(i)];
        list.reserve(static_cast<std::size_t>(shards_per_node) * shard_len);
        for (int s = 0; s < shards_per_node; ++s) {
            int shard = shard_order[static_cast<std::size_t>(i * shards_per_node + s)];
            auto begin = idx.begin() + static_cast<std::ptrdiff_t>(shard) * shard_len;
            list.insert(list.end(), begin, begin + shard_len);
        }
    }
    return p;
}

std::vector<int> sample_batch(const Partition& part, int node, int batch_size, Rng& rng) {
    const auto& list = part.node_indices.at(static_cast<std::size_t>(node));
    if (batch_size < 1 || static_cast<std::size_t>(batch_size) > list.size()) {
        throw DimensionError("sample_batch: batch size " + std::to_string(batch_size) +
                             " vs shard size " + std::to_string(list.size()));
    }
    // Partial Fisher-Yates over a scratch copy: first B slots are the sample.
    std::vector<int> scratch = list;
    std::vector<int> out(static_cast<std::size_t>(batch_size));
    for (int k = 0; k < batch_size; ++k) {
        std::size_t j = k + static_cast<std::size_t>(rng.uniform_index(scratch.size() - k));
        std::swap(scratch[static_cast<std::size_t>(k)], scratch[j]);
        out[static_cast<std::size_t>(k)] = scratch[static_cast<std::size_t>(k)];
    }
    return out;
}

std::vector<std::vector<int>> epoch_batches(const Partition& part, int node, int batch_size,
                                            Rng& rng) {
    const auto& list = part.node_indices.at(static_cast<std::size_t>(node));
    if (batch_size < 1 || static_cast<std::size_t>(batch_size) > list.size()) {
        throw DimensionError("epoch_batches: batch size " + std::to_string(batch_size) +
                             " vs shard size " + std::to_string(list.size()));
    }
    std::vector<int> scratch = list;
    rng.shuffle(scratch);
    std::size_t count = scratch.size() / static_cast<std::size_t>(batch_size);
    std::vector<std::vector<int>> batches(count);
    for (std::size_t b = 0; b < count; ++b) {
        batches[b].assign(scratch.begin() + static_cast<std::ptrdiff_t>(b * batch_size),
                          scratch.begin() + static_cast<std::ptrdiff_t>((b + 1) * batch_size));
    }
    return batches;
}

}  // namespace dacfl
