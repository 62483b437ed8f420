#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "dacfl/data.hpp"
#include "dacfl/matrix.hpp"

namespace dacfl {

enum class Algorithm { dacfl, cdsgd, dpsgd, fedavg };

std::string to_string(Algorithm a);

enum class StepsMode { single_batch, full_epoch };

enum class DataSource { synthetic, idx };

// Everything a training run needs. Defaults mirror the experiment table;
// synthetic-data defaults are the desk-scale blob set.
struct ExperimentConfig {
    Algorithm algorithm = Algorithm::dacfl;
    int nodes = 10;
    int rounds = 100;
    int batch_size = 20;
    int local_epochs = 1;
    StepsMode steps_mode = StepsMode::single_batch;
    double lr = 0.001;
    double lr_decay = 0.995;
    MatrixKind topology = MatrixKind::dense_random;
    double density = 1.0;
    bool time_varying = false;
    int tv_period = 10;
    PartitionMode partition = PartitionMode::iid;
    int shards_per_node = 2;
    DataSource data = DataSource::synthetic;
    std::string images;
    std::string labels;
    int classes = 10;
    int dim = 16;
    int per_class = 200;
    double spread = 6.0;
    std::uint64_t seed = 1;
    std::string out = "out";

    void validate() const;  // throws ConfigError on out-of-range values
};

// Flat key=value file ('#' comments, blank lines ignored). Unknown keys are
// rejected by name. Returns defaults overlaid with the file's settings.
ExperimentConfig parse_config_file(const std::string& path);

// Applies key=value overrides (same key set as the file) on top of cfg.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Canonical key=value rendering, one key per line, stable order.
std::string resolved_config_text(const ExperimentConfig& cfg);

}  // namespace dacfl
