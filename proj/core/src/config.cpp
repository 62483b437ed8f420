#include "dacfl/config.hpp"

#include <fstream>
#include <sstream>

#include "dacfl/error.hpp"
#include "dacfl/metrics.hpp"

namespace dacfl {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::dacfl: return "dacfl";
        case Algorithm::cdsgd: return "cdsgd";
        case Algorithm::dpsgd: return "dpsgd";
        case Algorithm::fedavg: return "fedavg";
    }
    return "?";
}

namespace {

Algorithm parse_algorithm(const std::string& v) {
    if (v == "dacfl") return Algorithm::dacfl;
    if (v == "cdsgd") return Algorithm::cdsgd;
    if (v == "dpsgd") return Algorithm::dpsgd;
    if (v == "fedavg") return Algorithm::fedavg;
    throw ConfigError("algorithm must be one of dacfl|cdsgd|dpsgd|fedavg, got '" + v + "'");
}

MatrixKind parse_topology(const std::string& v) {
    if (v == "uniform") return MatrixKind::uniform;
    if (v == "dense") return MatrixKind::dense_random;
    if (v == "sparse") return MatrixKind::sparse_random;
    throw ConfigError("topology must be one of uniform|dense|sparse, got '" + v + "'");
}

std::string topology_name(MatrixKind k) {
    switch (k) {
        case MatrixKind::uniform: return "uniform";
        case MatrixKind::dense_random: return "dense";
        case MatrixKind::sparse_random: return "sparse";
    }
    return "?";
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' needs an integer, got '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(x);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' needs a nonnegative integer, got '" + v + "'");
    }
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' needs a number, got '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key '" + key + "' needs true|false, got '" + v + "'");
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "algorithm") cfg.algorithm = parse_algorithm(value);
    else if (key == "nodes") cfg.nodes = parse_int(key, value);
    else if (key == "rounds") cfg.rounds = parse_int(key, value);
    else if (key == "batch_size") cfg.batch_size = parse_int(key, value);
    else if (key == "local_epochs") cfg.local_epochs = parse_int(key, value);
    else if (key == "steps_mode") {
        if (value == "single_batch") cfg.steps_mode = StepsMode::single_batch;
        else if (value == "full_epoch") cfg.steps_mode = StepsMode::full_epoch;
        else throw ConfigError("steps_mode must be single_batch|full_epoch, got '" + value + "'");
    }
    else if (key == "lr") cfg.lr = parse_double(key, value);
    else if (key == "lr_decay") cfg.lr_decay = parse_double(key, value);
    else if (key == "topology") cfg.topology = parse_topology(value);
    else if (key == "density") cfg.density = parse_double(key, value);
    else if (key == "time_varying") cfg.time_varying = parse_bool(key, value);
    else if (key == "tv_period") cfg.tv_period = parse_int(key, value);
    else if (key == "partition") {
        if (value == "iid") cfg.partition = PartitionMode::iid;
        else if (value == "noniid") cfg.partition = PartitionMode::noniid;
        else throw ConfigError("partition must be iid|noniid, got '" + value + "'");
    }
    else if (key == "shards_per_node") cfg.shards_per_node = parse_int(key, value);
    else if (key == "data") {
        if (value == "synthetic") cfg.data = DataSource::synthetic;
        else if (value == "idx") cfg.data = DataSource::idx;
        else throw ConfigError("data must be synthetic|idx, got '" + value + "'");
    }
    else if (key == "images") cfg.images = value;
    else if (key == "labels") cfg.labels = value;
    else if (key == "classes") cfg.classes = parse_int(key, value);
    else if (key == "dim") cfg.dim = parse_int(key, value);
    else if (key == "per_class") cfg.per_class = parse_int(key, value);
    else if (key == "spread") cfg.spread = parse_double(key, value);
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "out") cfg.out = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) +
                              " is not key=value: '" + t + "'");
        }
        apply_override(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

void ExperimentConfig::validate() const {
    if (nodes < 1) throw ConfigError("nodes must be >= 1");
    if (rounds < 1) throw ConfigError("rounds must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (local_epochs < 1) throw ConfigError("local_epochs must be >= 1");
    if (lr <= 0.0) throw ConfigError("lr must be > 0");
    if (lr_decay <= 0.0 || lr_decay > 1.0) throw ConfigError("lr_decay must be in (0, 1]");
    if (density <= 0.0 || density > 1.0) throw ConfigError("density must be in (0, 1]");
    if (tv_period < 1) throw ConfigError("tv_period must be >= 1");
    if (shards_per_node < 1) throw ConfigError("shards_per_node must be >= 1");
    if (data == DataSource::synthetic) {
        if (classes < 2) throw ConfigError("classes must be >= 2");
        if (dim < 1) throw ConfigError("dim must be >= 1");
        if (per_class < 1) throw ConfigError("per_class must be >= 1");
        if (spread < 0.0) throw ConfigError("spread must be >= 0");
    } else {
        if (images.empty() || labels.empty()) {
            throw ConfigError("data=idx needs both images and labels paths");
        }
    }
    if (out.empty()) throw ConfigError("out must not be empty");
}

std::string resolved_config_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "algorithm=" << to_string(cfg.algorithm) << '\n'
       << "nodes=" << cfg.nodes << '\n'
       << "rounds=" << cfg.rounds << '\n'
       << "batch_size=" << cfg.batch_size << '\n'
       << "local_epochs=" << cfg.local_epochs << '\n'
       << "steps_mode="
       << (cfg.steps_mode == StepsMode::single_batch ? "single_batch" : "full_epoch") << '\n'
       << "lr=" << format_g17(cfg.lr) << '\n'
       << "lr_decay=" << format_g17(cfg.lr_decay) << '\n'
       << "topology=" << topology_name(cfg.topology) << '\n'
       << "density=" << format_g17(cfg.density) << '\n'
       << "time_varying=" << (cfg.time_varying ? "true" : "false") << '\n'
       << "tv_period=" << cfg.tv_period << '\n'
       << "partition=" << (cfg.partition == PartitionMode::iid ? "iid" : "noniid") << '\n'
       << "shards_per_node=" << cfg.shards_per_node << '\n'
       << "data=" << (cfg.data == DataSource::synthetic ? "synthetic" : "idx") << '\n'
       << "images=" << cfg.images << '\n'
       << "labels=" << cfg.labels << '\n'
       << "classes=" << cfg.classes << '\n'
       << "dim=" << cfg.dim << '\n'
       << "per_class=" << cfg.per_class << '\n'
       << "spread=" << format_g17(cfg.spread) << '\n'
       << "seed=" << cfg.seed << '\n'
       << "out=" << cfg.out << '\n';
    return os.str();
}

}  // namespace dacfl
