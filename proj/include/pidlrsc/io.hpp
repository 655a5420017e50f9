#pragma once

// File formats:
//   FeatureFile  "PIDF" | u32 version=1 | u8 dtype=1 | u64 rows | u64 cols | f64 payload (row-major)
//   Matrix block u64 rows | u64 cols | f64 payload
//   Checkpoint   "PIDM" | u32 version=1 | u64 n_in, n_feat, r, C | projector.weight, projector.bias,
//                metric.W, head.weight, head.bias as Matrix blocks (biases as 1×k)
// All integers and floats little-endian.

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pidlrsc/errors.hpp"
#include "pidlrsc/eval.hpp"
#include "pidlrsc/model.hpp"
#include "pidlrsc/synthbag.hpp"

namespace pidlrsc::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline constexpr std::uint32_t kFeatureVersion = 1;
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::uint8_t kDtypeF64 = 1;

// ---- byte buffers ----------------------------------------------------------

class Writer {
public:
    void bytes(std::string_view s) { buf_.append(s); }
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    const std::string& data() const noexcept { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    Reader(std::string data, std::string origin) : data_(std::move(data)), origin_(std::move(origin)) {}

    std::string bytes(std::size_t n) {
        need(n);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    const std::string& origin() const noexcept { return origin_; }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw IoError(origin_ + ": truncated file");
    }

    std::string data_;
    std::string origin_;
    std::size_t pos_ = 0;
};

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return ss.str();
}

inline void write_file(const fs::path& path, std::string_view data) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

// ---- matrices --------------------------------------------------------------

inline void put_matrix(Writer& w, const Matrix& m) {
    w.u64(m.rows());
    w.u64(m.cols());
    for (double x : m.values()) w.f64(x);
}

inline Matrix get_matrix(Reader& r) {
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (cols != 0 && rows > r.remaining() / 8 / cols) throw IoError(r.origin() + ": matrix payload truncated");
    std::vector<double> values(rows * cols);
    for (double& x : values) x = r.f64();
    return Matrix(rows, cols, std::move(values));
}

inline std::string encode_features(const Matrix& m) {
    Writer w;
    w.bytes("PIDF");
    w.u32(kFeatureVersion);
    w.u8(kDtypeF64);
    w.u64(m.rows());
    w.u64(m.cols());
    for (double x : m.values()) w.f64(x);
    return w.data();
}

inline Matrix decode_features(std::string data, const std::string& origin = "<memory>") {
    Reader r(std::move(data), origin);
    if (r.bytes(4) != "PIDF") throw IoError(origin + ": bad magic");
    if (const auto v = r.u32(); v != kFeatureVersion) throw IoError(origin + ": unsupported version " + std::to_string(v));
    if (const auto d = r.u8(); d != kDtypeF64) throw IoError(origin + ": unsupported dtype " + std::to_string(d));
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (cols != 0 && rows > r.remaining() / 8 / cols) throw IoError(origin + ": payload shorter than header");
    if (r.remaining() != rows * cols * 8) throw IoError(origin + ": payload length does not match header");
    std::vector<double> values(rows * cols);
    for (double& x : values) x = r.f64();
    return Matrix(rows, cols, std::move(values));
}

inline void write_features(const fs::path& path, const Matrix& m) { write_file(path, encode_features(m)); }
inline Matrix read_features(const fs::path& path) { return decode_features(read_file(path), path.string()); }

// ---- checkpoints -----------------------------------------------------------

inline std::string encode_checkpoint(const ModelParams& p) {
    Writer w;
    w.bytes("PIDM");
    w.u32(kCheckpointVersion);
    w.u64(p.n_in());
    w.u64(p.n_feat());
    w.u64(p.rank());
    w.u64(p.classes());
    put_matrix(w, p.projector_weight);
    put_matrix(w, Matrix(1, p.projector_bias.size(), p.projector_bias));
    put_matrix(w, p.metric.weights());
    put_matrix(w, p.head_weight);
    put_matrix(w, Matrix(1, p.head_bias.size(), p.head_bias));
    return w.data();
}

inline ModelParams decode_checkpoint(std::string data, const std::string& origin = "<memory>") {
    Reader r(std::move(data), origin);
    if (r.bytes(4) != "PIDM") throw IoError(origin + ": bad magic");
    if (const auto v = r.u32(); v != kCheckpointVersion) throw IoError(origin + ": unsupported version " + std::to_string(v));
    const std::uint64_t n_in = r.u64(), n_feat = r.u64(), rank = r.u64(), classes = r.u64();
    auto expect = [&](const Matrix& m, std::uint64_t rows, std::uint64_t cols, const char* name) {
        if (m.rows() != rows || m.cols() != cols) {
            throw IoError(origin + ": " + name + " has shape " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", header says " + std::to_string(rows) + "x" +
                          std::to_string(cols));
        }
    };
    ModelParams p;
    p.projector_weight = get_matrix(r);
    expect(p.projector_weight, n_feat, n_in, "projector.weight");
    const Matrix pb = get_matrix(r);
    expect(pb, 1, n_feat, "projector.bias");
    Matrix W = get_matrix(r);
    expect(W, rank, n_feat, "metric.W");
    p.head_weight = get_matrix(r);
    expect(p.head_weight, classes, n_feat, "head.weight");
    const Matrix hb = get_matrix(r);
    expect(hb, 1, classes, "head.bias");
    if (r.remaining() != 0) throw IoError(origin + ": trailing bytes after checkpoint");
    p.projector_bias.assign(pb.values().begin(), pb.values().end());
    p.metric = MetricMatrix(std::move(W));
    p.head_bias.assign(hb.values().begin(), hb.values().end());
    return p;
}

inline void write_checkpoint(const fs::path& path, const ModelParams& p) { write_file(path, encode_checkpoint(p)); }
inline ModelParams read_checkpoint(const fs::path& path) { return decode_checkpoint(read_file(path), path.string()); }

// ---- datasets --------------------------------------------------------------

struct ManifestEntry {
    std::uint64_t bag_id = 0;
    std::size_t label = 0;
    std::string path;  // relative to the dataset directory
    std::size_t m = 0;
};

inline std::string bag_file_name(std::uint64_t id) {
    std::ostringstream ss;
    ss << "bags/bag_" << std::setw(6) << std::setfill('0') << id;
    return ss.str();
}

inline fs::path roles_path_for(const fs::path& dir, const std::string& feature_path) {
    fs::path p = dir / feature_path;
    p.replace_extension(".roles.json");
    return p;
}

inline std::string encode_roles(std::span<const Role> roles) {
    json arr = json::array();
    for (Role r : roles) arr.push_back(std::string(to_string(r)));
    return arr.dump() + "\n";
}

inline std::vector<Role> decode_roles(const std::string& text, const std::string& origin) {
    json arr;
    try {
        arr = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(origin + ": " + e.what());
    }
    if (!arr.is_array()) throw IoError(origin + ": roles file must hold a JSON array");
    std::vector<Role> out;
    for (const auto& v : arr) {
        const std::string s = v.is_string() ? v.get<std::string>() : "";
        if (s == "tumor") out.push_back(Role::tumor);
        else if (s == "nontumor") out.push_back(Role::nontumor);
        else if (s == "background") out.push_back(Role::background);
        else throw IoError(origin + ": unknown role " + v.dump());
    }
    return out;
}

/// Writes bags/*.pidf, bags/*.roles.json, prototypes.pidf and manifest.jsonl under `dir`.
inline void write_dataset(const fs::path& dir, std::span<const Bag> bags, const PrototypeSet& prototypes) {
    std::string manifest;
    for (const Bag& b : bags) {
        const std::string rel = bag_file_name(b.bag_id) + ".pidf";
        write_features(dir / rel, b.features);
        if (!b.roles.empty()) write_file(roles_path_for(dir, rel), encode_roles(b.roles));
        json line = {{"bag_id", b.bag_id}, {"label", b.label}, {"path", rel}, {"m", b.size()}};
        manifest += line.dump() + "\n";
    }
    write_features(dir / "prototypes.pidf", prototypes.features);
    write_file(dir / "manifest.jsonl", manifest);
}

inline std::vector<ManifestEntry> read_manifest(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::vector<ManifestEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        try {
            const json j = json::parse(line);
            ManifestEntry e;
            e.bag_id = j.at("bag_id").get<std::uint64_t>();
            e.label = j.at("label").get<std::size_t>();
            e.path = j.at("path").get<std::string>();
            e.m = j.at("m").get<std::size_t>();
            out.push_back(std::move(e));
        } catch (const json::exception& e) {
            throw IoError(where + ": " + e.what());
        }
    }
    return out;
}

/// Bags listed in `dir`/manifest.jsonl. Roles files are optional.
inline std::vector<Bag> read_dataset(const fs::path& dir) {
    std::vector<Bag> bags;
    for (const ManifestEntry& e : read_manifest(dir / "manifest.jsonl")) {
        Bag b;
        b.bag_id = e.bag_id;
        b.label = e.label;
        b.features = read_features(dir / e.path);
        if (b.features.rows() != e.m) {
            throw IoError(e.path + ": manifest says m = " + std::to_string(e.m) + ", file has " +
                          std::to_string(b.features.rows()) + " rows");
        }
        const fs::path rp = roles_path_for(dir, e.path);
        if (fs::exists(rp)) {
            b.roles = decode_roles(read_file(rp), rp.string());
            if (b.roles.size() != b.size()) throw IoError(rp.string() + ": role count does not match the bag");
        }
        bags.push_back(std::move(b));
    }
    return bags;
}

inline PrototypeSet read_prototypes(const fs::path& path) {
    return PrototypeSet{read_features(path), PrototypeSet::Source::file};
}

// ---- reports ---------------------------------------------------------------

inline json history_line(const EpochMetrics& m) {
    return {{"epoch", m.epoch}, {"loss", m.loss}, {"train_acc", m.train_acc}};
}

inline json to_json(const EvalReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j = {{"variant", r.variant}, {"metric", r.metric},      {"seed", r.seed},
              {"acc", r.acc},         {"auc", opt(r.auc)},       {"eta2", opt(r.eta2)},
              {"test_bags", r.test_bags}, {"seconds", r.seconds}, {"error", r.error ? json(*r.error) : json(nullptr)}};
    if (r.disentangle) {
        j["disentangle"] = {{"anchored", r.disentangle->anchored},
                            {"best_permutation", r.disentangle->best_permutation},
                            {"tumor_anchored", r.disentangle->tumor_anchored},
                            {"instances", r.disentangle->instances},
                            {"tumor_instances", r.disentangle->tumor_instances}};
    } else {
        j["disentangle"] = nullptr;
    }
    return j;
}

/// bag_id,label,predicted,projection
inline std::string projections_csv(const EvalReport& r) {
    std::ostringstream ss;
    ss << "bag_id,label,predicted,projection\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.bag_ids.size(); ++i) {
        ss << r.bag_ids[i] << ',' << r.labels[i] << ',' << r.predicted[i] << ',';
        if (i < r.projection.size()) ss << r.projection[i];
        ss << '\n';
    }
    return ss.str();
}

// ---- configuration ---------------------------------------------------------

struct Paths {
    std::string dataset;     // empty: output
    std::string prototypes;  // empty: <dataset>/prototypes.pidf
    std::string checkpoint;  // empty: <output>/checkpoint.pidm
    std::string output = "out";

    fs::path dataset_dir() const { return dataset.empty() ? fs::path(output) : fs::path(dataset); }
    fs::path prototype_file() const { return prototypes.empty() ? dataset_dir() / "prototypes.pidf" : fs::path(prototypes); }
    fs::path checkpoint_file() const { return checkpoint.empty() ? fs::path(output) / "checkpoint.pidm" : fs::path(checkpoint); }
};

struct GradcheckConfig {
    std::size_t coordinates = 60;
    std::size_t m = 24;
    double h = 1e-6;
    double tolerance = 1e-5;
};

struct RunConfig {
    SynthConfig synth;
    std::size_t count = 300;  // bags written by gen
    TrainConfig train;
    Paths paths;
    double train_fraction = 0.7;
    bool split = true;  // false: train and evaluate on every bag
    std::vector<std::uint64_t> ablation_seeds{0, 1, 2, 3, 4};
    GradcheckConfig gradcheck;

    void set_seed(std::uint64_t seed) {
        synth.seed = seed;
        train.seed = seed;
    }
};

namespace detail {

class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    void reject_unknown(std::initializer_list<std::string_view> known) const {
        for (const auto& [k, v] : j_.items()) {
            if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError(key(k), "unknown key");
        }
    }

    template <typename T>
    void get(const std::string& k, T& out) const {
        if (!j_.contains(k)) return;
        const json& v = j_.at(k);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ConfigError(key(k), "expected a boolean");
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) throw ConfigError(key(k), "expected an integer");
                if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
                    throw ConfigError(key(k), "must be non-negative");
                }
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number()) throw ConfigError(key(k), "expected a number");
            } else {
                if (!v.is_string()) throw ConfigError(key(k), "expected a string");
            }
            out = v.get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(key(k), e.what());
        }
    }

    std::optional<Section> child(const std::string& k) const {
        if (!j_.contains(k)) return std::nullopt;
        return Section(j_.at(k), key(k));
    }

    const json& raw() const noexcept { return j_; }

private:
    const json& j_;
    std::string path_;
};

template <typename E>
E parse_enum(const Section& s, const std::string& k, E current,
             std::initializer_list<std::pair<std::string_view, E>> options) {
    std::string text;
    s.get(k, text);
    if (text.empty()) return current;
    for (const auto& [name, value] : options)
        if (name == text) return value;
    throw ConfigError(s.key(k), "unknown value \"" + text + "\"");
}

inline void check(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
}

}  // namespace detail

/// Parses a RunConfig document. Missing keys keep defaults; unknown keys and
/// out-of-range values raise ConfigError naming the key path.
inline RunConfig parse_config(const json& doc) {
    using detail::check;
    RunConfig cfg;
    const detail::Section root(doc, "");
    root.reject_unknown({"seed", "synth", "train", "paths", "split", "ablation", "gradcheck"});

    if (root.raw().contains("seed")) {
        std::uint64_t seed = 0;
        root.get("seed", seed);
        cfg.set_seed(seed);
    }

    if (auto s = root.child("synth")) {
        s->reject_unknown({"classes", "n_in", "m_min", "m_max", "rho", "delta", "spread", "separation", "prototypes",
                           "seed", "count"});
        SynthConfig& c = cfg.synth;
        s->get("classes", c.classes);
        s->get("n_in", c.n_in);
        s->get("m_min", c.m_min);
        s->get("m_max", c.m_max);
        s->get("rho", c.rho);
        s->get("delta", c.delta);
        s->get("spread", c.spread);
        s->get("separation", c.separation);
        s->get("prototypes", c.prototypes);
        s->get("seed", c.seed);
        s->get("count", cfg.count);
        check(c.classes >= 2, s->key("classes"), "must be >= 2");
        check(c.n_in >= 4, s->key("n_in"), "must be >= 4");
        check(c.m_min >= 3, s->key("m_min"), "must be >= 3");
        check(c.m_max >= c.m_min, s->key("m_max"), "must be >= m_min");
        check(c.rho > 0.0 && c.rho < 1.0, s->key("rho"), "must lie in (0, 1)");
        check(c.delta >= 0.0, s->key("delta"), "must be >= 0");
        check(c.spread > 0.0, s->key("spread"), "must be > 0");
        check(std::isfinite(c.separation), s->key("separation"), "must be finite");
        check(c.prototypes >= 1, s->key("prototypes"), "must be >= 1");
        check(cfg.count >= 1, s->key("count"), "must be >= 1");
    }

    if (auto s = root.child("train")) {
        s->reject_unknown({"gamma1", "gamma2", "gamma3", "learning_rate", "epochs", "seed", "k", "rank", "n_feat",
                           "frequencies", "sigma_t", "epsilon", "optimizer", "metric", "variant", "normalization",
                           "c_max_cap", "mmd_bandwidth"});
        TrainConfig& t = cfg.train;
        s->get("gamma1", t.gamma1);
        s->get("gamma2", t.gamma2);
        s->get("gamma3", t.gamma3);
        s->get("learning_rate", t.learning_rate);
        s->get("epochs", t.epochs);
        s->get("seed", t.seed);
        s->get("k", t.k);
        s->get("rank", t.rank);
        s->get("n_feat", t.n_feat);
        s->get("frequencies", t.frequencies);
        s->get("sigma_t", t.sigma_t);
        s->get("epsilon", t.epsilon);
        s->get("c_max_cap", t.c_max_cap);
        s->get("mmd_bandwidth", t.mmd_bandwidth);
        t.optimizer = detail::parse_enum(*s, "optimizer", t.optimizer,
                                         {{"sgd", OptimizerKind::sgd}, {"adam", OptimizerKind::adam}});
        t.metric = detail::parse_enum(*s, "metric", t.metric, {{"cfd", DistanceMetric::cfd}, {"mmd", DistanceMetric::mmd}});
        t.variant = detail::parse_enum(*s, "variant", t.variant,
                                       {{"no_cluster", Variant::no_cluster},
                                        {"naive_cluster", Variant::naive_cluster},
                                        {"lrsc_only", Variant::lrsc_only},
                                        {"full", Variant::full}});
        t.normalization = detail::parse_enum(*s, "normalization", t.normalization,
                                             {{"max", Normalization::max}, {"sum", Normalization::sum}});
        check(t.gamma1 >= 0.0 && std::isfinite(t.gamma1), s->key("gamma1"), "must be finite and >= 0");
        check(t.gamma2 >= 0.0 && std::isfinite(t.gamma2), s->key("gamma2"), "must be finite and >= 0");
        check(t.gamma3 >= 0.0 && std::isfinite(t.gamma3), s->key("gamma3"), "must be finite and >= 0");
        check(t.learning_rate >= 0.0 && std::isfinite(t.learning_rate), s->key("learning_rate"),
              "must be finite and >= 0");
        check(t.epochs >= 1, s->key("epochs"), "must be >= 1");
        check(t.k >= 1, s->key("k"), "must be >= 1");
        check(t.variant != Variant::full || t.k == 3, s->key("k"), "the full model needs k = 3");
        check(t.frequencies >= 1, s->key("frequencies"), "must be >= 1");
        check(t.sigma_t > 0.0 && std::isfinite(t.sigma_t), s->key("sigma_t"), "must be finite and > 0");
        check(t.epsilon > 0.0, s->key("epsilon"), "must be > 0");
        check(t.c_max_cap > 0.0, s->key("c_max_cap"), "must be > 0");
        check(t.mmd_bandwidth >= 0.0, s->key("mmd_bandwidth"), "must be >= 0");
    }

    if (auto s = root.child("paths")) {
        s->reject_unknown({"dataset", "prototypes", "checkpoint", "output"});
        s->get("dataset", cfg.paths.dataset);
        s->get("prototypes", cfg.paths.prototypes);
        s->get("checkpoint", cfg.paths.checkpoint);
        s->get("output", cfg.paths.output);
        check(!cfg.paths.output.empty(), s->key("output"), "must not be empty");
    }

    if (auto s = root.child("split")) {
        s->reject_unknown({"enabled", "train_fraction"});
        s->get("enabled", cfg.split);
        s->get("train_fraction", cfg.train_fraction);
        check(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0, s->key("train_fraction"), "must lie in (0, 1)");
    }

    if (auto s = root.child("ablation")) {
        s->reject_unknown({"seeds"});
        if (s->raw().contains("seeds")) {
            const json& seeds = s->raw().at("seeds");
            check(seeds.is_array() && !seeds.empty(), s->key("seeds"), "expected a non-empty array");
            cfg.ablation_seeds.clear();
            for (const json& v : seeds) {
                check(v.is_number_unsigned(), s->key("seeds"), "entries must be non-negative integers");
                cfg.ablation_seeds.push_back(v.get<std::uint64_t>());
            }
        }
    }

    if (auto s = root.child("gradcheck")) {
        s->reject_unknown({"coordinates", "m", "h", "tolerance"});
        s->get("coordinates", cfg.gradcheck.coordinates);
        s->get("m", cfg.gradcheck.m);
        s->get("h", cfg.gradcheck.h);
        s->get("tolerance", cfg.gradcheck.tolerance);
        check(cfg.gradcheck.coordinates >= 1, s->key("coordinates"), "must be >= 1");
        check(cfg.gradcheck.m >= 3, s->key("m"), "must be >= 3");
        check(cfg.gradcheck.h > 0.0, s->key("h"), "must be > 0");
        check(cfg.gradcheck.tolerance > 0.0, s->key("tolerance"), "must be > 0");
    }
    return cfg;
}

inline RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>") {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("<root>", origin + ": " + e.what());
    }
    return parse_config(doc);
}

inline RunConfig load_config(const fs::path& path) { return parse_config_text(read_file(path), path.string()); }

}  // namespace pidlrsc::io
