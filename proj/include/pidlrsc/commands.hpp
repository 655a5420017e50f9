#pragma once

// Command bodies behind the CLI. Each returns a process exit code:
// 0 ok, 1 contract failure, 2 divergence, 3 IO / configuration error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "pidlrsc/eval.hpp"
#include "pidlrsc/io.hpp"
#include "pidlrsc/log.hpp"
#include "pidlrsc/trainer.hpp"

namespace pidlrsc::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

enum ExitCode : int { kOk = 0, kContract = 1, kDivergence = 2, kIo = 3 };

/// Runs `body`, mapping exceptions to exit codes and reporting them on stderr.
template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDivergence;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kIo;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kIo;
    } catch (const CheckpointMismatchError& e) {
        std::cerr << "checkpoint mismatch: " << e.what() << "\n";
        return kIo;
    } catch (const NotFoundError& e) {
        std::cerr << "not found: " << e.what() << "\n";
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kContract;
    }
}

struct Inputs {
    std::vector<Bag> bags;
    PrototypeSet prototypes;
};

inline Inputs load_inputs(const io::RunConfig& cfg) {
    Inputs in{io::read_dataset(cfg.paths.dataset_dir()), io::read_prototypes(cfg.paths.prototype_file())};
    if (in.bags.empty()) throw IoError(cfg.paths.dataset_dir().string() + ": manifest lists no bags");
    const std::size_t n_in = in.bags.front().features.cols();
    for (const Bag& b : in.bags) {
        if (b.features.cols() != n_in) throw IoError("bag " + std::to_string(b.bag_id) + ": feature dimension differs");
    }
    if (in.prototypes.features.cols() != n_in) throw IoError("prototype dimension does not match the bags");
    return in;
}

enum class Subset { train, test, all };

/// Bags of the configured split; `all` when splitting is disabled.
inline std::vector<Bag> select_subset(const std::vector<Bag>& bags, const io::RunConfig& cfg, Subset subset) {
    if (!cfg.split || subset == Subset::all) return bags;
    const auto [tr, te] = split_indices(bags.size(), cfg.train.seed, cfg.train_fraction);
    std::vector<Bag> out;
    for (std::size_t i : subset == Subset::train ? tr : te) out.push_back(bags[i]);
    return out;
}

inline std::size_t class_count(const io::RunConfig& cfg, const std::vector<Bag>& bags) {
    std::size_t classes = cfg.synth.classes;
    for (const Bag& b : bags) classes = std::max(classes, b.label + 1);
    return classes;
}

inline fs::path output_dir(const io::RunConfig& cfg) { return fs::path(cfg.paths.output); }

inline ModelParams load_checkpoint_for(const fs::path& path, const Inputs& in) {
    ModelParams p = io::read_checkpoint(path);
    const std::size_t n_in = in.bags.front().features.cols();
    if (p.n_in() != n_in) {
        throw CheckpointMismatchError(path.string() + ": checkpoint n_in = " + std::to_string(p.n_in()) +
                                      ", dataset n_in = " + std::to_string(n_in));
    }
    return p;
}

// ---- gen -------------------------------------------------------------------

inline int cmd_gen(const io::RunConfig& cfg) {
    return guarded([&] {
        try {
            cfg.synth.validate();
        } catch (const Error& e) {
            throw ConfigError("synth", e.what());
        }
        const std::vector<Bag> bags = generate_dataset(cfg.synth, cfg.count);
        const PrototypeSet protos = sample_prototypes(cfg.synth);
        io::write_dataset(output_dir(cfg), bags, protos);
        log::info("gen: wrote " + std::to_string(bags.size()) + " bags to " + output_dir(cfg).string());
        return int{kOk};
    });
}

// ---- train -----------------------------------------------------------------

inline int cmd_train(const io::RunConfig& cfg) {
    return guarded([&] {
        const Inputs in = load_inputs(cfg);
        const std::vector<Bag> train_bags = select_subset(in.bags, cfg, Subset::train);
        const fs::path out = output_dir(cfg);
        const fs::path ckpt = out / "checkpoint.pidm";
        std::string history;
        auto on_epoch = [&](const EpochMetrics& m, const ModelParams&) {
            history += io::history_line(m).dump() + "\n";
            log::info("epoch " + std::to_string(m.epoch) + " loss " + std::to_string(m.loss) + " train_acc " +
                      std::to_string(m.train_acc));
        };
        try {
            const TrainResult r = train(train_bags, in.prototypes, cfg.train, class_count(cfg, in.bags), on_epoch);
            io::write_checkpoint(ckpt, r.params);
        } catch (const DivergenceError& e) {
            io::write_checkpoint(ckpt, e.last_good());
            io::write_file(out / "history.jsonl", history);
            throw;
        }
        io::write_file(out / "history.jsonl", history);
        log::info("train: checkpoint " + ckpt.string());
        return int{kOk};
    });
}

// ---- eval ------------------------------------------------------------------

inline std::string format_report_table(std::span<const EvalReport> reports) {
    std::ostringstream ss;
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %-4s %6s %7s %7s %7s %7s\n", "variant", "dist", "seed", "acc", "auc",
                  "eta2", "tumor");
    ss << line;
    auto num = [](const std::optional<double>& v) {
        char b[32];
        if (v) std::snprintf(b, sizeof b, "%.4f", *v);
        else std::snprintf(b, sizeof b, "-");
        return std::string(b);
    };
    for (const EvalReport& r : reports) {
        if (r.error) {
            std::snprintf(line, sizeof line, "%-14s %-4s %6llu  failed: %s\n", r.variant.c_str(), r.metric.c_str(),
                          static_cast<unsigned long long>(r.seed), r.error->c_str());
        } else {
            std::optional<double> tumor;
            if (r.disentangle) tumor = r.disentangle->tumor_anchored;
            std::snprintf(line, sizeof line, "%-14s %-4s %6llu %7.4f %7s %7s %7s\n", r.variant.c_str(),
                          r.metric.c_str(), static_cast<unsigned long long>(r.seed), r.acc, num(r.auc).c_str(),
                          num(r.eta2).c_str(), num(tumor).c_str());
        }
        ss << line;
    }
    return ss.str();
}

inline int cmd_eval(const io::RunConfig& cfg, Subset subset = Subset::test) {
    return guarded([&] {
        const Inputs in = load_inputs(cfg);
        const ModelParams params = load_checkpoint_for(cfg.paths.checkpoint_file(), in);
        const std::vector<Bag> bags = select_subset(in.bags, cfg, subset);
        const EvalReport r = evaluate(bags, params, in.prototypes, cfg.train);
        const fs::path out = output_dir(cfg);
        io::write_file(out / "report.json", io::to_json(r).dump(2) + "\n");
        io::write_file(out / "projections.csv", io::projections_csv(r));
        std::cout << format_report_table(std::span<const EvalReport>(&r, 1));
        return int{kOk};
    });
}

// ---- explain ---------------------------------------------------------------

inline json explain_bag(const Bag& bag, const ModelParams& params, const PrototypeSet& prototypes,
                        const TrainConfig& cfg) {
    if (cfg.variant != Variant::full) throw ConfigError("train.variant", "explain needs the full variant");
    const FrequencySample freqs = eval_frequencies(cfg, params.n_feat());
    const ForwardResult f = forward(bag, params, ModelContext{prototypes, freqs, cfg});
    const DisentangledBag& d = f.detail;
    const auto w = d.semantic_weights();
    json instances = json::array();
    for (std::size_t i = 0; i < bag.size(); ++i) {
        instances.push_back({{"index", i},
                             {"cluster", f.partition.assignments[i]},
                             {"semantic", std::string(to_string(d.instance_map[i]))}});
    }
    return {{"bag_id", bag.bag_id},
            {"predicted_class", f.predicted()},
            {"distances",
             {{"TIs", d.distance_of(Semantic::TIs)},
              {"NTIs", d.distance_of(Semantic::NTIs)},
              {"BGIs", d.distance_of(Semantic::BGIs)}}},
            {"weights", {{"TIs", w[0]}, {"NTIs", w[1]}, {"BGIs", w[2]}, {"prototypes", w[3]}}},
            {"instances", instances}};
}

inline int cmd_explain(const io::RunConfig& cfg, std::uint64_t bag_id) {
    return guarded([&] {
        const Inputs in = load_inputs(cfg);
        const ModelParams params = load_checkpoint_for(cfg.paths.checkpoint_file(), in);
        const auto it = std::find_if(in.bags.begin(), in.bags.end(), [&](const Bag& b) { return b.bag_id == bag_id; });
        if (it == in.bags.end()) throw NotFoundError("bag_id " + std::to_string(bag_id) + " is not in the manifest");
        const json j = explain_bag(*it, params, in.prototypes, cfg.train);
        io::write_file(output_dir(cfg) / ("explain_" + std::to_string(bag_id) + ".json"), j.dump(2) + "\n");
        std::cout << j.dump(2) << "\n";
        return int{kOk};
    });
}

// ---- ablate ----------------------------------------------------------------

inline json summary_json(const AblationTable& t) {
    json rows = json::array();
    auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    for (const AblationRow& r : t.rows) {
        std::size_t failed = 0;
        for (const EvalReport& e : r.runs) failed += e.error.has_value();
        rows.push_back({{"variant", r.name},
                        {"median_acc", num(r.median_acc)},
                        {"median_auc", num(r.median_auc)},
                        {"median_eta2", num(r.median_eta2)},
                        {"median_tumor_anchored", num(r.median_tumor)},
                        {"runs", r.runs.size()},
                        {"failed", failed}});
    }
    return rows;
}

inline int cmd_ablate(const io::RunConfig& cfg) {
    return guarded([&] {
        const Inputs in = load_inputs(cfg);
        const fs::path out = output_dir(cfg);
        auto on_report = [](const EvalReport& r) {
            log::info("ablate: " + r.variant + " seed " + std::to_string(r.seed) +
                      (r.error ? " failed" : " acc " + std::to_string(r.acc)));
        };
        const AblationTable t =
            run_ablation(in.bags, in.prototypes, cfg.train, class_count(cfg, in.bags), cfg.ablation_seeds, on_report);
        std::string lines;
        std::vector<EvalReport> all;
        for (const std::uint64_t seed : cfg.ablation_seeds) {
            for (const AblationRow& r : t.rows)
                for (const EvalReport& e : r.runs)
                    if (e.seed == seed) all.push_back(e);
        }
        for (const EvalReport& e : all) lines += io::to_json(e).dump() + "\n";
        io::write_file(out / "ablation.jsonl", lines);
        io::write_file(out / "ablation_summary.json", summary_json(t).dump(2) + "\n");
        std::cout << format_report_table(all) << "\n";
        std::printf("%-14s %9s %9s %9s %9s\n", "median", "acc", "auc", "eta2", "tumor");
        for (const AblationRow& r : t.rows) {
            std::printf("%-14s %9.4f %9.4f %9.4f %9.4f\n", r.name.c_str(), r.median_acc, r.median_auc, r.median_eta2,
                        r.median_tumor);
        }
        return int{kOk};
    });
}

// ---- gradcheck -------------------------------------------------------------

/// Gradient contract on a freshly generated small bag. With `corrupt`, the
/// analytic head gradient is scaled by 1.5 before comparison.
inline GradientCheckResult run_gradcheck(const io::RunConfig& cfg, bool corrupt = false) {
    SynthConfig sc = cfg.synth;
    sc.m_min = sc.m_max = cfg.gradcheck.m;
    const Bag bag = generate_bag(sc, 0);
    const PrototypeSet protos = sample_prototypes(sc);
    const ModelParams params = init_params(sc.n_in, sc.classes, cfg.train);
    const FrequencySample freqs = eval_frequencies(cfg.train, params.n_feat());
    const ModelContext ctx{protos, freqs, cfg.train};
    std::function<void(ModelParams&)> tamper;
    if (corrupt) {
        tamper = [](ModelParams& g) {
            for (double& x : g.head_weight.values()) x *= 1.5;
        };
    }
    return gradient_check(bag.features, bag.bag_id, bag.label, params, ctx, cfg.gradcheck.coordinates,
                          derive_seed(cfg.train.seed, {stream::gradcheck}), cfg.gradcheck.h, cfg.gradcheck.tolerance,
                          tamper);
}

inline json to_json(const GradientCheckResult& r) {
    json blocks = json::array();
    for (const BlockCheck& b : r.per_block) {
        blocks.push_back({{"block", b.block},
                          {"probes", b.probes},
                          {"worst",
                           {{"index", b.worst.index},
                            {"analytic", b.worst.analytic},
                            {"numeric", b.worst.numeric},
                            {"relative_error", b.worst.relative_error}}}});
    }
    return {{"coordinates", r.probes.size()},
            {"max_relative_error", r.max_relative_error},
            {"tolerance", r.tolerance},
            {"passed", r.passed()},
            {"blocks", blocks}};
}

inline int cmd_gradcheck(const io::RunConfig& cfg, bool corrupt = false) {
    return guarded([&] {
        const GradientCheckResult r = run_gradcheck(cfg, corrupt);
        io::write_file(output_dir(cfg) / "gradcheck.json", to_json(r).dump(2) + "\n");
        for (const BlockCheck& b : r.per_block) {
            std::printf("%-18s probes %3zu  worst rel err %.3e\n", b.block.c_str(), b.probes, b.worst.relative_error);
        }
        std::printf("max relative error %.3e (tolerance %.1e): %s\n", r.max_relative_error, r.tolerance,
                    r.passed() ? "PASS" : "FAIL");
        return r.passed() ? int{kOk} : int{kContract};
    });
}

}  // namespace pidlrsc::cli
