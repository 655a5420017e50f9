#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pidlrsc/pidlrsc.hpp"

using namespace pidlrsc;

int main(int argc, char** argv) {
    CLI::App app{"pidlrsc: prototype-anchored disentanglement with low-rank subspace clustering"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "output directory (overrides paths.output)");
    app.add_option("--seed", seed, "seed for data and training (overrides the config)");
    app.add_flag("--quiet", quiet, "suppress progress output");

    auto* gen = app.add_subcommand("gen", "write a synthetic dataset");
    auto* train = app.add_subcommand("train", "train a model, write checkpoint and history");
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    auto* explain = app.add_subcommand("explain", "instance semantics of one bag");
    auto* ablate = app.add_subcommand("ablate", "train and evaluate every ablation variant");
    auto* gradcheck = app.add_subcommand("gradcheck", "check analytic gradients against finite differences");

    std::string checkpoint;
    std::string subset = "test";
    for (auto* sub : {eval, explain}) sub->add_option("--checkpoint", checkpoint, "checkpoint file");
    eval->add_option("--subset", subset, "bags to score")->check(CLI::IsMember({"train", "test", "all"}));
    std::uint64_t bag_id = 0;
    explain->add_option("--bag", bag_id, "bag id")->required();
    bool corrupt = false;
    gradcheck->add_flag("--corrupt-gradient", corrupt, "scale the analytic head gradient (fault injection)");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? cli::kOk : cli::kIo;
    }
    log::set_quiet(quiet);

    io::RunConfig cfg;
    const int loaded = cli::guarded([&] {
        if (!config_path.empty()) cfg = io::load_config(config_path);
        return 0;
    });
    if (loaded != 0) return loaded;
    if (!out_dir.empty()) cfg.paths.output = out_dir;
    if (seed) cfg.set_seed(*seed);
    if (!checkpoint.empty()) cfg.paths.checkpoint = checkpoint;

    if (*gen) return cli::cmd_gen(cfg);
    if (*train) return cli::cmd_train(cfg);
    if (*eval) {
        const auto s = subset == "train" ? cli::Subset::train : subset == "all" ? cli::Subset::all : cli::Subset::test;
        return cli::cmd_eval(cfg, s);
    }
    if (*explain) return cli::cmd_explain(cfg, bag_id);
    if (*ablate) return cli::cmd_ablate(cfg);
    if (*gradcheck) return cli::cmd_gradcheck(cfg, corrupt);
    return cli::kContract;
}
