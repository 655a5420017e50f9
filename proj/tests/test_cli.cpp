#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "helpers.hpp"

using namespace pidlrsc;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "pidlrsc_test_cli";

int run(const std::string& args) {
    const std::string cmd = std::string(PIDLRSC_CLI_PATH) + " --quiet " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = kRoot / (name + ".json");
    io::write_file(p, text);
    return p;
}

const char* kSmall = R"({
  "synth": {"n_in": 8, "m_min": 20, "m_max": 30, "rho": 0.2, "prototypes": 6, "count": 10},
  "train": {"frequencies": 16, "epochs": 1}
})";

std::string arg(const fs::path& p) { return "\"" + p.string() + "\""; }

std::size_t line_count(const fs::path& p) {
    const std::string s = io::read_file(p);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        fs::remove_all(kRoot);
        fs::create_directories(kRoot);
    }
};

TEST_F(Cli, GenWritesManifestAndIsReproducible) {
    const fs::path cfg = write_config("small", kSmall);
    ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(kRoot / "gen_a") + " gen"), 0);
    ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(kRoot / "gen_b") + " gen"), 0);
    EXPECT_EQ(line_count(kRoot / "gen_a/manifest.jsonl"), 10u);
    for (const char* f : {"manifest.jsonl", "prototypes.pidf", "bags/bag_000003.pidf", "bags/bag_000003.roles.json"}) {
        EXPECT_EQ(io::read_file(kRoot / "gen_a" / f), io::read_file(kRoot / "gen_b" / f)) << f;
    }
    ASSERT_EQ(run("--config " + arg(cfg) + " --seed 9 --out " + arg(kRoot / "gen_c") + " gen"), 0);
    EXPECT_NE(io::read_file(kRoot / "gen_a/bags/bag_000003.pidf"), io::read_file(kRoot / "gen_c/bags/bag_000003.pidf"));
}

TEST_F(Cli, TrainEvalExplainPipeline) {
    const fs::path cfg = write_config("small", kSmall);
    const fs::path dir = kRoot / "pipeline";
    ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(dir) + " gen"), 0);
    ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(dir) + " train"), 0);
    EXPECT_EQ(line_count(dir / "history.jsonl"), 1u);
    const auto h = io::json::parse(io::read_file(dir / "history.jsonl"));
    for (const char* k : {"epoch", "loss", "train_acc"}) EXPECT_TRUE(h.contains(k)) << k;

    ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(dir) + " eval"), 0);
    const auto report = io::json::parse(io::read_file(dir / "report.json"));
    EXPECT_TRUE(report.contains("acc"));
    EXPECT_EQ(report.at("test_bags"), 3);
    EXPECT_EQ(line_count(dir / "projections.csv"), 4u);

    ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(dir) + " explain --bag 2"), 0);
    const auto j = io::json::parse(io::read_file(dir / "explain_2.json"));
    EXPECT_EQ(j.at("bag_id"), 2);
    const auto& w = j.at("weights");
    EXPECT_GE(w.at("TIs").get<double>(), w.at("NTIs").get<double>());
    EXPECT_GE(w.at("NTIs").get<double>(), w.at("BGIs").get<double>());
    EXPECT_EQ(w.at("prototypes").get<double>(), 1.0);
    for (const char* k : {"TIs", "NTIs", "BGIs"}) EXPECT_TRUE(j.at("distances").contains(k));

    const io::RunConfig rc = io::load_config(cfg);
    const auto bags = io::read_dataset(dir);
    const ModelParams params = io::read_checkpoint(dir / "checkpoint.pidm");
    const auto lib = cli::explain_bag(bags[2], params, io::read_prototypes(dir / "prototypes.pidf"), rc.train);
    EXPECT_EQ(lib.at("instances"), j.at("instances"));
    EXPECT_EQ(lib.at("predicted_class"), j.at("predicted_class"));
    ASSERT_EQ(j.at("instances").size(), bags[2].size());
    for (const auto& inst : j.at("instances")) {
        const std::string s = inst.at("semantic");
        EXPECT_TRUE(s == "TIs" || s == "NTIs" || s == "BGIs");
    }

    EXPECT_EQ(run("--config " + arg(cfg) + " --out " + arg(dir) + " explain --bag 999"), 3);
}

TEST_F(Cli, ZeroLearningRateCheckpointEqualsInit) {
    const fs::path cfg = write_config("lr0", R"({
      "synth": {"n_in": 8, "m_min": 20, "m_max": 30, "rho": 0.2, "prototypes": 6, "count": 10},
      "train": {"frequencies": 16, "epochs": 2, "learning_rate": 0}
    })");
    const fs::path dir = kRoot / "lr0";
    ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(dir) + " gen"), 0);
    ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(dir) + " train"), 0);
    const io::RunConfig rc = io::load_config(cfg);
    EXPECT_TRUE(io::read_checkpoint(dir / "checkpoint.pidm") == init_params(8, 3, rc.train));
}

TEST_F(Cli, TrainIsDeterministic) {
    const fs::path cfg = write_config("small", kSmall);
    const fs::path a = kRoot / "det_a", b = kRoot / "det_b";
    for (const auto& d : {a, b}) {
        ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(d) + " gen"), 0);
        ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(d) + " train"), 0);
    }
    EXPECT_EQ(io::read_file(a / "checkpoint.pidm"), io::read_file(b / "checkpoint.pidm"));
    EXPECT_EQ(io::read_file(a / "history.jsonl"), io::read_file(b / "history.jsonl"));
}

TEST_F(Cli, OverfitOneBag) {
    const fs::path cfg = write_config("one", R"({
      "synth": {"n_in": 8, "m_min": 20, "m_max": 20, "rho": 0.2, "prototypes": 6, "count": 1},
      "train": {"frequencies": 16, "epochs": 40, "learning_rate": 0.05},
      "split": {"enabled": false}
    })");
    const fs::path dir = kRoot / "one";
    ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(dir) + " gen"), 0);
    ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(dir) + " train"), 0);
    ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(dir) + " eval"), 0);
    EXPECT_EQ(io::json::parse(io::read_file(dir / "report.json")).at("acc"), 1.0);
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run("--config " + arg(kRoot / "missing.json") + " gen"), 3);
    const fs::path bad = write_config("bad", R"({"train": {"lr": 0.1}})");
    EXPECT_EQ(run("--config " + arg(bad) + " gen"), 3);
    EXPECT_EQ(run("--out " + arg(kRoot / "empty") + " train"), 3);
    EXPECT_EQ(run("frobnicate"), 3);

    const fs::path diverge = write_config("diverge", R"({
      "synth": {"n_in": 8, "m_min": 20, "m_max": 30, "rho": 0.2, "prototypes": 6, "count": 10},
      "train": {"frequencies": 16, "epochs": 2, "optimizer": "sgd", "learning_rate": 1e300}
    })");
    const fs::path dir = kRoot / "diverge";
    ASSERT_EQ(run("--config " + arg(diverge) + " --out " + arg(dir) + " gen"), 0);
    EXPECT_EQ(run("--config " + arg(diverge) + " --out " + arg(dir) + " train"), 2);
    EXPECT_TRUE(fs::exists(dir / "checkpoint.pidm"));

    const fs::path gc = write_config("gc", R"({"synth": {"n_in": 8, "prototypes": 6}, "train": {"frequencies": 16}})");
    EXPECT_EQ(run("--config " + arg(gc) + " --out " + arg(kRoot / "gc") + " gradcheck"), 0);
    EXPECT_EQ(run("--config " + arg(gc) + " --out " + arg(kRoot / "gc") + " gradcheck --corrupt-gradient"), 1);
}

TEST_F(Cli, CheckpointShapeMismatch) {
    const fs::path cfg = write_config("small", kSmall);
    const fs::path dir = kRoot / "mismatch";
    ASSERT_EQ(run("--config " + arg(cfg) + " --out " + arg(dir) + " gen"), 0);
    io::write_checkpoint(kRoot / "wide.pidm", init_params(16, 3, TrainConfig{}));
    EXPECT_EQ(run("--config " + arg(cfg) + " --out " + arg(dir) + " eval --checkpoint " + arg(kRoot / "wide.pidm")), 3);
}
