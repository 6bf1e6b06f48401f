#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "idrr/cli.hpp"
#include "idrr/errors.hpp"
#include "support.hpp"

using namespace idrr;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& extra = "") {
    const fs::path p = dir / "run.conf";
    std::ofstream(p) << "encoder = hash-encoder-16\nmax_tokens = 32\nloss = mae\nlr = 0.01\nepochs = 2\n"
                        "batch_size = 8\nseeds = 1, 2\n"
                     << "discogem_path = " << testing::fixture("discogem_small.csv") << "\n"
                     << "pdtb_path = " << testing::fixture("pdtb_small.tsv") << "\n"
                     << "coannotated_path = " << testing::fixture("coannotated_small.tsv") << "\n"
                     << extra;
    return p;
}

cli::GlobalOptions opts(const fs::path& config, const fs::path& out) {
    cli::GlobalOptions o;
    o.config_path = config.string();
    o.out_dir = out.string();
    return o;
}

}  // namespace

TEST_CASE("prepare is deterministic and guarded") {
    const fs::path dir = testing::scratch_dir("cli-prepare");
    const fs::path config = write_config(dir);
    std::ostringstream log;
    cli::cmd_prepare(opts(config, dir / "a"), log);
    cli::cmd_prepare(opts(config, dir / "b"), log);
    CHECK(slurp(dir / "a" / "split.tsv") == slurp(dir / "b" / "split.tsv"));
    CHECK(slurp(dir / "a" / "instances.jsonl") == slurp(dir / "b" / "instances.jsonl"));
    CHECK(cli::verify_manifest((dir / "a").string()).empty());

    const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(manifest["status"] == "complete");
    CHECK_FALSE(fs::exists(dir / "a" / ".lock"));

    SUBCASE("existing output needs --force") {
        CHECK_THROWS_AS(cli::cmd_prepare(opts(config, dir / "a"), log), ConfigError);
        auto forced = opts(config, dir / "a");
        forced.force = true;
        CHECK_NOTHROW(cli::cmd_prepare(forced, log));
    }
    SUBCASE("a held lock is refused") {
        std::ofstream(dir / "b" / ".lock") << "";
        auto forced = opts(config, dir / "b");
        forced.force = true;
        CHECK_THROWS(cli::cmd_prepare(forced, log));
    }
    SUBCASE("tampering shows up in verification") {
        std::ofstream(dir / "a" / "split.tsv", std::ios::app) << "x\ttrain\n";
        CHECK(cli::verify_manifest((dir / "a").string()) == std::vector<std::string>{"split.tsv"});
    }
    SUBCASE("another split seed gives another split") {
        auto other = opts(config, dir / "c");
        other.seed = 1234;
        cli::cmd_prepare(other, log);
        CHECK(slurp(dir / "c" / "split.tsv") != slurp(dir / "a" / "split.tsv"));
    }
    fs::remove_all(dir);
}

TEST_CASE("exit codes") {
    const fs::path dir = testing::scratch_dir("cli-errors");
    std::ostringstream log;
    const fs::path missing = dir / "missing.conf";
    std::ofstream(missing) << "discogem_path = /no/such/file.csv\n";
    try {
        cli::cmd_prepare(opts(missing, dir / "out"), log);
        FAIL("expected an error");
    } catch (const std::exception& e) {
        CHECK(cli::exit_code_for(e) == cli::kConfigError);
    }
    CHECK(cli::exit_code_for(DataError("x")) == cli::kDataError);
    CHECK(cli::exit_code_for(std::runtime_error("x")) == cli::kRuntimeError);
    fs::remove_all(dir);
}

TEST_CASE("train, evaluate, analyze and baseline end to end") {
    const fs::path dir = testing::scratch_dir("cli-e2e");
    const fs::path config = write_config(dir);
    std::ostringstream log;
    cli::cmd_prepare(opts(config, dir / "data"), log);
    cli::cmd_train(opts(config, dir / "run"), (dir / "data").string(), log);
    for (const char* f : {"seed-1/predictions.jsonl", "seed-2/metrics.json", "seed-1/log.txt", "metrics.json"})
        CHECK(fs::exists(dir / "run" / f));
    const auto metrics = nlohmann::json::parse(slurp(dir / "run" / "metrics.json"));
    CHECK(metrics.dump().find("std_undefined") == std::string::npos);
    CHECK(cli::verify_manifest((dir / "run").string()).empty());

    cli::EvaluateOptions ev;
    ev.run_dir = (dir / "run").string();
    ev.test = "cross";
    cli::GlobalOptions eo;
    eo.out_dir = (dir / "eval").string();
    cli::cmd_evaluate(eo, ev, log);
    CHECK(fs::exists(dir / "eval" / "coherence.csv"));

    cli::cmd_analyze(opts(config, dir / "agree"), (dir / "data").string(), (dir / "run").string(), log);
    const auto agreement = nlohmann::json::parse(slurp(dir / "agree" / "agreement.json"));
    CHECK(agreement.dump().find("\"total\":30") != std::string::npos);

    cli::cmd_baseline(opts(config, dir / "base"), (dir / "data").string(), log);
    CHECK(fs::exists(dir / "base" / "metrics.json"));

    SUBCASE("single seed flags the std as undefined") {
        auto o = opts(config, dir / "run7");
        o.seed = 7;
        cli::cmd_train(o, (dir / "data").string(), log);
        const auto m = nlohmann::json::parse(slurp(dir / "run7" / "metrics.json"));
        CHECK(m.dump().find("\"std_undefined\":true") != std::string::npos);
    }
    SUBCASE("a different hierarchy is refused") {
        const fs::path h = dir / "h.tsv";
        std::string text = slurp(testing::source_path("data/sense_hierarchy.tsv"));
        const auto pos = text.find("Substitution");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 12, "Replacement1");
        std::ofstream(h) << text;
        const fs::path cfg = dir / "other.conf";
        std::ofstream(cfg) << slurp(config) << "hierarchy = " << h.string() << "\n";
        try {
            cli::cmd_train(opts(cfg, dir / "run-h"), (dir / "data").string(), log);
            FAIL("expected a hierarchy error");
        } catch (const std::exception& e) {
            CHECK(cli::exit_code_for(e) != cli::kSuccess);
        }
    }
    fs::remove_all(dir);
}
