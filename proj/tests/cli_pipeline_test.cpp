// Drives the installed CLI binary end to end: train, extract-pd,
// filter-scenarios, evaluate, slices, determinism, and exit codes.
// argv[1] is the path to the binary.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what.c_str());
    if (!ok) ++failures;
}

int run(const std::string& cmd) {
    const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_pipeline_test <sepopt-binary>\n");
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path root = fs::temp_directory_path() / "sepopt_cli_test";
    fs::remove_all(root);
    fs::create_directories(root);

    const fs::path cfg_path = root / "tiny.cfg";
    {
        std::ofstream cfg(cfg_path);
        cfg << "intruder_dist_nodes = 6\n"
               "intruder_bearing_nodes = 6\n"
               "intruder_heading_nodes = 6\n"
               "goal_dist_nodes = 5\n"
               "goal_bearing_nodes = 5\n"
               "n_state = 300\n"
               "n_vi = 3\n"
               "n_ev = 5\n"
               "n_q = 400\n"
               "slice_spacing_m = 100\n";
    }
    const std::string base =
        cli + " %s --config " + cfg_path.string() + " --scale desk --threads 2";
    auto cmd = [&](const std::string& sub, const std::string& extra) {
        char buf[512];
        std::snprintf(buf, sizeof buf, base.c_str(), sub.c_str());
        return std::string(buf) + " " + extra;
    };

    // train -> weights without post-decision fit
    const fs::path run1 = root / "run1";
    check(run("echo") == 0, "shell harness sane");
    check(run(cmd("train", "--seed 5 --out " + run1.string())) == 0,
          "train exits 0");
    check(fs::exists(run1 / "weights.json"), "train writes weights.json");
    check(fs::exists(run1 / "train_log.jsonl"), "train writes the JSONL log");
    check(fs::exists(run1 / "manifest.json"), "train writes a manifest");

    // training is deterministic artifact-for-artifact
    const fs::path run2 = root / "run2";
    check(run(cmd("train", "--seed 5 --out " + run2.string())) == 0,
          "second train exits 0");
    check(slurp(run1 / "weights.json") == slurp(run2 / "weights.json"),
          "same seed reproduces weights.json byte for byte");

    // extract-pd completes the artifact
    const fs::path pd = root / "pd";
    check(run(cmd("extract-pd", "--weights " + (run1 / "weights.json").string() +
                                   " --seed 5 --out " + pd.string())) == 0,
          "extract-pd exits 0");
    check(slurp(pd / "weights.json").find("\"theta_q\": []") ==
              std::string::npos,
          "extract-pd fills theta_q");

    // filtered scenarios
    const fs::path filt = root / "filt";
    check(run(cmd("filter-scenarios",
                  "--n 40 --seed 9 --out " + filt.string())) == 0,
          "filter-scenarios exits 0");
    check(fs::exists(filt / "scenarios_filtered.csv"),
          "filter-scenarios writes the scenario CSV");

    const fs::path filt2 = root / "filt2";
    check(run(cmd("filter-scenarios",
                  "--n 40 --seed 9 --out " + filt2.string())) == 0,
          "second filter-scenarios exits 0");
    check(slurp(filt / "scenarios_filtered.csv") ==
              slurp(filt2 / "scenarios_filtered.csv"),
          "scenario generation is byte-reproducible");

    // evaluate the optimized policy on the filtered set, twice
    const fs::path eval1 = root / "eval1";
    const fs::path eval2 = root / "eval2";
    const std::string eval_args =
        "--family optimized-trl --weights " + (pd / "weights.json").string() +
        " --scenarios " + (filt / "scenarios_filtered.csv").string();
    check(run(cmd("evaluate", eval_args + " --out " + eval1.string())) == 0,
          "evaluate exits 0");
    check(run(cmd("evaluate", eval_args + " --out " + eval2.string())) == 0,
          "repeat evaluate exits 0");
    check(slurp(eval1 / "report.json") == slurp(eval2 / "report.json"),
          "re-running an evaluation is byte-identical");

    // static policy over a sampled unfiltered set
    const fs::path eval3 = root / "eval3";
    check(run(cmd("evaluate", "--family static --dbar 300 --seed 11 "
                              "--sample-unfiltered 150 --out " +
                                  eval3.string())) == 0,
          "static evaluate exits 0");

    // slices
    const fs::path sl = root / "slices";
    check(run(cmd("slice-value", "--weights " + (pd / "weights.json").string() +
                                     " --out " + sl.string())) == 0,
          "slice-value exits 0");
    check(run(cmd("slice-policy",
                  "--weights " + (pd / "weights.json").string() + " --out " +
                      sl.string())) == 0,
          "slice-policy exits 0");
    check(slurp(sl / "value_slice.csv").rfind("x_m,y_m,value", 0) == 0,
          "value slice has the documented header");
    check(slurp(sl / "policy_slice.csv").rfind("x_m,y_m,separation_m", 0) == 0,
          "policy slice has the documented header");

    // error paths: missing prerequisite artifact and invalid config
    check(run(cmd("evaluate", "--family optimized-trl --sample-unfiltered 10 "
                              "--out " +
                                  (root / "bad1").string())) == 2,
          "evaluate without weights exits 2");
    {
        std::ofstream bad(root / "bad.cfg");
        bad << "own_speed_mps = -1\n";
    }
    check(run(cli + " train --config " + (root / "bad.cfg").string() +
              " --out " + (root / "bad2").string()) == 2,
          "invalid config exits 2");
    {
        std::ofstream bad(root / "unknown.cfg");
        bad << "no_such_key = 1\n";
    }
    check(run(cli + " train --config " + (root / "unknown.cfg").string() +
              " --out " + (root / "bad3").string()) == 2,
          "unknown config key exits 2");
    check(run(cli + " evaluate --out " + (root / "bad4").string()) == 1,
          "missing required flags exit 1");
    check(run(cli + " no-such-command") == 1, "unknown subcommand exits 1");

    if (failures == 0) {
        std::printf("cli pipeline: all checks passed\n");
        return 0;
    }
    std::printf("cli pipeline: %d check(s) failed\n", failures);
    return 1;
}
