#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks of the command-line tool as a subprocess: exit codes
// for the documented error classes and the generate -> train -> evaluate ->
// represent -> cluster -> transfer chain. SMPRED_CLI_PATH is injected by
// the build so the test always runs the binary it was built with.

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "smpred_cli_test";

int run_cli(const std::string& args, const std::string& stdout_file = "") {
    std::string cmd = std::string("\"") + SMPRED_CLI_PATH + "\" " + args;
    cmd += stdout_file.empty() ? " >/dev/null 2>/dev/null"
                               : " >\"" + stdout_file + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string p(const char* rel) { return (kWork / rel).string(); }

}  // namespace

TEST_CASE("cli: usage errors exit 2, runtime errors exit 1") {
    fs::remove_all(kWork);
    fs::create_directories(kWork);

    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("generate --help") == 0);
    CHECK(run_cli("") == 2);                        // subcommand required
    CHECK(run_cli("frobnicate") == 2);              // unknown subcommand
    CHECK(run_cli("generate") == 2);                // missing --out
    CHECK(run_cli("generate --env moon --steps 100 --out " + p("x.smt")) == 2);
    CHECK(run_cli("generate --env square --steps 5 --out " + p("x.smt")) == 2);
    CHECK(run_cli("train --arch bogus --data " + p("x.smt") + " --out " + p("m")) == 2);
    CHECK(run_cli("repro --scale bogus") == 2);
    CHECK(run_cli("evaluate --model " + p("missing.ckpt") + " --data " + p("missing.smt")) == 1);
    CHECK_FALSE(fs::exists(kWork / "x.smt"));
}

TEST_CASE("cli: generate/train/evaluate/represent/cluster/transfer chain") {
    fs::remove_all(kWork);
    fs::create_directories(kWork);

    REQUIRE(run_cli("generate --env square --steps 300 --seed 7 --csv --out " +
                    p("square.smt")) == 0);
    CHECK(fs::exists(kWork / "square.smt"));
    CHECK(fs::exists(kWork / "square.smt.poses"));
    CHECK(fs::exists(kWork / "square.smt.csv"));
    CHECK(fs::exists(kWork / "square.smt.poses.csv"));

    REQUIRE(run_cli("train --arch sm --data " + p("square.smt") +
                    " --seed 1 --batch 32 --max-epochs 2 --out " + p("sm-model")) == 0);
    CHECK(fs::exists(kWork / "sm-model.ckpt"));
    CHECK(fs::exists(kWork / "sm-model.history.csv"));

    // --model accepts the prefix as well as the full checkpoint path.
    const auto out_txt = p("eval.txt");
    REQUIRE(run_cli("evaluate --model " + p("sm-model") + " --data " + p("square.smt"),
                    out_txt) == 0);
    const std::string eval_out = slurp(out_txt);
    CHECK(eval_out.find("arch=sm") != std::string::npos);
    CHECK(eval_out.find("split=test") != std::string::npos);
    CHECK(eval_out.find("error=") != std::string::npos);
    CHECK(run_cli("evaluate --model " + p("sm-model.ckpt") + " --data " + p("square.smt") +
                  " --split all") == 0);
    CHECK(run_cli("evaluate --model " + p("sm-model") + " --data " + p("square.smt") +
                  " --split bogus") == 2);

    REQUIRE(run_cli("represent --model " + p("sm-model") + " --data " + p("square.smt") +
                    " --out " + p("reps")) == 0);
    CHECK(fs::exists(kWork / "reps/representations.reps"));
    CHECK(fs::exists(kWork / "reps/projection.csv"));

    REQUIRE(run_cli("cluster --reps " + p("reps") + " --k 3 --seed 5 --samples 20") == 0);
    CHECK(fs::exists(kWork / "reps/clusters.bin"));
    CHECK(fs::exists(kWork / "reps/report.csv"));

    REQUIRE(run_cli("generate --env rooms1 --steps 300 --seed 8 --out " +
                    p("rooms1.smt")) == 0);
    REQUIRE(run_cli("transfer --encoder " + p("sm-model") + " --clusters " +
                    p("reps/clusters.bin") + " --data " + p("rooms1.smt") + " --out " +
                    p("tf") + " --samples 20") == 0);
    CHECK(fs::exists(kWork / "tf/rooms1.reps"));
    CHECK(fs::exists(kWork / "tf/rooms1.report.csv"));

    fs::remove_all(kWork);
}
