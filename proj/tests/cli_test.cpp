#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace fs = std::filesystem;

namespace {

struct ScratchDir {
    fs::path path;
    ScratchDir() {
        std::mt19937_64 rng(std::random_device{}());
        path = fs::temp_directory_path() / ("limspec_cli_" + std::to_string(rng()));
        fs::create_directories(path);
    }
    ~ScratchDir() { fs::remove_all(path); }
};

fs::path scratch() {
    static const ScratchDir dir;
    return dir.path;
}

int run(const std::string& args) {
    const std::string cmd = "LIMSPEC_CACHE='" + (scratch() / "cache").string() + "' '" + LIMSPEC_BIN + "' " + args +
                            " > '" + (scratch() / "stdout.txt").string() + "' 2> '" +
                            (scratch() / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string captured(const char* which) {
    std::ifstream in(scratch() / which);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string config(const std::string& name) { return "'" + std::string(LIMSPEC_CONFIGS) + "/" + name + "'"; }

std::string write_config(const std::string& name, const std::string& body) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << body;
    return "'" + p.string() + "'";
}

}  // namespace

TEST_SUITE("cli exit codes") {
    TEST_CASE("passing run exits 0 and writes artifacts") {
        const fs::path out = scratch() / "free";
        CHECK(run("run " + config("free_laplacian.json") + " --out '" + out.string() + "'") == 0);
        for (const char* f : {"report.json", "spectrum.csv", "spectrum.svg", "run_info.json"}) CHECK(fs::exists(out / f));
        // A second invocation is served from LIMSPEC_CACHE.
        CHECK(run("run " + config("free_laplacian.json") + " --out '" + out.string() + "'") == 0);
        CHECK(captured("stdout.txt").find("cache") != std::string::npos);
    }

    TEST_CASE("failed assertion exits 1") {
        CHECK(run("run " + config("free_laplacian_wrong_claim.json") + " --no-cache --out '" +
                  (scratch() / "wrong").string() + "'") == 1);
    }

    TEST_CASE("config errors exit 2") {
        const auto missing = write_config("missing.json", R"({"schema": "limspec/1", "name": "m", "sequences": []})");
        CHECK(run("run " + missing + " --no-cache") == 2);
        CHECK(captured("stderr.txt").find("operator") != std::string::npos);

        const auto syntax = write_config("syntax.json", "{\n  \"schema\": ,\n}");
        CHECK(run("run " + syntax + " --no-cache") == 2);
        CHECK(captured("stderr.txt").find("line 2") != std::string::npos);

        CHECK(run("run '" + (scratch() / "absent.json").string() + "'") == 2);
    }

    TEST_CASE("unknown gallery name exits 2") {
        CHECK(run("gallery no-such-entry") == 2);
        CHECK(captured("stderr.txt").find("two-sided") != std::string::npos);
    }

    TEST_CASE("unwritable output exits 1") {
        std::ofstream(scratch() / "blocker") << "x";
        CHECK(run("run " + config("free_laplacian.json") + " --no-cache --out '" + (scratch() / "blocker" / "out").string() +
                  "'") == 1);
    }

    TEST_CASE("list and flags") {
        CHECK(run("list") == 0);
        CHECK(captured("stdout.txt").find("discrete-criterion") != std::string::npos);
        CHECK(run("gallery two-sided --threads 1 --seed 3 --no-cache --out '" + (scratch() / "g").string() + "'") == 0);
        CHECK(fs::exists(scratch() / "g" / "spectrum.csv"));
        CHECK(run("verify resolvent") == 0);
        CHECK(run("verify no-such-suite") == 2);
        CHECK(run("run") == 2);
    }
}
