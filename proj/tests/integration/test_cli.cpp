#include "doctest.h"

#include "json.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

struct Cli {
    fs::path dir;
    Cli() {
        std::random_device rd;
        dir = fs::temp_directory_path() / ("crm-cli-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(dir);
    }
    ~Cli() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }

    Result operator()(const std::string& args, const fs::path& home = {}) const {
        const auto h = home.empty() ? dir / "home" : home;
        const std::string cmd = "CRM_HOME='" + h.string() + "' '" + CRM_CLI + "' " + args + " 2>/dev/null";
        Result r;
        FILE* p = popen(cmd.c_str(), "r");
        REQUIRE(p != nullptr);
        std::array<char, 4096> buf{};
        std::size_t n;
        while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
        const int status = pclose(p);
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        return r;
    }
};

std::string fixture(const char* name) { return std::string(CRM_FIXTURE_DIR) + "/" + name; }

} // namespace

TEST_CASE("cli: register, run, leaderboard, report") {
    Cli crm;
    CHECK(crm("register " + fixture("words.txt") + " --kind text").code == 0);
    CHECK(crm("register " + fixture("words.txt") + " --kind text").code == 0);
    CHECK(fs::exists(crm.dir / "home" / "registry.json"));

    const auto run = crm("run --dataset words --model enhanced-letter --seed 1 --json");
    REQUIRE(run.code == 0);
    const auto j = json::parse(run.out);
    CHECK(j["verified"] == true);
    CHECK(crm("run --dataset words --model bigram-letter").code == 0);

    const auto board = json::parse(crm("leaderboard words --json").out);
    REQUIRE(board.size() == 2);
    CHECK(board[0]["model"] == "enhanced-letter");
    CHECK(crm("leaderboard words").out.find("enhanced-letter") != std::string::npos);

    const auto report = crm("report --format json");
    REQUIRE(report.code == 0);
    const auto rj = json::parse(report.out);
    CHECK(rj["runs"].size() == 2);
    const auto table = crm("report --format table");
    CHECK(table.out.find(std::to_string(j["total"].get<std::uint64_t>())) != std::string::npos);
}

TEST_CASE("cli: exit codes") {
    Cli crm;
    CHECK(crm("").code == 2);
    CHECK(crm("frobnicate").code == 2);
    CHECK(crm("run --dataset words").code == 2);
    CHECK(crm("report --format xml").code == 2);
    CHECK(crm("--help").code == 0);
    CHECK(crm("leaderboard nothing").code == 2);
    CHECK(crm("register " + fixture("words.txt") + " --kind integers").code == 2);

    REQUIRE(crm("register " + fixture("words.txt") + " --kind text").code == 0);
    CHECK(crm("run --dataset words --model unknown-model").code == 2);
    CHECK(crm("run --dataset words --model pixel-delta").code == 2);

    const auto run = json::parse(crm("run --dataset words --model order0-byte --json").out);
    const auto container = crm.dir / "home" / run["container"].get<std::string>();
    CHECK(crm("verify '" + container.string() + "' --dataset words").code == 0);
    {
        std::fstream f(container, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(-40, std::ios::end);
        f.put('\x7f');
    }
    const auto bad = crm("verify '" + container.string() + "' --dataset words");
    CHECK(bad.code == 1);
    CHECK(bad.out.find("FAILED") != std::string::npos);
}

TEST_CASE("cli: empty state") {
    Cli crm;
    const auto r = crm("report --format json");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["runs"].empty());
    CHECK(crm("report --format table").code == 0);
}

TEST_CASE("cli: sampling is deterministic") {
    Cli crm;
    const auto a = crm("sample --model enhanced-letter --count 20 --seed 9");
    const auto b = crm("sample --model enhanced-letter --count 20 --seed 9");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 20);
    CHECK(crm("sample --model enhanced-letter --count 0 --seed 9").out.empty());
    CHECK(crm("sample --model pixel-delta --count 3 --seed 9").code == 2);

    const auto out = crm.dir / "s.txt";
    CHECK(crm("sample --model uniform-bit --count 100 --seed 2 -o '" + out.string() + "'").code == 0);
    CHECK(fs::file_size(out) == 101);
}

TEST_CASE("cli: generator feeds the registry") {
    Cli crm;
    const auto path = crm.dir / "geo.txt";
    REQUIRE(crm("gen --family geometric --param 0.5 -n 500 --seed 3 -o '" + path.string() + "'").code == 0);
    CHECK(crm("gen --family geometric --param 0.5 -n 500 --seed 3").out ==
          std::string(std::istreambuf_iterator<char>(std::ifstream(path).rdbuf()), {}));
    REQUIRE(crm("register '" + path.string() + "' --kind integers").code == 0);
    for (const char* m : {"geometric-guess3", "geometric-header", "geometric-adaptive", "family-select"})
        CHECK(crm(std::string("run --dataset geo --model ") + m).code == 0);
    const auto board = json::parse(crm("leaderboard geo --json").out);
    CHECK(board.size() == 4);
    CHECK(crm("gen --family cauchy --param 1 -n 5").code == 2);
    CHECK(crm("gen --family normal --param 0 --param 1 -n 5 --seed 1").code == 0);
    CHECK(crm("gen --family bernoulli --param 0.2 -n 64 --seed 1").out.size() == 65);
}

TEST_CASE("cli: bounds and info") {
    Cli crm;
    auto j = json::parse(crm("bounds --json rule-class --k 200 --e 1000 --d 4").out);
    CHECK(j["value"].get<double>() == doctest::Approx(48.82).epsilon(1e-3));
    CHECK(j["unit"] == "nats");
    j = json::parse(crm("bounds --json samples --epsilon 0.1 --delta 0.05 --class-size 1000").out);
    CHECK(j["value"].get<double>() == 100.0);
    j = json::parse(crm("bounds --json worm --class-size 1000 --epsilon 0.1 --n 100").out);
    CHECK(j["value"].get<double>() == doctest::Approx(0.0266).epsilon(0.01));
    j = json::parse(crm("bounds --json simulate --class-size 1000 --epsilon 0.1 --n 100 --trials 2000 --seed 5").out);
    CHECK(j["trials"] == 2000);
    j = json::parse(crm("bounds --json compression-view --found --log2-class-size 10 --n 100").out);
    CHECK(j["bits"].get<double>() == doctest::Approx(11.0));
    CHECK(crm("bounds samples --epsilon 0.1 --delta 0.05").code == 2);
    CHECK(crm("bounds samples --epsilon 2 --delta 0.05 --class-size 10").code == 2);
    CHECK(crm("bounds max-class --n 500 --epsilon 0.01 --delta 0.05").out.find("7.99573 nats") != std::string::npos);

    j = json::parse(crm("info --json entropy --p 0.5,0.25,0.125,0.125").out);
    CHECK(j["value"].get<double>() == 1.75);
    j = json::parse(crm("info --json kl --p 0.5,0.5 --q 0.5,0.5").out);
    CHECK(j["value"].get<double>() == 0.0);
    j = json::parse(crm("info --json geometric --lambda 2 --guess 3").out);
    CHECK(j["kl"]["nats"].get<double>() == doctest::Approx(0.0622).epsilon(2e-3));
    CHECK(crm("info crossover --header-bits 64 --penalty 0.0620").out == "crossover_n = 1032\n");
    CHECK(crm("info kl --p 0.5,0.5 --q 1").code == 2);
}
