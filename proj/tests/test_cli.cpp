#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"
#include "spike/experiment.hpp"
#include "spike/report_json.hpp"

using namespace spike;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(SPIKE_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch() {
    const fs::path d = fs::temp_directory_path() / "spike_cli_test";
    fs::create_directories(d);
    return d;
}

std::string write_catalog(const std::string& name, const std::string& scenarios) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << R"({"network": ")" << (data_dir() / "figure2.json").string() << R"(", "scenarios": )"
                     << scenarios << "}";
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("law queries") {
    auto r = run("law --rho --omega 1 --c 0.125");
    CHECK(r.code == 0);
    CHECK(r.out == "rho=2.25 zeta=0.777778\n");
    r = run("law --edges --c 0.125");
    CHECK(r.code == 0);
    CHECK(r.out == "a=0.417893 b=1.832107\n");
    r = run("law --c 0.125 --m-at 2.25");
    CHECK(r.code == 0);
    CHECK(r.out.find("m=-0.888889") != std::string::npos);
    CHECK(r.out.find("h'=1.142857") != std::string::npos);
    const std::string err = std::string(SPIKE_CLI) + " law --rho --omega 0.3 --c 0.125 2>&1";
    FILE* p = popen(err.c_str(), "r");
    std::array<char, 512> buf{};
    const std::size_t got = fread(buf.data(), 1, buf.size(), p);
    const int status = pclose(p);
    CHECK(WEXITSTATUS(status) == 3);
    CHECK(std::string(buf.data(), got).find("spike not separated") != std::string::npos);
    CHECK(run("law --bogus").code == 2);
    CHECK(run("").code == 2);
}

TEST_CASE("tracy-widom queries") {
    const auto r = run("tw --quantile 0.99");
    CHECK(r.code == 0);
    CHECK(r.out.find("0.4776") != std::string::npos);
    CHECK(run("tw --quantile 1.5").code == 3);
}

TEST_CASE("network summary") {
    const auto r = run("network --spec " + (data_dir() / "figure2.json").string());
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["N"] == 10);
    CHECK(j["nodes"].size() == 10);
    CHECK(j.contains("c_plus"));
    CHECK(j.contains("worst_node"));
    CHECK(run("network --spec /nonexistent.json").code == 2);
}

TEST_CASE("detect exit codes") {
    const std::string spiked = (scratch() / "spiked.spk").string();
    REQUIRE(run("simulate --sample-out " + spiked + " --N 256 --n 2048 --omega 1 --seed 1").code == 0);
    const auto r = run("detect --input " + spiked + " --eta 0.01");
    CHECK(r.code == 10);
    const auto rep = detection_report_from_json(r.out);
    CHECK(rep.decision == Decision::H0_bar);
    CHECK(to_json(rep) + "\n" == r.out);

    int quiet = 0;
    for (int s = 1; s <= 20; ++s) {
        const std::string h0 = (scratch() / "h0.spk").string();
        REQUIRE(run("simulate --sample-out " + h0 + " --N 64 --n 512 --seed " + std::to_string(s)).code == 0);
        quiet += run("detect --input " + h0 + " --eta 0.01").code == 0;
    }
    CHECK(quiet >= 17);
    CHECK(run("detect --input /nonexistent.spk").code == 2);
    CHECK(run("detect --input " + spiked + " --eta 0.01 --mode sideways").code == 2);
}

TEST_CASE("localize end to end") {
    const std::string nodes = write_catalog("nodes.json", R"({"type": "node_failure", "nodes": "all"})");
    const std::string obs = (scratch() / "node10.spk").string();
    REQUIRE(run("simulate --sample-out " + obs + " --n 3000 --catalog " + nodes + " --truth 10 --seed 2").code == 0);
    auto r = run("localize --input " + obs + " --catalog " + nodes + " --max-negative-spikes 0");
    CHECK(r.code == 0);
    auto rep = localization_report_from_json(r.out);
    CHECK(rep.chosen == 9);
    CHECK(nlohmann::json::parse(r.out)["chosen_label"] == "node 10");

    // Single hypothesis.
    const std::string one = write_catalog("one.json", R"([{"type": "node_failure", "nodes": [3]}])");
    r = run("localize --input " + obs + " --catalog " + one);
    CHECK(r.code == 0);
    CHECK(localization_report_from_json(r.out).chosen == 0);

    // Unknown amplitude with parameter changes.
    const std::string params = write_catalog("params.json", R"({"type": "param_change", "params": "all", "beta": 2})");
    const std::string pobs = (scratch() / "param10.spk").string();
    REQUIRE(run("simulate --sample-out " + pobs + " --n 3000 --catalog " + params + " --truth 10 --seed 3").code == 0);
    r = run("localize --input " + pobs + " --catalog " + params + " --unknown-amplitude");
    CHECK(r.code == 0);
    rep = localization_report_from_json(r.out);
    CHECK(rep.method == LocalizationMethod::unknown_amplitude);
    CHECK(std::isfinite(rep.zeta_hat));

    // No hypothesis separated at this ratio.
    const std::string faint = write_catalog("faint.json", R"({"type": "param_change", "params": "all", "beta": 0.01})");
    r = run("localize --input " + obs + " --catalog " + faint);
    CHECK(r.code == 4);
    CHECK(localization_report_from_json(r.out).status == LocalizationStatus::inconclusive);
}

TEST_CASE("scenario listing") {
    const std::string nodes = write_catalog("nodes2.json", R"({"type": "node_failure", "nodes": [1, 10]})");
    const auto r = run("scenario --catalog " + nodes);
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["scenarios"].size() == 2);
    CHECK(j["scenarios"][1]["label"] == "node 10");
}

TEST_CASE("simulate presets") {
    const fs::path a = scratch() / "f3a.csv", b = scratch() / "f3b.csv";
    REQUIRE(run("simulate --figure 3 --trials 10000 --seed 7 --out " + a.string()).code == 0);
    REQUIRE(run("simulate --figure 3 --trials 10000 --seed 7 --threads 2 --out " + b.string()).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).rfind("n,eta,trials,cdr,clr,clr2,se\n", 0) == 0);

    const auto f5 = run("simulate --figure 5 --trials 300");
    REQUIRE(f5.code == 0);
    std::istringstream lines(f5.out);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "n,eta,trials,cdr,clr,clr2,se");
    std::getline(lines, row);
    CHECK(row.find("nan") == std::string::npos);

    const fs::path h = scratch() / "f1.txt";
    REQUIRE(run("simulate --figure 1 --out " + h.string()).code == 0);
    std::ifstream in(h);
    int count = 0;
    std::string line;
    while (std::getline(in, line)) count += !line.empty();
    CHECK(count >= 10000);
    const auto side = nlohmann::json::parse(slurp(h.string() + ".json"));
    CHECK(side["zeta"].get<double>() == Catch::Approx(0.777778).margin(1e-6));
    CHECK(run("simulate --figure 2").code == 2);
}
