#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int status = -1;
    fs::path out;
};

fs::path scratch(const std::string &name) {
    fs::path p = fs::temp_directory_path() / ("fpflux_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliRun fpflux(const std::string &args, const fs::path &out, const std::string &config = "") {
    std::string cmd = std::string(FPFLUX_CLI_PATH) + " " + args + " --out " + out.string();
    if (!config.empty()) {
        const fs::path cfg = out.string() + ".cfg";
        std::ofstream(cfg) << config;
        cmd += " --config " + cfg.string();
    }
    cmd += " >" + out.string() + ".log 2>&1";
    const int rc = std::system(cmd.c_str());
    return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, out};
}

}  // namespace

TEST(Cli, FluxRowHasValueStderrAndExact) {
    fs::path d = scratch("flux");
    CliRun r = fpflux("flux --seed 3", d / "o", "[basis]\nN = 64\n[flux]\nshots = 100000\n");
    ASSERT_EQ(r.status, 0) << slurp(d / "o.log");
    std::string csv = slurp(d / "o" / "flux.csv");
    EXPECT_EQ(csv.rfind("t,value_re,value_im,stderr,", 0), 0u);
    std::istringstream in(csv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    double t, v, vi, se, sei, ex;
    ASSERT_EQ(std::sscanf(row.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &t, &v, &vi, &se, &sei, &ex), 6);
    EXPECT_NEAR(v, ex, 3 * se + 1e-3);
    auto manifest = nlohmann::json::parse(slurp(d / "o" / "flux.manifest.json"));
    EXPECT_EQ(manifest["seed"], 3);
    EXPECT_EQ(manifest["resolved_config"]["basis"]["N"], 64);
    EXPECT_EQ(manifest["resolved_config"]["flux"]["shots"], 100000);
}

TEST(Cli, SameSeedGivesIdenticalBytes) {
    fs::path d = scratch("determinism");
    const std::string cfg = "[run]\nseed = 11\n[basis]\nN = 32\n[flux-scan]\ntimes = 0.5, 1\nshots = 5000\n";
    // Both runs read the same config file so the manifests can match byte for byte.
    const fs::path shared = d / "shared.cfg";
    std::ofstream(shared) << cfg;
    ASSERT_EQ(fpflux("flux-scan --config " + shared.string(), d / "a").status, 0);
    ASSERT_EQ(fpflux("flux-scan --config " + shared.string(), d / "b").status, 0);
    for (const char *f : {"flux-scan.csv", "flux-scan-rates.csv", "flux-scan.json", "flux-scan.manifest.json"})
        EXPECT_EQ(slurp(d / "a" / f), slurp(d / "b" / f)) << f;
    ASSERT_EQ(fpflux("flux-scan --seed 12", d / "c", cfg).status, 0);
    EXPECT_NE(slurp(d / "a" / "flux-scan.csv"), slurp(d / "c" / "flux-scan.csv"));
}

TEST(Cli, ThreadCountDoesNotChangeLangevinOutput) {
    fs::path d = scratch("threads");
    const std::string cfg = "[langevin]\ntrajectories = 3000\ndt = 0.01\nT = 0.5\n";
    ASSERT_EQ(fpflux("langevin --threads 1", d / "a", cfg).status, 0);
    ASSERT_EQ(fpflux("langevin --threads 3", d / "b", cfg).status, 0);
    EXPECT_EQ(slurp(d / "a" / "langevin.csv"), slurp(d / "b" / "langevin.csv"));
}

TEST(Cli, ResourcesAllOnes) {
    fs::path d = scratch("resources");
    ASSERT_EQ(fpflux("resources", d / "o").status, 0);
    auto j = nlohmann::json::parse(slurp(d / "o" / "resources.json"));
    EXPECT_DOUBLE_EQ(j["alpha_A"].get<double>(), 2.0);
    EXPECT_NEAR(j["stateprep_cost"].get<double>(), std::sqrt(0.5) * 2.0, 1e-15);
    EXPECT_EQ(j["toffoli_grad_v"], 3);
    for (auto &[k, v] : j["constants"].items()) EXPECT_DOUBLE_EQ(v.get<double>(), 1.0) << k;

    const std::string zero = "[constants]\nc_log = 0\nc_d = 0\n[resources]\nn = 6\nd = 3\n";
    ASSERT_EQ(fpflux("resources", d / "z", zero).status, 0);
    auto z = nlohmann::json::parse(slurp(d / "z" / "resources.json"));
    EXPECT_EQ(z["toffoli_be_r"], 316);
}

TEST(Cli, ErrorsMapToExitCodes) {
    fs::path d = scratch("errors");
    EXPECT_EQ(fpflux("flux", d / "a", "[flux]\nbogus = 1\n").status, 4);
    EXPECT_EQ(fpflux("flux", d / "b", "[flux]\nbeta = five\n").status, 4);
    EXPECT_EQ(fpflux("no-such-command", d / "c").status, 2);
    EXPECT_EQ(fpflux("discretize", d / "e", "[basis]\nN = 64\nL = 1\n[potential]\ndim = 3\n").status, 5);
    EXPECT_NE(slurp(d / "a.log").find(":2"), std::string::npos) << slurp(d / "a.log");
}

TEST(Cli, VerifyAllSubset) {
    fs::path d = scratch("verify");
    CliRun r = fpflux("verify-all", d / "o", "[verify-all]\nonly = 1, 6\n");
    EXPECT_EQ(r.status, 0) << slurp(d / "o.log");
    std::string log = slurp(d / "o.log");
    EXPECT_NE(log.find("PASS criterion 1"), std::string::npos);
    EXPECT_NE(log.find("PASS criterion 6"), std::string::npos);
    EXPECT_EQ(slurp(d / "o" / "verify-all.csv"), "id,name,passed\r\n1,OU spectrum,1\r\n6,Overlap circuit identity,1\r\n");
}
