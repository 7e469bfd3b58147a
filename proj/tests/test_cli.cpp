#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "bimodal/cli.hpp"

namespace fs = std::filesystem;
using namespace bimodal;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "bimodal");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t data_rows(const fs::path& path) {
    std::ifstream in(path);
    std::string line;
    std::size_t rows = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        ++rows;
    }
    return rows;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("bimodal_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
    fs::path dir;
};

}  // namespace

TEST(CliParse, Defaults) {
    const char* argv[] = {"bimodal", "cooling-ratio"};
    std::ostringstream out;
    const auto cfg = cli::parse(2, argv, out);
    ASSERT_TRUE(cfg.has_value());
    EXPECT_EQ(cfg->command, "cooling-ratio");
    EXPECT_EQ(cfg->params.omega, 0.1);
    EXPECT_EQ(cfg->params.gamma1, 0.01);
    EXPECT_EQ(cfg->params.g1, cplx(0.3, 0.0));
    EXPECT_EQ(cfg->params.g2, cplx(0.5, 0.0));
    EXPECT_EQ(cfg->params.kappa2, 1.0);
    EXPECT_FALSE(cfg->kappa2_hz.has_value());
}

TEST(CliParse, SingleThermalOccupancyCopies) {
    const char* argv[] = {"bimodal", "spectrum", "--nbar1", "300"};
    std::ostringstream out;
    const auto cfg = cli::parse(4, argv, out);
    ASSERT_TRUE(cfg.has_value());
    EXPECT_EQ(cfg->params.nbar1, 300.0);
    EXPECT_EQ(cfg->params.nbar2, 300.0);
}

TEST(CliParse, HelpReturnsNothing) {
    const char* argv[] = {"bimodal", "--help"};
    std::ostringstream out;
    EXPECT_FALSE(cli::parse(2, argv, out).has_value());
    EXPECT_NE(out.str().find("sweep"), std::string::npos);
}

TEST(CliParse, Rejections) {
    std::ostringstream out;
    const char* unknown[] = {"bimodal", "spectrum", "--bogus", "1"};
    EXPECT_THROW(cli::parse(4, unknown, out), ValidationError);
    const char* none[] = {"bimodal"};
    EXPECT_THROW(cli::parse(1, none, out), ValidationError);
    const char* axis[] = {"bimodal", "sweep", "--axis", "kappa2"};
    EXPECT_THROW(cli::parse(4, axis, out), ValidationError);
    const char* negative[] = {"bimodal", "spectrum", "--gamma1", "-1"};
    EXPECT_THROW(cli::parse(4, negative, out), ValidationError);
}

TEST_F(CliTest, ConfigFileWithOverride) {
    std::ofstream(path("run.cfg")) << "# test\ncommand=cooling-ratio\ng1=0\n--g2=0\nomega=0.2\n";
    const char* argv[] = {"bimodal", "--config", nullptr, "--omega", "0.3"};
    const std::string cfg_path = path("run.cfg");
    argv[2] = cfg_path.c_str();
    std::ostringstream out;
    const auto cfg = cli::parse(5, argv, out);
    ASSERT_TRUE(cfg.has_value());
    EXPECT_EQ(cfg->command, "cooling-ratio");
    EXPECT_EQ(cfg->params.g1, cplx(0.0, 0.0));
    EXPECT_EQ(cfg->params.omega, 0.3);
    EXPECT_EQ(cfg->config_path, cfg_path);
}

TEST_F(CliTest, EffectiveConfigRoundTrip) {
    const auto first = invoke({"spectrum", "--g1", "0.25", "--g2-im", "0.1", "--delta", "-0.05", "--points", "11",
                               "-o", path("a.csv")});
    ASSERT_EQ(first.code, 0) << first.err;
    const auto second = invoke({"--config", path("a.csv.meta.json"), "-o", path("b.csv")});
    ASSERT_EQ(second.code, 0) << second.err;
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    EXPECT_EQ(slurp(path("a.csv.meta.json")), slurp(path("b.csv.meta.json")));
}

TEST_F(CliTest, RefusesToOverwriteItsConfig) {
    const auto first = invoke({"cooling-ratio", "-o", path("r.csv")});
    ASSERT_EQ(first.code, 0);
    const std::string before = slurp(path("r.csv.meta.json"));
    const auto again = invoke({"--config", path("r.csv.meta.json"), "-o", path("r.csv.meta.json")});
    EXPECT_EQ(again.code, 1);
    EXPECT_NE(again.err.find("refusing to overwrite"), std::string::npos);
    EXPECT_EQ(slurp(path("r.csv.meta.json")), before);
}

TEST_F(CliTest, CoolingRatioUncoupledIsOne) {
    const auto r = invoke({"cooling-ratio", "--g1", "0", "--g2", "0", "-o", path("c.csv")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("R=1.000"), std::string::npos);
    EXPECT_EQ(data_rows(path("c.csv")), 1u);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(invoke({"spectrum", "--points", "1", "-o", path("x.csv")}).code, 1);
    EXPECT_EQ(invoke({"cooling-ratio", "--nbar1", "0", "-o", path("x.csv")}).code, 1);
    const auto undamped = invoke({"spectrum", "--gamma1", "0", "--g1", "0", "--omega", "0", "--points", "3", "-o", path("x.csv")});
    EXPECT_EQ(undamped.code, 2);
    EXPECT_NE(undamped.err.find("numerical failure"), std::string::npos);
}

TEST_F(CliTest, HeadersAndSidecar) {
    const auto r = invoke({"spectrum", "--kappa2-hz", "1e6", "--points", "5", "-o", path("s.csv")});
    ASSERT_EQ(r.code, 0);
    const std::string csv = slurp(path("s.csv"));
    EXPECT_EQ(csv.rfind("# bimodal " + cli::version() + " spectrum", 0), 0u);
    EXPECT_NE(csv.find("kappa2_hz"), std::string::npos);
    EXPECT_NE(csv.find("omega_over_kappa2,S_b1_per_kappa2"), std::string::npos);
    EXPECT_EQ(data_rows(path("s.csv")), 5u);
    const std::string meta = slurp(path("s.csv.meta.json"));
    EXPECT_NE(meta.find("\"kappa2_hz\": 1000000"), std::string::npos);
    EXPECT_EQ(meta.find(path("s.csv")), std::string::npos);
}

TEST_F(CliTest, SweepRows) {
    const auto r = invoke({"sweep", "--axis", "g2", "--from", "0", "--to", "0.5", "--count", "6", "-o",
                           path("sw.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(data_rows(path("sw.csv")), 6u);
    const auto log = invoke({"sweep", "--axis", "gamma1", "--from", "0.001", "--to", "0.1", "--count", "3",
                             "--scale", "log", "--metric", "occupancy:2", "-o", path("lg.csv")});
    EXPECT_EQ(log.code, 0) << log.err;
    EXPECT_EQ(invoke({"sweep", "--axis", "gamma1", "--from", "0", "--to", "0.1", "--scale", "log", "-o",
                      path("bad.csv")})
                  .code,
              1);
}

TEST_F(CliTest, OtherCommands) {
    const auto col = invoke({"collective", "--omega", "0", "--gamma1", "0.01", "--gamma2", "0.01", "--g1", "0.3",
                             "--g2", "0.3", "-o", path("col.csv")});
    EXPECT_EQ(col.code, 0) << col.err;
    EXPECT_NE(col.out.find("labeling="), std::string::npos);

    const auto tw = invoke({"three-wave", "--t-end", "1", "--dt", "0.01", "--stride", "10", "-o", path("tw.csv")});
    EXPECT_EQ(tw.code, 0) << tw.err;
    EXPECT_EQ(data_rows(path("tw.csv")), 11u);

    const auto as = invoke({"antistokes", "--points", "7", "-o", path("as.csv")});
    EXPECT_EQ(as.code, 0) << as.err;

    const auto sim = invoke({"simulate", "--n-traj", "4", "--dt", "1", "--seed", "3", "-o", path("sim.json")});
    EXPECT_EQ(sim.code, 0) << sim.err;
    EXPECT_NE(sim.out.find("seed=3"), std::string::npos);
}

TEST_F(CliTest, CouplingFromFiles) {
    // Matched plane waves on a periodic 8^3 box: k2 = k1 + q.
    auto write = [&](const std::string& name, double k, int comp, bool longitudinal) {
        std::ofstream f(path(name));
        f.precision(17);
        f << "8 8 8\n";
        const double len = 2.0 * M_PI;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                for (int l = 0; l < 8; ++l) {
                    const double z = len * l / 8.0;
                    const double re = std::cos(k * z), im = std::sin(k * z);
                    double v[6] = {0, 0, 0, 0, 0, 0};
                    const int c = longitudinal ? 2 : comp;
                    v[2 * c] = re;
                    v[2 * c + 1] = im;
                    f << len * i / 8.0 << ' ' << len * j / 8.0 << ' ' << z;
                    for (double x : v) f << ' ' << x;
                    f << '\n';
                }
    };
    write("phi1.dat", 1.0, 0, false);
    write("phi2.dat", 2.0, 0, false);
    write("psi.dat", 1.0, 2, true);
    const auto r = invoke({"coupling", "--phi1", path("phi1.dat"), "--phi2", path("phi2.dat"), "--psi",
                           path("psi.dat"), "--periodic", "xyz", "--scheme", "spectral", "-o", path("cp.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(data_rows(path("cp.csv")), 1u);
    const auto clash = invoke({"coupling", "--phi1", path("phi1.dat"), "--phi2", path("phi2.dat"), "--psi",
                               path("psi.dat"), "-o", path("psi.dat")});
    EXPECT_EQ(clash.code, 1);
}
