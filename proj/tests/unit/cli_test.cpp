#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "pairorth/bounds.hpp"
#include "pairorth/cli/commands.hpp"
#include "pairorth/cli/config.hpp"
#include "pairorth/matrix_io.hpp"
#include "pairorth/text_output.hpp"

namespace pairorth::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> read_summary(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return kv;
}

// Fresh scratch directory per test.
class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("pairorth_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

TEST(Config, ParseKeyValues) {
    const auto kv = parse_key_values("# comment\n gen = near_singular \n\nn=8 # trailing\nseed = 42\n");
    EXPECT_EQ(kv.at("gen"), "near_singular");
    EXPECT_EQ(kv.at("n"), "8");
    EXPECT_EQ(kv.at("seed"), "42");
    EXPECT_EQ(kv.size(), 3u);
}

TEST(Config, ErrorsNameTheProblem) {
    try {
        parse_key_values("n = 3\nbogus = 1\n");
        FAIL();
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
    }
    try {
        config_from_key_values({{"steps", "many"}});
        FAIL();
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("'steps'"), std::string::npos);
    }
    EXPECT_THROW(parse_key_values("no equals sign\n"), UsageError);
}

TEST(Config, Validate) {
    ExperimentConfig c;
    EXPECT_NO_THROW(validate(c));
    c.steps = 0;
    EXPECT_THROW(validate(c), UsageError);
    c = {};
    c.replicates = 0;
    EXPECT_THROW(validate(c), UsageError);
}

TEST(Config, RoundTrip) {
    const auto c = config_from_key_values(parse_key_values(
        "gen = prescribed_spectrum\nn = 6\nfield = complex\nsigma = 1, 0.5, 0.25, 0.125, 0.0625, 0.03125\n"
        "sampler = greedy\nsteps = 123\nreplicates = 4\nstride = 7\nseed = 99\nout = results\n"
        "emit = trajectory,summary\ninterleave = 2:3\nstop_error = 1e-7\neta = 0.001\ntheta = 0.3\n"
        "kappa = 50\ninput = m.txt\n"));
    const auto again = config_from_key_values(parse_key_values(to_text(c)));
    EXPECT_EQ(c, again);
    EXPECT_EQ(c.generator.sigma.size(), 6u);
    EXPECT_EQ(c.interleave, (Interleave{2, 3}));
    EXPECT_EQ(*c.seed, 99u);
}

TEST(Config, ResolvedGeneratorDerivesSeedAndSpectrum) {
    auto c = config_from_key_values({{"gen", "spectrum"}, {"n", "4"}, {"kappa", "100"}, {"seed", "5"}});
    const auto g = resolved_generator(c);
    EXPECT_EQ(g.sigma, geometric_spectrum(4, 100));
    EXPECT_EQ(g.seed, derive_seed(5, Stream::generator, 0));
}

TEST_F(CliTest, BoundsCommand) {
    auto r = cli({"bounds", "f", "--x", "0", "--n", "5"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, "0\n");

    r = cli({"bounds", "theorem7", "--phi0", "0.2", "--n", "2", "--t", "10"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out.substr(0, 7), "0.13154");

    r = cli({"bounds", "theorem1-steps", "--phi0", "5", "--n", "4", "--eps", "0.01", "--delta", "0.01"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, "12288000000\n");
    EXPECT_NE(r.err.find("warning"), std::string::npos);

    EXPECT_EQ(cli({"bounds", "nonsense", "--n", "3"}).code, kExitUsage);
    EXPECT_EQ(cli({"bounds", "f", "--n", "3"}).code, kExitUsage);
    EXPECT_EQ(cli({"bounds", "f", "--x", "abc", "--n", "3"}).code, kExitUsage);
}

TEST_F(CliTest, BoundsSeventeenDigits) {
    const auto r = cli({"bounds", "c-n", "--n", "3"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(parse_double(r.out.substr(0, r.out.size() - 1)), BoundParams::for_dimension(3).c_n);
}

TEST_F(CliTest, RunAngleOneStep) {
    const auto r = cli({"run", "--gen", "two_by_two_angle", "--theta", "1.0471975511965976", "--steps", "1",
                        "--replicates", "1", "--seed", "1", "--out", path("run")});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    const auto summary = read_summary(slurp(path("run/summary.txt")));
    EXPECT_NEAR(parse_double(summary.at("final_mean_phi")), 0.0, 1e-10);
    EXPECT_NEAR(parse_double(summary.at("phi0")), 0.287682, 1e-6);
    EXPECT_TRUE(fs::exists(path("run/ensemble.csv")));
}

TEST_F(CliTest, RunHaarAllZero) {
    const auto r = cli({"run", "--gen", "haar", "--n", "5", "--steps", "50", "--replicates", "3", "--stride", "10",
                        "--seed", "4", "--out", path("haar"), "--emit", "ensemble,trajectory"});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    const std::string csv = slurp(path("haar/ensemble.csv"));
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        std::vector<double> cols;
        std::istringstream fields(line);
        std::string f;
        while (std::getline(fields, f, ',')) cols.push_back(parse_double(f));
        EXPECT_LT(cols[1], 1e-10);  // mean_phi
        EXPECT_EQ(cols[6], 0.0);    // exceed_flag
        ++rows;
    }
    EXPECT_EQ(rows, 6);
    EXPECT_TRUE(fs::exists(path("haar/trajectory_r0002.csv")));
    EXPECT_FALSE(fs::exists(path("haar/summary.txt")));
}

TEST_F(CliTest, RunFromConfigWithOverride) {
    std::ofstream(path("exp.cfg")) << "gen = gaussian\nn = 4\nsteps = 30\nreplicates = 2\nstride = 10\nseed = 3\n"
                                   << "out = " << path("cfg_out") << "\n";
    auto r = cli({"run", "--config", path("exp.cfg"), "--steps", "40"});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    const auto summary = read_summary(slurp(path("cfg_out/summary.txt")));
    EXPECT_EQ(summary.at("steps"), "40");
    EXPECT_EQ(summary.at("n"), "4");
}

TEST_F(CliTest, RunNeedsSeed) {
    const auto r = cli({"run", "--gen", "haar", "--n", "3", "--out", path("x")});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("seed"), std::string::npos);
    EXPECT_FALSE(fs::exists(path("x/ensemble.csv")));
}

TEST_F(CliTest, RunBadFieldIsNamed) {
    const auto r = cli({"run", "--steps", "zero", "--seed", "1"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("'steps'"), std::string::npos);
}

TEST_F(CliTest, RunIsReproducible) {
    const std::vector<std::string> base{"run", "--gen", "near_singular", "--n", "5", "--eta", "1e-3", "--steps",
                                        "300", "--replicates", "4", "--stride", "20", "--seed", "8", "--emit",
                                        "ensemble,trajectory,summary"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", path("a")});
    b.insert(b.end(), {"--out", path("b")});
    ASSERT_EQ(cli(a).code, kExitOk);
    ASSERT_EQ(cli(b).code, kExitOk);
    for (const char* f : {"ensemble.csv", "trajectory_r0000.csv", "trajectory_r0003.csv", "summary.txt"}) {
        EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
    }
}

TEST_F(CliTest, RunFromMatrixFile) {
    ASSERT_EQ(cli({"gen", "--kind", "gaussian", "--n", "3", "--seed", "2", "--out", path("m.txt")}).code, kExitOk);
    const auto r = cli({"run", "--input", path("m.txt"), "--steps", "20", "--seed", "1", "--out", path("f")});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("generator = file"), std::string::npos);
}

TEST_F(CliTest, GenRoundTrip) {
    const auto r = cli({"gen", "--kind", "haar", "--n", "4", "--seed", "3", "--out", path("m.txt")});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    GeneratorSpec spec;
    spec.kind = GeneratorKind::haar_orthonormal;
    spec.n = 4;
    spec.seed = derive_seed(3, Stream::generator, 0);
    EXPECT_EQ(load_matrix(path("m.txt")), generate_any(spec));
    // identical reruns
    ASSERT_EQ(cli({"gen", "--kind", "haar", "--n", "4", "--seed", "3", "--out", path("m2.txt")}).code, kExitOk);
    EXPECT_EQ(slurp(path("m.txt")), slurp(path("m2.txt")));
}

TEST_F(CliTest, GenComplexAndAngle) {
    EXPECT_EQ(cli({"gen", "--kind", "gaussian", "--field", "complex", "--n", "3", "--seed", "1", "--out",
                   path("c.txt")}).code,
              kExitOk);
    EXPECT_EQ(std::get<ComplexMatrix>(load_matrix(path("c.txt"))).dim(), 3u);
    EXPECT_EQ(cli({"gen", "--kind", "angle", "--theta", "0.5", "--out", path("a.txt")}).code, kExitOk);
    EXPECT_EQ(cli({"gen", "--kind", "gaussian", "--n", "3", "--out", path("noseed.txt")}).code, kExitUsage);
}

TEST_F(CliTest, VerifyPassingSuite) {
    const auto r = cli({"verify", "eq9", "--trials", "50", "--seed", "1", "--out", path("v")});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("50/50"), std::string::npos);
}

TEST_F(CliTest, VerifyFailureDumpsMatrix) {
    const auto r = cli({"verify", "lemma3", "--trials", "500", "--seed", "1", "--out", path("v")});
    EXPECT_EQ(r.code, kExitViolation);
    EXPECT_NE(r.err.find("instance seed"), std::string::npos);
    const auto dumped = load_matrix(path("v/verify-lemma3-failure.txt"));
    EXPECT_GE(dim(dumped), 2u);
}

TEST_F(CliTest, VerifyUsage) {
    EXPECT_EQ(cli({"verify", "nosuch", "--seed", "1"}).code, kExitUsage);
    EXPECT_EQ(cli({"verify", "eq9"}).code, kExitUsage);
}

TEST_F(CliTest, Cosolve) {
    auto r = cli({"cosolve", "--interleave", "0:1", "--gen", "spectrum", "--kappa", "100", "--n", "5", "--steps",
                  "200", "--seed", "2", "--out", path("plain")});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    const std::string plain = slurp(path("plain/cosolve.csv"));
    EXPECT_EQ(plain.find(",orth,"), std::string::npos);
    EXPECT_NE(plain.find(",kacz,"), std::string::npos);

    r = cli({"cosolve", "--interleave", "1:1", "--gen", "spectrum", "--kappa", "1000", "--n", "8", "--steps", "400",
             "--seed", "2", "--out", path("mixed")});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    const std::string mixed = slurp(path("mixed/cosolve.csv"));
    EXPECT_EQ(mixed.substr(0, mixed.find('\n')), "step,kind,err_norm,phi");
    EXPECT_NE(mixed.find("\n1,orth,"), std::string::npos);
    EXPECT_NE(mixed.find("\n2,kacz,"), std::string::npos);
}

TEST_F(CliTest, CosolveNeedsSeedAndValidInterleave) {
    EXPECT_EQ(cli({"cosolve", "--n", "3", "--out", path("c")}).code, kExitUsage);
    EXPECT_EQ(cli({"cosolve", "--interleave", "0:0", "--seed", "1", "--out", path("c")}).code, kExitUsage);
}

TEST_F(CliTest, HelpAndUnknown) {
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
}

}  // namespace
}  // namespace pairorth::cli
