// CLI contract tests: invoke the built binary and inspect artifacts.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rmt/ensembles.hpp"
#include "rmt/io.hpp"

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(RMT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp(const std::string& name) { return "/tmp/rmt_cli_test_" + name; }

} // namespace

TEST_CASE("sample: determinism and shape") {
    std::string out1 = tmp("s1.csv"), out2 = tmp("s2.csv");
    CHECK(run("sample --ensemble gue -n 64 --sigma2 1 --seed 7 -o " + out1) == 0);
    CHECK(run("sample --ensemble gue -n 64 --sigma2 1 --seed 7 -o " + out2) == 0);
    std::string a = slurp(out1);
    CHECK(a == slurp(out2)); // byte-identical
    CHECK(a.size() > 0);
    rmt::Spectrum s = rmt::read_spectrum_csv(out1);
    CHECK(s.n() == 64);
    // a different seed changes the bytes
    CHECK(run("sample --ensemble gue -n 64 --sigma2 1 --seed 8 -o " + out2) == 0);
    CHECK(a != slurp(out2));
}

TEST_CASE("usage errors exit with 64") {
    CHECK(run("sample --ensemble gue -n 64 -o /tmp/x.csv") == 64);      // missing seed
    CHECK(run("sample --ensemble nope -n 4 --seed 1 -o /tmp/x.csv") == 64);
    CHECK(run("law --law mp --grid bogus -o /tmp/x.csv") == 64);
    CHECK(run("definitely-not-a-subcommand") == 64);
    CHECK(run("pca-test --data /nonexistent.csv --alpha 0.01 -o /tmp/x.json") == 64);
}

TEST_CASE("law tables evaluate pdf and cdf on the grid") {
    std::string out = tmp("law.csv");
    CHECK(run("law --law mp --sigma2 1 --gamma 2 --grid 0:3.5:0.01 -o " + out) == 0);
    Eigen::MatrixXd m = rmt::read_matrix_csv(out);
    CHECK(m.cols() == 3);
    // last cdf value ~ 1 beyond the upper edge
    CHECK(m(m.rows() - 1, 2) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("tw table: monotone, right end near 1, JSON header written") {
    std::string out = tmp("tw.csv");
    CHECK(run("tw --beta 2 --grid -8:4:0.05 --method painleve -o " + out) == 0);
    Eigen::MatrixXd m = rmt::read_matrix_csv(out);
    for (int i = 1; i < m.rows(); ++i) CHECK(m(i, 1) >= m(i - 1, 1));
    CHECK(m(m.rows() - 1, 1) == doctest::Approx(1.0).epsilon(1e-6));
    nlohmann::json header = nlohmann::json::parse(slurp(out + ".json"));
    CHECK(header["beta"] == 2);
    CHECK(header["method"] == "painleve");
}

TEST_CASE("gap probabilities through the CLI") {
    std::string out = tmp("gap.json");
    CHECK(run("gap -n 1 --a 0 -o " + out) == 0);
    nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(double(j["payload"]["gap_probability"]) == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("kernel tabulation is symmetric with unit sine diagonal") {
    std::string out = tmp("kernel.csv");
    CHECK(run("kernel --kind sine --grid -1:1:0.5 -o " + out) == 0);
    Eigen::MatrixXd m = rmt::read_matrix_csv(out);
    CHECK(m.rows() == 5);
    CHECK(m(2, 2) == doctest::Approx(1.0));
    CHECK((m - m.transpose()).norm() < 1e-12);
}

TEST_CASE("pca-test on a null fixture reports no significant components") {
    // fixture: seeded Gaussian data, n=1000 observations, p=500 variables
    std::string data = tmp("null_data.csv");
    {
        rmt::RngStream rng(4242, 0);
        std::ofstream out(data);
        for (int i = 0; i < 1000; ++i) {
            for (int j = 0; j < 500; ++j) out << (j ? "," : "") << rng.next_normal();
            out << "\n";
        }
    }
    std::string rep = tmp("pca.json");
    CHECK(run("pca-test --data " + data + " --alpha 0.01 --beta 1 -o " + rep) == 0);
    nlohmann::json j = nlohmann::json::parse(slurp(rep));
    CHECK(int(j["payload"]["k_significant"]) == 0);
    CHECK(j["payload"]["mp_fit"]["sigma2_hat"] > 0.8);
    CHECK(j["payload"]["mp_fit"]["sigma2_hat"] < 1.2);
}

TEST_CASE("denoise preserves the trace") {
    std::string cov = tmp("cov.csv"), cleaned = tmp("cov_clean.csv");
    {
        rmt::EnsembleSpec spec;
        spec.kind = rmt::EnsembleKind::WishartReal;
        spec.n = 100;
        spec.p = 50;
        spec.seed = 51;
        rmt::write_matrix_csv(cov, rmt::sample_wishart_real(spec));
    }
    CHECK(run("denoise --input " + cov + " --gamma 2 -o " + cleaned) == 0);
    Eigen::MatrixXd a = rmt::read_matrix_csv(cov);
    Eigen::MatrixXd b = rmt::read_matrix_csv(cleaned);
    CHECK(a.trace() == doctest::Approx(b.trace()).epsilon(1e-9));
}

TEST_CASE("frontier emits the risk parabola") {
    std::string cov = tmp("fcov.csv"), gains = tmp("gains.csv"), out = tmp("frontier.csv");
    rmt::write_matrix_csv(cov, Eigen::MatrixXd(Eigen::MatrixXd::Identity(2, 2)));
    {
        std::ofstream g(gains);
        g << "1\n1\n";
    }
    CHECK(run("frontier --cov " + cov + " --gains " + gains + " --excess-grid -1:1:0.5 -o " +
              out) == 0);
    Eigen::MatrixXd m = rmt::read_matrix_csv(out);
    CHECK(m.rows() == 5);
    CHECK(m(0, 1) == doctest::Approx(0.5).epsilon(1e-12));  // excess -1 on identity
    CHECK(m(2, 1) == doctest::Approx(0.0));
    CHECK(m(4, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("freeconv reports the spike atom") {
    std::string out = tmp("freeconv.csv");
    std::string cmd = std::string(RMT_CLI_PATH) +
                      " freeconv --sigma2 1 --eps 0.02 --lambda 2 --grid -3:3.2:0.01 -o " + out +
                      " > " + tmp("freeconv.json") + " 2>/dev/null";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    nlohmann::json j = nlohmann::json::parse(slurp(tmp("freeconv.json")));
    REQUIRE(j["payload"]["atoms"].size() == 1);
    CHECK(double(j["payload"]["atoms"][0]["location"]) == doctest::Approx(2.5).epsilon(0.05));
    CHECK(double(j["payload"]["atoms"][0]["mass"]) == doctest::Approx(0.02).epsilon(0.25));
}
