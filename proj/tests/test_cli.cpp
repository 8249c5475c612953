#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const char* bin = std::getenv("CVQK_BIN");
    EXPECT_NE(bin, nullptr) << "CVQK_BIN not set";
    const std::string cmd = std::string(bin) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    EXPECT_NE(pipe, nullptr);
    std::string out;
    std::array<char, 256> buf{};
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

double first_number(const std::string& s) { return std::stod(s); }

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST(CliKernel, DisplacedFockTableZero) {
    const auto r = run("kernel --family displaced-fock --n 1 --a 0,0 --b 1,0");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NEAR(first_number(r.out), 0.0, 1e-15);
}

TEST(CliKernel, SelfOverlapIsOne) {
    const auto r = run("kernel --family displaced-fock --n 0 --a 0,0 --b 0,0");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_DOUBLE_EQ(first_number(r.out), 1.0);
}

TEST(CliKernel, QuditOrthogonal) {
    const auto r = run("kernel --family qudit --amps1 1,0 --amps2 0,1");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_DOUBLE_EQ(first_number(r.out), 0.0);
}

TEST(CliKernel, InnerFlagPrintsComponents) {
    const auto r = run("kernel --family displaced-fock --n 0 --a 0,0 --b 1,0 --inner");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("inner:"), std::string::npos);
}

TEST(CliKernel, ParseErrorExitsTwo) {
    const auto r = run("kernel --family displaced-fock --n 1 --a not-a-point --b 1,0");
    EXPECT_EQ(r.exit_code, 2);
}

TEST(CliKernel, DomainErrorExitsThree) {
    // odd cat truncated to rank 0 is degenerate
    const auto r = run("kernel --family cat-truncation --parity odd --n 0 --a 1,0 --b 0.5,0");
    EXPECT_EQ(r.exit_code, 3);
}

TEST(CliKernel, BudgetErrorExitsFour) {
    const auto r =
        run("kernel --family cat-truncation --parity even --n 8 --a 1,0 --b 0.5,0 "
            "--term-budget 3");
    EXPECT_EQ(r.exit_code, 4);
}

TEST(CliGramAndGrid, EndToEndArtifacts) {
    // tiny dataset -> gram -> experiment -> grid
    {
        std::ofstream ds("cli_ds.csv");
        ds << "x1,x2,label\n0,0,0\n1,0,1\n0,1,1\n-1,0,0\n";
    }
    const auto g = run("gram --dataset cli_ds.csv --family displaced-fock --n 3 --out "
                       "cli_gram.csv");
    EXPECT_EQ(g.exit_code, 0);
    const std::string gram_text = slurp("cli_gram.csv");
    EXPECT_FALSE(gram_text.empty());
    // 4x4 matrix: four lines, unit diagonal first entry
    EXPECT_EQ(std::stod(gram_text), 1.0);

    const auto e = run("experiment --variant 1 --n 1 --seed 42 --res 8 --out cli_report.json");
    EXPECT_EQ(e.exit_code, 0);
    EXPECT_NE(e.out.find("test_acc="), std::string::npos);
    const std::string report = slurp("cli_report.json");
    EXPECT_NE(report.find("\"test_acc\""), std::string::npos);
    EXPECT_NE(report.find("\"wall_time_ms\": null"), std::string::npos);

    const auto gr = run("grid --model cli_report.json.model.json --res 4 --out cli_grid.csv");
    EXPECT_EQ(gr.exit_code, 0);
    std::ifstream is("cli_grid.csv");
    std::string line;
    int rows = -1; // header excluded
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 16);

    const auto bad = run("grid --model nonexistent.json --res 4 --out cli_grid2.csv");
    EXPECT_EQ(bad.exit_code, 5);

    for (const char* f : {"cli_ds.csv", "cli_gram.csv", "cli_report.json",
                          "cli_report.json.model.json", "cli_report.json.grid.csv",
                          "cli_grid.csv"})
        std::remove(f);
}

TEST(CliExperiment, DeterministicBytes) {
    const auto r1 = run("experiment --variant 1 --n 1 --seed 47 --res 6 --out cli_rep_a.json");
    const auto r2 = run("experiment --variant 1 --n 1 --seed 47 --res 6 --out cli_rep_b.json");
    EXPECT_EQ(r1.exit_code, 0);
    EXPECT_EQ(r2.exit_code, 0);
    EXPECT_EQ(r1.out, r2.out);
    std::string a = slurp("cli_rep_a.json"), b = slurp("cli_rep_b.json");
    // grid paths differ by construction; mask them before comparing
    const auto mask = [](std::string s, const std::string& what) {
        const auto pos = s.find(what);
        if (pos != std::string::npos) s.erase(pos, what.size());
        return s;
    };
    a = mask(a, "cli_rep_a.json.grid.csv");
    b = mask(b, "cli_rep_b.json.grid.csv");
    EXPECT_EQ(a, b);
    EXPECT_EQ(slurp("cli_rep_a.json.grid.csv"), slurp("cli_rep_b.json.grid.csv"));
    for (const char* f : {"cli_rep_a.json", "cli_rep_b.json", "cli_rep_a.json.grid.csv",
                          "cli_rep_b.json.grid.csv", "cli_rep_a.json.model.json",
                          "cli_rep_b.json.model.json"})
        std::remove(f);
}

TEST(CliConfig, FileDefaultsAndFlagPrecedence) {
    {
        std::ofstream cfg("cli_cfg.json");
        cfg << "{\"n\": 1, \"family\": \"displaced-fock\"}\n";
    }
    // config supplies n=1: kernel at s^2=1 is 0
    const auto r1 = run("kernel --config cli_cfg.json --a 0,0 --b 1,0");
    EXPECT_EQ(r1.exit_code, 0);
    EXPECT_NEAR(first_number(r1.out), 0.0, 1e-15);
    // explicit flag overrides config: n=0 gives e^{-1}
    const auto r2 = run("kernel --config cli_cfg.json --n 0 --a 0,0 --b 1,0");
    EXPECT_NEAR(first_number(r2.out), std::exp(-1.0), 1e-12);
    // unknown fields rejected
    {
        std::ofstream cfg("cli_cfg.json");
        cfg << "{\"nn\": 1}\n";
    }
    const auto r3 = run("kernel --config cli_cfg.json --a 0,0 --b 1,0");
    EXPECT_EQ(r3.exit_code, 2);
    std::remove("cli_cfg.json");
}

TEST(CliVerify, QuickSuiteSucceeds) {
    const auto r = run("verify --suite closed-form --quick --json cli_verify.json");
    EXPECT_EQ(r.exit_code, 0) << r.out;
    EXPECT_NE(r.out.find("[PASS]"), std::string::npos);
    const std::string j = slurp("cli_verify.json");
    EXPECT_NE(j.find("\"suite\": \"closed-form\""), std::string::npos);
    std::remove("cli_verify.json");
}

TEST(CliKernel, CatSelfOverlapIsOne) {
    const auto r = run("kernel --family cat-truncation --parity even --n 6 --a 1,0 --b 1,0");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NEAR(first_number(r.out), 1.0, 1e-9);
}

TEST(CliKernel, GeneralFamilyFromJson) {
    {
        std::ofstream f1("cli_f1.json");
        f1 << R"({"m":1,"A":[[0,0]],"B":[[0,0]],"C":[0,0],"beta":[{"idx":[0],"re":1,"im":0}],"n":0})";
        std::ofstream f2("cli_f2.json");
        f2 << R"({"m":1,"A":[[0,0]],"B":[[1,0]],"C":[-0.5,0],"beta":[{"idx":[0],"re":1,"im":0}],"n":0})";
    }
    // vacuum vs coherent(1): kernel e^{-1}
    const auto r = run("kernel --family general --f1 cli_f1.json --f2 cli_f2.json");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NEAR(first_number(r.out), std::exp(-1.0), 1e-12);
    std::remove("cli_f1.json");
    std::remove("cli_f2.json");
}

TEST(CliGrid, MalformedBoundsExitTwoAndBadCsvExitFive) {
    {
        std::ofstream m("cli_model.json");
        m << R"({"kernel_spec":{"family":"coherent","n":0,"d":2,"bandwidth":1.0,"parity":"even"},)"
          << R"("C":1.0,"bias":0.0,"dual_coeffs":[1.0],"support_points":[[0,0]],"support_indices":[0]})";
    }
    const auto r = run("grid --model cli_model.json --res 2 --out cli_g.csv --bounds 0,zebra,0,1");
    EXPECT_EQ(r.exit_code, 2);
    {
        std::ofstream ds("cli_bad.csv");
        ds << "x1,x2,label\n0,nope,1\n";
    }
    const auto g = run("gram --dataset cli_bad.csv --family coherent --out cli_g2.csv");
    EXPECT_EQ(g.exit_code, 5);
    for (const char* f : {"cli_model.json", "cli_bad.csv", "cli_g.csv", "cli_g2.csv"})
        std::remove(f);
}
