#include <gtest/gtest.h>

#include <sstream>

#include "fcl/cli.hpp"

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "fcl");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = fcl::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string model(const char* name) { return std::string(FCL_MODELS_DIR) + "/" + name; }

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(Cli, Dimension) {
    const Result a = invoke({"dimension", "--gasket", "1"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_NE(a.out.find("D = 1.5849625007"), std::string::npos);
    EXPECT_NE(a.out.find("eta = 0.6931471806"), std::string::npos);
    EXPECT_NE(a.out.find("lattice_span = 0.6931471806"), std::string::npos);
    const Result b = invoke({"dimension", model("gasket_p1.json")});
    EXPECT_EQ(b.out, a.out);
    const Result c = invoke({"dimension", "--gasket", "0.5"});
    EXPECT_NE(c.out.find("D_H = 1.6131471928"), std::string::npos);
    EXPECT_NE(c.out.find("lattice_span = none"), std::string::npos);
}

TEST(Cli, ClosedForm) {
    const Result a = invoke({"closed-form", "--gasket", "1", "--k", "0"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, "-0.0423451221007\n");
    EXPECT_EQ(invoke({"closed-form", model("square_dust.json"), "--k", "0"}).code, 2);
    EXPECT_EQ(invoke({"closed-form", "--gasket", "0.5", "--k", "3"}).code, 2);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"dimension"}).code, 2);
    EXPECT_EQ(invoke({"dimension", "--gasket", "1.5"}).code, 2);
    EXPECT_EQ(invoke({"dimension", "/nonexistent.json"}).code, 2);
    EXPECT_EQ(invoke({"simulate", "--gasket", "1", "--schedule", "0.1,0.5"}).code, 2);
    EXPECT_EQ(invoke({"simulate", "--gasket", "1", "--schedule", "0.1,1.5,3"}).code, 2);
    EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, SimulateIsReproducible) {
    const std::vector<std::string> args{"--quiet", "simulate", "--gasket", "0.5", "--schedule", "0.1,0.7,3",
                                        "--samples", "3", "--seed", "9", "--k-set", "0,1"};
    const Result a = invoke(args), b = invoke(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_TRUE(a.err.empty());
    EXPECT_EQ(first_line(a.out), "eps,k,raw_mean,raw_stderr,rescaled_mean,rescaled_stderr,kind");
    std::istringstream in(a.out);
    std::string line;
    int rows = 0, cesaro = 0;
    while (std::getline(in, line)) {
        rows += line.ends_with(",row");
        cesaro += line.ends_with(",cesaro");
    }
    EXPECT_EQ(rows, 6);
    EXPECT_EQ(cesaro, 2);
}

TEST(Cli, ResolutionAndDepthErrors) {
    EXPECT_EQ(invoke({"--quiet", "simulate", "--gasket", "1", "--schedule", "0.01,0.5,4", "--samples", "1"}).code, 3);
    EXPECT_EQ(invoke({"--quiet", "simulate", "--gasket", "1", "--schedule", "0.05,0.5,3", "--samples", "1",
                      "--max-depth", "2"})
                  .code,
              4);
}

TEST(Cli, OtherCommandsWriteTheirHeaders) {
    const Result rc = invoke({"--quiet", "r-curve", "--gasket", "1", "--k", "0", "--points", "2", "--samples", "1"});
    ASSERT_EQ(rc.code, 0) << rc.err;
    EXPECT_EQ(first_line(rc.out), "r,k,emp_mean,emp_stderr,analytic");
    EXPECT_NE(rc.out.find(",0,-3,,-3"), std::string::npos);

    const Result au = invoke({"audit", "--gasket", "0.5", "--schedule", "0.5,0.5,3", "--samples", "4"});
    ASSERT_EQ(au.code, 0) << au.err;
    EXPECT_EQ(first_line(au.out), "r,observed_max,gamma_bound");

    const Result cm = invoke({"--quiet", "compare-modes", "--gasket", "0", "--points", "1", "--samples", "2"});
    ASSERT_EQ(cm.code, 0) << cm.err;
    EXPECT_EQ(first_line(cm.out),
              "r,k,homogeneous_mean,homogeneous_stderr,recursive_mean,recursive_stderr,difference,combined_stderr");

    const Result pr = invoke({"probe", "--gasket", "1", "--r", "0.05", "--points", "20"});
    ASSERT_EQ(pr.code, 0) << pr.err;
    EXPECT_EQ(first_line(pr.out), "x,y,J_estimate");
    EXPECT_NE(pr.err.find("min J"), std::string::npos);
}

TEST(Cli, OutFileIsWritten) {
    const auto path = std::filesystem::temp_directory_path() / "fcl_cli_audit.csv";
    const Result a = invoke({"audit", "--gasket", "1", "--schedule", "0.5,0.5,2", "--samples", "1", "--out",
                             path.string()});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_TRUE(a.out.empty());
    std::ifstream f(path);
    std::string head;
    std::getline(f, head);
    EXPECT_EQ(head, "r,observed_max,gamma_bound");
    std::filesystem::remove(path);
}
