#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ellvolterra/io.hpp"

namespace {

struct Result {
    int code;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(ELL_VOLTERRA_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path temp_dir() {
    auto d = std::filesystem::temp_directory_path() / ("ell_volterra_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
}

std::string m3_file() {
    const auto path = temp_dir() / "m3.json";
    const Result r = run("family m3 --a 0.5 --b 0.5 --c 0.75 --out " + path.string());
    EXPECT_EQ(r.code, 0);
    return path.string();
}

std::size_t count_lines(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

} // namespace

using ellvolterra::io::json;

TEST(Cli, ClassifySymmetricFamily) {
    const Result r = run("classify " + m3_file());
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out).at("ell"), 2);
}

TEST(Cli, ClassifyWithInvarianceChecks) {
    const Result r = run("classify --check-invariance --samples 20 " + m3_file());
    ASSERT_EQ(r.code, 0);
    const json j = json::parse(r.out);
    EXPECT_TRUE(j.at("face_invariance").at("all_hold").get<bool>());
    EXPECT_EQ(j.at("face_invariance").at("faces").size(), 3u);
}

TEST(Cli, ExtremalCount) {
    EXPECT_EQ(run("extremals count --m 3 --ell 2").out, "48\n");
    EXPECT_EQ(run("extremals count --m 10 --ell 0").out, "10000000000000000000000000000000000000000000000000000000\n");
    const Result all = run("extremals count --m 3 --all");
    EXPECT_EQ(all.out, "ell=3 8\nell=2 48\nell=1 216\nell=0 729\nunconstrained 729\n");
}

TEST(Cli, ExtremalEnumerate) {
    const auto dir = temp_dir() / "ext";
    std::filesystem::remove_all(dir);
    ASSERT_EQ(run("extremals enumerate --m 3 --ell 2 --out " + dir.string()).code, 0);
    std::size_t n = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        (void)e;
        ++n;
    }
    EXPECT_EQ(n, 48u);
    EXPECT_TRUE(std::filesystem::exists(dir / "00.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "47.json"));
    EXPECT_EQ(run("validate " + (dir / "47.json").string()).code, 0);
    EXPECT_EQ(count_lines(run("extremals enumerate --m 2 --ell 1").out), 4u);
    EXPECT_EQ(run("extremals enumerate --m 5 --ell 5").code, 1);
}

TEST(Cli, OrbitCsv) {
    const Result r = run("orbit " + m3_file() + " --x0 0.1,0.3,0.6 --n 500 --format csv");
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line, last;
    std::getline(in, line);
    EXPECT_EQ(line, "step,x1,x2,x3");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        last = line;
    }
    EXPECT_EQ(rows, 501u);
    std::istringstream cells(last);
    std::string cell;
    std::getline(cells, cell, ',');
    EXPECT_EQ(cell, "500");
    while (std::getline(cells, cell, ',')) EXPECT_NEAR(std::stod(cell), 1.0 / 3.0, 1e-8);
}

TEST(Cli, FamilyOutputValidates) {
    const auto path = temp_dir() / "roundtrip.json";
    {
        std::ofstream(path) << run("family m3 --a 0.8 --b 0.2 --c 0.75").out;
    }
    EXPECT_EQ(run("validate " + path.string()).code, 0);
    const std::string piped = "family m3 --a 0.6 --b 0.3 --c 0.75 --analyze | " + std::string(ELL_VOLTERRA_BIN) + " validate -";
    EXPECT_EQ(run(piped).code, 0);
    EXPECT_EQ(run("family cycle --m 3 --ell 1 --cycle 2,3 | " + std::string(ELL_VOLTERRA_BIN) + " validate -").code, 0);
    EXPECT_EQ(run("family m2 --a 0.5 --c 0.75 | " + std::string(ELL_VOLTERRA_BIN) + " validate -").code, 0);
}

TEST(Cli, FamilyReports) {
    const json m3 = json::parse(run("family m3 --a 0.6 --b 0.3 --c 0.75 --analyze").out);
    EXPECT_EQ(m3.at("regime"), "c>1/2,a=2b");
    EXPECT_TRUE(m3.contains("operator"));
    const json cyc = json::parse(run("family cycle --m 4 --ell 1 --cycle 2,3,4 --analyze").out);
    EXPECT_EQ(cyc.at("cycles")[0].at("detected_period"), 3);
    const json m2 = json::parse(run("family m2 --a 0.5 --c 0.75 --analyze").out);
    EXPECT_EQ(m2.at("fixed_points").size(), 2u);
}

TEST(Cli, PortraitRowCount) {
    const Result r = run("portrait " + m3_file() + " --grid 6 --burn-in 200 --window 8 --threads 2");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(count_lines(r.out), 1u + 6u * 7u / 2u);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "x0_1,x0_2,x0_3,limit_type,limit_1,limit_2,limit_3");
}

TEST(Cli, ByteIdenticalOutput) {
    const std::string file = m3_file();
    for (const std::string& args : {"fixed-points " + file + " --grid 8", "portrait " + file + " --grid 5 --burn-in 100",
                                    "classify --check-invariance " + file, "cycles " + file}) {
        const Result a = run(args);
        const Result b = run(args);
        EXPECT_EQ(a.code, 0) << args;
        EXPECT_EQ(a.out, b.out) << args;
    }
    EXPECT_EQ(run("portrait " + file + " --grid 5 --threads 1").out, run("portrait " + file + " --grid 5 --threads 3").out);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("orbit").code, 2);
    EXPECT_EQ(run("classify /nonexistent/op.json").code, 1);
    EXPECT_EQ(run("family m3 --a 1 --b 0.3 --c 0.75").code, 1);
    EXPECT_EQ(run("family cycle --m 3 --ell 1 --cycle 1,2").code, 1);
    const auto bad = temp_dir() / "bad.json";
    std::ofstream(bad) << R"({"m": 2, "P": [[[1, 0], [0.6, 0.6]], [[0.6, 0.6], [0, 1]]]})";
    const Result r = run("validate " + bad.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(json::parse(r.out).at("valid").get<bool>());
    EXPECT_EQ(run("--help").code, 0);
}
