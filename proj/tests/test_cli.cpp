#include "doctest.h"

#include "cli.hpp"
#include "smoothing.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using esocp::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("esocp_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

double value_after(const std::string& text, const std::string& key) {
    const auto pos = text.find(key);
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + key.size()));
}

}  // namespace

TEST_CASE("exit codes") {
    CHECK(invoke({"--help"}).code == 0);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"price-full", "--N", "abc"}).code == 2);
    CHECK(invoke({"price-full", "--sigma=-0.1", "--N", "10"}).code == 2);
    CHECK(invoke({"price-full", "--mu0", "2x"}).code == 2);

    const Result missing = invoke({"price-full", "--params", "/definitely/missing.params"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("/definitely/missing.params") != std::string::npos);

    // inadmissible lattice: engine error
    const Result engine = invoke({"price-full", "--mu0", "50%", "--sigma", "5%", "--N", "10"});
    CHECK(engine.code == 1);
    CHECK(engine.err.find("largest admissible step") != std::string::npos);

    const Result degenerate = invoke({"perpetual", "--sigma", "20%"});
    CHECK(degenerate.code == 1);
    CHECK(degenerate.err.find("lambda == sigma * eta * gamma") != std::string::npos);
}

TEST_CASE("parameter file with inline overrides") {
    const fs::path dir = scratch("params");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "p.txt");
        f << "# test\nsigma = 40%\nstrike = 90\n";
    }
    const Result r = invoke({"price-full", "--params", (dir / "p.txt").string(), "--strike", "100", "--N", "50"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# sigma = 0.4") != std::string::npos);
    CHECK(r.out.find("# strike = 100") != std::string::npos);
}

TEST_CASE("one step with a tiny maturity prices the intrinsic value") {
    const Result r = invoke({"price-full", "--N", "1", "--maturity", "1e-9", "--spot", "120"});
    REQUIRE(r.code == 0);
    CHECK(value_after(r.out, "v0 = ") == doctest::Approx(20.0).epsilon(1e-6));
}

TEST_CASE("partial prior one equals the post-switch full value") {
    const Result full = invoke({"price-full", "--N", "150"});
    const Result part = invoke({"price-partial", "--N", "150", "--L", "40", "--y0", "1"});
    REQUIRE(full.code == 0);
    REQUIRE(part.code == 0);
    const double v1 = value_after(full.out, "v1 = ");
    const auto last_line = part.out.substr(part.out.rfind("\n1 ") + 1);
    CHECK(std::stod(last_line.substr(last_line.find_first_of(' ')) ) == doctest::Approx(v1).epsilon(1e-12));
}

TEST_CASE("grid sizes reported side by side") {
    const fs::path dir = scratch("partial");
    const Result r = invoke({"price-partial", "--N", "200", "--L", "2", "--L", "250", "--y0", "0", "--y0", "0.5",
                             "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto rows = read_csv(dir / "partial.csv");
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"y0", "L", "u"});
    CHECK(rows[1][2] != rows[2][2]);
    CHECK(r.out.find("u[L=2]") != std::string::npos);
}

TEST_CASE("perpetual report") {
    const Result none = invoke({"perpetual", "--mu0", "8%", "--mu1", "5%"});
    CHECK(none.code == 0);
    CHECK(none.out.find("no finite exercise boundary") != std::string::npos);

    const Result ok = invoke({"perpetual", "--x-points", "5"});
    REQUIRE(ok.code == 0);
    CHECK(value_after(ok.out, "x1     ") == doctest::Approx(231.56412051260773));
    CHECK(ok.out.find("x,v0,v1\n0,0,0\n") != std::string::npos);
}

TEST_CASE("boundary CSV and smoothing") {
    const fs::path dir = scratch("boundary");
    const Result r = invoke({"boundary", "--N", "100", "--smooth", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto raw = read_csv(dir / "boundary.csv");
    const auto smooth = read_csv(dir / "boundary_smoothed.csv");
    REQUIRE(raw.size() == 102);
    REQUIRE(smooth.size() == 102);
    CHECK(raw[0] == std::vector<std::string>{"step", "time_years", "boundary_regime0", "boundary_regime1"});
    CHECK(raw[1][2] == "inf");
    CHECK(raw[101][2] == "100");
    CHECK(smooth[1][2] == "inf");
    bool differs = false;
    for (std::size_t i = 1; i < raw.size(); ++i) differs = differs || raw[i][3] != smooth[i][3];
    CHECK(differs);

    const Result printed = invoke({"boundary", "--N", "10"});
    CHECK(printed.out.rfind("step,time_years,boundary_regime0,boundary_regime1\n", 0) == 0);
}

TEST_CASE("surface top layer follows the post-switch boundary") {
    const fs::path dir = scratch("surface");
    REQUIRE(invoke({"surface", "--N", "120", "--L", "21", "--out", dir.string()}).code == 0);
    REQUIRE(invoke({"boundary", "--N", "120", "--out", dir.string()}).code == 0);
    const auto surface = read_csv(dir / "surface.csv");
    const auto boundary = read_csv(dir / "boundary.csv");
    CHECK(surface[0] == std::vector<std::string>{"step", "time_years", "belief", "boundary_price"});
    const double up = std::exp(0.3 * std::sqrt(10.0 / 120));
    int compared = 0;
    for (std::size_t row = 1; row < surface.size(); ++row) {
        if (surface[row][2] != "1") continue;
        const int k = std::stoi(surface[row][0]);
        const std::string& b1 = boundary[k + 1][3];
        if (b1 == "inf" || surface[row][3] == "inf") {
            CHECK(b1 == surface[row][3]);
            continue;
        }
        const double ratio = std::stod(surface[row][3]) / std::stod(b1);
        CHECK(ratio <= up * up * (1 + 1e-12));
        CHECK(ratio >= 1.0 / (up * up) * (1 - 1e-12));
        ++compared;
    }
    CHECK(compared > 50);
}

TEST_CASE("simulation exports are reproducible") {
    const fs::path a = scratch("sim_a");
    const fs::path b = scratch("sim_b");
    const std::vector<std::string> args{"simulate", "--N", "60", "--L", "21", "--seed", "42", "--paths", "4"};
    auto with_out = [&](const fs::path& d) {
        auto v = args;
        v.push_back("--out");
        v.push_back(d.string());
        return v;
    };
    REQUIRE(invoke(with_out(a)).code == 0);
    REQUIRE(invoke(with_out(b)).code == 0);
    for (int i = 0; i < 4; ++i) {
        const std::string name = "path_" + std::to_string(i) + ".csv";
        REQUIRE(fs::exists(a / name));
        CHECK(slurp(a / name) == slurp(b / name));
    }
    CHECK_FALSE(fs::exists(a / "path_4.csv"));
    CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
    CHECK(slurp(a / "manifest.txt").find("# rng = mt19937_64") != std::string::npos);
    const auto rows = read_csv(a / "path_0.csv");
    CHECK(rows.size() == 62);
    CHECK(rows[0].back() == "path_index");
}

TEST_CASE("manifest replay reproduces CSV bodies") {
    const fs::path first = scratch("manifest_a");
    const fs::path second = scratch("manifest_b");
    REQUIRE(invoke({"converge", "--Ns", "40", "--Ns", "80", "--Ls", "11", "--Ls", "21", "--N", "80", "--L", "11",
                    "--sigma", "25%", "--out", first.string()})
                .code == 0);
    const Result again = invoke({"--manifest", (first / "manifest.txt").string(), "--out", second.string()});
    REQUIRE(again.code == 0);
    CHECK(slurp(first / "converge_N.csv") == slurp(second / "converge_N.csv"));
    CHECK(slurp(first / "converge_L.csv") == slurp(second / "converge_L.csv"));
    CHECK(slurp(first / "manifest.txt") == slurp(second / "manifest.txt"));

    // a flag next to the manifest overrides the recorded value
    const fs::path third = scratch("manifest_c");
    REQUIRE(invoke({"--manifest", (first / "manifest.txt").string(), "--sigma", "30%", "--out", third.string()})
                .code == 0);
    CHECK(slurp(third / "manifest.txt").find("sigma = 0.3\n") != std::string::npos);
    CHECK(invoke({"--manifest", "/missing/manifest.txt"}).code == 2);
}

TEST_CASE("table view and CSV") {
    const fs::path dir = scratch("table");
    const Result r = invoke({"table1", "--N", "100", "--L", "26", "--mu0-grid", "2%", "--mu0-grid", "8%",
                             "--mu1-grid=-2%", "--sigma-grid", "30%", "--lambda-grid", "10%", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto rows = read_csv(dir / "table1.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"mu0", "mu1", "sigma", "lambda", "v0", "v1", "u_y0=0", "u_y0=0.5"});
    // v1 does not depend on mu0, and u(0.5) <= u(0)
    CHECK(rows[1][5] == rows[2][5]);
    for (int i = 1; i <= 2; ++i) CHECK(std::stod(rows[i][7]) <= std::stod(rows[i][6]));
    CHECK(r.out.find("      2%     -2%     30%     10%") != std::string::npos);
}

TEST_CASE("polynomial smoothing") {
    const std::vector<double> t{0, 1, 2, 3, 4};
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> line{inf, 3, 5, 7, 9};
    const auto s = esocp::cli::smooth_polynomial(t, line, 1);
    CHECK(std::isinf(s[0]));
    for (int i = 1; i < 5; ++i) CHECK(s[i] == doctest::Approx(line[i]).epsilon(1e-12));
    const auto few = esocp::cli::smooth_polynomial({0, 1}, {2, 4}, 6);
    CHECK(few[1] == doctest::Approx(4.0));
}
