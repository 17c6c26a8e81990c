#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "slicekit/gcode.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace slicekit;
using slicekit::test::kFixtures;
using slicekit::test::slurp;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    args.insert(args.begin(), "slicekit");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return (kFixtures / name).string(); }

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        unsetenv(cli::kProfileDirEnv);
        dir_ = fs::temp_directory_path() /
               ("slicekit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override {
        unsetenv(cli::kProfileDirEnv);
        fs::remove_all(dir_);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, InfoOnCube) {
    const CliResult r = run({"info", fixture("cube_10mm.stl")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("watertight:           yes"), std::string::npos);
    EXPECT_NE(r.out.find("fits 180x180x320"), std::string::npos);
}

TEST_F(CliTest, InfoOnTruncatedFile) {
    const CliResult r = run({"info", fixture("truncated.stl")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("read:"), std::string::npos);
}

TEST_F(CliTest, InfoOnOversizedPart) {
    const CliResult r = run({"info", fixture("wide_200mm.stl")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("does not fit 180x180x320"), std::string::npos);
}

TEST_F(CliTest, InfoOnMissingFile) { EXPECT_EQ(run({"info", path("nope.stl")}).code, 1); }

TEST_F(CliTest, SliceCubeMatchesGolden) {
    const CliResult r = run({"slice", fixture("cube_10mm.stl"), "--output", path("cube.gcode")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(path("cube.gcode")), slurp(kFixtures / "cube_10mm.golden.gcode"));
    EXPECT_NE(r.out.find("Material Usage (gm)"), std::string::npos);
    EXPECT_NE(r.out.find("50 layers"), std::string::npos);
}

TEST_F(CliTest, SliceRejectsCoarseLayers) {
    const CliResult r = run({"slice", fixture("cube_10mm.stl"), "--profile", fixture("layer_0.3.ini"), "-o", path("x.gcode")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("slice: layer height 0.3"), std::string::npos);
    EXPECT_FALSE(fs::exists(path("x.gcode")));
}

TEST_F(CliTest, SliceRejectsOversizedPart) {
    const CliResult r = run({"slice", fixture("wide_200mm.stl"), "-o", path("x.gcode")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("does not fit 180x180x320"), std::string::npos);
}

TEST_F(CliTest, ZeroInfillProfilePrintsPerimetersOnly) {
    const CliResult r = run({"slice", fixture("cube_10mm.stl"), "--profile", fixture("perimeters_only.ini"), "-o",
                       path("p.gcode")});
    ASSERT_EQ(r.code, 0) << r.err;
    const GCodeProgram p = parse_gcode(slurp(path("p.gcode")));
    // Every extrusion runs along one of the two axis-aligned perimeter squares.
    std::size_t extrusions = 0;
    double x = 0, y = 0;
    for (const GCodeCommand& c : p.commands) {
        if (c.opcode != Opcode::G0 && c.opcode != Opcode::G1) continue;
        const double nx = c.arg('X').value_or(x), ny = c.arg('Y').value_or(y);
        if (c.opcode == Opcode::G1 && c.has('X')) {
            ++extrusions;
            EXPECT_TRUE(nx == x || ny == y) << "diagonal bead on line " << c.line;
        }
        x = nx;
        y = ny;
    }
    EXPECT_EQ(extrusions, 50u * 2 * 4);
}

TEST_F(CliTest, SliceJsonEstimate) {
    const CliResult r = run({"slice", fixture("cube_10mm.stl"), "-o", path("c.gcode"), "--json", "--density", "2.0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\"mass_g\""), std::string::npos);
}

TEST_F(CliTest, LintEmittedFileIsClean) {
    ASSERT_EQ(run({"slice", fixture("cube_10mm.stl"), "-o", path("c.gcode")}).code, 0);
    const CliResult r = run({"lint", path("c.gcode")});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "");
}

TEST_F(CliTest, LintHotNozzle) {
    const CliResult r = run({"lint", fixture("hot_nozzle.gcode")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("Error R2 1:"), std::string::npos);
}

TEST_F(CliTest, LintEmptyFile) {
    const CliResult r = run({"lint", fixture("empty.gcode")});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "");
}

TEST_F(CliTest, LintParseFailure) {
    const std::string bad = path("bad.gcode");
    std::ofstream(bad) << "G1 Xoops\n";
    EXPECT_EQ(run({"lint", bad}).code, 1);
}

TEST_F(CliTest, PreviewSingleLayer) {
    const CliResult r = run({"preview", fixture("cube_10mm.stl"), "-o", path("svg"), "--layers", "25"});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string svg = slurp(path("svg/layer_0025.svg"));
    const auto d = svg.find(" d=\"M");
    ASSERT_NE(d, std::string::npos);
    const std::string path_data = svg.substr(d, svg.find('"', d + 4) - d);
    EXPECT_EQ(std::count(path_data.begin(), path_data.end(), 'L'), 3);
    EXPECT_EQ(std::count(path_data.begin(), path_data.end(), 'M'), 1);
}

TEST_F(CliTest, PreviewFullRange) {
    ASSERT_EQ(run({"preview", fixture("cube_10mm.stl"), "-o", path("svg")}).code, 0);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(path("svg"))) ++files;
    EXPECT_EQ(files, 50u);
}

TEST_F(CliTest, PreviewRangeOutOfBounds) {
    EXPECT_EQ(run({"preview", fixture("cube_10mm.stl"), "-o", path("svg"), "--layers", "40..50"}).code, 2);
    EXPECT_EQ(run({"preview", fixture("cube_10mm.stl"), "-o", path("svg"), "--layers", "9..3"}).code, 2);
    EXPECT_EQ(run({"preview", fixture("cube_10mm.stl"), "-o", path("svg"), "--layers", "a..b"}).code, 1);
}

TEST_F(CliTest, BreakEvenTable) {
    const CliResult r = run({"breakeven", "--setup", "1000", "--unit-traditional", "5", "--unit-print", "10",
                       "--max-units", "400", "-o", path("be.svg"), "--csv", path("be.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("crossover at n = 200"), std::string::npos);
    EXPECT_NE(slurp(path("be.svg")).find("n* = 200"), std::string::npos);
    EXPECT_NE(slurp(path("be.csv")).find("\n400,4000.00,3000.00\n"), std::string::npos);
}

TEST_F(CliTest, BreakEvenNegativeInput) {
    EXPECT_EQ(run({"breakeven", "--setup", "-5", "--unit-traditional", "5", "--unit-print", "10"}).code, 1);
}

TEST_F(CliTest, ProfileDirectoryFromEnvironment) {
    std::ofstream(path("coarse.ini")) << "[process]\nlayer_height = 0.3\n";
    setenv(cli::kProfileDirEnv, dir_.c_str(), 1);
    EXPECT_EQ(run({"slice", fixture("cube_10mm.stl"), "--profile", "coarse", "-o", path("c.gcode")}).code, 2);
    std::ofstream(path("default.ini")) << "[process]\nlayer_height = 0.1\n";
    const CliResult r = run({"slice", fixture("cube_10mm.stl"), "-o", path("d.gcode")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("100 layers"), std::string::npos);
}

TEST_F(CliTest, UnknownProfileKeyIsParseFailure) {
    std::ofstream(path("typo.ini")) << "[process]\ninfil = 3\n";
    const CliResult r = run({"info", fixture("cube_10mm.stl"), "--profile", path("typo.ini")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("'infil'"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
}
