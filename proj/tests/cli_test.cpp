#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace undulate {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out, err;
  std::map<std::string, std::string> values;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::runCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) r.values[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("undulate_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << content;
    return p;
  }

  fs::path gaitFile(double a = 5.0) {
    return write("gait.txt", "sigma = 1\nxc = 0\nyc = 0\ntheta = 0\na = " + std::to_string(a) + "\nxi = 1\n");
  }

  fs::path dir_;
};

TEST_F(CliTest, SimulateWritesOutputs) {
  const CliRun r = run({"simulate", "--gait", gaitFile().string(), "--out", (dir_ / "sim").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"trajectory.csv", "energy.csv", "joint_angles.csv", "trajectory.svg"})
    EXPECT_TRUE(fs::exists(dir_ / "sim" / f)) << f;
  EXPECT_NEAR(std::stod(r.values.at("net_displacement_m")), 0.3727392882129259, 1e-9);
  EXPECT_NE(r.values.at("proxy_cot"), "n/a");

  std::ifstream in(dir_ / "sim" / "trajectory.csv");
  const auto frames = io::readTrajectoryCsv(in);
  EXPECT_EQ(frames.size(), 51u);
  EXPECT_EQ(frames.front().size(), 12u);
  std::ifstream angles(dir_ / "sim" / "joint_angles.csv");
  const JointAngles a = io::readJointAnglesCsv(angles);
  EXPECT_EQ(a.rows, 50);
  EXPECT_EQ(a.cols, 10);
  const std::string svg = slurp(dir_ / "sim" / "trajectory.svg");
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST_F(CliTest, ZeroAmplitudeGaitStaysPut) {
  const CliRun r = run({"simulate", "--gait", gaitFile(0.0).string(), "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::stod(r.values.at("net_displacement_m")), 0.0);
  EXPECT_EQ(r.values.at("proxy_cot"), "n/a");
  std::ifstream in(dir_ / "trajectory.csv");
  const auto frames = io::readTrajectoryCsv(in);
  for (const auto& f : frames) EXPECT_EQ(f, frames.front());
}

TEST_F(CliTest, IsotropicFlagGivesNoDisplacement) {
  const CliRun r = run({"simulate", "--gait", gaitFile().string(), "--epsilon", "1", "--cycles", "2", "--out",
                     dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(std::abs(std::stod(r.values.at("net_displacement_bl"))), 1e-9);
}

TEST_F(CliTest, SimulateIsByteIdenticalAcrossRuns) {
  const std::string gait = gaitFile().string();
  ASSERT_EQ(run({"simulate", "--gait", gait, "--out", (dir_ / "a").string()}).code, 0);
  ASSERT_EQ(run({"simulate", "--gait", gait, "--out", (dir_ / "b").string()}).code, 0);
  for (const char* f : {"trajectory.csv", "energy.csv", "joint_angles.csv", "trajectory.svg"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  const fs::path cfg = write("run.cfg", "epsilon = 1.0\ntimesteps = 30\n");
  const CliRun isotropic = run({"simulate", "--gait", gaitFile().string(), "--config", cfg.string(), "--out",
                             dir_.string()});
  ASSERT_EQ(isotropic.code, 0) << isotropic.err;
  EXPECT_LT(std::stod(isotropic.values.at("net_displacement_bl")), 1e-9);
  const CliRun flagged = run({"simulate", "--gait", gaitFile().string(), "--config", cfg.string(), "--epsilon",
                           "0.2", "--out", dir_.string()});
  ASSERT_EQ(flagged.code, 0);
  EXPECT_GT(std::stod(flagged.values.at("net_displacement_bl")), 0.1);
  std::ifstream energy(dir_ / "energy.csv");
  EXPECT_EQ(io::readEnergyCsv(energy).size(), 30u);
}

TEST_F(CliTest, ParseErrorsExitWithTwo) {
  EXPECT_EQ(run({"simulate", "--gait", (dir_ / "missing.txt").string()}).code, 2);
  EXPECT_EQ(run({"simulate", "--gait", write("bad.txt", "sigma = x\n").string()}).code, 2);
  EXPECT_EQ(run({"simulate", "--gait", gaitFile().string(), "--bogus"}).code, 2);
  EXPECT_EQ(run({"simulate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  const CliRun badEps = run({"simulate", "--gait", gaitFile().string(), "--epsilon", "1.5", "--out", dir_.string()});
  EXPECT_EQ(badEps.code, 2);
  EXPECT_NE(badEps.err.find("InvalidAnisotropy"), std::string::npos);
  EXPECT_EQ(run({"simulate", "--gait", gaitFile().string(), "--config", write("c.cfg", "colour = 1\n").string()})
                .code,
            2);
  EXPECT_EQ(run({"calibrate", "--mocap", write("m.csv", "time_s,m0_x,m0_y,m1_x,m1_y\n0,0,0,1\n").string(),
                 "--out", dir_.string()})
                .code,
            2);
}

TEST_F(CliTest, SolverFailureExitsWithThreeAndNamesTimestep) {
  const fs::path cfg = write("strict.cfg", "solver_max_iterations = 0\n");
  const CliRun r = run({"simulate", "--gait", gaitFile().string(), "--config", cfg.string(), "--out", dir_.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("timestep 1"), std::string::npos) << r.err;
}

TEST_F(CliTest, HelpExitsWithZero) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST_F(CliTest, OptimizeImprovesSeedAndHonorsFixedXi) {
  const CliRun r = run({"optimize", "--seed", "3", "--c", "0", "--max-evals", "120", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(std::stod(r.values.at("displacement")), std::stod(r.values.at("seed_displacement")));
  std::ifstream report(dir_ / "optimization_report.csv");
  const auto history = io::readOptimizationReport(report);
  ASSERT_FALSE(history.empty());
  EXPECT_EQ(history.front().gait, randomGait(3, {}));
  for (std::size_t i = 1; i < history.size(); ++i)
    EXPECT_LE(history[i].evaluation.loss, history[i - 1].evaluation.loss);

  const CliRun fixed = run({"optimize", "--seed", "3", "--fixed-xi", "1.25", "--max-evals", "80", "--out",
                         (dir_ / "fixed").string()});
  ASSERT_EQ(fixed.code, 0) << fixed.err;
  EXPECT_EQ(io::readGait(dir_ / "fixed" / "optimized_gait.txt").gait.xi, 1.25);
}

TEST_F(CliTest, OptimizeFromGaitFile) {
  const CliRun r = run({"optimize", "--gait", gaitFile(4.0).string(), "--max-evals", "40", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(std::stod(r.values.at("loss")), std::stod(r.values.at("seed_loss")));
}

TEST_F(CliTest, SweepWritesTable) {
  const CliRun r = run({"sweep", "--seed", "1", "--c-values", "0,2.5", "--max-evals", "100", "--jobs", "2", "--out",
                     dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir_ / "c_sweep.csv");
  const io::CsvTable table = io::readCsv(in);
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.header.front(), "c");
  EXPECT_EQ(io::parseDouble(table.rows[1][0]), 2.5);
  EXPECT_NE(r.out.find("proxy"), std::string::npos);

  // Thread count does not change the results.
  const CliRun serial = run({"sweep", "--seed", "1", "--c-values", "0,2.5", "--max-evals", "100", "--out",
                          (dir_ / "serial").string()});
  ASSERT_EQ(serial.code, 0);
  EXPECT_EQ(slurp(dir_ / "c_sweep.csv"), slurp(dir_ / "serial" / "c_sweep.csv"));
}

TEST_F(CliTest, CalibrateAndResimRecoverSyntheticData) {
  SimConfig sim;
  sim.cycles = 3;
  const Trajectory traj = simulateGait({1, 0, 0, 0, 5, 1}, sim, DissipationParams::uniform(12, 1.38, 0.3));
  {
    auto f = io::openWrite(dir_ / "mocap.csv");
    io::writeMocapCsv(f, toMocap(traj, 0.2));
  }
  const std::string mocap = (dir_ / "mocap.csv").string();
  const CliRun cal = run({"calibrate", "--mocap", mocap, "--out", dir_.string()});
  ASSERT_EQ(cal.code, 0) << cal.err;
  EXPECT_NEAR(std::stod(cal.values.at("epsilon")), 0.3, 1e-3);
  EXPECT_TRUE(fs::exists(dir_ / "calibration.svg"));
  EXPECT_NE(slurp(dir_ / "calibration.svg").find("#f2c500"), std::string::npos);
  std::ifstream table(dir_ / "calibration.csv");
  EXPECT_GE(io::readCsv(table).rows.size(), 3u);

  const CliRun re = run({"resim", "--mocap", mocap, "--epsilon", "0.3", "--out", dir_.string()});
  ASSERT_EQ(re.code, 0) << re.err;
  EXPECT_LT(std::stod(re.values.at("rms")), 1e-8 * 0.92);
  EXPECT_TRUE(fs::exists(dir_ / "resim.svg"));
  std::ifstream resimTraj(dir_ / "resim_trajectory.csv");
  EXPECT_EQ(io::readTrajectoryCsv(resimTraj).size(), traj.shapes.size());
}

TEST_F(CliTest, AnalyzeIdentityClassesAndCot) {
  const fs::path d = write("d.csv", "gait,displacement\n0,0.2\n1,0.4\n2,0.3\n");
  const fs::path power = write("power.csv", "time_s,power_w\n0,5\n10,5\n");
  const CliRun r = run({"analyze", "--exp", d.string(), "--sim", d.string(), "--power", power.string(),
                     "--displacement", "1", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream xi(dir_ / "xi_Exp_Sim.csv");
  for (double v : io::readMatrixCsv(xi).data) EXPECT_EQ(v, 1.0);
  EXPECT_NE(r.out.find("Exp_Sim: mean = 1, std = 0"), std::string::npos) << r.out;
  EXPECT_NEAR(std::stod(r.values.at("cot")), 5.0 / (1.38 * 9.81 * 0.1), 1e-12);
  std::ifstream delta(dir_ / "delta_Exp.csv");
  const SquareMatrix m = io::readMatrixCsv(delta);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) EXPECT_NEAR(m(i, j) * m(j, i), 1.0, 1e-15);
  EXPECT_TRUE(fs::exists(dir_ / "xi_Exp_Sim.svg"));

  EXPECT_EQ(run({"analyze", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"analyze", "--exp", write("neg.csv", "gait,displacement\n0,-1\n").string(), "--out",
                 dir_.string()})
                .code,
            2);
}

TEST_F(CliTest, GaitSampleIsDeterministic) {
  ASSERT_EQ(run({"gait-sample", "--seed", "5", "--count", "3", "--out", (dir_ / "a").string()}).code, 0);
  ASSERT_EQ(run({"gait-sample", "--seed", "5", "--count", "3", "--out", (dir_ / "b").string()}).code, 0);
  for (int i = 0; i < 3; ++i) {
    const std::string g = "gait_" + std::to_string(i) + ".txt";
    EXPECT_EQ(slurp(dir_ / "a" / g), slurp(dir_ / "b" / g));
    EXPECT_EQ(io::readGait(dir_ / "a" / g).gait, randomGait(5 + static_cast<std::uint64_t>(i), {}));
    std::ifstream angles(dir_ / "a" / ("joint_angles_" + std::to_string(i) + ".csv"));
    EXPECT_EQ(io::readJointAnglesCsv(angles).rows, 50);
  }
}

}  // namespace
}  // namespace undulate
