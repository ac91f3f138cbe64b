#pragma once

// Command-line front end. `runCli` is separate from main() so that tests can
// drive every subcommand in-process.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "undulate/undulate.hpp"

namespace undulate::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kFailure = 1, kParseError = 2, kSolverError = 3 };

struct Options {
  std::optional<fs::path> config;
  std::optional<double> epsilon;
  std::optional<int> cycles;
  std::optional<int> timesteps;
  std::optional<int> edges;
  std::optional<double> bodyLength;
  std::optional<double> mass;
  std::optional<fs::path> weights;
  std::uint64_t seed = 1;
  double c = 0.0;
  std::optional<double> fixedXi;
  int jobs = 1;
  fs::path out = ".";

  // subcommand inputs
  std::optional<fs::path> gait;
  std::optional<fs::path> mocap;
  double cycleDuration = 10.0;
  int maxEvaluations = 500;
  std::vector<double> cValues{0.0, 0.5, 1.0, 1.5, 1.7, 2.0, 2.5};
  double epsLo = 0.01;
  double epsHi = 1.0;
  std::optional<std::size_t> steps;
  int count = 1;
  std::optional<fs::path> expFile, simFile, resimFile, powerFile;
  std::optional<double> displacement;
  std::optional<double> activeTime;
  bool sampleStd = false;
  double gravity = 9.81;
};

inline RunConfig buildConfig(const Options& opt, const io::KeyValues* gaitKeys = nullptr) {
  RunConfig cfg;
  if (opt.config) cfg.apply(io::readKeyValues(*opt.config));
  if (gaitKeys) cfg.applyGaitFile(*gaitKeys);
  if (opt.epsilon) cfg.epsilon = *opt.epsilon;
  if (opt.cycles) cfg.cycles = *opt.cycles;
  if (opt.timesteps) cfg.timesteps = *opt.timesteps;
  if (opt.edges) cfg.vertices = *opt.edges + 1;
  if (opt.bodyLength) cfg.bodyLength = *opt.bodyLength;
  if (opt.mass) cfg.totalMass = *opt.mass;
  if (opt.weights) cfg.weightsFile = *opt.weights;
  cfg.validate();
  return cfg;
}

inline std::vector<Vec2> planar(const std::vector<Vec3>& pts) {
  std::vector<Vec2> out;
  for (const auto& p : pts) out.emplace_back(p.x(), p.y());
  return out;
}

inline std::vector<Vec2> comPath(const Trajectory& traj) {
  std::vector<Vec2> out;
  for (const auto& s : traj.shapes) {
    const Vec3 c = centerOfMass(s, traj.params.weights);
    out.emplace_back(c.x(), c.y());
  }
  return out;
}

inline void trajectoryPlot(svg::Plot& plot, const Trajectory& traj, const std::string& body,
                           const std::string& com, std::size_t every) {
  for (std::size_t t = 0; t < traj.shapes.size(); t += std::max<std::size_t>(every, 1))
    plot.polyline(planar(traj.shapes[t].vertices), {body, 1.0, false, 0.5});
  plot.polyline(planar(traj.shapes.back().vertices), {body, 1.5, false, 1.0});
  plot.polyline(comPath(traj), {com, 2.0, true, 1.0});
}

inline GaitEllipse loadOrSampleGait(const Options& opt, const RunConfig& cfg) {
  if (opt.gait) return io::parseGait(io::readKeyValues(*opt.gait)).gait;
  return randomGait(opt.seed, cfg.bounds);
}

inline ObjectiveConfig objectiveFor(const RunConfig& cfg, double c, std::optional<double> fixedXi) {
  ObjectiveConfig obj;
  obj.dissipationCoefficient = c;
  obj.fixedXi = fixedXi;
  obj.sim = cfg.sim();
  obj.params = cfg.params(static_cast<std::size_t>(cfg.vertices));
  obj.solver = cfg.solver;
  return obj;
}

inline int cmdSimulate(const Options& opt, std::ostream& out) {
  if (!opt.gait) throw Error(ErrorCode::ParseError, "simulate needs --gait");
  const io::KeyValues keys = io::readKeyValues(*opt.gait);
  const GaitEllipse gait = io::parseGait(keys).gait;
  const RunConfig cfg = buildConfig(opt, &keys);
  const SimConfig sim = cfg.sim();
  const auto params = cfg.params(static_cast<std::size_t>(sim.vertexCount()));
  const Trajectory traj = simulateGait(gait, sim, params, cfg.solver);

  auto trajOut = io::openWrite(opt.out / "trajectory.csv");
  io::writeTrajectoryCsv(trajOut, traj);
  auto energyOut = io::openWrite(opt.out / "energy.csv");
  io::writeEnergyCsv(energyOut, traj.stepEnergies);
  {
    auto anglesOut = io::openWrite(opt.out / "joint_angles.csv");
    io::writeJointAnglesCsv(anglesOut,
                            shapesToJointAngles(gaitToShapeSequence(gait, sim.timesteps, sim.edges,
                                                                    sim.bodyLength)));
  }
  svg::Plot plot;
  plot.title("trajectory (dashed: center of mass)");
  trajectoryPlot(plot, traj, "#1f77b4", "red", static_cast<std::size_t>(sim.timesteps) / 5);
  auto svgOut = io::openWrite(opt.out / "trajectory.svg");
  plot.write(svgOut);

  const double disp = comDisplacement(traj);
  const double energy = totalEnergy(traj);
  const double duration = opt.cycleDuration * sim.cycles;
  const double power = simulatedPowerProxy(traj, duration);
  out << "net_displacement_m = " << io::formatDouble(disp) << "\n"
      << "net_displacement_bl = " << io::formatDouble(disp / sim.bodyLength) << "\n"
      << "total_energy = " << io::formatDouble(energy) << "\n"
      << "proxy_power = " << io::formatDouble(power) << "\n";
  if (disp > 0.0 && power > 0.0)
    out << "proxy_cot = "
        << io::formatDouble(costOfTransport(power, cfg.totalMass, opt.gravity, disp / duration))
        << "\n";
  else
    out << "proxy_cot = n/a\n";
  return kOk;
}

inline int cmdOptimize(const Options& opt, std::ostream& out) {
  io::KeyValues keys;
  if (opt.gait) keys = io::readKeyValues(*opt.gait);
  const RunConfig cfg = buildConfig(opt, opt.gait ? &keys : nullptr);
  const GaitEllipse seed = loadOrSampleGait(opt, cfg);
  NelderMeadOptions nm;
  nm.maxEvaluations = opt.maxEvaluations;
  const OptimizationResult result =
      optimizeGait(seed, cfg.bounds, objectiveFor(cfg, opt.c, opt.fixedXi), nm);

  io::writeGait(opt.out / "optimized_gait.txt", result.gait, cfg.sim());
  auto report = io::openWrite(opt.out / "optimization_report.csv");
  io::writeOptimizationReport(report, result);
  out << "seed_displacement = " << io::formatDouble(result.seedEvaluation.displacement) << "\n"
      << "seed_loss = " << io::formatDouble(result.seedEvaluation.loss) << "\n"
      << "displacement = " << io::formatDouble(result.evaluation.displacement) << "\n"
      << "energy = " << io::formatDouble(result.evaluation.energy) << "\n"
      << "loss = " << io::formatDouble(result.evaluation.loss) << "\n"
      << "evaluations = " << result.evaluations << "\n";
  return kOk;
}

/// Runs `task(i)` for i in [0, count) on up to `jobs` threads.
template <class Task>
void parallelFor(std::size_t count, int jobs, Task&& task) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline int cmdSweep(const Options& opt, std::ostream& out) {
  io::KeyValues keys;
  if (opt.gait) keys = io::readKeyValues(*opt.gait);
  const RunConfig cfg = buildConfig(opt, opt.gait ? &keys : nullptr);
  const GaitEllipse seed = loadOrSampleGait(opt, cfg);
  NelderMeadOptions nm;
  nm.maxEvaluations = opt.maxEvaluations;

  std::vector<OptimizationResult> results(opt.cValues.size());
  parallelFor(opt.cValues.size(), opt.jobs, [&](std::size_t i) {
    results[i] = optimizeGait(seed, cfg.bounds, objectiveFor(cfg, opt.cValues[i], opt.fixedXi), nm);
  });

  auto table = io::openWrite(opt.out / "c_sweep.csv");
  table << "c,displacement,energy,proxy_power,proxy_cot,sigma,xc,yc,theta,a,xi\n";
  const double duration = opt.cycleDuration * cfg.cycles;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const double power = r.evaluation.energy / duration;
    const double velocity = r.evaluation.displacement / duration;
    const std::string cot = power > 0.0 && velocity > 0.0
                                ? io::formatDouble(costOfTransport(power, cfg.totalMass, opt.gravity, velocity))
                                : "nan";
    table << io::formatDouble(opt.cValues[i]) << ',' << io::formatDouble(r.evaluation.displacement)
          << ',' << io::formatDouble(r.evaluation.energy) << ',' << io::formatDouble(power) << ','
          << cot;
    for (double v : toArray(r.gait)) table << ',' << io::formatDouble(v);
    table << '\n';
    out << "c = " << io::formatDouble(opt.cValues[i])
        << ": displacement = " << io::formatDouble(r.evaluation.displacement)
        << ", energy = " << io::formatDouble(r.evaluation.energy) << ", proxy_cot = " << cot
        << " (proxy: dissipation / cycle duration)\n";
  }
  return kOk;
}

inline int cmdCalibrate(const Options& opt, std::ostream& out) {
  if (!opt.mocap) throw Error(ErrorCode::ParseError, "calibrate needs --mocap");
  const RunConfig cfg = buildConfig(opt);
  auto in = io::openRead(*opt.mocap);
  MocapTrajectory mocap = io::readMocapCsv(in);
  if (opt.steps) mocap = downsample(mocap, *opt.steps);
  const auto weights = cfg.weights(mocap.markerCount());
  FitOptions fitOptions;
  fitOptions.solver = cfg.solver;
  const FitResult fit = fitAnisotropy(mocap, weights, opt.epsLo, opt.epsHi, fitOptions);

  auto table = io::openWrite(opt.out / "calibration.csv");
  table << "epsilon,displacement,rms\n";
  std::vector<FitSample> samples = fit.history;
  std::sort(samples.begin(), samples.end(),
            [](const FitSample& a, const FitSample& b) { return a.epsilon < b.epsilon; });
  for (const auto& s : samples)
    table << io::formatDouble(s.epsilon) << ',' << io::formatDouble(s.displacement) << ','
          << io::formatDouble(s.rms) << '\n';

  // Displacement (body lengths) against time for a spread of epsilons.
  const auto shapes = extractShapes(mocap);
  svg::Plot plot(640, 480, false);
  plot.title("displacement (BL) vs time; blue: measured, yellow: best fit");
  auto curve = [&](const ComCurve& c) {
    std::vector<Vec2> pts;
    const auto d = c.displacement();
    for (std::size_t i = 0; i < d.size(); ++i) pts.emplace_back(c.times[i], d[i] / cfg.bodyLength);
    return pts;
  };
  std::vector<double> sweep{0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
  for (double eps : sweep) {
    if (eps < opt.epsLo || eps > opt.epsHi) continue;
    const Trajectory traj = integrateMotionTrajectory(shapes, {weights, eps}, cfg.solver);
    plot.polyline(curve(comCurve(traj, mocap.times)), {"#999999", 1.0, false, 0.8});
  }
  const Trajectory best = integrateMotionTrajectory(shapes, {weights, fit.epsilon}, cfg.solver);
  plot.polyline(curve(comCurve(best, mocap.times)), {"#f2c500", 4.0, false, 1.0});
  plot.polyline(curve(comCurve(mocap, weights)), {"blue", 1.5, false, 1.0});
  auto svgOut = io::openWrite(opt.out / "calibration.svg");
  plot.write(svgOut);

  if (fit.nonMonotone)
    std::cerr << "warning: NonMonotoneWarning: resimulated displacement is not monotone in "
                 "epsilon; used golden-section search on RMS\n";
  out << "epsilon = " << io::formatDouble(fit.epsilon) << "\n"
      << "rms = " << io::formatDouble(fit.rms) << "\n"
      << "evaluations = " << fit.history.size() << "\n";
  return kOk;
}

inline int cmdResim(const Options& opt, std::ostream& out) {
  if (!opt.mocap) throw Error(ErrorCode::ParseError, "resim needs --mocap");
  const RunConfig cfg = buildConfig(opt);
  auto in = io::openRead(*opt.mocap);
  MocapTrajectory mocap = io::readMocapCsv(in);
  if (opt.steps) mocap = downsample(mocap, *opt.steps);
  const auto params = cfg.params(mocap.markerCount());
  const Trajectory traj = resimulate(mocap, params, cfg.solver);

  auto trajOut = io::openWrite(opt.out / "resim_trajectory.csv");
  io::writeTrajectoryCsv(trajOut, traj);
  auto energyOut = io::openWrite(opt.out / "resim_energy.csv");
  io::writeEnergyCsv(energyOut, traj.stepEnergies);

  const ComCurve measured = comCurve(mocap, params.weights);
  const ComCurve simulated = comCurve(traj, mocap.times);
  svg::Plot plot;
  plot.title("measured (green) vs resimulated (blue); dashed: center of mass");
  const std::size_t every = std::max<std::size_t>(mocap.frames.size() / 10, 1);
  for (std::size_t t = 0; t < mocap.frames.size(); t += every)
    plot.polyline(mocap.frames[t], {"green", 1.0, false, 0.5});
  trajectoryPlot(plot, traj, "#1f77b4", "red", every);
  plot.polyline(measured.positions, {"darkred", 2.0, true, 1.0});
  auto svgOut = io::openWrite(opt.out / "resim.svg");
  plot.write(svgOut);

  out << "rms = " << io::formatDouble(rmsError(measured, simulated)) << "\n"
      << "measured_displacement_m = "
      << io::formatDouble((measured.positions.back() - measured.positions.front()).norm()) << "\n"
      << "resim_displacement_m = "
      << io::formatDouble((simulated.positions.back() - simulated.positions.front()).norm())
      << "\n";
  return kOk;
}

inline int cmdAnalyze(const Options& opt, std::ostream& out) {
  const RunConfig cfg = buildConfig(opt);
  const StdKind kind = opt.sampleStd ? StdKind::Sample : StdKind::Population;

  std::vector<std::pair<DataClass, std::vector<double>>> classes;
  auto load = [&](const std::optional<fs::path>& p, DataClass c) {
    if (!p) return;
    auto in = io::openRead(*p);
    classes.emplace_back(c, io::readDisplacements(in));
  };
  load(opt.expFile, DataClass::Exp);
  load(opt.simFile, DataClass::Sim);
  load(opt.resimFile, DataClass::Resim);

  std::vector<SquareMatrix> deltas;
  for (const auto& [label, values] : classes) {
    deltas.push_back(performanceRatios(values));
    auto f = io::openWrite(opt.out / (std::string("delta_") + toString(label) + ".csv"));
    io::writeMatrixCsv(f, deltas.back());
  }

  if (classes.size() >= 2) {
    auto summary = io::openWrite(opt.out / "summary.csv");
    summary << "pair,mean,std\n";
    for (std::size_t i = 0; i < classes.size(); ++i)
      for (std::size_t j = i + 1; j < classes.size(); ++j) {
        const std::string name =
            std::string(toString(classes[i].first)) + "_" + toString(classes[j].first);
        const QuotientResult q = ratioQuotients(deltas[i], deltas[j], kind);
        auto f = io::openWrite(opt.out / ("xi_" + name + ".csv"));
        io::writeMatrixCsv(f, q.xi);
        auto s = io::openWrite(opt.out / ("xi_" + name + ".svg"));
        svg::heatMap(s, q.xi, name + ": mean " + io::formatDouble(q.offDiagonal.mean) + ", std " +
                                  io::formatDouble(q.offDiagonal.std));
        summary << name << ',' << io::formatDouble(q.offDiagonal.mean) << ','
                << io::formatDouble(q.offDiagonal.std) << '\n';
        out << name << ": mean = " << io::formatDouble(q.offDiagonal.mean)
            << ", std = " << io::formatDouble(q.offDiagonal.std) << "\n";
      }
  }

  for (const auto& [label, values] : classes) {
    const Summary s = trialStats(values, kind);
    out << toString(label) << " displacement: mean = " << io::formatDouble(s.mean)
        << ", std = " << io::formatDouble(s.std) << "\n";
  }

  if (opt.powerFile) {
    if (!opt.displacement) throw Error(ErrorCode::ParseError, "--power needs --displacement");
    auto in = io::openRead(*opt.powerFile);
    const PowerLog log = io::readPowerLog(in);
    const double power = log.mean();
    const double active = opt.activeTime ? *opt.activeTime : log.times.back() - log.times.front();
    const double velocity = activeVelocity(*opt.displacement, active);
    const double cot = costOfTransport(power, cfg.totalMass, opt.gravity, velocity);
    auto f = io::openWrite(opt.out / "cot.csv");
    f << "mean_power_w,mass_kg,velocity_m_s,cot\n"
      << io::formatDouble(power) << ',' << io::formatDouble(cfg.totalMass) << ','
      << io::formatDouble(velocity) << ',' << io::formatDouble(cot) << '\n';
    out << "cot = " << io::formatDouble(cot) << "\n";
  }
  if (classes.empty() && !opt.powerFile)
    throw Error(ErrorCode::ParseError, "analyze needs displacement files or --power");
  return kOk;
}

inline int cmdGaitSample(const Options& opt, std::ostream& out) {
  const RunConfig cfg = buildConfig(opt);
  const SimConfig sim = cfg.sim();
  for (int i = 0; i < opt.count; ++i) {
    const GaitEllipse g = randomGait(opt.seed + static_cast<std::uint64_t>(i), cfg.bounds);
    const std::string stem = "gait_" + std::to_string(i);
    io::writeGait(opt.out / (stem + ".txt"), g, sim);
    auto angles = io::openWrite(opt.out / ("joint_angles_" + std::to_string(i) + ".csv"));
    io::writeJointAnglesCsv(
        angles, shapesToJointAngles(gaitToShapeSequence(g, sim.timesteps, sim.edges, sim.bodyLength)));
    out << stem << ": sigma = " << io::formatDouble(g.sigma) << ", xc = " << io::formatDouble(g.xc)
        << ", yc = " << io::formatDouble(g.yc) << ", theta = " << io::formatDouble(g.theta)
        << ", a = " << io::formatDouble(g.a) << ", xi = " << io::formatDouble(g.xi) << "\n";
  }
  return kOk;
}

inline int runCli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                  std::ostream& err = std::cerr) {
  Options opt;
  CLI::App app{"Undulatory locomotion simulation, calibration and gait optimization"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config, "key = value run configuration");
    cmd->add_option("--epsilon", opt.epsilon, "anisotropy ratio in (0, 1]");
    cmd->add_option("--cycles", opt.cycles, "gait cycles to simulate");
    cmd->add_option("--timesteps", opt.timesteps, "samples per gait cycle");
    cmd->add_option("--edges", opt.edges, "edges of the body polyline");
    cmd->add_option("--body-length", opt.bodyLength, "body length in meters");
    cmd->add_option("--mass", opt.mass, "total mass in kg");
    cmd->add_option("--weights", opt.weights, "per-vertex weight file");
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--c", opt.c, "dissipation coefficient");
    cmd->add_option("--fixed-xi", opt.fixedXi, "fix the spatial frequency");
    cmd->add_option("--jobs", opt.jobs, "parallel simulations")->check(CLI::PositiveNumber);
    cmd->add_option("--out", opt.out, "output directory");
    cmd->add_option("--cycle-duration", opt.cycleDuration, "seconds per gait cycle (proxy power)");
    cmd->add_option("--gravity", opt.gravity);
  };

  auto* simulate = app.add_subcommand("simulate", "integrate the trajectory of a gait");
  common(simulate);
  simulate->add_option("--gait", opt.gait, "gait parameter file")->required();

  auto* optimize = app.add_subcommand("optimize", "optimize a gait (seeded by --gait or --seed)");
  common(optimize);
  optimize->add_option("--gait", opt.gait, "seed gait file");
  optimize->add_option("--max-evals", opt.maxEvaluations);

  auto* sweep = app.add_subcommand("sweep", "optimize one seed gait over dissipation coefficients");
  common(sweep);
  sweep->add_option("--gait", opt.gait, "seed gait file");
  sweep->add_option("--c-values", opt.cValues)->delimiter(',');
  sweep->add_option("--max-evals", opt.maxEvaluations);

  auto* calibrate = app.add_subcommand("calibrate", "fit the anisotropy ratio to motion capture");
  common(calibrate);
  calibrate->add_option("--mocap", opt.mocap, "motion capture CSV")->required();
  calibrate->add_option("--eps-lo", opt.epsLo);
  calibrate->add_option("--eps-hi", opt.epsHi);
  calibrate->add_option("--steps", opt.steps, "downsample to this many frames");

  auto* resim = app.add_subcommand("resim", "resimulate executed shapes from motion capture");
  common(resim);
  resim->add_option("--mocap", opt.mocap, "motion capture CSV")->required();
  resim->add_option("--steps", opt.steps, "downsample to this many frames");

  auto* analyze = app.add_subcommand("analyze", "performance ratios, quotients and CoT");
  common(analyze);
  analyze->add_option("--exp", opt.expFile);
  analyze->add_option("--sim", opt.simFile);
  analyze->add_option("--resim", opt.resimFile);
  analyze->add_option("--power", opt.powerFile, "power log CSV (time_s, power_w)");
  analyze->add_option("--displacement", opt.displacement, "net displacement for CoT, meters");
  analyze->add_option("--active-time", opt.activeTime, "active gait time for CoT, seconds");
  analyze->add_flag("--sample-std", opt.sampleStd, "sample instead of population STD");

  auto* gaitSample = app.add_subcommand("gait-sample", "draw random gaits and joint matrices");
  common(gaitSample);
  gaitSample->add_option("--count", opt.count)->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  try {
    if (*simulate) return cmdSimulate(opt, out);
    if (*optimize) return cmdOptimize(opt, out);
    if (*sweep) return cmdSweep(opt, out);
    if (*calibrate) return cmdCalibrate(opt, out);
    if (*resim) return cmdResim(opt, out);
    if (*analyze) return cmdAnalyze(opt, out);
    if (*gaitSample) return cmdGaitSample(opt, out);
  } catch (const SolverError& e) {
    err << "error: " << e.what() << "\n";
    return kSolverError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace undulate::cli
