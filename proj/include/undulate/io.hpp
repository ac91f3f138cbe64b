#pragma once

// Text file formats: flat key-value files and the CSV layouts used for
// trajectories, motion capture, joint matrices, reports and heat maps.
// Numbers are written in shortest round-trip form, so every writer/reader
// pair is lossless.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "undulate/analysis.hpp"
#include "undulate/calibration.hpp"
#include "undulate/optimize.hpp"
#include "undulate/shapespace.hpp"

namespace undulate::io {

inline std::string formatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parseDouble(std::string_view text, std::string_view what = "value") {
  const std::string_view s = trim(text);
  double v = 0.0;
  const char* begin = s.data();
  if (!s.empty() && s.front() == '+') ++begin;
  const auto res = std::from_chars(begin, s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::ParseError, "cannot parse " + std::string(what) + " from '" +
                                           std::string(s) + "'");
  return v;
}

inline long parseInt(std::string_view text, std::string_view what = "value") {
  const std::string_view s = trim(text);
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::ParseError, "cannot parse integer " + std::string(what) + " from '" +
                                           std::string(s) + "'");
  return v;
}

inline std::ifstream openRead(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return in;
}

inline std::ofstream openWrite(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out.exceptions(std::ios::failbit | std::ios::badbit);
  return out;
}

// ---------------------------------------------------------------------------
// key = value

using KeyValues = std::map<std::string, std::string>;

/// Reads `key = value` lines; blank lines and `#` comments are ignored.
inline KeyValues readKeyValues(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineNo) + ": expected key = value");
    const std::string key(trim(s.substr(0, eq)));
    if (key.empty()) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineNo) + ": empty key");
    kv[key] = std::string(trim(s.substr(eq + 1)));
  }
  return kv;
}

inline KeyValues readKeyValues(const std::filesystem::path& path) {
  auto in = openRead(path);
  return readKeyValues(in);
}

struct GaitFile {
  GaitEllipse gait;
  SimConfig sim;
};

inline GaitFile parseGait(const KeyValues& kv) {
  GaitFile g;
  auto num = [&](const char* key, double& target) {
    if (auto it = kv.find(key); it != kv.end()) target = parseDouble(it->second, key);
  };
  auto integer = [&](const char* key, int& target) {
    if (auto it = kv.find(key); it != kv.end()) target = static_cast<int>(parseInt(it->second, key));
  };
  for (const char* key : {"sigma", "xc", "yc", "theta", "a", "xi"})
    if (!kv.contains(key)) throw Error(ErrorCode::ParseError, std::string("gait file lacks '") + key + "'");
  num("sigma", g.gait.sigma);
  num("xc", g.gait.xc);
  num("yc", g.gait.yc);
  num("theta", g.gait.theta);
  num("a", g.gait.a);
  num("xi", g.gait.xi);
  integer("timesteps", g.sim.timesteps);
  integer("edges", g.sim.edges);
  num("body_length", g.sim.bodyLength);
  integer("cycles", g.sim.cycles);
  g.gait.validate();
  return g;
}

inline GaitFile readGait(const std::filesystem::path& path) { return parseGait(readKeyValues(path)); }

inline void writeGait(std::ostream& out, const GaitEllipse& g, const SimConfig& sim) {
  out << "sigma = " << formatDouble(g.sigma) << "\n"
      << "xc = " << formatDouble(g.xc) << "\n"
      << "yc = " << formatDouble(g.yc) << "\n"
      << "theta = " << formatDouble(g.theta) << "\n"
      << "a = " << formatDouble(g.a) << "\n"
      << "xi = " << formatDouble(g.xi) << "\n"
      << "timesteps = " << sim.timesteps << "\n"
      << "edges = " << sim.edges << "\n"
      << "body_length = " << formatDouble(sim.bodyLength) << "\n";
}

inline void writeGait(const std::filesystem::path& path, const GaitEllipse& g, const SimConfig& sim) {
  auto out = openWrite(path);
  writeGait(out, g, sim);
}

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> splitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline CsvTable readCsv(std::istream& in, bool hasHeader = true) {
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = splitCsvLine(line);
    if (first && hasHeader) table.header = std::move(fields);
    else table.rows.push_back(std::move(fields));
    first = false;
  }
  return table;
}

inline CsvTable readCsv(const std::filesystem::path& path, bool hasHeader = true) {
  auto in = openRead(path);
  return readCsv(in, hasHeader);
}

/// Trajectory rows (t, k, x, y), one per vertex per timestep.
inline void writeTrajectoryCsv(std::ostream& out, const Trajectory& traj) {
  out << "t,k,x,y\n";
  for (std::size_t t = 0; t < traj.shapes.size(); ++t)
    for (std::size_t k = 0; k < traj.shapes[t].size(); ++k) {
      const Vec3& p = traj.shapes[t].vertices[k];
      out << t << ',' << k << ',' << formatDouble(p.x()) << ',' << formatDouble(p.y()) << '\n';
    }
}

/// Vertex positions per timestep from a trajectory CSV.
inline std::vector<std::vector<Vec2>> readTrajectoryCsv(std::istream& in) {
  const CsvTable table = readCsv(in);
  if (table.header != std::vector<std::string>{"t", "k", "x", "y"})
    throw Error(ErrorCode::ParseError, "trajectory CSV header must be t,k,x,y");
  std::vector<std::vector<Vec2>> frames;
  for (const auto& row : table.rows) {
    if (row.size() != 4) throw Error(ErrorCode::ParseError, "trajectory row needs 4 fields");
    const auto t = static_cast<std::size_t>(parseInt(row[0], "t"));
    const auto k = static_cast<std::size_t>(parseInt(row[1], "k"));
    if (t >= frames.size()) frames.resize(t + 1);
    if (k != frames[t].size()) throw Error(ErrorCode::ParseError, "trajectory vertices out of order");
    frames[t].emplace_back(parseDouble(row[2], "x"), parseDouble(row[3], "y"));
  }
  return frames;
}

inline void writeEnergyCsv(std::ostream& out, std::span<const double> energies) {
  out << "t,energy\n";
  for (std::size_t t = 0; t < energies.size(); ++t) out << t << ',' << formatDouble(energies[t]) << '\n';
}

inline std::vector<double> readEnergyCsv(std::istream& in) {
  const CsvTable table = readCsv(in);
  std::vector<double> out;
  for (const auto& row : table.rows) {
    if (row.size() != 2) throw Error(ErrorCode::ParseError, "energy row needs 2 fields");
    out.push_back(parseDouble(row[1], "energy"));
  }
  return out;
}

/// Mocap rows: time_s, m0_x, m0_y, m1_x, m1_y, ...
inline void writeMocapCsv(std::ostream& out, const MocapTrajectory& mocap) {
  out << "time_s";
  for (std::size_t m = 0; m < mocap.markerCount(); ++m) out << ",m" << m << "_x,m" << m << "_y";
  out << '\n';
  for (std::size_t i = 0; i < mocap.frames.size(); ++i) {
    out << formatDouble(mocap.times[i]);
    for (const auto& p : mocap.frames[i]) out << ',' << formatDouble(p.x()) << ',' << formatDouble(p.y());
    out << '\n';
  }
}

inline MocapTrajectory readMocapCsv(std::istream& in) {
  const CsvTable table = readCsv(in);
  if (table.header.size() < 3 || (table.header.size() - 1) % 2 != 0)
    throw Error(ErrorCode::ParseError, "mocap header must be time_s followed by x,y pairs");
  const std::size_t markers = (table.header.size() - 1) / 2;
  MocapTrajectory mocap;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size())
      throw Error(ErrorCode::InconsistentMarkerCount,
                  "mocap row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                      " fields, header has " + std::to_string(table.header.size()));
    mocap.times.push_back(parseDouble(row[0], "time"));
    std::vector<Vec2> frame;
    for (std::size_t m = 0; m < markers; ++m)
      frame.emplace_back(parseDouble(row[1 + 2 * m], "marker x"), parseDouble(row[2 + 2 * m], "marker y"));
    mocap.frames.push_back(std::move(frame));
  }
  mocap.validate();
  return mocap;
}

/// One weight (kg) per line.
inline std::vector<double> readWeights(std::istream& in) {
  std::vector<double> w;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    w.push_back(parseDouble(line, "weight"));
  }
  return w;
}

/// Plain matrix, one row of radians per timestep, no header.
inline void writeJointAnglesCsv(std::ostream& out, const JointAngles& angles) {
  for (int r = 0; r < angles.rows; ++r) {
    for (int c = 0; c < angles.cols; ++c) out << (c ? "," : "") << formatDouble(angles(r, c));
    out << '\n';
  }
}

inline JointAngles readJointAnglesCsv(std::istream& in) {
  const CsvTable table = readCsv(in, false);
  JointAngles a;
  a.rows = static_cast<int>(table.rows.size());
  a.cols = table.rows.empty() ? 0 : static_cast<int>(table.rows.front().size());
  for (const auto& row : table.rows) {
    if (static_cast<int>(row.size()) != a.cols)
      throw Error(ErrorCode::ShapeMismatch, "joint angle rows differ in length");
    for (const auto& f : row) a.values.push_back(parseDouble(f, "angle"));
  }
  return a;
}

inline void writeOptimizationReport(std::ostream& out, const OptimizationResult& result) {
  out << "iteration,loss,displacement,energy,sigma,xc,yc,theta,a,xi\n";
  for (const auto& rec : result.history) {
    const auto& g = rec.gait;
    out << rec.iteration << ',' << formatDouble(rec.evaluation.loss) << ','
        << formatDouble(rec.evaluation.displacement) << ',' << formatDouble(rec.evaluation.energy);
    for (double v : toArray(g)) out << ',' << formatDouble(v);
    out << '\n';
  }
}

inline std::vector<OptimizationRecord> readOptimizationReport(std::istream& in) {
  const CsvTable table = readCsv(in);
  std::vector<OptimizationRecord> out;
  for (const auto& row : table.rows) {
    if (row.size() != 10) throw Error(ErrorCode::ParseError, "report row needs 10 fields");
    OptimizationRecord rec;
    rec.iteration = static_cast<int>(parseInt(row[0], "iteration"));
    rec.evaluation = {parseDouble(row[1]), parseDouble(row[2]), parseDouble(row[3])};
    std::array<double, 6> v{};
    for (std::size_t i = 0; i < 6; ++i) v[i] = parseDouble(row[4 + i]);
    rec.gait = fromArray(v);
    out.push_back(rec);
  }
  return out;
}

inline PowerLog readPowerLog(std::istream& in) {
  const CsvTable table = readCsv(in);
  PowerLog log;
  for (const auto& row : table.rows) {
    if (row.size() != 2) throw Error(ErrorCode::ParseError, "power row needs time_s,power_w");
    log.times.push_back(parseDouble(row[0], "time"));
    log.power.push_back(parseDouble(row[1], "power"));
  }
  log.validate();
  return log;
}

/// Per-gait displacements: header `gait,displacement`.
inline std::vector<double> readDisplacements(std::istream& in) {
  const CsvTable table = readCsv(in);
  std::vector<double> out;
  for (const auto& row : table.rows) {
    if (row.size() != 2) throw Error(ErrorCode::ParseError, "displacement row needs gait,displacement");
    const auto idx = static_cast<std::size_t>(parseInt(row[0], "gait"));
    if (idx != out.size()) throw Error(ErrorCode::ParseError, "gait indices must be 0, 1, 2, ...");
    out.push_back(parseDouble(row[1], "displacement"));
  }
  return out;
}

inline void writeDisplacements(std::ostream& out, std::span<const double> values) {
  out << "gait,displacement\n";
  for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << formatDouble(values[i]) << '\n';
}

/// Square matrix with a header row and column of gait indices.
inline void writeMatrixCsv(std::ostream& out, const SquareMatrix& m) {
  out << "gait";
  for (std::size_t j = 0; j < m.n; ++j) out << ',' << j;
  out << '\n';
  for (std::size_t i = 0; i < m.n; ++i) {
    out << i;
    for (std::size_t j = 0; j < m.n; ++j) out << ',' << formatDouble(m(i, j));
    out << '\n';
  }
}

inline SquareMatrix readMatrixCsv(std::istream& in) {
  const CsvTable table = readCsv(in);
  const std::size_t n = table.header.empty() ? 0 : table.header.size() - 1;
  if (table.rows.size() != n) throw Error(ErrorCode::DimensionMismatch, "matrix CSV is not square");
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (table.rows[i].size() != n + 1) throw Error(ErrorCode::DimensionMismatch, "ragged matrix row");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = parseDouble(table.rows[i][j + 1], "matrix entry");
  }
  return m;
}

}  // namespace undulate::io
