#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lbesc/errors.hpp"
#include "lbesc/sim/trajectory.hpp"

namespace lbesc {

/// Writes `content` next to `path` and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("cannot write " + tmp.string());
    }
    out << content;
    if (!out.flush()) {
      throw Error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

namespace csv_detail {

inline void number(std::string& out, double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(len));
}

inline void block(std::string& out, const std::optional<Vector>& v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out += ',';
    if (v) number(out, (*v)[static_cast<Eigen::Index>(i)]);
  }
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace csv_detail

inline std::string csv_header(std::size_t n) {
  std::string h = "t";
  for (std::size_t i = 1; i <= n; ++i) h += ",x_" + std::to_string(i);
  h += ",f";
  for (const char* p : {"a_", "Jest_", "Jexact_", "zref_"}) {
    for (std::size_t i = 1; i <= n; ++i) h += "," + std::string(p) + std::to_string(i);
  }
  return h;
}

inline std::string to_csv(const TrajectoryLog& log) {
  const std::size_t n = log.dimension;
  std::string out = csv_header(n) + "\n";
  out.reserve(log.size() * (5 * n + 2) * 24);
  for (const auto& s : log.samples) {
    csv_detail::number(out, s.t);
    csv_detail::block(out, s.x, n);
    out += ',';
    csv_detail::number(out, s.f);
    csv_detail::block(out, s.a, n);
    csv_detail::block(out, s.j_est, n);
    csv_detail::block(out, s.j_exact, n);
    csv_detail::block(out, s.z_ref, n);
    out += '\n';
  }
  return out;
}

/// Filter internals per logged sample; empty when the run had no filter.
inline std::string gekf_csv(const TrajectoryLog& log) {
  const std::size_t n = log.dimension;
  std::string out = "t";
  for (std::size_t i = 1; i <= n; ++i) out += ",xbar1_" + std::to_string(i);
  for (std::size_t i = 1; i <= n; ++i) out += ",xbar2_" + std::to_string(i);
  out += ",xbar3,trace_P,min_eig_P,asym_P,innovation\n";
  for (const auto& s : log.samples) {
    if (!s.gekf) continue;
    const auto& g = *s.gekf;
    csv_detail::number(out, s.t);
    csv_detail::block(out, g.x1, n);
    csv_detail::block(out, g.x2, n);
    for (double v : {g.x3, g.trace_p, g.min_eig_p, g.asymmetry_p, g.innovation}) {
      out += ',';
      csv_detail::number(out, v);
    }
    out += '\n';
  }
  return out;
}

/// Reads a trajectory CSV back. Oracle columns may be empty; a column block
/// is kept only when every row fills it.
inline TrajectoryLog parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("CSV is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto head = csv_detail::split(line);
  if (head.size() < 7 || (head.size() - 2) % 5 != 0) {
    throw InputError("CSV header does not match the trajectory schema");
  }
  const std::size_t n = (head.size() - 2) / 5;
  if (line != csv_header(n)) {
    throw InputError("CSV header does not match the trajectory schema");
  }

  TrajectoryLog log;
  log.dimension = n;
  std::vector<bool> full(4, true);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = csv_detail::split(line);
    if (cells.size() != head.size()) {
      throw InputError("CSV row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(head.size()));
    }
    auto num = [&](std::size_t c) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[c], &used);
        if (used != cells[c].size()) throw std::invalid_argument("trailing");
        return v;
      } catch (const std::exception&) {
        throw InputError("CSV row " + std::to_string(row) + " column " + head[c] +
                         " is not a number");
      }
    };
    TrajectorySample s;
    s.t = num(0);
    s.x.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) s.x[static_cast<Eigen::Index>(i)] = num(1 + i);
    s.f = num(1 + n);
    std::optional<Vector>* blocks[3] = {&s.j_est, &s.j_exact, &s.z_ref};
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t first = 2 + n + b * n;
      bool empty = true;
      for (std::size_t i = 0; i < n; ++i) empty = empty && cells[first + i].empty();
      if (empty) {
        full[b] = false;
        continue;
      }
      Vector v(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = num(first + i);
      if (b == 0) {
        s.a = std::move(v);
      } else {
        *blocks[b - 1] = std::move(v);
      }
    }
    log.samples.push_back(std::move(s));
  }
  if (log.samples.empty()) {
    throw InputError("CSV has no data rows");
  }
  if (!full[0]) {
    throw InputError("CSV amplitude columns must be filled");
  }
  for (auto& s : log.samples) {
    if (!full[1]) s.j_est.reset();
    if (!full[2]) s.j_exact.reset();
    if (!full[3]) s.z_ref.reset();
  }
  log.stride = log.size() > 1 ? log.samples[1].t - log.samples[0].t : 0.0;
  return log;
}

inline TrajectoryLog read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace lbesc
