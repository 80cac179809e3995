#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "l0forge/bench.hpp"
#include "l0forge/solvers.hpp"
#include "l0forge/types.hpp"

namespace l0forge {

/// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Plain CSV, row-major, no header.
inline Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw std::runtime_error("malformed CSV value '" + field + "' in '" +
                                 path + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged CSV rows in '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty CSV file '" + path + "'");
  Matrix m(static_cast<Index>(rows.size()),
           static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

/// A vector is a CSV with a single row or a single column.
inline Vector read_csv_vector(const std::string& path) {
  const Matrix m = read_csv_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw std::runtime_error("'" + path + "' is not a vector (expected 1 row or 1 column)");
}

inline void write_csv_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

inline void write_csv_vector(const std::string& path, const Vector& v) {
  write_csv_matrix(path, v);
}

inline nlohmann::json to_json(const CertificateReport& cert) {
  return {{"grad_residual", cert.grad_residual},
          {"magnitude_margin", cert.magnitude_margin},
          {"fixed_point", cert.fixed_point},
          {"passed", cert.passed},
          {"tol", cert.tol}};
}

inline nlohmann::json to_json(const RunRecord& rec) {
  nlohmann::json j;
  j["method"] = rec.method;
  j["iterations"] = rec.iterations;
  j["wall_time_s"] = rec.wall_time_s;
  j["stop_reason"] = rec.stop_reason;
  j["objective"] = rec.objective;
  j["final_nonzeros"] = rec.final_support.nonzero_indices();
  j["certificate"] = to_json(rec.certificate);
  return j;
}

inline nlohmann::json to_json(const MethodSummary& s) {
  return {{"method", s.method},
          {"median_iterations", s.median_iterations},
          {"mean_iterations", s.mean_iterations},
          {"median_time_s", s.median_time_s},
          {"mean_time_s", s.mean_time_s},
          {"median_rel_err", s.median_rel_err},
          {"mean_rel_err", s.mean_rel_err},
          {"support_match_rate", s.support_match_rate}};
}

inline nlohmann::json to_json(const BenchCell& c) {
  return {{"method", c.method},         {"n", c.n},
          {"seed", c.seed},             {"lambda", c.lambda},
          {"iterations", c.iterations}, {"time_s", c.time_s},
          {"rel_err", c.rel_err},       {"support_match", c.support_match},
          {"selected", c.selected},     {"stop_reason", c.stop_reason},
          {"nnz", c.nnz}};
}

inline nlohmann::json to_json(const BenchReport& report) {
  nlohmann::json j;
  j["summaries"] = nlohmann::json::array();
  for (const auto& s : report.summaries) j["summaries"].push_back(to_json(s));
  j["cells"] = nlohmann::json::array();
  for (const auto& c : report.cells) j["cells"].push_back(to_json(c));
  return j;
}

/// Flat sweep table. The time_s column is the only non-deterministic field.
inline void write_bench_csv(const std::string& path, const BenchReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "method,n,seed,lambda,iters,time_s,rel_err,support_match,selected\n";
  for (const auto& c : report.cells) {
    out << c.method << ',' << c.n << ',' << c.seed << ','
        << format_double(c.lambda) << ',' << c.iterations << ','
        << format_double(c.time_s) << ',' << format_double(c.rel_err) << ','
        << (c.support_match ? 1 : 0) << ',' << (c.selected ? 1 : 0) << '\n';
  }
}

/// Whitespace-delimited series of one metric per method, selected runs only,
/// indexed by seed order (one panel of the comparison figures).
inline void write_plot_data(const std::string& path, const BenchReport& report,
                            const std::string& metric) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");

  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds;
  for (const auto& c : report.cells) {
    if (!c.selected) continue;
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
      methods.push_back(c.method);
    if (std::find(seeds.begin(), seeds.end(), c.seed) == seeds.end())
      seeds.push_back(c.seed);
  }

  out << "# seed_index";
  for (const auto& m : methods) out << ' ' << m;
  out << '\n';
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    out << si;
    for (const auto& m : methods) {
      double value = 0.0;
      for (const auto& c : report.cells) {
        if (!c.selected || c.method != m || c.seed != seeds[si]) continue;
        if (metric == "iterations")
          value = static_cast<double>(c.iterations);
        else if (metric == "time_s")
          value = c.time_s;
        else if (metric == "rel_err")
          value = c.rel_err;
        else
          throw std::invalid_argument("write_plot_data: unknown metric '" +
                                      metric + "'");
        break;
      }
      out << ' ' << format_double(value);
    }
    out << '\n';
  }
}

/// report.json + report.csv + the three per-metric plot files.
inline void write_bench_report(const std::string& out_dir,
                               const BenchReport& report) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  std::ofstream json_out(dir / "report.json");
  if (!json_out)
    throw std::runtime_error("cannot write report.json under '" + out_dir + "'");
  json_out << to_json(report).dump(2) << '\n';
  write_bench_csv((dir / "report.csv").string(), report);
  write_plot_data((dir / "plot_iterations.dat").string(), report, "iterations");
  write_plot_data((dir / "plot_time.dat").string(), report, "time_s");
  write_plot_data((dir / "plot_rel_err.dat").string(), report, "rel_err");
}

}  // namespace l0forge
