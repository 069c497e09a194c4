#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "longsync/block_matrix.hpp"
#include "longsync/sync_problem.hpp"

namespace longsync::io {

// Exit codes shared by the CLI and the verification entry points.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitVerification = 3;

// Parse / validation failure with a line number attached.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

std::string format_sig(double v, int digits);  // %.{digits}g, C locale

// Graph file: header "n d", then one line per edge
//   i j m00 m01 ... m{d-1}{d-1}
// with 0-based ids, i < j, row-major blocks, 17 significant digits.
void write_graph(const std::string& path, const SyncProblem& problem);

// `require_rotations` validates each block as an element of SO(d); switch it
// off to ingest general invertible blocks.
SyncProblem read_graph(const std::string& path, bool require_rotations = true);

// Ground-truth file: header "n d", lines "i m00 ... m{d-1}{d-1}".
void write_rotations(const std::string& path, const std::vector<Rotation>& rotations,
                     const std::vector<bool>& valid = {});
std::vector<Rotation> read_rotations(const std::string& path, int expect_n = -1);

// Corruption sidecar: lines "i j s".
void write_edge_values(const std::string& path,
                       const std::vector<std::pair<int, int>>& edges,
                       const std::vector<double>& values);
// Weights output: lines "i j s w".
void write_edge_values2(const std::string& path,
                        const std::vector<std::pair<int, int>>& edges,
                        const std::vector<double>& a, const std::vector<double>& b);

struct ResultRow {
  std::string dataset;
  std::string method;
  int c = 0;
  int n = 0;
  double p = 0.0;
  double q = 0.0;
  std::uint64_t seed = 0;
  double mean_err_deg = 0.0;
  double median_err_deg = 0.0;
  double runtime_s = 0.0;
  int n_solved = 0;
};

inline constexpr const char* kResultHeader =
    "dataset,method,c,n,p,q,seed,mean_err_deg,median_err_deg,runtime_s,n_solved";

std::string format_row(const ResultRow& row);  // 12 significant digits
void append_rows(const std::string& path, const std::vector<ResultRow>& rows);

// Minimal polyline chart: one series per method, axis ticks, labels.
struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
};
void write_plot_data(const std::string& path, const std::vector<PlotSeries>& series);
void write_svg_chart(const std::string& path, const std::vector<PlotSeries>& series,
                     const std::string& x_label, const std::string& y_label);

struct ScalingBenchResult {
  std::vector<int> n_values;
  std::vector<double> seconds_per_iteration;
  double fitted_exponent = 0.0;
};

// Times one weight-update iteration at each n on a dense synthetic instance
// and fits the log-log slope.
ScalingBenchResult run_scaling_bench(const std::vector<int>& n_values, int c,
                                     double p, std::uint64_t seed, int repeats = 3);

}  // namespace longsync::io
