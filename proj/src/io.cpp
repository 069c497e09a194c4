#include "longsync/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "longsync/cycle_forms.hpp"
#include "longsync/longsync.hpp"
#include "longsync/rng.hpp"
#include "longsync/rotation.hpp"

namespace longsync::io {

std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  return out;
}

std::string g17(double v) { return format_sig(v, 17); }

}  // namespace

void write_graph(const std::string& path, const SyncProblem& problem) {
  auto out = open_out(path);
  out << problem.n << " " << problem.d << "\n";
  for (int e = 0; e < problem.edge_count(); ++e) {
    const auto& [i, j] = problem.edges[e];
    out << i << " " << j;
    const auto& m = problem.observations[e].matrix();
    for (int r = 0; r < problem.d; ++r)
      for (int c = 0; c < problem.d; ++c) out << " " << g17(m(r, c));
    out << "\n";
  }
}

SyncProblem read_graph(const std::string& path, bool require_rotations) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  std::string line;
  int lineno = 0;
  SyncProblem p;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  ++lineno;
  {
    std::istringstream hdr(line);
    if (!(hdr >> p.n >> p.d) || p.n < 1 || p.d < 1) {
      throw DataError(path + ":1: bad header, expected 'n d'");
    }
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    int i, j;
    if (!(ls >> i >> j)) {
      throw DataError(path + ":" + std::to_string(lineno) + ": bad edge ids");
    }
    if (i < 0 || j < 0 || i >= p.n || j >= p.n || i >= j) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": edge ids must satisfy 0 <= i < j < n");
    }
    Eigen::MatrixXd m(p.d, p.d);
    for (int r = 0; r < p.d; ++r)
      for (int c = 0; c < p.d; ++c) {
        if (!(ls >> m(r, c))) {
          throw DataError(path + ":" + std::to_string(lineno) + ": truncated block");
        }
      }
    p.edges.emplace_back(i, j);
    if (require_rotations) {
      try {
        p.observations.push_back(Rotation::from_matrix(m));
      } catch (const std::invalid_argument& err) {
        throw DataError(path + ":" + std::to_string(lineno) + ": " + err.what());
      }
    } else {
      p.observations.push_back(Rotation::unchecked(m));
    }
  }
  std::vector<size_t> order(p.edges.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return p.edges[a] < p.edges[b]; });
  for (size_t k = 1; k < order.size(); ++k) {
    if (p.edges[order[k]] == p.edges[order[k - 1]]) {
      throw DataError(path + ": duplicate edge (" +
                      std::to_string(p.edges[order[k]].first) + "," +
                      std::to_string(p.edges[order[k]].second) + ")");
    }
  }
  std::vector<std::pair<int, int>> edges;
  std::vector<Rotation> obs;
  edges.reserve(p.edges.size());
  obs.reserve(p.edges.size());
  for (size_t k : order) {
    edges.push_back(p.edges[k]);
    obs.push_back(p.observations[k]);
  }
  p.edges = std::move(edges);
  p.observations = std::move(obs);
  p.rebuild_index();
  return p;
}

void write_rotations(const std::string& path, const std::vector<Rotation>& rotations,
                     const std::vector<bool>& valid) {
  auto out = open_out(path);
  const int n = static_cast<int>(rotations.size());
  const int d = n > 0 ? rotations[0].dim() : 3;
  out << n << " " << d << "\n";
  for (int i = 0; i < n; ++i) {
    if (!valid.empty() && !valid[i]) continue;
    out << i;
    const auto& m = rotations[i].matrix();
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) out << " " << g17(m(r, c));
    out << "\n";
  }
}

std::vector<Rotation> read_rotations(const std::string& path, int expect_n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  int n = 0, d = 0;
  {
    std::istringstream hdr(line);
    if (!(hdr >> n >> d) || n < 1 || d < 1) throw DataError(path + ":1: bad header");
  }
  if (expect_n >= 0 && n != expect_n) {
    throw DataError(path + ": node count mismatch");
  }
  std::vector<Rotation> out(n, Rotation::identity(d));
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    int i;
    if (!(ls >> i) || i < 0 || i >= n) {
      throw DataError(path + ":" + std::to_string(lineno) + ": bad node id");
    }
    Eigen::MatrixXd m(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        if (!(ls >> m(r, c))) {
          throw DataError(path + ":" + std::to_string(lineno) + ": truncated block");
        }
      }
    out[i] = Rotation::unchecked(m);
  }
  return out;
}

void write_edge_values(const std::string& path,
                       const std::vector<std::pair<int, int>>& edges,
                       const std::vector<double>& values) {
  auto out = open_out(path);
  for (size_t k = 0; k < edges.size(); ++k) {
    out << edges[k].first << " " << edges[k].second << " " << g17(values[k]) << "\n";
  }
}

void write_edge_values2(const std::string& path,
                        const std::vector<std::pair<int, int>>& edges,
                        const std::vector<double>& a, const std::vector<double>& b) {
  auto out = open_out(path);
  for (size_t k = 0; k < edges.size(); ++k) {
    out << edges[k].first << " " << edges[k].second << " " << g17(a[k]) << " "
        << g17(b[k]) << "\n";
  }
}

std::string format_row(const ResultRow& row) {
  std::ostringstream out;
  out << row.dataset << "," << row.method << "," << row.c << "," << row.n << ","
      << format_sig(row.p, 12) << "," << format_sig(row.q, 12) << "," << row.seed << ","
      << format_sig(row.mean_err_deg, 12) << "," << format_sig(row.median_err_deg, 12)
      << "," << format_sig(row.runtime_s, 12) << "," << row.n_solved;
  return out.str();
}

void append_rows(const std::string& path, const std::vector<ResultRow>& rows) {
  bool need_header = true;
  {
    std::ifstream probe(path, std::ios::binary);
    if (probe && probe.peek() != std::ifstream::traits_type::eof()) need_header = false;
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot open for writing: " + path);
  if (need_header) out << kResultHeader << "\n";
  for (const auto& row : rows) out << format_row(row) << "\n";
}

void write_plot_data(const std::string& path, const std::vector<PlotSeries>& series) {
  auto out = open_out(path);
  for (const auto& s : series) {
    out << "# " << s.name << "\n";
    for (size_t k = 0; k < s.x.size(); ++k) {
      out << format_sig(s.x[k], 12) << " " << format_sig(s.y[k], 12) << "\n";
    }
    out << "\n";
  }
}

void write_svg_chart(const std::string& path, const std::vector<PlotSeries>& series,
                     const std::string& x_label, const std::string& y_label) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
    for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
  }
  if (xmin > xmax) { xmin = 0; xmax = 1; }
  if (ymin > ymax) { ymin = 0; ymax = 1; }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  ymin = std::min(ymin, 0.0);

  const double w = 640, h = 480, ml = 70, mr = 150, mt = 30, mb = 50;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf"};

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
      << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 5.0;
    const double yv = ymin + (ymax - ymin) * t / 5.0;
    out << "<line x1=\"" << px(xv) << "\" y1=\"" << h - mb << "\" x2=\"" << px(xv)
        << "\" y2=\"" << h - mb + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(xv) << "\" y=\"" << h - mb + 20
        << "\" font-size=\"11\" text-anchor=\"middle\">" << format_sig(xv, 4)
        << "</text>\n";
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml
        << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_sig(yv, 4)
        << "</text>\n";
  }
  out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 10
      << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << (mt + h - mb) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (mt + h - mb) / 2 << ")\">" << y_label << "</text>\n";
  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 7];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (size_t k = 0; k < series[s].x.size(); ++k) {
      out << px(series[s].x[k]) << "," << py(series[s].y[k]) << " ";
    }
    out << "\"/>\n";
    for (size_t k = 0; k < series[s].x.size(); ++k) {
      out << "<circle cx=\"" << px(series[s].x[k]) << "\" cy=\"" << py(series[s].y[k])
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    out << "<text x=\"" << w - mr + 10 << "\" y=\"" << mt + 16 * s + 12
        << "\" font-size=\"12\" fill=\"" << color << "\">" << series[s].name
        << "</text>\n";
  }
  out << "</svg>\n";
}

ScalingBenchResult run_scaling_bench(const std::vector<int>& n_values, int c, double p,
                                     std::uint64_t seed, int repeats) {
  ScalingBenchResult result;
  result.n_values = n_values;
  for (size_t k = 0; k < n_values.size(); ++k) {
    const int n = n_values[k];
    const SyncProblem problem = gen_ucm(n, p, 0.7, derive_seed(seed, k));
    const WeightMatrix a = problem.adjacency();
    const BlockMatrix r = problem.observation_matrix();
    // one warmup, then time the closed-form evaluation (the per-iteration cost)
    WeightMatrix w = a;
    (void)f_g_closed_form(w, r, c);
    double best = 1e300;
    for (int rep = 0; rep < repeats; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const CycleFormResult forms = f_g_closed_form(w, r, c);
      const double dt =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      best = std::min(best, dt);
      w = (a.array() * (-0.01 * forms.f.array().min(1.0)).exp()).matrix();
    }
    result.seconds_per_iteration.push_back(best);
  }
  // least-squares slope of log t against log n
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = static_cast<int>(n_values.size());
  for (int i = 0; i < m; ++i) {
    const double x = std::log(static_cast<double>(n_values[i]));
    const double y = std::log(result.seconds_per_iteration[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  if (m >= 2) result.fitted_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return result;
}

}  // namespace longsync::io
