#include <CLI11.hpp>

#include <Eigen/LU>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "longsync/cycle_forms.hpp"
#include "longsync/experiment.hpp"
#include "longsync/io.hpp"
#include "longsync/pipeline.hpp"
#include "longsync/rng.hpp"

namespace ls = longsync;
namespace io = longsync::io;

namespace {

struct GlobalOpts {
  int threads = 0;  // 0 = library default
  // With a single thread the tool promises byte-identical reruns, so wall
  // times are written as 0 in output files (stdout still shows them).
  bool stable_output() const { return threads == 1; }
};

double masked_runtime(const GlobalOpts& g, double t) { return g.stable_output() ? 0.0 : t; }

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_double_list(text)) out.push_back(static_cast<int>(v));
  return out;
}

std::vector<std::string> parse_string_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ls::LongSyncConfig config_from_flags(int c, const std::string& multilength, int T,
                                     double beta_cap, const std::string& policy) {
  ls::LongSyncConfig cfg;
  if (!multilength.empty()) {
    std::vector<int> lengths;
    std::vector<double> lambdas;
    for (const std::string& part : parse_string_list(multilength)) {
      const auto colon = part.find(':');
      if (colon == std::string::npos) {
        throw CLI::ValidationError("--multilength", "expected entries like 4:0.5");
      }
      lengths.push_back(std::stoi(part.substr(0, colon)));
      lambdas.push_back(std::stod(part.substr(colon + 1)));
    }
    cfg = ls::LongSyncConfig::with_lengths(lengths, lambdas);
  } else {
    cfg = ls::LongSyncConfig::with_length(c);
  }
  cfg.iterations = T;
  cfg.beta_cap = beta_cap;
  if (policy == "hold") {
    cfg.policy = ls::NoCyclePolicy::kHoldPrevious;
  } else if (policy != "one") {
    throw CLI::ValidationError("--policy", "must be 'one' or 'hold'");
  }
  return cfg;
}

std::optional<ls::SyncProblem> try_load_truth(ls::SyncProblem& problem,
                                              const std::string& graph_path,
                                              const std::string& truth_flag) {
  std::string path = truth_flag;
  if (path.empty()) {
    const std::string guess = graph_path + ".truth";
    if (std::filesystem::exists(guess)) path = guess;
  }
  if (path.empty()) return std::nullopt;
  problem.ground_truth = io::read_rotations(path, problem.n);
  return problem;
}

int cmd_gen(const GlobalOpts&, const std::string& model, int n, double p, double q,
            std::uint64_t seed, double bad_fraction, double bad_angle_deg,
            const std::string& out) {
  ls::SyncProblem problem;
  if (model == "ucm") {
    problem = ls::gen_ucm(n, p, 1.0 - q, seed);
  } else if (model == "ubcm") {
    problem = ls::gen_ubcm(n, p, 1.0 - q, seed);
  } else if (model == "adversarial") {
    auto base = ls::gen_ucm(n, p, 1.0, seed);  // edge set only
    auto rng = ls::make_rng(ls::derive_seed(seed, 0xadf));
    std::vector<std::pair<int, int>> bad;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (const auto& e : base.edges) {
      if (unif(rng) < bad_fraction) bad.push_back(e);
    }
    const double angle = bad_angle_deg * M_PI / 180.0;
    ls::CorruptionSampler sampler = [angle](std::mt19937_64& r,
                                            const ls::Rotation& clean) {
      std::normal_distribution<double> gauss(0.0, 1.0);
      Eigen::Vector3d axis(gauss(r), gauss(r), gauss(r));
      return ls::Rotation::unchecked(
          ls::Rotation::axis_angle(axis, angle).matrix() * clean.matrix());
    };
    problem = ls::gen_adversarial(n, base.edges, bad, sampler, seed);
  } else {
    throw CLI::ValidationError("model", "must be ucm, ubcm or adversarial");
  }
  io::write_graph(out, problem);
  io::write_rotations(out + ".truth", *problem.ground_truth);
  io::write_edge_values(out + ".corruption", problem.edges, *problem.true_corruption);
  std::cout << "wrote " << out << " (n=" << problem.n
            << ", edges=" << problem.edge_count() << ")\n";
  return io::kExitOk;
}

int cmd_weights(const GlobalOpts&, const std::string& in, int c,
                const std::string& multilength, int T, double beta_cap,
                const std::string& policy, const std::string& metric,
                const std::string& out) {
  const ls::LongSyncConfig cfg = config_from_flags(c, multilength, T, beta_cap, policy);
  ls::LongSyncState state;
  ls::SyncProblem problem;
  if (metric == "frobenius") {
    problem = io::read_graph(in, /*require_rotations=*/false);
    ls::BlockMatrix g(problem.n, problem.d);
    ls::WeightMatrix a = ls::WeightMatrix::Zero(problem.n, problem.n);
    for (int e = 0; e < problem.edge_count(); ++e) {
      const auto& [i, j] = problem.edges[e];
      const Eigen::MatrixXd& m = problem.observations[e].matrix();
      g.block(i, j) = m;
      g.block(j, i) = m.inverse();
      a(i, j) = a(j, i) = 1.0;
    }
    state = ls::longsync_linear_group(g, a, cfg);
  } else if (metric == "chordal") {
    problem = io::read_graph(in);
    state = ls::longsync_run(problem, cfg);
  } else {
    throw CLI::ValidationError("--metric", "must be chordal or frobenius");
  }
  std::vector<double> s, w;
  for (const auto& [i, j] : problem.edges) {
    s.push_back(state.S(i, j));
    w.push_back(state.W(i, j));
  }
  io::write_edge_values2(out, problem.edges, s, w);
  std::cout << "wrote " << out << " (" << problem.edge_count() << " edges, "
            << state.starved_edges.size() << " starved)\n";
  return io::kExitOk;
}

int cmd_solve(const GlobalOpts& g, const std::string& in, const std::string& truth,
              const std::string& method, int c, std::uint64_t seed,
              const std::string& out, const std::string& csv) {
  ls::SyncProblem problem = io::read_graph(in);
  try_load_truth(problem, in, truth);
  const ls::MethodSpec spec = ls::parse_method(method, c);
  const ls::MethodRun run = ls::run_method(problem, spec, seed);

  if (!out.empty()) {
    std::vector<bool> valid(run.assignment.solved.begin(), run.assignment.solved.end());
    io::write_rotations(out, run.assignment.rotations, valid);
  }
  io::ResultRow row;
  row.dataset = std::filesystem::path(in).stem().string();
  row.method = run.spec.name;
  row.c = run.spec.kind == ls::MethodSpec::Kind::kIrls ? 0 : run.spec.c;
  row.n = problem.n;
  row.p = problem.n > 1 ? 2.0 * problem.edge_count() /
                              (static_cast<double>(problem.n) * (problem.n - 1))
                        : 0.0;
  row.q = std::nan("");
  row.seed = seed;
  row.mean_err_deg = run.errors ? run.errors->mean_deg : std::nan("");
  row.median_err_deg = run.errors ? run.errors->median_deg : std::nan("");
  row.runtime_s = masked_runtime(g, run.runtime_s);
  row.n_solved = run.n_solved;
  if (!csv.empty()) io::append_rows(csv, {row});

  std::cout << run.spec.name << ": solved " << run.n_solved << "/" << problem.n;
  if (run.errors) {
    std::cout << ", mean " << io::format_sig(run.errors->mean_deg, 6) << " deg, median "
              << io::format_sig(run.errors->median_deg, 6) << " deg";
  }
  std::cout << " (" << io::format_sig(run.runtime_s, 3) << " s)\n";
  return io::kExitOk;
}

int cmd_sweep(const GlobalOpts& g, const std::string& model, int n, double p,
              const std::string& q_grid, int trials, const std::string& methods,
              std::uint64_t seed, const std::string& out_csv,
              const std::string& out_plotdata, const std::string& out_svg) {
  const std::vector<double> qs = parse_double_list(q_grid);
  const std::vector<std::string> method_names = parse_string_list(methods);
  if (qs.empty() || method_names.empty()) {
    throw CLI::ValidationError("sweep", "empty q grid or method list");
  }
  std::vector<ls::MethodSpec> specs;
  for (const auto& m : method_names) specs.push_back(ls::parse_method(m));

  struct Job {
    size_t qi;
    int trial;
  };
  std::vector<Job> jobs;
  for (size_t qi = 0; qi < qs.size(); ++qi)
    for (int t = 0; t < trials; ++t) jobs.push_back({qi, t});

  // one row per (q, trial, method); filled by independent workers
  std::vector<std::vector<io::ResultRow>> rows(jobs.size());
  std::atomic<size_t> next{0};
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = g.threads > 0 ? static_cast<unsigned>(g.threads)
                                         : std::min<unsigned>(hw, jobs.size());
  auto work = [&]() {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) return;
      const auto [qi, trial] = jobs[idx];
      const double q = qs[qi];
      const std::uint64_t trial_seed =
          ls::derive_seed(seed, qi * 1000003ULL + static_cast<std::uint64_t>(trial));
      const ls::SyncProblem problem = model == "ubcm"
                                          ? ls::gen_ubcm(n, p, 1.0 - q, trial_seed)
                                          : ls::gen_ucm(n, p, 1.0 - q, trial_seed);
      for (const auto& spec : specs) {
        const ls::MethodRun run = ls::run_method(problem, spec, trial_seed);
        io::ResultRow row;
        row.dataset = model;
        row.method = run.spec.name;
        row.c = run.spec.kind == ls::MethodSpec::Kind::kIrls ? 0 : run.spec.c;
        row.n = n;
        row.p = p;
        row.q = q;
        row.seed = trial_seed;
        row.mean_err_deg = run.errors ? run.errors->mean_deg : std::nan("");
        row.median_err_deg = run.errors ? run.errors->median_deg : std::nan("");
        row.runtime_s = masked_runtime(g, run.runtime_s);
        row.n_solved = run.n_solved;
        rows[idx].push_back(row);
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    ls::set_num_threads(1);  // keep kernels sequential inside parallel trials
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    ls::set_num_threads(g.threads);
  }

  std::vector<io::ResultRow> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  if (!out_csv.empty()) io::append_rows(out_csv, flat);

  std::vector<io::PlotSeries> series;
  for (const auto& spec : specs) {
    io::PlotSeries s;
    s.name = spec.name;
    for (size_t qi = 0; qi < qs.size(); ++qi) {
      double sum = 0.0;
      int count = 0;
      for (const auto& per_job : rows) {
        for (const auto& row : per_job) {
          if (row.method == spec.name && row.q == qs[qi] && !std::isnan(row.mean_err_deg)) {
            sum += row.mean_err_deg;
            ++count;
          }
        }
      }
      s.x.push_back(qs[qi]);
      s.y.push_back(count > 0 ? sum / count : std::nan(""));
    }
    series.push_back(std::move(s));
    std::cout << series.back().name << ":";
    for (size_t qi = 0; qi < qs.size(); ++qi) {
      std::cout << "  q=" << qs[qi] << " -> "
                << io::format_sig(series.back().y[qi], 5) << " deg";
    }
    std::cout << "\n";
  }
  if (!out_plotdata.empty()) io::write_plot_data(out_plotdata, series);
  if (!out_svg.empty()) {
    io::write_svg_chart(out_svg, series, "corruption probability q", "mean error (deg)");
  }
  return io::kExitOk;
}

int cmd_distributed(const GlobalOpts& g, const std::string& in, const std::string& truth,
                    int k, bool no_jaccard, int prune_degree, double prune_corruption,
                    std::uint64_t seed, const std::string& out,
                    const std::string& rotations_out, const std::string& csv) {
  ls::SyncProblem problem = io::read_graph(in);
  try_load_truth(problem, in, truth);

  ls::PipelineOptions opts;
  opts.k_override = k;
  opts.use_jaccard = !no_jaccard;
  opts.prune_degree = prune_degree;
  opts.prune_corruption = prune_corruption;
  opts.seed = seed;
  const ls::PipelineReport report = ls::run_pipeline(problem, opts);

  std::ostringstream text;
  text << "clusters " << report.plan.k << "\n";
  const char* stage_names[5] = {"partition", "intra_refine", "inter_rotations",
                                "stitch_merge", "report"};
  for (int s = 0; s < 5; ++s) {
    text << "stage " << stage_names[s] << " "
         << io::format_sig(masked_runtime(g, report.stage_seconds[s]), 12) << "\n";
  }
  text << "nodes solved " << report.n_solved << " pruned " << report.n_pruned
       << " unsolved " << report.n_unsolved << "\n";
  if (report.errors) {
    text << "mean_err_deg " << io::format_sig(report.errors->mean_deg, 12) << "\n";
    text << "median_err_deg " << io::format_sig(report.errors->median_deg, 12) << "\n";
  }
  for (int e = 0; e < problem.edge_count(); ++e) {
    if (!std::isnan(report.edge_corruption[e])) {
      text << "edge " << problem.edges[e].first << " " << problem.edges[e].second << " "
           << io::format_sig(report.edge_corruption[e], 12) << "\n";
    }
  }
  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw io::DataError("cannot open for writing: " + out);
    f << text.str();
  }
  if (!rotations_out.empty()) {
    std::vector<bool> valid(problem.n, false);
    for (int i = 0; i < problem.n; ++i)
      valid[i] = report.status[i] == ls::NodeStatus::kSolved;
    io::write_rotations(rotations_out, report.final_rotations, valid);
  }
  if (!csv.empty()) {
    io::ResultRow row;
    row.dataset = std::filesystem::path(in).stem().string();
    row.method = "distributed";
    row.c = 3;
    row.n = problem.n;
    row.p = problem.n > 1 ? 2.0 * problem.edge_count() /
                                (static_cast<double>(problem.n) * (problem.n - 1))
                          : 0.0;
    row.q = std::nan("");
    row.seed = seed;
    row.mean_err_deg = report.errors ? report.errors->mean_deg : std::nan("");
    row.median_err_deg = report.errors ? report.errors->median_deg : std::nan("");
    double total = 0.0;
    for (double s : report.stage_seconds) total += s;
    row.runtime_s = masked_runtime(g, total);
    row.n_solved = report.n_solved;
    io::append_rows(csv, {row});
  }
  std::cout << "pipeline: solved " << report.n_solved << "/" << problem.n;
  if (report.errors) {
    std::cout << ", median " << io::format_sig(report.errors->median_deg, 6) << " deg";
  }
  std::cout << "\n";
  return io::kExitOk;
}

int cmd_verify_forms(const GlobalOpts&, int trials, int n_min, int n_max,
                     const std::string& c_set, std::uint64_t seed, double tol) {
  const std::vector<int> cs = parse_int_list(c_set);
  const ls::VerifyFormsReport report =
      ls::verify_forms(seed, trials, n_min, n_max, cs, tol);
  for (const auto& entry : report.per_c) {
    const ls::CycleFormStats stats = ls::cycle_form_stats(entry.c);
    std::cout << "c=" << entry.c << " trials=" << entry.trials << " max_f_err="
              << io::format_sig(entry.max_f_error, 3) << " max_g_err="
              << io::format_sig(entry.max_g_error, 3) << " summands="
              << stats.summands_f << "/" << stats.summands_g
              << " dense_multiplies=" << stats.dense_multiplies << " "
              << (entry.pass ? "ok" : "MISMATCH") << "\n";
  }
  return report.all_pass ? io::kExitOk : io::kExitVerification;
}

int cmd_bench(const GlobalOpts&, const std::string& n_grid, int c, bool dense,
              std::uint64_t seed) {
  const std::vector<int> ns = parse_int_list(n_grid);
  const double p = dense ? 1.0 : 0.5;
  const io::ScalingBenchResult result = io::run_scaling_bench(ns, c, p, seed);
  for (size_t k = 0; k < result.n_values.size(); ++k) {
    std::cout << "n=" << result.n_values[k] << " t_iter="
              << io::format_sig(result.seconds_per_iteration[k], 4) << " s\n";
  }
  std::cout << "fitted exponent " << io::format_sig(result.fitted_exponent, 4) << "\n";
  return io::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corruption-level estimation and rotation synchronization toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  if (const char* env = std::getenv("LONGSYNC_THREADS")) g.threads = std::atoi(env);
  app.add_option("--threads", g.threads,
                 "kernel/trial thread count (1 = byte-stable outputs, 0 = auto)");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
  std::string gen_model = "ucm", gen_out = "graph.txt";
  int gen_n = 100;
  double gen_p = 1.0, gen_q = 0.5, gen_bad_fraction = 0.05, gen_bad_angle = 100.0;
  std::uint64_t gen_seed = 0;
  gen->add_option("model", gen_model, "ucm | ubcm | adversarial")->required();
  gen->add_option("-n,--nodes", gen_n, "node count");
  gen->add_option("-p,--edge-prob", gen_p, "edge keep probability");
  gen->add_option("-q,--corruption", gen_q, "corruption probability (1 - q_g)");
  gen->add_option("--bad-fraction", gen_bad_fraction, "adversarial: fraction of bad edges");
  gen->add_option("--bad-angle", gen_bad_angle, "adversarial: corruption angle (deg)");
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--out", gen_out, "output graph file")->required();

  // weights
  auto* weights = app.add_subcommand("weights", "estimate per-edge corruption levels");
  std::string w_in, w_out = "weights.txt", w_multilength, w_policy = "one",
              w_metric = "chordal";
  int w_c = 3, w_T = 10;
  double w_beta_cap = 20.0;
  weights->add_option("--in", w_in, "input graph file")->required();
  weights->add_option("--c", w_c, "cycle length (3..6)");
  weights->add_option("--multilength", w_multilength, "e.g. '3:0.5,4:0.5'");
  weights->add_option("--T", w_T, "iteration count");
  weights->add_option("--beta-cap", w_beta_cap, "cap for the default beta schedule");
  weights->add_option("--policy", w_policy, "starved-edge policy: one | hold");
  weights->add_option("--metric", w_metric, "chordal | frobenius (general blocks)");
  weights->add_option("--out", w_out, "output file: 'i j s w' per edge")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "full estimation protocol on one instance");
  std::string s_in, s_truth, s_method = "longsync+irls", s_out, s_csv;
  int s_c = 3;
  std::uint64_t s_seed = 0;
  solve->add_option("--in", s_in, "input graph file")->required();
  solve->add_option("--truth", s_truth, "ground-truth rotations file");
  solve->add_option("--method", s_method, "irls | cemp+irls | longsync+irls");
  solve->add_option("--c", s_c, "cycle length for weighting methods");
  solve->add_option("--seed", s_seed, "rng seed");
  solve->add_option("--out", s_out, "output rotations file");
  solve->add_option("--csv", s_csv, "append a result row to this CSV");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "corruption sweep over q with repeated trials");
  std::string sw_model = "ucm", sw_qgrid = "0.86,0.88,0.90",
              sw_methods = "irls,cemp+irls,longsync4+irls,longsync5+irls", sw_csv,
              sw_plotdata, sw_svg;
  int sw_n = 200, sw_trials = 20;
  double sw_p = 1.0;
  std::uint64_t sw_seed = 0;
  sweep->add_option("--model", sw_model, "ucm | ubcm");
  sweep->add_option("-n,--nodes", sw_n, "node count");
  sweep->add_option("-p,--edge-prob", sw_p, "edge keep probability");
  sweep->add_option("--q-grid", sw_qgrid, "comma-separated corruption probabilities");
  sweep->add_option("--trials", sw_trials, "trials per q");
  sweep->add_option("--methods", sw_methods, "comma-separated method names");
  sweep->add_option("--seed", sw_seed, "master seed");
  sweep->add_option("--out-csv", sw_csv, "per-trial result rows");
  sweep->add_option("--out-plotdata", sw_plotdata, "x/y series per method");
  sweep->add_option("--out-svg", sw_svg, "line chart");

  // distributed
  auto* dist = app.add_subcommand("distributed", "clustered synchronization pipeline");
  std::string d_in, d_truth, d_out, d_rot, d_csv;
  int d_k = -1, d_prune_degree = 4;
  double d_prune_corruption = 0.1;
  bool d_no_jaccard = false;
  std::uint64_t d_seed = 0;
  dist->add_option("--in", d_in, "input graph file")->required();
  dist->add_option("--truth", d_truth, "ground-truth rotations file");
  dist->add_option("--k", d_k, "cluster count override");
  dist->add_flag("--no-jaccard", d_no_jaccard, "cluster on plain adjacency");
  dist->add_option("--prune-degree", d_prune_degree, "good-edge degree threshold");
  dist->add_option("--prune-corruption", d_prune_corruption, "good-edge corruption threshold");
  dist->add_option("--seed", d_seed, "rng seed");
  dist->add_option("--out", d_out, "report file");
  dist->add_option("--rotations-out", d_rot, "final rotations file");
  dist->add_option("--csv", d_csv, "append a result row to this CSV");

  // verify-forms
  auto* verify = app.add_subcommand("verify-forms", "closed forms vs enumeration oracle");
  int v_trials = 100, v_nmin = 6, v_nmax = 10;
  std::string v_cset = "3,4,5,6";
  std::uint64_t v_seed = 0;
  double v_tol = 1e-9;
  verify->add_option("--trials", v_trials, "trials per cycle length");
  verify->add_option("--n-min", v_nmin, "smallest instance size");
  verify->add_option("--n,--n-max", v_nmax, "largest instance size");
  verify->add_option("--c-set", v_cset, "comma-separated cycle lengths");
  verify->add_option("--seed", v_seed, "rng seed");
  verify->add_option("--tol", v_tol, "max allowed deviation");

  // bench
  auto* bench = app.add_subcommand("bench", "per-iteration scaling across n");
  std::string b_ngrid = "100,200,400";
  int b_c = 4;
  bool b_dense = false;
  std::uint64_t b_seed = 0;
  bench->add_option("--n-grid", b_ngrid, "comma-separated instance sizes");
  bench->add_option("--c", b_c, "cycle length");
  bench->add_flag("--dense", b_dense, "complete graph (p = 1)");
  bench->add_option("--seed", b_seed, "rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return io::kExitUsage;
  }

  ls::set_num_threads(g.threads);
  try {
    if (gen->parsed()) {
      return cmd_gen(g, gen_model, gen_n, gen_p, gen_q, gen_seed, gen_bad_fraction,
                     gen_bad_angle, gen_out);
    }
    if (weights->parsed()) {
      return cmd_weights(g, w_in, w_c, w_multilength, w_T, w_beta_cap, w_policy,
                         w_metric, w_out);
    }
    if (solve->parsed()) {
      return cmd_solve(g, s_in, s_truth, s_method, s_c, s_seed, s_out, s_csv);
    }
    if (sweep->parsed()) {
      return cmd_sweep(g, sw_model, sw_n, sw_p, sw_qgrid, sw_trials, sw_methods, sw_seed,
                       sw_csv, sw_plotdata, sw_svg);
    }
    if (dist->parsed()) {
      return cmd_distributed(g, d_in, d_truth, d_k, d_no_jaccard, d_prune_degree,
                             d_prune_corruption, d_seed, d_out, d_rot, d_csv);
    }
    if (verify->parsed()) {
      return cmd_verify_forms(g, v_trials, v_nmin, v_nmax, v_cset, v_seed, v_tol);
    }
    if (bench->parsed()) {
      return cmd_bench(g, b_ngrid, b_c, b_dense, b_seed);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return io::kExitUsage;
  } catch (const io::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return io::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return io::kExitData;
  }
  return io::kExitUsage;
}
