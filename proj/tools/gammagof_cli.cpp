// Command-line front end: test, power, kernel-eig, transform, sample.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gammagof/gammagof.hpp"

namespace fs = std::filesystem;
using namespace gammagof;

namespace {

std::vector<double> read_sample(const std::string& path) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path);
    if (!file) throw ParseError("cannot open input '" + path + "'");
    in = &file;
  }
  std::vector<double> x;
  std::string line;
  while (std::getline(*in, line)) {
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    x.push_back(parse_double(view));
  }
  return x;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-point goodness-of-fit tests for the Gamma family"};
  app.require_subcommand(1);

  // test
  auto* test = app.add_subcommand("test", "bootstrap test of a sample against the Gamma family");
  std::string input;
  std::vector<std::string> stats{"gn:1"};
  std::string estimator = "mle-approx";
  std::size_t b = 500;
  double alpha = 0.05;
  std::uint64_t seed = 42;
  unsigned workers = 1;
  bool full = false;
  test->add_option("--input", input, "one observation per line ('-' for stdin)")->required();
  test->add_option("--stat", stats, "statistic token(s), e.g. gn:1 ks t1:1")->delimiter(',');
  test->add_option("--estimator", estimator, "mle-approx | mle-newton | moment");
  test->add_option("--b", b, "bootstrap replicates");
  test->add_option("--alpha", alpha, "nominal level");
  test->add_option("--seed", seed, "master seed");
  test->add_option("--workers", workers, "worker threads");
  test->add_flag("--full", full, "print the full outcome as key=value lines");

  // power
  auto* power = app.add_subcommand("power", "Monte Carlo power study");
  std::string config_path;
  std::string out_dir = ".";
  unsigned power_workers = 0;
  power->add_option("--config", config_path, "study config file")->required();
  power->add_option("--out", out_dir, "output directory");
  power->add_option("--workers", power_workers, "worker threads (overrides the config)");

  // kernel-eig
  auto* keig = app.add_subcommand("kernel-eig", "eigenvalues of the null covariance operator");
  double shape = 2.0;
  double weight = 1.0;
  std::string keig_estimator = "mle-newton";
  int grid = 128;
  double t_max = 0.0;
  std::size_t draws = 0;
  keig->add_option("--k", shape, "Gamma shape")->required();
  keig->add_option("--a", weight, "weight parameter a of e^(-at)")->required();
  keig->add_option("--estimator", keig_estimator, "mle-approx | mle-newton | moment");
  keig->add_option("--grid", grid, "Nystrom node count (>= 16)");
  keig->add_option("--t-max", t_max, "truncation point (default: upper 1e-9 quantile + 30/a)");
  keig->add_option("--quantile-draws", draws, "also simulate the limit quantile at --alpha with this many draws");
  keig->add_option("--alpha", alpha, "level for --quantile-draws");
  keig->add_option("--seed", seed, "seed for --quantile-draws");

  // transform
  auto* tr = app.add_subcommand("transform", "empirical fixed-point transform as CSV");
  std::size_t points = 512;
  tr->add_option("--input", input, "one observation per line ('-' for stdin)")->required();
  tr->add_option("--estimator", estimator, "mle-approx | mle-newton | moment");
  tr->add_option("--points", points, "grid points");

  // sample
  auto* smp = app.add_subcommand("sample", "draw a sample from one of the study distributions");
  std::string family = "gamma:1";
  std::size_t n = 50;
  std::uint64_t stream = 0;
  smp->add_option("--dist", family, "family:theta, e.g. invgauss:0.5")->required();
  smp->add_option("--n", n, "sample size");
  smp->add_option("--seed", seed, "seed");
  smp->add_option("--stream", stream, "stream id");

  CLI11_PARSE(app, argc, argv);

  try {
    if (test->parsed()) {
      const auto x = read_sample(input);
      std::vector<StatisticSpec> specs;
      for (const auto& s : stats) specs.push_back(parse_statistic(s));
      BootstrapOptions opts;
      opts.estimator = parse_estimator(estimator);
      opts.b = b;
      opts.alpha = alpha;
      opts.seed = seed;
      opts.workers = workers;
      const auto outcomes = gof_tests(x, specs, opts);
      for (const auto& t : outcomes) {
        std::cout << format_statistic(t.spec) << " statistic=" << format_double(t.statistic)
                  << " critical=" << format_double(t.critical_value) << " p=" << format_double(t.p_value)
                  << " reject=" << (t.reject ? "yes" : "no") << " n=" << x.size() << " b=" << t.b
                  << " alpha=" << format_double(t.alpha) << " seed=" << t.seed << "\n";
        if (full) std::cout << format_outcome(t);
      }
    } else if (power->parsed()) {
      auto cfg = load_study_config(config_path);
      if (power_workers > 0) cfg.workers = power_workers;
      fs::create_directories(out_dir);
      for (const auto& table : run_power_study(cfg)) {
        const auto stem = fs::path(out_dir) / ("power_n" + std::to_string(table.n));
        write_file(stem.string() + ".csv", power_table_csv(table));
        write_file(stem.string() + ".txt", power_table_text(table));
        std::cout << stem.string() << ".csv\n" << stem.string() << ".txt\n";
      }
    } else if (keig->parsed()) {
      const auto kind = influence_kind(parse_estimator(keig_estimator));
      auto ctx = make_kernel_context(shape, kind, weight, grid);
      if (t_max > 0.0) ctx.t_max = t_max;
      const auto spectrum = nystrom_eigenvalues(ctx, weight);
      std::cout << "index,eigenvalue\n";
      for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
        std::cout << i + 1 << ',' << format_double(spectrum.eigenvalues[i]) << '\n';
      }
      if (spectrum.clamped > 0) {
        std::cerr << "warning: " << spectrum.clamped << " negative eigenvalues clamped to 0 (smallest "
                  << format_double(spectrum.min_raw) << ")\n";
      }
      if (draws > 0) {
        RngStream rng(seed, 0);
        std::cerr << "limit quantile at level " << format_double(alpha) << ": "
                  << format_double(limit_quantile(spectrum, alpha, draws, rng)) << "\n";
      }
    } else if (tr->parsed()) {
      const auto x = read_sample(input);
      const ScaledSample s(fit(x, parse_estimator(estimator)));
      const auto grid_points = diagnostic_grid(s, points);
      const auto curve = empirical_transform(s, grid_points);
      std::cout << "t,t_hat,f_hat\n";
      for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        std::cout << format_double(curve.grid[i]) << ',' << format_double(curve.t_hat[i]) << ','
                  << format_double(curve.f_hat[i]) << '\n';
      }
    } else if (smp->parsed()) {
      RngStream rng(seed, stream);
      for (double v : sample(parse_alternative(family), n, rng)) std::cout << format_double(v) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
