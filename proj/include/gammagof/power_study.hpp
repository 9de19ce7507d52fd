#pragma once

// Monte Carlo power study: for each sample size and alternative, mc_reps
// samples are drawn and every configured statistic is tested on the same
// sample with one shared bootstrap set.
//
// Config grammar (one `key = value` per line, `#` starts a comment, lists are
// comma separated; a line ending in a comma continues on the next line):
//
//   sample_sizes = 20, 50
//   alternatives = gamma:1, invgauss:0.5, weibull:3
//   statistics   = gn:0.25, gn:1, ks, ad
//   mc_reps      = 1000
//   b            = 200
//   alpha        = 0.05
//   seed         = 1
//   estimator    = mle-approx
//   workers      = 1

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "gammagof/bootstrap.hpp"
#include "gammagof/distributions.hpp"
#include "gammagof/errors.hpp"
#include "gammagof/estimators.hpp"
#include "gammagof/parallel.hpp"
#include "gammagof/rng.hpp"
#include "gammagof/statistics.hpp"
#include "gammagof/text.hpp"

namespace gammagof {

struct StudyConfig {
  std::vector<std::size_t> sample_sizes;
  std::vector<AlternativeSpec> alternatives;
  std::vector<StatisticSpec> statistics;
  std::size_t mc_reps = 1000;
  std::size_t b = 200;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  EstimatorKind estimator = EstimatorKind::MleApprox;
  unsigned workers = 1;

  void validate() const {
    if (sample_sizes.empty()) throw ParseError("config: sample_sizes is empty");
    for (auto n : sample_sizes) {
      if (n < 2) throw ParseError("config: sample sizes must be at least 2");
    }
    if (alternatives.empty()) throw ParseError("config: alternatives is empty");
    if (mc_reps < 1) throw ParseError("config: mc_reps must be positive");
    if (b < 20) throw ParseError("config: b must be at least 20");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParseError("config: alpha must lie in (0, 1)");
  }
};

inline StudyConfig parse_study_config(std::istream& in) {
  StudyConfig cfg;
  std::string raw;
  int line_no = 0;
  auto strip = [](std::string_view text) {
    if (auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    return trim(text);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string joined(strip(raw));
    if (joined.empty()) continue;
    while (joined.back() == ',' && std::getline(in, raw)) {
      ++line_no;
      joined.append(strip(raw));
    }
    const std::string_view line(joined);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    try {
      if (key == "sample_sizes") {
        cfg.sample_sizes.clear();
        for (const auto& tok : split_list(value)) cfg.sample_sizes.push_back(parse_integer<std::size_t>(tok));
      } else if (key == "alternatives") {
        cfg.alternatives.clear();
        for (const auto& tok : split_list(value)) cfg.alternatives.push_back(parse_alternative(tok));
      } else if (key == "statistics") {
        cfg.statistics.clear();
        for (const auto& tok : split_list(value)) cfg.statistics.push_back(parse_statistic(tok));
      } else if (key == "mc_reps") {
        cfg.mc_reps = parse_integer<std::size_t>(value);
      } else if (key == "b") {
        cfg.b = parse_integer<std::size_t>(value);
      } else if (key == "alpha") {
        cfg.alpha = parse_double(value);
      } else if (key == "seed") {
        cfg.seed = parse_integer<std::uint64_t>(value);
      } else if (key == "estimator") {
        cfg.estimator = parse_estimator(value);
      } else if (key == "workers") {
        cfg.workers = parse_integer<unsigned>(value);
      } else {
        throw ParseError("unknown key '" + key + "'");
      }
    } catch (const ParseError& e) {
      throw ParseError("config line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DomainError& e) {
      throw ParseError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

inline StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  return parse_study_config(in);
}

struct PowerCell {
  double percent = 0.0;  // 100 * rejections / completed replications
  double std_error = 0.0;
  std::size_t rejections = 0;
  std::size_t completed = 0;
  std::size_t failures = 0;
  bool valid = true;
  std::string note;
};

struct PowerTable {
  std::size_t n = 0;
  std::size_t mc_reps = 0;
  std::size_t b = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  EstimatorKind estimator = EstimatorKind::MleApprox;
  std::vector<AlternativeSpec> rows;
  std::vector<StatisticSpec> columns;
  std::vector<std::vector<PowerCell>> cells;  // cells[row][column]

  bool operator==(const PowerTable& o) const {
    if (n != o.n || mc_reps != o.mc_reps || b != o.b || alpha != o.alpha || seed != o.seed ||
        estimator != o.estimator || rows != o.rows || columns != o.columns || cells.size() != o.cells.size()) {
      return false;
    }
    for (std::size_t r = 0; r < cells.size(); ++r) {
      if (cells[r].size() != o.cells[r].size()) return false;
      for (std::size_t c = 0; c < cells[r].size(); ++c) {
        const auto& x = cells[r][c];
        const auto& y = o.cells[r][c];
        if (x.percent != y.percent || x.std_error != y.std_error || x.rejections != y.rejections ||
            x.completed != y.completed || x.failures != y.failures || x.valid != y.valid || x.note != y.note) {
          return false;
        }
      }
    }
    return true;
  }
};

/// Seed of one (alternative, n) row; statistics in a row share its samples.
inline std::uint64_t row_seed(std::uint64_t master, const AlternativeSpec& alt, std::size_t n) {
  return hash_combine(hash_combine(master, hash_string(format_alternative(alt))), n);
}

inline void finish_cell(PowerCell& cell, std::size_t mc_reps) {
  if (cell.completed > 0) {
    const double p = static_cast<double>(cell.rejections) / static_cast<double>(cell.completed);
    cell.percent = 100.0 * p;
    cell.std_error = 100.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(cell.completed));
  }
  if (static_cast<double>(cell.failures) > 1e-3 * static_cast<double>(mc_reps)) {
    cell.valid = false;
    cell.note = std::to_string(cell.failures) + " of " + std::to_string(mc_reps) + " replications failed";
  }
}

/// One PowerTable per sample size, in config order.
inline std::vector<PowerTable> run_power_study(const StudyConfig& cfg) {
  cfg.validate();
  std::vector<PowerTable> tables;
  const std::size_t m = cfg.statistics.size();
  for (auto n : cfg.sample_sizes) {
    PowerTable table;
    table.n = n;
    table.mc_reps = cfg.mc_reps;
    table.b = cfg.b;
    table.alpha = cfg.alpha;
    table.seed = cfg.seed;
    table.estimator = cfg.estimator;
    table.rows = cfg.alternatives;
    table.columns = cfg.statistics;
    for (const auto& alt : cfg.alternatives) {
      const std::uint64_t seed = row_seed(cfg.seed, alt, n);
      // per replication: -1 failed, 0 accept, 1 reject (for each statistic)
      std::vector<signed char> outcome(cfg.mc_reps * std::max<std::size_t>(m, 1), 0);
      std::vector<char> failed(cfg.mc_reps, 0);
      parallel_for(m == 0 ? 0 : cfg.mc_reps, cfg.workers, [&](std::size_t rep) {
        RngStream rng(seed, rep);
        BootstrapOptions opts;
        opts.estimator = cfg.estimator;
        opts.b = cfg.b;
        opts.alpha = cfg.alpha;
        opts.seed = hash_combine(seed, rep);
        try {
          const auto x = sample(alt, n, rng);
          const auto results = gof_tests(x, cfg.statistics, opts);
          for (std::size_t s = 0; s < m; ++s) outcome[rep * m + s] = results[s].reject ? 1 : 0;
        } catch (const EstimationError&) {
          failed[rep] = 1;
        } catch (const DomainError&) {
          failed[rep] = 1;
        }
      });
      std::vector<PowerCell> row(m);
      for (std::size_t s = 0; s < m; ++s) {
        auto& cell = row[s];
        for (std::size_t rep = 0; rep < cfg.mc_reps; ++rep) {
          if (failed[rep]) {
            ++cell.failures;
            continue;
          }
          ++cell.completed;
          cell.rejections += static_cast<std::size_t>(outcome[rep * m + s]);
        }
        finish_cell(cell, cfg.mc_reps);
      }
      table.cells.push_back(std::move(row));
    }
    tables.push_back(std::move(table));
  }
  return tables;
}

inline constexpr std::string_view kPowerCsvHeader =
    "n,alternative,statistic,percent,std_error,rejections,completed,failures,valid,mc_reps,b,alpha,seed,estimator,"
    "note";

/// Long-format CSV, one line per cell, exact (round-trip) decimals.
inline std::string power_table_csv(const PowerTable& t) {
  std::string out(kPowerCsvHeader);
  out.push_back('\n');
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const auto& cell = t.cells[r][c];
      out += std::to_string(t.n) + ',' + format_alternative(t.rows[r]) + ',' + format_statistic(t.columns[c]) + ',' +
             format_double(cell.percent) + ',' + format_double(cell.std_error) + ',' +
             std::to_string(cell.rejections) + ',' + std::to_string(cell.completed) + ',' +
             std::to_string(cell.failures) + ',' + (cell.valid ? "1" : "0") + ',' + std::to_string(t.mc_reps) + ',' +
             std::to_string(t.b) + ',' + format_double(t.alpha) + ',' + std::to_string(t.seed) + ',' +
             std::string(estimator_token(t.estimator)) + ',' + cell.note + '\n';
    }
  }
  return out;
}

/// Inverse of power_table_csv. Rows and columns keep their first-appearance order.
inline PowerTable parse_power_table_csv(std::string_view text) {
  PowerTable t;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = text.substr(pos, end - pos);
    pos = end + 1;
    return true;
  };
  std::string_view line;
  if (!next_line(line) || trim(line) != kPowerCsvHeader) throw ParseError("power csv: missing header");
  bool first = true;
  while (next_line(line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (int i = 0; i < 14; ++i) {
      const auto comma = line.find(',', start);
      if (comma == std::string_view::npos) throw ParseError("power csv: too few fields");
      f.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    f.push_back(line.substr(start));
    if (first) {
      t.n = parse_integer<std::size_t>(f[0]);
      t.mc_reps = parse_integer<std::size_t>(f[9]);
      t.b = parse_integer<std::size_t>(f[10]);
      t.alpha = parse_double(f[11]);
      t.seed = parse_integer<std::uint64_t>(f[12]);
      t.estimator = parse_estimator(f[13]);
      first = false;
    }
    const auto alt = parse_alternative(f[1]);
    const auto stat = parse_statistic(f[2]);
    auto r = static_cast<std::size_t>(std::find(t.rows.begin(), t.rows.end(), alt) - t.rows.begin());
    if (r == t.rows.size()) {
      t.rows.push_back(alt);
      t.cells.emplace_back();
    }
    auto c = static_cast<std::size_t>(std::find(t.columns.begin(), t.columns.end(), stat) - t.columns.begin());
    if (c == t.columns.size()) t.columns.push_back(stat);
    auto& row = t.cells[r];
    if (row.size() <= c) row.resize(c + 1);
    auto& cell = row[c];
    cell.percent = parse_double(f[3]);
    cell.std_error = parse_double(f[4]);
    cell.rejections = parse_integer<std::size_t>(f[5]);
    cell.completed = parse_integer<std::size_t>(f[6]);
    cell.failures = parse_integer<std::size_t>(f[7]);
    cell.valid = f[8] == "1";
    cell.note = std::string(f[14]);
  }
  return t;
}

/// Plain-text layout: alternatives as rows, statistics as columns, percentages rounded.
inline std::string power_table_text(const PowerTable& t) {
  std::ostringstream out;
  out << "Empirical rejection rates (%) for n=" << t.n << ", " << t.mc_reps << " replications, b=" << t.b
      << ", alpha=" << format_double(t.alpha) << ", estimator=" << estimator_token(t.estimator)
      << ", seed=" << t.seed << "\n";
  std::size_t label_width = 12;
  for (const auto& alt : t.rows) label_width = std::max(label_width, alternative_label(alt).size() + 2);
  std::vector<std::size_t> widths;
  out << std::left << std::setw(static_cast<int>(label_width)) << "alternative" << std::right;
  for (const auto& stat : t.columns) {
    const auto name = format_statistic(stat);
    widths.push_back(std::max<std::size_t>(name.size() + 2, 7));
    out << std::setw(static_cast<int>(widths.back())) << name;
  }
  out << "\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out << std::left << std::setw(static_cast<int>(label_width)) << alternative_label(t.rows[r]) << std::right;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const auto& cell = t.cells[r][c];
      std::string v = cell.valid ? std::to_string(static_cast<long>(std::lround(cell.percent))) : "NA";
      out << std::setw(static_cast<int>(widths[c])) << v;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace gammagof
