#pragma once

// Command dispatch for the experiment harness. Every run writes
// <prefix>.csv (data; byte-identical across runs and worker counts) and
// <prefix>.json (manifest: config echo, version, timestamps, summary).

#include <chrono>
#include <complex>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "circlesum/config.hpp"
#include "circlesum/csv.hpp"
#include "circlesum/dioph.hpp"
#include "circlesum/expsum.hpp"
#include "circlesum/linforms.hpp"
#include "circlesum/partial_sum.hpp"
#include "circlesum/singint.hpp"
#include "circlesum/thresholds.hpp"
#include "circlesum/variety.hpp"
#include "circlesum/version.hpp"

namespace circlesum {

using Json = nlohmann::ordered_json;

// Uniform grid { k / resolution : 0 <= k < resolution } per coordinate, in
// row-major order (first coordinate slowest).
inline std::vector<BlockVector> alpha_grid(const GradedSystem& shape,
                                           std::uint64_t resolution,
                                           std::uint64_t budget = 10'000'000) {
  if (resolution < 1) throw std::invalid_argument("resolution must be >= 1");
  const int R = shape.total_forms();
  long double total = std::pow(static_cast<long double>(resolution), R);
  if (total > static_cast<long double>(budget))
    throw budget_error("grid too large", static_cast<double>(total),
                       static_cast<double>(budget));
  std::uint64_t count = 1;
  for (int i = 0; i < R; ++i) count *= resolution;

  std::vector<BlockVector> out;
  out.reserve(count);
  for (std::uint64_t flat = 0; flat < count; ++flat) {
    BlockVector v = BlockVector::zeros_like(shape);
    std::uint64_t rest = flat;
    // row-major: the last coordinate varies fastest
    for (int idx = R - 1; idx >= 0; --idx) {
      std::uint64_t k = rest % resolution;
      rest /= resolution;
      int seen = 0;
      for (std::size_t b = 0; b < v.blocks.size(); ++b) {
        if (idx < seen + static_cast<int>(v.blocks[b].size())) {
          v.blocks[b][idx - seen] =
              static_cast<long double>(k) / static_cast<long double>(resolution);
          break;
        }
        seen += static_cast<int>(v.blocks[b].size());
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

namespace detail {

inline std::string utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline BlockVector block_vector_from_flat(const GradedSystem& s,
                                          const std::vector<double>& flat,
                                          const char* what) {
  BlockVector v = BlockVector::zeros_like(s);
  if (flat.size() != v.total_entries())
    throw ConfigError(std::string(what) + " expects " +
                      std::to_string(v.total_entries()) + " entries, got " +
                      std::to_string(flat.size()));
  std::size_t idx = 0;
  for (auto& blk : v.blocks)
    for (auto& x : blk) x = static_cast<long double>(flat[idx++]);
  return v;
}

inline std::vector<std::string> alpha_headers(const GradedSystem& s) {
  std::vector<std::string> h;
  for (int ell = 1; ell <= s.max_degree(); ++ell)
    for (int r = 1; r <= s.block_size(ell); ++r)
      h.push_back("alpha_" + std::to_string(ell) + "_" + std::to_string(r));
  return h;
}

inline std::string ext_rational_str(const ExtendedRational& x) {
  return x.is_infinite() ? "inf" : x.rational().get_str();
}

inline Json ext_rational_json(const ExtendedRational& x) {
  Json j;
  j["exact"] = ext_rational_str(x);
  j["value"] = x.to_double();
  return j;
}

inline void require_system(const ExperimentConfig& ex) {
  if (ex.system.n == 0)
    throw ConfigError("this command requires a [system] section");
}

}  // namespace detail

// touches every required key so malformed configs fail before any output
inline void validate_params(const ExperimentConfig& ex) {
  const KeyValueConfig& cfg = ex.raw;
  const std::string& c = ex.command;
  if (c != "partial-summation-check") detail::require_system(ex);
  if (c == "eval-sum") {
    cfg.get_double("params.P");
    cfg.get_double_list("params.alpha");
  } else if (c == "scan-alpha") {
    cfg.get_double("params.P");
    cfg.get_int("params.resolution");
  } else if (c == "count-variety" || c == "estimate-g") {
    cfg.get_int("params.ell");
    cfg.get_int_list("params.R0");
  } else if (c == "thresholds") {
    cfg.get_int_list("params.R0");
  } else if (c == "verify-dichotomy") {
    cfg.get_double("params.P");
    cfg.get_double("params.delta");
    cfg.get_double("params.omega");
    cfg.get_int("params.resolution");
  } else if (c == "singular-integral") {
    if (cfg.has("params.t_values")) {
      cfg.get_double_list("params.direction");
      cfg.get_double_list("params.t_values");
    } else {
      cfg.get_double_list("params.tau");
    }
  } else if (c == "partial-summation-check") {
    long long n = cfg.get_int("params.n");
    if (static_cast<long long>(cfg.get_int_list("params.N").size()) != n)
      throw ConfigError("params.N must list n bounds");
  }
}

inline void run_experiment(const ExperimentConfig& ex) {
  const std::string started = detail::utc_now();
  Json summary;
  const KeyValueConfig& cfg = ex.raw;

  validate_params(ex);

  std::filesystem::path prefix(ex.out_prefix);
  if (prefix.has_parent_path())
    std::filesystem::create_directories(prefix.parent_path());
  CsvWriter csv(ex.out_prefix + ".csv");

  const std::uint64_t lattice_budget = static_cast<std::uint64_t>(
      cfg.get_int_or("params.lattice_budget", 100'000'000));
  const std::uint64_t qscan_budget = static_cast<std::uint64_t>(
      cfg.get_int_or("params.qscan_budget", 10'000'000));
  const std::uint64_t grid_budget = static_cast<std::uint64_t>(
      cfg.get_int_or("params.grid_budget", 10'000'000));
  const std::uint64_t enum_budget = static_cast<std::uint64_t>(
      cfg.get_int_or("params.enumeration_budget", 100'000'000));
  const std::uint64_t cell_budget = static_cast<std::uint64_t>(
      cfg.get_int_or("params.cell_budget", 2'000'000));

  if (ex.command == "eval-sum") {
    detail::require_system(ex);
    long double P = cfg.get_double("params.P");
    BlockVector alpha = detail::block_vector_from_flat(
        ex.system, cfg.get_double_list("params.alpha"), "params.alpha");
    SumOptions opts{lattice_budget, ex.workers};
    auto value = exponential_sum(ex.system, BoxSpec{P, ex.system.n}, alpha, opts);
    csv.row({"re", "im", "abs"});
    csv.row({format_long_double(value.real()), format_long_double(value.imag()),
             format_long_double(std::abs(value))});
    summary["re"] = static_cast<double>(value.real());
    summary["im"] = static_cast<double>(value.imag());
    summary["abs"] = static_cast<double>(std::abs(value));
  } else if (ex.command == "scan-alpha") {
    detail::require_system(ex);
    long double P = cfg.get_double("params.P");
    std::uint64_t resolution =
        static_cast<std::uint64_t>(cfg.get_int("params.resolution"));
    auto grid = alpha_grid(ex.system, resolution, grid_budget);
    SumOptions opts{lattice_budget, 1};
    std::vector<std::complex<long double>> values(grid.size());
    parallel_chunks(grid.size(), ex.workers, [&](std::size_t i) {
      values[i] = exponential_sum(ex.system, BoxSpec{P, ex.system.n}, grid[i], opts);
    });
    auto header = detail::alpha_headers(ex.system);
    header.insert(header.end(), {"re", "im", "abs"});
    csv.row(header);
    double max_abs = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<std::string> row;
      for (const auto& blk : grid[i].blocks)
        for (long double a : blk) row.push_back(format_long_double(a));
      row.push_back(format_long_double(values[i].real()));
      row.push_back(format_long_double(values[i].imag()));
      row.push_back(format_long_double(std::abs(values[i])));
      csv.row(row);
      max_abs = std::max(max_abs, static_cast<double>(std::abs(values[i])));
    }
    summary["points"] = grid.size();
    summary["max_abs"] = max_abs;
  } else if (ex.command == "count-variety" || ex.command == "estimate-g") {
    detail::require_system(ex);
    int ell = static_cast<int>(cfg.get_int("params.ell"));
    auto r0_list = cfg.get_int_list("params.R0");
    CountOptions opts{enum_budget, ex.workers};
    CountSeries series;
    series.ell = ell;
    csv.row({"ell", "R0", "z"});
    for (long long r0 : r0_list) {
      std::uint64_t z = count_rank_deficient(ex.system, ell, r0, opts);
      series.samples.emplace_back(r0, z);
      csv.row({std::to_string(ell), std::to_string(r0), std::to_string(z)});
    }
    summary["ell"] = ell;
    summary["counts"] = Json::array();
    for (const auto& [r0, z] : series.samples)
      summary["counts"].push_back({{"R0", r0}, {"z", z}});
    if (ex.command == "estimate-g") {
      GEstimate est = estimate_g(series, ex.system.n, ell);
      summary["g_hat"] = est.g_hat;
      summary["std_err"] = est.std_err;
      summary["exponent_fit"] = est.exponent_fit;
      summary["zero_samples_replaced"] = est.zero_samples_replaced;
    }
  } else if (ex.command == "compute-b1") {
    detail::require_system(ex);
    LinearBlock block = linear_block(ex.system);
    auto value = b1(block);
    csv.row({"j", "b1", "gap"});
    if (value.has_value()) {
      csv.row({"0", std::to_string(*value), "0"});
      for (int j = 1; j <= ex.system.n; ++j) {
        auto restricted = b1(restrict_column(block, j));
        csv.row({std::to_string(j), std::to_string(*restricted),
                 std::to_string(*restricted - *value)});
      }
    }
    summary["r1"] = block.rows.size();
    summary["b1"] = value.has_value() ? Json(*value) : Json("inf");
  } else if (ex.command == "thresholds") {
    detail::require_system(ex);
    auto r0_list = cfg.get_int_list("params.R0");
    std::vector<std::int64_t> r0s(r0_list.begin(), r0_list.end());
    CountOptions opts{enum_budget, ex.workers};
    auto gammas = measure_gammas(ex.system, r0s, opts);
    csv.row({"ell", "r_ell", "g_hat", "std_err", "gamma", "gamma_prime"});
    std::vector<ExtendedRational> gamma_values;
    for (const auto& g : gammas) {
      gamma_values.push_back(g.gamma);
      csv.row({std::to_string(g.ell), std::to_string(g.r_ell),
               format_double(g.estimate.g_hat), format_double(g.estimate.std_err),
               g.r_ell > 0 ? format_double(g.gamma.to_double()) : "0",
               g.r_ell > 0 ? format_double(g.gamma_prime.to_double()) : ""});
    }
    ExtendedRational gsum = gamma_weighted_sum(gamma_values);
    int r1 = ex.system.block_size(1);
    std::optional<int> b1_observed;
    if (r1 > 0) b1_observed = b1(linear_block(ex.system));
    ThresholdReport rep =
        threshold_report(gsum, r1, ex.system.total_forms(), b1_observed);
    summary["gamma_sum"] = detail::ext_rational_json(rep.gamma_sum);
    summary["m0"] = detail::ext_rational_json(rep.m0);
    summary["b1_required"] = detail::ext_rational_json(rep.b1_req);
    summary["omega_sup"] = detail::ext_rational_json(rep.omega);
    summary["b1_observed"] =
        rep.b1_observed.has_value() ? Json(*rep.b1_observed) : Json("inf");
    summary["feasible"] = rep.feasible;
  } else if (ex.command == "verify-dichotomy") {
    detail::require_system(ex);
    long double P = cfg.get_double("params.P");
    double delta = cfg.get_double("params.delta");
    double omega = cfg.get_double("params.omega");
    std::uint64_t resolution =
        static_cast<std::uint64_t>(cfg.get_int("params.resolution"));
    auto grid = alpha_grid(ex.system, resolution, grid_budget);

    DichotomyOptions opts;
    opts.slack = cfg.get_double_or("params.slack", 1.0);
    opts.sum = SumOptions{lattice_budget, 1};
    opts.qscan = QScanOptions{qscan_budget, 1.0};
    opts.workers = ex.workers;
    if (cfg.has("params.gamma_sum")) {
      opts.measured_gamma_sum =
          ExtendedRational::from_double(cfg.get_double("params.gamma_sum"));
    } else if (cfg.has("params.R0")) {
      auto r0_list = cfg.get_int_list("params.R0");
      std::vector<std::int64_t> r0s(r0_list.begin(), r0_list.end());
      auto gammas = measure_gammas(ex.system, r0s,
                                   CountOptions{enum_budget, ex.workers});
      std::vector<ExtendedRational> gv;
      for (const auto& g : gammas) gv.push_back(g.gamma);
      opts.measured_gamma_sum = gamma_weighted_sum(gv);
    }

    auto [verdicts, sm] = verify_dichotomy(ex.system, P, delta, omega, grid, opts);

    auto header = detail::alpha_headers(ex.system);
    header.insert(header.end(), {"abs_S", "bound_i", "q", "classification"});
    csv.row(header);
    for (const auto& v : verdicts) {
      std::vector<std::string> row;
      for (const auto& blk : v.alpha.blocks)
        for (long double a : blk) row.push_back(format_long_double(a));
      if (v.failed) {
        row.insert(row.end(), {"", "", "", "ERROR"});
      } else {
        row.push_back(format_long_double(v.sum_magnitude));
        row.push_back(format_long_double(v.bound_i));
        row.push_back(v.witness.has_value() ? std::to_string(v.witness->q) : "");
        row.push_back(to_string(v.classification));
      }
      csv.row(row);
    }
    summary["points"] = verdicts.size();
    summary["alt_i"] = sm.alt_i;
    summary["alt_ii"] = sm.alt_ii;
    summary["both"] = sm.both;
    summary["violations"] = sm.violations;
    summary["errors"] = sm.errors;
    summary["violation_indices"] = sm.violation_indices;
    summary["omega_checked"] = sm.omega_checked;
    if (sm.omega_checked) summary["omega_admissible"] = sm.omega_admissible;
    if (opts.measured_gamma_sum.has_value())
      summary["gamma_sum"] = detail::ext_rational_json(*opts.measured_gamma_sum);
    summary["slack"] = opts.slack;
  } else if (ex.command == "singular-integral") {
    detail::require_system(ex);
    long double tol =
        static_cast<long double>(cfg.get_double_or("params.tol", 1e-9));
    QuadOptions opts;
    opts.cell_budget = cell_budget;
    opts.workers = ex.workers;
    if (cfg.has("params.t_values")) {
      BlockVector dir = detail::block_vector_from_flat(
          ex.system, cfg.get_double_list("params.direction"),
          "params.direction");
      auto ts = cfg.get_double_list("params.t_values");
      std::vector<long double> t_values(ts.begin(), ts.end());
      DecayFit fit = decay_exponent(ex.system, dir, t_values, tol, opts);
      csv.row({"t", "re", "im", "abs", "bound"});
      for (const auto& p : fit.table)
        csv.row({format_long_double(p.t), format_long_double(p.value.real()),
                 format_long_double(p.value.imag()),
                 format_long_double(std::abs(p.value)),
                 format_long_double(p.envelope)});
      summary["exponent"] = fit.exponent;
      summary["envelope_c"] = fit.envelope_c;
      summary["envelope_holds"] = fit.envelope_holds;
      summary["used_points"] = fit.used_points;
    } else {
      BlockVector tau = detail::block_vector_from_flat(
          ex.system, cfg.get_double_list("params.tau"), "params.tau");
      QuadResult q = singular_integral(ex.system, tau, tol, opts);
      csv.row({"re", "im", "abs", "err"});
      csv.row({format_long_double(q.value.real()),
               format_long_double(q.value.imag()),
               format_long_double(std::abs(q.value)),
               format_long_double(q.err_estimate)});
      summary["re"] = static_cast<double>(q.value.real());
      summary["im"] = static_cast<double>(q.value.imag());
      summary["abs"] = static_cast<double>(std::abs(q.value));
      summary["err"] = static_cast<double>(q.err_estimate);
      summary["converged"] = q.converged;
    }
  } else if (ex.command == "partial-summation-check") {
    int n = static_cast<int>(cfg.get_int("params.n"));
    auto n_list = cfg.get_int_list("params.N");
    std::vector<std::int64_t> N(n_list.begin(), n_list.end());
    int instances = static_cast<int>(cfg.get_int_or("params.instances", 20));
    std::uint64_t seed =
        static_cast<std::uint64_t>(cfg.get_int_or("params.seed", 1));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-0.45, 0.45);
    csv.row({"instance", "family", "residual"});
    double worst = 0;
    for (int inst = 0; inst < instances; ++inst) {
      std::vector<long double> c(n);
      for (auto& x : c) x = static_cast<long double>(coef(rng));
      SmoothField f;
      f.n = n;
      f.partial = [n, c](unsigned mask, std::span<const long double> x) {
        long double dot = 0.0L;
        for (int i = 0; i < n; ++i) dot += c[i] * x[i];
        std::complex<long double> v = unit_phase(dot);
        for (int i = 0; i < n; ++i)
          if (mask & (1u << i))
            v *= std::complex<long double>(0.0L, 2.0L * kPi * c[i]);
        return v;
      };
      bool parity = inst % 2 == 1;
      LatticeWeight rho = [parity](std::span<const std::int64_t> x) {
        if (!parity) return std::complex<long double>(1.0L, 0.0L);
        std::int64_t s = 0;
        for (auto v : x) s += v;
        return std::complex<long double>(s % 2 == 0 ? 1.0L : -1.0L, 0.0L);
      };
      long double resid = partial_summation_residual(f, rho, N);
      csv.row({std::to_string(inst), parity ? "exp-linear/parity" : "exp-linear/unit",
               format_long_double(resid)});
      worst = std::max(worst, static_cast<double>(resid));
    }
    summary["instances"] = instances;
    summary["max_residual"] = worst;
  }

  csv.close();

  Json manifest;
  manifest["version"] = kVersion;
  manifest["command"] = ex.command;
  manifest["workers"] = ex.workers;
  manifest["started_utc"] = started;
  manifest["finished_utc"] = detail::utc_now();
  Json echo;
  for (const auto& [key, entry] : cfg.entries()) echo[key] = entry.value;
  manifest["config"] = echo;
  manifest["summary"] = summary;
  std::ofstream json_out(ex.out_prefix + ".json", std::ios::binary);
  if (!json_out)
    throw std::runtime_error("cannot open " + ex.out_prefix + ".json");
  json_out << manifest.dump(2) << "\n";
}

// exit status contract: 0 ok, 1 validation failure, 2 budget exhaustion
inline int run_experiment_status(const ExperimentConfig& ex,
                                 std::string* diagnostic = nullptr) {
  try {
    run_experiment(ex);
    return 0;
  } catch (const budget_error& e) {
    if (diagnostic) *diagnostic = e.what();
    return 2;
  } catch (const std::exception& e) {
    if (diagnostic) *diagnostic = e.what();
    return 1;
  }
}

}  // namespace circlesum
