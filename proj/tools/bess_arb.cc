// Copyright 2026 The bess-arbitrage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// bess-arb: ingest market data, run receding-horizon backtests and sweeps.
//
// Exit codes: 0 success, 1 I/O, 2 config or format, 3 data coverage.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "bess/backtest.hpp"
#include "bess/config.hpp"
#include "bess/error_stats.hpp"
#include "bess/errors.hpp"
#include "bess/marketdata.hpp"
#include "bess/sweep.hpp"
#include "bess/synth.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kIoFailure = 1, kBadInput = 2, kDataGap = 3 };

constexpr const char* kVersion = "1.0.0";

struct GlobalOptions {
  std::string config;
  std::string out;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string log_level = "warn";
};

struct TableFlags {
  std::optional<std::string> report, table, region_column, run_time_column,
      target_time_column, price_column, timestamp_format;
  std::optional<int> offset;

  void Register(CLI::App* cmd, const std::string& prefix) {
    cmd->add_option("--" + prefix + "-report", report, "report name in the I records");
    cmd->add_option("--" + prefix + "-table", table, "table name in the I records");
    cmd->add_option("--" + prefix + "-region-column", region_column);
    cmd->add_option("--" + prefix + "-run-time-column", run_time_column);
    cmd->add_option("--" + prefix + "-target-time-column", target_time_column);
    cmd->add_option("--" + prefix + "-price-column", price_column);
    cmd->add_option("--" + prefix + "-timestamp-format", timestamp_format);
    cmd->add_option("--" + prefix + "-offset", offset, "minutes added to parsed target times");
  }

  void Apply(bess::AemoTableSpec& spec) const {
    if (report) spec.report = *report;
    if (table) spec.table = *table;
    if (region_column) spec.region_column = *region_column;
    if (run_time_column) spec.run_time_column = *run_time_column;
    if (target_time_column) spec.target_time_column = *target_time_column;
    if (price_column) spec.price_column = *price_column;
    if (timestamp_format) spec.timestamp_format = *timestamp_format;
    if (offset) spec.target_offset_minutes = *offset;
  }
};

std::string UtcNow() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream OpenOutput(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw bess::IoError(path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bess::IoError(path.string() + ": cannot open for writing");
  return out;
}

void WriteFile(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out = OpenOutput(path);
  body(out);
  out.flush();
  if (!out) throw bess::IoError(path.string() + ": write failed");
}

// Wall-clock facts live here so that data files depend only on inputs.
class RunRecord {
 public:
  RunRecord(std::string command, int argc, char** argv)
      : started_(UtcNow()), clock_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["version"] = kVersion;
    auto& args = doc_["argv"] = nlohmann::json::array();
    for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
  }

  nlohmann::json& operator[](const char* key) { return doc_[key]; }
  void AddOutput(const fs::path& path) { doc_["outputs"].push_back(path.string()); }

  void Write(const fs::path& sidecar) {
    doc_["started_utc"] = started_;
    doc_["finished_utc"] = UtcNow();
    doc_["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_).count();
    WriteFile(sidecar, [&](std::ostream& out) { out << doc_.dump(2) << '\n'; });
  }

 private:
  nlohmann::json doc_;
  std::string started_;
  std::chrono::steady_clock::time_point clock_;
};

fs::path SidecarFor(const fs::path& out, bool is_dir) {
  return is_dir ? out / "run.meta.json" : fs::path(out.string() + ".meta.json");
}

bess::RunConfig LoadConfig(const GlobalOptions& g) {
  if (g.config.empty()) throw bess::FormatError("--config is required for this command");
  bess::RunConfig config = bess::LoadRunConfig(g.config);
  if (g.seed) {
    if (auto* synth = std::get_if<bess::SynthConfig>(&config.data)) synth->seed = *g.seed;
  }
  return config;
}

bess::LoadedData LoadData(bess::RunConfig& config) {
  bess::LoadedData data = bess::LoadMarketData(config);
  for (const auto& d : data.diagnostics) spdlog::warn("{}", d);
  spdlog::info("{} forecast rows in {} snapshots, {} actual rows", data.forecast_rows,
               data.market.forecasts.size(), data.actual_rows);
  return data;
}

// ---- parse ----------------------------------------------------------------

struct ParseArgs {
  std::string raw;
  std::string actuals;
  std::string region;
  std::string policy = "fail";
  TableFlags forecast_flags, actual_flags;
};

int RunParse(const GlobalOptions& g, const ParseArgs& a, RunRecord& record) {
  bess::RawDataSource source;
  bess::InvalidDataPolicy policy = a.policy == "skip" ? bess::InvalidDataPolicy::kSkip
                                                      : bess::InvalidDataPolicy::kFail;
  if (!g.config.empty()) {
    bess::RunConfig config = bess::LoadRunConfig(g.config);
    if (const auto* raw = std::get_if<bess::RawDataSource>(&config.data)) source = *raw;
    policy = config.invalid_data;
  }
  if (!a.raw.empty()) source.raw_dir = a.raw;
  if (!a.actuals.empty()) source.actuals_file = a.actuals;
  if (!a.region.empty()) source.region = a.region;
  a.forecast_flags.Apply(source.forecast_spec);
  a.actual_flags.Apply(source.actual_spec);
  if (source.raw_dir.empty() && source.actuals_file.empty())
    throw bess::FormatError("parse needs --raw and/or --actuals (or a config with raw data)");

  const fs::path out_dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  const bess::LoadOptions options{source.region, policy};
  std::size_t forecast_rows = 0, actual_rows = 0;

  if (!source.raw_dir.empty()) {
    bess::RequireValid(source.forecast_spec);
    bess::ForecastLoad load = bess::load_forecasts(source.raw_dir, source.forecast_spec, options);
    for (const auto& d : load.diagnostics) spdlog::warn("{}", d);
    if (load.rows == 0) spdlog::warn("{}: no forecast rows found", source.raw_dir.string());
    std::cerr << "forecasts: " << load.rows << " rows, " << load.index.size() << " snapshots\n";
    forecast_rows = load.rows;
    const fs::path path = out_dir / "forecasts.csv";
    WriteFile(path, [&](std::ostream& out) { bess::WriteNormalizedForecasts(out, load.index); });
    record.AddOutput(path);
  }
  if (!source.actuals_file.empty()) {
    bess::RequireValid(source.actual_spec);
    bess::ActualLoad load = bess::load_actuals(source.actuals_file, source.actual_spec, options);
    for (const auto& d : load.diagnostics) spdlog::warn("{}", d);
    if (load.rows == 0) spdlog::warn("{}: no actual price rows found", source.actuals_file.string());
    std::cerr << "actuals: " << load.rows << " rows, " << load.series.entries.size()
              << " intervals\n";
    actual_rows = load.rows;
    const fs::path path = out_dir / "actuals.csv";
    WriteFile(path, [&](std::ostream& out) { bess::WriteNormalizedActuals(out, load.series); });
    record.AddOutput(path);
  }
  record["forecast_rows"] = forecast_rows;
  record["actual_rows"] = actual_rows;
  record.Write(SidecarFor(out_dir, true));
  std::cout << "forecast_rows=" << forecast_rows << " actual_rows=" << actual_rows << '\n';
  return kOk;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::optional<int> days, phantom_lead_threshold;
  std::optional<double> base_price, amplitude, spike_probability, spike_magnitude,
      phantom_probability, noise_scale;
  std::optional<std::string> start, region;
};

int RunSynth(const GlobalOptions& g, const SynthArgs& a, RunRecord& record) {
  bess::SynthConfig synth;
  if (!g.config.empty()) {
    bess::RunConfig config = bess::LoadRunConfig(g.config);
    if (const auto* s = std::get_if<bess::SynthConfig>(&config.data)) synth = *s;
  }
  if (a.days) synth.days = *a.days;
  if (a.phantom_lead_threshold) synth.phantom_lead_threshold = *a.phantom_lead_threshold;
  if (a.base_price) synth.base_price = *a.base_price;
  if (a.amplitude) synth.amplitude = *a.amplitude;
  if (a.spike_probability) synth.spike_probability = *a.spike_probability;
  if (a.spike_magnitude) synth.spike_magnitude = *a.spike_magnitude;
  if (a.phantom_probability) synth.phantom_probability = *a.phantom_probability;
  if (a.noise_scale) synth.noise_scale = *a.noise_scale;
  if (a.region) synth.region = *a.region;
  if (a.start) {
    auto t = bess::ParseIso(*a.start);
    if (!t) throw bess::FormatError("--start: expected YYYY-MM-DDTHH:MM:SS, got '" + *a.start + "'");
    synth.start = *t;
  }
  if (g.seed) synth.seed = *g.seed;
  bess::RequireValid(synth);

  const bess::SynthData data = bess::synth_generate(synth);
  const fs::path out_dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  const fs::path forecasts = out_dir / "forecasts.csv";
  const fs::path actuals = out_dir / "actuals.csv";
  WriteFile(forecasts, [&](std::ostream& out) { bess::WriteNormalizedForecasts(out, data.forecasts); });
  WriteFile(actuals, [&](std::ostream& out) { bess::WriteNormalizedActuals(out, data.actuals); });
  record.AddOutput(forecasts);
  record.AddOutput(actuals);
  record["seed"] = synth.seed;
  record.Write(SidecarFor(out_dir, true));

  for (const auto& s : data.spikes)
    spdlog::info("spike at {} (+{})", bess::FormatIso(s.interval), s.magnitude);
  for (const auto& s : data.phantoms)
    spdlog::info("phantom at {} (+{})", bess::FormatIso(s.interval), s.magnitude);
  std::cout << "days=" << synth.days << " snapshots=" << data.forecasts.size()
            << " actual_rows=" << data.actuals.entries.size() << " spikes=" << data.spikes.size()
            << " phantoms=" << data.phantoms.size() << '\n';
  return kOk;
}

// ---- backtest -------------------------------------------------------------

int RunBacktest(const GlobalOptions& g, RunRecord& record) {
  bess::RunConfig config = LoadConfig(g);
  const bess::LoadedData data = LoadData(config);
  bess::RequireValid(config.backtest);
  const bess::Ledger ledger = bess::run_backtest(config.backtest, data.market);
  const bess::BacktestSummary s = bess::Summarize(ledger);

  const fs::path path = g.out.empty() ? fs::path("ledger.csv") : fs::path(g.out);
  WriteFile(path, [&](std::ostream& out) { bess::WriteLedgerCsv(out, ledger); });
  record.AddOutput(path);
  record["profit"] = s.profit;
  record["solves"] = s.solves;
  record.Write(SidecarFor(path, false));

  if (s.max_iterations > 0)
    spdlog::warn("{} solves hit the iteration limit", s.max_iterations);
  if (s.forward_filled > 0) spdlog::warn("{} intervals used a forward-filled snapshot", s.forward_filled);
  spdlog::info("max plan violation {:.3g}, max daily throughput {:.4g} MWh",
               s.max_plan_violation, s.max_daily_throughput_mwh);
  std::printf(
      "annual_profit=%.2f intervals=%zu solves=%zu infeasible=%zu max_iterations=%zu "
      "skipped=%zu max_primal_residual=%.3g max_dual_residual=%.3g\n",
      s.profit, s.intervals, s.solves, s.infeasible, s.max_iterations, s.skipped,
      s.max_primal_residual, s.max_dual_residual);
  return kOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::vector<std::string> schemes;
  std::vector<int> norms;
  std::vector<double> gammas, lambdas;
};

int RunSweep(const GlobalOptions& g, const SweepArgs& a, RunRecord& record) {
  bess::RunConfig config = LoadConfig(g);
  bess::SweepGrid grid = bess::SweepGrid::Default();
  if (!a.schemes.empty()) {
    grid.schemes.clear();
    for (const auto& name : a.schemes) grid.schemes.push_back(bess::ParseScheme(name));
  }
  if (!a.norms.empty()) grid.norm_orders = a.norms;
  if (!a.gammas.empty()) grid.gamma0s = a.gammas;
  if (!a.lambdas.empty()) grid.lambdas = a.lambdas;

  const bess::LoadedData data = LoadData(config);
  bess::RequireValid(config.backtest);
  const bess::SweepResult result = bess::run_sweep(config.backtest, data.market, grid, g.jobs);
  const bess::ComparisonReport report = bess::compare_report(result);

  const fs::path path = g.out.empty() ? fs::path("sweep.csv") : fs::path(g.out);
  WriteFile(path, [&](std::ostream& out) { bess::WriteSweepCsv(out, result); });
  record.AddOutput(path);
  record["jobs"] = g.jobs;
  record["points"] = result.rows.size();
  record.Write(SidecarFor(path, false));

  std::cout << report.table;
  if (!report.table.empty() && report.table.back() != '\n') std::cout << '\n';
  std::cout << report.summary << '\n';
  return kOk;
}

// ---- error-stats ----------------------------------------------------------

struct ErrorStatsArgs {
  std::string forecasts;
  std::string actuals;
  std::string region;
  TableFlags forecast_flags, actual_flags;
};

int RunErrorStats(const GlobalOptions& g, const ErrorStatsArgs& a, RunRecord& record) {
  bess::MarketData market;
  if (!a.forecasts.empty() || !a.actuals.empty()) {
    if (a.forecasts.empty() || a.actuals.empty())
      throw bess::FormatError("error-stats needs both --forecasts and --actuals");
    bess::AemoTableSpec fspec = bess::AemoTableSpec::ForecastDefaults();
    bess::AemoTableSpec aspec = bess::AemoTableSpec::ActualDefaults();
    a.forecast_flags.Apply(fspec);
    a.actual_flags.Apply(aspec);
    const bess::LoadOptions options{a.region, bess::InvalidDataPolicy::kFail};
    bess::ForecastLoad f = bess::load_forecasts(a.forecasts, fspec, options);
    bess::ActualLoad r = bess::load_actuals(a.actuals, aspec, options);
    for (const auto& d : f.diagnostics) spdlog::warn("{}", d);
    for (const auto& d : r.diagnostics) spdlog::warn("{}", d);
    market.forecasts = std::move(f.index);
    market.actuals = std::move(r.series);
  } else {
    bess::RunConfig config = LoadConfig(g);
    market = LoadData(config).market;
  }

  std::vector<bess::LeadErrorRow> rows;
  try {
    rows = bess::forecast_error_stats(market.forecasts, market.actuals);
  } catch (const std::invalid_argument& e) {
    throw bess::DataError(e.what());
  }

  const fs::path path = g.out.empty() ? fs::path("error_stats.csv") : fs::path(g.out);
  fs::path stem = path;
  stem.replace_extension();
  const fs::path mape = stem.string() + ".mape.dat";
  const fs::path max_ape = stem.string() + ".max_ape.dat";
  WriteFile(path, [&](std::ostream& out) { bess::WriteErrorStatsCsv(out, rows); });
  WriteFile(mape, [&](std::ostream& out) {
    bess::WritePlotData(out, rows, bess::ErrorStatistic::kMape);
  });
  WriteFile(max_ape, [&](std::ostream& out) {
    bess::WritePlotData(out, rows, bess::ErrorStatistic::kMaxApe);
  });
  for (const auto& p : {path, mape, max_ape}) record.AddOutput(p);
  record.Write(SidecarFor(path, false));

  std::size_t samples = 0;
  for (const auto& r : rows) samples += r.samples;
  std::cout << "lead_times=" << rows.size() << " samples=" << samples << '\n';
  return kOk;
}

void ConfigureLogging(const std::string& level) {
  auto logger = spdlog::stderr_logger_mt("bess-arb");
  logger->set_pattern("%l: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Battery arbitrage backtester with lead-time discounted MPC", "bess-arb"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  // Subcommands inherit this, so global flags may follow the command name.
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "run configuration (JSON)");
  app.add_option("--out", g.out, "output file or directory");
  app.add_option("--jobs", g.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "overrides the synthetic data seed");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  ParseArgs parse_args;
  auto* parse = app.add_subcommand("parse", "normalize raw C/I/D reports into CSV");
  parse->add_option("--raw", parse_args.raw, "forecast file or directory");
  parse->add_option("--actuals", parse_args.actuals, "actual price file or directory");
  parse->add_option("--region", parse_args.region);
  parse->add_option("--invalid-data", parse_args.policy)->check(CLI::IsMember({"fail", "skip"}));
  parse_args.forecast_flags.Register(parse, "forecast");
  parse_args.actual_flags.Register(parse, "actual");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic forecast/actual pair");
  synth->add_option("--days", synth_args.days);
  synth->add_option("--base-price", synth_args.base_price);
  synth->add_option("--amplitude", synth_args.amplitude);
  synth->add_option("--spike-probability", synth_args.spike_probability);
  synth->add_option("--spike-magnitude", synth_args.spike_magnitude);
  synth->add_option("--phantom-probability", synth_args.phantom_probability);
  synth->add_option("--phantom-lead-threshold", synth_args.phantom_lead_threshold);
  synth->add_option("--noise-scale", synth_args.noise_scale);
  synth->add_option("--start", synth_args.start, "first interval, YYYY-MM-DDTHH:MM:SS");
  synth->add_option("--region", synth_args.region);

  auto* backtest = app.add_subcommand("backtest", "run one receding-horizon backtest");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "backtest a grid of discount settings");
  sweep->add_option("--schemes", sweep_args.schemes)->delimiter(',');
  sweep->add_option("--norms", sweep_args.norms)->delimiter(',');
  sweep->add_option("--gammas", sweep_args.gammas)->delimiter(',');
  sweep->add_option("--lambdas", sweep_args.lambdas)->delimiter(',');

  ErrorStatsArgs stats_args;
  auto* stats = app.add_subcommand("error-stats", "forecast error by lead time");
  stats->add_option("--forecasts", stats_args.forecasts, "forecast file or directory");
  stats->add_option("--actuals", stats_args.actuals, "actual price file or directory");
  stats->add_option("--region", stats_args.region);
  stats_args.forecast_flags.Register(stats, "forecast");
  stats_args.actual_flags.Register(stats, "actual");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  ConfigureLogging(g.log_level);
  const std::string command = app.get_subcommands().front()->get_name();
  RunRecord record(command, argc, argv);
  try {
    if (parse->parsed()) return RunParse(g, parse_args, record);
    if (synth->parsed()) return RunSynth(g, synth_args, record);
    if (backtest->parsed()) return RunBacktest(g, record);
    if (sweep->parsed()) return RunSweep(g, sweep_args, record);
    if (stats->parsed()) return RunErrorStats(g, stats_args, record);
  } catch (const bess::IoError& e) {
    spdlog::error("{}", e.what());
    return kIoFailure;
  } catch (const bess::FormatError& e) {
    spdlog::error("{}", e.what());
    return kBadInput;
  } catch (const bess::DataError& e) {
    spdlog::error("{}", e.what());
    return kDataGap;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kBadInput;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kIoFailure;
  }
  return kOk;
}
