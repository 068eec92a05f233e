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

#include "bess/config.hpp"

#include <fstream>
#include <iterator>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "bess/errors.hpp"

namespace bess {

namespace {

using nlohmann::json;

// A JSON object whose keys must all be consumed.
class Section {
 public:
  Section(const json& node, std::string path, const std::string& source)
      : node_(node), path_(std::move(path)), source_(source) {
    if (!node_.is_object()) Fail(path_.empty() ? "document" : path_, "expected an object");
  }

  bool Has(const std::string& key) const { return node_.contains(key); }

  template <typename T>
  void Read(const std::string& key, T& out) {
    if (!node_.contains(key)) return;
    used_.insert(key);
    const json& v = node_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
        if constexpr (std::is_integral_v<T>) {
          if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
          if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_integer() && !v.is_number_unsigned()) {
              throw std::invalid_argument("expected a non-negative integer");
            }
          }
        }
      } else {
        if (!v.is_string()) throw std::invalid_argument("expected a string");
      }
      out = v.get<T>();
    } catch (const std::exception& e) {
      Fail(Key(key), e.what());
    }
  }

  Timestamp ReadTime(const std::string& key, Timestamp fallback) {
    std::string text;
    Read(key, text);
    if (text.empty()) return fallback;
    const auto t = ParseIso(text);
    if (!t) Fail(Key(key), "expected an ISO-8601 timestamp, got '" + text + "'");
    return *t;
  }

  Section Child(const std::string& key) {
    used_.insert(key);
    return Section(node_.at(key), Key(key), source_);
  }

  void Finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!used_.contains(key)) Fail(Key(key), "unknown key");
    }
  }

  [[noreturn]] void Fail(const std::string& where, const std::string& message) const {
    throw FormatError(source_, 0, 0, where + ": " + message);
  }

  std::string Key(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& node_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> used_;
};

template <typename Fn>
void Validate(Section& section, const std::string& where, Fn&& check) {
  try {
    check();
  } catch (const std::invalid_argument& e) {
    section.Fail(where, e.what());
  }
}

void ReadTableSpec(Section s, AemoTableSpec& spec) {
  s.Read("report", spec.report);
  s.Read("table", spec.table);
  s.Read("region_column", spec.region_column);
  s.Read("run_time_column", spec.run_time_column);
  s.Read("target_time_column", spec.target_time_column);
  s.Read("price_column", spec.price_column);
  s.Read("timestamp_format", spec.timestamp_format);
  s.Read("target_offset_minutes", spec.target_offset_minutes);
  s.Finish();
}

std::filesystem::path Resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

RunConfig ParseRunConfig(std::string_view json_text, const std::filesystem::path& base_dir,
                         const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(source, 0, 0, std::string("invalid JSON: ") + e.what());
  }
  Section root(doc, "", source);
  RunConfig config;
  BacktestConfig& bt = config.backtest;

  int version = 0;
  root.Read("version", version);
  if (version != 1) root.Fail("version", "expected schema version 1");

  bool initial_soc_given = false;
  if (root.Has("battery")) {
    Section s = root.Child("battery");
    BatteryParams& b = bt.battery;
    s.Read("e_nom", b.e_nom);
    s.Read("p_lower", b.p_lower);
    s.Read("p_upper", b.p_upper);
    s.Read("soc_lower", b.soc_lower);
    s.Read("soc_upper", b.soc_upper);
    s.Read("eta", b.eta);
    s.Read("dt", b.dt);
    initial_soc_given = s.Has("initial_soc");
    s.Read("initial_soc", bt.initial_soc);
    s.Finish();
    Validate(s, "battery", [&] { RequireValid(b); });
  }
  if (!initial_soc_given) bt.initial_soc = bt.battery.soc_lower;

  if (root.Has("discount")) {
    Section s = root.Child("discount");
    std::string scheme = "none";
    s.Read("scheme", scheme);
    Validate(s, "discount.scheme", [&] { bt.discount.scheme = ParseScheme(scheme); });
    s.Read("gamma0", bt.discount.gamma0);
    s.Read("lambda", bt.discount.lambda);
    s.Read("s", bt.discount.norm_order);
    s.Finish();
    Validate(s, "discount", [&] { RequireValid(bt.discount); });
  }

  if (!root.Has("data")) root.Fail("data", "missing section");
  {
    Section s = root.Child("data");
    if (s.Has("synthetic")) {
      Section g = s.Child("synthetic");
      SynthConfig synth;
      g.Read("days", synth.days);
      g.Read("base_price", synth.base_price);
      g.Read("amplitude", synth.amplitude);
      g.Read("spike_probability", synth.spike_probability);
      g.Read("spike_magnitude", synth.spike_magnitude);
      g.Read("phantom_probability", synth.phantom_probability);
      g.Read("phantom_lead_threshold", synth.phantom_lead_threshold);
      g.Read("noise_scale", synth.noise_scale);
      g.Read("seed", synth.seed);
      synth.start = g.ReadTime("start", synth.start);
      g.Read("region", synth.region);
      g.Finish();
      Validate(g, "data.synthetic", [&] { RequireValid(synth); });
      config.data = synth;
    } else {
      RawDataSource raw;
      std::string raw_dir, actuals;
      s.Read("raw_dir", raw_dir);
      s.Read("actuals_file", actuals);
      s.Read("region", raw.region);
      if (raw_dir.empty() || actuals.empty()) {
        s.Fail("data", "needs either synthetic or both raw_dir and actuals_file");
      }
      raw.raw_dir = Resolve(base_dir, raw_dir);
      raw.actuals_file = Resolve(base_dir, actuals);
      if (s.Has("table_spec")) {
        Section t = s.Child("table_spec");
        if (t.Has("forecasts")) ReadTableSpec(t.Child("forecasts"), raw.forecast_spec);
        if (t.Has("actuals")) ReadTableSpec(t.Child("actuals"), raw.actual_spec);
        t.Finish();
        Validate(t, "data.table_spec", [&] {
          RequireValid(raw.forecast_spec);
          RequireValid(raw.actual_spec);
          if (raw.forecast_spec.run_time_column.empty()) {
            throw std::invalid_argument("forecast table needs a run time column");
          }
        });
      }
      config.data = raw;
    }
    s.Finish();
  }

  if (root.Has("window")) {
    Section s = root.Child("window");
    if (!s.Has("start") || !s.Has("end")) s.Fail("window", "needs start and end");
    bt.start = s.ReadTime("start", {});
    bt.end = s.ReadTime("end", {});
    s.Finish();
    config.window_given = true;
  } else if (std::holds_alternative<RawDataSource>(config.data)) {
    root.Fail("window", "required for archive data");
  }

  if (root.Has("solver")) {
    Section s = root.Child("solver");
    SolverSettings& st = bt.solver;
    s.Read("eps_abs", st.eps_abs);
    s.Read("eps_rel", st.eps_rel);
    s.Read("max_iter", st.max_iter);
    s.Read("rho", st.rho);
    s.Read("adaptive_rho", st.adaptive_rho);
    s.Read("alpha", st.alpha);
    s.Read("sigma", st.sigma);
    s.Read("polish", st.polish);
    s.Read("scaling_iterations", st.scaling_iterations);
    s.Read("check_interval", st.check_interval);
    s.Finish();
    Validate(s, "solver", [&] { RequireValid(st); });
  }

  if (root.Has("policy")) {
    Section s = root.Child("policy");
    std::string missing = "fail", invalid = "fail";
    s.Read("missing_snapshot", missing);
    s.Read("invalid_data", invalid);
    s.Finish();
    Validate(s, "policy.missing_snapshot", [&] { bt.missing_snapshot = ParsePolicy(missing); });
    if (invalid == "fail") {
      config.invalid_data = InvalidDataPolicy::kFail;
    } else if (invalid == "skip") {
      config.invalid_data = InvalidDataPolicy::kSkip;
    } else {
      s.Fail("policy.invalid_data", "expected 'fail' or 'skip'");
    }
  }
  root.Finish();

  if (config.window_given) {
    Validate(root, "window", [&] { RequireValid(bt); });
  } else {
    Validate(root, "battery.initial_soc", [&] {
      if (!(bt.initial_soc >= bt.battery.soc_lower && bt.initial_soc <= bt.battery.soc_upper)) {
        throw std::invalid_argument("initial soc lies outside the SOC bounds");
      }
    });
  }
  return config;
}

RunConfig LoadRunConfig(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError(file.string() + ": cannot open config");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return ParseRunConfig(text, file.parent_path(), file.string());
}

LoadedData LoadMarketData(RunConfig& config) {
  LoadedData out;
  if (const auto* synth = std::get_if<SynthConfig>(&config.data)) {
    SynthData generated = synth_generate(*synth);
    out.market.forecasts = std::move(generated.forecasts);
    out.market.actuals = std::move(generated.actuals);
    out.actual_rows = out.market.actuals.entries.size();
    for (const auto& [run, snap] : out.market.forecasts) out.forecast_rows += snap.entries.size();
    if (!config.window_given) {
      config.backtest.start = synth->start;
      config.backtest.end = synth->start.PlusMinutes(static_cast<std::int64_t>(synth->days) * 24 * 60);
      config.window_given = true;
    }
    return out;
  }
  const auto& raw = std::get<RawDataSource>(config.data);
  LoadOptions options{raw.region, config.invalid_data};
  ForecastLoad forecasts = load_forecasts(raw.raw_dir, raw.forecast_spec, options);
  ActualLoad actuals = load_actuals(raw.actuals_file, raw.actual_spec, options);
  out.market.forecasts = std::move(forecasts.index);
  out.market.actuals = std::move(actuals.series);
  out.forecast_rows = forecasts.rows;
  out.actual_rows = actuals.rows;
  out.diagnostics = std::move(forecasts.diagnostics);
  out.diagnostics.insert(out.diagnostics.end(), actuals.diagnostics.begin(),
                         actuals.diagnostics.end());
  return out;
}

}  // namespace bess
