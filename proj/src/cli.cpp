// Copyright 2026 The qecapprox Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qecapprox/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

namespace qecapprox::cli {

namespace fs = std::filesystem;

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Approximate: return "approximate";
    case Command::Sweep: return "sweep";
    case Command::Threshold: return "threshold";
    case Command::Tables: return "tables";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Specs

std::string TargetSpec::id() const { return kind == TargetKind::ADC ? "adc" : "pol"; }

KrausChannel TargetSpec::at(double strength) const {
  return kind == TargetKind::ADC ? adc(strength) : pol_channel(phi, strength);
}

ChannelFamily TargetSpec::family() const {
  TargetSpec self = *this;
  return {id(), [self](double e) { return self.at(e); }};
}

ModelSpec ModelSpec::parse(std::string_view name) {
  if (name == "dc") return {SetKind::DC, Constraint::AverageFidelity};
  const auto cut = name.find('_');
  if (cut == std::string_view::npos) throw InvalidInput("unknown model '" + std::string(name) + "'");
  std::string set(name.substr(0, cut));
  std::transform(set.begin(), set.end(), set.begin(), [](unsigned char ch) { return std::toupper(ch); });
  try {
    return {set_kind_from_string(set), constraint_from_string(name.substr(cut + 1))};
  } catch (const InvalidInput&) {
    throw InvalidInput("unknown model '" + std::string(name) + "'");
  }
}

std::string ModelSpec::id() const {
  std::string s(to_string(set));
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s + "_" + std::string(to_string(constraint));
}

ChannelFamily model_family(const TargetSpec& target, const ModelSpec& model) {
  return {model.id(),
          [target, model](double e) { return model_to_kraus(fit_model(target.at(e), model.set, model.constraint).model); }};
}

std::vector<double> GridSpec::values() const {
  if (points == 1) return {min};
  if (log) return log_grid(min, max, points);
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = min + (max - min) * i / (points - 1);
  g.back() = max;
  return g;
}

std::vector<BlochVector> ExperimentConfig::states() const {
  return seed ? sample_bloch_states_random(n_states, *seed) : sample_bloch_states(n_states);
}

// ---------------------------------------------------------------------------
// Config <-> JSON

namespace {

const std::vector<std::string> kAllModels{"pc_a", "pc_w", "cmc_a", "cmc_w", "dc"};

Json grid_json(double min, double max, int points) {
  return {{"min", min}, {"max", max}, {"points", points}, {"log", true}};
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw InvalidInput("unknown key '" + key + "' in " + where);
}

}  // namespace

Json default_config_json(Command command, EcMode ec_mode) {
  Json j = {{"target", {{"kind", "adc"}, {"phi", TargetSpec{}.phi}}},
            {"models", kAllModels},
            {"levels", {"physical", "uncorrected", "perfect"}},
            {"n_states", 80},
            {"grid", grid_json(1e-4, 1e-2, 8)},
            {"ec_mode", std::string(to_string(ec_mode))},
            {"hybrid_logical", Json::array()},
            {"output_dir", "out"},
            {"seed", nullptr},
            {"jobs", 0}};
  switch (command) {
    case Command::Approximate:
      j["grid"] = grid_json(1e-3, 0.5, 30);
      break;
    case Command::Threshold:
      j["hybrid_logical"] = {"pc_a"};
      if (ec_mode == EcMode::Faulty) {
        j["grid"] = grid_json(1e-5, 1e-3, 12);
        j["n_states"] = 20;
      } else {
        j["grid"] = grid_json(1e-3, 0.5, 30);
      }
      break;
    case Command::Sweep:
    case Command::Tables:
      break;
  }
  return j;
}

Json config_to_json(const ExperimentConfig& c) {
  Json models = Json::array(), levels = Json::array(), hybrid = Json::array();
  for (const auto& m : c.models) models.push_back(m.id());
  for (Level l : c.levels) levels.push_back(std::string(to_string(l)));
  for (const auto& m : c.hybrid_logical) hybrid.push_back(m.id());
  return {{"target", {{"kind", c.target.id()}, {"phi", c.target.phi}}},
          {"models", models},
          {"levels", levels},
          {"n_states", c.n_states},
          {"grid", {{"min", c.grid.min}, {"max", c.grid.max}, {"points", c.grid.points}, {"log", c.grid.log}}},
          {"ec_mode", std::string(to_string(c.ec_mode))},
          {"hybrid_logical", hybrid},
          {"output_dir", c.output_dir.generic_string()},
          {"seed", c.seed ? Json(*c.seed) : Json(nullptr)},
          {"jobs", c.jobs}};
}

ExperimentConfig config_from_json(const Json& j) {
  check_keys(j, {"target", "models", "levels", "n_states", "grid", "ec_mode", "hybrid_logical", "output_dir", "seed", "jobs"},
             "config");
  ExperimentConfig c;
  try {
    if (j.contains("target")) {
      const Json& t = j["target"];
      check_keys(t, {"kind", "phi"}, "target");
      const std::string kind = t.value("kind", "adc");
      if (kind == "adc") c.target.kind = TargetKind::ADC;
      else if (kind == "pol") c.target.kind = TargetKind::Pol;
      else throw InvalidInput("unknown target '" + kind + "' (expected adc or pol)");
      c.target.phi = t.value("phi", c.target.phi);
    }
    if (j.contains("models"))
      for (const auto& m : j["models"].get<std::vector<std::string>>()) c.models.push_back(ModelSpec::parse(m));
    if (j.contains("levels"))
      for (const auto& l : j["levels"].get<std::vector<std::string>>()) c.levels.push_back(level_from_string(l));
    if (j.contains("hybrid_logical"))
      for (const auto& m : j["hybrid_logical"].get<std::vector<std::string>>())
        c.hybrid_logical.push_back(ModelSpec::parse(m));
    if (j.contains("n_states")) c.n_states = j["n_states"].get<int>();
    if (j.contains("grid")) {
      const Json& g = j["grid"];
      check_keys(g, {"min", "max", "points", "log"}, "grid");
      c.grid.min = g.value("min", c.grid.min);
      c.grid.max = g.value("max", c.grid.max);
      c.grid.points = g.value("points", c.grid.points);
      c.grid.log = g.value("log", c.grid.log);
    }
    if (j.contains("ec_mode")) c.ec_mode = ec_mode_from_string(j["ec_mode"].get<std::string>());
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed config: ") + e.what());
  }
  return c;
}

void validate(const ExperimentConfig& c, Command command) {
  if (command == Command::Tables) return;
  if (!std::isfinite(c.target.phi)) throw InvalidInput("phi must be finite");
  if (c.n_states < 1) throw InvalidInput("n_states must be at least 1");
  const GridSpec& g = c.grid;
  if (!std::isfinite(g.min) || !std::isfinite(g.max)) throw InvalidInput("grid bounds must be finite");
  const int min_points = command == Command::Threshold ? 10 : command == Command::Sweep ? 5 : 1;
  if (g.points < min_points)
    throw InvalidInput("grid needs at least " + std::to_string(min_points) + " points for " +
                       std::string(to_string(command)));
  if (g.min < 0.0 || g.max > 1.0) throw InvalidInput("noise strengths must lie in [0, 1]");
  if (g.points == 1) {
    if (g.min != g.max) throw InvalidInput("a one-point grid needs grid min == max");
  } else {
    if (!(g.min < g.max)) throw InvalidInput("grid min must be below grid max");
    if (g.log && g.min <= 0.0) throw InvalidInput("a log-spaced grid needs min > 0");
  }
  if (command == Command::Approximate && c.models.empty()) throw InvalidInput("no models to fit");
  if (command == Command::Sweep && c.levels.empty()) throw InvalidInput("no levels to sweep");
}

std::string config_hash(const ExperimentConfig& c) {
  Json j = config_to_json(c);
  j.erase("jobs");
  j.erase("output_dir");
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

// ---------------------------------------------------------------------------
// Shared plumbing

namespace {

class StageClock {
 public:
  void start(std::string name, std::ostream& log) {
    log << "[" << name << "]" << std::endl;
    name_ = std::move(name);
    t0_ = std::chrono::steady_clock::now();
  }
  void stop() {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    stages_.push_back({{"name", name_}, {"seconds", s}});
  }
  const Json& stages() const { return stages_; }

 private:
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
  Json stages_ = Json::array();
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

void write_manifest(const ExperimentConfig& c, Command command, const StageClock& clock, const Json& outputs,
                    Json extra = Json::object()) {
  Json m = {{"command", std::string(to_string(command))},
            {"version", QECAPPROX_VERSION},
            {"config", config_to_json(c)},
            {"config_hash", config_hash(c)},
            {"stages", clock.stages()},
            {"outputs", outputs}};
  m.update(extra);
  write_json(c.output_dir / (std::string(to_string(command)) + "_manifest.json"), m);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

// fits[m][g] for every model and grid point, in parallel.
std::vector<std::vector<FitResult>> fit_all(const TargetSpec& target, const std::vector<ModelSpec>& models,
                                            const std::vector<double>& grid, int jobs) {
  const int ng = static_cast<int>(grid.size());
  std::vector<std::vector<FitResult>> fits(models.size(), std::vector<FitResult>(grid.size()));
  parallel_for(static_cast<int>(models.size()) * ng, jobs, [&](int task) {
    const ModelSpec& m = models[task / ng];
    fits[task / ng][task % ng] = fit_model(target.at(grid[task % ng]), m.set, m.constraint);
  });
  return fits;
}

int warn_infeasible(const std::vector<ModelSpec>& models, const std::vector<std::vector<FitResult>>& fits,
                    const std::vector<double>& grid, std::ostream& log) {
  int bad = 0;
  for (std::size_t m = 0; m < models.size(); ++m)
    for (std::size_t g = 0; g < grid.size(); ++g)
      if (fits[m][g].status != FitStatus::Optimal) {
        ++bad;
        log << "warning: " << models[m].id() << " fit at strength " << format_number(grid[g])
            << " is infeasible (violation " << format_number(fits[m][g].max_violation) << ")\n";
      }
  return bad;
}

// Family that only answers at grid strengths, backed by precomputed fits.
ChannelFamily lookup_family(const std::string& id, const std::vector<double>& grid, const std::vector<FitResult>& fits) {
  auto table = std::make_shared<std::vector<std::pair<double, KrausChannel>>>();
  for (std::size_t g = 0; g < grid.size(); ++g) table->push_back({grid[g], model_to_kraus(fits[g].model)});
  return {id, [table, id](double e) {
            for (const auto& [s, ch] : *table)
              if (s == e) return ch;
            throw std::logic_error("no fitted " + id + " at strength " + format_number(e));
          }};
}

Json target_json(const TargetSpec& t, double strength) {
  Json j = {{"kind", t.id()}, {"strength", strength}};
  if (t.kind == TargetKind::Pol) j["phi"] = t.phi;
  return j;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string fmt(const char* f, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double parse_double(const std::string& s, const fs::path& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw std::runtime_error("bad number '" + s + "' in " + path.string());
  return v;
}

int parse_index(const std::string& s, const fs::path& path) {
  const double v = parse_double(s, path);
  if (v < 0 || v != std::floor(v)) throw std::runtime_error("bad state index '" + s + "' in " + path.string());
  return static_cast<int>(v);
}

// ---------------------------------------------------------------------------
// Sweep summaries

const CsvRow kSweepHeader{"channel", "level", "state_idx", "strength", "d_honesty", "d_accuracy"};
const CsvRow kThresholdHeader{"channel", "ec_mode", "state_idx", "threshold"};

int coefficient_order(Level l) { return l == Level::Physical || l == Level::LogicalUncorrected ? 1 : 2; }

Json coefficient_json(const CoefficientSummary& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"accepted", s.accepted}, {"rejected", s.rejected}};
}

// The first result at each level is that level's target.
Json sweep_summary(const std::vector<SweepResult>& results) {
  Json entries = Json::array();
  for (const auto& r : results) {
    const SweepResult* target =
        &*std::find_if(results.begin(), results.end(), [&](const SweepResult& t) { return t.level == r.level; });
    const int order = coefficient_order(r.level);
    Json e = {{"channel", r.channel_id},
              {"level", std::string(to_string(r.level))},
              {"order", order},
              {"honesty", coefficient_json(summarize_coefficients(r.grid, r.honesty, order))}};
    if (&r != target) {
      e["accuracy"] = coefficient_json(summarize_coefficients(r.grid, r.accuracy, order));
      e["max_honesty_violation"] = (target->honesty - r.honesty).maxCoeff();
    }
    entries.push_back(e);
  }
  Json j = {{"entries", entries}};
  if (!results.empty()) {
    j["target"] = results.front().channel_id;
    j["grid"] = results.front().grid;
    j["n_states"] = results.front().honesty.rows();
  }
  return j;
}

std::string render_sweep(const Json& summary) {
  std::vector<std::string> channels, levels;
  std::map<std::pair<std::string, std::string>, Json> cell;
  for (const auto& e : summary["entries"]) {
    const std::string ch = e["channel"], lv = e["level"];
    if (std::find(channels.begin(), channels.end(), ch) == channels.end()) channels.push_back(ch);
    if (std::find(levels.begin(), levels.end(), lv) == levels.end()) levels.push_back(lv);
    cell[{ch, lv}] = e;
  }
  auto block = [&](const char* title, const char* key) {
    std::string out = std::string(title) + "\n" + pad("channel", 10);
    for (const auto& lv : levels) out += pad(lv, 20);
    out += "\n";
    bool starred = false;
    for (const auto& ch : channels) {
      std::string row = pad(ch, 10);
      bool any = false;
      for (const auto& lv : levels) {
        auto it = cell.find({ch, lv});
        if (it == cell.end() || !it->second.contains(key)) {
          row += pad("-", 20);
          continue;
        }
        any = true;
        const Json& c = it->second[key];
        std::string v = fmt("%.4g", c["mean"].get<double>()) + "(" + fmt("%.2g", c["std"].get<double>()) + ")";
        if (c["rejected"].get<int>() > 0) {
          v += "*";
          starred = true;
        }
        row += pad(v, 20);
      }
      if (any) out += row + "\n";
    }
    if (starred) out += "* some states rejected by the fit-quality gate\n";
    return out;
  };
  std::string out = "leading coefficients, mean(std) over " + summary.value("n_states", Json(0)).dump() +
                    " states; linear for physical/uncorrected, quadratic for perfect/faulty\n\n";
  out += block("honesty: D(rho, E(rho))", "honesty");
  out += "\n";
  out += block("accuracy: D(E_target(rho), E(rho))", "accuracy");
  return out;
}

std::vector<SweepResult> read_sweep_csv(const fs::path& path) {
  const auto rows = read_csv(path, kSweepHeader);
  std::vector<std::pair<std::string, std::string>> keys;
  std::set<double> strengths;
  int n_states = 0;
  for (const auto& r : rows) {
    std::pair<std::string, std::string> k{r[0], r[1]};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    strengths.insert(parse_double(r[3], path));
    n_states = std::max(n_states, parse_index(r[2], path) + 1);
  }
  const std::vector<double> grid(strengths.begin(), strengths.end());
  std::vector<SweepResult> out;
  for (const auto& [ch, lv] : keys) {
    SweepResult s;
    s.channel_id = ch;
    s.level = level_from_string(lv);
    s.grid = grid;
    s.honesty = Eigen::MatrixXd::Constant(n_states, grid.size(), std::nan(""));
    s.accuracy = s.honesty;
    out.push_back(std::move(s));
  }
  for (const auto& r : rows) {
    const auto k = std::find(keys.begin(), keys.end(), std::pair{r[0], r[1]}) - keys.begin();
    const auto g = std::lower_bound(grid.begin(), grid.end(), parse_double(r[3], path)) - grid.begin();
    const int s = parse_index(r[2], path);
    out[k].honesty(s, g) = parse_double(r[4], path);
    out[k].accuracy(s, g) = parse_double(r[5], path);
  }
  for (const auto& s : out)
    if (s.honesty.hasNaN()) throw std::runtime_error("incomplete sweep table in " + path.string());
  return out;
}

// ---------------------------------------------------------------------------
// Threshold summaries

struct ThresholdRun {
  std::string id;
  std::vector<std::optional<double>> per_state;
};

Json threshold_json(const std::vector<ThresholdRun>& runs, EcMode mode) {
  Json records = Json::array();
  for (const auto& r : runs) {
    const ThresholdRecord t = threshold_summary(r.id, runs.front().per_state, r.per_state);
    records.push_back({{"channel", r.id},
                       {"mean", t.mean},
                       {"std", t.std},
                       {"rms_vs_target", t.rms_vs_target},
                       {"missing", t.missing},
                       {"states", r.per_state.size()}});
  }
  return {{"ec_mode", std::string(to_string(mode))}, {"target", runs.front().id}, {"records", records}};
}

std::string render_thresholds(const Json& summary) {
  std::string out = "pseudothresholds (" + summary["ec_mode"].get<std::string>() + " EC), population std, RMS vs " +
                    summary["target"].get<std::string>() + "\n";
  out += pad("channel", 14) + pad("mean", 14) + pad("std", 14) + pad("rms", 14) + "missing\n";
  for (const auto& r : summary["records"]) {
    const int found = r["states"].get<int>() - r["missing"].get<int>();
    out += pad(r["channel"], 14);
    if (found == 0) {
      out += pad("-", 14) + pad("-", 14) + pad("-", 14);
    } else {
      out += pad(fmt("%.4g", r["mean"]), 14) + pad(fmt("%.3g", r["std"]), 14) + pad(fmt("%.3g", r["rms_vs_target"]), 14);
    }
    out += std::to_string(r["missing"].get<int>()) + "/" + std::to_string(r["states"].get<int>()) + "\n";
  }
  return out;
}

std::vector<ThresholdRun> read_threshold_csv(const fs::path& path, EcMode& mode) {
  const auto rows = read_csv(path, kThresholdHeader);
  if (rows.empty()) throw std::runtime_error("empty threshold table in " + path.string());
  mode = ec_mode_from_string(rows.front()[1]);
  std::vector<ThresholdRun> runs;
  for (const auto& r : rows) {
    auto it = std::find_if(runs.begin(), runs.end(), [&](const ThresholdRun& t) { return t.id == r[0]; });
    if (it == runs.end()) {
      runs.push_back({r[0], {}});
      it = runs.end() - 1;
    }
    const std::size_t s = parse_index(r[2], path);
    if (it->per_state.size() <= s) it->per_state.resize(s + 1);
    if (r[3] != "none") it->per_state[s] = parse_double(r[3], path);
  }
  for (const auto& r : runs)
    if (r.per_state.size() != runs.front().per_state.size())
      throw std::runtime_error("threshold lists of unequal length in " + path.string());
  return runs;
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands

int cmd_approximate(const ExperimentConfig& c, std::ostream& log) {
  validate(c, Command::Approximate);
  StageClock clock;
  const auto grid = c.grid.values();
  ensure_dir(c.output_dir / "fits");

  clock.start("fit", log);
  const auto fits = fit_all(c.target, c.models, grid, c.jobs);
  clock.stop();
  const int bad = warn_infeasible(c.models, fits, grid, log);

  clock.start("write", log);
  Json outputs = Json::array(), records = Json::array();
  for (std::size_t m = 0; m < c.models.size(); ++m)
    for (std::size_t g = 0; g < grid.size(); ++g) {
      char name[64];
      std::snprintf(name, sizeof name, "fits/%s_%03zu.json", c.models[m].id().c_str(), g);
      write_json(c.output_dir / name, qecapprox::to_json(fits[m][g], target_json(c.target, grid[g])));
      outputs.push_back(name);
      records.push_back({{"file", name},
                         {"model", c.models[m].id()},
                         {"strength", grid[g]},
                         {"status", std::string(to_string(fits[m][g].status))}});
    }
  clock.stop();
  write_manifest(c, Command::Approximate, clock, outputs, {{"fits", records}, {"infeasible", bad}});
  const std::size_t total = c.models.size() * grid.size();
  log << total - bad << "/" << total << " fits feasible, written to " << (c.output_dir / "fits").string() << "\n";
  return static_cast<std::size_t>(bad) == total ? 1 : 0;
}

int cmd_sweep(const ExperimentConfig& c, std::ostream& log) {
  validate(c, Command::Sweep);
  StageClock clock;
  const auto grid = c.grid.values();
  const auto states = c.states();
  ensure_dir(c.output_dir);

  clock.start("fit", log);
  const auto fits = fit_all(c.target, c.models, grid, c.jobs);
  clock.stop();
  warn_infeasible(c.models, fits, grid, log);
  std::vector<ChannelFamily> families;
  for (std::size_t m = 0; m < c.models.size(); ++m) families.push_back(lookup_family(c.models[m].id(), grid, fits[m]));

  std::vector<SweepResult> results;
  for (Level l : c.levels) {
    clock.start("sweep " + std::string(to_string(l)), log);
    auto r = sweep_level(l, c.target.family(), families, states, grid, c.jobs);
    clock.stop();
    results.insert(results.end(), r.begin(), r.end());
  }

  clock.start("write", log);
  std::vector<CsvRow> rows;
  for (const auto& r : results)
    for (Index s = 0; s < r.honesty.rows(); ++s)
      for (std::size_t g = 0; g < grid.size(); ++g)
        rows.push_back({r.channel_id, std::string(to_string(r.level)), std::to_string(s), format_number(grid[g]),
                        format_number(r.honesty(s, g)), format_number(r.accuracy(s, g))});
  write_csv(c.output_dir / "sweep.csv", kSweepHeader, rows);
  const Json summary = sweep_summary(results);
  write_json(c.output_dir / "sweep_summary.json", summary);
  const std::string table = render_sweep(summary);
  write_text(c.output_dir / "sweep_table.txt", table);
  clock.stop();
  write_manifest(c, Command::Sweep, clock, {"sweep.csv", "sweep_summary.json", "sweep_table.txt"});
  log << "\n" << table;
  return 0;
}

int cmd_threshold(const ExperimentConfig& c, std::ostream& log) {
  validate(c, Command::Threshold);
  StageClock clock;
  const auto grid = c.grid.values();
  const auto states = c.states();
  ensure_dir(c.output_dir);

  // Hybrid logical models are fitted too, even when absent from `models`.
  std::vector<ModelSpec> all = c.models;
  for (const auto& h : c.hybrid_logical)
    if (std::none_of(all.begin(), all.end(), [&](const ModelSpec& m) { return m.id() == h.id(); })) all.push_back(h);

  clock.start("fit", log);
  const auto fits = fit_all(c.target, all, grid, c.jobs);
  clock.stop();
  warn_infeasible(all, fits, grid, log);
  std::map<std::string, ChannelFamily> fam;
  for (std::size_t m = 0; m < all.size(); ++m) fam.emplace(all[m].id(), lookup_family(all[m].id(), grid, fits[m]));

  const ChannelFamily target = c.target.family();
  std::vector<std::pair<ChannelFamily, ChannelFamily>> pairs{{target, target}};
  std::vector<ThresholdRun> runs{{target.id, {}}};
  for (const auto& m : c.models) {
    pairs.push_back({fam.at(m.id()), fam.at(m.id())});
    runs.push_back({m.id(), {}});
  }
  for (const auto& h : c.hybrid_logical) {
    pairs.push_back({target, fam.at(h.id())});
    runs.push_back({target.id + "/" + h.id(), {}});
  }
  for (auto& r : runs) r.per_state.resize(states.size());

  clock.start("threshold", log);
  const int ns = static_cast<int>(states.size());
  parallel_for(static_cast<int>(pairs.size()) * ns, c.jobs, [&](int task) {
    const auto& [phys, logical] = pairs[task / ns];
    runs[task / ns].per_state[task % ns] = pseudothreshold(phys, logical, c.ec_mode, states[task % ns], grid);
  });
  clock.stop();

  clock.start("write", log);
  std::vector<CsvRow> rows;
  for (const auto& r : runs)
    for (std::size_t s = 0; s < r.per_state.size(); ++s)
      rows.push_back({r.id, std::string(to_string(c.ec_mode)), std::to_string(s),
                      r.per_state[s] ? format_number(*r.per_state[s]) : "none"});
  write_csv(c.output_dir / "thresholds.csv", kThresholdHeader, rows);
  const Json summary = threshold_json(runs, c.ec_mode);
  write_json(c.output_dir / "threshold_summary.json", summary);
  const std::string table = render_thresholds(summary);
  write_text(c.output_dir / "threshold_table.txt", table);
  clock.stop();
  write_manifest(c, Command::Threshold, clock, {"thresholds.csv", "threshold_summary.json", "threshold_table.txt"});

  for (const auto& r : summary["records"])
    if (r["missing"].get<int>() > 0)
      log << "warning: " << r["channel"].get<std::string>() << " has no crossing on the grid for "
          << r["missing"].get<int>() << " of " << r["states"].get<int>() << " states; excluded from the mean\n";
  log << "\n" << table;
  return 0;
}

int cmd_tables(const fs::path& dir, std::ostream& out) {
  bool any = false;
  if (fs::exists(dir / "sweep.csv")) {
    const Json summary = sweep_summary(read_sweep_csv(dir / "sweep.csv"));
    const std::string table = render_sweep(summary);
    write_text(dir / "sweep_table.txt", table);
    out << table;
    any = true;
  }
  if (fs::exists(dir / "thresholds.csv")) {
    EcMode mode = EcMode::Perfect;
    const auto runs = read_threshold_csv(dir / "thresholds.csv", mode);
    const std::string table = render_thresholds(threshold_json(runs, mode));
    write_text(dir / "threshold_table.txt", table);
    if (any) out << "\n";
    out << table;
    any = true;
  }
  if (!any) throw std::runtime_error("no sweep.csv or thresholds.csv in " + dir.string());
  return 0;
}

// ---------------------------------------------------------------------------
// Command line

namespace {

struct Flags {
  std::string config, target, ec, out;
  double phi = 0, grid_min = 0, grid_max = 0;
  int states = 0, grid_points = 0, jobs = 0;
  std::uint64_t seed = 0;
  bool linear = false;
  std::vector<std::string> models, levels, hybrid;
  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* app, bool experiment) {
    opts["out"] = app->add_option("--out", out, "Output directory");
    if (!experiment) return;
    opts["config"] = app->add_option("--config", config, "JSON config file; flags override its fields");
    opts["target"] = app->add_option("--target", target, "Target channel: adc or pol");
    opts["phi"] = app->add_option("--phi", phi, "Polarisation axis angle for pol");
    opts["models"] = app->add_option("--models", models, "Comma-separated models, e.g. pc_a,pc_w,cmc_a,cmc_w,dc")
                         ->delimiter(',');
    opts["levels"] = app->add_option("--levels", levels, "Comma-separated levels: physical,uncorrected,perfect,faulty")
                         ->delimiter(',');
    opts["states"] = app->add_option("--states", states, "Number of sampled input states");
    opts["grid-min"] = app->add_option("--grid-min", grid_min, "Smallest noise strength");
    opts["grid-max"] = app->add_option("--grid-max", grid_max, "Largest noise strength");
    opts["grid-points"] = app->add_option("--grid-points", grid_points, "Number of grid points");
    opts["linear"] = app->add_flag("--linear", linear, "Linearly spaced grid instead of log-spaced");
    opts["ec"] = app->add_option("--ec", ec, "EC mode for thresholds: perfect or faulty");
    opts["hybrid-logical"] =
        app->add_option("--hybrid-logical", hybrid, "Models used only at the logical level, paired with the target")
            ->delimiter(',');
    opts["jobs"] = app->add_option("--jobs", jobs, "Worker threads (0: all cores)");
    opts["seed"] = app->add_option("--seed", seed, "Sample states at random from this seed");
  }

  bool given(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }

  Json overrides() const {
    Json j = Json::object();
    if (given("target")) j["target"]["kind"] = target;
    if (given("phi")) j["target"]["phi"] = phi;
    if (given("models")) j["models"] = models;
    if (given("levels")) j["levels"] = levels;
    if (given("states")) j["n_states"] = states;
    if (given("grid-min")) j["grid"]["min"] = grid_min;
    if (given("grid-max")) j["grid"]["max"] = grid_max;
    if (given("grid-points")) j["grid"]["points"] = grid_points;
    if (given("linear")) j["grid"]["log"] = !linear;
    if (given("ec")) j["ec_mode"] = ec;
    if (given("hybrid-logical")) j["hybrid_logical"] = hybrid;
    if (given("out")) j["output_dir"] = out;
    if (given("jobs")) j["jobs"] = jobs;
    if (given("seed")) j["seed"] = seed;
    return j;
  }
};

ExperimentConfig resolve(Command command, const Flags& flags) {
  Json layered = Json::object();
  if (flags.given("config")) {
    layered = read_json(flags.config);
    if (!layered.is_object()) throw InvalidInput(flags.config + ": config must be a JSON object");
  }
  layered.merge_patch(flags.overrides());
  EcMode mode = EcMode::Perfect;
  if (layered.contains("ec_mode") && layered["ec_mode"].is_string())
    mode = ec_mode_from_string(layered["ec_mode"].get<std::string>());
  Json merged = default_config_json(command, mode);
  merged.merge_patch(layered);
  ExperimentConfig c = config_from_json(merged);
  validate(c, command);
  return c;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Approximate noise channels and compare them on the Steane code"};
  app.set_version_flag("--version", QECAPPROX_VERSION);
  app.require_subcommand(1);
  struct Sub {
    Command command;
    CLI::App* app;
    Flags flags;
  };
  std::vector<Sub> subs;
  subs.reserve(4);
  subs.push_back({Command::Approximate, app.add_subcommand("approximate", "Fit approximate models on a noise grid"), {}});
  subs.push_back({Command::Sweep, app.add_subcommand("sweep", "Honesty and accuracy sweeps with Taylor coefficients"), {}});
  subs.push_back({Command::Threshold, app.add_subcommand("threshold", "Per-state pseudothresholds"), {}});
  subs.push_back({Command::Tables, app.add_subcommand("tables", "Re-render tables from CSVs in --out"), {}});
  for (auto& s : subs) s.flags.attach(s.app, s.command != Command::Tables);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const Sub& sub = *std::find_if(subs.begin(), subs.end(), [](const Sub& s) { return s.app->parsed(); });
  ExperimentConfig config;
  try {
    if (sub.command == Command::Tables) {
      config.output_dir = sub.flags.given("out") ? fs::path(sub.flags.out) : fs::path("out");
    } else {
      config = resolve(sub.command, sub.flags);
    }
  } catch (const std::exception& e) {
    std::cerr << "qecapprox: error: " << e.what() << "\n";
    return 2;
  }

  try {
    switch (sub.command) {
      case Command::Approximate: return cmd_approximate(config, std::cout);
      case Command::Sweep: return cmd_sweep(config, std::cout);
      case Command::Threshold: return cmd_threshold(config, std::cout);
      case Command::Tables: return cmd_tables(config.output_dir, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "qecapprox: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace qecapprox::cli
