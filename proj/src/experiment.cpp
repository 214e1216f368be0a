#include "histlearn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "histlearn/csv.hpp"
#include "histlearn/rng.hpp"
#include "json.hpp"

namespace histlearn {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void schema_error(const std::string& why) {
  throw Error(ErrorCode::SchemaError, why);
}
[[noreturn]] void constraint_error(const std::string& why) {
  throw Error(ErrorCode::ConstraintError, why);
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!obj.is_object()) schema_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      schema_error("unknown field '" + key + "' in " + where);
    }
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

// Non-negative integer; negative values are a constraint, not a type, error.
std::size_t as_count(const json& v, const std::string& what) {
  if (!v.is_number_integer()) schema_error(what + " must be an integer");
  const auto n = v.get<long long>();
  if (n < 0) constraint_error(what + " must be >= 0, got " + std::to_string(n));
  return static_cast<std::size_t>(n);
}

double as_real(const json& v, const std::string& what) {
  if (!v.is_number()) schema_error(what + " must be a number");
  return v.get<double>();
}

std::uint64_t as_seed(const json& v, const std::string& what) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) {
    return static_cast<std::uint64_t>(v.get<long long>());
  }
  schema_error(what + " must be a non-negative integer");
}

std::string as_string(const json& v, const std::string& what) {
  if (!v.is_string()) schema_error(what + " must be a string");
  return v.get<std::string>();
}

std::vector<std::size_t> as_grid(const json& v, const std::string& what) {
  if (!v.is_array()) schema_error(what + " must be an array of integers");
  std::vector<std::size_t> out;
  for (const auto& e : v) out.push_back(as_count(e, what + " entry"));
  return out;
}

// Instance kinds carrying their own window M.
std::optional<std::size_t> instance_window(const InstanceSpec& spec) {
  return std::visit(Overloaded{
                        [](const AdversarialBlock& a) -> std::optional<std::size_t> { return a.window; },
                        [](const ConcatAdversarial& c) -> std::optional<std::size_t> { return c.window; },
                        [](const LowerBound& l) -> std::optional<std::size_t> { return l.window; },
                        [](const auto&) -> std::optional<std::size_t> { return std::nullopt; },
                    },
                    spec.variant);
}

InstanceVariant parse_instance(const json& v) {
  if (v.is_string()) {
    const auto kind = v.get<std::string>();
    if (kind == "stochastic") return Stochastic{};
    schema_error("instance '" + kind + "' needs parameters; use an object");
  }
  if (!v.is_object()) schema_error("instance must be a string or an object");
  const auto kind_field = find(v, "kind");
  if (!kind_field) schema_error("instance.kind is required");
  const std::string kind = as_string(*kind_field, "instance.kind");
  auto need = [&](const char* key) -> const json& {
    const json* f = find(v, key);
    if (!f) schema_error("instance '" + kind + "' requires '" + key + "'");
    return *f;
  };
  auto seed_or_zero = [&]() -> std::uint64_t {
    const json* f = find(v, "seed");
    return f ? as_seed(*f, "instance.seed") : 0;
  };
  if (kind == "stochastic") {
    check_keys(v, {"kind"}, "instance");
    return Stochastic{};
  }
  if (kind == "periodic") {
    check_keys(v, {"kind", "phi"}, "instance");
    return Periodic{as_real(need("phi"), "instance.phi")};
  }
  if (kind == "paired_periodic") {
    check_keys(v, {"kind", "phi1", "phi2"}, "instance");
    return PairedPeriodic{as_real(need("phi1"), "instance.phi1"),
                          as_real(need("phi2"), "instance.phi2")};
  }
  if (kind == "random_walk") {
    check_keys(v, {"kind", "sigma", "seed"}, "instance");
    return RandomWalk{as_real(need("sigma"), "instance.sigma"), seed_or_zero()};
  }
  if (kind == "adversarial_block") {
    check_keys(v, {"kind", "M"}, "instance");
    return AdversarialBlock{as_count(need("M"), "instance.M")};
  }
  if (kind == "concat_adversarial") {
    check_keys(v, {"kind", "M"}, "instance");
    return ConcatAdversarial{as_count(need("M"), "instance.M")};
  }
  if (kind == "lower_bound") {
    check_keys(v, {"kind", "M", "seed"}, "instance");
    return LowerBound{as_count(need("M"), "instance.M"), seed_or_zero()};
  }
  schema_error("unknown instance kind '" + kind + "'");
}

json instance_json(const InstanceSpec& spec) {
  return std::visit(
      Overloaded{
          [](const Stochastic&) { return json{{"kind", "stochastic"}}; },
          [](const Periodic& p) { return json{{"kind", "periodic"}, {"phi", p.phi}}; },
          [](const PairedPeriodic& p) {
            return json{{"kind", "paired_periodic"}, {"phi1", p.phi1}, {"phi2", p.phi2}};
          },
          [](const RandomWalk& w) {
            return json{{"kind", "random_walk"}, {"sigma", w.sigma}, {"seed", w.seed}};
          },
          [](const AdversarialBlock& a) { return json{{"kind", "adversarial_block"}, {"M", a.window}}; },
          [](const ConcatAdversarial& c) { return json{{"kind", "concat_adversarial"}, {"M", c.window}}; },
          [](const LowerBound& l) { return json{{"kind", "lower_bound"}, {"M", l.window}, {"seed", l.seed}}; },
      },
      spec.variant);
}

LearnerKind parse_kind_field(const json& v, const std::string& where) {
  const std::string id = as_string(v, where);
  const auto kind = parse_learner_kind(id);
  if (!kind) schema_error("unknown learner kind '" + id + "'");
  return *kind;
}

NamedLearner parse_learner(const json& v, const InstanceSpec& instance) {
  NamedLearner out;
  LearnerSpec& spec = out.spec;
  std::optional<std::size_t> window;
  if (v.is_string()) {
    spec.kind = parse_kind_field(v, "learner");
  } else {
    check_keys(v, {"kind", "id", "eta", "M", "base"}, "learner");
    const json* kind = find(v, "kind");
    if (!kind) schema_error("learner.kind is required");
    spec.kind = parse_kind_field(*kind, "learner.kind");
    if (const json* f = find(v, "id")) out.id = as_string(*f, "learner.id");
    if (const json* f = find(v, "eta")) spec.eta = as_real(*f, "learner.eta");
    if (const json* f = find(v, "M")) {
      if (!is_windowed_kind(spec.kind)) {
        constraint_error(std::string(canonical_id(spec.kind)) + " takes no window M");
      }
      window = as_count(*f, "learner.M");
    }
    if (const json* f = find(v, "base")) {
      if (!is_wrapper_kind(spec.kind)) {
        constraint_error(std::string(canonical_id(spec.kind)) + " takes no base learner");
      }
      BaseSpec base;
      if (f->is_string()) {
        base.kind = parse_kind_field(*f, "learner.base");
      } else {
        check_keys(*f, {"kind", "eta"}, "learner.base");
        const json* bk = find(*f, "kind");
        if (!bk) schema_error("learner.base.kind is required");
        base.kind = parse_kind_field(*bk, "learner.base.kind");
        if (const json* be = find(*f, "eta")) base.eta = as_real(*be, "learner.base.eta");
      }
      if (!is_base_kind(base.kind)) constraint_error("base learner must be hedge, mw or ftl");
      spec.base = base;
    }
  }
  if (out.id.empty()) out.id = canonical_id(spec.kind);
  if (is_windowed_kind(spec.kind) && !window) {
    window = instance_window(instance).value_or(
        std::max<std::size_t>(1, instance.horizon / 10));
  }
  spec = bind_learner(spec, instance, window);
  validate(spec);  // ConstraintError
  return out;
}

json learner_json(const NamedLearner& l) {
  const BaseLearner base = resolve_base(l.spec);
  json j{{"id", l.id}, {"kind", canonical_id(l.spec.kind)}};
  if (is_windowed_kind(l.spec.kind)) j["M"] = l.spec.window;
  if (is_wrapper_kind(l.spec.kind)) {
    j["base"] = json{{"kind", canonical_id(base.kind)}, {"eta", base.eta}};
  } else {
    j["eta"] = base.eta;
  }
  return j;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_provenance(std::ostream& out, const ExperimentConfig& config,
                      std::string_view artifact) {
  out << "# histlearn " << artifact << "\n";
  out << "# config_hash=" << config_hash(config) << "\n";
  out << "# master_seed=" << config.master_seed << "\n";
  out << "# instance=" << instance_id(config.instance) << "\n";
}

std::string describe(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Run: return "run";
    case Mode::Ablate: return "ablate";
    case Mode::Heatmap: return "heatmap";
    case Mode::Verify: return "verify";
  }
  return "run";
}

Mode parse_mode(std::string_view text) {
  for (auto m : {Mode::Run, Mode::Ablate, Mode::Heatmap, Mode::Verify}) {
    if (text == to_string(m)) return m;
  }
  schema_error("unknown mode '" + std::string(text) + "'");
}

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error(std::string("invalid JSON: ") + e.what());
  }
  check_keys(root,
             {"schema", "mode", "T", "d", "n_runs", "master_seed", "instance",
              "learners", "M_grid", "time_grid", "sample_actions", "threads",
              "outputs"},
             "config");

  ExperimentConfig cfg;
  try {
    if (const json* f = find(root, "schema")) {
      if (!f->is_number_integer() || f->get<int>() != kConfigSchemaVersion) {
        schema_error("unsupported schema version (expected 1)");
      }
    }
    if (const json* f = find(root, "mode")) cfg.mode = parse_mode(as_string(*f, "mode"));

    const json* inst = find(root, "instance");
    if (!inst) schema_error("'instance' is required");
    cfg.instance.variant = parse_instance(*inst);
    cfg.instance.actions = 2;
    if (const json* f = find(root, "d")) cfg.instance.actions = as_count(*f, "d");

    const auto own_window = instance_window(cfg.instance);
    const bool fixed_block = std::holds_alternative<AdversarialBlock>(cfg.instance.variant);
    if (const json* f = find(root, "T")) {
      cfg.instance.horizon = as_count(*f, "T");
      if (fixed_block && cfg.instance.horizon != 3 * *own_window) {
        constraint_error("adversarial_block fixes T = 3M");
      }
    } else {
      cfg.instance.horizon = fixed_block ? 3 * *own_window : kDefaultHorizon;
    }
    try {
      validate(cfg.instance);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConstraintError) throw;
      constraint_error(e.what());
    }

    if (const json* f = find(root, "n_runs")) cfg.n_runs = as_count(*f, "n_runs");
    if (cfg.n_runs == 0) constraint_error("n_runs must be >= 1");
    if (const json* f = find(root, "master_seed")) cfg.master_seed = as_seed(*f, "master_seed");
    if (const json* f = find(root, "threads")) cfg.threads = std::max<std::size_t>(1, as_count(*f, "threads"));
    if (const json* f = find(root, "sample_actions")) {
      if (!f->is_boolean()) schema_error("sample_actions must be a boolean");
      cfg.sample_actions = f->get<bool>();
    }

    const json* learners = find(root, "learners");
    if (!learners) schema_error("'learners' is required");
    if (!learners->is_array() || learners->empty()) {
      schema_error("learners must be a non-empty array");
    }
    std::set<std::string> seen;
    for (const auto& l : *learners) {
      auto named = parse_learner(l, cfg.instance);
      if (!seen.insert(named.id).second) {
        constraint_error("duplicate learner id '" + named.id + "'; set distinct ids");
      }
      cfg.learners.push_back(std::move(named));
    }

    const std::size_t T = cfg.instance.horizon;
    cfg.windows = default_window_grid(T);
    if (const json* f = find(root, "M_grid")) cfg.windows = as_grid(*f, "M_grid");
    for (std::size_t m : cfg.windows) {
      if (m < 1 || m > T) constraint_error("M_grid entries must lie in [1, T]");
    }
    cfg.times = default_time_grid(T);
    if (const json* f = find(root, "time_grid")) cfg.times = as_grid(*f, "time_grid");
    for (std::size_t t : cfg.times) {
      if (t > T) constraint_error("time_grid entries must lie in [0, T]");
    }

    if (const json* f = find(root, "outputs")) {
      check_keys(*f, {"regret", "ablation", "heatmap_prefix", "instance"}, "outputs");
      if (const json* g = find(*f, "regret")) cfg.outputs.regret = as_string(*g, "outputs.regret");
      if (const json* g = find(*f, "ablation")) cfg.outputs.ablation = as_string(*g, "outputs.ablation");
      if (const json* g = find(*f, "heatmap_prefix")) {
        cfg.outputs.heatmap_prefix = as_string(*g, "outputs.heatmap_prefix");
      }
      if (const json* g = find(*f, "instance")) cfg.outputs.instance = as_string(*g, "outputs.instance");
    }
  } catch (const json::exception& e) {
    schema_error(e.what());
  }
  return cfg;
}

std::string canonical_json(const ExperimentConfig& config) {
  json j;
  j["schema"] = config.schema;
  j["mode"] = to_string(config.mode);
  j["T"] = config.instance.horizon;
  j["d"] = config.instance.actions;
  j["n_runs"] = config.n_runs;
  j["master_seed"] = config.master_seed;
  j["instance"] = instance_json(config.instance);
  j["learners"] = json::array();
  for (const auto& l : config.learners) j["learners"].push_back(learner_json(l));
  j["M_grid"] = config.windows;
  j["time_grid"] = config.times;
  j["sample_actions"] = config.sample_actions;
  j["outputs"] = json{{"regret", config.outputs.regret},
                      {"ablation", config.outputs.ablation},
                      {"heatmap_prefix", config.outputs.heatmap_prefix},
                      {"instance", config.outputs.instance}};
  return j.dump();
}

std::string config_hash(const ExperimentConfig& config) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(canonical_json(config));
  return os.str();
}

void write_regret_csv(std::ostream& out, const ExperimentConfig& config,
                      const std::vector<std::vector<RunResult>>& runs) {
  write_provenance(out, config, "regret");
  out << "learner,run,t,cumulative_regret_expected,cumulative_regret_realized\n";
  for (std::size_t l = 0; l < runs.size(); ++l) {
    for (std::size_t r = 0; r < runs[l].size(); ++r) {
      const RunResult& res = runs[l][r];
      const auto& expected = res.pseudo().cumulative;
      const auto& realized = res.realized.cumulative;
      for (std::size_t s = 0; s < realized.size(); ++s) {
        out << config.learners[l].id << ',' << r << ',' << (s + 1) << ','
            << format_number(expected[s]) << ',' << format_number(realized[s]) << '\n';
      }
    }
  }
}

void write_ablation_csv(std::ostream& out, const ExperimentConfig& config,
                        const AblationResult& result) {
  write_provenance(out, config, "ablation");
  out << "# runs_per_cell=" << result.runs_per_cell << "\n";
  out << "learner,M,avg_final_per_round_regret\n";
  for (std::size_t l = 0; l < result.learner_ids.size(); ++l) {
    for (std::size_t w = 0; w < result.windows.size(); ++w) {
      out << result.learner_ids[l] << ',' << result.windows[w] << ','
          << format_number(result.avg_final_regret[l][w]) << '\n';
    }
  }
}

void write_heatmap_csv(std::ostream& out, const ExperimentConfig& config,
                       const HeatmapResult& result) {
  write_provenance(out, config, "heatmap");
  out << "learner,M,t,avg_cumulative_regret\n";
  for (std::size_t w = 0; w < result.windows.size(); ++w) {
    for (std::size_t k = 0; k < result.times.size(); ++k) {
      out << result.learner_id << ',' << result.windows[w] << ',' << result.times[k]
          << ',' << format_number(result.values[w][k]) << '\n';
    }
  }
}

std::vector<CheckResult> verify_instance(const ExperimentConfig& config) {
  std::vector<CheckResult> checks;
  const InstanceSpec& instance = config.instance;
  const std::uint64_t seed = run_seed(config.master_seed, instance, 0);
  const RewardSequence rewards = generate(instance, seed);
  const std::size_t T = rewards.rounds(), d = rewards.actions();
  const std::size_t default_window =
      instance_window(instance).value_or(std::max<std::size_t>(1, T / 10));

  auto first_window = [&](LearnerKind kind) -> std::size_t {
    for (const auto& l : config.learners) {
      if (l.spec.kind == kind) return l.spec.window;
    }
    return default_window;
  };

  // Sliding-window MW weights against the window product recomputed from
  // scratch (extended precision so long windows do not overflow).
  {
    LearnerSpec spec;
    spec.kind = LearnerKind::HistMW;
    spec.window = first_window(LearnerKind::HistMW);
    spec = bind_learner(spec, instance);
    LearnerState state(spec);
    double worst = 0.0;
    for (std::size_t t = 1; t <= T; ++t) {
      state.observe(rewards.row(static_cast<long>(t)));
      const std::size_t lo = t >= spec.window ? t - spec.window + 1 : 1;
      const auto score = state.score();
      for (std::size_t i = 0; i < d; ++i) {
        long double naive = 1.0L;
        for (std::size_t s = lo; s <= t; ++s) {
          naive *= 1.0L + static_cast<long double>(state.eta()) *
                              rewards.at(static_cast<long>(s), i);
        }
        const long double incremental = std::exp(static_cast<long double>(score[i]));
        worst = std::max(worst, static_cast<double>(std::fabs(incremental - naive) / naive));
      }
    }
    checks.push_back({"hist_mw incremental == naive window product", worst <= 1e-9,
                      "max relative weight error " + describe(worst) + " (M=" +
                          std::to_string(spec.window) + ")"});
  }

  // AverageRestart play against the mean of independently rebuilt sub-runs.
  for (const auto& l : config.learners) {
    if (l.spec.kind != LearnerKind::AverageRestart) continue;
    LearnerState state(l.spec);
    double worst = 0.0;
    for (std::size_t t = 1; t <= T; ++t) {
      const auto x = state.act();
      const auto y = average_restart_act(static_cast<long>(t), rewards, l.spec.window, state.base());
      for (std::size_t i = 0; i < d; ++i) worst = std::max(worst, std::fabs(x[i] - y[i]));
      state.observe(rewards.row(static_cast<long>(t)));
    }
    checks.push_back({l.id + " mixture identity", worst <= 1e-12,
                      "max |x - mean of sub-runs| " + describe(worst)});
  }

  // AverageRestart with M = T against the full-horizon variant, on a prefix
  // of at most 1000 rounds (the full-horizon bank is quadratic in T).
  {
    const std::size_t horizon = std::min<std::size_t>(T, 1000);
    std::vector<double> prefix(rewards.data().begin(),
                               rewards.data().begin() + static_cast<long>(horizon * d));
    const RewardSequence head(horizon, d, rewards.range(), std::move(prefix));
    LearnerSpec avg;
    avg.kind = LearnerKind::AverageRestart;
    avg.window = horizon;
    avg.horizon = horizon;
    avg.actions = d;
    avg.range = rewards.range();
    avg.base = BaseSpec{LearnerKind::MWFixed, std::nullopt};
    LearnerSpec full = avg;
    full.kind = LearnerKind::AverageRestartFullHorizon;
    full.window = 0;
    const auto a = play(avg, head);
    const auto b = play(full, head);
    double worst = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      for (std::size_t i = 0; i < d; ++i) worst = std::max(worst, std::fabs(a[t][i] - b[t][i]));
    }
    checks.push_back({"average_restart(M=T) == full_horizon", worst <= 1e-12,
                      "max discrepancy " + describe(worst) + " over " +
                          std::to_string(horizon) + " rounds"});
  }

  // FTL is mean-based at every gamma.
  {
    LearnerSpec ftl;
    ftl.kind = LearnerKind::FTL;
    ftl = bind_learner(ftl, instance);
    const auto plays = play(ftl, rewards);
    const auto violations = check_mean_based(plays, rewards, T, 0.05, static_cast<double>(T));
    checks.push_back({"ftl mean-based (gamma=0.05)", violations.empty(),
                      std::to_string(violations.size()) + " violations"});
  }

  if (d == 2) {
    const std::size_t m = first_window(LearnerKind::HistMW);
    const auto fast = delta_trace(rewards, m);
    bool same = true;
    for (std::size_t t = 1; t <= T; ++t) {
      double brute = 0.0;
      for (long s = static_cast<long>(t) - static_cast<long>(m); s < static_cast<long>(t); ++s) {
        brute += rewards.at(s, 0) - rewards.at(s, 1);
      }
      same = same && brute == fast.at(static_cast<long>(t));
    }
    checks.push_back({"delta trace == brute-force window sum", same,
                      "M=" + std::to_string(m)});
  }

  if (const auto* block = std::get_if<AdversarialBlock>(&instance.variant)) {
    const std::size_t m = block->window;
    LearnerSpec spec;
    spec.kind = LearnerKind::HistMW;
    spec.window = m;
    spec = bind_learner(spec, instance);
    const auto plays = play(spec, rewards);
    const auto trace = per_round_regret(rewards, plays);
    const double floor = static_cast<double>(m) / 18.0;
    checks.push_back({"hist_mw total regret >= M/18", trace.total() >= floor,
                      "total " + describe(trace.total()) + " vs M/18 = " + describe(floor) +
                          ", M/6 = " + describe(static_cast<double>(m) / 6.0) +
                          "; measured constant regret/M = " +
                          describe(trace.total() / static_cast<double>(m))});
    const auto violations = check_mean_based(plays, rewards, m, 0.05, static_cast<double>(m));
    checks.push_back({"hist_mw mean-based (gamma=0.05, scale=M)", violations.empty(),
                      std::to_string(violations.size()) + " violations"});
  }

  if (const auto* concat = std::get_if<ConcatAdversarial>(&instance.variant)) {
    const std::size_t m = concat->window;
    LearnerSpec hist;
    hist.kind = LearnerKind::HistMW;
    hist.window = m;
    hist = bind_learner(hist, instance);
    const double hist_regret = per_round_regret(rewards, play(hist, rewards)).final_per_round;
    checks.push_back({"hist_mw per-round regret >= 0.05", hist_regret >= 0.05,
                      "per-round " + describe(hist_regret)});
    const double bound = 2.0 * std::sqrt(std::log(static_cast<double>(d)) / static_cast<double>(m));
    for (auto kind : {LearnerKind::PeriodicRestart, LearnerKind::AverageRestart}) {
      LearnerSpec w;
      w.kind = kind;
      w.window = m;
      w.base = BaseSpec{LearnerKind::Hedge, std::nullopt};
      w = bind_learner(w, instance);
      const double reg = per_round_regret(rewards, play(w, rewards)).final_per_round;
      checks.push_back({std::string(canonical_id(kind)) + "(hedge) per-round regret <= 2 sqrt(ln d / M)",
                        reg <= bound, "per-round " + describe(reg) + " vs " + describe(bound)});
    }
  }
  return checks;
}

RunReport run_mode(const ExperimentConfig& config,
                   const std::filesystem::path& out_dir, std::ostream& log) {
  RunReport report;
  std::filesystem::create_directories(out_dir);
  auto open = [&](const std::string& name) {
    const auto path = out_dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    report.written.push_back(path);
    return f;
  };
  const RunOptions options{config.threads, config.sample_actions};

  switch (config.mode) {
    case Mode::Run: {
      const std::size_t L = config.learners.size(), R = config.n_runs;
      std::vector<std::vector<RunResult>> results(L, std::vector<RunResult>(R));
      parallel_for(L * R, config.threads, [&](std::size_t cell) {
        const std::size_t l = cell / R, r = cell % R;
        const std::uint64_t seed = run_seed(config.master_seed, config.instance, r);
        std::optional<std::uint64_t> sample;
        if (config.sample_actions) sample = derive_seed(seed, {l, config.learners[l].spec.window});
        results[l][r] = run_once(config.instance, config.learners[l].spec, seed, sample);
      });
      {
        auto f = open(config.outputs.regret);
        write_regret_csv(f, config, results);
      }
      {
        auto f = open(config.outputs.instance);
        write_reward_csv(f, generate(config.instance, run_seed(config.master_seed, config.instance, 0)));
      }
      for (std::size_t l = 0; l < L; ++l) {
        double mean = 0.0;
        for (const auto& res : results[l]) mean += res.pseudo().total();
        log << config.learners[l].id << ": mean final total regret "
            << describe(mean / static_cast<double>(R)) << "\n";
      }
      break;
    }
    case Mode::Ablate: {
      const auto result = ablate_history(config.instance, config.learners, config.windows,
                                         config.n_runs, config.master_seed, options);
      auto f = open(config.outputs.ablation);
      write_ablation_csv(f, config, result);
      break;
    }
    case Mode::Heatmap: {
      for (const auto& l : config.learners) {
        const auto result = heatmap_matrix(config.instance, l, config.windows, config.times,
                                           config.n_runs, config.master_seed, options);
        auto f = open(config.outputs.heatmap_prefix + l.id + ".csv");
        write_heatmap_csv(f, config, result);
      }
      break;
    }
    case Mode::Verify: {
      report.checks = verify_instance(config);
      for (const auto& c : report.checks) {
        log << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        report.ok = report.ok && c.passed;
      }
      break;
    }
  }
  for (const auto& p : report.written) log << "wrote " << p.string() << "\n";
  return report;
}

}  // namespace histlearn
