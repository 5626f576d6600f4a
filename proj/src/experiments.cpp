#include "pscm/experiments.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "pscm/evaluation.hpp"
#include "pscm/io.hpp"
#include "pscm/recovery.hpp"
#include "pscm/rng.hpp"
#include "pscm/separation.hpp"

namespace pscm {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

using PointKey = std::tuple<int, long long, long long, long long>;

PointKey key_of(const GridPoint& pt) {
  return {pt.p, std::llround(pt.ratio * 1e9), std::llround(pt.d_e * 1e9),
          std::llround(pt.d_o * 1e9)};
}

template <typename Fn>
void run_indexed(int total, int jobs, Fn&& fn) {
  if (jobs <= 1) {
    for (int f = 0; f < total; ++f) fn(f);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      int f = next.fetch_add(1);
      if (f >= total) return;
      fn(f);
    }
  };
  std::vector<std::thread> pool;
  int threads = std::min(jobs, total);
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

nlohmann::json point_json(const GridPoint& pt) {
  return nlohmann::json{{"p", pt.p}, {"ratio", pt.ratio}, {"d_e", pt.d_e}, {"d_o", pt.d_o}};
}

}  // namespace

Setting setting_from_string(const std::string& name) {
  std::string s = lower(name);
  if (s == "equal" || s == "p-scm_equal" || s == "pscm_equal") return Setting::equal;
  if (s == "fewer" || s == "p-scm_fewer" || s == "pscm_fewer") return Setting::fewer;
  if (s == "distinct" || s == "ds-p-scm" || s == "ds" || s == "ds_pscm") return Setting::distinct;
  if (s == "non-unique" || s == "non_unique" || s == "p-scm_nonunique" || s == "pscm_nonunique")
    return Setting::non_unique;
  throw config_error("unknown setting '" + name + "'");
}

std::string to_string(Setting s) {
  switch (s) {
    case Setting::equal: return "equal";
    case Setting::fewer: return "fewer";
    case Setting::distinct: return "distinct";
    case Setting::non_unique: return "non-unique";
  }
  throw internal_error("bad setting value");
}

GenerationConfig setting_config(Setting s, int p, std::optional<double> ratio,
                                std::optional<double> d_e, std::optional<double> d_o) {
  if (p < 1) throw config_error("p must be positive");
  GenerationConfig cfg;
  cfg.p = p;
  switch (s) {
    case Setting::equal:
    case Setting::non_unique:
      cfg.m = ratio ? static_cast<int>(std::llround(*ratio * p)) : p;
      cfg.causal_degree = d_e.value_or(1.5);
      cfg.exogenous_degree = d_o.value_or(1.5);
      break;
    case Setting::fewer:
      cfg.m = ratio ? static_cast<int>(std::llround(*ratio * p)) : p - 2;
      cfg.causal_degree = d_e.value_or(1.5);
      cfg.exogenous_degree = d_o.value_or(1.5);
      break;
    case Setting::distinct:
      cfg.m = ratio ? static_cast<int>(std::llround(*ratio * p)) : p + 3;
      cfg.causal_degree = d_e.value_or(2.0);
      cfg.exogenous_degree = d_o.value_or(1.5);
      cfg.distinct_source = true;
      break;
  }
  if (cfg.m < 1) throw config_error("setting resolves to m < 1 at p=" + std::to_string(p));
  return cfg;
}

namespace {

std::vector<double> parse_values(const std::string& text, const std::string& key) {
  std::vector<double> out;
  auto bad = [&](const std::string& why) {
    return config_error("grid key '" + key + "': " + why);
  };
  auto range_pos = text.find("..");
  if (range_pos != std::string::npos) {
    double lo = 0, hi = 0, step = 1;
    std::string lo_s = text.substr(0, range_pos);
    std::string rest = text.substr(range_pos + 2);
    auto step_pos = rest.find(':');
    std::string hi_s = step_pos == std::string::npos ? rest : rest.substr(0, step_pos);
    try {
      lo = std::stod(lo_s);
      hi = std::stod(hi_s);
      if (step_pos != std::string::npos) step = std::stod(rest.substr(step_pos + 1));
    } catch (const std::exception&) {
      throw bad("cannot parse range '" + text + "'");
    }
    if (!(step > 0)) throw bad("step must be positive");
    if (hi < lo) throw bad("range upper bound below lower bound");
    for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw bad("cannot parse value '" + item + "'");
    }
  }
  if (out.empty()) throw bad("no values");
  return out;
}

}  // namespace

std::vector<GridPoint> parse_grid(const std::string& text, Setting setting) {
  std::vector<double> ps, ratios, des, dos;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.empty()) continue;
    auto eq = part.find('=');
    if (eq == std::string::npos)
      throw config_error("grid part '" + part + "' is not key=values");
    std::string key = lower(part.substr(0, eq));
    std::string values = part.substr(eq + 1);
    if (key == "p") ps = parse_values(values, key);
    else if (key == "r" || key == "ratio") ratios = parse_values(values, key);
    else if (key == "de" || key == "d_e") des = parse_values(values, key);
    else if (key == "do" || key == "d_o") dos = parse_values(values, key);
    else throw config_error("unknown grid key '" + key + "'");
  }
  if (ps.empty()) throw config_error("grid must specify p");
  for (double p : ps)
    if (p < 1 || std::abs(p - std::llround(p)) > 1e-9)
      throw config_error("grid p values must be positive integers");

  std::vector<GridPoint> out;
  for (double p_val : ps) {
    int p = static_cast<int>(std::llround(p_val));
    std::vector<double> point_ratios;
    if (ratios.empty()) {
      auto cfg = setting_config(setting, p, std::nullopt, std::nullopt, std::nullopt);
      point_ratios.push_back(static_cast<double>(cfg.m) / p);
    } else {
      point_ratios = ratios;
    }
    auto defaults = setting_config(setting, p, std::nullopt, std::nullopt, std::nullopt);
    std::vector<double> point_des = des.empty() ? std::vector<double>{defaults.causal_degree} : des;
    std::vector<double> point_dos =
        dos.empty() ? std::vector<double>{defaults.exogenous_degree} : dos;
    for (double r : point_ratios)
      for (double de : point_des)
        for (double dq : point_dos) out.push_back(GridPoint{p, r, de, dq});
  }
  return out;
}

SatisfyingDraw draw_satisfying_model(const GenerationConfig& base, VerifyVariant variant,
                                     std::uint64_t seed, long long attempt_cap,
                                     bool want_violating) {
  SatisfyingDraw draw;
  for (long long attempt = 1; attempt <= attempt_cap; ++attempt) {
    GenerationConfig cfg = base;
    cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(attempt));
    Pscm model = generate_random_model(cfg);
    bool ok = verify_model(model, variant).overall;
    if (ok != want_violating) {
      draw.attempts = attempt;
      draw.model = std::move(model);
      return draw;
    }
  }
  draw.attempts = attempt_cap;
  draw.censored = true;
  return draw;
}

SatisfiabilityOutcome run_satisfiability_experiment(const SatisfiabilityExperiment& spec) {
  if (spec.grid.empty()) throw config_error("satisfiability experiment needs a grid");
  if (spec.trials < 1) throw config_error("trials must be positive");
  const int total = static_cast<int>(spec.grid.size()) * spec.trials;
  SatisfiabilityOutcome outcome;
  outcome.trials.resize(total);

  // Resolve configs up front so bad grid points fail before any thread runs.
  std::vector<GenerationConfig> configs;
  configs.reserve(spec.grid.size());
  for (const auto& pt : spec.grid)
    configs.push_back(setting_config(
        spec.setting == Setting::non_unique ? Setting::equal : spec.setting, pt.p, pt.ratio,
        pt.d_e, pt.d_o));

  run_indexed(total, spec.jobs, [&](int f) {
    const GridPoint& pt = spec.grid[f / spec.trials];
    SatisfiabilityTrial& rec = outcome.trials[f];
    rec.point = pt;
    rec.trial = f % spec.trials;
    rec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(f), 11);
    auto t0 = std::chrono::steady_clock::now();
    auto draw = draw_satisfying_model(configs[f / spec.trials], spec.variant, rec.seed,
                                      spec.attempt_cap, spec.setting == Setting::non_unique);
    rec.attempts = draw.attempts;
    rec.censored = draw.censored;
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });

  outcome.aggregates = aggregate_satisfiability(outcome.trials);
  return outcome;
}

std::vector<SatisfiabilityAggregate> aggregate_satisfiability(
    const std::vector<SatisfiabilityTrial>& trials) {
  std::map<PointKey, SatisfiabilityAggregate> by_point;
  std::map<PointKey, std::vector<double>> attempts;
  for (const auto& t : trials) {
    auto key = key_of(t.point);
    auto& agg = by_point[key];
    agg.point = t.point;
    ++agg.trials;
    if (t.censored) {
      ++agg.censored;
    } else {
      attempts[key].push_back(static_cast<double>(t.attempts));
    }
  }
  std::vector<SatisfiabilityAggregate> out;
  for (auto& [key, agg] : by_point) {
    const auto& xs = attempts[key];
    if (!xs.empty()) {
      double sum = 0, sum_log = 0;
      for (double x : xs) {
        sum += x;
        sum_log += std::log10(x);
      }
      agg.mean_attempts = sum / xs.size();
      agg.mean_log10_attempts = sum_log / xs.size();
      double var = 0;
      for (double x : xs) var += (x - agg.mean_attempts) * (x - agg.mean_attempts);
      agg.stddev_attempts = xs.size() > 1 ? std::sqrt(var / (xs.size() - 1)) : 0.0;
    }
    out.push_back(agg);
  }
  return out;
}

RecoveryOutcome run_recovery_experiment(const RecoveryExperiment& spec) {
  if (spec.grid.empty()) throw config_error("recovery experiment needs a grid");
  if (spec.trials < 1) throw config_error("trials must be positive");
  const int total = static_cast<int>(spec.grid.size()) * spec.trials;
  RecoveryOutcome outcome;
  outcome.trials.resize(total);

  run_indexed(total, spec.jobs, [&](int f) {
    const GridPoint& pt = spec.grid[f / spec.trials];
    RecoveryTrial& rec = outcome.trials[f];
    rec.point = pt;
    rec.trial = f % spec.trials;
    rec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(f), 13);
    auto t0 = std::chrono::steady_clock::now();
    try {
      GenerationConfig cfg = setting_config(
          spec.setting == Setting::non_unique ? Setting::equal : spec.setting, pt.p, pt.ratio,
          pt.d_e, pt.d_o);
      // In data-driven mode a model whose mixing matrix is rank deficient can
      // never be separated (the observations span fewer dimensions than there
      // are sources), so such draws are discarded and redrawn, with their
      // generation attempts still counted.
      std::optional<Pscm> picked;
      long long attempts = 0;
      for (int round = 0; !picked && attempts < spec.attempt_cap; ++round) {
        auto draw = draw_satisfying_model(
            cfg, VerifyVariant::full,
            round == 0 ? rec.seed : derive_seed(rec.seed, 17, static_cast<std::uint64_t>(round)),
            spec.attempt_cap - attempts, spec.setting == Setting::non_unique);
        attempts += draw.attempts;
        if (!draw.model) break;
        if (spec.mode == MixingMode::ica) {
          Eigen::JacobiSVD<Matrix> svd(mixing_matrix(*draw.model, spec.eps).W);
          const auto& sv = svd.singularValues();
          if (!(sv(sv.size() - 1) > 1e-9 * sv(0))) continue;
        }
        picked = std::move(draw.model);
      }
      rec.attempts = attempts;
      if (!picked) {
        rec.error = "attempt cap reached before a usable model appeared";
        return;
      }
      rec.generated = true;
      const Pscm& model = *picked;
      MixingMatrix truth = mixing_matrix(model, spec.eps);

      MixingMatrix estimate;
      if (spec.mode == MixingMode::oracle) {
        estimate = oracle_mixing(model, derive_seed(rec.seed, 7), spec.eps);
      } else {
        Dataset data = simulate(model, spec.n_samples, SourceDist::uniform, derive_seed(rec.seed, 3));
        IcaConfig ica_cfg;
        ica_cfg.m = model.m;
        ica_cfg.seed = derive_seed(rec.seed, 5);
        BootstrapConfig boot_cfg;
        boot_cfg.n_boot = spec.n_boot;
        boot_cfg.confidence = spec.confidence;
        estimate = bootstrap_prune(data, ica_cfg, boot_cfg).mixing;
        estimate.eps = spec.eps;
      }
      rec.ica_ok = ica_success(truth.W, estimate.W, spec.eps);

      RecoveryConfig rc;
      rc.eps = spec.eps;
      rc.prune_threshold = spec.prune_threshold;
      rc.best_effort = spec.setting == Setting::non_unique || spec.mode == MixingMode::ica;
      RecoveryResult recovery = recover(estimate, rc);
      rec.recovered = true;

      MetricsReport metrics = compare_adjacency(model.A, recovery.A_hat, spec.prune_threshold);
      rec.shd = metrics.shd;
      rec.shd_per_edge = metrics.shd_per_edge;
      rec.shd_per_edge_defined = metrics.shd_per_edge_defined;
      rec.precision = metrics.precision;
      rec.recall = metrics.recall;
      rec.frobenius_a = metrics.frobenius;
      rec.frobenius_b = match_B(model.B, recovery.B_hat).frobenius;
    } catch (const Error& e) {
      rec.error = e.what();
    }
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });

  outcome.aggregates = aggregate_recovery(outcome.trials);
  return outcome;
}

std::vector<RecoveryAggregate> aggregate_recovery(const std::vector<RecoveryTrial>& trials) {
  std::map<PointKey, RecoveryAggregate> by_point;
  std::map<PointKey, std::pair<double, int>> shd_all;      // sum, count
  std::map<PointKey, std::pair<double, int>> shd_success;  // sum, count
  std::map<PointKey, std::pair<int, int>> exact;           // all, success
  for (const auto& t : trials) {
    auto key = key_of(t.point);
    auto& agg = by_point[key];
    agg.point = t.point;
    ++agg.trials;
    if (!t.recovered) continue;
    ++agg.recovered;
    if (t.shd_per_edge_defined) {
      shd_all[key].first += t.shd_per_edge;
      ++shd_all[key].second;
    }
    bool is_exact = t.shd == 0.0;
    if (is_exact) ++exact[key].first;
    if (t.ica_ok) {
      ++agg.ica_successes;
      if (t.shd_per_edge_defined) {
        shd_success[key].first += t.shd_per_edge;
        ++shd_success[key].second;
      }
      if (is_exact) ++exact[key].second;
    }
  }
  std::vector<RecoveryAggregate> out;
  for (auto& [key, agg] : by_point) {
    if (shd_all[key].second > 0) agg.mean_shd_per_edge_all = shd_all[key].first / shd_all[key].second;
    if (shd_success[key].second > 0)
      agg.mean_shd_per_edge_success = shd_success[key].first / shd_success[key].second;
    if (agg.recovered > 0)
      agg.exact_rate_all = static_cast<double>(exact[key].first) / agg.recovered;
    if (agg.ica_successes > 0)
      agg.exact_rate_success = static_cast<double>(exact[key].second) / agg.ica_successes;
    out.push_back(agg);
  }
  return out;
}

std::string satisfiability_trials_csv(const SatisfiabilityOutcome& outcome) {
  std::string out = "p,ratio,d_e,d_o,trial,seed,attempts,censored,wall_ms\n";
  for (const auto& t : outcome.trials) {
    out += std::to_string(t.point.p) + "," + format_double(t.point.ratio) + "," +
           format_double(t.point.d_e) + "," + format_double(t.point.d_o) + "," +
           std::to_string(t.trial) + "," + std::to_string(t.seed) + "," +
           std::to_string(t.attempts) + "," + (t.censored ? "1" : "0") + "," +
           format_double(t.wall_ms) + "\n";
  }
  return out;
}

std::string satisfiability_aggregates_json(const SatisfiabilityOutcome& outcome) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& a : outcome.aggregates) {
    nlohmann::json j = point_json(a.point);
    j["trials"] = a.trials;
    j["censored"] = a.censored;
    j["mean_attempts"] = a.mean_attempts;
    j["stddev_attempts"] = a.stddev_attempts;
    j["mean_log10_attempts"] = a.mean_log10_attempts;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string recovery_trials_csv(const RecoveryOutcome& outcome) {
  std::string out =
      "p,ratio,d_e,d_o,trial,seed,attempts,generated,ica_ok,recovered,shd,shd_per_edge,"
      "shd_per_edge_defined,precision,recall,frobenius_a,frobenius_b,error,wall_ms\n";
  for (const auto& t : outcome.trials) {
    out += std::to_string(t.point.p) + "," + format_double(t.point.ratio) + "," +
           format_double(t.point.d_e) + "," + format_double(t.point.d_o) + "," +
           std::to_string(t.trial) + "," + std::to_string(t.seed) + "," +
           std::to_string(t.attempts) + "," + (t.generated ? "1" : "0") + "," +
           (t.ica_ok ? "1" : "0") + "," + (t.recovered ? "1" : "0") + "," + format_double(t.shd) +
           "," + format_double(t.shd_per_edge) + "," + (t.shd_per_edge_defined ? "1" : "0") + "," +
           format_double(t.precision) + "," + format_double(t.recall) + "," +
           format_double(t.frobenius_a) + "," + format_double(t.frobenius_b) + "," +
           csv_escape(t.error) + "," + format_double(t.wall_ms) + "\n";
  }
  return out;
}

std::string recovery_aggregates_json(const RecoveryOutcome& outcome) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& a : outcome.aggregates) {
    nlohmann::json j = point_json(a.point);
    j["trials"] = a.trials;
    j["ica_successes"] = a.ica_successes;
    j["recovered"] = a.recovered;
    j["mean_shd_per_edge_all"] = a.mean_shd_per_edge_all;
    j["mean_shd_per_edge_success"] = a.mean_shd_per_edge_success;
    j["exact_rate_all"] = a.exact_rate_all;
    j["exact_rate_success"] = a.exact_rate_success;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace pscm
