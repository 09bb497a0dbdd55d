// Copyright 2026 The skat-inference Authors
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
//
// Batch entry points: self-play generation, policy fitting, TSSR sweeps,
// cardplay tournaments, log replay validation and inference traces. Every
// command is deterministic for a fixed (config, seed) and embeds the config
// digest and tool version into its outputs.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "skat/metrics.hpp"
#include "skat/selfplay.hpp"
#include "skat/table_policy.hpp"
#include "skat/tournament.hpp"

namespace {

using nlohmann::json;
using namespace skat;

constexpr const char* kVersion = "skat-inference 1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

uint64_t file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a(data);
}

std::string hex64(uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json meta_for(const json& config) {
  return json{{"tool", kVersion}, {"config_digest", hex64(fnv1a(config.dump()))},
              {"config", config}};
}

// Policy specs: "uniform", "heuristic[:temperature]", "greedy[:temperature]",
// "table:<path>".
PolicyPtr load_policy(const std::string& spec) {
  auto split = spec.find(':');
  std::string kind = spec.substr(0, split);
  std::string arg = split == std::string::npos ? "" : spec.substr(split + 1);
  if (kind == "uniform") return std::make_shared<UniformPolicy>();
  if (kind == "heuristic") {
    double temp = arg.empty() ? 1.0 : std::stod(arg);
    return std::make_shared<HeuristicPolicy>(temp);
  }
  if (kind == "greedy") {
    double temp = arg.empty() ? 1.0 : std::stod(arg);
    return std::make_shared<GreedyPolicy>(std::make_shared<HeuristicPolicy>(temp));
  }
  if (kind == "table") {
    if (arg.empty()) throw ConfigError("table policy needs a path: table:<path>");
    std::ifstream in(arg);
    if (!in) throw ConfigError("cannot open policy file: " + arg);
    json j = json::parse(in);
    return std::make_shared<TablePolicy>(TablePolicy::from_json(j));
  }
  throw ConfigError("unknown policy spec: " + spec);
}

uint64_t policy_spec_digest(const std::string& spec) {
  auto split = spec.find(':');
  if (split != std::string::npos && spec.substr(0, split) == "table") {
    return mix_seed(fnv1a("table"), file_digest(spec.substr(split + 1)));
  }
  return fnv1a(spec);
}

std::shared_ptr<const KiTables> load_ki(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open KI tables file: " + path);
  return std::make_shared<KiTables>(ki_tables_from_json(json::parse(in)));
}

std::vector<GameLog> read_logs(const std::string& path, uint64_t max_games = 0,
                               bool declared_only = false) {
  LogReader reader(path);
  std::vector<GameLog> out;
  while (auto g = reader.next()) {
    if (declared_only && !g->declared) continue;
    out.push_back(std::move(*g));
    if (max_games && out.size() >= max_games) break;
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_selfplay(const std::string& out_path, uint64_t games, uint64_t seed,
                 const std::string& deck_name_str, const std::string& policy_spec) {
  DeckSpec deck = deck_from_name(deck_name_str);
  PolicyPtr policy = load_policy(policy_spec);
  json config{{"command", "selfplay"}, {"games", games},       {"seed", seed},
              {"deck", deck_name_str}, {"policy", policy_spec}};
  LogWriter writer(out_path, meta_for(config));
  for (uint64_t i = 0; i < games; ++i) {
    writer.write(selfplay_game(mix_seed(seed, i), deck, *policy));
  }
  writer.flush();
  std::printf("selfplay: wrote %llu games to %s\n", static_cast<unsigned long long>(games),
              out_path.c_str());
  return kExitOk;
}

int cmd_fit_policy(const std::string& logs_path, const std::string& out_path,
                   const std::string& bucketing, double alpha, const std::string& ki_out) {
  std::vector<GameLog> logs = read_logs(logs_path);
  FitDiagnostics diag;
  TablePolicy policy = fit_table_policy(logs, alpha, bucketing, &diag);
  json config{{"command", "fit-policy"}, {"logs_digest", hex64(file_digest(logs_path))},
              {"bucketing", bucketing},  {"alpha", alpha}};
  json out = policy.to_json();
  out["meta"] = meta_for(config);
  out["diagnostics"] = {{"games", diag.games},
                        {"declared_games", diag.declared_games},
                        {"decisions", diag.decisions},
                        {"intent_observations", diag.intent_observations},
                        {"exact_bid_observations", diag.exact_bid_observations}};
  std::ofstream of(out_path);
  if (!of) throw ConfigError("cannot write policy file: " + out_path);
  of << out.dump(2) << "\n";
  if (!ki_out.empty()) {
    KiTables ki = fit_ki_tables(logs, alpha);
    json kj = ki_tables_to_json(ki);
    kj["meta"] = meta_for(config);
    std::ofstream kf(ki_out);
    if (!kf) throw ConfigError("cannot write KI tables file: " + ki_out);
    kf << kj.dump(2) << "\n";
  }
  std::printf("fit-policy: %llu games (%llu declared), %llu decisions\n",
              static_cast<unsigned long long>(diag.games),
              static_cast<unsigned long long>(diag.declared_games),
              static_cast<unsigned long long>(diag.decisions));
  return kExitOk;
}

InferenceSpec variant_spec(const std::string& name, PolicyPtr policy,
                           std::shared_ptr<const KiTables> ki, uint64_t budget, int workers) {
  InferenceSpec spec;
  spec.id = variant_from_name(name);
  spec.sample_budget = budget;
  spec.marginal_budget = budget;
  spec.workers = workers;
  if (spec.id == InferenceVariantId::kPI || spec.id == InferenceVariantId::kPIF ||
      spec.id == InferenceVariantId::kCLI) {
    if (!policy) throw ConfigError("variant " + name + " needs --policy");
    spec.policy = std::move(policy);
  }
  if (spec.id == InferenceVariantId::kKI) {
    if (!ki) throw ConfigError("variant KI needs --ki");
    spec.ki = std::move(ki);
  }
  return spec;
}

int cmd_tssr(const std::string& logs_path, const std::string& out_path,
             const std::string& variants_csv, const std::string& policy_spec,
             const std::string& ki_path, uint64_t budget, uint64_t direct_cap,
             double threshold, uint64_t seed, uint64_t max_games, int workers,
             const std::string& trace_path) {
  PolicyPtr policy = policy_spec.empty() ? nullptr : load_policy(policy_spec);
  std::shared_ptr<const KiTables> ki = ki_path.empty() ? nullptr : load_ki(ki_path);

  InstrumentOptions opt;
  opt.direct_cap = direct_cap;
  opt.sampled_spec.n = budget;
  opt.sampled_spec.threshold = threshold;
  opt.seed = seed;
  {
    std::stringstream ss(variants_csv);
    std::string name;
    while (std::getline(ss, name, ',')) {
      opt.variants.push_back({name, variant_spec(name, policy, ki, budget, 1)});
    }
  }
  if (opt.variants.empty()) throw ConfigError("no variants requested");

  std::vector<GameLog> games = read_logs(logs_path, max_games, /*declared_only=*/true);
  if (games.empty()) throw DataError("no declared games in " + logs_path);

  json config{{"command", "tssr"},
              {"logs_digest", hex64(file_digest(logs_path))},
              {"variants", variants_csv},
              {"policy", policy_spec},
              {"ki", ki_path},
              {"budget", budget},
              {"direct_cap", direct_cap},
              {"threshold", threshold},
              {"seed", seed},
              {"max_games", max_games}};

  std::vector<std::vector<TssrSample>> per_game(games.size());
  parallel_for(games.size(), workers, [&](size_t i) {
    GameState final_state = replay_log(games[i]);
    per_game[i] = instrument_game_tssr(final_state, opt, i);
  });
  std::vector<TssrSample> samples;
  for (auto& v : per_game) samples.insert(samples.end(), v.begin(), v.end());

  std::vector<CurvePoint> curve = tssr_curve(samples);
  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot write CSV: " + out_path);
  out << "# " << kVersion << " config=" << hex64(fnv1a(config.dump())) << "\n";
  out << "variant,game_type,role,card_number,mean_tssr,stderr,n_obs\n";
  for (const CurvePoint& p : curve) {
    out << p.variant << ',' << p.game_class << ',' << (p.soloist_role ? "soloist" : "defender")
        << ',' << p.card_number << ',' << format_double(p.mean) << ','
        << format_double(p.stderr_mean) << ',' << p.n_obs << "\n";
  }
  if (!trace_path.empty()) {
    std::ofstream trace(trace_path);
    if (!trace) throw ConfigError("cannot write trace: " + trace_path);
    trace << json{{"_meta", meta_for(config)}}.dump() << "\n";
    for (const TssrSample& s : samples) {
      trace << json{{"game", s.game_id},       {"variant", s.variant},
                    {"game_type", s.game_class}, {"role", s.soloist_role ? "soloist" : "defender"},
                    {"card_number", s.card_number}, {"tssr", s.tssr},
                    {"world_count", s.world_count}}
                   .dump()
            << "\n";
    }
  }
  std::printf("tssr: %zu games, %zu samples, %zu curve points -> %s\n", games.size(),
              samples.size(), curve.size(), out_path.c_str());
  return kExitOk;
}

// A manifest player entry is either an inline object or a path to a player
// configuration file holding the same object.
PlayerSpec player_from_json(const std::string& label, const json& entry, int workers) {
  json j = entry;
  if (entry.is_string()) {
    std::ifstream in(entry.get<std::string>());
    if (!in) throw ConfigError("cannot open player config: " + entry.get<std::string>());
    j = json::parse(in);
  }
  PlayerSpec p;
  p.name = j.value("name", label);
  std::string policy_spec = j.value("policy", "");
  PolicyPtr policy = policy_spec.empty() ? nullptr : load_policy(policy_spec);
  std::string ki_path = j.value("ki", "");
  std::shared_ptr<const KiTables> ki = ki_path.empty() ? nullptr : load_ki(ki_path);
  std::string variant = j.at("variant").get<std::string>();
  uint64_t budget = j.value("sample_budget", 64u);
  p.config.inference = variant_spec(variant, policy, ki, budget, 1);
  if (j.contains("marginal_budget"))
    p.config.inference.marginal_budget = j["marginal_budget"].get<uint64_t>();
  p.config.evaluation_budget = j.value("evaluation_budget", 32u);
  p.config.workers = 1;
  (void)workers;
  // The digest keys seeding: identical behaviour must hash identically, so it
  // covers the behavioural fields plus the content of referenced files.
  json fingerprint{{"variant", variant},
                   {"sample_budget", budget},
                   {"evaluation_budget", p.config.evaluation_budget},
                   {"marginal_budget", p.config.inference.marginal_budget},
                   {"policy", policy_spec.empty() ? 0 : policy_spec_digest(policy_spec)},
                   {"ki", ki_path.empty() ? 0 : file_digest(ki_path)}};
  p.digest = fnv1a(fingerprint.dump());
  return p;
}

int cmd_tournament(const std::string& manifest_path, const std::string& out_prefix, bool resume,
                   int workers) {
  std::ifstream mf(manifest_path);
  if (!mf) throw ConfigError("cannot open manifest: " + manifest_path);
  json manifest = json::parse(mf);

  std::string deals_path = manifest.at("deals").get<std::string>();
  uint64_t master_seed = manifest.value("master_seed", 0u);
  bool sixway = manifest.value("mode", "pairwise") == "sixway";
  uint64_t max_deals = manifest.value("max_deals", 0u);
  PlayerSpec a = player_from_json("A", manifest.at("players").at("A"), workers);
  PlayerSpec b = player_from_json("B", manifest.at("players").at("B"), workers);
  std::vector<GameLog> deals = read_logs(deals_path, max_deals, /*declared_only=*/true);
  if (deals.empty()) throw DataError("no declared deals in " + deals_path);

  json config{{"command", "tournament"},
              {"manifest_digest", hex64(file_digest(manifest_path))},
              {"deals_digest", hex64(file_digest(deals_path))},
              {"manifest", manifest}};
  json meta = meta_for(config);

  // Durable per-arrangement ledger; resume trusts a prefix in schedule order.
  std::string rows_path = out_prefix + ".rows.jsonl";
  std::vector<ArrangementResult> prefix;
  if (resume) {
    std::ifstream in(rows_path);
    std::string line;
    while (in && std::getline(in, line)) {
      if (line.empty()) continue;
      json row = json::parse(line);
      if (row.contains("_meta")) {
        if (row["_meta"].at("config_digest") != meta.at("config_digest"))
          throw DataError("checkpoint was produced by a different configuration");
        continue;
      }
      prefix.push_back(ArrangementResult{row.at("deal").get<uint64_t>(),
                                         row.at("arrangement").get<std::string>(),
                                         row.at("score").get<int>()});
    }
  }
  std::ofstream rows(rows_path, resume ? std::ios::app : std::ios::trunc);
  if (!rows) throw ConfigError("cannot write rows ledger: " + rows_path);
  if (!resume || prefix.empty()) {
    rows << json{{"_meta", meta}}.dump() << "\n";
  }

  TournamentReport report = run_tournament(
      a, b, deals, master_seed, sixway, workers, prefix.empty() ? nullptr : &prefix,
      [&](const ArrangementResult& row) {
        rows << json{{"deal", row.deal_index},
                     {"arrangement", row.arrangement},
                     {"score", row.soloist_score}}
                    .dump()
             << "\n";
      });
  rows.flush();

  auto delta_json = [](const DeltaStat& d) {
    return json{{"value", d.value}, {"t", d.t}, {"p", d.p},
                {"significant_at_0.05", d.significant_05()}};
  };
  json rj{{"meta", meta},
          {"mode", sixway ? "sixway" : "pairwise"},
          {"n_deals", report.n_deals},
          {"players", {{"A", a.name}, {"B", b.name}}},
          {"tp_per_game", report.mean_tp},
          {"delta_tp", delta_json(report.delta_tp)},
          {"delta_def", delta_json(report.delta_def)},
          {"delta_sol", delta_json(report.delta_sol)}};
  if (sixway) {
    rj["delta_sol_mixed"] = delta_json(report.delta_sol_mixed);
    rj["delta_def_a"] = delta_json(report.delta_def_a);
    rj["delta_def_b"] = delta_json(report.delta_def_b);
  }
  std::ofstream rf(out_prefix + ".report.json");
  if (!rf) throw ConfigError("cannot write report");
  rf << rj.dump(2) << "\n";

  std::ofstream cf(out_prefix + ".report.csv");
  cf << "# " << kVersion << " config=" << meta.at("config_digest").get<std::string>() << "\n";
  cf << "stat,value,t,p,significant\n";
  auto csv_delta = [&](const char* name, const DeltaStat& d) {
    cf << name << ',' << format_double(d.value) << ',' << format_double(d.t) << ','
       << format_double(d.p) << ',' << (d.significant_05() ? "yes" : "no*") << "\n";
  };
  for (const auto& [arr, tp] : report.mean_tp)
    cf << "TP(" << arr << ")," << format_double(tp) << ",,,\n";
  csv_delta("delta_tp", report.delta_tp);
  csv_delta("delta_def", report.delta_def);
  csv_delta("delta_sol", report.delta_sol);
  if (sixway) {
    csv_delta("delta_sol_mixed", report.delta_sol_mixed);
    csv_delta("delta_def_a", report.delta_def_a);
    csv_delta("delta_def_b", report.delta_def_b);
  }

  std::printf("tournament: %llu deals, dTP=%.3f (p=%.4f)%s\n",
              static_cast<unsigned long long>(report.n_deals), report.delta_tp.value,
              report.delta_tp.p, report.delta_tp.significant_05() ? "" : " *");
  return kExitOk;
}

int cmd_replay(const std::string& logs_path) {
  LogReader reader(logs_path);
  uint64_t games = 0, declared = 0;
  while (auto g = reader.next()) {
    replay_and_check(*g);
    ++games;
    declared += g->declared;
  }
  std::printf("replay: %llu games validated (%llu declared, %llu malformed lines skipped)\n",
              static_cast<unsigned long long>(games),
              static_cast<unsigned long long>(declared),
              static_cast<unsigned long long>(reader.malformed()));
  return kExitOk;
}

int cmd_trace_inference(const std::string& logs_path, const std::string& out_path,
                        const std::string& variants_csv, const std::string& policy_spec,
                        const std::string& ki_path, uint64_t budget, uint64_t seed,
                        uint64_t max_games, int workers) {
  PolicyPtr policy = policy_spec.empty() ? nullptr : load_policy(policy_spec);
  std::shared_ptr<const KiTables> ki = ki_path.empty() ? nullptr : load_ki(ki_path);
  std::vector<std::pair<std::string, InferenceSpec>> variants;
  {
    std::stringstream ss(variants_csv);
    std::string name;
    while (std::getline(ss, name, ','))
      variants.emplace_back(name, variant_spec(name, policy, ki, budget, workers));
  }
  if (variants.empty()) throw ConfigError("no variants requested");
  std::vector<GameLog> games = read_logs(logs_path, max_games, /*declared_only=*/true);
  if (games.empty()) throw DataError("no declared games in " + logs_path);

  json config{{"command", "trace-inference"}, {"logs_digest", hex64(file_digest(logs_path))},
              {"variants", variants_csv},     {"policy", policy_spec},
              {"budget", budget},             {"seed", seed}};
  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot write trace: " + out_path);
  out << json{{"_meta", meta_for(config)}}.dump() << "\n";

  for (size_t gi = 0; gi < games.size(); ++gi) {
    GameState final_state = replay_log(games[gi]);
    GameState s = reconstruct_at_play(final_state, 0);
    for (int t = 0; t < final_state.play_len; ++t) {
      int mover = final_state.play_seq[t].seat;
      InfoSet I = InfoSet::from_state(s, mover);
      WorldSpace space(I);
      WorldState truth = true_world(s, I);
      for (const auto& [name, spec] : variants) {
        WeightedWorlds ww =
            estimate_dist(space, spec, mix_seed(seed, gi, t, fnv1a(name)), &truth);
        bool state_level = ww.state_level;
        uint64_t truth_rank =
            state_level ? space.rank_state(truth) : space.rank_config(truth.config);
        double true_weight = 0.0;
        int64_t true_pos = -1;
        std::vector<size_t> order(ww.weights.size());
        for (size_t i = 0; i < ww.weights.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t x, size_t y) { return ww.weights[x] > ww.weights[y]; });
        for (size_t pos = 0; pos < order.size(); ++pos) {
          size_t i = order[pos];
          uint64_t r = state_level ? space.rank_state(ww.worlds[i])
                                   : space.rank_config(ww.worlds[i].config);
          if (r == truth_rank) {
            true_weight = ww.weights[i];
            true_pos = static_cast<int64_t>(pos);
            break;
          }
        }
        out << json{{"game", gi},
                    {"card_number", t},
                    {"viewer", mover},
                    {"variant", name},
                    {"k", ww.sampled_count()},
                    {"total_count", ww.total_count},
                    {"entropy", ww.entropy()},
                    {"true_world_weight", true_weight},
                    {"true_world_rank", true_pos}}
                   .dump()
            << "\n";
      }
      s = apply_action(s, Action::make_play(final_state.play_seq[t].card));
    }
  }
  std::printf("trace-inference: %zu games -> %s\n", games.size(), out_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skat policy-based inference toolkit"};
  app.require_subcommand(1);

  uint64_t seed = 1;
  int workers = 1;
  std::string deck = "full";
  // Global placement also works: `skat_cli --seed 5 selfplay ...`.
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "worker threads");
  app.add_option("--deck", deck, "deck (full|mini)");

  // selfplay
  auto* sp = app.add_subcommand("selfplay", "Generate self-play game logs");
  uint64_t sp_games = 1000;
  std::string sp_out, sp_policy = "heuristic:1.0";
  sp->add_option("--games,-n", sp_games, "number of games");
  sp->add_option("--out,-o", sp_out, "output JSONL path")->required();
  sp->add_option("--policy", sp_policy, "policy spec (uniform|heuristic[:t]|greedy[:t]|table:path)");
  sp->add_option("--seed", seed, "master seed");
  sp->add_option("--deck", deck, "deck (full|mini)");

  // fit-policy
  auto* fp = app.add_subcommand("fit-policy", "Fit table policy (and KI tables) from logs");
  std::string fp_logs, fp_out, fp_bucketing = "v1", fp_ki_out;
  double fp_alpha = 1.0;
  fp->add_option("--logs", fp_logs, "input JSONL log path")->required();
  fp->add_option("--out,-o", fp_out, "output policy JSON path")->required();
  fp->add_option("--bucketing", fp_bucketing, "bucketing scheme id");
  fp->add_option("--alpha", fp_alpha, "additive smoothing");
  fp->add_option("--ki-out", fp_ki_out, "also fit KI tables to this path");

  // tssr
  auto* ts = app.add_subcommand("tssr", "True-state sampling ratio curves over logged games");
  std::string ts_logs, ts_out, ts_variants = "NI,PI,PIF", ts_policy, ts_ki, ts_trace;
  uint64_t ts_budget = 20000, ts_direct_cap = 1u << 21, ts_max_games = 0;
  double ts_threshold = 1e-7;
  ts->add_option("--logs", ts_logs, "input JSONL log path")->required();
  ts->add_option("--out,-o", ts_out, "output CSV path")->required();
  ts->add_option("--variants", ts_variants, "comma-separated variant ids (NI,KI,CLI,PI,PIF,C)");
  ts->add_option("--policy", ts_policy, "policy spec for PI/PIF/CLI");
  ts->add_option("--ki", ts_ki, "KI tables path");
  ts->add_option("--budget", ts_budget, "sample budget n for the estimator");
  ts->add_option("--direct-cap", ts_direct_cap, "enumerate directly below this world count");
  ts->add_option("--threshold", ts_threshold, "binomial mass cut-off");
  ts->add_option("--max-games", ts_max_games, "cap on games read (0 = all)");
  ts->add_option("--trace", ts_trace, "per-sample JSONL trace path");
  ts->add_option("--seed", seed, "master seed");
  ts->add_option("--workers", workers, "worker threads");

  // tournament
  auto* tn = app.add_subcommand("tournament", "Pairwise or six-way cardplay tournament");
  std::string tn_manifest, tn_out = "tournament";
  bool tn_resume = false;
  tn->add_option("--manifest", tn_manifest, "manifest JSON path")->required();
  tn->add_option("--out,-o", tn_out, "output prefix");
  tn->add_flag("--resume", tn_resume, "resume from an existing rows ledger");
  tn->add_option("--workers", workers, "worker threads");

  // replay
  auto* rp = app.add_subcommand("replay", "Validate logs against the rules engine");
  std::string rp_logs;
  rp->add_option("--logs", rp_logs, "input JSONL log path")->required();

  // trace-inference
  auto* ti = app.add_subcommand("trace-inference", "Per-decision inference traces");
  std::string ti_logs, ti_out, ti_variants = "PI", ti_policy, ti_ki;
  uint64_t ti_budget = 1000, ti_max_games = 10;
  ti->add_option("--logs", ti_logs, "input JSONL log path")->required();
  ti->add_option("--out,-o", ti_out, "output JSONL path")->required();
  ti->add_option("--variants", ti_variants, "comma-separated variant ids");
  ti->add_option("--policy", ti_policy, "policy spec");
  ti->add_option("--ki", ti_ki, "KI tables path");
  ti->add_option("--budget", ti_budget, "sample budget");
  ti->add_option("--max-games", ti_max_games, "cap on games traced");
  ti->add_option("--seed", seed, "master seed");
  ti->add_option("--workers", workers, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sp->parsed()) return cmd_selfplay(sp_out, sp_games, seed, deck, sp_policy);
    if (fp->parsed()) return cmd_fit_policy(fp_logs, fp_out, fp_bucketing, fp_alpha, fp_ki_out);
    if (ts->parsed())
      return cmd_tssr(ts_logs, ts_out, ts_variants, ts_policy, ts_ki, ts_budget, ts_direct_cap,
                      ts_threshold, seed, ts_max_games, workers, ts_trace);
    if (tn->parsed()) return cmd_tournament(tn_manifest, tn_out, tn_resume, workers);
    if (rp->parsed()) return cmd_replay(rp_logs);
    if (ti->parsed())
      return cmd_trace_inference(ti_logs, ti_out, ti_variants, ti_policy, ti_ki, ti_budget,
                                 seed, ti_max_games, workers);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const RuleError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitConfig;
}
