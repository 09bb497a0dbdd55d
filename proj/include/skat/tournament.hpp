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

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "skat/logfmt.hpp"
#include "skat/player.hpp"
#include "skat/stats.hpp"

namespace skat {

// A named cardplay player. The digest identifies the player's behaviour
// (not its label): identical digests must mean identical play, since
// per-arrangement seeds are derived from them.
struct PlayerSpec {
  std::string name;
  uint64_t digest = 0;
  PlayerConfig config;
};

// Replays the pre-cardplay phases from a logged deal, then plays out the
// cardplay with the given seat assignment. Defender slots follow seat order
// from the soloist: XvYZ puts Y at soloist+1 and Z at soloist+2.
inline GameScore play_arrangement(const GameLog& deal, const PlayerSpec& soloist,
                                  const PlayerSpec& defender1, const PlayerSpec& defender2,
                                  uint64_t seed) {
  SKAT_RULE(deal.declared, "arrangement needs a declared deal");
  GameState s = replay_log(deal, /*upto_plays=*/0);
  const PlayerSpec* by_seat[kNumPlayers];
  by_seat[s.soloist] = &soloist;
  by_seat[next_seat(s.soloist)] = &defender1;
  by_seat[next_seat(next_seat(s.soloist))] = &defender2;
  while (s.phase == Phase::kCardplay) {
    int mover = s.to_move;
    InfoSet I = InfoSet::from_state(s, mover);
    WorldState truth = true_world(s, I);
    uint64_t move_seed = mix_seed(seed, s.play_len, static_cast<uint64_t>(mover));
    Action a = choose_move(I, by_seat[mover]->config, move_seed, &truth);
    s = apply_action(s, a);
  }
  return score_game(s);
}

struct ArrangementResult {
  uint64_t deal_index = 0;
  std::string arrangement;
  int soloist_score = 0;
};

struct DeltaStat {
  double value = 0.0;
  double t = 0.0;
  double p = 1.0;
  bool significant_05() const { return p < 0.05; }
};

struct TournamentReport {
  bool sixway = false;
  uint64_t n_deals = 0;
  std::map<std::string, double> mean_tp;  // per arrangement, soloist view
  DeltaStat delta_tp;
  DeltaStat delta_def;
  DeltaStat delta_sol;
  // 6-way additions.
  DeltaStat delta_sol_mixed;
  DeltaStat delta_def_a;  // effect of swapping A into a BB defense
  DeltaStat delta_def_b;  // effect of swapping B into an AA defense
  std::vector<ArrangementResult> rows;
};

namespace detail {

inline const std::vector<std::string>& arrangement_names(bool sixway) {
  static const std::vector<std::string> pairwise = {"AvBB", "BvAA", "AvAA", "BvBB"};
  static const std::vector<std::string> six = {"AvBB", "BvAA", "AvAA", "BvBB",
                                               "AvAB", "AvBA", "BvAB", "BvBA"};
  return sixway ? six : pairwise;
}

inline DeltaStat delta_from(const std::vector<double>& per_deal) {
  DeltaStat d;
  TTestResult t = one_sample_ttest(per_deal, 0.0);
  d.value = t.mean_diff;
  d.t = t.t;
  d.p = t.p;
  return d;
}

}  // namespace detail

// Runs every arrangement of the A/B match over the logged deals. Results are
// a deterministic function of (players, deals, master seed); the per-deal
// score matrix is exposed so every delta can be recomputed from the rows.
// `on_row` (if set) is called once per result in a fixed order, after all
// scores are computed; `precomputed` rows (a checkpoint prefix in the same
// order) are trusted and not replayed.
inline TournamentReport run_tournament(
    const PlayerSpec& a, const PlayerSpec& b, const std::vector<GameLog>& deals,
    uint64_t master_seed, bool sixway, int workers = 1,
    const std::vector<ArrangementResult>* precomputed = nullptr,
    const std::function<void(const ArrangementResult&)>& on_row = nullptr) {
  const std::vector<std::string>& names = detail::arrangement_names(sixway);
  auto spec_of = [&](char c) -> const PlayerSpec& { return c == 'A' ? a : b; };

  struct Job {
    uint64_t deal_index;
    int arr_index;
  };
  std::vector<Job> jobs;
  for (uint64_t d = 0; d < deals.size(); ++d) {
    SKAT_RULE(deals[d].declared, "tournament deals must carry a declaration (deal ", d, ")");
    for (int ai = 0; ai < static_cast<int>(names.size()); ++ai)
      jobs.push_back(Job{d, ai});
  }

  std::vector<int> scores(jobs.size(), 0);
  size_t have = 0;
  if (precomputed) {
    SKAT_RULE(precomputed->size() <= jobs.size(), "checkpoint longer than the job list");
    for (; have < precomputed->size(); ++have) {
      const ArrangementResult& row = (*precomputed)[have];
      SKAT_RULE(row.deal_index == jobs[have].deal_index &&
                    row.arrangement == names[jobs[have].arr_index],
                "checkpoint row ", have, " does not match the schedule");
      scores[have] = row.soloist_score;
    }
  }

  parallel_for(jobs.size() - have, workers, [&](size_t k) {
    size_t j = have + k;
    const Job& job = jobs[j];
    const std::string& arr = names[job.arr_index];
    const PlayerSpec& sol = spec_of(arr[0]);
    const PlayerSpec& d1 = spec_of(arr[2]);
    const PlayerSpec& d2 = spec_of(arr[3]);
    uint64_t seed = mix_seed(master_seed, job.deal_index, sol.digest, d1.digest, d2.digest);
    scores[j] = play_arrangement(deals[job.deal_index], sol, d1, d2, seed).soloist_score;
  });

  TournamentReport report;
  report.sixway = sixway;
  report.n_deals = deals.size();
  report.rows.reserve(jobs.size());
  std::map<std::string, std::vector<double>> cols;
  for (size_t j = 0; j < jobs.size(); ++j) {
    ArrangementResult row{jobs[j].deal_index, names[jobs[j].arr_index], scores[j]};
    if (on_row && j >= have) on_row(row);
    cols[row.arrangement].push_back(row.soloist_score);
    report.rows.push_back(std::move(row));
  }
  for (const auto& [arr, xs] : cols) report.mean_tp[arr] = mean_of(xs);

  uint64_t n = deals.size();
  auto col = [&](const char* cname) -> const std::vector<double>& { return cols.at(cname); };
  std::vector<double> dtp(n), ddef(n), dsol(n);
  for (uint64_t d = 0; d < n; ++d) {
    double avbb = col("AvBB")[d], bvaa = col("BvAA")[d];
    double avaa = col("AvAA")[d], bvbb = col("BvBB")[d];
    dtp[d] = (avbb - bvaa) / 3.0;
    ddef[d] = ((avbb + bvbb) - (avaa + bvaa)) / 6.0;
    dsol[d] = ((avaa - bvaa) + (avbb - bvbb)) / 6.0;
  }
  report.delta_tp = detail::delta_from(dtp);
  report.delta_def = detail::delta_from(ddef);
  report.delta_sol = detail::delta_from(dsol);

  if (sixway) {
    std::vector<double> dsolm(n), ddefa(n), ddefb(n);
    for (uint64_t d = 0; d < n; ++d) {
      double avab = col("AvAB")[d], avba = col("AvBA")[d];
      double bvab = col("BvAB")[d], bvba = col("BvBA")[d];
      double avaa = col("AvAA")[d], bvaa = col("BvAA")[d];
      double avbb = col("AvBB")[d], bvbb = col("BvBB")[d];
      dsolm[d] = ((avab - bvab) + (avba - bvba)) / 6.0;
      // Positive: defense improved when the named player was swapped in.
      ddefb[d] = ((avaa - avab) + (avaa - avba) + (bvaa - bvab) + (bvaa - bvba)) / 12.0;
      ddefa[d] = ((avbb - avab) + (avbb - avba) + (bvbb - bvab) + (bvbb - bvba)) / 12.0;
    }
    report.delta_sol_mixed = detail::delta_from(dsolm);
    report.delta_def_a = detail::delta_from(ddefa);
    report.delta_def_b = detail::delta_from(ddefb);
  }
  return report;
}

inline TournamentReport run_pairwise(const PlayerSpec& a, const PlayerSpec& b,
                                     const std::vector<GameLog>& deals, uint64_t master_seed,
                                     int workers = 1) {
  return run_tournament(a, b, deals, master_seed, /*sixway=*/false, workers);
}

inline TournamentReport run_sixway(const PlayerSpec& a, const PlayerSpec& b,
                                   const std::vector<GameLog>& deals, uint64_t master_seed,
                                   int workers = 1) {
  return run_tournament(a, b, deals, master_seed, /*sixway=*/true, workers);
}

}  // namespace skat
