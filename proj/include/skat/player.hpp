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

#include <algorithm>
#include <numeric>
#include <vector>

#include "skat/ddsolver.hpp"
#include "skat/inference.hpp"

namespace skat {

// Open state induced by a hypothesized world at an information-set decision
// point: the bridge from sampling to perfect-information evaluation.
inline OpenState open_state_from_world(const InfoSet& I, const WorldConfiguration& cfg) {
  OpenState s;
  s.deck = I.deck;
  s.kind = I.declaration.kind;
  s.soloist = I.soloist;
  s.leader = I.trick_leader;
  s.trick_len = I.trick_len;
  s.trick_cards = I.trick_cards;
  for (int p = 0; p < kNumPlayers; ++p) {
    if (p == I.viewer) {
      s.hands[p] = I.own_current;
    } else if (p == I.soloist && I.soloist_hand_exposed()) {
      s.hands[p] = I.exposed_current();
    } else {
      s.hands[p] = cfg.seat_cards[p];
    }
  }
  uint32_t skat = I.skat_known() ? I.known_skat : cfg.skat_cards;
  s.captured_points = I.points[0];
  s.skat_points = static_cast<int16_t>(points_in(skat));
  s.soloist_took_trick = I.soloist_tricks > 0;
  return s;
}

// A determinized cardplay player: estimate the world distribution, solve the
// retained worlds double-dummy, pick the move maximizing the weighted value.
struct PlayerConfig {
  InferenceSpec inference;
  uint64_t evaluation_budget = 160;  // worlds actually solved
  int workers = 1;
};

namespace detail {

// Keep the highest-weight worlds (ties by sample order) and renormalize.
inline void retain_top(WeightedWorlds& ww, uint64_t budget) {
  if (ww.worlds.size() <= budget) return;
  std::vector<size_t> order(ww.worlds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return ww.weights[a] > ww.weights[b]; });
  order.resize(budget);
  std::sort(order.begin(), order.end());
  std::vector<WorldState> worlds;
  std::vector<double> weights;
  worlds.reserve(budget);
  weights.reserve(budget);
  double total = 0.0;
  for (size_t i : order) {
    worlds.push_back(ww.worlds[i]);
    weights.push_back(ww.weights[i]);
    total += ww.weights[i];
  }
  if (total <= 0.0) {
    std::fill(weights.begin(), weights.end(), 1.0 / budget);
  } else {
    for (double& w : weights) w /= total;
  }
  ww.worlds = std::move(worlds);
  ww.weights = std::move(weights);
}

}  // namespace detail

// Returns the card to play for the viewer to move in `I`. Deterministic for
// fixed (I, cfg, seed); ties break toward the lowest card index.
inline Action choose_move(const InfoSet& I, const PlayerConfig& cfg, uint64_t seed,
                          const WorldState* truth = nullptr) {
  SKAT_RULE(I.to_move == I.viewer, "viewer is not to move");
  std::vector<Card> legal;
  {
    DecisionContext ctx;
    ctx.kind = DecisionKind::kPlayCard;
    ctx.deck = I.deck;
    ctx.hand = I.own_current;
    ctx.declaration = I.declaration;
    ctx.has_declaration = true;
    ctx.trick_len = I.trick_len;
    ctx.trick_cards = I.trick_cards;
    for (const Action& a : decision_actions(ctx)) legal.push_back(a.card);
  }
  SKAT_CHECK(!legal.empty());
  if (legal.size() == 1) return Action::make_play(legal[0]);

  WorldSpace space(I);
  WeightedWorlds ww = estimate_dist(space, cfg.inference, seed, truth);
  detail::retain_top(ww, std::max<uint64_t>(1, cfg.evaluation_budget));

  bool soloist_view = I.viewer == I.soloist;
  bool null_game = I.declaration.kind == GameKind::kNull;
  size_t n = ww.worlds.size();
  // value[world][move]: soloist points (or null win flag) after each move.
  std::vector<std::vector<double>> values(n);
  parallel_for(n, cfg.workers, [&](size_t i) {
    DDSolver solver;
    OpenState open = open_state_from_world(I, ww.worlds[i].config);
    std::vector<std::pair<Card, int>> av = solver.action_values(open);
    std::vector<double> row(legal.size(), 0.0);
    for (const auto& [card, value] : av) {
      for (size_t m = 0; m < legal.size(); ++m)
        if (legal[m] == card) row[m] = static_cast<double>(value);
    }
    values[i] = std::move(row);
  });

  std::vector<double> score(legal.size(), 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t m = 0; m < legal.size(); ++m) score[m] += ww.weights[i] * values[i][m];
  if (!soloist_view) {
    // Defenders minimize the soloist outcome.
    for (double& s : score) s = -s;
  }
  (void)null_game;  // null values are already win flags from the solver

  size_t best = 0;
  for (size_t m = 1; m < legal.size(); ++m) {
    if (score[m] > score[best] + 1e-12) best = m;
  }
  return Action::make_play(legal[best]);
}

}  // namespace skat
