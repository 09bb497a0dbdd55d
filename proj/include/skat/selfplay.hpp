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

#include <random>

#include "skat/game.hpp"
#include "skat/logfmt.hpp"
#include "skat/policy.hpp"

namespace skat {

// Plays one full game with every seat driven by `policy`. Bidding follows the
// max-willingness model: at each auction role a player draws an intent from
// the policy once and then bids mechanically up to it, which is exactly the
// behaviour the reach computation assumes. Intents are recorded in the log.
inline GameLog selfplay_game(uint64_t seed, const DeckSpec& deck, const Policy& policy) {
  std::mt19937_64 rng(mix_seed(seed, 0x73656c66ULL));
  GameState s = deal(seed, deck);
  const std::vector<int>& ladder = bid_ladder(deck);
  std::vector<Action> bid_menu = max_bid_actions(deck);
  std::vector<GameLog::Intent> intents;

  // One intent per (stage, role); drawn lazily at the role's first decision.
  auto draw_intent = [&](DecisionKind kind, int seat, int floor_value) {
    DecisionContext ctx = make_bid_context(deck, kind, seat, s.hands[seat], floor_value);
    Action a = sample_action(policy, ctx, bid_menu, rng);
    int value = a.kind == ActionKind::kPass ? 0 : a.bid;
    intents.push_back(GameLog::Intent{static_cast<int8_t>(seat), kind,
                                      static_cast<int16_t>(value)});
    return value;
  };

  BidStage last_stage = BidStage::kBidAnswer;
  int stage_floor = ladder.front();
  int bidder_intent = -1;
  int answerer_intent = -1;
  while (s.phase == Phase::kBidding) {
    if (s.bid_stage != last_stage) {
      last_stage = s.bid_stage;
      stage_floor = detail::next_ladder_value(ladder, s.standing_bid);
      bidder_intent = -1;
      answerer_intent = -1;
    }
    if (s.bid_stage == BidStage::kForehandClaim) {
      int intent = draw_intent(DecisionKind::kMaxBidAnswerer, 0, ladder.front());
      s = apply_action(s, intent >= ladder.front() ? Action::make_bid(ladder.front())
                                                   : Action::make_pass());
      continue;
    }
    bool continue_stage = s.bid_stage == BidStage::kContinueAnswer;
    if (s.pending_bid > 0) {
      if (answerer_intent < 0) {
        answerer_intent = draw_intent(continue_stage ? DecisionKind::kMaxBidContinueAnswer
                                                     : DecisionKind::kMaxBidAnswerer,
                                      s.answerer, stage_floor);
      }
      s = apply_action(s, answerer_intent >= s.pending_bid ? Action::make_accept()
                                                           : Action::make_pass());
    } else {
      if (bidder_intent < 0) {
        bidder_intent = draw_intent(continue_stage ? DecisionKind::kMaxBidContinue
                                                   : DecisionKind::kMaxBidBidder,
                                    s.bidder, stage_floor);
      }
      int next = detail::next_ladder_value(ladder, s.standing_bid);
      s = apply_action(s, next > 0 && bidder_intent >= next ? Action::make_bid(next)
                                                            : Action::make_pass());
    }
  }

  if (s.phase == Phase::kPickupOrHand) {
    DecisionContext ctx =
        make_pickup_context(deck, s.soloist, s.hands[s.soloist], s.winning_bid);
    Action pick = sample_action(policy, ctx, pickup_or_hand_actions(), rng);
    s = apply_action(s, pick);
    DecisionContext dd = make_discard_declare_context(deck, s.soloist, s.hands[s.soloist],
                                                      s.picked_up, s.winning_bid);
    std::vector<Action> options = discard_declare_actions(deck, s.hands[s.soloist], s.picked_up);
    s = apply_action(s, sample_action(policy, dd, options, rng));
  }

  while (s.phase == Phase::kCardplay) {
    DecisionContext ctx = play_context_from_state(s);
    std::vector<Action> legal = decision_actions(ctx);
    s = apply_action(s, sample_action(policy, ctx, legal, rng));
  }

  GameLog g = game_log_from_state(s);
  g.intents = std::move(intents);
  return g;
}

}  // namespace skat
