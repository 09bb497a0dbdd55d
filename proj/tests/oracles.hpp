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
// Test-only reference computations, kept deliberately independent of the
// library's inference and solver paths: the posterior oracle enumerates raw
// deals and simulates the auction protocol action by action, and the minimax
// oracle searches without pruning or caching.

#pragma once

#include <map>
#include <vector>

#include "skat/game.hpp"
#include "skat/infoset.hpp"
#include "skat/policy.hpp"
#include "skat/worlds.hpp"

namespace skat::test {

// ---------------------------------------------------------------------------
// Exact Bayes posterior over full deals + hidden discards, by enumeration.

struct OracleWorld {
  std::array<uint32_t, kNumPlayers> dealt_hands{};
  uint32_t dealt_skat = 0;
  uint32_t discard = 0;  // 0 for hand games
  double probability = 0.0;
};

namespace oracle_detail {

inline void enumerate_subsets(const std::vector<Card>& pool, int k, uint32_t acc, size_t from,
                              std::vector<uint32_t>& out) {
  if (k == 0) {
    out.push_back(acc);
    return;
  }
  for (size_t i = from; i + k <= pool.size(); ++i) {
    enumerate_subsets(pool, k - 1, acc | pool[i].mask(), i + 1, out);
  }
}

inline std::vector<uint32_t> subsets_of(uint32_t mask, int k) {
  std::vector<uint32_t> out;
  std::vector<Card> pool = Hand(mask).cards();
  enumerate_subsets(pool, k, 0, 0, out);
  return out;
}

// One auction stage as raw events, in engine order.
struct Stage {
  int bidder = -1;
  int answerer = -1;
  DecisionKind bidder_kind = DecisionKind::kMaxBidBidder;
  DecisionKind answerer_kind = DecisionKind::kMaxBidAnswerer;
  int start_standing = 0;
  bool claim = false;
  std::vector<BidEvent> events;
};

inline std::vector<Stage> split_stages(const InfoSet& I) {
  std::vector<Stage> stages;
  int pos = 0;
  int standing = 0;
  auto run_stage = [&](int bidder, int answerer, DecisionKind bk, DecisionKind ak) {
    Stage st;
    st.bidder = bidder;
    st.answerer = answerer;
    st.bidder_kind = bk;
    st.answerer_kind = ak;
    st.start_standing = standing;
    while (pos < I.bid_len) {
      const BidEvent& e = I.bid_seq[pos];
      st.events.push_back(e);
      ++pos;
      if (e.kind == ActionKind::kPass && e.seat == bidder) break;  // bidder quit
      if (e.kind == ActionKind::kPass && e.seat == answerer) {
        break;  // answerer quit; pending value stands
      }
      if (e.kind == ActionKind::kBid || e.kind == ActionKind::kAccept) standing = e.value;
    }
    stages.push_back(std::move(st));
  };
  run_stage(1, 0, DecisionKind::kMaxBidBidder, DecisionKind::kMaxBidAnswerer);
  int survivor0 = stages[0].events.empty()
                      ? 0
                      : (stages[0].events.back().seat == 1 &&
                                 stages[0].events.back().kind == ActionKind::kPass
                             ? 0
                             : 1);
  run_stage(2, survivor0, DecisionKind::kMaxBidContinue, DecisionKind::kMaxBidContinueAnswer);
  if (standing == 0 && pos < I.bid_len) {
    Stage claim;
    claim.bidder = 0;
    claim.claim = true;
    claim.start_standing = 0;
    claim.events.push_back(I.bid_seq[pos]);
    ++pos;
    stages.push_back(std::move(claim));
  }
  return stages;
}

// Mechanical replay of one role's stage behaviour under intent `m`,
// checked against the recorded transcript.
inline bool bidder_consistent(const Stage& st, const std::vector<int>& ladder, int m) {
  int standing = st.start_standing;
  for (size_t i = 0; i < st.events.size(); ++i) {
    const BidEvent& e = st.events[i];
    if (e.seat != st.bidder) {
      if (e.kind == ActionKind::kAccept) standing = e.value;
      continue;
    }
    int next = 0;
    for (int v : ladder)
      if (v > standing) {
        next = v;
        break;
      }
    if (e.kind == ActionKind::kBid) {
      if (!(next > 0 && m >= next && e.value == next)) return false;
      standing = e.value;  // tentatively; an accept repeats it harmlessly
    } else if (e.kind == ActionKind::kPass) {
      if (next > 0 && m >= next) return false;
      return true;
    }
  }
  return true;  // survived the stage
}

inline bool answerer_consistent(const Stage& st, int m) {
  for (size_t i = 0; i < st.events.size(); ++i) {
    const BidEvent& e = st.events[i];
    if (e.seat != st.bidder || e.kind != ActionKind::kBid) continue;
    int offer = e.value;
    SKAT_CHECK(i + 1 < st.events.size(), "offer without response in transcript");
    const BidEvent& r = st.events[i + 1];
    bool would_accept = m >= offer;
    if (r.kind == ActionKind::kAccept && !would_accept) return false;
    if (r.kind == ActionKind::kPass && would_accept) return false;
  }
  return true;
}

}  // namespace oracle_detail

// Enumerates every (deal, discard) hypothesis consistent with the viewer's
// exact knowledge and scores it with the generating policy, action by action
// through the rules engine. Returns the normalized posterior.
inline std::vector<OracleWorld> bayes_posterior(const InfoSet& I, const Policy& policy) {
  using namespace oracle_detail;
  const DeckSpec& deck = I.deck;
  const std::vector<int>& ladder = bid_ladder(deck);
  std::vector<Action> bid_menu = max_bid_actions(deck);

  // The viewer knows their own dealt hand; the soloist also knows the skat.
  uint32_t viewer_dealt = I.own_dealt;
  bool viewer_is_soloist = I.viewer == I.soloist;
  uint32_t known_dealt_skat = viewer_is_soloist && I.picked_up ? I.known_dealt_skat : 0;
  if (viewer_is_soloist && !I.picked_up) known_dealt_skat = 0;  // hand game: unknown to all

  std::vector<int> others;
  for (int p = 0; p < kNumPlayers; ++p)
    if (p != I.viewer) others.push_back(p);

  uint32_t pool = deck.card_mask & ~viewer_dealt & ~known_dealt_skat;
  std::vector<OracleWorld> worlds;

  std::vector<Stage> stages = split_stages(I);

  for (uint32_t hand_a : subsets_of(pool, deck.hand_size)) {
    uint32_t rest = pool & ~hand_a;
    for (uint32_t hand_b : subsets_of(rest, deck.hand_size)) {
      uint32_t skat = known_dealt_skat ? known_dealt_skat : (rest & ~hand_b);
      std::array<uint32_t, kNumPlayers> dealt{};
      dealt[I.viewer] = viewer_dealt;
      dealt[others[0]] = hand_a;
      dealt[others[1]] = hand_b;

      // Auction probability: product over stage roles of the mass of intents
      // that reproduce the recorded behaviour.
      double p_auction = 1.0;
      for (const Stage& st : stages) {
        int stage_floor = 0;
        for (int v : ladder)
          if (v > st.start_standing) {
            stage_floor = v;
            break;
          }
        if (st.claim) {
          DecisionContext ctx = make_bid_context(deck, DecisionKind::kMaxBidAnswerer, 0,
                                                 dealt[0], ladder.front());
          std::vector<double> probs = policy.action_probs(ctx, bid_menu);
          bool claimed = st.events[0].kind == ActionKind::kBid;
          double mass = 0.0;
          for (size_t i = 0; i < bid_menu.size(); ++i) {
            int m = bid_menu[i].kind == ActionKind::kPass ? 0 : bid_menu[i].bid;
            if ((m >= ladder.front()) == claimed) mass += probs[i];
          }
          p_auction *= mass;
          continue;
        }
        // Bidder role.
        {
          DecisionContext ctx =
              make_bid_context(deck, st.bidder_kind, st.bidder, dealt[st.bidder], stage_floor);
          std::vector<double> probs = policy.action_probs(ctx, bid_menu);
          double mass = 0.0;
          for (size_t i = 0; i < bid_menu.size(); ++i) {
            int m = bid_menu[i].kind == ActionKind::kPass ? 0 : bid_menu[i].bid;
            if (bidder_consistent(st, ladder, m)) mass += probs[i];
          }
          p_auction *= mass;
        }
        // Answerer role, only if an offer was ever made.
        bool had_offer = false;
        for (const BidEvent& e : st.events)
          if (e.seat == st.bidder && e.kind == ActionKind::kBid) had_offer = true;
        if (had_offer) {
          DecisionContext ctx = make_bid_context(deck, st.answerer_kind, st.answerer,
                                                 dealt[st.answerer], stage_floor);
          std::vector<double> probs = policy.action_probs(ctx, bid_menu);
          double mass = 0.0;
          for (size_t i = 0; i < bid_menu.size(); ++i) {
            int m = bid_menu[i].kind == ActionKind::kPass ? 0 : bid_menu[i].bid;
            if (answerer_consistent(st, m)) mass += probs[i];
          }
          p_auction *= mass;
        }
      }
      if (p_auction <= 0.0) continue;

      // Pickup decision.
      double p_pickup;
      {
        DecisionContext ctx =
            make_pickup_context(deck, I.soloist, dealt[I.soloist], I.winning_bid);
        std::vector<Action> menu = pickup_or_hand_actions();
        std::vector<double> probs = policy.action_probs(ctx, menu);
        p_pickup = I.picked_up ? probs[0] : probs[1];
      }
      if (p_pickup <= 0.0) continue;

      std::vector<uint32_t> discards;
      if (I.picked_up) {
        // The soloist viewer knows their own discard; defenders hypothesize.
        if (viewer_is_soloist) {
          discards.push_back(I.known_skat);
        } else {
          discards = subsets_of(dealt[I.soloist] | skat, kSkatSize);
        }
      } else {
        discards.push_back(0);
      }

      for (uint32_t discard : discards) {
        double p = p_auction * p_pickup;

        // Discard + declaration as one decision.
        uint32_t hand12 = I.picked_up ? (dealt[I.soloist] | skat) : dealt[I.soloist];
        DecisionContext dd =
            make_discard_declare_context(deck, I.soloist, hand12, I.picked_up, I.winning_bid);
        std::vector<Action> menu = discard_declare_actions(deck, hand12, I.picked_up);
        std::vector<double> probs = policy.action_probs(dd, menu);
        Action want = Action::make_discard_declare(discard, I.declaration);
        double p_dd = 0.0;
        for (size_t i = 0; i < menu.size(); ++i)
          if (menu[i] == want) p_dd = probs[i];
        p *= p_dd;
        if (p <= 0.0) continue;

        // Ouvert exposure pins the soloist's post-discard hand exactly.
        if (I.exposed_at_declare && I.viewer != I.soloist) {
          uint32_t at_declare = I.picked_up ? (hand12 & ~discard) : dealt[I.soloist];
          if (at_declare != I.exposed_at_declare) continue;
        }

        // Card play, replayed through the engine.
        GameState sim = deal_explicit(dealt, skat, deck);
        for (int i = 0; i < I.bid_len; ++i) {
          Action a;
          a.kind = I.bid_seq[i].kind;
          a.bid = I.bid_seq[i].value;
          sim = apply_action(sim, a);
        }
        if (I.picked_up) {
          sim = apply_action(sim, Action::make_pickup());
          sim = apply_action(sim, Action::make_discard(discard));
        } else {
          sim = apply_action(sim, Action::make_hand());
        }
        sim = apply_action(sim, Action::make_declare(I.declaration));
        bool dead = false;
        for (int t = 0; t < I.play_len && !dead; ++t) {
          Card c = I.play_seq[t].card;
          if (sim.to_move != I.play_seq[t].seat || !(sim.hands[sim.to_move] & c.mask())) {
            dead = true;
            break;
          }
          DecisionContext ctx = play_context_from_state(sim);
          std::vector<Action> legal = decision_actions(ctx);
          double pc = 0.0;
          std::vector<double> pp = policy.action_probs(ctx, legal);
          for (size_t i = 0; i < legal.size(); ++i)
            if (legal[i].card == c) pc = pp[i];
          if (pc <= 0.0) {
            dead = true;
            break;
          }
          p *= pc;
          sim = apply_action(sim, Action::make_play(c));
        }
        if (dead || p <= 0.0) continue;

        OracleWorld w;
        w.dealt_hands = dealt;
        w.dealt_skat = skat;
        w.discard = discard;
        w.probability = p;
        worlds.push_back(w);
      }
    }
  }

  double total = 0.0;
  for (const OracleWorld& w : worlds) total += w.probability;
  SKAT_CHECK(total > 0.0, "oracle found no consistent world");
  for (OracleWorld& w : worlds) w.probability /= total;
  return worlds;
}

// Maps an oracle hypothesis onto the library's state coordinates.
inline WorldState oracle_world_to_state(const OracleWorld& w, const InfoSet& I) {
  WorldState st;
  uint32_t current_skat = I.picked_up ? w.discard : w.dealt_skat;
  for (int p = 0; p < kNumPlayers; ++p) {
    if (p == I.viewer) continue;
    if (p == I.soloist && I.soloist_hand_exposed()) continue;
    uint32_t current = w.dealt_hands[p];
    if (p == I.soloist && I.picked_up) current = (w.dealt_hands[p] | w.dealt_skat) & ~w.discard;
    st.config.seat_cards[p] = current & ~I.played_by[p] & I.unseen_mask;
  }
  if (!I.skat_known()) st.config.skat_cards = current_skat & I.unseen_mask;
  st.pre_discard_skat = w.dealt_skat;
  return st;
}

// ---------------------------------------------------------------------------
// Unpruned minimax over the open position; no alpha-beta, no caching.

struct MinimaxOracle {
  GameKind kind;
  int soloist;
  DeckSpec deck;

  int soloist_points(std::array<uint32_t, kNumPlayers> hands, int leader, int trick_len,
                     std::array<Card, kNumPlayers> trick) const {
    if ((hands[0] | hands[1] | hands[2]) == 0) return 0;
    int seat = (leader + trick_len) % kNumPlayers;
    uint32_t allowed = hands[seat];
    if (trick_len > 0) {
      int led = effective_suit(trick[0], kind);
      uint32_t same = allowed & effective_suit_mask(led, kind, deck);
      if (same) allowed = same;
    }
    bool maximizing = seat == soloist;
    int best = maximizing ? -1 : 1000;
    Hand(allowed).for_each([&](Card c) {
      std::array<uint32_t, kNumPlayers> next = hands;
      next[seat] &= ~c.mask();
      int value;
      if (trick_len + 1 == kNumPlayers) {
        std::array<Card, kNumPlayers> full = trick;
        full[trick_len] = c;
        int winner = trick_winner(full, leader, kind);
        int pts = card_points(full[0]) + card_points(full[1]) + card_points(full[2]);
        value = (winner == soloist ? pts : 0) + soloist_points(next, winner, 0, {});
      } else {
        std::array<Card, kNumPlayers> grown = trick;
        grown[trick_len] = c;
        value = soloist_points(next, leader, trick_len + 1, grown);
      }
      best = maximizing ? std::max(best, value) : std::min(best, value);
    });
    return best;
  }

  // 1 if the soloist can avoid winning any remaining trick.
  int null_win(std::array<uint32_t, kNumPlayers> hands, int leader, int trick_len,
               std::array<Card, kNumPlayers> trick) const {
    if ((hands[0] | hands[1] | hands[2]) == 0) return 1;
    int seat = (leader + trick_len) % kNumPlayers;
    uint32_t allowed = hands[seat];
    if (trick_len > 0) {
      int led = effective_suit(trick[0], kind);
      uint32_t same = allowed & effective_suit_mask(led, kind, deck);
      if (same) allowed = same;
    }
    bool maximizing = seat == soloist;
    int best = maximizing ? 0 : 1;
    Hand(allowed).for_each([&](Card c) {
      std::array<uint32_t, kNumPlayers> next = hands;
      next[seat] &= ~c.mask();
      int value;
      if (trick_len + 1 == kNumPlayers) {
        std::array<Card, kNumPlayers> full = trick;
        full[trick_len] = c;
        int winner = trick_winner(full, leader, kind);
        value = winner == soloist ? 0 : null_win(next, winner, 0, {});
      } else {
        std::array<Card, kNumPlayers> grown = trick;
        grown[trick_len] = c;
        value = null_win(next, leader, trick_len + 1, grown);
      }
      best = maximizing ? std::max(best, value) : std::min(best, value);
    });
    return best;
  }
};

}  // namespace skat::test
