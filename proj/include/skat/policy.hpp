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
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "skat/game.hpp"

namespace skat {

// The decision points a player model is queried at. Bidding is abstracted to
// one maximum-willingness decision per auction role: middlehand bidding to
// forehand, forehand answering, rearhand continuing, and the first-stage
// survivor answering the continuation. Forehand's claim of a thrown-in
// auction counts as its answer decision.
enum class DecisionKind : uint8_t {
  kMaxBidBidder = 0,
  kMaxBidAnswerer,
  kMaxBidContinue,
  kMaxBidContinueAnswer,
  kPickupOrHand,
  kDiscardAndDeclare,
  kPlayCard,
};

inline constexpr int kNumDecisionKinds = 7;

constexpr bool is_max_bid_kind(DecisionKind k) {
  return static_cast<int>(k) <= static_cast<int>(DecisionKind::kMaxBidContinueAnswer);
}

inline const char* decision_kind_name(DecisionKind k) {
  switch (k) {
    case DecisionKind::kMaxBidBidder:
      return "max_bid_bidder";
    case DecisionKind::kMaxBidAnswerer:
      return "max_bid_answerer";
    case DecisionKind::kMaxBidContinue:
      return "max_bid_continue";
    case DecisionKind::kMaxBidContinueAnswer:
      return "max_bid_continue_answer";
    case DecisionKind::kPickupOrHand:
      return "pickup_or_hand";
    case DecisionKind::kDiscardAndDeclare:
      return "discard_and_declare";
    case DecisionKind::kPlayCard:
      return "play_card";
  }
  return "?";
}

// Everything a player model may condition on at one decision: the actor's
// hypothesized hand plus public state. Policies must not see other hands.
struct DecisionContext {
  DecisionKind kind = DecisionKind::kPlayCard;
  DeckSpec deck;
  int8_t actor = -1;
  uint32_t hand = 0;  // dealt hand for bid/pickup, 12-card set for discard, current for play

  int8_t soloist = -1;
  bool picked_up = false;
  bool has_declaration = false;
  GameType declaration{};
  int16_t floor_value = 0;  // max-bid kinds: lowest raise still available
  int16_t winning_bid = 0;

  uint8_t trick_no = 0;
  uint8_t trick_len = 0;
  int8_t trick_leader = -1;
  std::array<Card, kNumPlayers> trick_cards{};
  uint32_t played_mask = 0;
};

// Context builders. The self-play generator and the reach evaluator both go
// through these, so a policy sees identical inputs whether a decision is
// being made or being explained. Fields that were unknown at decision time
// (the soloist during bidding, say) stay unset on both paths.
inline DecisionContext make_bid_context(const DeckSpec& deck, DecisionKind kind, int actor,
                                        uint32_t dealt_hand, int floor_value) {
  DecisionContext ctx;
  ctx.kind = kind;
  ctx.deck = deck;
  ctx.actor = static_cast<int8_t>(actor);
  ctx.hand = dealt_hand;
  ctx.floor_value = static_cast<int16_t>(floor_value);
  return ctx;
}

inline DecisionContext make_pickup_context(const DeckSpec& deck, int actor, uint32_t dealt_hand,
                                           int winning_bid) {
  DecisionContext ctx;
  ctx.kind = DecisionKind::kPickupOrHand;
  ctx.deck = deck;
  ctx.actor = static_cast<int8_t>(actor);
  ctx.soloist = static_cast<int8_t>(actor);
  ctx.hand = dealt_hand;
  ctx.winning_bid = static_cast<int16_t>(winning_bid);
  return ctx;
}

inline DecisionContext make_discard_declare_context(const DeckSpec& deck, int actor,
                                                    uint32_t hand, bool picked_up,
                                                    int winning_bid) {
  DecisionContext ctx;
  ctx.kind = DecisionKind::kDiscardAndDeclare;
  ctx.deck = deck;
  ctx.actor = static_cast<int8_t>(actor);
  ctx.soloist = static_cast<int8_t>(actor);
  ctx.hand = hand;
  ctx.picked_up = picked_up;
  ctx.winning_bid = static_cast<int16_t>(winning_bid);
  return ctx;
}

// Cardplay context straight from a live game state.
inline DecisionContext play_context_from_state(const GameState& s) {
  DecisionContext ctx;
  ctx.kind = DecisionKind::kPlayCard;
  ctx.deck = s.deck;
  ctx.actor = s.to_move;
  ctx.hand = s.hands[s.to_move];
  ctx.soloist = s.soloist;
  ctx.picked_up = s.picked_up;
  ctx.has_declaration = true;
  ctx.declaration = s.declaration;
  ctx.winning_bid = s.winning_bid;
  ctx.trick_no = s.tricks_played;
  ctx.trick_len = s.trick_len;
  ctx.trick_leader = s.trick_leader;
  ctx.trick_cards = s.trick_cards;
  ctx.played_mask = s.played_mask();
  return ctx;
}

// Legal action sets per decision kind. Max-bid decisions range over the whole
// ladder plus pass regardless of the auction floor; behaviourally identical
// low intents are folded by the observation model, not the action set.
inline std::vector<Action> max_bid_actions(const DeckSpec& deck) {
  std::vector<Action> out;
  out.push_back(Action::make_pass());
  for (int v : bid_ladder(deck)) out.push_back(Action::make_bid(v));
  return out;
}

inline std::vector<Action> pickup_or_hand_actions() {
  return {Action::make_pickup(), Action::make_hand()};
}

inline std::vector<Action> discard_declare_actions(const DeckSpec& deck, uint32_t hand,
                                                   bool picked_up) {
  std::vector<Action> out;
  std::vector<GameType> decls = legal_declarations(deck, /*hand_game=*/!picked_up);
  if (picked_up) {
    std::vector<Card> cards = Hand(hand).cards();
    for (size_t i = 0; i < cards.size(); ++i)
      for (size_t j = i + 1; j < cards.size(); ++j) {
        uint32_t mask = cards[i].mask() | cards[j].mask();
        for (const GameType& gt : decls) out.push_back(Action::make_discard_declare(mask, gt));
      }
  } else {
    for (const GameType& gt : decls) out.push_back(Action::make_discard_declare(0, gt));
  }
  return out;
}

inline std::vector<Action> decision_actions(const DecisionContext& ctx) {
  if (is_max_bid_kind(ctx.kind)) return max_bid_actions(ctx.deck);
  switch (ctx.kind) {
    case DecisionKind::kPickupOrHand:
      return pickup_or_hand_actions();
    case DecisionKind::kDiscardAndDeclare:
      return discard_declare_actions(ctx.deck, ctx.hand, ctx.picked_up);
    case DecisionKind::kPlayCard: {
      std::vector<Action> out;
      uint32_t allowed = ctx.hand;
      if (ctx.trick_len > 0) {
        int led = effective_suit(ctx.trick_cards[0], ctx.declaration.kind);
        uint32_t same = ctx.hand & effective_suit_mask(led, ctx.declaration.kind, ctx.deck);
        if (same) allowed = same;
      }
      Hand(allowed).for_each([&](Card c) { out.push_back(Action::make_play(c)); });
      return out;
    }
    default:
      SKAT_CHECK(false);
  }
  return {};
}

// A player model: a distribution over the legal actions of a decision.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::vector<double> action_probs(const DecisionContext& ctx,
                                           const std::vector<Action>& legal) const = 0;
  virtual std::string name() const = 0;
};

using PolicyPtr = std::shared_ptr<const Policy>;

class UniformPolicy final : public Policy {
 public:
  std::vector<double> action_probs(const DecisionContext&,
                                   const std::vector<Action>& legal) const override {
    SKAT_CHECK(!legal.empty());
    return std::vector<double>(legal.size(), 1.0 / static_cast<double>(legal.size()));
  }
  std::string name() const override { return "uniform"; }
};

// What a viewer learned about one opponent decision. Fully observed actions
// carry the action; censored max-bid intents carry an inclusive interval on
// the extended ladder index (-1 = pass, i = bid_ladder()[i]).
struct ObservedAction {
  bool max_bid_interval = false;
  Action action{};
  int16_t lo = -1;
  int16_t hi = -1;

  static ObservedAction exact(const Action& a) {
    ObservedAction o;
    o.action = a;
    return o;
  }
  static ObservedAction bid_range(int lo, int hi) {
    ObservedAction o;
    o.max_bid_interval = true;
    o.lo = static_cast<int16_t>(lo);
    o.hi = static_cast<int16_t>(hi);
    return o;
  }
};

inline int extended_ladder_index(const std::vector<int>& ladder, const Action& a) {
  if (a.kind == ActionKind::kPass) return -1;
  SKAT_CHECK(a.kind == ActionKind::kBid);
  int idx = ladder_index(ladder, a.bid);
  SKAT_CHECK(idx >= 0, "bid value off the ladder");
  return idx;
}

// Probability that the model would have produced `obs` at `ctx`: the plain
// action probability, or the summed mass of every max-bid intent that yields
// the same observable auction behaviour.
inline double observed_action_probability(const Policy& policy, const DecisionContext& ctx,
                                          const ObservedAction& obs) {
  std::vector<Action> legal = decision_actions(ctx);
  std::vector<double> probs = policy.action_probs(ctx, legal);
  SKAT_CHECK(probs.size() == legal.size());
  if (!obs.max_bid_interval) {
    for (size_t i = 0; i < legal.size(); ++i)
      if (legal[i] == obs.action) return probs[i];
    return 0.0;
  }
  const std::vector<int>& ladder = bid_ladder(ctx.deck);
  double total = 0.0;
  for (size_t i = 0; i < legal.size(); ++i) {
    int ext = extended_ladder_index(ladder, legal[i]);
    if (ext >= obs.lo && ext <= obs.hi) total += probs[i];
  }
  return total;
}

inline size_t sample_index(const std::vector<double>& probs, std::mt19937_64& rng) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

inline Action sample_action(const Policy& policy, const DecisionContext& ctx,
                            const std::vector<Action>& legal, std::mt19937_64& rng) {
  std::vector<double> probs = policy.action_probs(ctx, legal);
  return legal[sample_index(probs, rng)];
}

namespace detail {

inline void softmax_inplace(std::vector<double>& scores, double temperature) {
  double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp((s - mx) / temperature);
    sum += s;
  }
  for (double& s : scores) s /= sum;
}

}  // namespace detail

// Hand-strength features shared by the scripted policy and table bucketing.
struct HandFeatures {
  int jacks = 0;
  int aces = 0;
  int tens = 0;
  int best_suit_trumps = 0;  // trump count under the best suit declaration
  GameKind best_suit = GameKind::kDiamonds;
  int high_cards = 0;  // A/T/K/Q count, null-aversion measure
};

inline HandFeatures hand_features(uint32_t hand, const DeckSpec& deck) {
  HandFeatures f;
  Hand(hand).for_each([&](Card c) {
    switch (c.rank()) {
      case Rank::kJack:
        ++f.jacks;
        break;
      case Rank::kAce:
        ++f.aces;
        ++f.high_cards;
        break;
      case Rank::kTen:
        ++f.tens;
        ++f.high_cards;
        break;
      case Rank::kKing:
      case Rank::kQueen:
        ++f.high_cards;
        break;
      default:
        break;
    }
  });
  for (int k = 0; k < 4; ++k) {
    GameKind kind = static_cast<GameKind>(k);
    if (!deck.has_suit(trump_suit(kind))) continue;
    int tc = std::popcount(hand & trump_mask(kind, deck));
    if (tc > f.best_suit_trumps) {
      f.best_suit_trumps = tc;
      f.best_suit = kind;
    }
  }
  return f;
}

// Scripted softmax policy: scores actions with cheap hand/trick heuristics
// and exponentiates. Deterministic scores make its probabilities exactly
// reproducible, which the inference tests rely on.
class HeuristicPolicy final : public Policy {
 public:
  explicit HeuristicPolicy(double temperature = 1.0) : temperature_(temperature) {}

  std::vector<double> action_probs(const DecisionContext& ctx,
                                   const std::vector<Action>& legal) const override {
    SKAT_CHECK(!legal.empty());
    std::vector<double> scores(legal.size());
    if (is_max_bid_kind(ctx.kind)) {
      // Hoist the per-context work; bid queries loop over the whole ladder.
      double target = bid_target(ctx);
      const std::vector<int>& ladder = bid_ladder(ctx.deck);
      for (size_t i = 0; i < legal.size(); ++i) {
        double pos = legal[i].kind == ActionKind::kPass
                         ? -1.0
                         : static_cast<double>(ladder_index(ladder, legal[i].bid));
        scores[i] = -0.9 * std::abs(pos - target);
      }
    } else {
      for (size_t i = 0; i < legal.size(); ++i) scores[i] = score(ctx, legal[i]);
    }
    detail::softmax_inplace(scores, temperature_);
    return scores;
  }

  std::string name() const override { return "heuristic"; }

  double score(const DecisionContext& ctx, const Action& a) const {
    switch (ctx.kind) {
      case DecisionKind::kMaxBidBidder:
      case DecisionKind::kMaxBidAnswerer:
      case DecisionKind::kMaxBidContinue:
      case DecisionKind::kMaxBidContinueAnswer:
        return bid_score(ctx, a);
      case DecisionKind::kPickupOrHand:
        return pickup_score(ctx, a);
      case DecisionKind::kDiscardAndDeclare:
        return discard_declare_score(ctx, a);
      case DecisionKind::kPlayCard:
        return play_score(ctx, a);
    }
    return 0.0;
  }

 private:
  static double hand_quality(const HandFeatures& f, const DeckSpec& deck) {
    return (2.0 * f.best_suit_trumps + 1.5 * f.jacks + f.aces + 0.5 * f.tens) /
           (2.0 * deck.hand_size);
  }

  // Game value this hand could plausibly declare: base times matadors + 1.
  static int plausible_value(uint32_t cards, GameKind kind, const DeckSpec& deck) {
    return base_value(kind) * (matador_count(cards, kind, deck) + 1);
  }

  double bid_target(const DecisionContext& ctx) const {
    HandFeatures f = hand_features(ctx.hand, ctx.deck);
    int v_est = plausible_value(ctx.hand, f.best_suit, ctx.deck);
    if (f.jacks >= 2) {
      v_est = std::max(v_est, plausible_value(ctx.hand, GameKind::kGrand, ctx.deck));
    }
    double willing = v_est * (0.35 + 0.9 * hand_quality(f, ctx.deck));
    const std::vector<int>& ladder = bid_ladder(ctx.deck);
    double target = -1.0;  // pass
    for (size_t i = 0; i < ladder.size(); ++i) {
      if (ladder[i] <= willing) target = static_cast<double>(i);
    }
    return target;
  }

  double bid_score(const DecisionContext& ctx, const Action& a) const {
    const std::vector<int>& ladder = bid_ladder(ctx.deck);
    double pos = a.kind == ActionKind::kPass
                     ? -1.0
                     : static_cast<double>(ladder_index(ladder, a.bid));
    return -0.9 * std::abs(pos - bid_target(ctx));
  }

  double pickup_score(const DecisionContext& ctx, const Action& a) const {
    HandFeatures f = hand_features(ctx.hand, ctx.deck);
    return a.kind == ActionKind::kDeclareHand ? 6.0 * (hand_quality(f, ctx.deck) - 1.05)
                                              : 0.6;
  }

  double declaration_score(const DecisionContext& ctx, const GameType& gt,
                           uint32_t kept) const {
    double s;
    int value_floor;
    if (gt.kind == GameKind::kNull) {
      HandFeatures f = hand_features(kept, ctx.deck);
      s = 1.8 - 1.1 * f.high_cards;
      value_floor = null_game_value(gt);
    } else {
      HandFeatures f = hand_features(kept, ctx.deck);
      if (gt.kind == GameKind::kGrand) {
        s = 2.0 * f.jacks + 0.6 * f.aces + 0.3 * f.tens - 0.55 * ctx.deck.hand_size;
      } else {
        int tc = std::popcount(kept & trump_mask(gt.kind, ctx.deck));
        s = 1.5 * tc + 0.6 * f.aces - 0.28 * ctx.deck.hand_size;
      }
      // Matadors count the whole post-pickup holding, buried cards included.
      value_floor = plausible_value(ctx.hand, gt.kind, ctx.deck);
    }
    if (value_floor < ctx.winning_bid) {
      // Overbid: an automatic loss unless the outcome bonuses rescue it.
      s -= 5.0 + 0.4 * (ctx.winning_bid - value_floor);
    }
    int announcements = (gt.schneider_announced ? 1 : 0) + (gt.schwarz_announced ? 1 : 0) +
                        (gt.ouvert && gt.kind != GameKind::kNull ? 1 : 0);
    s -= 5.0 * announcements;
    if (gt.kind == GameKind::kNull && gt.ouvert) s -= 2.5;
    return s;
  }

  double discard_declare_score(const DecisionContext& ctx, const Action& a) const {
    uint32_t kept = ctx.hand & ~a.discard_mask;
    double s = declaration_score(ctx, a.declaration, kept);
    if (a.discard_mask) {
      double burial = 0.0;
      Hand(a.discard_mask).for_each([&](Card c) {
        burial += 0.22 * card_points(c);
        if (effective_suit(c, a.declaration.kind) == 4) burial -= 3.0;
        if (c.rank() == Rank::kAce) burial -= 1.6;
        if (a.declaration.kind == GameKind::kNull) {
          // Bury high cards in null, keep the low ones.
          burial += 0.45 * static_cast<int>(c.rank()) - 0.22 * card_points(c);
        }
      });
      s += burial;
    }
    return s;
  }

  double play_score(const DecisionContext& ctx, const Action& a) const {
    Card c = a.card;
    GameKind kind = ctx.declaration.kind;
    bool is_soloist = ctx.actor == ctx.soloist;
    if (kind == GameKind::kNull) return null_play_score(ctx, c, is_soloist);

    double s = 0.0;
    if (ctx.trick_len == 0) {
      bool boss = is_boss(ctx, c);
      s += boss ? 1.6 : 0.0;
      if (is_soloist && effective_suit(c, kind) == 4) s += 0.9;
      if (!is_soloist && c.rank() == Rank::kAce && effective_suit(c, kind) != 4) s += 1.1;
      s -= 0.06 * card_points(c);
    } else {
      bool wins = beats_trick(ctx, c);
      int trick_points = card_points(c);
      for (int i = 0; i < ctx.trick_len; ++i) trick_points += card_points(ctx.trick_cards[i]);
      bool last = ctx.trick_len == kNumPlayers - 1;
      if (wins) {
        s += (last ? 1.7 : 0.9) + 0.10 * trick_points - 0.06 * card_power(c, kind);
      } else {
        s += 0.8 - 0.14 * card_points(c);
        if (!is_soloist && partner_winning(ctx)) s += 0.30 * card_points(c);
      }
    }
    return s;
  }

  double null_play_score(const DecisionContext& ctx, Card c, bool is_soloist) const {
    int r = static_cast<int>(c.rank());
    if (is_soloist) {
      if (ctx.trick_len == 0) return -0.5 * r;
      return beats_trick(ctx, c) ? -3.0 + 0.2 * r : 1.5 + 0.3 * r;
    }
    if (ctx.trick_len == 0) return 0.4 * (7 - r);
    // Try to stick the soloist with the trick: play under them if they still
    // have to beat us, dump low otherwise.
    return beats_trick(ctx, c) ? 0.8 - 0.15 * r : 0.6 + 0.1 * (7 - r);
  }

  bool beats_trick(const DecisionContext& ctx, Card c) const {
    GameKind kind = ctx.declaration.kind;
    std::array<Card, kNumPlayers> cards = ctx.trick_cards;
    cards[ctx.trick_len] = c;
    int n = ctx.trick_len + 1;
    int best = 0;
    for (int i = 1; i < n; ++i) {
      int es = effective_suit(cards[i], kind);
      int bs = effective_suit(cards[best], kind);
      if (es == bs) {
        if (card_power(cards[i], kind) > card_power(cards[best], kind)) best = i;
      } else if (es == 4) {
        best = i;
      }
    }
    return best == ctx.trick_len;
  }

  bool partner_winning(const DecisionContext& ctx) const {
    if (ctx.trick_len == 0 || ctx.soloist < 0) return false;
    GameKind kind = ctx.declaration.kind;
    int best = 0;
    for (int i = 1; i < ctx.trick_len; ++i) {
      int es = effective_suit(ctx.trick_cards[i], kind);
      int bs = effective_suit(ctx.trick_cards[best], kind);
      if (es == bs) {
        if (card_power(ctx.trick_cards[i], kind) > card_power(ctx.trick_cards[best], kind))
          best = i;
      } else if (es == 4) {
        best = i;
      }
    }
    int best_seat = (ctx.trick_leader + best) % kNumPlayers;
    return best_seat != ctx.soloist && best_seat != ctx.actor;
  }

  // Highest still-unaccounted card of its effective suit, from the actor's view.
  bool is_boss(const DecisionContext& ctx, Card c) const {
    GameKind kind = ctx.declaration.kind;
    int es = effective_suit(c, kind);
    uint32_t others = effective_suit_mask(es, kind, ctx.deck) & ~ctx.played_mask & ~ctx.hand;
    int p = card_power(c, kind);
    bool boss = true;
    Hand(others).for_each([&](Card o) {
      if (card_power(o, kind) > p) boss = false;
    });
    return boss;
  }

  double temperature_;
};

// Wraps another policy, putting all mass on its argmax action (ties broken by
// canonical action order). Used where tests need a deterministic script.
class GreedyPolicy final : public Policy {
 public:
  explicit GreedyPolicy(PolicyPtr inner) : inner_(std::move(inner)) {}

  std::vector<double> action_probs(const DecisionContext& ctx,
                                   const std::vector<Action>& legal) const override {
    std::vector<double> probs = inner_->action_probs(ctx, legal);
    size_t best = 0;
    for (size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[best] ||
          (probs[i] == probs[best] && legal[i].sort_key() < legal[best].sort_key())) {
        best = i;
      }
    }
    std::vector<double> out(probs.size(), 0.0);
    out[best] = 1.0;
    return out;
  }

  std::string name() const override { return "greedy(" + inner_->name() + ")"; }

 private:
  PolicyPtr inner_;
};

}  // namespace skat
