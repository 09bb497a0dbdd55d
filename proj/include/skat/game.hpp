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

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "skat/deck.hpp"
#include "skat/game_type.hpp"

namespace skat {

enum class Phase : uint8_t {
  kDeal = 0,
  kBidding,
  kPickupOrHand,
  kDiscard,
  kDeclare,
  kCardplay,
  kTerminal,
};

enum class ActionKind : uint8_t {
  kBid = 0,
  kPass,
  kAccept,
  kPickupSkat,
  kDeclareHand,
  kDiscard,
  kDeclare,
  kPlayCard,
  // Composite used by policies and inference: discard (possibly empty, for
  // hand games) plus declaration in one decision. The engine accepts it as
  // shorthand for kDiscard followed by kDeclare.
  kDiscardDeclare,
};

struct Action {
  ActionKind kind = ActionKind::kPass;
  int16_t bid = 0;            // kBid
  Card card{};                // kPlayCard
  uint32_t discard_mask = 0;  // kDiscard, kDiscardDeclare
  GameType declaration{};     // kDeclare, kDiscardDeclare

  static Action make_bid(int value) {
    Action a;
    a.kind = ActionKind::kBid;
    a.bid = static_cast<int16_t>(value);
    return a;
  }
  static Action make_pass() { return Action{}; }
  static Action make_accept() {
    Action a;
    a.kind = ActionKind::kAccept;
    return a;
  }
  static Action make_pickup() {
    Action a;
    a.kind = ActionKind::kPickupSkat;
    return a;
  }
  static Action make_hand() {
    Action a;
    a.kind = ActionKind::kDeclareHand;
    return a;
  }
  static Action make_discard(uint32_t mask) {
    Action a;
    a.kind = ActionKind::kDiscard;
    a.discard_mask = mask;
    return a;
  }
  static Action make_declare(GameType gt) {
    Action a;
    a.kind = ActionKind::kDeclare;
    a.declaration = gt;
    return a;
  }
  static Action make_play(Card c) {
    Action a;
    a.kind = ActionKind::kPlayCard;
    a.card = c;
    return a;
  }
  static Action make_discard_declare(uint32_t mask, GameType gt) {
    Action a;
    a.kind = ActionKind::kDiscardDeclare;
    a.discard_mask = mask;
    a.declaration = gt;
    return a;
  }

  // Canonical ordering used for deterministic tie-breaking. Injective over
  // the actions of any one decision: the 32-bit payload is whichever of
  // bid / card / discard mask the kind uses.
  uint64_t sort_key() const {
    uint64_t decl = (static_cast<uint64_t>(declaration.kind) << 4) |
                    (declaration.hand ? 1 : 0) | (declaration.ouvert ? 2 : 0) |
                    (declaration.schneider_announced ? 4 : 0) |
                    (declaration.schwarz_announced ? 8 : 0);
    uint64_t payload = 0;
    switch (kind) {
      case ActionKind::kBid:
        payload = static_cast<uint16_t>(bid);
        break;
      case ActionKind::kPlayCard:
        payload = card.index;
        break;
      case ActionKind::kDiscard:
      case ActionKind::kDiscardDeclare:
        payload = discard_mask;
        break;
      default:
        break;
    }
    return (static_cast<uint64_t>(kind) << 57) | (decl << 48) | payload;
  }

  friend bool operator==(const Action& a, const Action& b) {
    return a.kind == b.kind && a.bid == b.bid && a.card == b.card &&
           a.discard_mask == b.discard_mask && a.declaration == b.declaration;
  }
};

inline std::string game_type_to_string(const GameType& gt) {
  std::string s = game_kind_name(gt.kind);
  if (gt.hand) s += "+hand";
  if (gt.ouvert) s += "+ouvert";
  if (gt.schneider_announced) s += "+schneider";
  if (gt.schwarz_announced) s += "+schwarz";
  return s;
}

inline std::string action_to_string(const Action& a) {
  switch (a.kind) {
    case ActionKind::kBid:
      return "bid" + std::to_string(a.bid);
    case ActionKind::kPass:
      return "pass";
    case ActionKind::kAccept:
      return "accept";
    case ActionKind::kPickupSkat:
      return "pickup";
    case ActionKind::kDeclareHand:
      return "hand";
    case ActionKind::kDiscard:
      return "discard " + hand_to_string(Hand(a.discard_mask));
    case ActionKind::kDeclare:
      return "declare " + game_type_to_string(a.declaration);
    case ActionKind::kPlayCard:
      return "play " + card_to_string(a.card);
    case ActionKind::kDiscardDeclare:
      return "discard " + hand_to_string(Hand(a.discard_mask)) + " declare " +
             game_type_to_string(a.declaration);
  }
  return "?";
}

struct BidEvent {
  int8_t seat = -1;
  ActionKind kind = ActionKind::kPass;
  int16_t value = 0;
};

struct PlayEvent {
  int8_t seat = -1;
  Card card{};
};

inline constexpr int kMaxBidEvents = 176;

constexpr int next_seat(int s) { return (s + 1) % kNumPlayers; }

// Auction roles. Stage 0: middlehand bids to forehand. Stage 1: rearhand bids
// to the stage-0 survivor. Stage 2: if nobody bid, forehand may claim the
// lowest bid or throw the deal in.
enum class BidStage : int8_t { kBidAnswer = 0, kContinueAnswer = 1, kForehandClaim = 2, kDone = 3 };

struct GameScore {
  int soloist_score = 0;
  bool won = false;
  int game_value = 0;
};

// Full perfect-information game state. Trivially copyable; all mutation goes
// through apply_action which returns the successor.
struct GameState {
  DeckSpec deck;
  Phase phase = Phase::kDeal;
  std::array<uint32_t, kNumPlayers> hands{};
  std::array<uint32_t, kNumPlayers> dealt_hands{};
  uint32_t skat = 0;        // current skat; after a discard these are the buried cards
  uint32_t dealt_skat = 0;  // skat as dealt

  BidStage bid_stage = BidStage::kBidAnswer;
  int8_t bidder = 1;
  int8_t answerer = 0;
  int16_t standing_bid = 0;  // highest accepted value, 0 = none yet
  int16_t pending_bid = 0;   // announced value awaiting accept/pass, 0 = none
  uint8_t bid_len = 0;
  std::array<BidEvent, kMaxBidEvents> bid_seq{};

  int8_t soloist = -1;
  int16_t winning_bid = 0;
  bool picked_up = false;
  bool passed_in = false;
  bool has_declaration = false;
  GameType declaration{};

  uint8_t play_len = 0;
  std::array<PlayEvent, kDeckCards> play_seq{};
  int8_t trick_leader = 0;
  uint8_t trick_len = 0;
  std::array<Card, kNumPlayers> trick_cards{};
  uint8_t tricks_played = 0;
  uint8_t soloist_tricks = 0;
  std::array<int16_t, 2> points{};  // captured card points: soloist party / defenders
  int8_t to_move = -1;

  bool soloist_party(int seat) const { return seat == soloist; }
  uint32_t played_mask() const {
    uint32_t m = 0;
    for (int i = 0; i < play_len; ++i) m |= play_seq[i].card.mask();
    return m;
  }
  int current_trick_index() const { return tricks_played; }
};

namespace detail {

inline void push_bid_event(GameState& s, int seat, ActionKind kind, int value) {
  SKAT_CHECK(s.bid_len < kMaxBidEvents);
  s.bid_seq[s.bid_len++] = BidEvent{static_cast<int8_t>(seat), kind, static_cast<int16_t>(value)};
}

inline int next_ladder_value(const std::vector<int>& ladder, int above) {
  for (int v : ladder)
    if (v > above) return v;
  return 0;
}

}  // namespace detail

inline GameState deal(uint64_t seed, const DeckSpec& deck = DeckSpec::full_deck()) {
  GameState s;
  s.deck = deck;
  std::vector<Card> cards = deck.cards();
  SKAT_CHECK(static_cast<int>(cards.size()) == kNumPlayers * deck.hand_size + kSkatSize);
  std::mt19937_64 rng(mix_seed(seed, 0x6465616cULL));
  // Fisher-Yates with explicit draws; std::shuffle is not portable across
  // standard library implementations.
  for (size_t i = cards.size() - 1; i > 0; --i) {
    size_t j = rng() % (i + 1);
    std::swap(cards[i], cards[j]);
  }
  size_t pos = 0;
  for (int p = 0; p < kNumPlayers; ++p) {
    Hand h;
    for (int k = 0; k < deck.hand_size; ++k) h.add(cards[pos++]);
    s.hands[p] = h.mask;
  }
  s.skat = cards[pos].mask() | cards[pos + 1].mask();
  s.dealt_hands = s.hands;
  s.dealt_skat = s.skat;
  s.phase = Phase::kBidding;
  s.bid_stage = BidStage::kBidAnswer;
  s.bidder = 1;
  s.answerer = 0;
  s.to_move = s.bidder;
  return s;
}

// Seat-level deal under an explicit assignment (log replay, hypothetical worlds).
inline GameState deal_explicit(const std::array<uint32_t, kNumPlayers>& hands, uint32_t skat,
                               const DeckSpec& deck) {
  GameState s;
  s.deck = deck;
  uint32_t all = skat;
  int expected = deck.hand_size;
  SKAT_RULE(std::popcount(skat) == kSkatSize, "skat must hold exactly ", kSkatSize, " cards");
  for (int p = 0; p < kNumPlayers; ++p) {
    SKAT_RULE(std::popcount(hands[p]) == expected, "hand ", p, " must hold ", expected, " cards");
    SKAT_RULE((all & hands[p]) == 0, "duplicate card across hands/skat");
    all |= hands[p];
  }
  SKAT_RULE(all == deck.card_mask, "deal must partition the deck");
  s.hands = hands;
  s.dealt_hands = hands;
  s.skat = skat;
  s.dealt_skat = skat;
  s.phase = Phase::kBidding;
  s.bid_stage = BidStage::kBidAnswer;
  s.bidder = 1;
  s.answerer = 0;
  s.to_move = s.bidder;
  return s;
}

// Cards the seat may legally play to the current trick.
inline uint32_t follow_filter(uint32_t hand, const GameState& s) {
  if (s.trick_len == 0) return hand;
  int led = effective_suit(s.trick_cards[0], s.declaration.kind);
  uint32_t same = hand & effective_suit_mask(led, s.declaration.kind, s.deck);
  return same ? same : hand;
}

inline std::vector<GameType> legal_declarations(const DeckSpec& deck, bool hand_game) {
  std::vector<GameType> out;
  for (GameKind k : {GameKind::kDiamonds, GameKind::kHearts, GameKind::kSpades, GameKind::kClubs,
                     GameKind::kGrand}) {
    if (is_suit_game(k) && !deck.has_suit(trump_suit(k))) continue;
    GameType gt;
    gt.kind = k;
    gt.hand = hand_game;
    out.push_back(gt);
    if (hand_game) {
      gt.schneider_announced = true;
      out.push_back(gt);
      gt.schwarz_announced = true;
      out.push_back(gt);
      gt.ouvert = true;
      out.push_back(gt);
    }
  }
  GameType nl;
  nl.kind = GameKind::kNull;
  nl.hand = hand_game;
  out.push_back(nl);
  nl.ouvert = true;
  out.push_back(nl);
  return out;
}

inline std::vector<GameType> legal_declarations(const GameState& s) {
  return legal_declarations(s.deck, !s.picked_up);
}

inline std::vector<Action> legal_actions(const GameState& s) {
  SKAT_RULE(s.phase != Phase::kTerminal, "game over");
  std::vector<Action> out;
  switch (s.phase) {
    case Phase::kBidding: {
      if (s.bid_stage == BidStage::kForehandClaim) {
        const std::vector<int>& ladder = bid_ladder(s.deck);
        out.push_back(Action::make_bid(ladder.front()));
        out.push_back(Action::make_pass());
      } else if (s.pending_bid > 0) {
        out.push_back(Action::make_accept());
        out.push_back(Action::make_pass());
      } else {
        const std::vector<int>& ladder = bid_ladder(s.deck);
        int next = detail::next_ladder_value(ladder, s.standing_bid);
        if (next > 0) out.push_back(Action::make_bid(next));
        out.push_back(Action::make_pass());
      }
      break;
    }
    case Phase::kPickupOrHand:
      out.push_back(Action::make_pickup());
      out.push_back(Action::make_hand());
      break;
    case Phase::kDiscard: {
      std::vector<Card> cards = Hand(s.hands[s.soloist]).cards();
      for (size_t i = 0; i < cards.size(); ++i)
        for (size_t j = i + 1; j < cards.size(); ++j)
          out.push_back(Action::make_discard(cards[i].mask() | cards[j].mask()));
      break;
    }
    case Phase::kDeclare:
      for (const GameType& gt : legal_declarations(s)) out.push_back(Action::make_declare(gt));
      break;
    case Phase::kCardplay: {
      Hand(follow_filter(s.hands[s.to_move], s)).for_each([&](Card c) {
        out.push_back(Action::make_play(c));
      });
      break;
    }
    default:
      SKAT_CHECK(false, "legal_actions in phase ", static_cast<int>(s.phase));
  }
  return out;
}

inline int trick_winner(const std::array<Card, kNumPlayers>& cards, int leader, GameKind kind) {
  int led = effective_suit(cards[0], kind);
  int best = 0;
  for (int i = 1; i < kNumPlayers; ++i) {
    int es = effective_suit(cards[i], kind);
    int bs = effective_suit(cards[best], kind);
    if (es == bs) {
      if (card_power(cards[i], kind) > card_power(cards[best], kind)) best = i;
    } else if (es == 4) {
      best = i;
    }
    // A non-trump card of a different suit than the led suit never wins.
    (void)led;
  }
  return (leader + best) % kNumPlayers;
}

namespace detail {

inline void start_bid_stage(GameState& s, BidStage stage, int bidder, int answerer) {
  s.bid_stage = stage;
  s.bidder = static_cast<int8_t>(bidder);
  s.answerer = static_cast<int8_t>(answerer);
  s.pending_bid = 0;
  s.to_move = s.bidder;
}

inline void finish_auction(GameState& s, int winner) {
  if (winner < 0) {
    s.passed_in = true;
    s.phase = Phase::kTerminal;
    s.to_move = -1;
    s.bid_stage = BidStage::kDone;
    return;
  }
  s.soloist = static_cast<int8_t>(winner);
  s.winning_bid = s.standing_bid;
  s.bid_stage = BidStage::kDone;
  s.phase = Phase::kPickupOrHand;
  s.to_move = s.soloist;
}

// Stage transition after one participant dropped out of the current duel.
inline void bid_stage_done(GameState& s, int survivor) {
  if (s.bid_stage == BidStage::kBidAnswer) {
    start_bid_stage(s, BidStage::kContinueAnswer, 2, survivor);
  } else if (s.standing_bid > 0) {
    finish_auction(s, survivor);
  } else {
    // Nobody ever bid: forehand may claim the minimum or throw in.
    s.bid_stage = BidStage::kForehandClaim;
    s.to_move = 0;
  }
}

inline void apply_bid_action(GameState& s, const Action& a) {
  if (s.bid_stage == BidStage::kForehandClaim) {
    SKAT_RULE(s.to_move == 0, "claim decision belongs to forehand");
    if (a.kind == ActionKind::kBid) {
      const std::vector<int>& ladder = bid_ladder(s.deck);
      SKAT_RULE(a.bid == ladder.front(), "forehand claim must be the minimum bid");
      push_bid_event(s, 0, ActionKind::kBid, a.bid);
      s.standing_bid = a.bid;
      finish_auction(s, 0);
    } else if (a.kind == ActionKind::kPass) {
      push_bid_event(s, 0, ActionKind::kPass, 0);
      finish_auction(s, -1);
    } else {
      SKAT_RULE(false, "forehand may only claim or pass");
    }
    return;
  }
  if (s.pending_bid > 0) {
    // Answerer decides on the announced value.
    SKAT_RULE(s.to_move == s.answerer, "answer out of turn");
    if (a.kind == ActionKind::kAccept) {
      push_bid_event(s, s.answerer, ActionKind::kAccept, s.pending_bid);
      s.standing_bid = s.pending_bid;
      s.pending_bid = 0;
      s.to_move = s.bidder;
    } else if (a.kind == ActionKind::kPass) {
      push_bid_event(s, s.answerer, ActionKind::kPass, 0);
      s.standing_bid = s.pending_bid;  // the announced value stands for the winner
      s.pending_bid = 0;
      bid_stage_done(s, s.bidder);
    } else {
      SKAT_RULE(false, "expected accept or pass on a pending bid");
    }
    return;
  }
  SKAT_RULE(s.to_move == s.bidder, "bid out of turn");
  if (a.kind == ActionKind::kBid) {
    const std::vector<int>& ladder = bid_ladder(s.deck);
    int next = next_ladder_value(ladder, s.standing_bid);
    SKAT_RULE(next > 0, "bid ladder exhausted");
    SKAT_RULE(a.bid == next, "bid must be the next ladder value (", next, ")");
    push_bid_event(s, s.bidder, ActionKind::kBid, a.bid);
    s.pending_bid = a.bid;
    s.to_move = s.answerer;
  } else if (a.kind == ActionKind::kPass) {
    push_bid_event(s, s.bidder, ActionKind::kPass, 0);
    bid_stage_done(s, s.answerer);
  } else {
    SKAT_RULE(false, "expected bid or pass");
  }
}

inline void resolve_trick(GameState& s) {
  int winner = trick_winner(s.trick_cards, s.trick_leader, s.declaration.kind);
  int trick_points = 0;
  for (int i = 0; i < kNumPlayers; ++i) trick_points += card_points(s.trick_cards[i]);
  s.points[s.soloist_party(winner) ? 0 : 1] += static_cast<int16_t>(trick_points);
  if (s.soloist_party(winner)) ++s.soloist_tricks;
  ++s.tricks_played;
  s.trick_len = 0;
  s.trick_leader = static_cast<int8_t>(winner);
  s.to_move = static_cast<int8_t>(winner);

  bool null_lost = s.declaration.kind == GameKind::kNull && s.soloist_tricks > 0;
  if (null_lost || s.tricks_played == s.deck.hand_size) {
    s.phase = Phase::kTerminal;
    s.to_move = -1;
    if (s.declaration.kind != GameKind::kNull) {
      // Buried or untouched skat cards count for the soloist.
      s.points[0] += static_cast<int16_t>(points_in(s.skat));
    }
  }
}

}  // namespace detail

inline GameState apply_action(const GameState& state, const Action& a) {
  SKAT_RULE(state.phase != Phase::kTerminal, "game over");
  GameState s = state;
  switch (s.phase) {
    case Phase::kBidding:
      detail::apply_bid_action(s, a);
      break;
    case Phase::kPickupOrHand: {
      if (a.kind == ActionKind::kPickupSkat) {
        s.picked_up = true;
        s.hands[s.soloist] |= s.skat;
        s.skat = 0;
        s.phase = Phase::kDiscard;
      } else if (a.kind == ActionKind::kDeclareHand) {
        s.picked_up = false;
        s.phase = Phase::kDeclare;
      } else {
        SKAT_RULE(false, "expected pickup or hand declaration");
      }
      break;
    }
    case Phase::kDiscard: {
      uint32_t mask = a.discard_mask;
      SKAT_RULE(a.kind == ActionKind::kDiscard || a.kind == ActionKind::kDiscardDeclare,
                "expected a discard");
      SKAT_RULE(std::popcount(mask) == kSkatSize, "discard must name exactly 2 cards");
      SKAT_RULE((s.hands[s.soloist] & mask) == mask, "discard of cards not held");
      s.hands[s.soloist] &= ~mask;
      s.skat = mask;
      s.phase = Phase::kDeclare;
      if (a.kind == ActionKind::kDiscardDeclare) {
        return apply_action(s, Action::make_declare(a.declaration));
      }
      break;
    }
    case Phase::kDeclare: {
      GameType gt;
      if (a.kind == ActionKind::kDeclare) {
        gt = a.declaration;
      } else if (a.kind == ActionKind::kDiscardDeclare) {
        SKAT_RULE(a.discard_mask == 0, "discard already made");
        gt = a.declaration;
      } else {
        SKAT_RULE(false, "expected a declaration");
      }
      SKAT_RULE(gt.hand == !s.picked_up, "hand flag must match the pickup decision");
      if (gt.kind == GameKind::kNull) {
        SKAT_RULE(!gt.schneider_announced && !gt.schwarz_announced,
                  "null games have no schneider/schwarz announcements");
      } else {
        SKAT_RULE(!is_suit_game(gt.kind) || s.deck.has_suit(trump_suit(gt.kind)),
                  "trump suit not in deck");
        SKAT_RULE(!gt.schneider_announced || gt.hand, "announcements require a hand game");
        SKAT_RULE(!gt.schwarz_announced || gt.schneider_announced,
                  "schwarz announcement requires schneider announcement");
        SKAT_RULE(!gt.ouvert || gt.schwarz_announced, "ouvert suit/grand requires schwarz");
      }
      s.declaration = gt;
      s.has_declaration = true;
      s.phase = Phase::kCardplay;
      s.trick_leader = 0;  // forehand leads the first trick
      s.trick_len = 0;
      s.to_move = 0;
      break;
    }
    case Phase::kCardplay: {
      SKAT_RULE(a.kind == ActionKind::kPlayCard, "expected a card play");
      Card c = a.card;
      SKAT_RULE(c.valid() && (s.hands[s.to_move] & c.mask()), "card not held: ",
                card_to_string(c));
      uint32_t allowed = follow_filter(s.hands[s.to_move], s);
      SKAT_RULE(allowed & c.mask(), "must follow the led suit");
      s.hands[s.to_move] &= ~c.mask();
      s.trick_cards[s.trick_len++] = c;
      s.play_seq[s.play_len++] = PlayEvent{s.to_move, c};
      if (s.trick_len == kNumPlayers) {
        detail::resolve_trick(s);
      } else {
        s.to_move = static_cast<int8_t>(next_seat(s.to_move));
      }
      break;
    }
    default:
      SKAT_RULE(false, "no actions in this phase");
  }
  return s;
}

// Final scoring. Suit/grand value is base times multiplier; an outcome that
// fails to cover the winning bid is an overbid loss at the bid, rounded up to
// a multiple of the base value.
inline GameScore score_game(const GameState& s) {
  SKAT_RULE(s.phase == Phase::kTerminal, "game not finished");
  GameScore r;
  if (s.passed_in) return r;
  const GameType& gt = s.declaration;
  if (gt.kind == GameKind::kNull) {
    r.game_value = null_game_value(gt);
    r.won = s.soloist_tricks == 0;
    if (r.game_value < s.winning_bid) {
      r.won = false;
      r.game_value = s.winning_bid;
    }
  } else {
    uint32_t soloist_cards = s.dealt_hands[s.soloist] | s.dealt_skat;
    int matadors = matador_count(soloist_cards, gt.kind, s.deck);
    int total = s.deck.total_card_points();
    int sol_points = s.points[0];
    bool schneider = sol_points >= s.deck.schneider_threshold() ||
                     sol_points <= total - s.deck.schneider_threshold();
    bool schwarz = s.soloist_tricks == s.deck.hand_size || s.soloist_tricks == 0;
    // An early null-style exit cannot happen here; all tricks were played.
    r.game_value = base_value(gt.kind) * game_multiplier(gt, matadors, schneider, schwarz);
    r.won = sol_points >= s.deck.win_threshold();
    if (gt.schneider_announced && sol_points < s.deck.schneider_threshold()) r.won = false;
    if (gt.schwarz_announced && s.soloist_tricks != s.deck.hand_size) r.won = false;
    if (r.game_value < s.winning_bid) {
      r.won = false;
      int base = base_value(gt.kind);
      r.game_value = base * ((s.winning_bid + base - 1) / base);
    }
  }
  r.soloist_score = r.won ? r.game_value : -2 * r.game_value;
  return r;
}

inline int soloist_card_points(const GameState& s) { return s.points[0]; }

// Rebuilds the position before the `upto_plays`-th card of a game whose
// state (terminal or not) embeds the full history. Instrumentation walks a
// finished game back through its own decision points with this.
inline GameState reconstruct_at_play(const GameState& ref, int upto_plays) {
  SKAT_RULE(ref.has_declaration, "cannot reconstruct an undeclared game");
  SKAT_RULE(upto_plays <= ref.play_len, "not that many plays");
  GameState s = deal_explicit(ref.dealt_hands, ref.dealt_skat, ref.deck);
  for (int i = 0; i < ref.bid_len; ++i) {
    Action a;
    a.kind = ref.bid_seq[i].kind;
    a.bid = ref.bid_seq[i].value;
    s = apply_action(s, a);
  }
  if (ref.picked_up) {
    s = apply_action(s, Action::make_pickup());
    s = apply_action(s, Action::make_discard(ref.picked_up ? ref.skat : 0));
  } else {
    s = apply_action(s, Action::make_hand());
  }
  s = apply_action(s, Action::make_declare(ref.declaration));
  for (int i = 0; i < upto_plays; ++i) {
    s = apply_action(s, Action::make_play(ref.play_seq[i].card));
  }
  return s;
}

// Structural invariants; used by tests and the replay validator.
inline void validate_state(const GameState& s) {
  uint32_t all = 0;
  uint32_t parts[kNumPlayers + 2];
  for (int p = 0; p < kNumPlayers; ++p) parts[p] = s.hands[p];
  parts[kNumPlayers] = s.skat;
  parts[kNumPlayers + 1] = s.played_mask();
  for (uint32_t m : parts) {
    SKAT_CHECK((all & m) == 0, "card in two places");
    all |= m;
  }
  SKAT_CHECK(all == s.deck.card_mask, "cards lost or invented");

  if (s.phase == Phase::kCardplay || s.phase == Phase::kTerminal) {
    if (s.has_declaration) {
      int total = s.deck.total_card_points();
      int in_hands = 0;
      for (int p = 0; p < kNumPlayers; ++p) in_hands += points_in(s.hands[p]);
      int in_trick = 0;
      for (int i = 0; i < s.trick_len; ++i) in_trick += card_points(s.trick_cards[i]);
      int skat_credited = (s.phase == Phase::kTerminal && s.declaration.kind != GameKind::kNull)
                              ? 0
                              : points_in(s.skat);
      SKAT_CHECK(s.points[0] + s.points[1] + in_hands + in_trick + skat_credited == total,
                 "card points not conserved");
      SKAT_CHECK(s.points[0] + s.points[1] <= total);
    }
  }
  if (s.phase == Phase::kCardplay) {
    for (int p = 0; p < kNumPlayers; ++p) {
      int played_in_trick = 0;
      for (int i = 0; i < s.trick_len; ++i)
        if ((s.trick_leader + i) % kNumPlayers == p) played_in_trick = 1;
      int expected = s.deck.hand_size - s.tricks_played - played_in_trick;
      SKAT_CHECK(std::popcount(s.hands[p]) == expected, "hand size off for seat ", p);
    }
  }
  // Follow-suit legality, re-derived from the full play history.
  if (s.has_declaration && s.play_len > 0) {
    std::array<uint32_t, kNumPlayers> held = s.dealt_hands;
    if (s.picked_up) {
      held[s.soloist] |= s.dealt_skat;
      held[s.soloist] &= ~s.skat;
    }
    int idx = 0;
    while (idx < s.play_len) {
      Card led = s.play_seq[idx].card;
      int led_suit = effective_suit(led, s.declaration.kind);
      uint32_t led_mask = effective_suit_mask(led_suit, s.declaration.kind, s.deck);
      for (int i = 0; i < kNumPlayers && idx < s.play_len; ++i, ++idx) {
        const PlayEvent& ev = s.play_seq[idx];
        SKAT_CHECK(held[ev.seat] & ev.card.mask(), "played a card not held");
        if (i > 0 && (held[ev.seat] & led_mask) != 0) {
          SKAT_CHECK(effective_suit(ev.card, s.declaration.kind) == led_suit,
                     "failed to follow suit");
        }
        held[ev.seat] &= ~ev.card.mask();
      }
    }
  }
}

}  // namespace skat
