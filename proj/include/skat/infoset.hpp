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
#include <vector>

#include "skat/game.hpp"
#include "skat/policy.hpp"

namespace skat {

// One opponent decision as seen by a viewer. Max-bid decisions carry the
// interval of intents consistent with the observed auction behaviour; a
// discard-and-declare carries only the public declaration (the discard is
// resolved per hypothesized world).
struct ObservedDecision {
  DecisionKind kind = DecisionKind::kPlayCard;
  int8_t seat = -1;
  int16_t lo = -1;           // max-bid: extended ladder interval, inclusive
  int16_t hi = -1;
  int16_t floor_value = 0;   // max-bid: lowest raise available at that point
  bool picked_up = false;    // pickup decision outcome
  GameType declaration{};    // discard+declare outcome (public part)
  Card card{};               // card play outcome
  uint8_t play_index = 0;
};

namespace detail {

struct AuctionParser {
  const std::vector<int>& ladder;
  const BidEvent* events;
  int count;
  int pos = 0;
  std::vector<ObservedDecision>* out;

  int next_value(int above) const {
    for (int v : ladder)
      if (v > above) return v;
    return 0;
  }

  void emit(DecisionKind kind, int seat, int lo, int hi, int floor) {
    ObservedDecision d;
    d.kind = kind;
    d.seat = static_cast<int8_t>(seat);
    d.lo = static_cast<int16_t>(lo);
    d.hi = static_cast<int16_t>(hi);
    d.floor_value = static_cast<int16_t>(floor);
    out->push_back(d);
  }

  // Parses one bidder/answerer duel. Returns the surviving seat and updates
  // `standing`. Observation intervals follow from the strict ladder protocol:
  // a pass after affirming v pins the intent to exactly v, a pass before any
  // affirmation censors it below the first offer, and surviving leaves it
  // open above the last affirmed value.
  int parse_stage(DecisionKind bidder_kind, DecisionKind answerer_kind, int bidder, int answerer,
                  int& standing) {
    const int top = static_cast<int>(ladder.size()) - 1;
    int stage_floor = next_value(standing);
    bool announced_any = false;
    int last_announced_idx = -1;
    bool accepted_any = false;
    int last_accepted_idx = -1;
    while (pos < count) {
      const BidEvent& e = events[pos];
      if (e.seat == bidder && e.kind == ActionKind::kBid) {
        int v_idx = ladder_index(ladder, e.value);
        SKAT_CHECK(v_idx >= 0, "bid value off the ladder in transcript");
        ++pos;
        SKAT_CHECK(pos < count, "dangling bid in transcript");
        const BidEvent& r = events[pos];
        SKAT_CHECK(r.seat == answerer, "answer out of turn in transcript");
        if (r.kind == ActionKind::kAccept) {
          ++pos;
          announced_any = true;
          last_announced_idx = v_idx;
          accepted_any = true;
          last_accepted_idx = v_idx;
          standing = e.value;
          continue;
        }
        SKAT_CHECK(r.kind == ActionKind::kPass);
        ++pos;
        // Answerer passed at offer v: intent below v, at least the last
        // accepted value.
        emit(answerer_kind, answerer, accepted_any ? v_idx - 1 : -1, v_idx - 1, stage_floor);
        // Bidder survives having affirmed v.
        emit(bidder_kind, bidder, v_idx, top, stage_floor);
        standing = e.value;
        return bidder;
      }
      if (e.seat == bidder && e.kind == ActionKind::kPass) {
        ++pos;
        int raise = next_value(standing);
        if (raise != 0) {
          // Unforced pass. With prior announcements the intent is pinned;
          // otherwise it is anywhere below the first available raise.
          int raise_idx = ladder_index(ladder, raise);
          if (announced_any) {
            emit(bidder_kind, bidder, last_announced_idx, last_announced_idx, stage_floor);
          } else {
            emit(bidder_kind, bidder, -1, raise_idx - 1, stage_floor);
          }
        }
        if (accepted_any) {
          emit(answerer_kind, answerer, last_accepted_idx, top, stage_floor);
        }
        return answerer;
      }
      SKAT_CHECK(false, "unexpected auction event");
    }
    SKAT_CHECK(false, "auction transcript ended mid-stage");
    return -1;
  }

  void parse() {
    int standing = 0;
    int survivor = parse_stage(DecisionKind::kMaxBidBidder, DecisionKind::kMaxBidAnswerer,
                               /*bidder=*/1, /*answerer=*/0, standing);
    survivor = parse_stage(DecisionKind::kMaxBidContinue, DecisionKind::kMaxBidContinueAnswer,
                           /*bidder=*/2, /*answerer=*/survivor, standing);
    if (standing == 0 && pos < count) {
      // Forehand claim of a thrown-in auction.
      const BidEvent& e = events[pos];
      SKAT_CHECK(e.seat == 0);
      ++pos;
      if (e.kind == ActionKind::kBid) {
        emit(DecisionKind::kMaxBidAnswerer, 0, 0, static_cast<int>(ladder.size()) - 1,
             ladder.front());
      } else {
        emit(DecisionKind::kMaxBidAnswerer, 0, -1, -1, ladder.front());
      }
    }
  }
};

}  // namespace detail

// Max-bid observations of a complete auction transcript.
inline std::vector<ObservedDecision> parse_auction(const BidEvent* events, int count,
                                                   const DeckSpec& deck) {
  std::vector<ObservedDecision> out;
  detail::AuctionParser parser{bid_ladder(deck), events, count, 0, &out};
  parser.parse();
  return out;
}

// One player's view of a game at or after declaration: own cards plus the
// public transcript, with void flags and the unseen-card layout derived.
struct InfoSet {
  DeckSpec deck;
  int8_t viewer = -1;

  uint32_t own_current = 0;
  uint32_t own_dealt = 0;
  uint32_t known_skat = 0;      // nonzero iff the viewer knows the current skat
  uint32_t known_dealt_skat = 0;

  int8_t soloist = -1;
  int16_t winning_bid = 0;
  bool picked_up = false;
  GameType declaration{};
  uint8_t bid_len = 0;
  std::array<BidEvent, kMaxBidEvents> bid_seq{};
  uint8_t play_len = 0;
  std::array<PlayEvent, kDeckCards> play_seq{};
  int8_t trick_leader = 0;
  uint8_t trick_len = 0;
  std::array<Card, kNumPlayers> trick_cards{};
  uint8_t tricks_played = 0;
  uint8_t soloist_tricks = 0;
  std::array<int16_t, 2> points{};
  int8_t to_move = -1;
  uint32_t exposed_at_declare = 0;  // ouvert: soloist's hand when declared

  // Derived.
  std::array<uint32_t, kNumPlayers> played_by{};
  uint32_t played_mask = 0;
  std::array<uint8_t, kNumPlayers> current_size{};
  std::array<uint32_t, kNumPlayers> void_mask{};  // cards a seat cannot hold
  uint32_t unseen_mask = 0;

  static InfoSet from_state(const GameState& s, int viewer) {
    SKAT_RULE(s.has_declaration, "information sets are built from declared games");
    InfoSet I;
    I.deck = s.deck;
    I.viewer = static_cast<int8_t>(viewer);
    I.own_current = s.hands[viewer];
    I.own_dealt = s.dealt_hands[viewer];
    I.soloist = s.soloist;
    I.winning_bid = s.winning_bid;
    I.picked_up = s.picked_up;
    I.declaration = s.declaration;
    I.bid_len = s.bid_len;
    I.bid_seq = s.bid_seq;
    I.play_len = s.play_len;
    I.play_seq = s.play_seq;
    I.trick_leader = s.trick_leader;
    I.trick_len = s.trick_len;
    I.trick_cards = s.trick_cards;
    I.tricks_played = s.tricks_played;
    I.soloist_tricks = s.soloist_tricks;
    I.points = s.points;
    I.to_move = s.to_move;
    if (viewer == s.soloist && s.picked_up) {
      I.known_skat = s.skat;
      I.known_dealt_skat = s.dealt_skat;
    }
    if (s.declaration.ouvert) {
      uint32_t played_by_soloist = 0;
      for (int i = 0; i < s.play_len; ++i)
        if (s.play_seq[i].seat == s.soloist) played_by_soloist |= s.play_seq[i].card.mask();
      I.exposed_at_declare = s.hands[s.soloist] | played_by_soloist;
    }
    I.finalize();
    return I;
  }

  void finalize() {
    played_mask = 0;
    for (int p = 0; p < kNumPlayers; ++p) {
      played_by[p] = 0;
      void_mask[p] = 0;
    }
    for (int i = 0; i < play_len; ++i) {
      played_by[play_seq[i].seat] |= play_seq[i].card.mask();
      played_mask |= play_seq[i].card.mask();
    }
    for (int p = 0; p < kNumPlayers; ++p)
      current_size[p] = static_cast<uint8_t>(deck.hand_size - std::popcount(played_by[p]));

    // Failing to follow suit proves a void in the led effective suit.
    int i = 0;
    while (i < play_len) {
      int led = effective_suit(play_seq[i].card, declaration.kind);
      uint32_t led_cards = effective_suit_mask(led, declaration.kind, deck);
      for (int j = 0; j < kNumPlayers && i < play_len; ++j, ++i) {
        const PlayEvent& ev = play_seq[i];
        if (j > 0 && effective_suit(ev.card, declaration.kind) != led) {
          void_mask[ev.seat] |= led_cards;
        }
      }
    }

    unseen_mask = deck.card_mask & ~own_current & ~played_mask & ~known_skat;
    if (exposed_at_declare && viewer != soloist) {
      unseen_mask &= ~(exposed_at_declare & ~played_mask);
    }
  }

  bool skat_known() const { return known_skat != 0; }
  bool soloist_hand_exposed() const {
    return exposed_at_declare != 0 && viewer != soloist;
  }
  uint32_t exposed_current() const { return exposed_at_declare & ~played_mask; }

  // Seats whose current hands must be filled from the unseen cards, ascending.
  std::vector<int> hidden_seats() const {
    std::vector<int> out;
    for (int p = 0; p < kNumPlayers; ++p) {
      if (p == viewer) continue;
      if (p == soloist && soloist_hand_exposed()) continue;
      out.push_back(p);
    }
    return out;
  }

  // States per configuration: the pre-discard skat is undetermined only for
  // viewers who watched the soloist pick up.
  uint64_t state_multiplicity() const {
    if (!picked_up || viewer == soloist) return 1;
    int n = deck.hand_size + kSkatSize;
    return static_cast<uint64_t>(n) * (n - 1) / 2;
  }

  // All opponent-decision observations in evaluation order. Viewer's own
  // decisions are included; reach evaluation skips them.
  std::vector<ObservedDecision> decision_points() const {
    std::vector<ObservedDecision> out = parse_auction(bid_seq.data(), bid_len, deck);
    ObservedDecision pick;
    pick.kind = DecisionKind::kPickupOrHand;
    pick.seat = soloist;
    pick.picked_up = picked_up;
    out.push_back(pick);
    ObservedDecision dd;
    dd.kind = DecisionKind::kDiscardAndDeclare;
    dd.seat = soloist;
    dd.declaration = declaration;
    out.push_back(dd);
    for (int i = 0; i < play_len; ++i) {
      ObservedDecision p;
      p.kind = DecisionKind::kPlayCard;
      p.seat = play_seq[i].seat;
      p.card = play_seq[i].card;
      p.play_index = static_cast<uint8_t>(i);
      out.push_back(p);
    }
    return out;
  }
};

}  // namespace skat
