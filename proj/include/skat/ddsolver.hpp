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

#include "skat/game_type.hpp"

namespace skat {

// Fully revealed cardplay position handed to the solver. `captured_points`
// and `skat_points` are the soloist's bank so far; the solver adds the exact
// minimax capture from the remaining cards.
struct OpenState {
  DeckSpec deck;
  std::array<uint32_t, kNumPlayers> hands{};
  GameKind kind = GameKind::kGrand;
  int8_t soloist = 0;
  int8_t leader = 0;
  uint8_t trick_len = 0;
  std::array<Card, kNumPlayers> trick_cards{};
  int16_t captured_points = 0;  // soloist party, cardplay so far
  int16_t skat_points = 0;      // credited to the soloist in suit/grand
  bool soloist_took_trick = false;

  int to_move() const { return (leader + trick_len) % kNumPlayers; }
};

struct SearchStats {
  uint64_t nodes = 0;
  uint64_t tt_hits = 0;
};

// Exact double-dummy evaluation: soloist card points for suit/grand games
// (defenders play as one minimizing coalition), win/loss for null. Alpha-beta
// over tricks with a bounds-typed transposition table keyed at trick starts;
// full keys are verified so collisions cannot corrupt values.
class DDSolver {
 public:
  explicit DDSolver(bool use_tt = true) : use_tt_(use_tt) {}

  // Suit/grand: final soloist card points (captured + skat + future).
  // Null: 1 if the soloist loses every remaining trick, else 0.
  int solve(const OpenState& s) {
    setup(s);
    if (kind_ == GameKind::kNull) {
      if (s.soloist_took_trick) return 0;
      return null_search(s.hands, s.leader, s.trick_len, s.trick_cards);
    }
    int future = points_search(s.hands, s.leader, s.trick_len, s.trick_cards, 0,
                               remaining_points(s));
    return s.captured_points + s.skat_points + future;
  }

  // Exact value of every legal card of the player to move.
  std::vector<std::pair<Card, int>> action_values(const OpenState& s) {
    setup(s);
    std::vector<std::pair<Card, int>> out;
    uint32_t allowed = follow_mask(s.hands[s.to_move()], s.trick_len ? s.trick_cards[0] : kNoCard,
                                   s.trick_len > 0);
    Hand(allowed).for_each([&](Card c) {
      OpenState child = s;
      play_card(child, c);
      out.emplace_back(c, solve_continue(child, s));
    });
    return out;
  }

  const SearchStats& stats() const { return stats_; }

 private:
  int solve_continue(const OpenState& child, const OpenState& parent) {
    if (kind_ == GameKind::kNull) {
      if (child.soloist_took_trick) return 0;
      if (hands_empty(child.hands)) return 1;
      return null_search(child.hands, child.leader, child.trick_len, child.trick_cards);
    }
    int future = hands_empty(child.hands)
                     ? 0
                     : points_search(child.hands, child.leader, child.trick_len,
                                     child.trick_cards, 0, remaining_points(child));
    // captured_points moved when the played card closed a trick.
    return child.captured_points + parent.skat_points + future;
  }

  void setup(const OpenState& s) {
    kind_ = s.kind;
    soloist_ = s.soloist;
    for (int e = 0; e < 5; ++e) esuit_mask_[e] = effective_suit_mask(e, kind_, s.deck);
    for (int i = 0; i < kDeckCards; ++i) {
      Card c(i);
      esuit_[i] = static_cast<uint8_t>(effective_suit(c, kind_));
      power_[i] = static_cast<uint8_t>(card_power(c, kind_));
      pts_[i] = static_cast<uint8_t>(card_points(c));
    }
    // Generation stamping keeps repeated solves from re-clearing the table;
    // the table itself is sized to the position, so the per-world solver
    // instances the player spins up stay cheap on small decks and endgames.
    int cards_left = std::popcount(s.hands[0] | s.hands[1] | s.hands[2]);
    size_t want = cards_left <= 16 ? (1u << 12) : cards_left <= 24 ? (1u << 15) : (1u << 18);
    if (tt_.size() != want) {
      tt_.assign(want, TTEntry{});
      generation_ = 1;
    } else {
      ++generation_;
    }
  }

  static bool hands_empty(const std::array<uint32_t, kNumPlayers>& hands) {
    return (hands[0] | hands[1] | hands[2]) == 0;
  }

  int remaining_points(const OpenState& s) const {
    int p = points_in(s.hands[0] | s.hands[1] | s.hands[2]);
    for (int i = 0; i < s.trick_len; ++i) p += card_points(s.trick_cards[i]);
    return p;
  }

  uint32_t follow_mask(uint32_t hand, Card led, bool following) const {
    if (!following) return hand;
    uint32_t same = hand & esuit_mask_[esuit_[led.index]];
    return same ? same : hand;
  }

  // Applies one card to a copy-style open state (used by action_values).
  void play_card(OpenState& s, Card c) const {
    int seat = s.to_move();
    s.hands[seat] &= ~c.mask();
    s.trick_cards[s.trick_len++] = c;
    if (s.trick_len == kNumPlayers) {
      int off = winner_offset(s.trick_cards);
      int winner = (s.leader + off) % kNumPlayers;
      int pts = 0;
      for (int i = 0; i < kNumPlayers; ++i) pts += pts_[s.trick_cards[i].index];
      if (winner == soloist_) {
        s.captured_points = static_cast<int16_t>(s.captured_points + pts);
        s.soloist_took_trick = true;
      }
      s.leader = static_cast<int8_t>(winner);
      s.trick_len = 0;
    }
  }

  int winner_offset(const std::array<Card, kNumPlayers>& t) const {
    int best = 0;
    for (int i = 1; i < kNumPlayers; ++i) {
      int es = esuit_[t[i].index];
      int bs = esuit_[t[best].index];
      if (es == bs) {
        if (power_[t[i].index] > power_[t[best].index]) best = i;
      } else if (es == 4) {
        best = i;
      }
    }
    return best;
  }

  struct TTEntry {
    uint64_t key_a = 0;
    uint64_t key_b = 0;
    int16_t lower = 0;
    int16_t upper = 0;
    uint32_t generation = 0;  // matches generation_ when live
    uint8_t best = 0xff;      // card index of the best move, if known
  };

  size_t tt_index(uint64_t a, uint64_t b) const {
    uint64_t h = mix_seed(a ^ (b * 0x9e3779b97f4a7c15ULL));
    return h & (tt_.size() - 1);
  }

  // Soloist future capture from a position, alpha-beta in [alpha, beta].
  int points_search(std::array<uint32_t, kNumPlayers> hands, int leader, int trick_len,
                    std::array<Card, kNumPlayers> trick, int alpha, int beta) {
    ++stats_.nodes;
    int remaining = points_in(hands[0] | hands[1] | hands[2]);
    int trick_pts = 0;
    for (int i = 0; i < trick_len; ++i) trick_pts += pts_[trick[i].index];
    remaining += trick_pts;
    if (remaining == 0 && trick_len == 0) {
      // Nothing left worth points; play it out without search.
      return 0;
    }
    if (alpha >= remaining) return remaining;  // cannot exceed what is left
    if (beta <= 0) return 0;

    TTEntry* entry = nullptr;
    uint64_t ka = 0, kb = 0;
    if (use_tt_ && trick_len == 0) {
      ka = static_cast<uint64_t>(hands[0]) | (static_cast<uint64_t>(hands[1]) << 32);
      kb = static_cast<uint64_t>(hands[2]) | (static_cast<uint64_t>(leader) << 32);
      entry = &tt_[tt_index(ka, kb)];
      if (entry->generation == generation_ && entry->key_a == ka && entry->key_b == kb) {
        ++stats_.tt_hits;
        if (entry->lower >= beta) return entry->lower;
        if (entry->upper <= alpha) return entry->upper;
        if (entry->lower == entry->upper) return entry->lower;
        alpha = std::max(alpha, static_cast<int>(entry->lower));
        beta = std::min(beta, static_cast<int>(entry->upper));
      }
    }

    int seat = (leader + trick_len) % kNumPlayers;
    bool maximizing = seat == soloist_;
    uint32_t allowed = follow_mask(hands[seat], trick_len ? trick[0] : kNoCard, trick_len > 0);
    uint32_t unplaced = hands[0] | hands[1] | hands[2];
    for (int i = 0; i < trick_len; ++i) unplaced |= trick[i].mask();
    Card tt_move = kNoCard;
    if (entry && entry->generation == generation_ && entry->key_a == ka &&
        entry->key_b == kb && entry->best != 0xff) {
      tt_move = Card(entry->best);
    }
    std::array<Card, 12> moves;
    int n_moves = order_moves(allowed, unplaced, tt_move, moves);

    int best = maximizing ? 0 : remaining;
    Card best_move = kNoCard;
    int a = alpha, b = beta;
    for (int m = 0; m < n_moves; ++m) {
      Card c = moves[m];
      std::array<uint32_t, kNumPlayers> next_hands = hands;
      next_hands[seat] &= ~c.mask();
      int value;
      if (trick_len + 1 == kNumPlayers) {
        std::array<Card, kNumPlayers> full = trick;
        full[trick_len] = c;
        int off = winner_offset(full);
        int winner = (leader + off) % kNumPlayers;
        int pts = trick_pts + pts_[c.index];
        int cont = hands_empty(next_hands)
                       ? 0
                       : points_search(next_hands, winner, 0, {},
                                       winner == soloist_ ? a - pts : a,
                                       winner == soloist_ ? b - pts : b);
        value = (winner == soloist_ ? pts : 0) + cont;
      } else {
        std::array<Card, kNumPlayers> next_trick = trick;
        next_trick[trick_len] = c;
        value = points_search(next_hands, leader, trick_len + 1, next_trick, a, b);
      }
      if (maximizing) {
        if (value > best || best_move == kNoCard) best_move = c;
        best = std::max(best, value);
        a = std::max(a, best);
      } else {
        if (value < best || best_move == kNoCard) best_move = c;
        best = std::min(best, value);
        b = std::min(b, best);
      }
      if (a >= b) break;
    }

    if (entry) {
      if (!(entry->generation == generation_ && entry->key_a == ka && entry->key_b == kb)) {
        entry->key_a = ka;
        entry->key_b = kb;
        entry->lower = 0;
        entry->upper = static_cast<int16_t>(remaining);
        entry->generation = generation_;
        entry->best = 0xff;
      }
      if (best_move.valid()) entry->best = best_move.index;
      if (best <= alpha) {
        entry->upper = std::min(entry->upper, static_cast<int16_t>(best));
      } else if (best >= beta) {
        entry->lower = std::max(entry->lower, static_cast<int16_t>(best));
      } else {
        entry->lower = entry->upper = static_cast<int16_t>(best);
      }
    }
    return best;
  }

  // Null: 1 if the soloist avoids every remaining trick.
  int null_search(std::array<uint32_t, kNumPlayers> hands, int leader, int trick_len,
                  std::array<Card, kNumPlayers> trick) {
    ++stats_.nodes;
    if (hands_empty(hands)) return 1;

    TTEntry* entry = nullptr;
    uint64_t ka = 0, kb = 0;
    if (use_tt_ && trick_len == 0) {
      ka = static_cast<uint64_t>(hands[0]) | (static_cast<uint64_t>(hands[1]) << 32);
      kb = static_cast<uint64_t>(hands[2]) | (static_cast<uint64_t>(leader) << 32);
      entry = &tt_[tt_index(ka, kb)];
      if (entry->generation == generation_ && entry->key_a == ka && entry->key_b == kb) {
        ++stats_.tt_hits;
        return entry->lower;
      }
    }

    int seat = (leader + trick_len) % kNumPlayers;
    bool maximizing = seat == soloist_;
    uint32_t allowed = follow_mask(hands[seat], trick_len ? trick[0] : kNoCard, trick_len > 0);
    int best = maximizing ? 0 : 1;
    Hand(allowed).for_each([&](Card c) {
      if (best == (maximizing ? 1 : 0)) return;  // decided
      int value;
      std::array<uint32_t, kNumPlayers> next_hands = hands;
      next_hands[seat] &= ~c.mask();
      if (trick_len + 1 == kNumPlayers) {
        std::array<Card, kNumPlayers> full = trick;
        full[trick_len] = c;
        int winner = (leader + winner_offset(full)) % kNumPlayers;
        if (winner == soloist_) {
          value = 0;
        } else if (hands_empty(next_hands)) {
          value = 1;
        } else {
          value = null_search(next_hands, winner, 0, {});
        }
      } else {
        std::array<Card, kNumPlayers> next_trick = trick;
        next_trick[trick_len] = c;
        value = null_search(next_hands, leader, trick_len + 1, next_trick);
      }
      if (maximizing) {
        best = std::max(best, value);
      } else {
        best = std::min(best, value);
      }
    });

    if (entry) {
      entry->key_a = ka;
      entry->key_b = kb;
      entry->lower = entry->upper = static_cast<int16_t>(best);
      entry->generation = generation_;
    }
    return best;
  }

  // Collapses touching cards: moves of the same effective suit with equal
  // points and no live card of that suit strictly between them are
  // value-identical, so only the lowest-power representative is searched.
  // Ordering: transposition move first, then trumps, then by descending card
  // points, descending power within.
  int order_moves(uint32_t allowed, uint32_t unplaced, Card tt_move,
                  std::array<Card, 12>& out) const {
    int n = 0;
    for (int es = 0; es < 5; ++es) {
      uint32_t group = allowed & esuit_mask_[es];
      if (!group) continue;
      std::array<Card, 12> suit_cards;
      int sn = 0;
      Hand(unplaced & esuit_mask_[es]).for_each([&](Card c) { suit_cards[sn++] = c; });
      std::sort(suit_cards.begin(), suit_cards.begin() + sn,
                [&](Card x, Card y) { return power_[x.index] < power_[y.index]; });
      for (int i = 0; i < sn; ++i) {
        if (!(group & suit_cards[i].mask())) continue;
        // Skip members whose immediate lower neighbour is an equal-point
        // card of ours: the run's head already represents them.
        if (i > 0 && (group & suit_cards[i - 1].mask()) &&
            pts_[suit_cards[i - 1].index] == pts_[suit_cards[i].index]) {
          continue;
        }
        out[n++] = suit_cards[i];
      }
    }
    std::sort(out.begin(), out.begin() + n, [&](Card x, Card y) {
      bool fx = x == tt_move, fy = y == tt_move;
      if (fx != fy) return fx;
      bool tx = esuit_[x.index] == 4, ty = esuit_[y.index] == 4;
      if (tx != ty) return tx;
      if (pts_[x.index] != pts_[y.index]) return pts_[x.index] > pts_[y.index];
      if (power_[x.index] != power_[y.index]) return power_[x.index] > power_[y.index];
      return x.index < y.index;
    });
    return n;
  }

  bool use_tt_;
  uint32_t generation_ = 0;
  GameKind kind_ = GameKind::kGrand;
  int soloist_ = 0;
  std::array<uint32_t, 5> esuit_mask_{};
  std::array<uint8_t, kDeckCards> esuit_{};
  std::array<uint8_t, kDeckCards> power_{};
  std::array<uint8_t, kDeckCards> pts_{};
  std::vector<TTEntry> tt_ = std::vector<TTEntry>(1);
  SearchStats stats_;
};

}  // namespace skat
