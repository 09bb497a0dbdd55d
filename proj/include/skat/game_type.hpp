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
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "skat/deck.hpp"

namespace skat {

enum class GameKind : uint8_t {
  kDiamonds = 0,
  kHearts = 1,
  kSpades = 2,
  kClubs = 3,
  kGrand = 4,
  kNull = 5,
};

constexpr bool is_suit_game(GameKind k) { return static_cast<int>(k) < 4; }
constexpr Suit trump_suit(GameKind k) { return static_cast<Suit>(k); }

constexpr int base_value(GameKind k) {
  switch (k) {
    case GameKind::kDiamonds:
      return 9;
    case GameKind::kHearts:
      return 10;
    case GameKind::kSpades:
      return 11;
    case GameKind::kClubs:
      return 12;
    case GameKind::kGrand:
      return 24;
    case GameKind::kNull:
      return 23;
  }
  return 0;
}

struct GameType {
  GameKind kind = GameKind::kDiamonds;
  bool hand = false;
  bool ouvert = false;
  bool schneider_announced = false;
  bool schwarz_announced = false;

  friend constexpr bool operator==(const GameType& a, const GameType& b) {
    return a.kind == b.kind && a.hand == b.hand && a.ouvert == b.ouvert &&
           a.schneider_announced == b.schneider_announced &&
           a.schwarz_announced == b.schwarz_announced;
  }
};

// Fixed null values: null / null hand / null ouvert / null hand ouvert.
constexpr int null_game_value(const GameType& gt) {
  if (gt.hand && gt.ouvert) return 59;
  if (gt.ouvert) return 46;
  if (gt.hand) return 35;
  return 23;
}

inline std::string game_kind_name(GameKind k) {
  switch (k) {
    case GameKind::kDiamonds:
      return "diamonds";
    case GameKind::kHearts:
      return "hearts";
    case GameKind::kSpades:
      return "spades";
    case GameKind::kClubs:
      return "clubs";
    case GameKind::kGrand:
      return "grand";
    case GameKind::kNull:
      return "null";
  }
  return "?";
}

inline GameKind game_kind_from_name(const std::string& s) {
  for (int k = 0; k < 6; ++k)
    if (game_kind_name(static_cast<GameKind>(k)) == s) return static_cast<GameKind>(k);
  throw DataError("unknown game kind: " + s);
}

// Jacks count as trump in suit and grand games, not as their printed suit.
inline uint32_t jack_mask() {
  uint32_t m = 0;
  for (int s = 0; s < kNumSuits; ++s) m |= Card(static_cast<Suit>(s), Rank::kJack).mask();
  return m;
}

inline uint32_t suit_mask(Suit s) { return 0xffu << (static_cast<int>(s) * kNumRanks); }

// All trump cards of a game, restricted to `deck`.
inline uint32_t trump_mask(GameKind kind, const DeckSpec& deck) {
  uint32_t m = 0;
  if (kind == GameKind::kNull) return 0;
  m = jack_mask();
  if (is_suit_game(kind)) m |= suit_mask(trump_suit(kind));
  return m & deck.card_mask;
}

// The "suit" a card belongs to for following purposes: 0..3 printed suits,
// 4 = trump. In null games every card keeps its printed suit.
inline int effective_suit(Card c, GameKind kind) {
  if (kind != GameKind::kNull) {
    if (c.rank() == Rank::kJack) return 4;
    if (is_suit_game(kind) && c.suit() == trump_suit(kind)) return 4;
  }
  return static_cast<int>(c.suit());
}

inline uint32_t effective_suit_mask(int esuit, GameKind kind, const DeckSpec& deck) {
  uint32_t m;
  if (esuit == 4) {
    m = trump_mask(kind, deck);
  } else {
    m = suit_mask(static_cast<Suit>(esuit));
    if (kind != GameKind::kNull) m &= ~jack_mask();
    if (is_suit_game(kind) && esuit == static_cast<int>(trump_suit(kind))) m = 0;
  }
  return m & deck.card_mask;
}

// Strength of a card within its effective suit; higher wins. Comparable only
// between cards of the same effective suit.
inline int card_power(Card c, GameKind kind) {
  if (kind == GameKind::kNull) return static_cast<int>(c.rank());
  if (c.rank() == Rank::kJack) {
    // CJ > SJ > HJ > DJ, above all plain trumps.
    return 16 + static_cast<int>(c.suit());
  }
  switch (c.rank()) {
    case Rank::kAce:
      return 7;
    case Rank::kTen:
      return 6;
    case Rank::kKing:
      return 5;
    case Rank::kQueen:
      return 4;
    case Rank::kNine:
      return 2;
    case Rank::kEight:
      return 1;
    default:
      return 0;  // seven
  }
}

// Consecutive top trumps held ("with") or missing ("against"), counted from
// the clubs jack down. `cards` should include the skat for the soloist.
inline int matador_count(uint32_t cards, GameKind kind, const DeckSpec& deck) {
  if (kind == GameKind::kNull) return 0;
  std::vector<Card> tops;
  for (int s = kNumSuits - 1; s >= 0; --s) {
    Card j(static_cast<Suit>(s), Rank::kJack);
    if (deck.in_deck(j)) tops.push_back(j);
  }
  if (is_suit_game(kind)) {
    std::vector<Card> suit_cards;
    Hand(effective_suit_mask(4, kind, deck) & ~jack_mask()).for_each([&](Card c) {
      suit_cards.push_back(c);
    });
    std::sort(suit_cards.begin(), suit_cards.end(), [&](Card a, Card b) {
      return card_power(a, kind) > card_power(b, kind);
    });
    tops.insert(tops.end(), suit_cards.begin(), suit_cards.end());
  }
  if (tops.empty()) return 0;
  bool with = (cards & tops[0].mask()) != 0;
  int n = 0;
  for (Card t : tops) {
    bool held = (cards & t.mask()) != 0;
    if (held != with) break;
    ++n;
  }
  return n;
}

// Multiplier for suit/grand value: matadors + 1, plus one per modifier that
// applies (hand, schneider, schwarz, announcements, ouvert).
inline int game_multiplier(const GameType& gt, int matadors, bool schneider, bool schwarz) {
  int m = matadors + 1;
  if (gt.hand) ++m;
  if (schneider) ++m;
  if (gt.schneider_announced) ++m;
  if (schwarz) ++m;
  if (gt.schwarz_announced) ++m;
  if (gt.ouvert) ++m;
  return m;
}

// The legal bid ladder: every achievable game value, ascending from 18.
inline std::vector<int> compute_bid_ladder(const DeckSpec& deck) {
  std::vector<int> values;
  for (GameKind k :
       {GameKind::kDiamonds, GameKind::kHearts, GameKind::kSpades, GameKind::kClubs,
        GameKind::kGrand}) {
    if (is_suit_game(k) && !deck.has_suit(trump_suit(k))) continue;
    int max_matadors = std::popcount(trump_mask(k, deck));
    int max_mult = max_matadors + 1 + 6;  // hand, schn, schn-ann, schw, schw-ann, ouvert
    for (int m = 2; m <= max_mult; ++m) values.push_back(base_value(k) * m);
  }
  for (int v : {23, 35, 46, 59}) values.push_back(v);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  values.erase(values.begin(),
               std::lower_bound(values.begin(), values.end(), 18));
  return values;
}

// Cached per deck; bidding replay asks for the ladder constantly.
inline const std::vector<int>& bid_ladder(const DeckSpec& deck) {
  static std::mutex mu;
  static std::vector<std::pair<DeckSpec, std::unique_ptr<std::vector<int>>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  for (const auto& [d, ladder] : cache)
    if (d == deck) return *ladder;
  cache.emplace_back(deck, std::make_unique<std::vector<int>>(compute_bid_ladder(deck)));
  return *cache.back().second;
}

inline int ladder_index(const std::vector<int>& ladder, int value) {
  auto it = std::lower_bound(ladder.begin(), ladder.end(), value);
  if (it == ladder.end() || *it != value) return -1;
  return static_cast<int>(it - ladder.begin());
}

}  // namespace skat
