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
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "skat/base.hpp"

namespace skat {

inline constexpr int kNumPlayers = 3;
inline constexpr int kNumSuits = 4;
inline constexpr int kNumRanks = 8;
inline constexpr int kDeckCards = kNumSuits * kNumRanks;
inline constexpr int kSkatSize = 2;

enum class Suit : uint8_t { kDiamonds = 0, kHearts = 1, kSpades = 2, kClubs = 3 };

// Rank order doubles as the null-game ranking (7 < 8 < 9 < 10 < J < Q < K < A).
enum class Rank : uint8_t {
  kSeven = 0,
  kEight = 1,
  kNine = 2,
  kTen = 3,
  kJack = 4,
  kQueen = 5,
  kKing = 6,
  kAce = 7,
};

// A card is an index in [0, 32): suit-major, rank-minor.
struct Card {
  uint8_t index = 0xff;

  constexpr Card() = default;
  constexpr explicit Card(int idx) : index(static_cast<uint8_t>(idx)) {}
  constexpr Card(Suit s, Rank r)
      : index(static_cast<uint8_t>(static_cast<int>(s) * kNumRanks + static_cast<int>(r))) {}

  constexpr bool valid() const { return index < kDeckCards; }
  constexpr Suit suit() const { return static_cast<Suit>(index / kNumRanks); }
  constexpr Rank rank() const { return static_cast<Rank>(index % kNumRanks); }
  constexpr uint32_t mask() const { return 1u << index; }

  friend constexpr bool operator==(Card a, Card b) { return a.index == b.index; }
  friend constexpr bool operator!=(Card a, Card b) { return a.index != b.index; }
  friend constexpr bool operator<(Card a, Card b) { return a.index < b.index; }
};

inline constexpr Card kNoCard{};

constexpr int card_points(Rank r) {
  switch (r) {
    case Rank::kAce:
      return 11;
    case Rank::kTen:
      return 10;
    case Rank::kKing:
      return 4;
    case Rank::kQueen:
      return 3;
    case Rank::kJack:
      return 2;
    default:
      return 0;  // seven, eight, nine
  }
}

constexpr int card_points(Card c) { return card_points(c.rank()); }

// A set of cards as a 32-bit mask.
struct Hand {
  uint32_t mask = 0;

  constexpr Hand() = default;
  constexpr explicit Hand(uint32_t m) : mask(m) {}

  constexpr bool contains(Card c) const { return (mask >> c.index) & 1u; }
  constexpr bool empty() const { return mask == 0; }
  constexpr int size() const { return std::popcount(mask); }
  constexpr void add(Card c) { mask |= c.mask(); }
  constexpr void remove(Card c) { mask &= ~c.mask(); }
  constexpr Hand intersect(Hand o) const { return Hand(mask & o.mask); }
  constexpr Hand unite(Hand o) const { return Hand(mask | o.mask); }
  constexpr Hand minus(Hand o) const { return Hand(mask & ~o.mask); }
  constexpr Card lowest() const { return Card(std::countr_zero(mask)); }

  friend constexpr bool operator==(Hand a, Hand b) { return a.mask == b.mask; }
  friend constexpr bool operator!=(Hand a, Hand b) { return a.mask != b.mask; }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    uint32_t m = mask;
    while (m) {
      int idx = std::countr_zero(m);
      m &= m - 1;
      fn(Card(idx));
    }
  }

  std::vector<Card> cards() const {
    std::vector<Card> out;
    out.reserve(size());
    for_each([&](Card c) { out.push_back(c); });
    return out;
  }
};

inline int points_in(uint32_t mask) {
  int total = 0;
  Hand(mask).for_each([&](Card c) { total += card_points(c); });
  return total;
}

constexpr char kSuitChars[kNumSuits + 1] = "DHSC";
constexpr char kRankChars[kNumRanks + 1] = "789TJQKA";

inline std::string card_to_string(Card c) {
  if (!c.valid()) return "??";
  return std::string{kSuitChars[static_cast<int>(c.suit())],
                     kRankChars[static_cast<int>(c.rank())]};
}

inline Card card_from_string(const std::string& s) {
  if (s.size() != 2) throw DataError("bad card token: " + s);
  int suit = -1, rank = -1;
  for (int i = 0; i < kNumSuits; ++i)
    if (s[0] == kSuitChars[i]) suit = i;
  for (int i = 0; i < kNumRanks; ++i)
    if (s[1] == kRankChars[i]) rank = i;
  if (suit < 0 || rank < 0) throw DataError("bad card token: " + s);
  return Card(static_cast<Suit>(suit), static_cast<Rank>(rank));
}

inline std::string hand_to_string(Hand h) {
  std::string out;
  h.for_each([&](Card c) {
    if (!out.empty()) out += ' ';
    out += card_to_string(c);
  });
  return out;
}

// Which cards are in play, and how many each player is dealt. The full game
// uses all 32 cards with 10-card hands; the 14-card mini deck (two suits,
// eights removed, 4-card hands) keeps every game mechanic while staying small
// enough for exhaustive enumeration in tests.
struct DeckSpec {
  uint32_t card_mask = 0xffffffffu;
  uint8_t hand_size = 10;

  constexpr int deck_size() const { return std::popcount(card_mask); }
  constexpr bool in_deck(Card c) const { return (card_mask >> c.index) & 1u; }
  constexpr bool has_suit(Suit s) const {
    return (card_mask >> (static_cast<int>(s) * kNumRanks)) & 0xffu;
  }

  int total_card_points() const { return points_in(card_mask); }
  // Soloist needs a strict majority of the card points.
  int win_threshold() const { return total_card_points() / 2 + 1; }
  // Schneider scales the full deck's 90-of-120 line.
  int schneider_threshold() const { return total_card_points() * 3 / 4; }

  std::vector<Card> cards() const { return Hand(card_mask).cards(); }

  friend constexpr bool operator==(const DeckSpec& a, const DeckSpec& b) {
    return a.card_mask == b.card_mask && a.hand_size == b.hand_size;
  }

  static constexpr DeckSpec full_deck() { return DeckSpec{0xffffffffu, 10}; }

  static constexpr DeckSpec mini_deck() {
    // Diamonds and hearts, ranks {7,9,T,J,Q,K,A}: 14 cards, 60 card points.
    constexpr uint32_t suit_ranks = 0b11111101u;
    return DeckSpec{suit_ranks | (suit_ranks << kNumRanks), 4};
  }
};

inline DeckSpec deck_from_name(const std::string& name) {
  if (name == "full") return DeckSpec::full_deck();
  if (name == "mini") return DeckSpec::mini_deck();
  throw DataError("unknown deck name: " + name);
}

inline std::string deck_name(const DeckSpec& deck) {
  if (deck == DeckSpec::full_deck()) return "full";
  if (deck == DeckSpec::mini_deck()) return "mini";
  return internal::concat("custom:", deck.card_mask, ":", int(deck.hand_size));
}

}  // namespace skat
