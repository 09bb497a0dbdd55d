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

#include "skat/ddsolver.hpp"

#include <catch2/catch.hpp>
#include <random>

#include "oracles.hpp"
#include "skat/worlds.hpp"
#include "test_util.hpp"

using namespace skat;

namespace {

// Random endgame with `cards_per_hand` cards left in each hand.
OpenState random_endgame(std::mt19937_64& rng, GameKind kind, int cards_per_hand,
                         const DeckSpec& deck = DeckSpec::full_deck()) {
  std::vector<Card> cards = deck.cards();
  for (size_t i = cards.size() - 1; i > 0; --i)
    std::swap(cards[i], cards[uniform_below(rng, i + 1)]);
  OpenState s;
  s.deck = deck;
  s.kind = kind;
  s.soloist = static_cast<int8_t>(uniform_below(rng, 3));
  s.leader = static_cast<int8_t>(uniform_below(rng, 3));
  size_t pos = 0;
  for (int p = 0; p < kNumPlayers; ++p)
    for (int i = 0; i < cards_per_hand; ++i) s.hands[p] |= cards[pos++].mask();
  return s;
}

}  // namespace

TEST_CASE("one card left: the forced trick decides the value") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    GameKind kind = static_cast<GameKind>(uniform_below(rng, 6));
    OpenState s = random_endgame(rng, kind, 1);
    DDSolver solver;
    int value = solver.solve(s);
    // Play out the single forced trick.
    std::array<Card, kNumPlayers> trick{};
    int pts = 0;
    for (int i = 0; i < kNumPlayers; ++i) {
      int seat = (s.leader + i) % kNumPlayers;
      Card c = Hand(s.hands[seat]).lowest();
      trick[i] = c;
      pts += card_points(c);
    }
    int winner = trick_winner(trick, s.leader, kind);
    if (kind == GameKind::kNull) {
      REQUIRE(value == (winner == s.soloist ? 0 : 1));
    } else {
      REQUIRE(value == (winner == s.soloist ? pts : 0));
    }
  }
}

TEST_CASE("solver equals unpruned minimax on random endgames") {
  std::mt19937_64 rng(7);
  for (GameKind kind : {GameKind::kDiamonds, GameKind::kHearts, GameKind::kSpades,
                        GameKind::kClubs, GameKind::kGrand, GameKind::kNull}) {
    for (int trial = 0; trial < 60; ++trial) {
      int n = 2 + static_cast<int>(uniform_below(rng, 3));  // 2..4 cards per hand
      OpenState s = random_endgame(rng, kind, n);
      DDSolver solver;
      int got = solver.solve(s);
      test::MinimaxOracle oracle{kind, s.soloist, s.deck};
      int want = kind == GameKind::kNull
                     ? oracle.null_win(s.hands, s.leader, 0, {})
                     : oracle.soloist_points(s.hands, s.leader, 0, {});
      REQUIRE(got == want);
    }
  }
}

TEST_CASE("solver equals minimax from mid-trick positions") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 120; ++trial) {
    GameKind kind = static_cast<GameKind>(uniform_below(rng, 6));
    OpenState s = random_endgame(rng, kind, 3);
    // Put one legal card into the trick.
    int seat = s.leader;
    Card led = Hand(s.hands[seat]).lowest();
    s.hands[seat] &= ~led.mask();
    s.trick_cards[0] = led;
    s.trick_len = 1;
    DDSolver solver;
    int got = solver.solve(s);
    test::MinimaxOracle oracle{kind, s.soloist, s.deck};
    std::array<Card, kNumPlayers> trick{};
    trick[0] = led;
    int want = kind == GameKind::kNull ? oracle.null_win(s.hands, s.leader, 1, trick)
                                       : oracle.soloist_points(s.hands, s.leader, 1, trick);
    REQUIRE(got == want);
  }
}

TEST_CASE("null terminal rule: a trick already taken loses immediately") {
  std::mt19937_64 rng(23);
  OpenState s = random_endgame(rng, GameKind::kNull, 4);
  s.soloist_took_trick = true;
  DDSolver solver;
  REQUIRE(solver.solve(s) == 0);
}

TEST_CASE("transposition table does not change values") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 150; ++trial) {
    GameKind kind = static_cast<GameKind>(uniform_below(rng, 6));
    OpenState s = random_endgame(rng, kind, 4);
    DDSolver with_tt(true);
    DDSolver without_tt(false);
    REQUIRE(with_tt.solve(s) == without_tt.solve(s));
  }
}

TEST_CASE("value bounds and determinism") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 60; ++trial) {
    GameKind kind = static_cast<GameKind>(uniform_below(rng, 5));  // suit/grand
    OpenState s = random_endgame(rng, kind, 5);
    DDSolver a, b;
    int va = a.solve(s);
    int vb = b.solve(s);
    REQUIRE(va == vb);
    REQUIRE(va >= 0);
    REQUIRE(va <= 120);
  }
}

TEST_CASE("action values are consistent with solve") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 80; ++trial) {
    GameKind kind = static_cast<GameKind>(uniform_below(rng, 6));
    OpenState s = random_endgame(rng, kind, 3);
    DDSolver solver;
    std::vector<std::pair<Card, int>> av = solver.action_values(s);
    REQUIRE(!av.empty());
    int to_move = s.to_move();
    int best = av[0].second;
    for (const auto& [c, v] : av) {
      best = to_move == s.soloist ? std::max(best, v) : std::min(best, v);
    }
    DDSolver fresh;
    REQUIRE(best == fresh.solve(s));
  }
}

TEST_CASE("symmetric discards have equal values") {
  // Two touching void-suit cards with no points are interchangeable: verify
  // equal action values for an engineered position.
  OpenState s;
  s.deck = DeckSpec::full_deck();
  s.kind = GameKind::kClubs;
  s.soloist = 0;
  s.leader = 1;
  auto C = [](const char* t) { return card_from_string(t); };
  s.hands[0] = C("D7").mask() | C("D8").mask() | C("CJ").mask();
  s.hands[1] = C("HA").mask() | C("H7").mask() | C("CA").mask();
  s.hands[2] = C("HK").mask() | C("H8").mask() | C("CT").mask();
  s.trick_cards[0] = C("HA");
  s.hands[1] &= ~C("HA").mask();
  s.trick_len = 1;
  // Seat 2 must follow hearts; seat 0 is void and can discard D7 or D8 or ruff.
  DDSolver solver;
  std::vector<std::pair<Card, int>> av = solver.action_values(s);
  // After seat 2 plays, seat 0 responds; check at the top level instead:
  // build the position where seat 0 is to move.
  OpenState s2 = s;
  s2.trick_cards[1] = C("HK");
  s2.hands[2] &= ~C("HK").mask();
  s2.trick_len = 2;
  DDSolver solver2;
  std::vector<std::pair<Card, int>> av2 = solver2.action_values(s2);
  int v7 = -1, v8 = -1;
  for (const auto& [c, v] : av2) {
    if (c == C("D7")) v7 = v;
    if (c == C("D8")) v8 = v;
  }
  REQUIRE(v7 >= 0);
  REQUIRE(v7 == v8);
  (void)av;
}

TEST_CASE("solver agrees with full playouts driven by its action values") {
  // Greedy play by action_values from both sides reproduces solve() exactly
  // (both parties are playing minimax lines).
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 25; ++trial) {
    GameKind kind = static_cast<GameKind>(uniform_below(rng, 6));
    OpenState s = random_endgame(rng, kind, 4);
    DDSolver reference;
    int want = reference.solve(s);
    OpenState cur = s;
    while ((cur.hands[0] | cur.hands[1] | cur.hands[2]) != 0) {
      if (kind == GameKind::kNull && cur.soloist_took_trick) break;
      DDSolver step;
      std::vector<std::pair<Card, int>> av = step.action_values(cur);
      bool maximizing = cur.to_move() == cur.soloist;
      std::pair<Card, int> pick = av[0];
      for (const auto& cv : av) {
        if (maximizing ? cv.second > pick.second : cv.second < pick.second) pick = cv;
      }
      int seat = cur.to_move();
      cur.hands[seat] &= ~pick.first.mask();
      cur.trick_cards[cur.trick_len++] = pick.first;
      if (cur.trick_len == kNumPlayers) {
        int winner = trick_winner(cur.trick_cards, cur.leader, kind);
        int pts = 0;
        for (int i = 0; i < kNumPlayers; ++i) pts += card_points(cur.trick_cards[i]);
        if (winner == cur.soloist) {
          cur.captured_points = static_cast<int16_t>(cur.captured_points + pts);
          cur.soloist_took_trick = true;
        }
        cur.leader = static_cast<int8_t>(winner);
        cur.trick_len = 0;
      }
    }
    int got = kind == GameKind::kNull ? (cur.soloist_took_trick ? 0 : 1)
                                      : cur.captured_points + cur.skat_points;
    REQUIRE(got == want);
  }
}
