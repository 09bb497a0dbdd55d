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

#include "skat/worlds.hpp"

#include <catch2/catch.hpp>
#include <map>
#include <random>
#include <set>

#include "test_util.hpp"

using namespace skat;

namespace {

GameState declared_state(uint64_t seed, GameKind kind, bool pickup, bool ouvert = false) {
  GameType gt;
  gt.kind = kind;
  gt.ouvert = ouvert;
  return test::scripted_game(seed, gt, pickup);
}

}  // namespace

TEST_CASE("defender world counts at cardplay start") {
  GameState s = declared_state(17, GameKind::kClubs, /*pickup=*/true);
  int defender = next_seat(s.soloist);
  InfoSet I = InfoSet::from_state(s, defender);
  // 22 unseen cards into 10/10/2.
  REQUIRE(count_configurations(I) == 42'678'636ull);
  REQUIRE(I.state_multiplicity() == 66);
  REQUIRE(count_states(I) == 2'816'789'976ull);
}

TEST_CASE("soloist world count after pickup") {
  GameState s = declared_state(17, GameKind::kClubs, /*pickup=*/true);
  InfoSet I = InfoSet::from_state(s, s.soloist);
  REQUIRE(count_configurations(I) == 184'756ull);  // C(20,10)
  REQUIRE(count_states(I) == 184'756ull);          // the soloist knows the skat
}

TEST_CASE("null ouvert defender sees 66 worlds") {
  GameState s = declared_state(23, GameKind::kNull, /*pickup=*/true, /*ouvert=*/true);
  int defender = next_seat(s.soloist);
  InfoSet I = InfoSet::from_state(s, defender);
  REQUIRE(count_configurations(I) == 66ull);  // C(12,2): partner 10, skat 2
  REQUIRE(count_states(I) == 66ull * 66ull);
}

TEST_CASE("hand game multiplicity is one") {
  GameState s = declared_state(29, GameKind::kHearts, /*pickup=*/false);
  int defender = next_seat(s.soloist);
  InfoSet I = InfoSet::from_state(s, defender);
  REQUIRE(I.state_multiplicity() == 1);
  REQUIRE(count_states(I) == count_configurations(I));
}

TEST_CASE("rank and unrank are inverse bijections") {
  GameState s = declared_state(5, GameKind::kGrand, true, false);
  std::mt19937_64 rng(3);
  // Play a few tricks to shrink the space and create voids.
  for (int i = 0; i < 9; ++i) {
    std::vector<Action> legal = legal_actions(s);
    s = apply_action(s, legal[uniform_below(rng, legal.size())]);
  }
  for (int viewer = 0; viewer < 3; ++viewer) {
    InfoSet I = InfoSet::from_state(s, viewer);
    WorldSpace space(I);
    uint64_t n = space.config_count();
    REQUIRE(n > 0);
    for (uint64_t probe = 0; probe < std::min<uint64_t>(n, 500); ++probe) {
      uint64_t r = (probe * 7919) % n;
      WorldConfiguration cfg = space.unrank_config(r);
      REQUIRE(space.consistent(cfg));
      REQUIRE(space.rank_config(cfg) == r);
    }
  }
}

TEST_CASE("mini deck enumeration agrees with counting and is consistent") {
  GameState s = test::scripted_game(31, GameType{GameKind::kHearts}, true, 0,
                                    DeckSpec::mini_deck());
  int defender = next_seat(s.soloist);
  InfoSet I = InfoSet::from_state(s, defender);
  WorldSpace space(I);
  uint64_t n = space.config_count();
  REQUIRE(n == 3150);  // 10 unseen into 4/4/2
  std::set<uint64_t> seen;
  for (uint64_t r = 0; r < n; ++r) {
    WorldConfiguration cfg = space.unrank_config(r);
    REQUIRE(space.consistent(cfg));
    uint64_t key = (static_cast<uint64_t>(cfg.seat_cards[s.soloist]) << 32) | cfg.skat_cards;
    REQUIRE(seen.insert(key).second);
  }
}

TEST_CASE("state multiplicity on the mini deck") {
  GameState s = test::scripted_game(31, GameType{GameKind::kHearts}, true, 0,
                                    DeckSpec::mini_deck());
  InfoSet I = InfoSet::from_state(s, next_seat(s.soloist));
  REQUIRE(I.state_multiplicity() == 15);  // C(6,2)
  WorldSpace space(I);
  WorldConfiguration cfg = space.unrank_config(1234 % space.config_count());
  std::vector<WorldState> states = space.states_for_configuration(cfg);
  REQUIRE(states.size() == 15);
  std::set<uint32_t> skats;
  for (const WorldState& st : states) {
    REQUIRE(std::popcount(st.pre_discard_skat) == 2);
    REQUIRE((st.pre_discard_skat & ~space.soloist_union(cfg)) == 0);
    skats.insert(st.pre_discard_skat);
    REQUIRE(space.rank_state(st) / 15 == space.rank_config(cfg));
  }
  REQUIRE(skats.size() == 15);
}

TEST_CASE("state rank round trip") {
  GameState s = test::scripted_game(57, GameType{GameKind::kDiamonds}, true, 0,
                                    DeckSpec::mini_deck());
  InfoSet I = InfoSet::from_state(s, next_seat(s.soloist));
  WorldSpace space(I);
  uint64_t n = space.state_count();
  for (uint64_t probe = 0; probe < 400; ++probe) {
    uint64_t r = (probe * 104729) % n;
    WorldState st = space.unrank_state(r);
    REQUIRE(space.rank_state(st) == r);
  }
}

TEST_CASE("voids prune the space") {
  // Force a game where somebody shows void by playing many random tricks.
  std::mt19937_64 rng(11);
  for (uint64_t seed = 100; seed < 140; ++seed) {
    GameState s = declared_state(seed, GameKind::kClubs, true);
    for (int i = 0; i < 15 && s.phase == Phase::kCardplay; ++i) {
      std::vector<Action> legal = legal_actions(s);
      s = apply_action(s, legal[uniform_below(rng, legal.size())]);
    }
    if (s.phase != Phase::kCardplay) continue;
    for (int viewer = 0; viewer < 3; ++viewer) {
      InfoSet I = InfoSet::from_state(s, viewer);
      WorldSpace space(I);
      // The realized configuration must always be counted.
      WorldState truth = true_world(s, I);
      REQUIRE(space.consistent(truth.config));
      uint64_t r = space.rank_config(truth.config);
      REQUIRE(r < space.config_count());
      bool has_void = false;
      for (int p = 0; p < 3; ++p) has_void |= I.void_mask[p] != 0;
      if (has_void) {
        // Counting with voids is strictly below the unconstrained multinomial.
        int u = std::popcount(I.unseen_mask);
        std::vector<int> seats = I.hidden_seats();
        uint64_t unconstrained = 1;
        int left = u;
        for (int seat : seats) {
          unconstrained *= binomial(left, I.current_size[seat]);
          left -= I.current_size[seat];
        }
        REQUIRE(space.config_count() <= unconstrained);
      }
    }
  }
}

TEST_CASE("true world is always consistent for every viewer during playouts") {
  std::mt19937_64 rng(17);
  for (uint64_t seed = 0; seed < 60; ++seed) {
    const DeckSpec& deck = (seed % 2) ? DeckSpec::mini_deck() : DeckSpec::full_deck();
    GameState s = deal(seed + 1000, deck);
    while (s.phase != Phase::kTerminal) {
      if (s.phase == Phase::kCardplay) {
        for (int viewer = 0; viewer < 3; ++viewer) {
          InfoSet I = InfoSet::from_state(s, viewer);
          WorldSpace space(I);
          WorldState truth = true_world(s, I);
          REQUIRE(space.consistent(truth.config));
          WorldState again = space.unrank_state(space.rank_state(truth));
          REQUIRE(again == truth);
        }
      }
      std::vector<Action> legal = legal_actions(s);
      s = apply_action(s, legal[uniform_below(rng, legal.size())]);
    }
  }
}

TEST_CASE("sampling without replacement is sound and exhausts small spaces") {
  GameState s = declared_state(23, GameKind::kNull, true, true);
  InfoSet I = InfoSet::from_state(s, next_seat(s.soloist));
  WorldSpace space(I);
  REQUIRE(space.config_count() == 66);

  SECTION("k >= count returns the full enumeration") {
    std::vector<WorldConfiguration> all = space.sample_configurations(1000, 9);
    REQUIRE(all.size() == 66);
    std::set<uint32_t> skats;
    for (const WorldConfiguration& c : all) skats.insert(c.skat_cards);
    REQUIRE(skats.size() == 66);
  }

  SECTION("samples are distinct and consistent") {
    std::vector<WorldConfiguration> some = space.sample_configurations(20, 123);
    REQUIRE(some.size() == 20);
    std::set<uint32_t> skats;
    for (const WorldConfiguration& c : some) {
      REQUIRE(space.consistent(c));
      skats.insert(c.skat_cards);
    }
    REQUIRE(skats.size() == 20);
  }
}

TEST_CASE("sampling is uniform on a 66-world information set") {
  GameState s = declared_state(23, GameKind::kNull, true, true);
  InfoSet I = InfoSet::from_state(s, next_seat(s.soloist));
  WorldSpace space(I);
  const uint64_t n = space.config_count();
  REQUIRE(n == 66);
  // 1e5 draws of 5 distinct ranks; chi-square against uniform.
  std::map<uint64_t, int> counts;
  const int draws = 100000;
  const int k = 5;
  for (int seed = 0; seed < draws; ++seed) {
    for (uint64_t r : space.sample_ranks(k, seed, n)) counts[r]++;
  }
  double expected = static_cast<double>(draws) * k / n;
  double chi2 = 0.0;
  double sigma = std::sqrt(expected * (1.0 - static_cast<double>(k) / n));
  for (uint64_t r = 0; r < n; ++r) {
    double diff = counts[r] - expected;
    REQUIRE(std::abs(diff) <= 4.0 * sigma);
    chi2 += diff * diff / expected;
  }
  // 99.9th percentile of chi-square with 65 dof is about 106.
  REQUIRE(chi2 < 106.0);
}

TEST_CASE("sampler matches rejection sampling on a constrained space") {
  // Build a space with voids, then compare the unranking sampler's
  // distribution against a plain rejection oracle.
  std::mt19937_64 rng(77);
  GameState s = test::scripted_game(400, GameType{GameKind::kHearts}, true, 0,
                                    DeckSpec::mini_deck());
  while (true) {
    bool has_void = false;
    if (s.phase == Phase::kCardplay) {
      InfoSet probe = InfoSet::from_state(s, s.to_move);
      for (int p = 0; p < 3; ++p) has_void |= probe.void_mask[p] != 0;
    }
    if (has_void || s.phase != Phase::kCardplay) break;
    std::vector<Action> legal = legal_actions(s);
    s = apply_action(s, legal[uniform_below(rng, legal.size())]);
  }
  if (s.phase != Phase::kCardplay) return;  // playout ended early; other seeds cover it
  InfoSet I = InfoSet::from_state(s, s.to_move);
  WorldSpace space(I);
  uint64_t n = space.config_count();
  REQUIRE(n > 1);

  // Rejection oracle: shuffle unseen cards into slots until consistent.
  std::vector<Card> unseen = Hand(I.unseen_mask).cards();
  std::vector<int> hidden = I.hidden_seats();
  auto reject_draw = [&](std::mt19937_64& r) {
    for (;;) {
      std::vector<Card> pool = unseen;
      for (size_t i = pool.size() - 1; i > 0; --i)
        std::swap(pool[i], pool[uniform_below(r, i + 1)]);
      WorldConfiguration cfg;
      size_t pos = 0;
      for (int seat : hidden)
        for (int j = 0; j < I.current_size[seat]; ++j)
          cfg.seat_cards[seat] |= pool[pos++].mask();
      if (!I.skat_known())
        while (pos < pool.size()) cfg.skat_cards |= pool[pos++].mask();
      if (space.consistent(cfg)) return cfg;
    }
  };
  std::map<uint64_t, int> ours, oracle;
  std::mt19937_64 orng(5);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    ours[space.sample_ranks(1, i, n)[0]]++;
    oracle[space.rank_config(reject_draw(orng))]++;
  }
  // Same support, similar frequencies.
  double expected = static_cast<double>(draws) / n;
  for (uint64_t r = 0; r < n; ++r) {
    double sigma = std::sqrt(expected);
    REQUIRE(std::abs(ours[r] - expected) <= 5 * sigma + 5);
    REQUIRE(std::abs(oracle[r] - expected) <= 5 * sigma + 5);
  }
}
