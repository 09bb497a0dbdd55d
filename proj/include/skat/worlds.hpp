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
#include <random>
#include <vector>

#include "skat/infoset.hpp"

namespace skat {

inline uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (int i = 0; i < k; ++i) {
    r = r * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
  }
  return static_cast<uint64_t>(r);
}

// Draw without bias from [0, n); avoids the unspecified behaviour of
// std::uniform_int_distribution across standard libraries.
inline uint64_t uniform_below(std::mt19937_64& rng, uint64_t n) {
  SKAT_CHECK(n > 0);
  uint64_t mask = ~uint64_t{0} >> std::countl_zero(n | 1);
  for (;;) {
    uint64_t v = rng() & mask;
    if (v < n) return v;
  }
}

// Exact assignment of every unseen card to a hidden location.
struct WorldConfiguration {
  std::array<uint32_t, kNumPlayers> seat_cards{};
  uint32_t skat_cards = 0;

  friend bool operator==(const WorldConfiguration& a, const WorldConfiguration& b) {
    return a.seat_cards == b.seat_cards && a.skat_cards == b.skat_cards;
  }
};

// A configuration plus the identity of the skat as dealt, before any pickup.
struct WorldState {
  WorldConfiguration config;
  uint32_t pre_discard_skat = 0;

  friend bool operator==(const WorldState& a, const WorldState& b) {
    return a.config == b.config && a.pre_discard_skat == b.pre_discard_skat;
  }
};

// The set of worlds consistent with an information set, with exact counting,
// rank/unrank bijections and uniform sampling without replacement. Counting
// runs a capacity DP over the void-constrained location classes, so void
// pruning is built into the index space rather than applied as a filter.
class WorldSpace {
 public:
  explicit WorldSpace(const InfoSet& I) : infoset_(I) {
    std::vector<int> seats = I.hidden_seats();
    for (int s : seats) {
      loc_seat_[num_locations_] = static_cast<int8_t>(s);
      caps_[num_locations_] = I.current_size[s];
      ++num_locations_;
    }
    if (!I.skat_known()) {
      loc_seat_[num_locations_] = -1;
      caps_[num_locations_] = kSkatSize;
      ++num_locations_;
    }
    Hand(I.unseen_mask).for_each([&](Card c) { cards_.push_back(c); });
    int need = 0;
    for (int l = 0; l < num_locations_; ++l) need += caps_[l];
    SKAT_CHECK(need == static_cast<int>(cards_.size()),
               "unseen cards do not fill the hidden locations");
    allowed_.resize(cards_.size());
    for (size_t i = 0; i < cards_.size(); ++i) {
      uint8_t m = 0;
      for (int l = 0; l < num_locations_; ++l) {
        if (loc_seat_[l] >= 0 && (I.void_mask[loc_seat_[l]] & cards_[i].mask())) continue;
        m |= static_cast<uint8_t>(1u << l);
      }
      allowed_[i] = m;
    }
    build_table();
  }

  const InfoSet& infoset() const { return infoset_; }
  int num_locations() const { return num_locations_; }
  const std::vector<Card>& unseen_cards() const { return cards_; }

  uint64_t config_count() const { return table_[index(0, init_caps_)]; }
  uint64_t state_count() const { return config_count() * infoset_.state_multiplicity(); }
  bool feasible() const { return config_count() > 0; }

  WorldConfiguration unrank_config(uint64_t r) const {
    SKAT_CHECK(r < config_count());
    WorldConfiguration cfg;
    std::array<uint8_t, kMaxLocations> caps = init_caps_;
    for (size_t i = 0; i < cards_.size(); ++i) {
      for (int l = 0; l < num_locations_; ++l) {
        if (!(allowed_[i] & (1u << l)) || caps[l] == 0) continue;
        --caps[l];
        uint64_t sub = table_[index(i + 1, caps)];
        if (r < sub) {
          place(cfg, l, cards_[i]);
          break;
        }
        r -= sub;
        ++caps[l];
      }
    }
    return cfg;
  }

  uint64_t rank_config(const WorldConfiguration& cfg) const {
    uint64_t r = 0;
    std::array<uint8_t, kMaxLocations> caps = init_caps_;
    for (size_t i = 0; i < cards_.size(); ++i) {
      int at = location_of(cfg, cards_[i]);
      SKAT_CHECK(at >= 0, "configuration does not cover an unseen card");
      for (int l = 0; l < num_locations_; ++l) {
        if (!(allowed_[i] & (1u << l)) || caps[l] == 0) continue;
        if (l == at) break;
        --caps[l];
        r += table_[index(i + 1, caps)];
        ++caps[l];
      }
      SKAT_CHECK(caps[at] > 0 && (allowed_[i] & (1u << at)), "inconsistent configuration");
      --caps[at];
    }
    return r;
  }

  bool consistent(const WorldConfiguration& cfg) const {
    uint32_t seen = 0;
    for (int l = 0; l < num_locations_; ++l) {
      uint32_t m = l_mask(cfg, l);
      if (std::popcount(m) != caps_[l]) return false;
      if (m & ~infoset_.unseen_mask) return false;
      if (seen & m) return false;
      seen |= m;
    }
    if (seen != infoset_.unseen_mask) return false;
    for (size_t i = 0; i < cards_.size(); ++i) {
      int at = location_of(cfg, cards_[i]);
      if (at < 0 || !(allowed_[i] & (1u << at))) return false;
    }
    // Locations outside the layout must stay empty.
    for (int p = 0; p < kNumPlayers; ++p) {
      bool hidden = false;
      for (int l = 0; l < num_locations_; ++l) hidden |= loc_seat_[l] == p;
      if (!hidden && cfg.seat_cards[p] != 0) return false;
    }
    if (infoset_.skat_known() && cfg.skat_cards != 0) return false;
    return true;
  }

  // Distinct ranks drawn uniformly; sorted ascending. `skip` (if not ~0)
  // names a rank excluded from the draw.
  std::vector<uint64_t> sample_ranks(uint64_t k, uint64_t seed, uint64_t total,
                                     uint64_t skip = ~uint64_t{0}) const {
    uint64_t population = total - (skip < total ? 1 : 0);
    if (k > population) k = population;
    std::mt19937_64 rng(mix_seed(seed, 0x73616d70ULL));
    std::vector<uint64_t> out;
    out.reserve(k);
    if (k == population) {
      for (uint64_t r = 0; r < total; ++r)
        if (r != skip) out.push_back(r);
      return out;
    }
    // Floyd's subset sampling: uniform over k-subsets, O(k) draws.
    std::vector<uint64_t> chosen;
    chosen.reserve(k);
    auto contains = [&](uint64_t v) {
      for (uint64_t c : chosen)
        if (c == v) return true;
      return false;
    };
    for (uint64_t j = population - k; j < population; ++j) {
      uint64_t r = uniform_below(rng, j + 1);
      chosen.push_back(contains(r) ? j : r);
    }
    out = std::move(chosen);
    if (skip < total) {
      for (uint64_t& r : out)
        if (r >= skip) ++r;
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<WorldConfiguration> sample_configurations(uint64_t k, uint64_t seed) const {
    SKAT_RULE(feasible(), "contradictory observations: no consistent world");
    std::vector<uint64_t> ranks = sample_ranks(k, seed, config_count());
    std::vector<WorldConfiguration> out;
    out.reserve(ranks.size());
    for (uint64_t r : ranks) out.push_back(unrank_config(r));
    return out;
  }

  // The 12-card set the soloist held after pickup, under a configuration.
  uint32_t soloist_union(const WorldConfiguration& cfg) const {
    const InfoSet& I = infoset_;
    uint32_t current;
    if (I.viewer == I.soloist) {
      current = I.own_current;
    } else if (I.soloist_hand_exposed()) {
      current = I.exposed_current();
    } else {
      current = cfg.seat_cards[I.soloist];
    }
    uint32_t skat = I.skat_known() ? I.known_skat : cfg.skat_cards;
    return current | I.played_by[I.soloist] | skat;
  }

  WorldState unrank_state(uint64_t r) const {
    uint64_t mult = infoset_.state_multiplicity();
    WorldState st;
    st.config = unrank_config(r / mult);
    if (mult == 1) {
      st.pre_discard_skat = dealt_skat_for(st.config);
    } else {
      st.pre_discard_skat = unrank_pair(soloist_union(st.config), r % mult);
    }
    return st;
  }

  uint64_t rank_state(const WorldState& st) const {
    uint64_t mult = infoset_.state_multiplicity();
    uint64_t r = rank_config(st.config) * mult;
    if (mult > 1) r += rank_pair(soloist_union(st.config), st.pre_discard_skat);
    return r;
  }

  std::vector<WorldState> states_for_configuration(const WorldConfiguration& cfg) const {
    std::vector<WorldState> out;
    uint64_t mult = infoset_.state_multiplicity();
    if (mult == 1) {
      out.push_back(WorldState{cfg, dealt_skat_for(cfg)});
      return out;
    }
    uint32_t pool = soloist_union(cfg);
    out.reserve(mult);
    for (uint64_t i = 0; i < mult; ++i) out.push_back(WorldState{cfg, unrank_pair(pool, i)});
    return out;
  }

  static uint32_t unrank_pair(uint32_t pool, uint64_t r) {
    std::vector<Card> cards = Hand(pool).cards();
    for (size_t i = 0; i + 1 < cards.size(); ++i) {
      uint64_t block = cards.size() - 1 - i;
      if (r < block) return cards[i].mask() | cards[i + 1 + r].mask();
      r -= block;
    }
    SKAT_CHECK(false, "pair rank out of range");
    return 0;
  }

  static uint64_t rank_pair(uint32_t pool, uint32_t pair) {
    SKAT_CHECK(std::popcount(pair) == 2 && (pool & pair) == pair);
    std::vector<Card> cards = Hand(pool).cards();
    uint64_t r = 0;
    size_t i = 0;
    while (!(pair & cards[i].mask())) {
      r += cards.size() - 1 - i;
      ++i;
    }
    for (size_t j = i + 1; j < cards.size(); ++j) {
      if (pair & cards[j].mask()) return r + (j - i - 1);
    }
    SKAT_CHECK(false);
    return 0;
  }

 private:
  static constexpr int kMaxLocations = 3;

  void place(WorldConfiguration& cfg, int loc, Card c) const {
    if (loc_seat_[loc] >= 0) {
      cfg.seat_cards[loc_seat_[loc]] |= c.mask();
    } else {
      cfg.skat_cards |= c.mask();
    }
  }

  uint32_t l_mask(const WorldConfiguration& cfg, int loc) const {
    return loc_seat_[loc] >= 0 ? cfg.seat_cards[loc_seat_[loc]] : cfg.skat_cards;
  }

  int location_of(const WorldConfiguration& cfg, Card c) const {
    for (int l = 0; l < num_locations_; ++l)
      if (l_mask(cfg, l) & c.mask()) return l;
    return -1;
  }

  size_t index(size_t pos, const std::array<uint8_t, kMaxLocations>& caps) const {
    size_t ci = (caps[0] * dim1_ + caps[1]) * dim2_ + caps[2];
    return pos * cap_states_ + ci;
  }

  void build_table() {
    for (int l = 0; l < kMaxLocations; ++l) init_caps_[l] = l < num_locations_ ? caps_[l] : 0;
    dim1_ = init_caps_[1] + 1;
    dim2_ = init_caps_[2] + 1;
    cap_states_ = (init_caps_[0] + 1) * dim1_ * dim2_;
    table_.assign((cards_.size() + 1) * cap_states_, 0);
    std::array<uint8_t, kMaxLocations> caps{};
    for (caps[0] = 0; caps[0] <= init_caps_[0]; ++caps[0])
      for (caps[1] = 0; caps[1] <= init_caps_[1]; ++caps[1])
        for (caps[2] = 0; caps[2] <= init_caps_[2]; ++caps[2])
          table_[index(cards_.size(), caps)] =
              (caps[0] == 0 && caps[1] == 0 && caps[2] == 0) ? 1 : 0;
    for (int i = static_cast<int>(cards_.size()) - 1; i >= 0; --i) {
      for (caps[0] = 0; caps[0] <= init_caps_[0]; ++caps[0])
        for (caps[1] = 0; caps[1] <= init_caps_[1]; ++caps[1])
          for (caps[2] = 0; caps[2] <= init_caps_[2]; ++caps[2]) {
            uint64_t total = 0;
            for (int l = 0; l < num_locations_; ++l) {
              if (!(allowed_[i] & (1u << l)) || caps[l] == 0) continue;
              --caps[l];
              total += table_[index(i + 1, caps)];
              ++caps[l];
            }
            table_[index(i, caps)] = total;
          }
    }
  }

  // Dealt skat when it is determined by the configuration (no pickup, or the
  // viewer is the soloist and knows it).
  uint32_t dealt_skat_for(const WorldConfiguration& cfg) const {
    if (!infoset_.picked_up) {
      return infoset_.skat_known() ? infoset_.known_skat : cfg.skat_cards;
    }
    SKAT_CHECK(infoset_.viewer == infoset_.soloist);
    return infoset_.known_dealt_skat;
  }

  InfoSet infoset_;
  int num_locations_ = 0;
  std::array<int8_t, kMaxLocations> loc_seat_{};
  std::array<uint8_t, kMaxLocations> caps_{};
  std::array<uint8_t, kMaxLocations> init_caps_{};
  std::vector<Card> cards_;
  std::vector<uint8_t> allowed_;
  std::vector<uint64_t> table_;
  size_t dim1_ = 1, dim2_ = 1, cap_states_ = 1;
};

// Free-function conveniences over a one-shot WorldSpace.
inline uint64_t count_configurations(const InfoSet& I) { return WorldSpace(I).config_count(); }
inline uint64_t count_states(const InfoSet& I) { return WorldSpace(I).state_count(); }

inline std::vector<WorldConfiguration> sample_configurations(const InfoSet& I, uint64_t k,
                                                             uint64_t seed) {
  return WorldSpace(I).sample_configurations(k, seed);
}

inline bool consistent(const WorldConfiguration& cfg, const InfoSet& I) {
  return WorldSpace(I).consistent(cfg);
}

// The configuration actually realized in a full game state, from a viewer's
// perspective. Used by instrumentation that knows the truth.
inline WorldState true_world(const GameState& s, const InfoSet& I) {
  WorldState st;
  for (int p = 0; p < kNumPlayers; ++p) {
    if (p == I.viewer) continue;
    if (p == I.soloist && I.soloist_hand_exposed()) continue;
    st.config.seat_cards[p] = s.hands[p] & I.unseen_mask;
  }
  if (!I.skat_known()) st.config.skat_cards = s.skat & I.unseen_mask;
  st.pre_discard_skat = s.dealt_skat;
  return st;
}

}  // namespace skat
