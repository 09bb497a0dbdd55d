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

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <unordered_map>
#include <vector>

#include "skat/policy.hpp"
#include "skat/threading.hpp"
#include "skat/worlds.hpp"

namespace skat {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class InferenceVariantId : uint8_t { kNI = 0, kKI, kCLI, kPI, kPIF, kCheat };

inline const char* variant_name(InferenceVariantId v) {
  switch (v) {
    case InferenceVariantId::kNI:
      return "NI";
    case InferenceVariantId::kKI:
      return "KI";
    case InferenceVariantId::kCLI:
      return "CLI";
    case InferenceVariantId::kPI:
      return "PI";
    case InferenceVariantId::kPIF:
      return "PIF";
    case InferenceVariantId::kCheat:
      return "C";
  }
  return "?";
}

inline InferenceVariantId variant_from_name(const std::string& s) {
  for (int v = 0; v < 6; ++v)
    if (variant_name(static_cast<InferenceVariantId>(v)) == s)
      return static_cast<InferenceVariantId>(v);
  throw DataError("unknown inference variant: " + s);
}

// Per-card location distribution: locations 0..2 are seats, 3 is the skat.
inline constexpr int kLocSkat = kNumPlayers;
struct CardLocationMarginals {
  std::array<std::array<double, kNumPlayers + 1>, kDeckCards> p{};
};

// Table-driven bid/declaration weighting in the style of the original
// sampler: per (role, declaration, bid bucket) row, a distribution over
// coarse hand buckets. Cardplay never enters, which is the point.
struct KiTables {
  static constexpr int kBidBuckets = 4;
  static constexpr int kHandBuckets = 32;
  double alpha = 1.0;
  std::unordered_map<uint32_t, std::array<double, kHandBuckets>> rows;

  static uint32_t row_key(bool is_soloist, GameKind decl, int bid_bucket) {
    return (is_soloist ? 1u : 0u) | (static_cast<uint32_t>(decl) << 1) |
           (static_cast<uint32_t>(bid_bucket) << 4);
  }

  static int hand_bucket(uint32_t hand, GameKind decl, const DeckSpec& deck) {
    HandFeatures f = hand_features(hand, deck);
    int trumps = decl == GameKind::kNull
                     ? 0
                     : std::min(3, std::popcount(hand & trump_mask(decl, deck)));
    int jacks = std::min(3, f.jacks);
    int hcp = std::min(1, f.high_cards / (deck.hand_size / 2 + 1));
    return jacks * 8 + trumps * 2 + hcp;
  }

  double weight(bool is_soloist, GameKind decl, int bid_bucket, int hand_bucket) const {
    auto it = rows.find(row_key(is_soloist, decl, bid_bucket));
    if (it == rows.end()) return 1.0;  // unseen bucket: uniform factor
    double total = 0.0;
    for (double c : it->second) total += c + alpha;
    return (it->second[hand_bucket] + alpha) / total;
  }
};

// Bucketed summary of one seat's auction behaviour; depends only on the
// public transcript. 0 = never affirmed a bid.
inline int ki_bid_bucket(const std::vector<ObservedDecision>& decisions, int seat,
                         size_t ladder_size) {
  int max_affirmed = -1;
  for (const ObservedDecision& d : decisions) {
    if (!is_max_bid_kind(d.kind) || d.seat != seat) continue;
    max_affirmed = std::max(max_affirmed, static_cast<int>(d.lo));
  }
  if (max_affirmed < 0) return 0;
  int b = 1 + max_affirmed * (KiTables::kBidBuckets - 1) / std::max<size_t>(ladder_size, 1);
  return std::min(b, KiTables::kBidBuckets - 1);
}

struct InferenceSpec {
  InferenceVariantId id = InferenceVariantId::kNI;
  uint64_t sample_budget = 20000;
  PolicyPtr policy;                      // PI / PIF
  std::shared_ptr<const KiTables> ki;    // KI
  // CLI marginal source: provided directly, or derived from a policy
  // posterior over a sampled set, or the closed-form uniform marginals.
  enum class MarginalSource : uint8_t { kProvided, kPolicyPosterior, kUniform };
  MarginalSource marginal_source = MarginalSource::kPolicyPosterior;
  std::shared_ptr<const CardLocationMarginals> marginals;
  uint64_t marginal_budget = 20000;
  int workers = 1;
};

struct WeightedWorlds {
  InferenceVariantId variant = InferenceVariantId::kNI;
  bool state_level = false;  // true: entries are full states (PIF)
  std::vector<WorldState> worlds;
  std::vector<double> weights;  // normalized over the sample
  uint64_t total_count = 0;     // full space size at the sampling level
  uint32_t zero_mass_fallbacks = 0;

  uint64_t sampled_count() const { return worlds.size(); }

  double entropy() const {
    double h = 0.0;
    for (double w : weights)
      if (w > 0) h -= w * std::log(w);
    return h;
  }
};

// Hypothesized hands implied by a world, rewound to the deal where possible.
// For configuration-level inference in pickup games, the soloist's dealt hand
// is undetermined; decision points that need it are skipped (the
// state-multiplicity rule).
struct ResolvedWorld {
  std::array<uint32_t, kNumPlayers> at_cardplay{};
  uint32_t current_skat = 0;
  std::array<uint32_t, kNumPlayers> dealt{};
  bool soloist_dealt_known = true;
  uint32_t dealt_skat = 0;
  uint32_t soloist_union = 0;  // 12-card post-pickup set (pickup games)
};

inline ResolvedWorld resolve_world(const InfoSet& I, const WorldConfiguration& cfg,
                                   uint32_t pre_discard_skat = 0) {
  ResolvedWorld w;
  std::array<uint32_t, kNumPlayers> current{};
  for (int p = 0; p < kNumPlayers; ++p) {
    if (p == I.viewer) {
      current[p] = I.own_current;
    } else if (p == I.soloist && I.soloist_hand_exposed()) {
      current[p] = I.exposed_current();
    } else {
      current[p] = cfg.seat_cards[p];
    }
    w.at_cardplay[p] = current[p] | I.played_by[p];
  }
  w.current_skat = I.skat_known() ? I.known_skat : cfg.skat_cards;
  if (!I.picked_up) {
    w.dealt = w.at_cardplay;
    w.dealt_skat = w.current_skat;
    return w;
  }
  for (int p = 0; p < kNumPlayers; ++p) w.dealt[p] = w.at_cardplay[p];
  w.soloist_union = w.at_cardplay[I.soloist] | w.current_skat;
  if (I.viewer == I.soloist) {
    w.dealt[I.soloist] = I.own_dealt;
    w.dealt_skat = I.known_dealt_skat;
  } else if (pre_discard_skat) {
    w.dealt[I.soloist] = w.soloist_union & ~pre_discard_skat;
    w.dealt_skat = pre_discard_skat;
  } else {
    w.dealt[I.soloist] = 0;
    w.soloist_dealt_known = false;
  }
  return w;
}

// Precomputed per-infoset data shared across the many worlds of one
// estimate: the decision list and reusable action sets.
class ReachEvaluator {
 public:
  explicit ReachEvaluator(const InfoSet& I)
      : infoset_(I), decisions_(I.decision_points()), bid_actions_(max_bid_actions(I.deck)) {}

  const InfoSet& infoset() const { return infoset_; }
  const std::vector<ObservedDecision>& decisions() const { return decisions_; }

  struct Term {
    const ObservedDecision* decision;
    double log_prob;  // 0 for skipped terms
    bool skipped;
  };

  // Log of the product of opponent-decision observation probabilities under
  // the hypothesis `w`. The viewer's own decisions contribute factor one, and
  // uniform-deal chance factors are dropped (constant across the infoset).
  double log_reach(const ResolvedWorld& w, const Policy& policy,
                   std::vector<Term>* terms = nullptr) const {
    const InfoSet& I = infoset_;
    double total = 0.0;
    std::array<uint32_t, kNumPlayers> hands = w.at_cardplay;
    uint32_t played = 0;
    int trick_leader = 0;
    uint8_t trick_len = 0;
    uint8_t trick_no = 0;
    std::array<Card, kNumPlayers> trick_cards{};

    for (const ObservedDecision& d : decisions_) {
      double logp = 0.0;
      bool skipped = true;
      bool evaluate = d.seat != I.viewer;
      // Soloist decisions made before the pickup have state-dependent
      // contexts; at configuration level they are left out of the product.
      if (evaluate && d.seat == I.soloist && !w.soloist_dealt_known &&
          d.kind != DecisionKind::kDiscardAndDeclare && d.kind != DecisionKind::kPlayCard) {
        evaluate = false;
      }
      switch (d.kind) {
        case DecisionKind::kMaxBidBidder:
        case DecisionKind::kMaxBidAnswerer:
        case DecisionKind::kMaxBidContinue:
        case DecisionKind::kMaxBidContinueAnswer: {
          if (!evaluate) break;
          DecisionContext ctx =
              make_bid_context(I.deck, d.kind, d.seat, w.dealt[d.seat], d.floor_value);
          logp = std::log(interval_probability(policy, ctx, d.lo, d.hi));
          skipped = false;
          break;
        }
        case DecisionKind::kPickupOrHand: {
          if (!evaluate) break;
          DecisionContext ctx =
              make_pickup_context(I.deck, d.seat, w.dealt[d.seat], I.winning_bid);
          Action obs = d.picked_up ? Action::make_pickup() : Action::make_hand();
          logp = std::log(
              observed_action_probability(policy, ctx, ObservedAction::exact(obs)));
          skipped = false;
          break;
        }
        case DecisionKind::kDiscardAndDeclare: {
          if (!evaluate) break;
          uint32_t hand12 = I.picked_up ? w.soloist_union : w.dealt[d.seat];
          uint32_t discard = I.picked_up ? w.current_skat : 0;
          DecisionContext ctx = make_discard_declare_context(I.deck, d.seat, hand12,
                                                             I.picked_up, I.winning_bid);
          Action obs = Action::make_discard_declare(discard, d.declaration);
          logp = std::log(
              observed_action_probability(policy, ctx, ObservedAction::exact(obs)));
          skipped = false;
          break;
        }
        case DecisionKind::kPlayCard: {
          // Replay the trick structure whether or not we evaluate, to keep
          // hands and leads in sync.
          int actor = d.seat;
          Card c = d.card;
          if (evaluate) {
            DecisionContext ctx;
            ctx.kind = DecisionKind::kPlayCard;
            ctx.deck = I.deck;
            ctx.actor = static_cast<int8_t>(actor);
            ctx.hand = hands[actor];
            ctx.soloist = I.soloist;
            ctx.picked_up = I.picked_up;
            ctx.has_declaration = true;
            ctx.declaration = I.declaration;
            ctx.winning_bid = I.winning_bid;
            ctx.trick_no = trick_no;
            ctx.trick_len = trick_len;
            ctx.trick_leader = static_cast<int8_t>(trick_leader);
            ctx.trick_cards = trick_cards;
            ctx.played_mask = played;
            if (!(hands[actor] & c.mask())) {
              logp = kNegInf;  // hypothesis cannot produce the observed play
            } else {
              logp = std::log(
                  observed_action_probability(policy, ctx, ObservedAction::exact(
                                                               Action::make_play(c))));
            }
            skipped = false;
          }
          hands[actor] &= ~c.mask();
          played |= c.mask();
          trick_cards[trick_len++] = c;
          if (trick_len == kNumPlayers) {
            trick_leader = trick_winner(trick_cards, trick_leader, I.declaration.kind);
            trick_len = 0;
            ++trick_no;
          }
          break;
        }
      }
      if (terms) terms->push_back(Term{&d, logp, skipped});
      total += logp;
      if (total == kNegInf && !terms) return kNegInf;
    }
    return total;
  }

  double interval_probability(const Policy& policy, const DecisionContext& ctx, int lo,
                              int hi) const {
    std::vector<double> probs = policy.action_probs(ctx, bid_actions_);
    // bid_actions_[0] is pass (extended index -1), then the ladder ascending.
    double total = 0.0;
    for (int ext = lo; ext <= hi; ++ext) {
      size_t i = static_cast<size_t>(ext + 1);
      if (i < probs.size()) total += probs[i];
    }
    return total;
  }

 private:
  const InfoSet& infoset_;
  std::vector<ObservedDecision> decisions_;
  std::vector<Action> bid_actions_;
};

// One-off single-world reach weight; estimators use ReachEvaluator directly.
inline double reach_weight(const WorldState& world, const InfoSet& I, const Policy& policy) {
  WorldSpace space(I);
  SKAT_RULE(space.consistent(world.config), "inconsistent world");
  ReachEvaluator eval(I);
  return std::exp(eval.log_reach(resolve_world(I, world.config, world.pre_discard_skat),
                                 policy));
}

// Product of independent per-card location probabilities; the independence
// assumption is exactly what this variant is meant to exhibit.
inline double log_cli_weight(const InfoSet& I, const WorldConfiguration& cfg,
                             const CardLocationMarginals& marginals) {
  double total = 0.0;
  Hand(I.unseen_mask).for_each([&](Card c) {
    int loc = kLocSkat;
    for (int p = 0; p < kNumPlayers; ++p)
      if (cfg.seat_cards[p] & c.mask()) loc = p;
    double p = marginals.p[c.index][loc];
    total += p > 0 ? std::log(p) : kNegInf;
  });
  return total;
}

inline double log_ki_weight(const InfoSet& I, const ResolvedWorld& w, const KiTables& tables,
                            const std::vector<ObservedDecision>& decisions) {
  double total = 0.0;
  size_t ladder_size = bid_ladder(I.deck).size();
  for (int seat = 0; seat < kNumPlayers; ++seat) {
    if (seat == I.viewer) continue;
    bool is_soloist = seat == I.soloist;
    uint32_t hand = is_soloist && I.picked_up ? w.soloist_union : w.dealt[seat];
    int hb = KiTables::hand_bucket(hand, I.declaration.kind, I.deck);
    int bb = ki_bid_bucket(decisions, seat, ladder_size);
    total += std::log(tables.weight(is_soloist, I.declaration.kind, bb, hb));
  }
  return total;
}

inline CardLocationMarginals marginals_from_weights(const InfoSet& I,
                                                    const WeightedWorlds& ww) {
  CardLocationMarginals m;
  for (size_t i = 0; i < ww.worlds.size(); ++i) {
    const WorldConfiguration& cfg = ww.worlds[i].config;
    double w = ww.weights[i];
    for (int p = 0; p < kNumPlayers; ++p)
      Hand(cfg.seat_cards[p]).for_each([&](Card c) { m.p[c.index][p] += w; });
    Hand(cfg.skat_cards).for_each([&](Card c) { m.p[c.index][kLocSkat] += w; });
  }
  // Cards the viewer can place exactly get delta marginals.
  Hand(I.deck.card_mask & ~I.unseen_mask).for_each([&](Card c) {
    if (I.own_current & c.mask()) {
      m.p[c.index][I.viewer] = 1.0;
    } else if (I.skat_known() && (I.known_skat & c.mask())) {
      m.p[c.index][kLocSkat] = 1.0;
    } else if (I.soloist_hand_exposed() && (I.exposed_current() & c.mask())) {
      m.p[c.index][I.soloist] = 1.0;
    }
  });
  return m;
}

namespace detail {

inline void normalize_or_fallback(WeightedWorlds& ww) {
  double total = 0.0;
  for (double w : ww.weights) total += w;
  if (total <= 0.0) {
    // A fitted deterministic policy can zero out every sampled world; the
    // player still has to move, so fall back to uniform and count it.
    ++ww.zero_mass_fallbacks;
    double u = 1.0 / static_cast<double>(ww.weights.size());
    for (double& w : ww.weights) w = u;
    return;
  }
  for (double& w : ww.weights) w /= total;
}

inline void weights_from_logs(WeightedWorlds& ww, std::vector<double>& logs) {
  double mx = kNegInf;
  for (double l : logs) mx = std::max(mx, l);
  if (mx == kNegInf) {
    std::fill(ww.weights.begin(), ww.weights.end(), 0.0);
  } else {
    for (size_t i = 0; i < logs.size(); ++i)
      ww.weights[i] = logs[i] == kNegInf ? 0.0 : std::exp(logs[i] - mx);
  }
  normalize_or_fallback(ww);
}

}  // namespace detail

// Algorithm core: sample k worlds from the information set, attach
// per-variant weights, normalize over the sample. The true world is required
// by the cheating variant and injected if the draw missed it.
inline WeightedWorlds estimate_dist(const WorldSpace& space, const InferenceSpec& spec,
                                    uint64_t seed, const WorldState* truth = nullptr) {
  const InfoSet& I = space.infoset();
  SKAT_RULE(space.feasible(), "contradictory observations: no consistent world");
  WeightedWorlds ww;
  ww.variant = spec.id;
  ww.state_level = spec.id == InferenceVariantId::kPIF;
  ww.total_count = ww.state_level ? space.state_count() : space.config_count();

  uint64_t budget = std::max<uint64_t>(1, spec.sample_budget);
  std::vector<uint64_t> ranks = space.sample_ranks(budget, seed, ww.total_count);
  if (spec.id == InferenceVariantId::kCheat) {
    SKAT_RULE(truth != nullptr, "cheating inference needs the true world");
    uint64_t truth_rank =
        ww.state_level ? space.rank_state(*truth) : space.rank_config(truth->config);
    if (!std::binary_search(ranks.begin(), ranks.end(), truth_rank)) {
      ranks.back() = truth_rank;
      std::sort(ranks.begin(), ranks.end());
    }
  }

  ww.worlds.resize(ranks.size());
  parallel_for(ranks.size(), spec.workers, [&](size_t i) {
    ww.worlds[i] = ww.state_level ? space.unrank_state(ranks[i])
                                  : WorldState{space.unrank_config(ranks[i]), 0};
  });
  ww.weights.assign(ranks.size(), 0.0);

  switch (spec.id) {
    case InferenceVariantId::kNI: {
      std::fill(ww.weights.begin(), ww.weights.end(), 1.0);
      detail::normalize_or_fallback(ww);
      break;
    }
    case InferenceVariantId::kCheat: {
      uint64_t truth_rank =
          ww.state_level ? space.rank_state(*truth) : space.rank_config(truth->config);
      for (size_t i = 0; i < ranks.size(); ++i)
        ww.weights[i] = ranks[i] == truth_rank ? 1.0 : 0.0;
      detail::normalize_or_fallback(ww);
      break;
    }
    case InferenceVariantId::kPI:
    case InferenceVariantId::kPIF: {
      SKAT_RULE(spec.policy != nullptr, "policy inference needs a policy");
      ReachEvaluator eval(I);
      std::vector<double> logs(ranks.size());
      parallel_for(ranks.size(), spec.workers, [&](size_t i) {
        logs[i] = eval.log_reach(
            resolve_world(I, ww.worlds[i].config, ww.worlds[i].pre_discard_skat),
            *spec.policy);
      });
      detail::weights_from_logs(ww, logs);
      break;
    }
    case InferenceVariantId::kCLI: {
      std::shared_ptr<const CardLocationMarginals> marginals = spec.marginals;
      if (spec.marginal_source == InferenceSpec::MarginalSource::kPolicyPosterior) {
        SKAT_RULE(spec.policy != nullptr, "posterior marginals need a policy");
        InferenceSpec inner = spec;
        inner.id = InferenceVariantId::kPI;
        inner.sample_budget = spec.marginal_budget;
        WeightedWorlds base = estimate_dist(space, inner, mix_seed(seed, 0x636c69ULL));
        marginals = std::make_shared<CardLocationMarginals>(marginals_from_weights(I, base));
      } else if (spec.marginal_source == InferenceSpec::MarginalSource::kUniform) {
        InferenceSpec inner;
        inner.id = InferenceVariantId::kNI;
        inner.sample_budget = spec.marginal_budget;
        inner.workers = spec.workers;
        WeightedWorlds base = estimate_dist(space, inner, mix_seed(seed, 0x636c69ULL));
        marginals = std::make_shared<CardLocationMarginals>(marginals_from_weights(I, base));
      }
      SKAT_RULE(marginals != nullptr, "card-location inference needs marginals");
      std::vector<double> logs(ranks.size());
      parallel_for(ranks.size(), spec.workers, [&](size_t i) {
        logs[i] = log_cli_weight(I, ww.worlds[i].config, *marginals);
      });
      detail::weights_from_logs(ww, logs);
      break;
    }
    case InferenceVariantId::kKI: {
      SKAT_RULE(spec.ki != nullptr, "KI needs fitted tables");
      ReachEvaluator eval(I);
      std::vector<double> logs(ranks.size());
      parallel_for(ranks.size(), spec.workers, [&](size_t i) {
        logs[i] = log_ki_weight(I, resolve_world(I, ww.worlds[i].config, 0), *spec.ki,
                                eval.decisions());
      });
      detail::weights_from_logs(ww, logs);
      break;
    }
  }
  return ww;
}

inline WeightedWorlds estimate_dist(const InfoSet& I, const InferenceSpec& spec, uint64_t seed,
                                    const WorldState* truth = nullptr) {
  WorldSpace space(I);
  return estimate_dist(space, spec, seed, truth);
}

}  // namespace skat
