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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "skat/inference.hpp"
#include "skat/stats.hpp"

namespace skat {

// The four game-type classes the TSSR evaluation is reported over.
inline std::string game_class(const GameType& gt) {
  if (gt.kind == GameKind::kGrand) return "grand";
  if (gt.kind == GameKind::kNull) return gt.ouvert ? "null_ouvert" : "null";
  return "suit";
}

// How many times likelier the true world is under the inference weights than
// under uniform sampling. Worlds are card configurations: a state-level
// distribution is marginalized onto its configurations first, so every
// variant is measured on the same scale and curves close at 1 when a single
// configuration remains. Requires a full enumeration, where every rank sits
// at its own index.
inline double tssr_direct(const WeightedWorlds& ww, const WorldSpace& space,
                          const WorldState& truth) {
  SKAT_RULE(ww.sampled_count() == ww.total_count,
            "direct TSSR needs the fully enumerated distribution");
  uint64_t config_rank = space.rank_config(truth.config);
  if (!ww.state_level) {
    return ww.weights[config_rank] * static_cast<double>(ww.total_count);
  }
  uint64_t mult = space.infoset().state_multiplicity();
  double mass = 0.0;
  for (uint64_t j = 0; j < mult; ++j) mass += ww.weights[config_rank * mult + j];
  return mass * static_cast<double>(space.config_count());
}

struct BinomialSpec {
  uint64_t n = 20000;       // sample budget modelled by the estimator
  double threshold = 1e-7;  // binomial mass below this is dropped
};

namespace detail {

// log of Binomial(k; n, p), computed incrementally by the caller.
struct LogBinomWalker {
  uint64_t n;
  double log_p, log_q;
  double log_pmf;  // at current k
  uint64_t k = 0;

  LogBinomWalker(uint64_t n_, double p) : n(n_), log_p(std::log(p)), log_q(std::log1p(-p)) {
    log_pmf = static_cast<double>(n) * log_q;  // k = 0
  }

  void advance() {
    // C(n,k+1)/C(n,k) = (n-k)/(k+1)
    log_pmf += std::log(static_cast<double>(n - k)) - std::log(static_cast<double>(k + 1)) +
               log_p - log_q;
    ++k;
  }
};

}  // namespace detail

// Sampled-regime TSSR problem layout. Sampling units are the variant's
// worlds (configurations, or states for full policy inference); the reported
// ratio is always at configuration level, so a unit's mass counts toward the
// truth when its rank falls in the truth configuration's contiguous block.
struct SampledTssrLayout {
  uint64_t total_units = 0;   // size of the sampled index space
  uint64_t report_groups = 0; // configuration count, the |I| multiplier
  uint64_t truth_rank = 0;    // unit rank of the true world
  uint64_t group_lo = 0;      // unit-rank interval of the truth configuration
  uint64_t group_hi = 0;      // inclusive
};

// The estimator used when the space is too large to enumerate: the true
// world is injected k times into an otherwise without-replacement uniform
// sample of n units, k weighted by its binomial mass, each injected copy
// contributing its share of the normalized mass. When n covers the whole
// space the value is computed directly over the full enumeration instead.
// `log_weight` maps a unit rank to the variant's unnormalized log weight.
template <typename LogWeightFn>
double tssr_sampled_core(const WorldSpace& space, const SampledTssrLayout& lay,
                         LogWeightFn&& log_weight, const BinomialSpec& spec, uint64_t seed) {
  SKAT_RULE(lay.total_units > 1, "sampled TSSR needs at least two worlds");
  auto in_group = [&](uint64_t r) { return r >= lay.group_lo && r <= lay.group_hi; };

  if (spec.n >= lay.total_units) {
    // Small space: sample everything and compute the ratio directly.
    double mx = kNegInf;
    std::vector<double> logs(lay.total_units);
    for (uint64_t r = 0; r < lay.total_units; ++r) {
      logs[r] = log_weight(r);
      mx = std::max(mx, logs[r]);
    }
    if (mx == kNegInf) return 1.0;  // uniform fallback: ratio one by symmetry
    double total = 0.0, group = 0.0;
    for (uint64_t r = 0; r < lay.total_units; ++r) {
      if (logs[r] == kNegInf) continue;
      double w = std::exp(logs[r] - mx);
      total += w;
      if (in_group(r)) group += w;
    }
    return group / total * static_cast<double>(lay.report_groups);
  }

  double p = 1.0 / static_cast<double>(lay.total_units);
  double log_wt = log_weight(lay.truth_rank);
  detail::LogBinomWalker bin(spec.n, p);
  double acc = 0.0;
  double log_threshold = std::log(spec.threshold);
  bool seen_significant = false;
  for (uint64_t k = 0; k <= spec.n; ++k) {
    if (k > 0) bin.advance();
    if (bin.log_pmf < log_threshold) {
      if (seen_significant) break;  // past the mode, nothing more to add
      continue;
    }
    seen_significant = true;
    if (k == 0 && lay.group_lo == lay.group_hi) continue;  // nothing can land in the group
    uint64_t others = std::min<uint64_t>(spec.n - k, lay.total_units - 1);
    std::vector<uint64_t> ranks = space.sample_ranks(others, mix_seed(seed, k),
                                                     lay.total_units,
                                                     /*skip=*/lay.truth_rank);
    double injected = k > 0 ? log_wt + std::log(static_cast<double>(k)) : kNegInf;
    double mx = injected;
    std::vector<double> logs;
    logs.reserve(ranks.size());
    size_t group_others = 0;
    for (uint64_t r : ranks) {
      double lw = log_weight(r);
      logs.push_back(lw);
      if (lw > mx) mx = lw;
      if (in_group(r)) ++group_others;
    }
    double mass;
    if (mx == kNegInf) {
      // Every sampled world has zero weight: uniform fallback over the
      // multiset, injected copies and group members included.
      mass = static_cast<double>(k + group_others) / static_cast<double>(k + ranks.size());
    } else {
      double true_mass = injected == kNegInf ? 0.0 : std::exp(injected - mx);
      double denom = true_mass;
      for (size_t i = 0; i < ranks.size(); ++i) {
        if (logs[i] == kNegInf) continue;
        double w = std::exp(logs[i] - mx);
        denom += w;
        if (in_group(ranks[i])) true_mass += w;
      }
      mass = true_mass > 0 ? true_mass / denom : 0.0;
    }
    acc += std::exp(bin.log_pmf) * mass;
  }
  return static_cast<double>(lay.report_groups) * acc;
}

// Variant-level sampled TSSR. CLI marginals are derived once, outside the
// injection loop.
inline double tssr_sampled(const InfoSet& I, const InferenceSpec& v, const WorldState& truth,
                           const BinomialSpec& spec, uint64_t seed) {
  WorldSpace space(I);
  bool state_level = v.id == InferenceVariantId::kPIF;
  SampledTssrLayout lay;
  lay.report_groups = space.config_count();
  uint64_t config_rank = space.rank_config(truth.config);
  if (state_level) {
    uint64_t mult = I.state_multiplicity();
    lay.total_units = space.state_count();
    lay.truth_rank = space.rank_state(truth);
    lay.group_lo = config_rank * mult;
    lay.group_hi = config_rank * mult + mult - 1;
  } else {
    lay.total_units = space.config_count();
    lay.truth_rank = config_rank;
    lay.group_lo = lay.group_hi = config_rank;
  }

  switch (v.id) {
    case InferenceVariantId::kNI: {
      auto w = [](uint64_t) { return 0.0; };
      return tssr_sampled_core(space, lay, w, spec, seed);
    }
    case InferenceVariantId::kCheat: {
      auto w = [&](uint64_t r) { return r == lay.truth_rank ? 0.0 : kNegInf; };
      return tssr_sampled_core(space, lay, w, spec, seed);
    }
    case InferenceVariantId::kPI:
    case InferenceVariantId::kPIF: {
      SKAT_RULE(v.policy != nullptr, "policy inference needs a policy");
      ReachEvaluator eval(I);
      auto w = [&](uint64_t r) {
        WorldState st = state_level ? space.unrank_state(r)
                                    : WorldState{space.unrank_config(r), 0};
        return eval.log_reach(resolve_world(I, st.config, st.pre_discard_skat), *v.policy);
      };
      return tssr_sampled_core(space, lay, w, spec, seed);
    }
    case InferenceVariantId::kCLI: {
      std::shared_ptr<const CardLocationMarginals> marginals = v.marginals;
      if (v.marginal_source != InferenceSpec::MarginalSource::kProvided) {
        InferenceSpec inner = v;
        inner.id = v.marginal_source == InferenceSpec::MarginalSource::kUniform
                       ? InferenceVariantId::kNI
                       : InferenceVariantId::kPI;
        inner.sample_budget = v.marginal_budget;
        WeightedWorlds base = estimate_dist(space, inner, mix_seed(seed, 0x6d61ULL));
        marginals =
            std::make_shared<CardLocationMarginals>(marginals_from_weights(I, base));
      }
      auto w = [&, marginals](uint64_t r) {
        return log_cli_weight(I, space.unrank_config(r), *marginals);
      };
      return tssr_sampled_core(space, lay, w, spec, seed);
    }
    case InferenceVariantId::kKI: {
      SKAT_RULE(v.ki != nullptr, "KI needs fitted tables");
      ReachEvaluator eval(I);
      auto w = [&](uint64_t r) {
        return log_ki_weight(I, resolve_world(I, space.unrank_config(r), 0), *v.ki,
                             eval.decisions());
      };
      return tssr_sampled_core(space, lay, w, spec, seed);
    }
  }
  SKAT_CHECK(false);
  return 0.0;
}

// One instrumented decision point.
struct TssrSample {
  std::string variant;
  std::string game_class;
  bool soloist_role = false;
  int card_number = 0;  // cards already played when the decision was taken
  double tssr = 1.0;
  uint64_t world_count = 0;
  uint64_t game_id = 0;
};

struct NamedVariant {
  std::string name;
  InferenceSpec spec;
};

struct InstrumentOptions {
  std::vector<NamedVariant> variants;
  uint64_t direct_cap = 1u << 21;  // enumerate and compute directly below this
  BinomialSpec sampled_spec;
  bool instrument_soloist = true;
  bool instrument_defender = true;
  uint64_t seed = 0;
};

// Walks one finished game and computes, at every decision of the soloist and
// of one fixed defender, the TSSR of each variant. Small spaces are evaluated
// exactly over the full enumeration; larger ones through the sampled
// estimator.
inline std::vector<TssrSample> instrument_game_tssr(const GameState& final_state,
                                                    const InstrumentOptions& opt,
                                                    uint64_t game_id) {
  std::vector<TssrSample> out;
  if (!final_state.has_declaration) return out;
  int defender = next_seat(final_state.soloist);
  std::string gclass = game_class(final_state.declaration);
  GameState s = reconstruct_at_play(final_state, 0);
  for (int t = 0; t < final_state.play_len; ++t) {
    int mover = final_state.play_seq[t].seat;
    bool is_soloist = mover == final_state.soloist;
    bool instrumented = (is_soloist && opt.instrument_soloist) ||
                        (mover == defender && opt.instrument_defender);
    if (instrumented) {
      InfoSet I = InfoSet::from_state(s, mover);
      WorldSpace space(I);
      WorldState truth = true_world(s, I);
      for (const NamedVariant& nv : opt.variants) {
        bool state_level = nv.spec.id == InferenceVariantId::kPIF;
        uint64_t total = state_level ? space.state_count() : space.config_count();
        TssrSample sample;
        sample.variant = nv.name;
        sample.game_class = gclass;
        sample.soloist_role = is_soloist;
        sample.card_number = t;
        // TSSR is a configuration-level ratio regardless of what the variant
        // samples, so the world count reported with it is the configuration
        // count.
        sample.world_count = space.config_count();
        sample.game_id = game_id;
        uint64_t seed = mix_seed(opt.seed, game_id, static_cast<uint64_t>(t),
                                 fnv1a(nv.name));
        if (total <= opt.direct_cap) {
          InferenceSpec full = nv.spec;
          full.sample_budget = total;
          WeightedWorlds ww = estimate_dist(space, full, seed, &truth);
          sample.tssr = tssr_direct(ww, space, truth);
        } else {
          sample.tssr = tssr_sampled(I, nv.spec, truth, opt.sampled_spec, seed);
        }
        out.push_back(std::move(sample));
      }
    }
    s = apply_action(s, Action::make_play(final_state.play_seq[t].card));
  }
  return out;
}

struct CurvePoint {
  std::string variant;
  std::string game_class;
  bool soloist_role = false;
  int card_number = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  uint64_t n_obs = 0;
};

// Aggregates samples into mean/standard-error curves per
// (variant, game class, role, card number). Games are the independent units;
// each game contributes at most one observation per group.
inline std::vector<CurvePoint> tssr_curve(const std::vector<TssrSample>& samples) {
  std::map<std::tuple<std::string, std::string, bool, int>, std::vector<double>> groups;
  for (const TssrSample& s : samples) {
    groups[{s.variant, s.game_class, s.soloist_role, s.card_number}].push_back(s.tssr);
  }
  std::vector<CurvePoint> out;
  for (const auto& [key, values] : groups) {
    CurvePoint p;
    p.variant = std::get<0>(key);
    p.game_class = std::get<1>(key);
    p.soloist_role = std::get<2>(key);
    p.card_number = std::get<3>(key);
    p.n_obs = values.size();
    p.mean = mean_of(values);
    p.stderr_mean = values.size() > 1
                        ? std::sqrt(sample_variance(values, p.mean) /
                                    static_cast<double>(values.size()))
                        : 0.0;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace skat
