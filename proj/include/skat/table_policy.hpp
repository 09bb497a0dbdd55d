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

#include <map>
#include <string>
#include <unordered_map>

#include "skat/inference.hpp"
#include "skat/logfmt.hpp"

namespace skat {

// Bucketed context keys, scheme "v1". Card-play buckets follow the shape of
// the per-game-type feature split: game class, trick number, led-suit class,
// role, trump holding, follow flag. Actions are kept at full granularity
// (exact card, exact bid rung) so the tables can pin sharp behaviours.
namespace bucketing_v1 {

inline uint64_t hand_bucket(uint32_t hand, const DeckSpec& deck) {
  HandFeatures f = hand_features(hand, deck);
  return static_cast<uint64_t>(f.jacks) * 40 +
         static_cast<uint64_t>(std::min(f.best_suit_trumps, 7)) * 5 +
         static_cast<uint64_t>(std::min(f.aces + f.tens, 4));
}

inline uint64_t context_key(const DecisionContext& ctx) {
  if (is_max_bid_kind(ctx.kind) || ctx.kind == DecisionKind::kPickupOrHand) {
    return hand_bucket(ctx.hand, ctx.deck);
  }
  if (ctx.kind == DecisionKind::kDiscardAndDeclare) {
    return hand_bucket(ctx.hand, ctx.deck) * 2 + (ctx.picked_up ? 1 : 0);
  }
  // Card play.
  const GameType& gt = ctx.declaration;
  uint64_t kind_class = gt.kind == GameKind::kGrand ? 1
                        : gt.kind == GameKind::kNull ? (gt.ouvert ? 3 : 2)
                                                     : 0;
  uint64_t led = 0;  // leading
  uint64_t holds_led = 0;
  if (ctx.trick_len > 0) {
    int es = effective_suit(ctx.trick_cards[0], gt.kind);
    led = es == 4 ? 1 : 2;
    holds_led = (ctx.hand & effective_suit_mask(es, gt.kind, ctx.deck)) ? 1 : 0;
  }
  uint64_t role = ctx.actor == ctx.soloist ? 1 : 0;
  uint64_t trumps = std::min(3, std::popcount(ctx.hand & trump_mask(gt.kind, ctx.deck)));
  uint64_t key = kind_class;
  key = key * 12 + ctx.trick_no;
  key = key * 3 + led;
  key = key * 2 + holds_led;
  key = key * 2 + role;
  key = key * 4 + trumps;
  return key;
}

inline uint32_t action_key(const DecisionContext& ctx, const Action& a) {
  switch (ctx.kind) {
    case DecisionKind::kMaxBidBidder:
    case DecisionKind::kMaxBidAnswerer:
    case DecisionKind::kMaxBidContinue:
    case DecisionKind::kMaxBidContinueAnswer:
      return static_cast<uint32_t>(
          extended_ladder_index(bid_ladder(ctx.deck), a) + 1);
    case DecisionKind::kPickupOrHand:
      return a.kind == ActionKind::kPickupSkat ? 0 : 1;
    case DecisionKind::kDiscardAndDeclare: {
      const GameType& gt = a.declaration;
      uint32_t decl = static_cast<uint32_t>(gt.kind) * 8 + (gt.ouvert ? 4 : 0) +
                      (gt.schneider_announced ? 2 : 0) + (gt.schwarz_announced ? 1 : 0);
      uint32_t pts_bucket = std::min(3, points_in(a.discard_mask) / 5);
      uint32_t trumps_buried =
          std::min(2, std::popcount(a.discard_mask & trump_mask(gt.kind, ctx.deck)));
      return (decl * 4 + pts_bucket) * 3 + trumps_buried;
    }
    case DecisionKind::kPlayCard:
      return a.card.index;
  }
  return 0;
}

}  // namespace bucketing_v1

// Frequency-table policy fitted from game logs: per decision kind, a map
// from context bucket to additive-smoothed action counts. Unseen buckets
// degrade to the uniform distribution.
class TablePolicy final : public Policy {
 public:
  using Row = std::map<uint32_t, double>;
  using Table = std::map<uint64_t, Row>;

  explicit TablePolicy(double alpha = 1.0, std::string bucketing = "v1")
      : alpha_(alpha), bucketing_(std::move(bucketing)) {
    SKAT_RULE(bucketing_ == "v1", "unknown bucketing scheme: ", bucketing_);
  }

  std::vector<double> action_probs(const DecisionContext& ctx,
                                   const std::vector<Action>& legal) const override {
    SKAT_CHECK(!legal.empty());
    std::vector<double> w(legal.size(), alpha_);
    const Table& table = tables_[static_cast<int>(ctx.kind)];
    auto row = table.find(bucketing_v1::context_key(ctx));
    double total = 0.0;
    if (row != table.end()) {
      for (size_t i = 0; i < legal.size(); ++i) {
        auto hit = row->second.find(bucketing_v1::action_key(ctx, legal[i]));
        if (hit != row->second.end()) w[i] += hit->second;
      }
    }
    for (double x : w) total += x;
    if (total <= 0.0) return std::vector<double>(legal.size(), 1.0 / legal.size());
    for (double& x : w) x /= total;
    return w;
  }

  std::string name() const override { return "table(" + bucketing_ + ")"; }

  void observe(const DecisionContext& ctx, const Action& action, double count = 1.0) {
    tables_[static_cast<int>(ctx.kind)][bucketing_v1::context_key(ctx)]
           [bucketing_v1::action_key(ctx, action)] += count;
  }

  // Total observations recorded in the context's bucket.
  double context_visits(const DecisionContext& ctx) const {
    const Table& table = tables_[static_cast<int>(ctx.kind)];
    auto row = table.find(bucketing_v1::context_key(ctx));
    if (row == table.end()) return 0.0;
    double total = 0.0;
    for (const auto& [_, c] : row->second) total += c;
    return total;
  }

  double alpha() const { return alpha_; }
  const std::string& bucketing() const { return bucketing_; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["format"] = "skat-table-policy";
    j["version"] = 1;
    j["bucketing"] = bucketing_;
    j["alpha"] = alpha_;
    nlohmann::json tables;
    for (int k = 0; k < kNumDecisionKinds; ++k) {
      if (tables_[k].empty()) continue;
      nlohmann::json tj;
      for (const auto& [bucket, row] : tables_[k]) {
        nlohmann::json rj;
        for (const auto& [action, count] : row) rj[std::to_string(action)] = count;
        tj[std::to_string(bucket)] = std::move(rj);
      }
      tables[decision_kind_name(static_cast<DecisionKind>(k))] = std::move(tj);
    }
    j["tables"] = std::move(tables);
    return j;
  }

  static TablePolicy from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "skat-table-policy")
      throw DataError("not a table policy file");
    TablePolicy p(j.at("alpha").get<double>(), j.at("bucketing").get<std::string>());
    for (int k = 0; k < kNumDecisionKinds; ++k) {
      const char* name = decision_kind_name(static_cast<DecisionKind>(k));
      if (!j.at("tables").contains(name)) continue;
      for (const auto& [bucket, row] : j.at("tables").at(name).items()) {
        for (const auto& [action, count] : row.items()) {
          p.tables_[k][std::stoull(bucket)][static_cast<uint32_t>(std::stoul(action))] =
              count.get<double>();
        }
      }
    }
    return p;
  }

 private:
  double alpha_;
  std::string bucketing_;
  std::array<Table, kNumDecisionKinds> tables_{};
};

struct FitDiagnostics {
  uint64_t games = 0;
  uint64_t declared_games = 0;
  uint64_t decisions = 0;
  uint64_t exact_bid_observations = 0;
  uint64_t intent_observations = 0;
};

// Fits the frequency tables from logged games. Max-bid decisions use the
// recorded intents when the log carries them; otherwise only passes (which
// pin the intent exactly) are counted and surviving bids are left censored.
inline TablePolicy fit_table_policy(const std::vector<GameLog>& logs, double alpha = 1.0,
                                    const std::string& bucketing = "v1",
                                    FitDiagnostics* diag = nullptr) {
  TablePolicy policy(alpha, bucketing);
  FitDiagnostics local;
  for (const GameLog& g : logs) {
    ++local.games;
    GameState s = replay_log(g, /*upto_plays=*/0);

    // Auction observations exist whether or not the deal was played out;
    // dropping passed-in games would bias the pass rates down.
    if (!g.intents.empty()) {
      for (const GameLog::Intent& it : g.intents) {
        DecisionContext ctx =
            make_bid_context(g.deck, it.kind, it.seat, g.dealt_hands[it.seat], 0);
        Action a = it.value == 0 ? Action::make_pass() : Action::make_bid(it.value);
        policy.observe(ctx, a);
        ++local.intent_observations;
        ++local.decisions;
      }
    } else {
      const std::vector<int>& ladder = bid_ladder(g.deck);
      for (const ObservedDecision& d : parse_auction(s.bid_seq.data(), s.bid_len, g.deck)) {
        if (d.lo != d.hi) continue;  // censored: the survivor's intent is unknown
        DecisionContext ctx =
            make_bid_context(g.deck, d.kind, d.seat, g.dealt_hands[d.seat], d.floor_value);
        Action a = d.lo < 0 ? Action::make_pass() : Action::make_bid(ladder[d.lo]);
        policy.observe(ctx, a);
        ++local.exact_bid_observations;
        ++local.decisions;
      }
    }

    if (!g.declared) continue;
    ++local.declared_games;

    {
      DecisionContext ctx = make_pickup_context(g.deck, s.soloist,
                                                g.dealt_hands[s.soloist], s.winning_bid);
      policy.observe(ctx, g.declaration.hand ? Action::make_hand() : Action::make_pickup());
      ++local.decisions;
    }
    {
      uint32_t hand12 = g.declaration.hand ? g.dealt_hands[s.soloist]
                                           : (g.dealt_hands[s.soloist] | g.dealt_skat);
      DecisionContext ctx = make_discard_declare_context(
          g.deck, s.soloist, hand12, !g.declaration.hand, s.winning_bid);
      policy.observe(ctx, Action::make_discard_declare(g.discard, g.declaration));
      ++local.decisions;
    }
    for (Card c : g.cardplay) {
      DecisionContext ctx = play_context_from_state(s);
      policy.observe(ctx, Action::make_play(c));
      ++local.decisions;
      s = apply_action(s, Action::make_play(c));
    }
  }
  if (diag) *diag = local;
  return policy;
}

// Fits the bid/declaration tables used by the table-based sampler variant.
inline KiTables fit_ki_tables(const std::vector<GameLog>& logs, double alpha = 1.0) {
  KiTables tables;
  tables.alpha = alpha;
  for (const GameLog& g : logs) {
    if (!g.declared) continue;
    GameState s = replay_log(g, /*upto_plays=*/0);
    std::vector<ObservedDecision> decisions = parse_auction(s.bid_seq.data(), s.bid_len, g.deck);
    size_t ladder_size = bid_ladder(g.deck).size();
    for (int seat = 0; seat < kNumPlayers; ++seat) {
      bool is_soloist = seat == s.soloist;
      uint32_t hand = is_soloist && !g.declaration.hand
                          ? (g.dealt_hands[seat] | g.dealt_skat)
                          : g.dealt_hands[seat];
      int hb = KiTables::hand_bucket(hand, g.declaration.kind, g.deck);
      int bb = ki_bid_bucket(decisions, seat, ladder_size);
      tables.rows[KiTables::row_key(is_soloist, g.declaration.kind, bb)][hb] += 1.0;
    }
  }
  return tables;
}

inline nlohmann::json ki_tables_to_json(const KiTables& t) {
  nlohmann::json j;
  j["format"] = "skat-ki-tables";
  j["version"] = 1;
  j["alpha"] = t.alpha;
  nlohmann::json rows;
  std::map<uint32_t, std::array<double, KiTables::kHandBuckets>> sorted(t.rows.begin(),
                                                                        t.rows.end());
  for (const auto& [key, counts] : sorted) {
    nlohmann::json arr = nlohmann::json::array();
    for (double c : counts) arr.push_back(c);
    rows[std::to_string(key)] = std::move(arr);
  }
  j["rows"] = std::move(rows);
  return j;
}

inline KiTables ki_tables_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "skat-ki-tables") throw DataError("not a KI tables file");
  KiTables t;
  t.alpha = j.at("alpha").get<double>();
  for (const auto& [key, arr] : j.at("rows").items()) {
    std::array<double, KiTables::kHandBuckets> counts{};
    SKAT_RULE(arr.size() == counts.size(), "bad KI row width");
    for (size_t i = 0; i < counts.size(); ++i) counts[i] = arr[i].get<double>();
    t.rows[static_cast<uint32_t>(std::stoul(key))] = counts;
  }
  return t;
}

}  // namespace skat
