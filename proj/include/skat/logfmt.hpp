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

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skat/game.hpp"
#include "skat/policy.hpp"

namespace skat {

// One game as stored in a JSON-lines log. `deal` is a 32-character string
// indexed by card: '0'/'1'/'2' seat, 'S' skat, '-' not in this deck. Bids are
// compact tokens ("b18", "y", "p") in auction order. `intents` optionally
// records the max-bid willingness values drawn by a self-play generator.
struct GameLog {
  DeckSpec deck;
  std::array<uint32_t, kNumPlayers> dealt_hands{};
  uint32_t dealt_skat = 0;
  std::vector<Action> bid_actions;
  bool declared = false;
  GameType declaration{};
  uint32_t discard = 0;  // current skat after pickup; 0 in hand games
  std::vector<Card> cardplay;
  bool has_result = false;
  GameScore result{};

  struct Intent {
    int8_t seat = -1;
    DecisionKind kind = DecisionKind::kMaxBidBidder;
    int16_t value = 0;  // 0 = pass
  };
  std::vector<Intent> intents;
};

namespace logfmt {

inline std::string deal_string(const GameLog& g) {
  std::string s(kDeckCards, '-');
  for (int p = 0; p < kNumPlayers; ++p)
    Hand(g.dealt_hands[p]).for_each([&](Card c) { s[c.index] = static_cast<char>('0' + p); });
  Hand(g.dealt_skat).for_each([&](Card c) { s[c.index] = 'S'; });
  return s;
}

inline std::string bid_token(const Action& a) {
  switch (a.kind) {
    case ActionKind::kBid:
      return "b" + std::to_string(a.bid);
    case ActionKind::kAccept:
      return "y";
    case ActionKind::kPass:
      return "p";
    default:
      SKAT_CHECK(false, "not a bid action");
  }
  return {};
}

inline Action bid_from_token(const std::string& t) {
  if (t == "y") return Action::make_accept();
  if (t == "p") return Action::make_pass();
  if (!t.empty() && t[0] == 'b') return Action::make_bid(std::stoi(t.substr(1)));
  throw DataError("bad bid token: " + t);
}

inline std::string cards_string(uint32_t mask) {
  std::string out;
  Hand(mask).for_each([&](Card c) {
    if (!out.empty()) out += ' ';
    out += card_to_string(c);
  });
  return out;
}

inline uint32_t cards_from_string(const std::string& s) {
  uint32_t mask = 0;
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] == ' ') {
      ++i;
      continue;
    }
    if (i + 2 > s.size()) throw DataError("truncated card list: " + s);
    mask |= card_from_string(s.substr(i, 2)).mask();
    i += 2;
  }
  return mask;
}

}  // namespace logfmt

inline nlohmann::json game_log_to_json(const GameLog& g) {
  nlohmann::json j;
  j["deal"] = logfmt::deal_string(g);
  nlohmann::json bids = nlohmann::json::array();
  for (const Action& a : g.bid_actions) bids.push_back(logfmt::bid_token(a));
  j["bids"] = bids;
  if (g.declared) {
    j["declaration"] = {
        {"type", game_kind_name(g.declaration.kind)},
        {"hand", g.declaration.hand},
        {"ouvert", g.declaration.ouvert},
        {"schneider", g.declaration.schneider_announced},
        {"schwarz", g.declaration.schwarz_announced},
    };
    j["discard"] = logfmt::cards_string(g.discard);
    nlohmann::json plays = nlohmann::json::array();
    for (Card c : g.cardplay) plays.push_back(card_to_string(c));
    j["cardplay"] = plays;
  } else {
    j["declaration"] = nullptr;
    j["discard"] = "";
    j["cardplay"] = nlohmann::json::array();
  }
  if (g.has_result) {
    j["result"] = {{"score", g.result.soloist_score},
                   {"won", g.result.won},
                   {"value", g.result.game_value}};
  }
  if (!g.intents.empty()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const GameLog::Intent& it : g.intents) {
      arr.push_back({{"seat", it.seat}, {"kind", decision_kind_name(it.kind)}, {"value", it.value}});
    }
    j["intents"] = arr;
  }
  return j;
}

inline GameLog game_log_from_json(const nlohmann::json& j) {
  GameLog g;
  std::string dealstr = j.at("deal").get<std::string>();
  if (dealstr.size() != kDeckCards) throw DataError("deal string must be 32 characters");
  uint32_t mask = 0;
  for (int i = 0; i < kDeckCards; ++i) {
    char c = dealstr[i];
    if (c == '-') continue;
    mask |= 1u << i;
    if (c == 'S') {
      g.dealt_skat |= 1u << i;
    } else if (c >= '0' && c <= '2') {
      g.dealt_hands[c - '0'] |= 1u << i;
    } else {
      throw DataError("bad deal character");
    }
  }
  int h0 = std::popcount(g.dealt_hands[0]);
  if (std::popcount(g.dealt_skat) != kSkatSize || std::popcount(g.dealt_hands[1]) != h0 ||
      std::popcount(g.dealt_hands[2]) != h0) {
    throw DataError("deal does not form equal hands plus a skat");
  }
  g.deck.card_mask = mask;
  g.deck.hand_size = static_cast<uint8_t>(h0);
  for (const auto& t : j.at("bids")) g.bid_actions.push_back(logfmt::bid_from_token(t));
  if (!j.at("declaration").is_null()) {
    const auto& d = j.at("declaration");
    g.declared = true;
    g.declaration.kind = game_kind_from_name(d.at("type").get<std::string>());
    g.declaration.hand = d.at("hand").get<bool>();
    g.declaration.ouvert = d.at("ouvert").get<bool>();
    g.declaration.schneider_announced = d.at("schneider").get<bool>();
    g.declaration.schwarz_announced = d.at("schwarz").get<bool>();
    g.discard = logfmt::cards_from_string(j.at("discard").get<std::string>());
    for (const auto& t : j.at("cardplay"))
      g.cardplay.push_back(card_from_string(t.get<std::string>()));
  }
  if (j.contains("result") && !j["result"].is_null()) {
    g.has_result = true;
    g.result.soloist_score = j["result"].at("score").get<int>();
    g.result.won = j["result"].at("won").get<bool>();
    g.result.game_value = j["result"].at("value").get<int>();
  }
  if (j.contains("intents")) {
    for (const auto& it : j["intents"]) {
      GameLog::Intent in;
      in.seat = static_cast<int8_t>(it.at("seat").get<int>());
      std::string kind = it.at("kind").get<std::string>();
      bool found = false;
      for (int k = 0; k < kNumDecisionKinds; ++k) {
        if (decision_kind_name(static_cast<DecisionKind>(k)) == kind) {
          in.kind = static_cast<DecisionKind>(k);
          found = true;
        }
      }
      if (!found) throw DataError("bad intent kind: " + kind);
      in.value = static_cast<int16_t>(it.at("value").get<int>());
      g.intents.push_back(in);
    }
  }
  return g;
}

// Extracts the loggable record from a finished (or in-progress) game.
inline GameLog game_log_from_state(const GameState& s) {
  GameLog g;
  g.deck = s.deck;
  g.dealt_hands = s.dealt_hands;
  g.dealt_skat = s.dealt_skat;
  for (int i = 0; i < s.bid_len; ++i) {
    const BidEvent& e = s.bid_seq[i];
    Action a;
    a.kind = e.kind;
    a.bid = e.value;
    g.bid_actions.push_back(a);
  }
  if (s.has_declaration) {
    g.declared = true;
    g.declaration = s.declaration;
    g.discard = s.picked_up ? s.skat : 0;
    for (int i = 0; i < s.play_len; ++i) g.cardplay.push_back(s.play_seq[i].card);
  }
  if (s.phase == Phase::kTerminal) {
    g.has_result = true;
    g.result = score_game(s);
  }
  return g;
}

// Replays a log through the rules engine. `upto_plays` < 0 replays all card
// plays; 0 stops at the start of cardplay (the tournament entry point).
inline GameState replay_log(const GameLog& g, int upto_plays = -1) {
  GameState s = deal_explicit(g.dealt_hands, g.dealt_skat, g.deck);
  for (const Action& a : g.bid_actions) s = apply_action(s, a);
  if (!g.declared) {
    if (s.phase != Phase::kTerminal || !s.passed_in)
      throw DataError("log has no declaration but the auction found a soloist");
    return s;
  }
  if (s.phase != Phase::kPickupOrHand) throw DataError("auction did not terminate");
  if (g.declaration.hand) {
    if (g.discard != 0) throw DataError("hand game with a discard");
    s = apply_action(s, Action::make_hand());
  } else {
    s = apply_action(s, Action::make_pickup());
    s = apply_action(s, Action::make_discard(g.discard));
  }
  s = apply_action(s, Action::make_declare(g.declaration));
  int plays = upto_plays < 0 ? static_cast<int>(g.cardplay.size()) : upto_plays;
  for (int i = 0; i < plays; ++i) {
    s = apply_action(s, Action::make_play(g.cardplay[i]));
  }
  return s;
}

// Validated full replay: recomputes the result and checks it against the log.
inline GameState replay_and_check(const GameLog& g) {
  GameState s = replay_log(g);
  if (g.declared && !g.cardplay.empty() && s.phase != Phase::kTerminal) {
    throw DataError("cardplay ends before the game does");
  }
  if (g.has_result) {
    GameScore r = score_game(s);
    if (r.soloist_score != g.result.soloist_score || r.won != g.result.won ||
        r.game_value != g.result.game_value) {
      throw DataError("logged result does not match replay");
    }
  }
  return s;
}

// Streaming reader for JSON-lines logs. Skips a leading meta line; malformed
// lines are counted and skipped, and more than 10% malformed aborts.
class LogReader {
 public:
  explicit LogReader(const std::string& path) : in_(path), path_(path) {
    if (!in_) throw DataError("cannot open log file: " + path);
  }

  std::optional<GameLog> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.empty()) continue;
      try {
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.contains("_meta")) continue;
        ++total_;
        return game_log_from_json(j);
      } catch (const std::exception& e) {
        ++total_;
        ++malformed_;
        if (malformed_ * 10 > total_ && total_ >= 10) {
          throw DataError(internal::concat("too many malformed lines in ", path_, " (",
                                           malformed_, "/", total_, "), last: ", e.what()));
        }
      }
    }
    return std::nullopt;
  }

  std::vector<GameLog> read_all() {
    std::vector<GameLog> out;
    while (auto g = next()) out.push_back(std::move(*g));
    return out;
  }

  uint64_t malformed() const { return malformed_; }
  uint64_t total() const { return total_; }

 private:
  std::ifstream in_;
  std::string path_;
  uint64_t line_no_ = 0;
  uint64_t total_ = 0;
  uint64_t malformed_ = 0;
};

class LogWriter {
 public:
  LogWriter(const std::string& path, const nlohmann::json& meta) : out_(path) {
    if (!out_) throw DataError("cannot open log file for writing: " + path);
    nlohmann::json m;
    m["_meta"] = meta;
    out_ << m.dump() << "\n";
  }

  void write(const GameLog& g) { out_ << game_log_to_json(g).dump() << "\n"; }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

}  // namespace skat
