/*
 * Copyright 2026 The dlt-recovery Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <string>
#include <vector>

#include "dltr/event.hpp"
#include "dltr/hashgraph.hpp"
#include "dltr/rng.hpp"
#include "dltr/utfm.hpp"

namespace dltr::testing {

inline std::vector<std::string> letters(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(1, static_cast<char>('a' + i));
  return out;
}

// Random model over the default topology: each successor kept with
// probability 0.8, some rows left empty, random initial support, emissions
// and accept states.
inline Utfm random_sparse_model(std::uint64_t seed, std::size_t symbols = 3) {
  Rng rng(seed);
  Utfm m({kAllStates.begin(), kAllStates.end()}, letters(symbols));
  const std::size_t S = m.num_states();
  const std::size_t A = m.num_symbols();

  std::vector<double> init(S, 0.0);
  double total = 0.0;
  const std::size_t starts = 1 + rng.below(3);
  for (std::size_t k = 0; k < starts; ++k) {
    const std::size_t s = rng.below(S);
    init[s] += 0.1 + rng.unit();
  }
  for (double v : init) total += v;
  for (std::size_t s = 0; s < S; ++s) m.set_initial(s, init[s] / total);

  for (std::size_t s = 0; s < S; ++s) {
    double etotal = 0.0;
    std::vector<double> e(A);
    for (auto& v : e) etotal += (v = 0.05 + rng.unit());
    for (std::size_t a = 0; a < A; ++a) m.set_emission(s, a, e[a] / etotal);

    const auto succ = default_successors(m.states()[s]);
    for (std::size_t a = 0; a < A; ++a) {
      if (rng.below(10) == 0) continue;
      std::vector<std::pair<std::size_t, double>> row;
      for (auto t : succ) {
        if (rng.below(5) != 0) row.emplace_back(m.state_index(t), 0.05 + rng.unit());
      }
      if (row.empty()) row.emplace_back(m.state_index(succ.front()), 1.0);
      double rtotal = 0.0;
      for (auto& [t, w] : row) rtotal += w;
      for (auto& [t, w] : row) m.set_transition(s, a, t, w / rtotal);
    }
    m.set_accepting(s, rng.below(3) == 0);
  }
  m.set_accepting(rng.below(S), true);
  return m;
}

inline std::vector<std::string> random_word(Rng& rng, const Utfm& m, std::size_t len) {
  std::vector<std::string> x;
  for (std::size_t i = 0; i < len; ++i) x.push_back(m.alphabet()[rng.below(m.num_symbols())]);
  return x;
}

// Samples the generative reading: the current state emits, then moves on the
// emitted symbol.
inline std::vector<std::string> sample_sequence(const Utfm& m, Rng& rng, std::size_t len) {
  auto draw = [&](auto weight, std::size_t n) {
    double u = rng.unit();
    for (std::size_t i = 0; i < n; ++i) {
      u -= weight(i);
      if (u < 0.0) return i;
    }
    for (std::size_t i = n; i-- > 0;) {
      if (weight(i) > 0.0) return i;
    }
    return std::size_t{0};
  };
  std::size_t s = draw([&](std::size_t i) { return m.initial(i); }, m.num_states());
  std::vector<std::string> x;
  for (std::size_t k = 0; k < len; ++k) {
    const std::size_t a = draw([&](std::size_t i) { return m.emission(s, i); }, m.num_symbols());
    x.push_back(m.alphabet()[a]);
    s = draw([&](std::size_t t) { return m.transition(s, a, t); }, m.num_states());
  }
  return x;
}

struct DagFixture {
  AddressBook book;
  std::vector<Hash32> keys;
  std::vector<Event> events;  // topological order
};

struct DagOptions {
  std::size_t members = 4;
  std::size_t events = 40;
  bool unequal_stake = false;
  bool fork = false;        // member 0 forks now and then
  bool ts_ties = false;     // coarse timestamps so ties are common
};

// Random gossip-shaped DAG: genesis per member, then each event takes the
// creator's head as self-parent and a random other member's head as
// other-parent.
inline DagFixture random_dag(std::uint64_t seed, const DagOptions& opt) {
  Rng rng(seed);
  DagFixture f;
  std::vector<std::string> names;
  std::vector<std::uint64_t> stakes;
  for (std::size_t i = 0; i < opt.members; ++i) {
    names.push_back("m" + std::to_string(i));
    stakes.push_back(opt.unequal_stake ? 1 + rng.below(9) : 1);
  }
  if (opt.fork && opt.unequal_stake) {
    std::uint64_t rest = 0;
    for (std::size_t i = 1; i < stakes.size(); ++i) rest += stakes[i];
    stakes[0] = std::max<std::uint64_t>(1, std::min(stakes[0], (rest - 1) / 2));
  }
  f.book = AddressBook(names, stakes);
  f.keys = derive_member_keys(seed, opt.members);

  std::vector<std::vector<EventId>> chain(opt.members);
  std::int64_t clock = 0;
  auto ts = [&] { return opt.ts_ties ? clock / 3 : clock; };
  auto tx = [&](std::size_t k) {
    Transaction t;
    t.role = "r";
    t.flight_id = k;
    return std::vector<Transaction>{t};
  };
  for (std::size_t i = 0; i < opt.members && f.events.size() < opt.events; ++i) {
    Event e = make_event(i, f.keys[i], std::nullopt, std::nullopt, ts(), tx(f.events.size()));
    chain[i].push_back(e.id);
    f.events.push_back(e);
    ++clock;
  }
  while (f.events.size() < opt.events) {
    const std::size_t c = rng.below(opt.members);
    std::size_t o = rng.below(opt.members - 1);
    if (o >= c) ++o;
    EventId sp = chain[c].back();
    if (opt.fork && c == 0 && chain[c].size() >= 2 && rng.below(3) == 0) {
      sp = chain[c][chain[c].size() - 2];
    }
    clock += 1 + static_cast<std::int64_t>(rng.below(3));
    Event e = make_event(c, f.keys[c], sp, chain[o].back(), ts(), tx(f.events.size()));
    chain[c].push_back(e.id);
    f.events.push_back(e);
  }
  return f;
}

inline Hashgraph build(const DagFixture& f, bool update = true) {
  Hashgraph g(f.book, f.keys);
  for (const auto& e : f.events) {
    if (!g.insert(e).accepted()) throw std::logic_error("fixture event rejected");
  }
  if (update) g.update_consensus();
  return g;
}

}  // namespace dltr::testing
