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


#include "dltr/utfm_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>
#include <vector>

#include "dltr/errors.hpp"

namespace dltr {

namespace {

std::string fmt_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", p);
  return buf;
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_prob(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "prob", "bad probability '" + tok + "'");
  }
}

}  // namespace

std::string write_utfm(const Utfm& model) {
  for (const auto& sym : model.alphabet()) {
    if (sym.empty() || std::any_of(sym.begin(), sym.end(), [](unsigned char c) { return std::isspace(c); })) {
      throw DomainError("symbol '" + sym + "' cannot be written: empty or contains whitespace");
    }
  }
  std::ostringstream out;
  out << "UTFM v1\n";
  for (std::size_t s = 0; s < model.num_states(); ++s) {
    const StateId id = model.states()[s];
    out << "STATE " << state_name(id) << ' ' << phase_name(phase_of(id));
    if (model.accepting(s)) out << " ACCEPT";
    out << '\n';
  }
  for (const auto& sym : model.alphabet()) out << "SYMBOL " << sym << '\n';
  for (std::size_t s = 0; s < model.num_states(); ++s) {
    out << "INIT " << state_name(model.states()[s]) << ' ' << fmt_prob(model.initial(s)) << '\n';
  }
  for (std::size_t s = 0; s < model.num_states(); ++s) {
    for (std::size_t a = 0; a < model.num_symbols(); ++a) {
      for (std::size_t t = 0; t < model.num_states(); ++t) {
        const double p = model.transition(s, a, t);
        if (p == 0.0) continue;
        out << "TRANS " << state_name(model.states()[s]) << ' ' << model.alphabet()[a] << ' '
            << state_name(model.states()[t]) << ' ' << fmt_prob(p) << '\n';
      }
    }
  }
  for (std::size_t s = 0; s < model.num_states(); ++s) {
    for (std::size_t a = 0; a < model.num_symbols(); ++a) {
      out << "EMIT " << state_name(model.states()[s]) << ' ' << model.alphabet()[a] << ' '
          << fmt_prob(model.emission(s, a)) << '\n';
    }
  }
  return out.str();
}

Utfm read_utfm(std::string_view text) {
  struct StateDecl {
    StateId id;
    bool accept;
  };
  std::vector<StateDecl> states;
  std::vector<std::string> alphabet;
  std::vector<std::tuple<std::size_t, StateId, double>> inits;
  std::vector<std::tuple<std::size_t, StateId, std::string, StateId, double>> trans;
  std::vector<std::tuple<std::size_t, StateId, std::string, double>> emits;

  auto note_symbol = [&](const std::string& sym) {
    if (std::find(alphabet.begin(), alphabet.end(), sym) == alphabet.end()) alphabet.push_back(sym);
  };
  auto state_tok = [](const std::string& tok, std::size_t line) {
    auto s = parse_state(tok);
    if (!s) throw ParseError(line, "state", "unknown state '" + tok + "'");
    return *s;
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    auto tok = split_ws(raw);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (!header) {
      if (tok.size() != 2 || tok[0] != "UTFM" || tok[1] != "v1") {
        throw ParseError(line_no, "header", "expected 'UTFM v1'");
      }
      header = true;
      continue;
    }
    const std::string& kind = tok[0];
    if (kind == "STATE") {
      if (tok.size() < 3 || tok.size() > 4 || (tok.size() == 4 && tok[3] != "ACCEPT")) {
        throw ParseError(line_no, "STATE", "expected STATE <name> <phase> [ACCEPT]");
      }
      const StateId id = state_tok(tok[1], line_no);
      auto phase = parse_phase(tok[2]);
      if (!phase) throw ParseError(line_no, "phase", "unknown phase '" + tok[2] + "'");
      if (*phase != phase_of(id)) {
        throw ParseError(line_no, "phase", "state " + tok[1] + " belongs to phase " +
                                               std::string(phase_name(phase_of(id))));
      }
      states.push_back({id, tok.size() == 4});
    } else if (kind == "SYMBOL") {
      if (tok.size() != 2) throw ParseError(line_no, "SYMBOL", "expected SYMBOL <symbol>");
      note_symbol(tok[1]);
    } else if (kind == "INIT") {
      if (tok.size() != 3) throw ParseError(line_no, "INIT", "expected INIT <state> <prob>");
      inits.emplace_back(line_no, state_tok(tok[1], line_no), parse_prob(tok[2], line_no));
    } else if (kind == "TRANS") {
      if (tok.size() != 5) throw ParseError(line_no, "TRANS", "expected TRANS <state> <symbol> <state> <prob>");
      note_symbol(tok[2]);
      trans.emplace_back(line_no, state_tok(tok[1], line_no), tok[2], state_tok(tok[3], line_no),
                         parse_prob(tok[4], line_no));
    } else if (kind == "EMIT") {
      if (tok.size() != 4) throw ParseError(line_no, "EMIT", "expected EMIT <state> <symbol> <prob>");
      note_symbol(tok[2]);
      emits.emplace_back(line_no, state_tok(tok[1], line_no), tok[2], parse_prob(tok[3], line_no));
    } else {
      throw ParseError(line_no, kind, "unknown record '" + kind + "'");
    }
  }
  if (!header) throw ParseError(0, "header", "missing 'UTFM v1' header");
  if (states.empty()) throw ParseError(0, "STATE", "no STATE lines");
  if (alphabet.empty()) throw ParseError(0, "SYMBOL", "empty alphabet");

  std::vector<StateId> ids;
  for (const auto& d : states) ids.push_back(d.id);
  Utfm model;
  try {
    model = Utfm(ids, alphabet);
  } catch (const DomainError& e) {
    throw ParseError(0, "STATE", e.what());
  }
  for (std::size_t s = 0; s < states.size(); ++s) model.set_accepting(s, states[s].accept);

  auto index_of = [&](StateId id, std::size_t line) {
    try {
      return model.state_index(id);
    } catch (const DomainError& e) {
      throw ParseError(line, "state", e.what());
    }
  };
  for (const auto& [line, s, p] : inits) model.set_initial(index_of(s, line), p);
  for (const auto& [line, s, sym, t, p] : trans) {
    model.set_transition(index_of(s, line), model.symbol_index(sym), index_of(t, line), p);
  }
  for (const auto& [line, s, sym, p] : emits) model.set_emission(index_of(s, line), model.symbol_index(sym), p);

  if (auto report = validate(model); !report.ok()) {
    const auto& v = report.violations.front();
    throw ParseError(0, v.where, "invalid model: " + v.where + ": " + v.message);
  }
  return model;
}

void save_utfm(const std::filesystem::path& path, const Utfm& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << write_utfm(model);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Utfm load_utfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "path", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_utfm(buf.str());
}

}  // namespace dltr
