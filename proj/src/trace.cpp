#include "regverify/trace.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "regverify/error.hpp"

namespace regverify {

namespace {

std::string registers_text(const Protocol& p, int rounds, auto symbol_at) {
  std::string out;
  for (int k = 0; k < std::max(rounds, 1); ++k)
    for (int j = 0; j < p.register_count; ++j) {
      SymbolId s = symbol_at(k, static_cast<RegisterId>(j));
      if (s == kInitialSymbol) continue;
      out += " " + std::to_string(j + 1);
      if (p.round_based()) out += "@" + std::to_string(k);
      out += "=" + p.alphabet[s];
    }
  return out;
}

std::string location_text(const Protocol& p, Location l) {
  std::string s = p.states[l.state];
  if (p.round_based()) s += "@" + std::to_string(l.round);
  return s;
}

void write_steps(std::ostringstream& os, const Protocol& p, const std::vector<Move>& steps, bool abstract) {
  for (const auto& m : steps) {
    if (p.round_based()) os << m.round << ' ';
    os << format_transition(p, p.transitions.at(m.transition)) << ' '
       << (abstract && m.deserting ? "desert" : "keep") << '\n';
  }
}

std::string strip(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::string without_spaces(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; }), s.end());
  return s;
}

int parse_int(const std::string& s, std::size_t line) {
  if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw SyntaxError(line, 1, "expected a number, got '" + s + "'");
  return std::stoi(s);
}

}  // namespace

std::string write_trace(const Protocol& p, const Execution& e) {
  std::ostringstream os;
  os << "start abstract";
  for (int k = 0; k < std::max(e.start.rounds(), 1); ++k)
    for (std::size_t q = 0; q < p.states.size(); ++q)
      if (e.start.has({static_cast<StateId>(q), k})) os << ' ' << location_text(p, {static_cast<StateId>(q), k});
  os << " |" << registers_text(p, e.start.rounds(), [&](int k, RegisterId j) { return e.start.symbol(k, j); })
     << '\n';
  write_steps(os, p, e.steps, true);
  return os.str();
}

std::string write_trace(const Protocol& p, const ConcreteExecution& e) {
  std::ostringstream os;
  os << "start concrete";
  for (const auto& l : e.start.support()) {
    os << ' ' << location_text(p, l);
    if (e.start.count(l) > 1) os << '*' << e.start.count(l);
  }
  os << " |" << registers_text(p, e.start.rounds(), [&](int k, RegisterId j) { return e.start.symbol(k, j); })
     << '\n';
  write_steps(os, p, e.steps, false);
  return os.str();
}

Trace parse_trace(const Protocol& p, std::string_view text) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::size_t pos = 0, lineno = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    auto hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string line = strip(raw);
    if (!line.empty()) lines.emplace_back(lineno, line);
  }
  if (lines.empty()) throw Error(ErrorCode::Syntax, "empty trace");

  auto [hline, header] = lines.front();
  auto bar = header.find('|');
  if (bar == std::string::npos) throw SyntaxError(hline, 1, "header needs '|' between locations and registers");
  auto head = words(header.substr(0, bar));
  auto regs = words(header.substr(bar + 1));
  if (head.size() < 2 || head[0] != "start" || (head[1] != "abstract" && head[1] != "concrete"))
    throw SyntaxError(hline, 1, "expected 'start abstract' or 'start concrete'");
  bool abstract = head[1] == "abstract";

  auto parse_location = [&](std::string w, std::uint32_t* count) {
    *count = 1;
    auto star = w.find('*');
    if (star != std::string::npos) {
      if (abstract) throw SyntaxError(hline, 1, "counts only allowed in concrete traces");
      *count = static_cast<std::uint32_t>(parse_int(w.substr(star + 1), hline));
      w = w.substr(0, star);
    }
    Location l;
    auto at = w.find('@');
    if (p.round_based()) {
      if (at == std::string::npos) throw SyntaxError(hline, 1, "round-based location needs '@round'");
      l.round = parse_int(w.substr(at + 1), hline);
      w = w.substr(0, at);
    } else if (at != std::string::npos) {
      throw SyntaxError(hline, 1, "roundless location with a round");
    }
    auto id = p.find_state(w);
    if (!id) throw Error(ErrorCode::Semantic, "trace: unknown state '" + w + "'");
    l.state = *id;
    return l;
  };

  AbstractConfiguration astart(p.register_count);
  ConcreteConfiguration cstart(p.register_count);
  for (std::size_t i = 2; i < head.size(); ++i) {
    std::uint32_t n = 1;
    Location l = parse_location(head[i], &n);
    if (abstract) {
      astart.set(l, true);
    } else {
      if (n == 0) throw SyntaxError(hline, 1, "zero count");
      cstart.add(l, n);
    }
  }
  for (const auto& w : regs) {
    auto eq = w.find('=');
    if (eq == std::string::npos) throw SyntaxError(hline, 1, "register entry needs '='");
    std::string lhs = w.substr(0, eq);
    int round = 0;
    auto at = lhs.find('@');
    if (at != std::string::npos) {
      if (!p.round_based()) throw SyntaxError(hline, 1, "roundless register with a round");
      round = parse_int(lhs.substr(at + 1), hline);
      lhs = lhs.substr(0, at);
    }
    int j = parse_int(lhs, hline);
    if (j < 1 || j > p.register_count) throw Error(ErrorCode::Semantic, "trace: register out of range");
    auto sym = p.find_symbol(w.substr(eq + 1));
    if (!sym) throw Error(ErrorCode::Semantic, "trace: unknown symbol '" + w.substr(eq + 1) + "'");
    astart.set_symbol(round, static_cast<RegisterId>(j - 1), *sym);
    cstart.set_symbol(round, static_cast<RegisterId>(j - 1), *sym);
  }

  std::vector<std::string> formatted;
  for (const auto& t : p.transitions) formatted.push_back(without_spaces(format_action(p, t.action)));

  std::vector<Move> steps;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto [ln, line] = lines[i];
    auto w = words(line);
    Move m;
    std::size_t first = 0;
    if (p.round_based()) {
      if (w.empty()) throw SyntaxError(ln, 1, "missing round");
      m.round = parse_int(w[0], ln);
      first = 1;
    }
    if (w.size() < first + 4) throw SyntaxError(ln, 1, "expected 'source action destination desert|keep'");
    const std::string& flag = w.back();
    if (flag != "desert" && flag != "keep") throw SyntaxError(ln, 1, "expected desert or keep");
    m.deserting = flag == "desert";
    const std::string& src = w[first];
    const std::string& dst = w[w.size() - 2];
    std::string action;
    for (std::size_t k = first + 1; k + 2 < w.size(); ++k) action += w[k];
    bool found = false;
    for (TransitionId t = 0; t < p.transitions.size() && !found; ++t) {
      const auto& tr = p.transitions[t];
      if (p.states[tr.source] == src && p.states[tr.destination] == dst && formatted[t] == action) {
        m.transition = t;
        found = true;
      }
    }
    if (!found) throw Error(ErrorCode::Semantic, "line " + std::to_string(ln) + ": no such transition");
    steps.push_back(m);
  }

  if (abstract) {
    astart.trim();
    return Execution{astart, steps};
  }
  cstart.trim();
  return ConcreteExecution{cstart, steps};
}

}  // namespace regverify
