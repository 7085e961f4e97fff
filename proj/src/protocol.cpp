#include "regverify/protocol.hpp"

#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "regverify/error.hpp"

namespace regverify {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "Syntax";
    case ErrorCode::Semantic: return "Semantic";
    case ErrorCode::WriteOfInitialSymbol: return "WriteOfInitialSymbol";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::NotInitialState: return "NotInitialState";
    case ErrorCode::MissingWindow: return "MissingWindow";
    case ErrorCode::NotEnabled: return "NotEnabled";
    case ErrorCode::TargetNotPopulated: return "TargetNotPopulated";
    case ErrorCode::ReplayFailure: return "ReplayFailure";
    case ErrorCode::NotDnf: return "NotDNF";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NotUninitialized: return "NotUninitialized";
    case ErrorCode::WrongRegisterCount: return "WrongRegisterCount";
    case ErrorCode::WindowNotContained: return "WindowNotContained";
    case ErrorCode::InconsistentProjections: return "InconsistentProjections";
    case ErrorCode::CyclicCircuit: return "CyclicCircuit";
    case ErrorCode::UndefinedWire: return "UndefinedWire";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

const char* finding_name(FindingKind kind) {
  switch (kind) {
    case FindingKind::UnknownState: return "UnknownState";
    case FindingKind::UnknownSymbol: return "UnknownSymbol";
    case FindingKind::RegisterOutOfRange: return "RegisterOutOfRange";
    case FindingKind::DepthOutOfRange: return "DepthOutOfRange";
    case FindingKind::WriteOfInitialSymbol: return "WriteOfInitialSymbol";
    case FindingKind::DuplicateState: return "DuplicateState";
    case FindingKind::DuplicateSymbol: return "DuplicateSymbol";
    case FindingKind::EmptyAlphabet: return "EmptyAlphabet";
    case FindingKind::BadRegisterCount: return "BadRegisterCount";
    case FindingKind::BadVisibility: return "BadVisibility";
    case FindingKind::IncrementInRoundless: return "IncrementInRoundless";
    case FindingKind::DepthInRoundless: return "DepthInRoundless";
    case FindingKind::UnknownInitialState: return "UnknownInitialState";
    case FindingKind::TooManyStates: return "TooManyStates";
    case FindingKind::TooManySymbols: return "TooManySymbols";
  }
  return "Unknown";
}

std::optional<StateId> Protocol::find_state(std::string_view name) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == name) return static_cast<StateId>(i);
  return std::nullopt;
}

std::optional<SymbolId> Protocol::find_symbol(std::string_view name) const {
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (alphabet[i] == name) return static_cast<SymbolId>(i);
  return std::nullopt;
}

StateId Protocol::state_id(std::string_view name) const {
  if (auto id = find_state(name)) return *id;
  throw Error(ErrorCode::Semantic, "unknown state '" + std::string(name) + "'");
}

SymbolId Protocol::symbol_id(std::string_view name) const {
  if (auto id = find_symbol(name)) return *id;
  throw Error(ErrorCode::Semantic, "unknown symbol '" + std::string(name) + "'");
}

std::size_t Protocol::size() const {
  std::size_t n = states.size() + alphabet.size() + transitions.size() + static_cast<std::size_t>(register_count);
  if (round_based()) n += static_cast<std::size_t>(visibility);
  return n;
}

namespace {

enum class Tok { Ident, Number, LParen, RParen, Comma, Colon, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long value = 0;
  std::size_t column = 0;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '?' || c == '\'' || c == '.';
}

std::vector<Token> lex_line(std::string_view line, std::size_t lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.column = i + 1;
    if (c == '(' || c == ')' || c == ',' || c == ':') {
      t.kind = c == '(' ? Tok::LParen : c == ')' ? Tok::RParen : c == ',' ? Tok::Comma : Tok::Colon;
      t.text = std::string(1, c);
      ++i;
    } else if (c == '-' || ident_char(c)) {
      std::size_t j = i + 1;
      while (j < line.size() && ident_char(line[j])) ++j;
      t.text = std::string(line.substr(i, j - i));
      bool numeric = true;
      std::size_t start = t.text[0] == '-' ? 1 : 0;
      if (start == t.text.size()) numeric = false;
      for (std::size_t k = start; k < t.text.size() && numeric; ++k)
        numeric = std::isdigit(static_cast<unsigned char>(t.text[k])) != 0;
      if (numeric) {
        if (t.text.size() > 9) throw SyntaxError(lineno, t.column, "number too large");
        t.kind = Tok::Number;
        t.value = std::stol(t.text);
      } else if (t.text[0] == '-') {
        throw SyntaxError(lineno, t.column, "unexpected '-'");
      } else {
        t.kind = Tok::Ident;
      }
      i = j;
    } else {
      throw SyntaxError(lineno, t.column, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.column = line.size() + 1;
  out.push_back(end);
  return out;
}

struct RawTransition {
  std::size_t line;
  std::vector<Token> tokens;
};

std::string_view strip_comment(std::string_view line) {
  auto pos = line.find('#');
  return pos == std::string_view::npos ? line : line.substr(0, pos);
}

class Cursor {
 public:
  Cursor(const std::vector<Token>& toks, std::size_t line) : toks_(toks), line_(line) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  const Token& expect(Tok kind, const char* what) {
    const Token& t = peek();
    if (t.kind != kind) fail(t, std::string("expected ") + what);
    return next();
  }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw SyntaxError(line_, t.column, msg);
  }

  std::size_t line() const { return line_; }

 private:
  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

[[noreturn]] void semantic(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::Semantic, "line " + std::to_string(line) + ": " + msg);
}

Transition bind_transition(const Protocol& p, const RawTransition& raw) {
  Cursor cur(raw.tokens, raw.line);
  auto state_of = [&](const Token& t) {
    auto id = p.find_state(t.text);
    if (!id) semantic(raw.line, "unknown state '" + t.text + "'");
    return *id;
  };
  auto symbol_of = [&](const Token& t) {
    auto id = p.find_symbol(t.text);
    if (!id) semantic(raw.line, "unknown symbol '" + t.text + "'");
    return *id;
  };
  auto register_of = [&](const Token& t) {
    if (t.kind != Tok::Number) cur.fail(t, "expected register index");
    if (t.value < 1 || t.value > p.register_count)
      semantic(raw.line, "register index " + t.text + " out of range");
    return static_cast<RegisterId>(t.value - 1);
  };

  Transition tr;
  tr.source = state_of(cur.expect(Tok::Ident, "source state"));
  const Token& verb = cur.expect(Tok::Ident, "action");
  if (verb.text == "inc") {
    if (!p.round_based()) semantic(raw.line, "inc in a roundless protocol");
    tr.action = Action::increment();
  } else if (verb.text == "read" || verb.text == "write") {
    cur.expect(Tok::LParen, "'('");
    std::vector<Token> args;
    for (;;) {
      const Token& a = cur.peek();
      if (a.kind != Tok::Ident && a.kind != Tok::Number) cur.fail(a, "expected argument");
      args.push_back(cur.next());
      if (cur.peek().kind == Tok::Comma) {
        cur.next();
        continue;
      }
      cur.expect(Tok::RParen, "')'");
      break;
    }
    if (verb.text == "write") {
      if (args.size() != 2) cur.fail(verb, "write takes (register, symbol)");
      tr.action = Action::write(register_of(args[0]), symbol_of(args[1]));
      if (tr.action.symbol == kInitialSymbol)
        throw Error(ErrorCode::WriteOfInitialSymbol,
                    "line " + std::to_string(raw.line) + ": write of initial symbol");
    } else if (p.round_based()) {
      if (args.size() != 3) cur.fail(verb, "round-based read takes (-depth, register, symbol)");
      if (args[0].kind != Tok::Number || args[0].value > 0) cur.fail(args[0], "expected depth written as -i");
      int depth = static_cast<int>(-args[0].value);
      if (depth > p.visibility)
        semantic(raw.line, "read depth " + std::to_string(depth) + " exceeds visibility");
      tr.action = Action::read(register_of(args[1]), symbol_of(args[2]), depth);
    } else {
      if (args.size() != 2) cur.fail(verb, "roundless read takes (register, symbol)");
      tr.action = Action::read(register_of(args[0]), symbol_of(args[1]));
    }
  } else {
    cur.fail(verb, "unknown action '" + verb.text + "'");
  }
  tr.destination = state_of(cur.expect(Tok::Ident, "destination state"));
  if (cur.peek().kind != Tok::End) cur.fail(cur.peek(), "trailing input");
  return tr;
}

}  // namespace

Protocol parse_protocol(std::string_view text) {
  Protocol p;
  std::optional<std::string> flavor;
  std::optional<long> visibility;
  bool have_states = false, have_registers = false, have_alphabet = false;
  std::vector<std::pair<std::size_t, Token>> initial_names;
  std::vector<RawTransition> raws;
  std::set<std::string> seen_keys;
  bool in_transitions = false;

  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = strip_comment(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++lineno;
    auto toks = lex_line(line, lineno);
    if (toks.size() == 1) continue;

    bool is_key = toks.size() >= 2 && toks[0].kind == Tok::Ident && toks[1].kind == Tok::Colon;
    if (!is_key) {
      if (!in_transitions) throw SyntaxError(lineno, toks[0].column, "expected 'key:'");
      raws.push_back({lineno, std::move(toks)});
      continue;
    }
    const std::string key = toks[0].text;
    if (!seen_keys.insert(key).second) throw SyntaxError(lineno, toks[0].column, "duplicate key '" + key + "'");
    in_transitions = false;
    std::vector<Token> values(toks.begin() + 2, toks.end() - 1);
    auto single_number = [&]() {
      if (values.size() != 1 || values[0].kind != Tok::Number)
        throw SyntaxError(lineno, toks[1].column + 1, "expected a number");
      return values[0].value;
    };
    auto identifiers = [&]() {
      std::vector<std::string> out;
      for (auto& v : values) {
        if (v.kind != Tok::Ident) throw SyntaxError(lineno, v.column, "expected identifier");
        out.push_back(v.text);
      }
      return out;
    };

    if (key == "flavor") {
      auto ids = identifiers();
      if (ids.size() != 1 || (ids[0] != "roundless" && ids[0] != "roundbased"))
        throw SyntaxError(lineno, toks[1].column + 1, "flavor must be roundless or roundbased");
      flavor = ids[0];
    } else if (key == "states") {
      p.states = identifiers();
      have_states = true;
    } else if (key == "initial") {
      for (auto& v : values) {
        if (v.kind != Tok::Ident) throw SyntaxError(lineno, v.column, "expected identifier");
        initial_names.emplace_back(lineno, v);
      }
    } else if (key == "registers") {
      long r = single_number();
      if (r < 1 || r > 64) semantic(lineno, "register count must be in [1, 64]");
      p.register_count = static_cast<int>(r);
      have_registers = true;
    } else if (key == "alphabet") {
      p.alphabet = identifiers();
      have_alphabet = true;
    } else if (key == "visibility") {
      long v = single_number();
      if (v < 0 || v > 64) semantic(lineno, "visibility must be in [0, 64]");
      visibility = v;
    } else if (key == "transitions") {
      if (!values.empty()) throw SyntaxError(lineno, values[0].column, "transitions go on following lines");
      in_transitions = true;
    } else {
      throw SyntaxError(lineno, toks[0].column, "unknown key '" + key + "'");
    }
  }

  if (!have_states) throw Error(ErrorCode::Syntax, "missing 'states:'");
  if (!have_registers) throw Error(ErrorCode::Syntax, "missing 'registers:'");
  if (!have_alphabet || p.alphabet.empty()) throw Error(ErrorCode::Syntax, "missing 'alphabet:'");

  if (flavor == "roundless" && visibility) throw Error(ErrorCode::Semantic, "roundless protocol with visibility");
  if (flavor == "roundbased" && !visibility) throw Error(ErrorCode::Semantic, "round-based protocol needs 'visibility:'");
  p.flavor = visibility ? Flavor::RoundBased : Flavor::Roundless;
  p.visibility = visibility ? static_cast<int>(*visibility) : 0;

  for (auto& f : validate(p)) {
    if (f.kind != FindingKind::UnknownInitialState) throw Error(ErrorCode::Semantic, f.detail);
  }
  for (auto& [line, tok] : initial_names) {
    auto id = p.find_state(tok.text);
    if (!id) semantic(line, "unknown initial state '" + tok.text + "'");
    p.initial.set(*id);
  }
  for (auto& raw : raws) p.transitions.push_back(bind_transition(p, raw));
  auto findings = validate(p);
  if (!findings.empty()) throw Error(ErrorCode::Semantic, findings.front().detail);
  return p;
}

std::string format_action(const Protocol& p, const Action& a) {
  std::ostringstream os;
  switch (a.kind) {
    case ActionKind::Increment:
      return "inc";
    case ActionKind::Read:
      os << "read(";
      if (p.round_based()) os << (a.depth == 0 ? "0" : "-" + std::to_string(a.depth)) << ", ";
      os << a.reg + 1 << ", " << p.alphabet.at(a.symbol) << ")";
      return os.str();
    case ActionKind::Write:
      os << "write(" << a.reg + 1 << ", " << p.alphabet.at(a.symbol) << ")";
      return os.str();
  }
  return "?";
}

std::string format_transition(const Protocol& p, const Transition& t) {
  return p.states.at(t.source) + " " + format_action(p, t.action) + " " + p.states.at(t.destination);
}

std::string format_state_set(const Protocol& p, const StateSet& s) {
  std::string out = "{";
  bool first = true;
  for (std::size_t q = 0; q < p.states.size(); ++q) {
    if (!s.test(q)) continue;
    if (!first) out += ", ";
    out += p.states[q];
    first = false;
  }
  return out + "}";
}

std::string serialize_protocol(const Protocol& p) {
  std::ostringstream os;
  auto join = [&](const std::vector<std::string>& xs) {
    for (const auto& x : xs) os << ' ' << x;
    os << '\n';
  };
  os << "flavor: " << (p.round_based() ? "roundbased" : "roundless") << '\n';
  os << "states:";
  join(p.states);
  os << "initial:";
  for (std::size_t q = 0; q < p.states.size(); ++q)
    if (p.initial.test(q)) os << ' ' << p.states[q];
  os << '\n';
  os << "registers: " << p.register_count << '\n';
  os << "alphabet:";
  join(p.alphabet);
  if (p.round_based()) os << "visibility: " << p.visibility << '\n';
  os << "transitions:\n";
  for (const auto& t : p.transitions) os << "  " << format_transition(p, t) << '\n';
  return os.str();
}

std::vector<Finding> validate(const Protocol& p) {
  std::vector<Finding> out;
  auto add = [&](FindingKind k, std::string d) { out.push_back({k, std::move(d)}); };

  if (p.states.size() > kMaxStates) add(FindingKind::TooManyStates, "more than " + std::to_string(kMaxStates) + " states");
  if (p.alphabet.empty()) add(FindingKind::EmptyAlphabet, "alphabet must contain the initial symbol");
  if (p.alphabet.size() > kMaxSymbols) add(FindingKind::TooManySymbols, "more than " + std::to_string(kMaxSymbols) + " symbols");
  if (p.register_count < 1) add(FindingKind::BadRegisterCount, "register count must be at least 1");
  if (p.visibility < 0 || (!p.round_based() && p.visibility != 0))
    add(FindingKind::BadVisibility, "visibility out of range for flavor");

  std::set<std::string> names;
  for (const auto& s : p.states)
    if (!names.insert(s).second) add(FindingKind::DuplicateState, "duplicate state '" + s + "'");
  names.clear();
  for (const auto& s : p.alphabet)
    if (!names.insert(s).second) add(FindingKind::DuplicateSymbol, "duplicate symbol '" + s + "'");

  for (std::size_t q = p.states.size(); q < kMaxStates; ++q)
    if (p.initial.test(q)) {
      add(FindingKind::UnknownInitialState, "initial state id " + std::to_string(q) + " not declared");
      break;
    }

  for (std::size_t i = 0; i < p.transitions.size(); ++i) {
    const auto& t = p.transitions[i];
    std::string where = "transition " + std::to_string(i + 1) + ": ";
    if (t.source >= p.states.size()) add(FindingKind::UnknownState, where + "unknown source state");
    if (t.destination >= p.states.size()) add(FindingKind::UnknownState, where + "unknown destination state");
    const Action& a = t.action;
    if (a.kind == ActionKind::Increment) {
      if (!p.round_based()) add(FindingKind::IncrementInRoundless, where + "inc in a roundless protocol");
      continue;
    }
    if (a.symbol >= p.alphabet.size()) add(FindingKind::UnknownSymbol, where + "unknown symbol");
    if (static_cast<int>(a.reg) >= p.register_count) add(FindingKind::RegisterOutOfRange, where + "register out of range");
    if (a.kind == ActionKind::Write && a.symbol == kInitialSymbol)
      add(FindingKind::WriteOfInitialSymbol, where + "write of initial symbol");
    if (a.kind == ActionKind::Read) {
      if (!p.round_based() && a.depth != 0) add(FindingKind::DepthInRoundless, where + "read depth in a roundless protocol");
      if (p.round_based() && (a.depth < 0 || a.depth > p.visibility))
        add(FindingKind::DepthOutOfRange, where + "read depth out of range");
    }
  }
  return out;
}

bool is_uninitialized(const Protocol& p) {
  for (const auto& t : p.transitions)
    if (t.action.kind == ActionKind::Read && t.action.symbol == kInitialSymbol) return false;
  return true;
}

}  // namespace regverify
