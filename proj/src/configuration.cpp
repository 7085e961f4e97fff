#include "regverify/configuration.hpp"

#include <cassert>

namespace regverify {

namespace {

const StateSet kEmptySet{};

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

void AbstractConfiguration::ensure_round(int round) {
  if (round < rounds()) return;
  populated_.resize(static_cast<std::size_t>(round) + 1);
  registers_.resize(populated_.size() * static_cast<std::size_t>(register_count_), kInitialSymbol);
}

bool AbstractConfiguration::has(Location l) const {
  if (l.round < 0 || l.round >= rounds()) return false;
  return populated_[static_cast<std::size_t>(l.round)].test(l.state);
}

void AbstractConfiguration::set(Location l, bool value) {
  assert(l.round >= 0);
  if (!value && l.round >= rounds()) return;
  ensure_round(l.round);
  populated_[static_cast<std::size_t>(l.round)].set(l.state, value);
}

SymbolId AbstractConfiguration::symbol(int round, RegisterId reg) const {
  if (round < 0 || round >= rounds()) return kInitialSymbol;
  return registers_[static_cast<std::size_t>(round) * static_cast<std::size_t>(register_count_) + reg];
}

void AbstractConfiguration::set_symbol(int round, RegisterId reg, SymbolId value) {
  assert(round >= 0);
  if (value == kInitialSymbol && round >= rounds()) return;
  ensure_round(round);
  registers_[static_cast<std::size_t>(round) * static_cast<std::size_t>(register_count_) + reg] = value;
}

const StateSet& AbstractConfiguration::round_set(int round) const {
  if (round < 0 || round >= rounds()) return kEmptySet;
  return populated_[static_cast<std::size_t>(round)];
}

bool AbstractConfiguration::empty() const {
  for (const auto& s : populated_)
    if (s.any()) return false;
  return true;
}

int AbstractConfiguration::active_bound() const {
  for (int k = rounds() - 1; k >= 0; --k) {
    if (populated_[static_cast<std::size_t>(k)].any()) return k;
    for (int j = 0; j < register_count_; ++j)
      if (symbol(k, static_cast<RegisterId>(j)) != kInitialSymbol) return k;
  }
  return -1;
}

void AbstractConfiguration::trim() {
  int keep = active_bound() + 1;
  populated_.resize(static_cast<std::size_t>(keep));
  registers_.resize(static_cast<std::size_t>(keep) * static_cast<std::size_t>(register_count_));
}

bool AbstractConfiguration::operator==(const AbstractConfiguration& o) const {
  if (register_count_ != o.register_count_) return false;
  int n = std::max(rounds(), o.rounds());
  for (int k = 0; k < n; ++k) {
    if (round_set(k) != o.round_set(k)) return false;
    for (int j = 0; j < register_count_; ++j)
      if (symbol(k, static_cast<RegisterId>(j)) != o.symbol(k, static_cast<RegisterId>(j))) return false;
  }
  return true;
}

std::size_t AbstractConfiguration::hash() const {
  std::size_t h = static_cast<std::size_t>(register_count_);
  int n = active_bound() + 1;
  std::hash<StateSet> hs;
  for (int k = 0; k < n; ++k) {
    h = mix(h, hs(populated_[static_cast<std::size_t>(k)]));
    for (int j = 0; j < register_count_; ++j) h = mix(h, symbol(k, static_cast<RegisterId>(j)));
  }
  return h;
}

void ConcreteConfiguration::ensure_round(int round) {
  if (round < rounds()) return;
  counts_.resize(static_cast<std::size_t>(round) + 1, std::vector<std::uint32_t>(kMaxStates, 0));
  registers_.resize(counts_.size() * static_cast<std::size_t>(register_count_), kInitialSymbol);
}

std::uint32_t ConcreteConfiguration::count(Location l) const {
  if (l.round < 0 || l.round >= rounds()) return 0;
  return counts_[static_cast<std::size_t>(l.round)][l.state];
}

void ConcreteConfiguration::add(Location l, std::uint32_t n) {
  ensure_round(l.round);
  counts_[static_cast<std::size_t>(l.round)][l.state] += n;
}

void ConcreteConfiguration::remove(Location l) {
  assert(count(l) > 0);
  counts_[static_cast<std::size_t>(l.round)][l.state] -= 1;
}

SymbolId ConcreteConfiguration::symbol(int round, RegisterId reg) const {
  if (round < 0 || round >= rounds()) return kInitialSymbol;
  return registers_[static_cast<std::size_t>(round) * static_cast<std::size_t>(register_count_) + reg];
}

void ConcreteConfiguration::set_symbol(int round, RegisterId reg, SymbolId value) {
  if (value == kInitialSymbol && round >= rounds()) return;
  ensure_round(round);
  registers_[static_cast<std::size_t>(round) * static_cast<std::size_t>(register_count_) + reg] = value;
}

std::uint64_t ConcreteConfiguration::total() const {
  std::uint64_t n = 0;
  for (const auto& row : counts_)
    for (auto c : row) n += c;
  return n;
}

std::vector<Location> ConcreteConfiguration::support() const {
  std::vector<Location> out;
  for (int k = 0; k < rounds(); ++k)
    for (std::size_t q = 0; q < kMaxStates; ++q)
      if (counts_[static_cast<std::size_t>(k)][q] > 0) out.push_back({static_cast<StateId>(q), k});
  return out;
}

void ConcreteConfiguration::trim() {
  int keep = 0;
  for (int k = rounds() - 1; k >= 0 && keep == 0; --k) {
    bool active = false;
    for (auto c : counts_[static_cast<std::size_t>(k)]) active = active || c > 0;
    for (int j = 0; j < register_count_ && !active; ++j)
      active = symbol(k, static_cast<RegisterId>(j)) != kInitialSymbol;
    if (active) keep = k + 1;
  }
  counts_.resize(static_cast<std::size_t>(keep));
  registers_.resize(static_cast<std::size_t>(keep) * static_cast<std::size_t>(register_count_));
}

bool ConcreteConfiguration::operator==(const ConcreteConfiguration& o) const {
  if (register_count_ != o.register_count_) return false;
  int n = std::max(rounds(), o.rounds());
  for (int k = 0; k < n; ++k) {
    for (std::size_t q = 0; q < kMaxStates; ++q)
      if (count({static_cast<StateId>(q), k}) != o.count({static_cast<StateId>(q), k})) return false;
    for (int j = 0; j < register_count_; ++j)
      if (symbol(k, static_cast<RegisterId>(j)) != o.symbol(k, static_cast<RegisterId>(j))) return false;
  }
  return true;
}

AbstractConfiguration project(const ConcreteConfiguration& c) {
  AbstractConfiguration a(c.register_count());
  for (const auto& l : c.support()) a.set(l, true);
  for (int k = 0; k < c.rounds(); ++k)
    for (int j = 0; j < c.register_count(); ++j)
      a.set_symbol(k, static_cast<RegisterId>(j), c.symbol(k, static_cast<RegisterId>(j)));
  a.trim();
  return a;
}

}  // namespace regverify
