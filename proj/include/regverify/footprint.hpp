#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "regverify/configuration.hpp"
#include "regverify/protocol.hpp"

namespace regverify {

/// Populated locations and register contents restricted to rounds [lo, hi].
/// An empty window has hi < lo.
class LocalConfiguration {
 public:
  LocalConfiguration() = default;
  LocalConfiguration(int lo, int hi, int register_count);

  int lo() const { return lo_; }
  int hi() const { return hi_; }
  int register_count() const { return register_count_; }
  bool contains(int round) const { return round >= lo_ && round <= hi_; }

  bool has(Location l) const;
  void set(Location l, bool value);
  const StateSet& round_set(int round) const;
  SymbolId symbol(int round, RegisterId reg) const;
  void set_symbol(int round, RegisterId reg, SymbolId value);

  LocalConfiguration restrict(int lo, int hi) const;
  /// Same content with the window stretched to [lo, hi]; new rounds are empty with d0 registers.
  LocalConfiguration widen(int lo, int hi) const;
  /// Window-relative encoding; equal for translated configurations.
  std::string key() const;

  bool operator==(const LocalConfiguration& o) const = default;

 private:
  int lo_ = 0;
  int hi_ = -1;
  int register_count_ = 1;
  std::vector<StateSet> populated_;
  std::vector<SymbolId> registers_;
};

/// Window [max(j, 0), k] of an abstract configuration.
LocalConfiguration local_view(const AbstractConfiguration& c, int j, int k);
AbstractConfiguration to_abstract(const LocalConfiguration& c);

/// A start configuration and the moves that change it; every move has an
/// effect on the window.
struct Footprint {
  LocalConfiguration start;
  std::vector<Move> steps;

  int lo() const { return start.lo(); }
  int hi() const { return start.hi(); }
  bool operator==(const Footprint& o) const = default;
};

/// Relaxed step on a window: moves without effect leave the configuration
/// unchanged, an increment from round lo-1 needs no populated source, and a
/// read of a register below the window ignores its content.
std::optional<LocalConfiguration> try_local_step(const Protocol& p, const LocalConfiguration& c, const Move& m,
                                                 std::string* why = nullptr);
LocalConfiguration local_step(const Protocol& p, const LocalConfiguration& c, const Move& m);

std::vector<LocalConfiguration> footprint_configurations(const Protocol& p, const Footprint& f);

Footprint project_footprint(const Protocol& p, const Execution& e, int j, int k);
Footprint project_footprint(const Protocol& p, const Footprint& f, int j, int k);

/// Glues a footprint on [a, b] with one on [c, d], a <= c <= b < d, that agree on [c, b].
Footprint merge_footprints(const Protocol& p, const Footprint& low, const Footprint& high);

/// `bridges[k]` is a footprint on [k-v, k] and `taus[k]` one on [k-v+1, k];
/// bridges[k] projects to taus[k-1] below and to taus[k] above. Returns an
/// execution whose projection on every [k-v, k] is bridges[k].
Execution combine_footprints(const Protocol& p, const std::vector<Footprint>& taus,
                             const std::vector<Footprint>& bridges);
Execution combine_footprints(const Protocol& p, const std::vector<Footprint>& bridges);

Execution normalize_execution(const Protocol& p, const Execution& e);

struct NormalFormReport {
  bool ok = true;
  std::vector<std::string> violations;
  std::size_t max_steps_per_round = 0;
};

/// Every step deserts, populates a never populated location, or writes a
/// symbol that is read later or stays in the register. No location is
/// populated again after being deserted. At most |Q|(2v+5) + r steps per round.
NormalFormReport check_normal_form(const Protocol& p, const Execution& e);
std::size_t normal_form_round_bound(const Protocol& p);

}  // namespace regverify
