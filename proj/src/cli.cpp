#include "regverify/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "regverify/constraints.hpp"
#include "regverify/error.hpp"
#include "regverify/oracle.hpp"
#include "regverify/protocol.hpp"
#include "regverify/reductions.hpp"
#include "regverify/roundbased.hpp"
#include "regverify/roundless.hpp"
#include "regverify/semantics.hpp"
#include "regverify/trace.hpp"

namespace regverify::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// Missing or unreadable input file.
struct InputError {
  std::string message;
};

/// Algorithm that does not apply to the instance.
struct Incompatible {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError{"cannot read '" + path + "'"};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError{"cannot write '" + path.string() + "'"};
  out << text;
}

/// `@name` selects a built-in protocol or constraint.
Protocol load_protocol(const std::string& ref) {
  if (!ref.empty() && ref[0] == '@') return builtin_examples().protocol(ref.substr(1));
  return parse_protocol(read_file(ref));
}

std::string load_constraint_text(const std::string& ref) {
  if (!ref.empty() && ref[0] == '@') return builtin_examples().constraint(ref.substr(1));
  return read_file(ref);
}

std::uint64_t default_budget() {
  if (const char* env = std::getenv("REGVERIFY_BUDGET")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw CLI::ValidationError("REGVERIFY_BUDGET", "not a number");
    }
  }
  return RoundBasedOptions{}.budget;
}

int exit_code(Answer a) {
  switch (a) {
    case Answer::Positive: return kPositive;
    case Answer::Negative: return kNegative;
    case Answer::Unknown: return kUnknown;
  }
  return kUnknown;
}

struct CheckArgs {
  std::string problem;
  std::string protocol;
  std::string constraint;
  std::string state;
  std::string algo;
  std::string emit_witness;
  bool distribute = false;
  std::uint64_t budget = 0;
  std::size_t step_cap = 0;
  int cap_rounds = -1;
  std::size_t cap_states = OracleCaps{}.max_states;
  std::size_t limit = 0;
  unsigned parallel = 1;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"Presence reachability checker for register protocols", "regverify"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every verb");

    CheckArgs check;
    auto* cmd_check = app.add_subcommand("check", "Decide COVER, TARGET, dnfPRP, PRP or round-based PRP");
    cmd_check->require_subcommand(1);
    auto common = [&](CLI::App* sub, bool needs_constraint, bool needs_state) {
      sub->add_option("protocol", check.protocol, "Protocol file, or @name for a built-in")->required();
      if (needs_constraint)
        sub->add_option("constraint", check.constraint, "Constraint file, or @name for a built-in")->required();
      if (needs_state) sub->add_option("--state", check.state, "Target state")->required();
      sub->add_option("--emit-witness", check.emit_witness, "Write the witness trace of a positive verdict here");
      sub->add_option("--cap-states", check.cap_states, "Oracle cap on |Q|");
      sub->add_option("--cap-rounds", check.cap_rounds, "Oracle round cap for round-based protocols");
      sub->add_option("--limit", check.limit, "Execution length bound for bounded search");
      sub->add_option("--parallel", check.parallel, "Worker threads for independent root branches")
          ->check(CLI::Range(1U, 256U));
      sub->callback([&, sub] { check.problem = sub->get_name(); });
    };
    auto* c_cover = cmd_check->add_subcommand("cover", "Can a process reach the state?");
    common(c_cover, false, true);
    c_cover->add_option("--algo", check.algo, "bounded | saturation | fixed-r | oracle")
        ->check(CLI::IsMember({"bounded", "saturation", "fixed-r", "oracle"}));
    auto* c_target = cmd_check->add_subcommand("target", "Can every process reach the state together?");
    common(c_target, false, true);
    c_target->add_option("--algo", check.algo, "bounded | one-reg | oracle")
        ->check(CLI::IsMember({"bounded", "one-reg", "oracle"}));
    auto* c_dnf = cmd_check->add_subcommand("dnfprp", "Presence reachability for a constraint in DNF");
    common(c_dnf, true, false);
    c_dnf->add_option("--algo", check.algo, "one-reg | bounded | oracle")
        ->check(CLI::IsMember({"one-reg", "bounded", "oracle"}));
    c_dnf->add_flag("--distribute", check.distribute, "Convert the constraint to DNF first, with a size guard");
    auto* c_prp = cmd_check->add_subcommand("prp", "Presence reachability for a Boolean constraint");
    common(c_prp, true, false);
    c_prp->add_option("--algo", check.algo, "bounded | oracle")->check(CLI::IsMember({"bounded", "oracle"}));
    auto* c_rb = cmd_check->add_subcommand("rbprp", "Presence reachability for a round-based protocol");
    common(c_rb, true, false);
    c_rb->add_option("--algo", check.algo, "footprint | oracle")->check(CLI::IsMember({"footprint", "oracle"}));
    c_rb->add_option("--budget", check.budget, "Node budget; REGVERIFY_BUDGET sets the default");
    c_rb->add_option("--step-cap", check.step_cap,
                     "Moves a bridge may add; defaults to the normal-form bound (v+1)|Q|(2v+5)");

    std::string o_protocol, o_constraint, o_export, o_witness, o_cover, o_target;
    int o_rounds = -1;
    std::size_t o_states = OracleCaps{}.max_states;
    auto* cmd_oracle = app.add_subcommand("oracle", "Brute-force abstract reachability");
    cmd_oracle->add_option("protocol", o_protocol, "Protocol file, or @name")->required();
    auto* o_c = cmd_oracle->add_option("constraint", o_constraint, "Constraint file, or @name");
    auto* o_cv = cmd_oracle->add_option("--cover", o_cover, "Decide COVER of this state");
    auto* o_tg = cmd_oracle->add_option("--target", o_target, "Decide TARGET of this state");
    o_c->excludes(o_cv)->excludes(o_tg);
    o_cv->excludes(o_tg);
    cmd_oracle->add_option("--cap-rounds", o_rounds, "Round cap for round-based protocols");
    cmd_oracle->add_option("--cap-states", o_states, "Largest |Q| explored");
    cmd_oracle->add_option("--export", o_export, "Write the sorted reach set here");
    cmd_oracle->add_option("--emit-witness", o_witness, "Write the witness trace of a positive verdict here");

    std::string r_protocol, r_trace;
    auto* cmd_replay = app.add_subcommand("replay", "Replay a witness trace and print the final configuration");
    cmd_replay->add_option("protocol", r_protocol, "Protocol file, or @name")->required();
    cmd_replay->add_option("trace", r_trace, "Trace file")->required();

    std::string g_out, g_circuit;
    std::uint64_t g_seed = 1;
    int g_vars = 3, g_clauses = 3, g_inputs = 3, g_gates = 3;
    bool g_desired = true;
    auto* cmd_gen = app.add_subcommand("gen", "Generate hardness benchmarks with known answers");
    cmd_gen->require_subcommand(1);
    auto* g_sc = cmd_gen->add_subcommand("sat-cover", "3-SAT as COVER");
    auto* g_st = cmd_gen->add_subcommand("sat-target", "3-SAT as TARGET on an uninitialized protocol");
    auto* g_cvp = cmd_gen->add_subcommand("cvp", "Circuit value as COVER with one register");
    for (auto* sub : {g_sc, g_st, g_cvp}) {
      sub->add_option("--seed", g_seed, "Random seed");
      sub->add_option("--out", g_out, "Output directory")->required();
    }
    for (auto* sub : {g_sc, g_st}) {
      sub->add_option("--vars", g_vars, "Variables")->check(CLI::Range(1, 20));
      sub->add_option("--clauses", g_clauses, "Clauses")->check(CLI::Range(1, 200));
    }
    g_cvp->add_option("--inputs", g_inputs, "Random circuit inputs")->check(CLI::Range(1, 20));
    g_cvp->add_option("--gates", g_gates, "Random circuit gates")->check(CLI::Range(1, 200));
    g_cvp->add_option("--circuit", g_circuit, "Circuit file instead of a random circuit");
    g_cvp->add_option("--desired", g_desired, "Output value the protocol checks for");

    std::string f_protocol, f_constraint;
    auto* cmd_fmt = app.add_subcommand("fmt", "Print the canonical form of a protocol or constraint");
    cmd_fmt->add_option("protocol", f_protocol, "Protocol file, or @name")->required();
    cmd_fmt->add_option("constraint", f_constraint, "Constraint file to format against the protocol");

    std::string e_out;
    auto* cmd_examples = app.add_subcommand("examples", "List or write the built-in examples");
    cmd_examples->add_option("--out", e_out, "Write every example into this directory");

    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      app.exit(e, out_, err_);
      return 0;
    } catch (const CLI::CallForAllHelp& e) {
      app.exit(e, out_, err_);
      return 0;
    } catch (const CLI::ParseError& e) {
      app.exit(e, out_, err_);
      return kUsage;
    }

    try {
      if (cmd_check->parsed()) {
        if (check.budget == 0) check.budget = default_budget();
        return run_check(check);
      }
      if (cmd_oracle->parsed()) return run_oracle(o_protocol, o_constraint, o_cover, o_target, o_rounds, o_states,
                                                  o_export, o_witness);
      if (cmd_replay->parsed()) return run_replay(r_protocol, r_trace);
      if (cmd_gen->parsed()) {
        std::mt19937_64 rng(g_seed);
        if (g_cvp->parsed()) return run_gen_cvp(rng, g_seed, g_inputs, g_gates, g_circuit, g_desired, g_out);
        return run_gen_sat(rng, g_seed, g_vars, g_clauses, g_st->parsed(), g_out);
      }
      if (cmd_fmt->parsed()) return run_fmt(f_protocol, f_constraint);
      if (cmd_examples->parsed()) return run_examples(e_out);
    } catch (const InputError& e) {
      err_ << "error: " << e.message << "\n";
      return kNoInput;
    } catch (const Incompatible& e) {
      err_ << "error: " << e.message << "\n";
      return kDataError;
    } catch (const CLI::ValidationError& e) {
      err_ << "error: " << e.what() << "\n";
      return kUsage;
    } catch (const Error& e) {
      err_ << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
      return e.code() == ErrorCode::CapExceeded ? kCapExceeded : kDataError;
    } catch (const fs::filesystem_error& e) {
      err_ << "error: " << e.what() << "\n";
      return kNoInput;
    }
    return kUsage;
  }

 private:
  int report(const Protocol& p, const Verdict& v, const std::string& witness_path) {
    json j;
    j["schema"] = 1;
    j["answer"] = answer_name(v.answer);
    j["status"] = answer_name(v.answer);
    j["algorithm"] = v.algorithm;
    if (v.witness && !witness_path.empty()) {
      write_file(witness_path, write_trace(p, *v.witness));
      j["witness_file"] = witness_path;
    }
    j["explored_nodes"] = v.stats.explored_nodes;
    j["stats"] = {{"explored_nodes", v.stats.explored_nodes},
                  {"witness_steps", v.stats.witness_steps},
                  {"millis", v.stats.millis}};
    if (!v.detail.empty()) j["detail"] = v.detail;
    out_ << j.dump() << "\n";
    err_ << answer_name(v.answer) << " (" << v.algorithm << ", " << v.stats.explored_nodes << " nodes, "
         << v.stats.millis << " ms)";
    if (!v.detail.empty()) err_ << ": " << v.detail;
    err_ << "\n";
    return exit_code(v.answer);
  }

  static void require_roundless(const Protocol& p, const std::string& problem) {
    if (p.round_based()) throw Incompatible{"'" + problem + "' needs a roundless protocol; use 'check rbprp'"};
  }

  static void require_one_register(const Protocol& p) {
    if (p.register_count != 1)
      throw Incompatible{"one-reg needs exactly one register, the protocol has " + std::to_string(p.register_count)};
  }

  int run_check(const CheckArgs& a) {
    Protocol p = load_protocol(a.protocol);
    OracleCaps caps;
    caps.max_states = a.cap_states;
    std::optional<std::size_t> limit;
    if (a.limit) limit = a.limit;

    if (a.problem == "rbprp") {
      if (!p.round_based()) throw Incompatible{"'rbprp' needs a round-based protocol; use 'check prp'"};
      RoundConstraint psi = parse_round_constraint(p, load_constraint_text(a.constraint));
      if (a.algo == "oracle") {
        int cap = a.cap_rounds >= 0 ? a.cap_rounds : default_round_cap(p, psi);
        return report(p, oracle_prp(p, psi, cap, caps), a.emit_witness);
      }
      RoundBasedOptions opts;
      opts.budget = a.budget;
      opts.step_cap = a.step_cap;
      opts.threads = a.parallel;
      return report(p, solve_prp_roundbased(p, psi, opts), a.emit_witness);
    }

    require_roundless(p, a.problem);
    if (a.problem == "cover" || a.problem == "target") {
      StateId q = p.state_id(a.state);
      bool cover = a.problem == "cover";
      RoundlessConstraint phi = cover ? cover_constraint(q) : target_constraint(p, q);
      std::string algo = a.algo.empty() ? (cover ? "fixed-r" : "bounded") : a.algo;
      if (cover && p.register_count > 6 && algo == "fixed-r")
        err_ << "warning: fixed-r enumerates r! first-write orders\n";
      if (algo == "oracle") return report(p, oracle_prp(p, phi, caps), a.emit_witness);
      if (algo == "bounded") return report(p, solve_prp_bounded(p, phi, limit), a.emit_witness);
      if (algo == "saturation") {
        if (!is_uninitialized(p)) throw Incompatible{"saturation needs an uninitialized protocol"};
        return report(p, solve_cover_uninitialized(p, q), a.emit_witness);
      }
      if (algo == "fixed-r") return report(p, solve_cover_fixed_r(p, q), a.emit_witness);
      require_one_register(p);
      return report(p, solve_dnfprp_one_register(p, phi), a.emit_witness);
    }

    RoundlessConstraint phi = parse_roundless_constraint(p, load_constraint_text(a.constraint));
    if (a.problem == "dnfprp") {
      if (a.distribute) phi = to_dnf(phi);
      if (!is_dnf(phi)) throw Incompatible{"constraint is not in DNF; pass --distribute or use 'check prp'"};
      std::string algo = a.algo.empty() ? (p.register_count == 1 ? "one-reg" : "bounded") : a.algo;
      if (algo == "oracle") return report(p, oracle_prp(p, phi, caps), a.emit_witness);
      if (algo == "bounded") return report(p, solve_prp_bounded(p, phi, limit), a.emit_witness);
      require_one_register(p);
      return report(p, solve_dnfprp_one_register(p, phi), a.emit_witness);
    }
    if (a.algo == "oracle") return report(p, oracle_prp(p, phi, caps), a.emit_witness);
    return report(p, solve_prp_bounded(p, phi, limit), a.emit_witness);
  }

  int run_oracle(const std::string& protocol, const std::string& constraint, const std::string& cover,
                 const std::string& target, int rounds, std::size_t states, const std::string& export_path,
                 const std::string& witness) {
    Protocol p = load_protocol(protocol);
    OracleCaps caps;
    caps.max_states = states;
    if (p.round_based()) {
      if (constraint.empty()) throw Incompatible{"round-based oracle needs a constraint file"};
      RoundConstraint psi = parse_round_constraint(p, load_constraint_text(constraint));
      int cap = rounds >= 0 ? rounds : default_round_cap(p, psi);
      if (!export_path.empty()) write_file(export_path, export_reach(p, reach_roundbased_capped(p, cap, caps)));
      return report(p, oracle_prp(p, psi, cap, caps), witness);
    }
    RoundlessConstraint phi;
    if (!cover.empty()) {
      phi = cover_constraint(p.state_id(cover));
    } else if (!target.empty()) {
      phi = target_constraint(p, p.state_id(target));
    } else if (!constraint.empty()) {
      phi = parse_roundless_constraint(p, load_constraint_text(constraint));
    } else {
      throw CLI::ValidationError("oracle", "give a constraint file, --cover or --target");
    }
    if (!export_path.empty()) write_file(export_path, export_reach(p, reach_roundless(p, caps)));
    return report(p, oracle_prp(p, phi, caps), witness);
  }

  int run_replay(const std::string& protocol, const std::string& trace_path) {
    Protocol p = load_protocol(protocol);
    Trace trace = parse_trace(p, read_file(trace_path));
    try {
      if (const auto* e = std::get_if<Execution>(&trace)) {
        out_ << format_configuration(p, replay(p, *e)) << "\n";
      } else {
        out_ << format_configuration(p, replay(p, std::get<ConcreteExecution>(trace))) << "\n";
      }
    } catch (const NotEnabledError& e) {
      err_ << "replay failed at step " << e.step_index() << ": " << e.reason() << "\n";
      return 1;
    }
    return 0;
  }

  int run_gen_sat(std::mt19937_64& rng, std::uint64_t seed, int vars, int clauses, bool target,
                  const std::string& dir) {
    CnfFormula f = random_cnf(rng, vars, clauses);
    auto [p, q] = target ? sat_to_uninit_target(f) : sat_to_cover(f);
    RoundlessConstraint phi = target ? target_constraint(p, q) : cover_constraint(q);
    bool sat = cnf_satisfiable(f);
    json expected;
    expected["schema"] = 1;
    expected["problem"] = target ? "target" : "cover";
    expected["state"] = p.states[q];
    expected["answer"] = sat ? "positive" : "negative";
    expected["ground_truth"] = "truth-table satisfiability";
    expected["generator"] = target ? "sat-target" : "sat-cover";
    expected["seed"] = seed;
    expected["formula"] = format_cnf(f);
    return write_instance(dir, p, phi, expected);
  }

  int run_gen_cvp(std::mt19937_64& rng, std::uint64_t seed, int inputs, int gates, const std::string& circuit_path,
                  bool desired, const std::string& dir) {
    Circuit c = circuit_path.empty() ? random_circuit(rng, inputs, gates) : parse_circuit(read_file(circuit_path));
    auto [p, q] = cvp_to_cover(c, desired);
    bool value = evaluate_circuit(c);
    json expected;
    expected["schema"] = 1;
    expected["problem"] = "cover";
    expected["state"] = p.states[q];
    expected["answer"] = value == desired ? "positive" : "negative";
    expected["ground_truth"] = "direct circuit evaluation";
    expected["generator"] = "cvp";
    expected["seed"] = seed;
    expected["desired"] = desired;
    expected["circuit"] = format_circuit(c);
    return write_instance(dir, p, cover_constraint(q), expected);
  }

  int write_instance(const std::string& dir, const Protocol& p, const RoundlessConstraint& phi, const json& expected) {
    fs::path base(dir);
    write_file(base / "protocol.prot", serialize_protocol(p));
    write_file(base / "constraint.pc", format_constraint(p, phi) + "\n");
    write_file(base / "expected.json", expected.dump(2) + "\n");
    for (const char* name : {"protocol.prot", "constraint.pc", "expected.json"}) out_ << (base / name).string() << "\n";
    return 0;
  }

  int run_fmt(const std::string& protocol, const std::string& constraint) {
    Protocol p = load_protocol(protocol);
    if (constraint.empty()) {
      out_ << serialize_protocol(p);
    } else if (p.round_based()) {
      out_ << format_constraint(p, parse_round_constraint(p, load_constraint_text(constraint))) << "\n";
    } else {
      out_ << format_constraint(p, parse_roundless_constraint(p, load_constraint_text(constraint))) << "\n";
    }
    return 0;
  }

  int run_examples(const std::string& dir) {
    const auto& set = builtin_examples();
    for (const auto& np : set.protocols) {
      if (dir.empty()) {
        out_ << np.name << "\tprotocol\n";
      } else {
        write_file(fs::path(dir) / (np.name + ".prot"), serialize_protocol(np.protocol));
        out_ << (fs::path(dir) / (np.name + ".prot")).string() << "\n";
      }
    }
    for (const auto& nc : set.constraints) {
      if (dir.empty()) {
        out_ << nc.name << "\tconstraint on " << nc.protocol << "\n";
      } else {
        write_file(fs::path(dir) / (nc.name + ".pc"), nc.source + "\n");
        out_ << (fs::path(dir) / (nc.name + ".pc")).string() << "\n";
      }
    }
    return 0;
  }

  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Runner(out, err).run(args);
}

}  // namespace regverify::cli
