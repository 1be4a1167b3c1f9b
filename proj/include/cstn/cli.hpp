#pragma once

// Subcommand bodies for the cstn tool. Each takes already-opened streams and
// returns the process exit code: 0 controllable / true / ok, 1 not
// controllable / false / a check failed, 2 input error.

#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cstn/io.hpp"
#include "cstn/qbf.hpp"
#include "cstn/reduction.hpp"
#include "cstn/solver.hpp"
#include "cstn/strategy.hpp"

namespace cstn::cli {

inline constexpr int kExitYes = 0;
inline constexpr int kExitNo = 1;
inline constexpr int kExitInput = 2;

struct CheckOptions {
  bool extract = false;
  bool prune = true;
  std::optional<std::vector<std::int64_t>> grid;
};

inline int cmd_check(std::istream& network, const CheckOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const Cstn g = parse_network(network);
    SolverOptions so;
    so.prune = opt.prune;
    Solver solver(g, so);
    bool ok = false;
    std::optional<TreeStrategy> tree;
    if (opt.extract) {
      tree = opt.grid ? solver.extract_bounded(*opt.grid) : solver.extract();
      ok = tree.has_value();
    } else {
      ok = opt.grid ? solver.dc_bounded(*opt.grid) : solver.dc();
    }
    const auto& p = solver.params();
    const auto& st = solver.stats();
    out << "controllable: " << (ok ? "true" : "false") << "\n"
        << "w: " << to_string(p.w) << "\n"
        << "W: " << p.W << "\n"
        << "K: " << p.K << "\n"
        << "mu: " << to_string(p.mu) << "\n"
        << "M: " << p.M << "\n"
        << "grid: " << (opt.grid ? "explicit" : "full") << "\n"
        << "nodes: " << st.nodes << "\n"
        << "max_depth: " << st.max_depth << "\n"
        << "elapsed_ms: " << std::fixed << std::setprecision(3) << st.elapsed_ms << "\n";
    if (tree) {
      out << "strategy:\n";
      print_tree(out, g, *tree);
    }
    return ok ? kExitYes : kExitNo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

struct ReduceOptions {
  std::ostream* graph = nullptr;    // DOT export
  std::ostream* witness = nullptr;  // witness strategy tree, true formulas only
};

inline int cmd_reduce(std::istream& formula, const ReduceOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const Q3SatFormula phi = parse_q3sat(formula);
    const ReductionInstance inst = reduce(phi);
    std::vector<std::string> notes;
    for (const auto& tag : inst.annotations) notes.push_back(describe(tag));
    out << "# reduction of a q3sat formula with n = " << phi.n << ", m = " << phi.clauses.size() << "\n";
    for (int j : inst.dropped_clauses) out << "# clause " << j << " is tautological and has no constraint\n";
    print_network(out, inst.cstn, notes);
    if (opt.graph) write_dot(*opt.graph, inst);
    if (opt.witness) {
      const auto f = qbf_extract_existential(phi);
      if (!f) {
        err << "error: formula is false, no witness strategy\n";
        return kExitNo;
      }
      print_tree(*opt.witness, inst.cstn, witness_strategy(phi, *f));
    }
    return kExitYes;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

namespace detail {

inline std::string describe_constraint(const Cstn& g, std::size_t i) {
  const auto& c = g.constraints()[i];
  std::string s = "#" + std::to_string(i) + " (" + g.task_name(c.to) + " - " + g.task_name(c.from) +
                  " <= " + std::to_string(c.bound);
  if (!c.label.empty()) s += ", " + format_label(g, c.label);
  return s + ")";
}

inline std::string describe_scenario(const Cstn& g, const Scenario& s) {
  return cstn::detail::format_assignment(g, PropSet::range(g.num_props()), s);
}

}  // namespace detail

inline int cmd_verify(std::istream& network, std::istream& strategy, std::ostream& out, std::ostream& err) {
  try {
    const Cstn g = parse_network(network);
    const TableStrategy sigma = parse_strategy(strategy, g);
    const auto v = verify_viable(g, sigma);
    const auto d = verify_dynamic(g, sigma);
    out << "viable: ";
    if (v)
      out << "violated in scenario " << detail::describe_scenario(g, v->scenario) << " by constraint "
          << detail::describe_constraint(g, v->constraint) << "\n";
    else
      out << "ok\n";
    out << "dynamic: ";
    if (d)
      out << "violated: task " << g.task_name(d->task) << " runs at " << d->time << " in scenario "
          << detail::describe_scenario(g, d->scenario) << " but not in " << detail::describe_scenario(g, d->other)
          << " with the same history\n";
    else
      out << "ok\n";
    return v || d ? kExitNo : kExitYes;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

struct QbfOptions {
  bool extract_existential = false;
  bool extract_universal = false;
};

inline int cmd_qbf(std::istream& formula, const QbfOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const Q3SatFormula phi = parse_q3sat(formula);
    const bool value = qbf_eval(phi);
    out << "value: " << (value ? "true" : "false") << "\n";
    auto bits = [](const std::vector<bool>& t) {
      std::string s;
      for (bool b : t) s += b ? '1' : '0';
      return s;
    };
    if (opt.extract_existential) {
      if (const auto f = qbf_extract_existential(phi))
        for (std::size_t i = 0; i < f->tables.size(); ++i) out << "f" << i + 1 << ": " << bits(f->tables[i]) << "\n";
      else
        out << "existential: none\n";
    }
    if (opt.extract_universal) {
      if (const auto g = qbf_extract_universal(phi))
        for (std::size_t i = 0; i < g->tables.size(); ++i) out << "g" << i + 1 << ": " << bits(g->tables[i]) << "\n";
      else
        out << "universal: none\n";
    }
    return value ? kExitYes : kExitNo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace cstn::cli
