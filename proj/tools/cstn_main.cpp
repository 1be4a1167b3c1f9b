#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cstn/cli.hpp"

namespace {

// "-" reads standard input.
std::istream* open_input(const std::string& path, std::unique_ptr<std::ifstream>& holder) {
  if (path == "-") return &std::cin;
  holder = std::make_unique<std::ifstream>(path);
  if (!*holder) {
    std::cerr << "error: cannot open '" << path << "'\n";
    return nullptr;
  }
  return holder.get();
}

std::ostream* open_output(const std::string& path, std::unique_ptr<std::ofstream>& holder) {
  if (path.empty()) return nullptr;
  if (path == "-") return &std::cout;
  holder = std::make_unique<std::ofstream>(path);
  if (!*holder) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return nullptr;
  }
  return holder.get();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cstn::cli;
  CLI::App app{"Dynamic controllability of discrete conditional simple temporal networks"};
  app.require_subcommand(1);

  std::string network_path, strategy_path, formula_path, out_path, graph_path, witness_path;
  std::vector<std::int64_t> grid;
  bool extract = false, no_prune = false, ext_e = false, ext_u = false;

  auto* check = app.add_subcommand("check", "decide dynamic controllability of a network");
  check->add_option("network", network_path, "network file, - for stdin")->required();
  check->add_flag("--extract", extract, "print a winning strategy tree");
  check->add_flag("--no-prune", no_prune, "disable search pruning");
  check->add_option("--grid", grid, "restrict action times to these grid indices")->delimiter(',');

  auto* red = app.add_subcommand("reduce", "build the CSTN for a q3sat formula");
  red->add_option("formula", formula_path, "q3sat file, - for stdin")->required();
  red->add_option("-o,--output", out_path, "network output file (default stdout)");
  red->add_option("--graph", graph_path, "write a Graphviz rendering");
  red->add_option("--witness", witness_path, "write the witness strategy of a true formula");

  auto* ver = app.add_subcommand("verify", "check a strategy for viability and dynamicity");
  ver->add_option("network", network_path, "network file")->required();
  ver->add_option("strategy", strategy_path, "strategy file (tree or table)")->required();

  auto* qbf = app.add_subcommand("qbf", "evaluate a q3sat formula");
  qbf->add_option("formula", formula_path, "q3sat file, - for stdin")->required();
  qbf->add_flag("--extract-existential", ext_e, "print a winning existential strategy");
  qbf->add_flag("--extract-universal", ext_u, "print a winning universal strategy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  std::unique_ptr<std::ifstream> in1, in2;
  if (check->parsed()) {
    std::istream* in = open_input(network_path, in1);
    if (!in) return kExitInput;
    CheckOptions opt;
    opt.extract = extract;
    opt.prune = !no_prune;
    if (check->count("--grid")) opt.grid = grid;
    return cmd_check(*in, opt, std::cout, std::cerr);
  }
  if (red->parsed()) {
    std::istream* in = open_input(formula_path, in1);
    if (!in) return kExitInput;
    std::unique_ptr<std::ofstream> o1, o2, o3;
    std::ostream* out = out_path.empty() ? &std::cout : open_output(out_path, o1);
    ReduceOptions opt;
    opt.graph = open_output(graph_path, o2);
    opt.witness = open_output(witness_path, o3);
    if (!out || (!graph_path.empty() && !opt.graph) || (!witness_path.empty() && !opt.witness)) return kExitInput;
    return cmd_reduce(*in, opt, *out, std::cerr);
  }
  if (ver->parsed()) {
    std::istream* n = open_input(network_path, in1);
    std::istream* s = n ? open_input(strategy_path, in2) : nullptr;
    if (!n || !s) return kExitInput;
    return cmd_verify(*n, *s, std::cout, std::cerr);
  }
  std::istream* in = open_input(formula_path, in1);
  if (!in) return kExitInput;
  return cmd_qbf(*in, QbfOptions{ext_e, ext_u}, std::cout, std::cerr);
}
