#pragma once

// Line-oriented text formats. '#' starts a comment anywhere on a line.
//
// Network:
//   unit 1/2
//   bound 3                          (optional; defaults to max |k|, at least 1)
//   task A
//   task B label p,!q
//   observes p O
//   constraint B - A <= 2 label p    (B - A <= 2w under p)
//
// Strategy tree (times are grid indices of `tick`, default w):
//   tick 1/4
//   at 3 exec O
//     on p=0 { at 4 exec A terminal }
//     on p=1 { terminal }
//
// Strategy table:
//   table
//   tick 1
//   row p=0 exec O=1,A=2
//
// Q3SAT: "q3sat n m" then m clauses of three nonzero integers; 2i-1 is x_i and
// 2i is y_i, negative means negated. Lines starting with 'c' are comments.

#include <charconv>
#include <cstdint>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cstn/core.hpp"
#include "cstn/qbf.hpp"
#include "cstn/strategy.hpp"

namespace cstn {

namespace detail {

struct Token {
  std::string text;
  std::size_t line = 0;
};

inline std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

// Whitespace-separated tokens; '{' and '}' are always tokens of their own.
inline std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) out.push_back({std::move(cur), no});
      cur.clear();
    };
    for (char ch : strip_comment(line)) {
      if (ch == '{' || ch == '}') {
        flush();
        out.push_back({std::string(1, ch), no});
      } else if (static_cast<unsigned char>(ch) <= ' ') {
        flush();
      } else {
        cur += ch;
      }
    }
    flush();
  }
  return out;
}

inline std::vector<std::vector<Token>> split_lines(std::istream& in) {
  std::vector<std::vector<Token>> lines;
  for (auto& tok : tokenize(in)) {
    if (lines.empty() || lines.back().back().line != tok.line) lines.emplace_back();
    lines.back().push_back(std::move(tok));
  }
  return lines;
}

[[noreturn]] inline void fail(std::size_t line, const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + ": " + msg);
}

inline std::int64_t parse_int(const std::string& s, std::size_t line) {
  std::int64_t v = 0;
  const char* end = s.data() + s.size();
  const char* b = s.data();
  if (b != end && *b == '+') ++b;
  const auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || p != end || b == end) fail(line, "expected an integer, got '" + s + "'");
  return v;
}

inline Rational parse_rational(const std::string& s, std::size_t line) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(parse_int(s, line));
  const std::int64_t num = parse_int(s.substr(0, slash), line);
  const std::int64_t den = parse_int(s.substr(slash + 1), line);
  if (den == 0) fail(line, "zero denominator in '" + s + "'");
  return Rational(num, den);
}

inline std::vector<std::string> split_commas(const std::string& s, std::size_t line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (cur.empty()) fail(line, "empty item in list '" + s + "'");
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (cur.empty()) fail(line, "empty item in list '" + s + "'");
  out.push_back(std::move(cur));
  return out;
}

template <class Lookup>
Label parse_label(const std::string& s, std::size_t line, Lookup&& prop) {
  Label out;
  for (const auto& item : split_commas(s, line)) {
    const bool neg = item[0] == '!';
    const std::string name = neg ? item.substr(1) : item;
    const auto p = prop(name);
    if (!p) fail(line, "unknown proposition '" + name + "'");
    try {
      out.add({*p, !neg});
    } catch (const ValidationError& e) {
      fail(line, e.what());
    }
  }
  return out;
}

// "p=0,q=1" -> (domain, values); "-" is the empty assignment.
inline PartialScenario parse_assignment(const Cstn& g, const std::string& s, std::size_t line) {
  PartialScenario h;
  if (s == "-") return h;
  for (const auto& item : split_commas(s, line)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(line, "expected prop=0|1, got '" + item + "'");
    const auto p = g.find_prop(item.substr(0, eq));
    if (!p) fail(line, "unknown proposition '" + item.substr(0, eq) + "'");
    const std::string v = item.substr(eq + 1);
    if (v != "0" && v != "1") fail(line, "proposition value must be 0 or 1, got '" + v + "'");
    if (h.assigned(*p)) fail(line, "proposition '" + g.prop_name(*p) + "' assigned twice");
    h.assign(*p, v == "1");
  }
  return h;
}

inline std::string format_assignment(const Cstn& g, PropSet props, const Scenario& s) {
  if (props.empty()) return "-";
  std::string out;
  for (std::size_t p : props.members()) {
    if (!out.empty()) out += ',';
    out += g.prop_name(p) + "=" + (s.value(p) ? "1" : "0");
  }
  return out;
}

inline std::string format_tasks(const Cstn& g, TaskSet tasks) {
  std::string out;
  for (std::size_t t : tasks.members()) {
    if (!out.empty()) out += ',';
    out += g.task_name(t);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------- network

inline Cstn parse_network(std::istream& in) {
  using detail::fail;
  const auto lines = detail::split_lines(in);

  // Pass 1: names, so labels may mention propositions declared further down.
  std::map<std::string, std::size_t> tasks;
  std::map<std::string, std::size_t> props;
  for (const auto& l : lines) {
    const std::string& kw = l[0].text;
    if (kw == "task") {
      if (l.size() != 2 && !(l.size() == 4 && l[2].text == "label")) fail(l[0].line, "expected 'task <name> [label <lits>]'");
      if (!tasks.emplace(l[1].text, tasks.size()).second) fail(l[0].line, "duplicate task '" + l[1].text + "'");
    } else if (kw == "observes") {
      if (l.size() != 3) fail(l[0].line, "expected 'observes <prop> <task>'");
      if (!props.emplace(l[1].text, props.size()).second) fail(l[0].line, "duplicate proposition '" + l[1].text + "'");
    } else if (kw != "unit" && kw != "bound" && kw != "constraint") {
      fail(l[0].line, "unknown directive '" + kw + "'");
    }
  }
  auto find_prop = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = props.find(name);
    return it == props.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  };
  auto task_of = [&](const detail::Token& tok) {
    auto it = tasks.find(tok.text);
    if (it == tasks.end()) fail(tok.line, "unknown task '" + tok.text + "'");
    return it->second;
  };

  CstnBuilder b;
  bool have_unit = false;
  bool have_bound = false;
  for (const auto& l : lines) {
    const std::string& kw = l[0].text;
    const std::size_t no = l[0].line;
    if (kw == "task") {
      b.add_task(l[1].text, l.size() == 4 ? detail::parse_label(l[3].text, no, find_prop) : Label{});
    } else if (kw == "observes") {
      b.add_proposition(l[1].text, task_of(l[2]));
    } else if (kw == "unit") {
      if (l.size() != 2) fail(no, "expected 'unit <rational>'");
      if (have_unit) fail(no, "unit given twice");
      b.set_unit(detail::parse_rational(l[1].text, no));
      have_unit = true;
    } else if (kw == "bound") {
      if (l.size() != 2) fail(no, "expected 'bound <integer>'");
      if (have_bound) fail(no, "bound given twice");
      b.set_bound(detail::parse_int(l[1].text, no));
      have_bound = true;
    } else if (kw == "constraint") {
      if (!((l.size() == 6) || (l.size() == 8 && l[6].text == "label")) || l[2].text != "-" || l[4].text != "<=")
        fail(no, "expected 'constraint <Y> - <X> <= <k> [label <lits>]'");
      const Label label = l.size() == 8 ? detail::parse_label(l[7].text, no, find_prop) : Label{};
      b.add_constraint(task_of(l[1]), task_of(l[3]), detail::parse_int(l[5].text, no), label);
    }
  }
  return b.build();
}

inline Cstn parse_network(const std::string& text) {
  std::istringstream in(text);
  return parse_network(in);
}

// Optional per-constraint trailing comments (e.g. gadget tags).
inline void print_network(std::ostream& os, const Cstn& g, const std::vector<std::string>& notes = {}) {
  os << "unit " << to_string(g.unit()) << "\n";
  os << "bound " << g.bound() << "\n";
  for (std::size_t t = 0; t < g.num_tasks(); ++t) {
    os << "task " << g.task_name(t);
    if (!g.task_label(t).empty()) os << " label " << format_label(g, g.task_label(t));
    os << "\n";
  }
  for (std::size_t p = 0; p < g.num_props(); ++p)
    os << "observes " << g.prop_name(p) << " " << g.task_name(g.observer(p)) << "\n";
  for (std::size_t i = 0; i < g.constraints().size(); ++i) {
    const auto& c = g.constraints()[i];
    os << "constraint " << g.task_name(c.to) << " - " << g.task_name(c.from) << " <= " << c.bound;
    if (!c.label.empty()) os << " label " << format_label(g, c.label);
    if (i < notes.size() && !notes[i].empty()) os << "  # " << notes[i];
    os << "\n";
  }
}

inline std::string network_to_string(const Cstn& g) {
  std::ostringstream os;
  print_network(os, g);
  return os.str();
}

// --------------------------------------------------------------- strategy

namespace detail {

class TreeParser {
 public:
  TreeParser(const Cstn& g, std::vector<Token> toks) : g_(g), toks_(std::move(toks)) {}

  TreeStrategy parse() {
    TreeStrategy tree;
    tree.tick = g_.unit();
    if (peek("tick")) {
      next();
      const Token& t = need("time unit after 'tick'");
      tree.tick = parse_rational(t.text, t.line);
      if (tree.tick <= 0) fail(t.line, "tick must be positive");
    }
    tree.root = node();
    if (pos_ != toks_.size()) fail(toks_[pos_].line, "unexpected '" + toks_[pos_].text + "' after the strategy");
    return tree;
  }

 private:
  bool peek(const char* s) const { return pos_ < toks_.size() && toks_[pos_].text == s; }
  const Token& next() { return toks_[pos_++]; }
  const Token& need(const std::string& what) {
    if (pos_ >= toks_.size()) fail(toks_.empty() ? 0 : toks_.back().line, "unexpected end of input, expected " + what);
    return next();
  }
  void expect(const char* s) {
    const Token& t = need(std::string("'") + s + "'");
    if (t.text != s) fail(t.line, std::string("expected '") + s + "', got '" + t.text + "'");
  }

  TreeNode node() {
    const Token& head = need("'at' or 'terminal'");
    if (head.text == "terminal") return TreeNode::leaf();
    if (head.text != "at") fail(head.line, "expected 'at' or 'terminal', got '" + head.text + "'");
    const Token& at = need("a grid index");
    const std::int64_t k = parse_int(at.text, at.line);
    expect("exec");
    const Token& list = need("a task list");
    TaskSet exec;
    for (const auto& name : split_commas(list.text, list.line)) {
      const auto t = g_.find_task(name);
      if (!t) fail(list.line, "unknown task '" + name + "'");
      if (exec.contains(*t)) fail(list.line, "task '" + name + "' listed twice");
      exec.insert(*t);
    }
    const PropSet observed = g_.props_observed_by(exec);
    const std::size_t outcomes = std::size_t{1} << observed.size();
    if (observed.empty()) return TreeNode::action(k, exec, {node()});

    std::vector<std::optional<TreeNode>> kids(outcomes);
    for (std::size_t i = 0; i < outcomes; ++i) {
      expect("on");
      const Token& a = need("an outcome");
      const PartialScenario h = parse_assignment(g_, a.text, a.line);
      if (h.domain() != observed) fail(a.line, "outcome must assign exactly the propositions observed at this node");
      const std::size_t idx = outcome_index(observed, Scenario(h.true_props().bits(), g_.num_props()));
      if (kids[idx]) fail(a.line, "outcome '" + a.text + "' given twice");
      expect("{");
      kids[idx] = node();
      expect("}");
    }
    std::vector<TreeNode> children;
    for (auto& c : kids) children.push_back(std::move(*c));
    return TreeNode::action(k, exec, std::move(children));
  }

  const Cstn& g_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline void print_node(std::ostream& os, const Cstn& g, const TreeNode& n, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  if (n.terminal) {
    os << pad << "terminal\n";
    return;
  }
  os << pad << "at " << n.at << " exec " << format_tasks(g, n.exec) << "\n";
  const PropSet observed = g.props_observed_by(n.exec);
  if (observed.empty()) {
    print_node(os, g, n.children.at(0), depth);
    return;
  }
  const std::vector<std::size_t> ps = observed.members();
  for (std::size_t o = 0; o < n.children.size(); ++o) {
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < ps.size(); ++j)
      if ((o >> j) & 1U) bits |= std::uint64_t{1} << ps[j];
    os << pad << "on " << format_assignment(g, observed, Scenario(bits, g.num_props())) << " {\n";
    print_node(os, g, n.children[o], depth + 1);
    os << pad << "}\n";
  }
}

}  // namespace detail

// The result is structurally validated against g.
inline TreeStrategy parse_tree(std::istream& in, const Cstn& g) {
  detail::TreeParser p(g, detail::tokenize(in));
  TreeStrategy tree = p.parse();
  validate_tree(g, tree);
  return tree;
}

inline void print_tree(std::ostream& os, const Cstn& g, const TreeStrategy& tree) {
  os << "tick " << to_string(tree.tick) << "\n";
  detail::print_node(os, g, tree.root, 0);
}

inline TableStrategy parse_table(std::istream& in, const Cstn& g) {
  using detail::fail;
  const auto lines = detail::split_lines(in);
  if (lines.empty() || lines[0].size() != 1 || lines[0][0].text != "table") fail(1, "expected 'table'");
  std::size_t i = 1;
  Rational tick = g.unit();
  if (i < lines.size() && lines[i][0].text == "tick") {
    if (lines[i].size() != 2) fail(lines[i][0].line, "expected 'tick <rational>'");
    tick = detail::parse_rational(lines[i][1].text, lines[i][0].line);
    if (tick <= 0) fail(lines[i][0].line, "tick must be positive");
    ++i;
  }
  if (g.num_props() > kMaxTableProps) throw CapacityError("too many propositions for a dense strategy table");
  std::vector<std::optional<Schedule>> rows(scenario_count(g.num_props()));
  for (; i < lines.size(); ++i) {
    const auto& l = lines[i];
    const std::size_t no = l[0].line;
    if (l.size() != 4 || l[0].text != "row" || l[2].text != "exec") fail(no, "expected 'row <assignment> exec <T=k,...>'");
    const PartialScenario h = detail::parse_assignment(g, l[1].text, no);
    if (h.domain() != PropSet::range(g.num_props())) fail(no, "row must assign every proposition");
    const std::uint64_t idx = h.true_props().bits();
    if (rows[idx]) fail(no, "row for this scenario given twice");
    Schedule psi(g.num_tasks(), tick);
    if (l[3].text != "-") {
      for (const auto& item : detail::split_commas(l[3].text, no)) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) fail(no, "expected task=k, got '" + item + "'");
        const auto t = g.find_task(item.substr(0, eq));
        if (!t) fail(no, "unknown task '" + item.substr(0, eq) + "'");
        if (psi.contains(*t)) fail(no, "task '" + g.task_name(*t) + "' scheduled twice");
        psi.set(*t, detail::parse_int(item.substr(eq + 1), no));
      }
    }
    rows[idx] = std::move(psi);
  }
  std::vector<Schedule> out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (!rows[k]) throw IncompleteStrategyError("table has no row for scenario " + std::to_string(k));
    out.push_back(std::move(*rows[k]));
  }
  return TableStrategy(g, tick, std::move(out));
}

inline void print_table(std::ostream& os, const Cstn& g, const TableStrategy& sigma) {
  os << "table\ntick " << to_string(sigma.tick()) << "\n";
  for (std::uint64_t k = 0; k < sigma.rows().size(); ++k) {
    const Scenario s(k, g.num_props());
    const Schedule& row = sigma.row(s);
    std::string exec;
    for (std::size_t t : row.domain().members()) {
      if (!exec.empty()) exec += ',';
      exec += g.task_name(t) + "=" + std::to_string(*row.at(t));
    }
    os << "row " << detail::format_assignment(g, PropSet::range(g.num_props()), s) << " exec "
       << (exec.empty() ? "-" : exec) << "\n";
  }
}

// Either format, converted to a table.
inline TableStrategy parse_strategy(std::istream& in, const Cstn& g) {
  const std::string text(std::istreambuf_iterator<char>(in), {});
  std::istringstream probe(text);
  const auto toks = detail::tokenize(probe);
  std::istringstream body(text);
  if (!toks.empty() && toks[0].text == "table") return parse_table(body, g);
  return tree_to_table(g, parse_tree(body, g));
}

// ------------------------------------------------------------------ q3sat

inline Q3SatFormula parse_q3sat(std::istream& in) {
  using detail::fail;
  std::vector<std::vector<detail::Token>> lines;
  for (auto& l : detail::split_lines(in))
    if (l[0].text != "c") lines.push_back(std::move(l));
  if (lines.empty()) fail(1, "missing 'q3sat n m' header");
  const auto& hdr = lines[0];
  if (hdr.size() != 3 || hdr[0].text != "q3sat") fail(hdr[0].line, "expected 'q3sat <n> <m>'");
  Q3SatFormula phi;
  const std::int64_t n = detail::parse_int(hdr[1].text, hdr[0].line);
  const std::int64_t m = detail::parse_int(hdr[2].text, hdr[0].line);
  if (n < 0 || m < 0) fail(hdr[0].line, "n and m must be non-negative");
  if (n > 1000) fail(hdr[0].line, "n is unreasonably large");
  phi.n = static_cast<int>(n);
  if (static_cast<std::int64_t>(lines.size()) - 1 != m)
    fail(lines.back()[0].line, "header announces " + std::to_string(m) + " clauses, found " +
                                   std::to_string(lines.size() - 1));
  for (std::size_t j = 1; j < lines.size(); ++j) {
    const auto& l = lines[j];
    if (l.size() != 3) fail(l[0].line, "a clause has exactly three literals");
    Clause c;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::int64_t v = detail::parse_int(l[k].text, l[k].line);
      if (v == 0 || v > 2 * n || v < -2 * n) fail(l[k].line, "literal " + l[k].text + " out of range");
      c[k] = {static_cast<int>((v < 0 ? -v : v) - 1), v > 0};
    }
    phi.clauses.push_back(c);
  }
  return phi;
}

inline Q3SatFormula parse_q3sat(const std::string& text) {
  std::istringstream in(text);
  return parse_q3sat(in);
}

inline void print_q3sat(std::ostream& os, const Q3SatFormula& phi) {
  os << "q3sat " << phi.n << " " << phi.clauses.size() << "\n";
  for (const auto& c : phi.clauses) {
    for (std::size_t k = 0; k < 3; ++k) os << (k ? " " : "") << (c[k].positive ? "" : "-") << c[k].var + 1;
    os << "\n";
  }
}

}  // namespace cstn
