#pragma once

// Dynamic controllability of discrete CSTNs by exhaustive AND-OR search over
// configurations (time, partial schedule, observed partial scenario).
//
// The planner picks a next action (a later grid index and a nonempty set of
// unscheduled tasks); nature answers with the values of the propositions those
// tasks observe. A configuration is winning when it is terminal with a
// feasible schedule in every compatible scenario, or when some next action
// leads to a winning configuration for every observation outcome. Each level
// of the recursion schedules at least one task, so the stack never holds more
// than |T| frames and only the current path is kept in memory.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "cstn/core.hpp"
#include "cstn/stn.hpp"
#include "cstn/strategy.hpp"

namespace cstn {

// Time grid derived from a (w, W)-discrete network: K = 2^|P| * |T|,
// mu = w / K, M = 2 K^2 W. Controllable networks admit strategies whose
// times are k * mu with k in {1, ..., M}.
struct DiscretizationParams {
  Rational w{1};
  std::int64_t W = 1;
  std::int64_t K = 1;
  Rational mu{1};
  std::int64_t M = 0;

  // Grid steps per unit of w. Always K.
  std::int64_t ticks_per_unit() const {
    const Rational r = w / mu;
    return r.numerator();
  }

  friend bool operator==(const DiscretizationParams&, const DiscretizationParams&) = default;
};

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw CapacityError("discretization constants overflow 64-bit integers");
  return out;
}

}  // namespace detail

// An empty network is treated as having one task so that mu stays defined.
inline DiscretizationParams discretize(const Cstn& g) {
  if (g.num_props() > 61) throw CapacityError("too many propositions to discretize");
  DiscretizationParams p;
  p.w = g.unit();
  p.W = g.bound();
  const auto tasks = static_cast<std::int64_t>(std::max<std::size_t>(g.num_tasks(), 1));
  p.K = detail::checked_mul(std::int64_t{1} << g.num_props(), tasks);
  p.mu = p.w / Rational(p.K);
  p.M = detail::checked_mul(detail::checked_mul(2, detail::checked_mul(p.K, p.K)), p.W);
  return p;
}

// Grid index standing for the initial time; first actions happen at index >= 1.
inline constexpr std::int64_t kInitialTime = 0;

struct Configuration {
  std::int64_t now = kInitialTime;
  Schedule psi;  // grid indices, tick mu
  PartialScenario h;

  static Configuration initial(const Cstn& g, const DiscretizationParams& params) {
    return Configuration{kInitialTime, Schedule(g.num_tasks(), params.mu), {}};
  }
};

struct NextAction {
  std::int64_t at = 0;
  TaskSet tasks;
};

// Checks the configuration invariants against the network and grid.
inline void validate_configuration(const Cstn& g, const Configuration& c, const DiscretizationParams& params) {
  if (c.psi.num_tasks() != g.num_tasks()) throw DomainError("configuration schedule has the wrong number of tasks");
  if (c.psi.tick() != params.mu) throw DomainError("configuration schedule is not on the mu grid");
  if (c.now != kInitialTime && (c.now < 1 || c.now > params.M)) throw DomainError("configuration time outside the grid");
  for (std::size_t t : c.psi.domain().members()) {
    const std::int64_t k = *c.psi.at(t);
    if (k < 1 || k > params.M || k > c.now) throw DomainError("configuration schedules a task outside {1..now}");
  }
  if (c.h.domain() != g.props_observed_by(c.psi.domain()))
    throw DomainError("configuration scenario must assign exactly the propositions already observed");
}

// c[t_next / T_next, o]; outcome bit j is the value of the j-th observed
// proposition in ascending order.
inline Configuration apply(const Cstn& g, const Configuration& c, const NextAction& a, std::uint64_t outcome) {
  if (a.at <= c.now) throw DomainError("next action must happen after the configuration time");
  if (a.tasks.empty() || a.tasks.intersects(c.psi.domain())) throw DomainError("next action must run new tasks");
  Configuration out = c;
  out.now = a.at;
  for (std::size_t t : a.tasks.members()) out.psi.set(t, a.at);
  std::size_t j = 0;
  for (std::size_t p : g.props_observed_by(a.tasks).members()) out.h.assign(p, (outcome >> j++) & 1U);
  return out;
}

enum class TerminalStatus { TerminalDc, NotTerminal, TerminalNotDc };

inline TerminalStatus is_terminal_and_dc(const Cstn& g, const Configuration& c) {
  const TaskSet dom = c.psi.domain();
  TerminalStatus status = TerminalStatus::TerminalDc;
  bool done = false;
  for_each_completion(c.h, g.num_props(), [&](const Scenario& s) {
    if (done) return;
    if (g.tasks_in(s) != dom) {
      status = TerminalStatus::NotTerminal;
      done = true;
    } else if (status == TerminalStatus::TerminalDc && schedule_satisfies(c.psi, project(g, s))) {
      status = TerminalStatus::TerminalNotDc;
    }
  });
  return status;
}

struct SolverOptions {
  // Sound pruning of configurations that cannot be winning. Disabling it runs
  // the plain enumeration.
  bool prune = true;
  // Maximum number of memoised configurations; 0 disables the cache.
  std::size_t cache_limit = 0;
};

struct SolverStats {
  std::uint64_t nodes = 0;
  std::size_t max_depth = 0;
  std::uint64_t cache_hits = 0;
  double elapsed_ms = 0;
};

// Ascending set of grid indices the planner may pick from: either the full
// range {1..M} or an explicit list.
class Grid {
 public:
  static Grid range(std::int64_t first, std::int64_t last) {
    Grid g;
    g.first_ = first;
    g.last_ = last;
    return g;
  }
  static Grid points(std::vector<std::int64_t> pts) {
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (pts[i] <= pts[i - 1]) throw DomainError("grid must be strictly increasing");
    Grid g;
    g.points_ = std::move(pts);
    g.explicit_ = true;
    return g;
  }

  std::optional<std::int64_t> next_after(std::int64_t k) const {
    if (explicit_) {
      auto it = std::upper_bound(points_.begin(), points_.end(), k);
      return it == points_.end() ? std::nullopt : std::optional<std::int64_t>(*it);
    }
    const std::int64_t n = std::max(k + 1, first_);
    return n <= last_ ? std::optional<std::int64_t>(n) : std::nullopt;
  }

  std::optional<std::int64_t> last() const {
    if (explicit_) return points_.empty() ? std::nullopt : std::optional<std::int64_t>(points_.back());
    return first_ <= last_ ? std::optional<std::int64_t>(last_) : std::nullopt;
  }

 private:
  bool explicit_ = false;
  std::vector<std::int64_t> points_;
  std::int64_t first_ = 1;
  std::int64_t last_ = 0;
};

namespace detail {

class Search {
 public:
  Search(const Cstn& g, const DiscretizationParams& params, Grid grid, const SolverOptions& opt)
      : g_(g), params_(params), grid_(std::move(grid)), opt_(opt), ticks_(params.ticks_per_unit()) {
    for (const auto& c : g.constraints())
      constraints_.push_back({c.from, c.to, checked_mul(c.bound, ticks_), c.label});
  }

  bool run(const Configuration& c, TreeNode* out) {
    State st;
    st.times.assign(g_.num_tasks(), kUnset);
    for (std::size_t t : c.psi.domain().members()) st.times[t] = *c.psi.at(t);
    st.scheduled = c.psi.domain();
    st.h = c.h;
    st.now = c.now;
    const auto start = std::chrono::steady_clock::now();
    const bool ok = solve(st, 0, out);
    stats_.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return ok;
  }

  const SolverStats& stats() const { return stats_; }

 private:
  static constexpr std::int64_t kUnset = -1;

  struct TickConstraint {
    std::size_t from, to;
    std::int64_t bound;
    Label label;
  };

  struct State {
    std::vector<std::int64_t> times;
    TaskSet scheduled;
    PartialScenario h;
    std::int64_t now = kInitialTime;
  };

  struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const {
      std::size_t h = 1469598103934665603ULL;
      for (std::int64_t x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ULL;
      return h;
    }
  };

  std::vector<std::int64_t> key_of(const State& st) const {
    std::vector<std::int64_t> k = st.times;
    k.push_back(static_cast<std::int64_t>(st.h.domain().bits()));
    k.push_back(static_cast<std::int64_t>(st.h.true_props().bits()));
    return k;
  }

  TaskSet tasks_in(const Scenario& s) const { return g_.tasks_in(s); }

  TerminalStatus terminal(const State& st) const {
    TerminalStatus status = TerminalStatus::TerminalDc;
    bool done = false;
    for_each_completion(st.h, g_.num_props(), [&](const Scenario& s) {
      if (done) return;
      if (tasks_in(s) != st.scheduled) {
        status = TerminalStatus::NotTerminal;
        done = true;
        return;
      }
      if (status != TerminalStatus::TerminalDc) return;
      for (const auto& c : constraints_)
        if (satisfies(s, c.label) && st.times[c.to] - st.times[c.from] > c.bound) {
          status = TerminalStatus::TerminalNotDc;
          break;
        }
    });
    return status;
  }

  // False when no completion of the configuration can be winning:
  //  - a scheduled task is not executed in some compatible scenario;
  //  - a constraint between scheduled tasks is violated and applies in some
  //    compatible scenario (nature can always reach that scenario);
  //  - for some compatible scenario, the scheduled times cannot be extended to
  //    a feasible schedule with the remaining tasks on later grid points.
  bool viable(const State& st) {
    for (std::size_t t : st.scheduled.members())
      if (label_holds(st.h, g_.task_label(t)) != Truth::True) return false;
    for (const auto& c : constraints_)
      if (st.scheduled.contains(c.from) && st.scheduled.contains(c.to) &&
          st.times[c.to] - st.times[c.from] > c.bound && label_holds(st.h, c.label) != Truth::False)
        return false;

    const auto next = grid_.next_after(st.now);
    const auto last = grid_.last();
    const std::size_t origin = g_.num_tasks();
    bool ok = true;
    for_each_completion(st.h, g_.num_props(), [&](const Scenario& s) {
      if (!ok) return;
      const TaskSet ts = tasks_in(s);
      const TaskSet rest = ts - st.scheduled;
      if (rest.empty()) return;  // covered by the terminal check
      if (!next) {
        ok = false;
        return;
      }
      edges_.clear();
      for (std::size_t t : st.scheduled.members()) {
        edges_.push_back({origin, t, st.times[t]});
        edges_.push_back({t, origin, -st.times[t]});
      }
      for (std::size_t t : rest.members()) {
        edges_.push_back({origin, t, *last});
        edges_.push_back({t, origin, -*next});
      }
      for (const auto& c : constraints_)
        if (satisfies(s, c.label)) edges_.push_back({c.from, c.to, c.bound});
      if (!shortest_from_virtual_source(origin + 1, edges_, dist_)) ok = false;
    });
    return ok;
  }

  bool solve(State& st, std::size_t depth, TreeNode* out) {
    ++stats_.nodes;
    stats_.max_depth = std::max(stats_.max_depth, depth);

    if (opt_.prune && !viable(st)) return false;

    std::vector<std::int64_t> key;
    if (opt_.cache_limit > 0) {
      key = key_of(st);
      auto it = cache_.find(key);
      if (it != cache_.end() && (!it->second || out == nullptr)) {
        ++stats_.cache_hits;
        return it->second;
      }
    }

    const bool ok = expand(st, depth, out);
    if (opt_.cache_limit > 0 && cache_.size() < opt_.cache_limit) cache_.emplace(std::move(key), ok);
    return ok;
  }

  bool expand(State& st, std::size_t depth, TreeNode* out) {
    switch (terminal(st)) {
      case TerminalStatus::TerminalDc:
        if (out) *out = TreeNode::leaf();
        return true;
      case TerminalStatus::TerminalNotDc:
        return false;
      case TerminalStatus::NotTerminal:
        break;
    }

    TaskSet candidates = g_.all_tasks() - st.scheduled;
    if (opt_.prune) {
      // Running a task whose label is not yet known to hold is never winning.
      for (std::size_t t : candidates.members())
        if (label_holds(st.h, g_.task_label(t)) != Truth::True) candidates.erase(t);
    }
    if (candidates.empty()) return false;

    const std::uint64_t cand = candidates.bits();
    for (auto k = grid_.next_after(st.now); k; k = grid_.next_after(*k)) {
      for (std::uint64_t sub = (0 - cand) & cand; sub != 0; sub = (sub - cand) & cand) {
        const TaskSet exec = TaskSet::from_bits(sub);
        const std::vector<std::size_t> observed = g_.props_observed_by(exec).members();
        const std::size_t outcomes = std::size_t{1} << observed.size();

        const State saved_head{{}, st.scheduled, st.h, st.now};
        for (std::size_t t : exec.members()) st.times[t] = *k;
        st.scheduled = st.scheduled | exec;
        st.now = *k;

        std::vector<TreeNode> children(out ? outcomes : 0);
        bool all = true;
        for (std::size_t o = 0; o < outcomes && all; ++o) {
          PartialScenario h = saved_head.h;
          for (std::size_t j = 0; j < observed.size(); ++j) h.assign(observed[j], (o >> j) & 1U);
          st.h = h;
          all = solve(st, depth + 1, out ? &children[o] : nullptr);
        }

        for (std::size_t t : exec.members()) st.times[t] = kUnset;
        st.scheduled = saved_head.scheduled;
        st.h = saved_head.h;
        st.now = saved_head.now;

        if (all) {
          if (out) *out = TreeNode::action(*k, exec, std::move(children));
          return true;
        }
      }
    }
    return false;
  }

  const Cstn& g_;
  DiscretizationParams params_;
  Grid grid_;
  SolverOptions opt_;
  std::int64_t ticks_;
  std::vector<TickConstraint> constraints_;
  std::vector<WeightedEdge> edges_;
  std::vector<std::int64_t> dist_;
  std::unordered_map<std::vector<std::int64_t>, bool, KeyHash> cache_;
  SolverStats stats_;
};

}  // namespace detail

class Solver {
 public:
  explicit Solver(const Cstn& g, SolverOptions opt = {}) : Solver(g, discretize(g), opt) {}
  Solver(const Cstn& g, DiscretizationParams params, SolverOptions opt = {})
      : g_(g), params_(params), opt_(opt) {
    if (params_.mu <= 0 || (params_.w / params_.mu).denominator() != 1)
      throw DomainError("grid step mu must divide the network unit w");
    if (params_.w != g.unit()) throw DomainError("discretization unit differs from the network unit");
  }

  const DiscretizationParams& params() const { return params_; }
  const SolverStats& stats() const { return stats_; }

  bool dc() { return dc_from(Configuration::initial(g_, params_)); }

  bool dc_from(const Configuration& c) {
    validate_configuration(g_, c, params_);
    return run(c, full_grid(), nullptr);
  }

  std::optional<TreeStrategy> extract() { return extract_on(full_grid()); }

  // Restricts next-action times to the given grid indices. A true verdict is
  // a certificate; a false one only says no strategy lives on this grid.
  bool dc_bounded(std::span<const std::int64_t> grid) {
    return run(Configuration::initial(g_, params_), bounded_grid(grid), nullptr);
  }

  std::optional<TreeStrategy> extract_bounded(std::span<const std::int64_t> grid) {
    return extract_on(bounded_grid(grid));
  }

 private:
  Grid full_grid() const { return Grid::range(1, params_.M); }

  Grid bounded_grid(std::span<const std::int64_t> grid) const {
    for (std::int64_t k : grid)
      if (k < 1 || k > params_.M) throw DomainError("grid index " + std::to_string(k) + " outside {1..M}");
    return Grid::points({grid.begin(), grid.end()});
  }

  std::optional<TreeStrategy> extract_on(Grid grid) {
    TreeStrategy tree;
    tree.tick = params_.mu;
    if (!run(Configuration::initial(g_, params_), std::move(grid), &tree.root)) return std::nullopt;
    return tree;
  }

  bool run(const Configuration& c, Grid grid, TreeNode* out) {
    detail::Search search(g_, params_, std::move(grid), opt_);
    const bool ok = search.run(c, out);
    stats_ = search.stats();
    return ok;
  }

  const Cstn& g_;
  DiscretizationParams params_;
  SolverOptions opt_;
  SolverStats stats_;
};

inline bool dc(const Cstn& g, SolverOptions opt = {}) { return Solver(g, opt).dc(); }

inline bool dc_from(const Cstn& g, const Configuration& c, const DiscretizationParams& params,
                    SolverOptions opt = {}) {
  return Solver(g, params, opt).dc_from(c);
}

inline std::optional<TreeStrategy> dc_extract(const Cstn& g, SolverOptions opt = {}) {
  return Solver(g, opt).extract();
}

inline bool dc_bounded(const Cstn& g, std::span<const std::int64_t> grid, SolverOptions opt = {}) {
  return Solver(g, opt).dc_bounded(grid);
}

}  // namespace cstn
