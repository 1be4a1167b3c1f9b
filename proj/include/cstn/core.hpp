#pragma once

// Data model for conditional simple temporal networks: labels, scenarios,
// schedules, labeled constraints and the network itself.
//
// Tasks and propositions are dense indices into the owning Cstn. Sets of them
// are 64-bit masks, which caps a network at 64 tasks and 62 propositions.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace cstn {

using Rational = boost::rational<std::int64_t>;

inline constexpr std::size_t kMaxTasks = 64;
inline constexpr std::size_t kMaxProps = 62;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ParseError : public Error {
 public:
  using Error::Error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class DomainError : public Error {
 public:
  using Error::Error;
};
class CapacityError : public Error {
 public:
  using Error::Error;
};

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Set of small indices backed by one machine word. Tag keeps task sets and
// proposition sets from mixing.
template <class Tag>
class IndexSet {
 public:
  constexpr IndexSet() = default;
  static constexpr IndexSet from_bits(std::uint64_t bits) {
    IndexSet s;
    s.bits_ = bits;
    return s;
  }
  static constexpr IndexSet range(std::size_t n) {
    return from_bits(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }
  static constexpr IndexSet single(std::size_t i) { return from_bits(std::uint64_t{1} << i); }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool contains(std::size_t i) const { return (bits_ >> i) & 1U; }
  constexpr void insert(std::size_t i) { bits_ |= std::uint64_t{1} << i; }
  constexpr void erase(std::size_t i) { bits_ &= ~(std::uint64_t{1} << i); }
  constexpr bool subset_of(IndexSet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr bool intersects(IndexSet o) const { return (bits_ & o.bits_) != 0; }

  friend constexpr IndexSet operator|(IndexSet a, IndexSet b) { return from_bits(a.bits_ | b.bits_); }
  friend constexpr IndexSet operator&(IndexSet a, IndexSet b) { return from_bits(a.bits_ & b.bits_); }
  friend constexpr IndexSet operator-(IndexSet a, IndexSet b) { return from_bits(a.bits_ & ~b.bits_); }
  friend constexpr bool operator==(IndexSet, IndexSet) = default;

  // Members in ascending order.
  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    out.reserve(size());
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    return out;
  }

 private:
  std::uint64_t bits_ = 0;
};

struct TaskTag {};
struct PropTag {};
using TaskSet = IndexSet<TaskTag>;
using PropSet = IndexSet<PropTag>;

enum class Truth { False, True, Undetermined };

struct Literal {
  std::size_t prop = 0;
  bool positive = true;
  friend bool operator==(const Literal&, const Literal&) = default;
};

// Conjunction of literals over distinct propositions. The empty label is the
// always-true label. Stored as two disjoint masks, so equal labels compare
// equal regardless of how they were built.
class Label {
 public:
  Label() = default;
  Label(std::initializer_list<Literal> lits) {
    for (const auto& l : lits) add(l);
  }

  // Repeating a literal is harmless; adding its complement throws.
  Label& add(Literal l) {
    if (l.prop >= kMaxProps) throw ValidationError("label literal on proposition index out of range");
    if ((l.positive ? neg_ : pos_).contains(l.prop))
      throw ValidationError("label contains complementary literals on proposition " + std::to_string(l.prop));
    (l.positive ? pos_ : neg_).insert(l.prop);
    return *this;
  }

  bool empty() const { return pos_.empty() && neg_.empty(); }
  PropSet positive() const { return pos_; }
  PropSet negative() const { return neg_; }
  PropSet props() const { return pos_ | neg_; }

  // Conjunction-of-literals implication: every literal of other appears here.
  bool implies(const Label& other) const { return other.pos_.subset_of(pos_) && other.neg_.subset_of(neg_); }

  std::optional<Label> conjoin(const Label& other) const {
    if (pos_.intersects(other.neg_) || neg_.intersects(other.pos_)) return std::nullopt;
    Label out;
    out.pos_ = pos_ | other.pos_;
    out.neg_ = neg_ | other.neg_;
    return out;
  }

  std::vector<Literal> literals() const {
    std::vector<Literal> out;
    for (std::size_t p : props().members()) out.push_back({p, pos_.contains(p)});
    return out;
  }

  friend bool operator==(const Label&, const Label&) = default;

 private:
  PropSet pos_;
  PropSet neg_;
};

// Partial assignment of propositions; values outside the domain are zero.
class PartialScenario {
 public:
  PartialScenario() = default;
  PartialScenario(PropSet domain, PropSet values) : domain_(domain), values_(values & domain) {}

  PropSet domain() const { return domain_; }
  PropSet true_props() const { return values_; }
  bool assigned(std::size_t p) const { return domain_.contains(p); }
  bool value(std::size_t p) const { return values_.contains(p); }

  PartialScenario& assign(std::size_t p, bool v) {
    domain_.insert(p);
    if (v)
      values_.insert(p);
    else
      values_.erase(p);
    return *this;
  }

  friend bool operator==(const PartialScenario&, const PartialScenario&) = default;

 private:
  PropSet domain_;
  PropSet values_;
};

// Total assignment over propositions 0..num_props-1. The bit pattern doubles as
// the scenario's index in dense tables.
class Scenario {
 public:
  Scenario() = default;
  Scenario(std::uint64_t bits, std::size_t num_props) : bits_(bits & PropSet::range(num_props).bits()), size_(num_props) {}

  std::uint64_t index() const { return bits_; }
  std::size_t num_props() const { return size_; }
  bool value(std::size_t p) const { return (bits_ >> p) & 1U; }

  // s[v/p]
  Scenario with(std::size_t p, bool v) const {
    Scenario out = *this;
    if (v)
      out.bits_ |= std::uint64_t{1} << p;
    else
      out.bits_ &= ~(std::uint64_t{1} << p);
    return out;
  }

  PartialScenario as_partial() const {
    return PartialScenario(PropSet::range(size_), PropSet::from_bits(bits_));
  }

  // Restriction of this scenario to the given propositions.
  PartialScenario restrict_to(PropSet props) const { return PartialScenario(props, PropSet::from_bits(bits_)); }

  bool extends(const PartialScenario& h) const {
    return ((bits_ ^ h.true_props().bits()) & h.domain().bits()) == 0;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;

 private:
  std::uint64_t bits_ = 0;
  std::size_t size_ = 0;
};

inline std::uint64_t scenario_count(std::size_t num_props) {
  if (num_props > kMaxProps) throw CapacityError("too many propositions to enumerate scenarios");
  return std::uint64_t{1} << num_props;
}

// Calls fn(Scenario) for every completion of h over num_props propositions,
// in ascending index order.
template <class Fn>
void for_each_completion(const PartialScenario& h, std::size_t num_props, Fn&& fn) {
  const std::uint64_t free = (PropSet::range(num_props) - h.domain()).bits();
  const std::uint64_t fixed = h.true_props().bits();
  std::uint64_t sub = 0;
  do {
    fn(Scenario(fixed | sub, num_props));
    sub = (sub - free) & free;
  } while (sub != 0);
}

inline Truth label_holds(const PartialScenario& h, const Label& l) {
  const PropSet dom = h.domain();
  const PropSet vals = h.true_props();
  // An assigned literal that disagrees falsifies the label.
  if ((l.positive() & dom).intersects(PropSet::from_bits(~vals.bits())) || (l.negative() & dom).intersects(vals))
    return Truth::False;
  return l.props().subset_of(dom) ? Truth::True : Truth::Undetermined;
}

inline Truth label_holds(const Scenario& s, const Label& l) { return label_holds(s.as_partial(), l); }

inline bool satisfies(const Scenario& s, const Label& l) {
  const std::uint64_t b = s.index();
  return (l.positive().bits() & ~b) == 0 && (l.negative().bits() & b) == 0;
}

// Y - X <= bound * w, with X = from and Y = to.
struct LabeledConstraint {
  std::size_t from = 0;
  std::size_t to = 0;
  std::int64_t bound = 0;
  Label label;
  friend bool operator==(const LabeledConstraint&, const LabeledConstraint&) = default;
};

// Indices of constraints whose label does not imply the labels of both endpoints.
inline std::vector<std::size_t> wd1_violations(const std::vector<LabeledConstraint>& constraints,
                                               const std::vector<Label>& task_labels) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& c = constraints[i];
    if (!c.label.implies(task_labels.at(c.from)) || !c.label.implies(task_labels.at(c.to))) out.push_back(i);
  }
  return out;
}

class CstnBuilder;

// A (w, W)-discrete CSTN. Immutable once built; every instance satisfies WD1,
// has an observation bijection and bounds within [-W, W].
class Cstn {
 public:
  Cstn() = default;

  std::size_t num_tasks() const { return task_names_.size(); }
  std::size_t num_props() const { return prop_names_.size(); }
  TaskSet all_tasks() const { return TaskSet::range(num_tasks()); }

  const std::string& task_name(std::size_t t) const { return task_names_.at(t); }
  const std::string& prop_name(std::size_t p) const { return prop_names_.at(p); }
  const Label& task_label(std::size_t t) const { return task_labels_.at(t); }
  const std::vector<Label>& task_labels() const { return task_labels_; }
  const std::vector<LabeledConstraint>& constraints() const { return constraints_; }

  // O(p)
  std::size_t observer(std::size_t p) const { return observer_.at(p); }
  // Inverse of O, if t is an observation task.
  std::optional<std::size_t> observed_prop(std::size_t t) const {
    const auto p = observed_.at(t);
    return p < 0 ? std::nullopt : std::optional<std::size_t>(static_cast<std::size_t>(p));
  }
  TaskSet observation_tasks() const { return obs_tasks_; }

  // Propositions observed by executing the given tasks.
  PropSet props_observed_by(TaskSet tasks) const {
    PropSet out;
    for (std::size_t t : (tasks & obs_tasks_).members()) out.insert(static_cast<std::size_t>(observed_[t]));
    return out;
  }

  const Rational& unit() const { return unit_; }
  std::int64_t bound() const { return bound_; }

  std::optional<std::size_t> find_task(const std::string& name) const { return lookup(task_index_, name); }
  std::optional<std::size_t> find_prop(const std::string& name) const { return lookup(prop_index_, name); }

  // T_s
  TaskSet tasks_in(const Scenario& s) const {
    TaskSet out;
    for (std::size_t t = 0; t < num_tasks(); ++t)
      if (satisfies(s, task_labels_[t])) out.insert(t);
    return out;
  }

  friend bool operator==(const Cstn& a, const Cstn& b) {
    return a.task_names_ == b.task_names_ && a.prop_names_ == b.prop_names_ && a.task_labels_ == b.task_labels_ &&
           a.constraints_ == b.constraints_ && a.observer_ == b.observer_ && a.unit_ == b.unit_ &&
           a.bound_ == b.bound_;
  }

 private:
  friend class CstnBuilder;

  static std::optional<std::size_t> lookup(const std::unordered_map<std::string, std::size_t>& m,
                                           const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  }

  std::vector<std::string> task_names_;
  std::vector<std::string> prop_names_;
  std::unordered_map<std::string, std::size_t> task_index_;
  std::unordered_map<std::string, std::size_t> prop_index_;
  std::vector<Label> task_labels_;
  std::vector<LabeledConstraint> constraints_;
  std::vector<std::size_t> observer_;
  std::vector<std::int64_t> observed_;
  TaskSet obs_tasks_;
  Rational unit_{1};
  std::int64_t bound_ = 1;
};

inline std::vector<std::size_t> validate_wd1(const Cstn& g) { return wd1_violations(g.constraints(), g.task_labels()); }

// Assembles a Cstn. When no explicit bound is set, W is the largest |k| among
// the constraints, and at least 1.
class CstnBuilder {
 public:
  std::size_t add_task(std::string name, Label label = {}) {
    task_names_.push_back(std::move(name));
    task_labels_.push_back(label);
    return task_names_.size() - 1;
  }

  std::size_t add_proposition(std::string name, std::size_t observer) {
    prop_names_.push_back(std::move(name));
    observer_.push_back(observer);
    return prop_names_.size() - 1;
  }

  // Y - X <= bound
  std::size_t add_constraint(std::size_t to, std::size_t from, std::int64_t bound, Label label = {}) {
    constraints_.push_back({from, to, bound, label});
    return constraints_.size() - 1;
  }

  void set_task_label(std::size_t t, Label label) { task_labels_.at(t) = label; }
  void set_unit(Rational w) { unit_ = w; }
  void set_bound(std::int64_t W) { bound_ = W; }

  std::size_t num_tasks() const { return task_names_.size(); }
  std::size_t num_props() const { return prop_names_.size(); }
  const std::vector<LabeledConstraint>& constraints() const { return constraints_; }
  const std::vector<Label>& task_labels() const { return task_labels_; }

  Cstn build() const {
    if (task_names_.size() > kMaxTasks) throw CapacityError("network has more than 64 tasks");
    if (prop_names_.size() > kMaxProps) throw CapacityError("network has more than 62 propositions");
    if (unit_ <= 0) throw ValidationError("time unit w must be positive");

    Cstn g;
    g.task_names_ = task_names_;
    g.prop_names_ = prop_names_;
    g.task_labels_ = task_labels_;
    g.constraints_ = constraints_;
    g.observer_ = observer_;
    g.unit_ = unit_;

    for (std::size_t t = 0; t < task_names_.size(); ++t) {
      check_name(task_names_[t], "task");
      if (!g.task_index_.emplace(task_names_[t], t).second)
        throw ValidationError("duplicate task name '" + task_names_[t] + "'");
    }
    for (std::size_t p = 0; p < prop_names_.size(); ++p) {
      check_name(prop_names_[p], "proposition");
      if (!g.prop_index_.emplace(prop_names_[p], p).second)
        throw ValidationError("duplicate proposition name '" + prop_names_[p] + "'");
    }

    const PropSet declared = PropSet::range(prop_names_.size());
    for (std::size_t t = 0; t < task_labels_.size(); ++t)
      if (!task_labels_[t].props().subset_of(declared))
        throw ValidationError("label of task '" + task_names_[t] + "' uses an undeclared proposition");

    g.observed_.assign(task_names_.size(), -1);
    for (std::size_t p = 0; p < observer_.size(); ++p) {
      const std::size_t t = observer_[p];
      if (t >= task_names_.size()) throw ValidationError("observation task of '" + prop_names_[p] + "' is undefined");
      if (g.observed_[t] >= 0)
        throw ValidationError("task '" + task_names_[t] + "' observes more than one proposition");
      g.observed_[t] = static_cast<std::int64_t>(p);
      g.obs_tasks_.insert(t);
    }

    std::int64_t max_abs = 0;
    for (const auto& c : constraints_) {
      if (c.from >= task_names_.size() || c.to >= task_names_.size())
        throw ValidationError("constraint references an undefined task");
      if (!c.label.props().subset_of(declared)) throw ValidationError("constraint label uses an undeclared proposition");
      if (c.bound == std::numeric_limits<std::int64_t>::min()) throw ValidationError("constraint bound out of range");
      max_abs = std::max(max_abs, c.bound < 0 ? -c.bound : c.bound);
    }
    g.bound_ = bound_.value_or(std::max<std::int64_t>(1, max_abs));
    if (g.bound_ < 0) throw ValidationError("bound W must be non-negative");
    if (max_abs > g.bound_)
      throw ValidationError("constraint bound " + std::to_string(max_abs) + " exceeds W = " + std::to_string(g.bound_));

    const auto bad = wd1_violations(constraints_, task_labels_);
    if (!bad.empty()) {
      std::ostringstream os;
      os << "WD1 violated by constraint";
      for (std::size_t i : bad) {
        const auto& c = constraints_[i];
        os << " #" << i << " (" << task_names_[c.to] << " - " << task_names_[c.from] << " <= " << c.bound << ")";
      }
      throw ValidationError(os.str());
    }
    return g;
  }

 private:
  static void check_name(const std::string& name, const char* what) {
    if (name.empty()) throw ValidationError(std::string("empty ") + what + " name");
    for (char ch : name)
      if (ch == ',' || ch == '=' || ch == '!' || ch == '#' || ch == '{' || ch == '}' ||
          static_cast<unsigned char>(ch) <= ' ')
        throw ValidationError(std::string("invalid character in ") + what + " name '" + name + "'");
  }

  std::vector<std::string> task_names_;
  std::vector<std::string> prop_names_;
  std::vector<Label> task_labels_;
  std::vector<LabeledConstraint> constraints_;
  std::vector<std::size_t> observer_;
  Rational unit_{1};
  std::optional<std::int64_t> bound_;
};

// Possibly partial assignment of grid indices to tasks; a task at index k runs
// at time k * tick.
class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(std::size_t num_tasks, Rational tick = 1) : times_(num_tasks), tick_(tick) {}

  std::size_t num_tasks() const { return times_.size(); }
  const Rational& tick() const { return tick_; }

  Schedule& set(std::size_t t, std::int64_t k) {
    times_.at(t) = k;
    return *this;
  }
  void unset(std::size_t t) { times_.at(t).reset(); }
  bool contains(std::size_t t) const { return times_.at(t).has_value(); }
  std::optional<std::int64_t> at(std::size_t t) const { return times_.at(t); }

  TaskSet domain() const {
    TaskSet out;
    for (std::size_t t = 0; t < times_.size(); ++t)
      if (times_[t]) out.insert(t);
    return out;
  }

  friend bool operator==(const Schedule&, const Schedule&) = default;

 private:
  std::vector<std::optional<std::int64_t>> times_;
  Rational tick_{1};
};

// Y - X <= bound * unit
struct StnConstraint {
  std::size_t from = 0;
  std::size_t to = 0;
  std::int64_t bound = 0;
  // Index of the labeled constraint this came from, when projected.
  std::size_t origin = 0;
  friend bool operator==(const StnConstraint&, const StnConstraint&) = default;
};

// Plain STN over a subset of a task index space. Edges run X -> Y with weight
// bound for every constraint Y - X <= bound.
struct Stn {
  std::size_t num_tasks = 0;
  TaskSet tasks;
  std::vector<StnConstraint> constraints;
  Rational unit{1};
  friend bool operator==(const Stn&, const Stn&) = default;
};

// Gamma_s: tasks whose label holds in s and constraints whose label holds in s.
inline Stn project(const Cstn& g, const Scenario& s) {
  if (s.num_props() != g.num_props()) throw DomainError("scenario does not range over the network's propositions");
  Stn out;
  out.num_tasks = g.num_tasks();
  out.tasks = g.tasks_in(s);
  out.unit = g.unit();
  const auto& cs = g.constraints();
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (satisfies(s, cs[i].label)) out.constraints.push_back({cs[i].from, cs[i].to, cs[i].bound, i});
  return out;
}

// First constraint of stn violated by psi, or nullopt when psi is feasible.
inline std::optional<std::size_t> schedule_satisfies(const Schedule& psi, const Stn& stn) {
  for (std::size_t i = 0; i < stn.constraints.size(); ++i) {
    const auto& c = stn.constraints[i];
    const auto x = c.from < psi.num_tasks() ? psi.at(c.from) : std::nullopt;
    const auto y = c.to < psi.num_tasks() ? psi.at(c.to) : std::nullopt;
    if (!x || !y) throw DomainError("schedule does not assign a task referenced by a constraint");
    if (Rational(*y - *x) * psi.tick() > Rational(c.bound) * stn.unit) return i;
  }
  return std::nullopt;
}

// "p,!q"; the empty label prints as "".
inline std::string format_label(const Cstn& g, const Label& l) {
  std::string out;
  for (const auto& lit : l.literals()) {
    if (!out.empty()) out += ',';
    if (!lit.positive) out += '!';
    out += g.prop_name(lit.prop);
  }
  return out;
}

}  // namespace cstn
