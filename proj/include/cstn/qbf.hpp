#pragma once

// Quantified 3-SAT with the strictly alternating prefix
// exists x1 forall y1 ... exists xn forall yn, solved by brute-force game-tree
// search, plus explicit winning strategies for either player.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cstn/core.hpp"

namespace cstn {

// Levels beyond this make the 4^n game tree impractical.
inline constexpr int kMaxQbfLevels = 12;

// Variable index v: level v / 2 + 1, existential (x) when v is even and
// universal (y) when odd. Equivalently, DIMACS variable v + 1.
struct QLiteral {
  int var = 0;
  bool positive = true;
  friend bool operator==(const QLiteral&, const QLiteral&) = default;
};

inline int x_var(int level) { return 2 * (level - 1); }
inline int y_var(int level) { return 2 * (level - 1) + 1; }

using Clause = std::array<QLiteral, 3>;

struct Q3SatFormula {
  int n = 0;
  std::vector<Clause> clauses;

  void validate() const {
    if (n < 0) throw ValidationError("formula must have a non-negative number of levels");
    for (const auto& c : clauses)
      for (const auto& l : c)
        if (l.var < 0 || l.var >= 2 * n) throw ValidationError("clause literal references an undeclared variable");
  }

  // A clause containing a literal and its complement.
  static bool tautological(const Clause& c) {
    for (const auto& a : c)
      for (const auto& b : c)
        if (a.var == b.var && a.positive != b.positive) return true;
    return false;
  }

  // Bit v of `assignment` is the value of variable v.
  bool matrix_holds(std::uint64_t assignment) const {
    for (const auto& c : clauses) {
      bool sat = false;
      for (const auto& l : c) sat = sat || (((assignment >> l.var) & 1U) == static_cast<std::uint64_t>(l.positive));
      if (!sat) return false;
    }
    return true;
  }

  friend bool operator==(const Q3SatFormula&, const Q3SatFormula&) = default;
};

// tables[i] is f_{i+1}: bit j of its input is y_{j+1}; size 2^i.
struct ExistentialStrategy {
  std::vector<std::vector<bool>> tables;

  bool choose(int level, std::uint64_t ys) const { return tables.at(level - 1).at(ys); }

  // All 2^(2^n - 1) existential tables for n levels, in lexicographic order.
  static std::vector<ExistentialStrategy> all(int n) {
    std::size_t entries = 0;
    for (int i = 0; i < n; ++i) entries += std::size_t{1} << i;
    if (entries > 20) throw CapacityError("too many existential tables to enumerate");
    std::vector<ExistentialStrategy> out;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << entries); ++code) {
      ExistentialStrategy f;
      std::size_t bit = 0;
      for (int i = 0; i < n; ++i) {
        f.tables.emplace_back(std::size_t{1} << i);
        for (std::size_t e = 0; e < f.tables.back().size(); ++e) f.tables.back()[e] = (code >> bit++) & 1U;
      }
      out.push_back(std::move(f));
    }
    return out;
  }

  friend bool operator==(const ExistentialStrategy&, const ExistentialStrategy&) = default;
};

// tables[i] is g_{i+1}: bit j of its input is x_{j+1}; size 2^(i+1).
struct UniversalStrategy {
  std::vector<std::vector<bool>> tables;

  bool choose(int level, std::uint64_t xs) const { return tables.at(level - 1).at(xs); }

  friend bool operator==(const UniversalStrategy&, const UniversalStrategy&) = default;
};

namespace detail {

inline void check_capacity(const Q3SatFormula& phi) {
  phi.validate();
  if (phi.n > kMaxQbfLevels) throw CapacityError("formula has more than " + std::to_string(kMaxQbfLevels) + " levels");
}

// Value of the game from the position where variables below 2*(level-1) are set.
inline bool existential_wins_from(const Q3SatFormula& phi, int level, std::uint64_t assignment) {
  if (level > phi.n) return phi.matrix_holds(assignment);
  for (int x = 0; x < 2; ++x) {
    const std::uint64_t ax = assignment | (std::uint64_t(x) << x_var(level));
    bool all = true;
    for (int y = 0; y < 2 && all; ++y)
      all = existential_wins_from(phi, level + 1, ax | (std::uint64_t(y) << y_var(level)));
    if (all) return true;
  }
  return false;
}

inline void fill_existential(const Q3SatFormula& phi, int level, std::uint64_t assignment, std::uint64_t ys,
                             ExistentialStrategy& f) {
  if (level > phi.n) return;
  for (int x = 0; x < 2; ++x) {
    const std::uint64_t ax = assignment | (std::uint64_t(x) << x_var(level));
    bool all = true;
    for (int y = 0; y < 2 && all; ++y)
      all = existential_wins_from(phi, level + 1, ax | (std::uint64_t(y) << y_var(level)));
    if (all) {
      f.tables[level - 1][ys] = x;
      for (int y = 0; y < 2; ++y)
        fill_existential(phi, level + 1, ax | (std::uint64_t(y) << y_var(level)), ys | (std::uint64_t(y) << (level - 1)),
                         f);
      return;
    }
  }
}

inline void fill_universal(const Q3SatFormula& phi, int level, std::uint64_t assignment, std::uint64_t xs,
                           UniversalStrategy& g) {
  if (level > phi.n) return;
  for (int x = 0; x < 2; ++x) {
    const std::uint64_t ax = assignment | (std::uint64_t(x) << x_var(level));
    const std::uint64_t xs2 = xs | (std::uint64_t(x) << (level - 1));
    for (int y = 0; y < 2; ++y) {
      const std::uint64_t axy = ax | (std::uint64_t(y) << y_var(level));
      if (!existential_wins_from(phi, level + 1, axy)) {
        g.tables[level - 1][xs2] = y;
        fill_universal(phi, level + 1, axy, xs2, g);
        break;
      }
    }
  }
}

}  // namespace detail

inline bool qbf_eval(const Q3SatFormula& phi) {
  detail::check_capacity(phi);
  return detail::existential_wins_from(phi, 1, 0);
}

inline std::optional<ExistentialStrategy> qbf_extract_existential(const Q3SatFormula& phi) {
  if (!qbf_eval(phi)) return std::nullopt;
  ExistentialStrategy f;
  for (int i = 0; i < phi.n; ++i) f.tables.emplace_back(std::size_t{1} << i, false);
  detail::fill_existential(phi, 1, 0, 0, f);
  return f;
}

inline std::optional<UniversalStrategy> qbf_extract_universal(const Q3SatFormula& phi) {
  if (qbf_eval(phi)) return std::nullopt;
  UniversalStrategy g;
  for (int i = 0; i < phi.n; ++i) g.tables.emplace_back(std::size_t{1} << (i + 1), false);
  detail::fill_universal(phi, 1, 0, 0, g);
  return g;
}

// Assignment produced when x follows f against the universal reply sequence ys.
inline std::uint64_t play(const Q3SatFormula& phi, const ExistentialStrategy& f, std::uint64_t ys) {
  std::uint64_t a = 0;
  for (int i = 1; i <= phi.n; ++i) {
    const std::uint64_t prefix = ys & ((std::uint64_t{1} << (i - 1)) - 1);
    a |= std::uint64_t(f.choose(i, prefix)) << x_var(i);
    a |= ((ys >> (i - 1)) & 1U) << y_var(i);
  }
  return a;
}

// Assignment produced when y follows g against the existential sequence xs.
inline std::uint64_t play(const Q3SatFormula& phi, const UniversalStrategy& g, std::uint64_t xs) {
  std::uint64_t a = 0;
  for (int i = 1; i <= phi.n; ++i) {
    const std::uint64_t prefix = xs & ((std::uint64_t{1} << i) - 1);
    a |= ((xs >> (i - 1)) & 1U) << x_var(i);
    a |= std::uint64_t(g.choose(i, prefix)) << y_var(i);
  }
  return a;
}

// Replays f against every universal reply sequence.
inline bool existential_wins(const Q3SatFormula& phi, const ExistentialStrategy& f) {
  for (std::uint64_t ys = 0; ys < (std::uint64_t{1} << phi.n); ++ys)
    if (!phi.matrix_holds(play(phi, f, ys))) return false;
  return true;
}

// Replays g against every existential move sequence.
inline bool universal_wins(const Q3SatFormula& phi, const UniversalStrategy& g) {
  for (std::uint64_t xs = 0; xs < (std::uint64_t{1} << phi.n); ++xs)
    if (phi.matrix_holds(play(phi, g, xs))) return false;
  return true;
}

}  // namespace cstn
