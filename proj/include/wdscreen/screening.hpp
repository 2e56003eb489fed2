#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wdscreen/core_data.hpp"
#include "wdscreen/measures.hpp"

namespace wdscreen {

/// Integer part of n / ln(n): 200 -> 37, 230 -> 42.
inline std::size_t cutoff(std::size_t n) {
  if (n < 2) throw ArgumentError("cutoff needs n >= 2");
  const double nd = static_cast<double>(n);
  return static_cast<std::size_t>(std::floor(nd / std::log(nd)));
}

/// Feature indices in descending utility order; ties go to the lower index.
inline std::vector<std::size_t> rank_features(const ScoreTable& t) {
  std::vector<std::size_t> order(t.utilities.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return t.utilities[a] > t.utilities[b]; });
  return order;
}

struct ScreeningResult {
  std::vector<std::size_t> ranking;
  // 1-based rank of each true feature, in true-set order.
  std::vector<std::size_t> true_ranks;
  std::size_t model_size = 0;
  std::size_t cutoff = 0;
  std::vector<bool> selected;

  bool all_selected() const { return std::all_of(selected.begin(), selected.end(), [](bool b) { return b; }); }
};

inline ScreeningResult evaluate(const ScoreTable& t, const TrueSet& truth, std::size_t n,
                                std::optional<std::size_t> cutoff_override = std::nullopt) {
  if (truth.empty()) throw ArgumentError("evaluate needs a nonempty true set");
  ScreeningResult r;
  r.ranking = rank_features(t);
  r.cutoff = cutoff_override ? *cutoff_override : cutoff(n);
  std::vector<std::size_t> position(r.ranking.size());
  for (std::size_t pos = 0; pos < r.ranking.size(); ++pos) position[r.ranking[pos]] = pos + 1;
  for (const auto& e : truth.entries) {
    if (e.feature >= position.size()) throw IndexError("true feature outside the score table");
    const std::size_t rank = position[e.feature];
    r.true_ranks.push_back(rank);
    r.selected.push_back(rank <= r.cutoff);
    r.model_size = std::max(r.model_size, rank);
  }
  return r;
}

struct CriteriaTable {
  std::vector<double> individual;  // P_s per true feature
  double overall = 0.0;            // P_a
  std::size_t replicates = 0;
};

inline CriteriaTable aggregate(const std::vector<ScreeningResult>& results) {
  CriteriaTable c;
  c.replicates = results.size();
  if (results.empty()) return c;
  const std::size_t m = results.front().selected.size();
  c.individual.assign(m, 0.0);
  std::size_t all = 0;
  for (const auto& r : results) {
    if (r.selected.size() != m) throw ArgumentError("replicates disagree on the number of true features");
    for (std::size_t j = 0; j < m; ++j) c.individual[j] += r.selected[j] ? 1.0 : 0.0;
    all += r.all_selected() ? 1 : 0;
  }
  const double reps = static_cast<double>(results.size());
  for (auto& v : c.individual) v /= reps;
  c.overall = static_cast<double>(all) / reps;
  return c;
}

inline std::vector<std::string> top_k(const ScoreTable& t, std::size_t k, const std::vector<std::string>& names) {
  if (names.size() != t.utilities.size())
    throw ArgumentError("top_k: " + std::to_string(names.size()) + " labels for " +
                        std::to_string(t.utilities.size()) + " utilities");
  const auto order = rank_features(t);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) out.push_back(names[order[i]]);
  return out;
}

/// Labels common to every selection, in lexicographic order.
inline std::vector<std::string> intersect_selections(const std::vector<std::vector<std::string>>& sets) {
  if (sets.empty()) return {};
  std::set<std::string> acc(sets.front().begin(), sets.front().end());
  for (std::size_t s = 1; s < sets.size(); ++s) {
    const std::set<std::string> next(sets[s].begin(), sets[s].end());
    std::set<std::string> keep;
    std::set_intersection(acc.begin(), acc.end(), next.begin(), next.end(), std::inserter(keep, keep.end()));
    acc = std::move(keep);
  }
  return {acc.begin(), acc.end()};
}

}  // namespace wdscreen
