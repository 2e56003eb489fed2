#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "wdscreen/transport/types.hpp"

namespace wdscreen {

namespace detail {

// Primal network simplex for the uncapacitated transportation problem
// (m sources with supplies a, k sinks with demands b, dense m x k arcs).
//
// The spanning tree hangs off an artificial root; every node starts on an
// artificial arc, following the classic LEMON initialisation, and the
// leaving-arc rule keeps the tree strongly feasible so degenerate pivots cannot
// cycle. Subtrees are tracked with intrusive child lists, which is all the
// re-rooting step and the potential update need.
class TransportationSimplex {
 public:
  TransportationSimplex(const Vector& a, const Vector& b, const Matrix& cost)
      : m_(static_cast<std::size_t>(a.size())),
        k_(static_cast<std::size_t>(b.size())),
        node_count_(m_ + k_ + 1),
        root_(m_ + k_),
        arc_count_(m_ * k_) {
    cost_.resize(arc_count_);
    double max_cost = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < k_; ++j) {
        const double c = cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        cost_[i * k_ + j] = c;
        max_cost = std::max(max_cost, std::abs(c));
      }
    art_cost_ = (max_cost + 1.0) * static_cast<double>(node_count_);
    eps_ = 64.0 * std::numeric_limits<double>::epsilon() * art_cost_;

    flow_.assign(arc_count_ + node_count_ - 1, 0.0);
    state_.assign(arc_count_, kLower);
    parent_.assign(node_count_, kNone);
    pred_.assign(node_count_, kNone);
    up_.assign(node_count_, 0);
    depth_.assign(node_count_, 0);
    first_child_.assign(node_count_, kNone);
    next_sib_.assign(node_count_, kNone);
    prev_sib_.assign(node_count_, kNone);
    pi_.assign(node_count_, 0.0);
    art_up_.assign(node_count_ - 1, 0);

    for (std::size_t u = 0; u + 1 < node_count_; ++u) {
      const double supply = u < m_ ? a(static_cast<Eigen::Index>(u)) : -b(static_cast<Eigen::Index>(u - m_));
      const std::size_t e = arc_count_ + u;
      parent_[u] = root_;
      pred_[u] = e;
      depth_[u] = 1;
      link_child(root_, u);
      if (supply >= 0.0) {
        art_up_[u] = 1;
        up_[u] = 1;
        flow_[e] = supply;
        pi_[u] = 0.0;
      } else {
        art_up_[u] = 0;
        up_[u] = 0;
        flow_[e] = -supply;
        pi_[u] = art_cost_;
      }
    }
    block_size_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(arc_count_)))));
  }

  void run() {
    std::size_t in_arc = 0;
    while (find_entering_arc(in_arc)) pivot(in_arc);
  }

  // Mass left on artificial arcs; nonzero means the supplies were unbalanced.
  double artificial_flow() const {
    double s = 0.0;
    for (std::size_t e = arc_count_; e < flow_.size(); ++e) s += flow_[e];
    return s;
  }

  Matrix coupling() const {
    Matrix p(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(k_));
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < k_; ++j)
        p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flow_[i * k_ + j];
    return p;
  }

  double total_cost() const {
    double s = 0.0;
    for (std::size_t e = 0; e < arc_count_; ++e) s += flow_[e] * cost_[e];
    return s;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  static constexpr std::int8_t kLower = 1;
  static constexpr std::int8_t kTree = 0;

  std::size_t source(std::size_t e) const {
    if (e < arc_count_) return e / k_;
    const std::size_t u = e - arc_count_;
    return art_up_[u] ? u : root_;
  }
  std::size_t target(std::size_t e) const {
    if (e < arc_count_) return m_ + e % k_;
    const std::size_t u = e - arc_count_;
    return art_up_[u] ? root_ : u;
  }
  double arc_cost(std::size_t e) const {
    if (e < arc_count_) return cost_[e];
    return art_up_[e - arc_count_] ? 0.0 : art_cost_;
  }

  void link_child(std::size_t parent, std::size_t child) {
    prev_sib_[child] = kNone;
    next_sib_[child] = first_child_[parent];
    if (first_child_[parent] != kNone) prev_sib_[first_child_[parent]] = child;
    first_child_[parent] = child;
  }

  void unlink_child(std::size_t parent, std::size_t child) {
    if (prev_sib_[child] != kNone)
      next_sib_[prev_sib_[child]] = next_sib_[child];
    else
      first_child_[parent] = next_sib_[child];
    if (next_sib_[child] != kNone) prev_sib_[next_sib_[child]] = prev_sib_[child];
    prev_sib_[child] = next_sib_[child] = kNone;
  }

  // Block search pricing over the real arcs.
  bool find_entering_arc(std::size_t& in_arc) {
    double best = -eps_;
    bool found = false;
    std::size_t cnt = block_size_;
    std::size_t e = next_arc_;
    std::size_t i = e / k_;
    std::size_t j = e % k_;
    for (std::size_t scanned = 0; scanned < arc_count_; ++scanned) {
      if (state_[e] == kLower) {
        const double rc = cost_[e] + pi_[i] - pi_[m_ + j];
        if (rc < best) {
          best = rc;
          in_arc = e;
          found = true;
        }
      }
      ++e;
      if (++j == k_) {
        j = 0;
        ++i;
      }
      if (e == arc_count_) {
        e = 0;
        i = 0;
        j = 0;
      }
      if (--cnt == 0) {
        if (found) break;
        cnt = block_size_;
      }
    }
    next_arc_ = e;
    return found;
  }

  void pivot(std::size_t in_arc) {
    const std::size_t first = source(in_arc);
    const std::size_t second = target(in_arc);

    std::size_t a = first, b = second;
    while (depth_[a] > depth_[b]) a = parent_[a];
    while (depth_[b] > depth_[a]) b = parent_[b];
    while (a != b) {
      a = parent_[a];
      b = parent_[b];
    }
    const std::size_t join = a;

    // Leaving arc: strict comparison on the source side, non-strict on the
    // target side keeps the basis strongly feasible.
    double delta = std::numeric_limits<double>::infinity();
    std::size_t u_out = kNone;
    int side = 0;
    for (std::size_t u = first; u != join; u = parent_[u]) {
      if (up_[u] && flow_[pred_[u]] < delta) {
        delta = flow_[pred_[u]];
        u_out = u;
        side = 1;
      }
    }
    for (std::size_t u = second; u != join; u = parent_[u]) {
      if (!up_[u] && flow_[pred_[u]] <= delta) {
        delta = flow_[pred_[u]];
        u_out = u;
        side = 2;
      }
    }

    // Transportation problems are bounded, so a blocking arc always exists.
    if (u_out == kNone) throw Error("network simplex: unbounded pivot (inconsistent basis)");

    if (delta > 0.0) {
      flow_[in_arc] += delta;
      for (std::size_t u = first; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? -delta : delta;
      for (std::size_t u = second; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? delta : -delta;
    }
    // The arc that hit zero may carry rounding residue; pin it.
    flow_[pred_[u_out]] = 0.0;

    const std::size_t out_arc = pred_[u_out];
    if (out_arc < arc_count_) state_[out_arc] = kLower;
    state_[in_arc] = kTree;

    const std::size_t u_in = side == 1 ? first : second;
    const std::size_t v_in = side == 1 ? second : first;

    // Reverse the tree path u_in -> u_out and hang it below v_in.
    path_.clear();
    for (std::size_t w = u_in; w != u_out; w = parent_[w]) path_.push_back(w);
    path_.push_back(u_out);
    unlink_child(parent_[u_out], u_out);
    for (std::size_t idx = path_.size() - 1; idx >= 1; --idx) {
      const std::size_t w = path_[idx];
      const std::size_t c = path_[idx - 1];
      unlink_child(w, c);
      parent_[w] = c;
      pred_[w] = pred_[c];
      up_[w] = up_[c] ? 0 : 1;
      link_child(c, w);
    }
    parent_[u_in] = v_in;
    pred_[u_in] = in_arc;
    up_[u_in] = (first == u_in) ? 1 : 0;
    link_child(v_in, u_in);

    const double rc = arc_cost(in_arc) + pi_[first] - pi_[second];
    const double sigma = (u_in == second) ? rc : -rc;

    stack_.clear();
    stack_.push_back(u_in);
    depth_[u_in] = depth_[v_in] + 1;
    while (!stack_.empty()) {
      const std::size_t w = stack_.back();
      stack_.pop_back();
      pi_[w] += sigma;
      for (std::size_t c = first_child_[w]; c != kNone; c = next_sib_[c]) {
        depth_[c] = depth_[w] + 1;
        stack_.push_back(c);
      }
    }
  }

  std::size_t m_, k_, node_count_, root_, arc_count_;
  std::vector<double> cost_;
  double art_cost_ = 0.0;
  double eps_ = 0.0;
  std::vector<double> flow_;
  std::vector<std::int8_t> state_;
  std::vector<std::size_t> parent_, pred_;
  std::vector<std::uint8_t> up_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> first_child_, next_sib_, prev_sib_;
  std::vector<double> pi_;
  std::vector<std::uint8_t> art_up_;
  std::size_t block_size_ = 10;
  std::size_t next_arc_ = 0;
  std::vector<std::size_t> path_, stack_;
};

}  // namespace detail

/// Exact discrete optimal transport between weight vectors a (m) and b (k)
/// under an m x k ground cost, solved by network simplex.
inline TransportPlan ot_exact(const Vector& a, const Vector& b, const Matrix& cost) {
  check_weights(a, "source");
  check_weights(b, "target");
  check_cost(cost, a.size(), b.size());
  detail::TransportationSimplex simplex(a, b, cost);
  simplex.run();
  TransportPlan plan;
  plan.coupling = simplex.coupling();
  plan.cost = simplex.total_cost();
  return plan;
}

inline TransportPlan ot_exact(const DiscreteMeasure& src, const DiscreteMeasure& dst, const Matrix& cost) {
  check_measure(src, "source");
  check_measure(dst, "target");
  return ot_exact(src.weights, dst.weights, cost);
}

}  // namespace wdscreen
