#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

#include "dual_simplex.hpp"
#include "flexsched/errors.hpp"
#include "flexsched/solver.hpp"

namespace flexsched {

using detail::DualSimplex;
using detail::LpStatus;
using detail::VarStatus;

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::FeasibleGapLimit: return "feasible_gap_limit";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Aborted: return "aborted";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double relative_gap(double incumbent, double bound) {
  return std::max(0.0, incumbent - bound) / std::max(1.0, std::fabs(incumbent));
}

void check_well_formed(const LinearModel& model) {
  const auto issues = model.check();
  if (!issues.empty()) throw ValidationError("malformed model: " + issues.front());
}

struct BoundChange {
  int var;
  double lower;
  double upper;
};

struct Node {
  double bound = 0;
  long id = 0;
  std::vector<BoundChange> changes;
  std::shared_ptr<const std::vector<VarStatus>> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const LinearModel& model, const SolveOptions& opts)
      : model_(model), opts_(opts), lp_(model) {
    for (int j = 0; j < model.num_variables(); ++j) {
      if (model.variables()[static_cast<std::size_t>(j)].kind == VarKind::Binary) binaries_.push_back(j);
    }
  }

  Solution run(std::span<const double> seed) {
    start_ = Clock::now();
    lp_.set_deadline(start_ + std::chrono::duration_cast<Clock::duration>(
                                  std::chrono::duration<double>(std::min(opts_.time_limit_s, 1e9))));
    if (!seed.empty()) offer_seed(seed);

    Solution out;
    const LpStatus root = solve_node({});
    if (root == LpStatus::Unbounded) {
      out.status = SolveStatus::Unbounded;
      return finish(out);
    }
    if (root == LpStatus::Infeasible) {
      out.status = has_incumbent() ? SolveStatus::Optimal : SolveStatus::Infeasible;
      return finish(out);
    }

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    bool limit_hit = root == LpStatus::IterationLimit;
    std::vector<Node> backtrack;
    std::vector<BoundChange> path;
    bool diving = !limit_hit;
    double node_obj = lp_.objective();

    // Plunge from the current LP solution, push the sibling, and return to
    // the best open node when the dive ends.
    while (!limit_hit) {
      if (diving) {
        ++nodes_;
        const int branch_var = pick_branch_variable();
        if (node_obj >= prune_level()) {
          record_pruned(node_obj);
          diving = false;
        } else if (branch_var < 0) {
          accept_integral(path);
          diving = false;
        } else {
          const double v = lp_.value(branch_var);
          auto basis = std::make_shared<const std::vector<VarStatus>>(lp_.basis());
          const bool up_first = v >= 0.5;
          std::vector<BoundChange> sibling = path;
          sibling.push_back({branch_var, up_first ? 0.0 : 1.0, up_first ? 0.0 : 1.0});
          Node node{node_obj, next_id_++, std::move(sibling), basis};
          if (has_incumbent()) open.push(std::move(node));
          else backtrack.push_back(std::move(node));
          path.push_back({branch_var, up_first ? 1.0 : 0.0, up_first ? 1.0 : 0.0});
          const LpStatus st = solve_node(path);
          if (st == LpStatus::IterationLimit) {
            limit_hit = true;
            break;
          }
          if (st != LpStatus::Optimal) {
            diving = false;
          } else {
            node_obj = lp_.objective();
          }
        }
      }
      if (diving) {
        if (over_limits()) limit_hit = true;
        continue;
      }
      // Until a first incumbent exists the search is depth first, resuming
      // at the deepest unexplored sibling; afterwards it takes the best
      // open node.
      if (has_incumbent() && !backtrack.empty()) {
        for (auto& node : backtrack) open.push(std::move(node));
        backtrack.clear();
      }
      bool found = false;
      while (!open.empty() || !backtrack.empty()) {
        Node node;
        if (!backtrack.empty()) {
          node = std::move(backtrack.back());
          backtrack.pop_back();
        } else {
          node = open.top();
          open.pop();
        }
        if (node.bound >= prune_level()) {
          record_pruned(node.bound);
          continue;
        }
        if (over_limits()) {
          open.push(std::move(node));
          limit_hit = true;
          break;
        }
        lp_.load_basis(*node.basis);
        path = std::move(node.changes);
        const LpStatus st = solve_node(path);
        if (st == LpStatus::IterationLimit) {
          open.push(Node{node.bound, node.id, path, node.basis});
          limit_hit = true;
          break;
        }
        if (st != LpStatus::Optimal) {
          ++nodes_;
          continue;
        }
        node_obj = lp_.objective();
        diving = true;
        found = true;
        break;
      }
      if (!found) break;
    }

    double bound = has_incumbent() ? incumbent_obj_ : kInf;
    bound = std::min(bound, pruned_min_);
    for (const auto& node : backtrack) bound = std::min(bound, node.bound);
    while (!open.empty()) {
      bound = std::min(bound, open.top().bound);
      open.pop();
    }
    if (limit_hit && diving) bound = std::min(bound, node_obj);
    out.stats.dual_bound = bound;

    if (!has_incumbent()) {
      out.status = limit_hit ? SolveStatus::Aborted : SolveStatus::Infeasible;
      if (limit_hit) out.message = "limit reached without a feasible solution";
      return finish(out);
    }
    const double gap = relative_gap(incumbent_obj_, bound);
    out.status = (!limit_hit || gap <= opts_.mip_gap_rel) ? SolveStatus::Optimal : SolveStatus::FeasibleGapLimit;
    if (out.status == SolveStatus::FeasibleGapLimit) out.message = "limit reached";
    return finish(out);
  }

 private:
  bool has_incumbent() const { return !incumbent_.empty(); }

  double prune_level() const {
    if (!has_incumbent()) return kInf;
    return incumbent_obj_ - std::max(1e-9, opts_.mip_gap_rel * std::max(1.0, std::fabs(incumbent_obj_)));
  }

  void record_pruned(double bound) { pruned_min_ = std::min(pruned_min_, bound); }

  bool over_limits() const {
    return nodes_ >= opts_.node_limit || seconds_since(start_) > opts_.time_limit_s;
  }

  void reset_binary_bounds() {
    for (int j : binaries_) {
      const auto& v = model_.variables()[static_cast<std::size_t>(j)];
      lp_.set_bounds(j, v.lower, v.upper);
    }
  }

  LpStatus solve_node(const std::vector<BoundChange>& changes) {
    reset_binary_bounds();
    for (const auto& c : changes) lp_.set_bounds(c.var, c.lower, c.upper);
    return lp_.solve();
  }

  int pick_branch_variable() const {
    int best = -1;
    double best_dist = kInf;
    for (int j : binaries_) {
      const double v = lp_.value(j);
      const double frac = v - std::floor(v);
      if (std::min(frac, 1.0 - frac) <= opts_.integrality_tol) continue;
      if (opts_.branching == Branching::FirstIndex) return j;
      const double dist = std::fabs(frac - 0.5);
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    return best;
  }

  // Fixes the binaries at their rounded values and re-solves, so the stored
  // incumbent is exactly integral with continuous values to match.
  void accept_integral(const std::vector<BoundChange>& path) {
    std::vector<BoundChange> fixed = path;
    for (int j : binaries_) {
      const double r = std::round(lp_.value(j));
      fixed.push_back({j, r, r});
    }
    if (solve_node(fixed) != LpStatus::Optimal) return;
    std::vector<double> x = lp_.values();
    for (int j : binaries_) x[static_cast<std::size_t>(j)] = std::round(x[static_cast<std::size_t>(j)]);
    clamp_to_bounds(x);
    const double obj = model_.evaluate_objective(x);
    if (!has_incumbent() || obj < incumbent_obj_) {
      incumbent_ = std::move(x);
      incumbent_obj_ = obj;
    }
  }

  // Basic variables carry round-off; snapping them onto nearby bounds keeps
  // fixed and pinned columns exact.
  void clamp_to_bounds(std::vector<double>& x) const {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const auto& v = model_.variables()[j];
      x[j] = std::clamp(x[j], v.lower, v.upper);
    }
  }

  void offer_seed(std::span<const double> seed) {
    if (static_cast<int>(seed.size()) != model_.num_variables()) return;
    if (model_.max_violation(seed) > 1e-6) return;
    incumbent_.assign(seed.begin(), seed.end());
    clamp_to_bounds(incumbent_);
    incumbent_obj_ = model_.evaluate_objective(incumbent_);
  }

  Solution finish(Solution out) {
    if (has_incumbent() && (out.status == SolveStatus::Optimal || out.status == SolveStatus::FeasibleGapLimit)) {
      out.values = incumbent_;
      out.objective = incumbent_obj_;
      if (!std::isfinite(out.stats.dual_bound)) out.stats.dual_bound = incumbent_obj_;
      out.stats.dual_bound = std::min(out.stats.dual_bound, incumbent_obj_);
      out.gap = relative_gap(incumbent_obj_, out.stats.dual_bound);
    }
    out.stats.nodes = nodes_;
    out.stats.simplex_iterations = lp_.iterations();
    out.stats.wall_seconds = seconds_since(start_);
    return out;
  }

  const LinearModel& model_;
  SolveOptions opts_;
  DualSimplex lp_;
  std::vector<int> binaries_;
  std::vector<double> incumbent_;
  double incumbent_obj_ = kInf;
  double pruned_min_ = kInf;
  long nodes_ = 0;
  long next_id_ = 0;
  Clock::time_point start_;
};

}  // namespace

Solution solve_lp(const LinearModel& model, const SolveOptions& opts) {
  check_well_formed(model);
  const auto start = Clock::now();
  detail::SimplexOptions sopts;
  sopts.primal_tol = opts.feasibility_tol;
  DualSimplex lp(model, sopts);
  lp.set_deadline(start + std::chrono::duration_cast<Clock::duration>(
                              std::chrono::duration<double>(std::min(opts.time_limit_s, 1e9))));
  const LpStatus st = lp.solve();
  Solution out;
  switch (st) {
    case LpStatus::Optimal:
      out.status = SolveStatus::Optimal;
      out.values = lp.values();
      out.objective = lp.objective();
      out.stats.dual_bound = lp.dual_bound();
      out.gap = relative_gap(out.objective, out.stats.dual_bound);
      break;
    case LpStatus::Infeasible: out.status = SolveStatus::Infeasible; break;
    case LpStatus::Unbounded: out.status = SolveStatus::Unbounded; break;
    case LpStatus::IterationLimit:
      out.status = SolveStatus::Aborted;
      out.message = "iteration limit";
      break;
  }
  out.stats.nodes = 1;
  out.stats.simplex_iterations = lp.iterations();
  out.stats.wall_seconds = seconds_since(start);
  return out;
}

Solution solve_mip(const LinearModel& model, const SolveOptions& opts, std::span<const double> incumbent) {
  check_well_formed(model);
  if (opts.mip_gap_rel < 0 || opts.time_limit_s <= 0 || opts.node_limit <= 0) {
    throw BadParams("solve options: gap must be >= 0 and limits > 0");
  }
  BranchAndBound bnb(model, opts);
  return bnb.run(incumbent);
}

}  // namespace flexsched
