#include "dual_simplex.hpp"

#include <algorithm>
#include <cmath>

#include "flexsched/errors.hpp"

namespace flexsched::detail {

namespace {

constexpr double kDropTol = 1e-13;

}  // namespace

DualSimplex::DualSimplex(const LinearModel& model, SimplexOptions opts) : opts_(opts) {
  n_ = model.num_variables();
  m_ = model.num_constraints();
  objective_constant_ = model.objective_constant();
  const std::size_t total = N();

  cost_.assign(total, 0.0);
  lo_.assign(total, 0.0);
  up_.assign(total, 0.0);
  for (int j = 0; j < n_; ++j) {
    const auto& v = model.variables()[static_cast<std::size_t>(j)];
    lo_[static_cast<std::size_t>(j)] = v.lower;
    up_[static_cast<std::size_t>(j)] = v.upper;
  }
  for (const auto& t : model.objective()) cost_[static_cast<std::size_t>(t.var)] += t.coef;

  // Merge duplicate terms per row, then build both orientations.
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(m_));
  std::vector<double> scratch(static_cast<std::size_t>(n_), 0.0);
  std::vector<int> seen;
  for (int i = 0; i < m_; ++i) {
    const auto& c = model.constraints()[static_cast<std::size_t>(i)];
    seen.clear();
    for (const auto& t : c.terms) {
      auto& s = scratch[static_cast<std::size_t>(t.var)];
      if (s == 0.0) seen.push_back(t.var);
      s += t.coef;
      if (s == 0.0) s = 1e-300;  // keep the slot marked; dropped below
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (int j : seen) {
      double& s = scratch[static_cast<std::size_t>(j)];
      if (std::fabs(s) > 1e-200) rows[static_cast<std::size_t>(i)].emplace_back(j, s);
      s = 0.0;
    }
    const std::size_t li = static_cast<std::size_t>(n_ + i);
    switch (c.relation) {
      case Relation::LessEqual: lo_[li] = -kInf; up_[li] = c.rhs; break;
      case Relation::GreaterEqual: lo_[li] = c.rhs; up_[li] = kInf; break;
      case Relation::Equal: lo_[li] = c.rhs; up_[li] = c.rhs; break;
    }
  }

  row_start_.assign(static_cast<std::size_t>(m_) + 1, 0);
  std::vector<int> col_count(static_cast<std::size_t>(n_), 0);
  for (int i = 0; i < m_; ++i) {
    row_start_[static_cast<std::size_t>(i) + 1] =
        row_start_[static_cast<std::size_t>(i)] + static_cast<int>(rows[static_cast<std::size_t>(i)].size());
    for (auto [j, v] : rows[static_cast<std::size_t>(i)]) {
      row_col_.push_back(j);
      row_val_.push_back(v);
      ++col_count[static_cast<std::size_t>(j)];
    }
  }
  col_start_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int j = 0; j < n_; ++j) {
    col_start_[static_cast<std::size_t>(j) + 1] = col_start_[static_cast<std::size_t>(j)] + col_count[static_cast<std::size_t>(j)];
  }
  col_row_.assign(row_col_.size(), 0);
  col_val_.assign(row_col_.size(), 0.0);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int i = 0; i < m_; ++i) {
    for (int k = row_start_[static_cast<std::size_t>(i)]; k < row_start_[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = row_col_[static_cast<std::size_t>(k)];
      const int at = fill[static_cast<std::size_t>(j)]++;
      col_row_[static_cast<std::size_t>(at)] = i;
      col_val_[static_cast<std::size_t>(at)] = row_val_[static_cast<std::size_t>(k)];
    }
  }

  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  artificial_.assign(total, 0);
  alpha_.assign(total, 0.0);
  reset_to_slack_basis();
}

bool DualSimplex::boxed(std::size_t j) const { return std::isfinite(lo_[j]) && std::isfinite(up_[j]); }

double DualSimplex::nonbasic_value(std::size_t j) const {
  switch (status_[j]) {
    case VarStatus::AtLower: return lo_[j];
    case VarStatus::AtUpper: return up_[j];
    default: return 0.0;
  }
}

void DualSimplex::reset_to_slack_basis() {
  const std::size_t total = N();
  status_.assign(total, VarStatus::AtLower);
  // Drop artificial bounds; they are re-added on demand.
  for (std::size_t j = 0; j < total; ++j) {
    if (artificial_[j] & 1) lo_[j] = -kInf;
    if (artificial_[j] & 2) up_[j] = kInf;
    artificial_[j] = 0;
  }
  for (int j = 0; j < n_; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const double c = cost_[u];
    const bool has_lo = std::isfinite(lo_[u]);
    const bool has_up = std::isfinite(up_[u]);
    if (c > 0 || (c == 0 && has_lo)) {
      if (!has_lo) {
        lo_[u] = std::min(-opts_.artificial_bound, up_[u] - opts_.artificial_bound);
        artificial_[u] |= 1;
      }
      status_[u] = VarStatus::AtLower;
    } else if (c < 0 || has_up) {
      if (!has_up) {
        up_[u] = std::max(opts_.artificial_bound, lo_[u] + opts_.artificial_bound);
        artificial_[u] |= 2;
      }
      status_[u] = VarStatus::AtUpper;
    } else {
      status_[u] = VarStatus::Free;
    }
  }
  head_.resize(static_cast<std::size_t>(m_));
  for (int i = 0; i < m_; ++i) {
    head_[static_cast<std::size_t>(i)] = n_ + i;
    status_[static_cast<std::size_t>(n_ + i)] = VarStatus::Basic;
  }
  dse_weight_.assign(static_cast<std::size_t>(m_), 1.0);
  factored_ = false;
}

void DualSimplex::load_basis(const std::vector<VarStatus>& status) {
  if (status.size() != N()) {
    reset_to_slack_basis();
    return;
  }
  std::vector<int> head;
  for (std::size_t j = 0; j < status.size(); ++j) {
    if (status[j] == VarStatus::Basic) head.push_back(static_cast<int>(j));
  }
  if (static_cast<int>(head.size()) != m_) {
    reset_to_slack_basis();
    return;
  }
  status_ = status;
  for (std::size_t j = 0; j < status_.size(); ++j) {
    if (status_[j] == VarStatus::AtLower && !std::isfinite(lo_[j])) {
      status_[j] = std::isfinite(up_[j]) ? VarStatus::AtUpper : VarStatus::Free;
    } else if (status_[j] == VarStatus::AtUpper && !std::isfinite(up_[j])) {
      status_[j] = std::isfinite(lo_[j]) ? VarStatus::AtLower : VarStatus::Free;
    }
  }
  head_ = std::move(head);
  dse_weight_.assign(static_cast<std::size_t>(m_), 1.0);
  factored_ = false;
}

void DualSimplex::set_bounds(int j, double lo, double up) {
  const auto u = static_cast<std::size_t>(j);
  lo_[u] = lo;
  up_[u] = up;
  artificial_[u] = 0;
  if (status_[u] == VarStatus::Basic) return;
  if (status_[u] == VarStatus::AtLower && !std::isfinite(lo)) {
    status_[u] = std::isfinite(up) ? VarStatus::AtUpper : VarStatus::Free;
  } else if (status_[u] == VarStatus::AtUpper && !std::isfinite(up)) {
    status_[u] = std::isfinite(lo) ? VarStatus::AtLower : VarStatus::Free;
  } else if (status_[u] == VarStatus::Free && (std::isfinite(lo) || std::isfinite(up))) {
    status_[u] = std::isfinite(lo) ? VarStatus::AtLower : VarStatus::AtUpper;
  }
}

// --- linear algebra --------------------------------------------------------------

bool DualSimplex::refactor() {
  etas_.clear();
  if (m_ == 0) {
    factored_ = true;
    return true;
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(m_) * 3);
  for (int p = 0; p < m_; ++p) {
    const int j = head_[static_cast<std::size_t>(p)];
    if (j >= n_) {
      trips.emplace_back(j - n_, p, -1.0);
    } else {
      for (int k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k) {
        trips.emplace_back(col_row_[static_cast<std::size_t>(k)], p, col_val_[static_cast<std::size_t>(k)]);
      }
    }
  }
  Eigen::SparseMatrix<double> basis(m_, m_);
  basis.setFromTriplets(trips.begin(), trips.end());
  basis.makeCompressed();
  lu_.analyzePattern(basis);
  lu_.factorize(basis);
  factored_ = lu_.info() == Eigen::Success;
  if (factored_) {
    // Eigen reports success on some numerically singular bases.
    const double logdet = lu_.logAbsDeterminant();
    if (!std::isfinite(logdet)) factored_ = false;
  }
  return factored_;
}

void DualSimplex::ftran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  v = lu_.solve(v);
  for (const auto& eta : etas_) {
    const std::size_t r = static_cast<std::size_t>(eta.row);
    const double vr = v[static_cast<Eigen::Index>(r)] / eta.pivot;
    v[static_cast<Eigen::Index>(r)] = vr;
    if (vr == 0.0) continue;
    for (std::size_t k = 0; k < eta.index.size(); ++k) v[eta.index[k]] -= eta.value[k] * vr;
  }
}

void DualSimplex::btran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double acc = v[it->row];
    for (std::size_t k = 0; k < it->index.size(); ++k) acc -= it->value[k] * v[it->index[k]];
    v[it->row] = acc / it->pivot;
  }
  v = lu_.transpose().solve(v);
}

void DualSimplex::load_column(std::size_t j, Eigen::VectorXd& dense) const {
  dense.setZero(m_);
  add_column(j, 1.0, dense);
}

void DualSimplex::add_column(std::size_t j, double scale, Eigen::VectorXd& dense) const {
  if (j >= static_cast<std::size_t>(n_)) {
    dense[static_cast<Eigen::Index>(j) - n_] -= scale;
    return;
  }
  for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
    dense[col_row_[static_cast<std::size_t>(k)]] += scale * col_val_[static_cast<std::size_t>(k)];
  }
}

void DualSimplex::compute_primal() {
  const std::size_t total = N();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
  for (std::size_t j = 0; j < total; ++j) {
    if (status_[j] == VarStatus::Basic) continue;
    x_[j] = nonbasic_value(j);
    if (x_[j] != 0.0) add_column(j, -x_[j], rhs);
  }
  ftran(rhs);
  for (int p = 0; p < m_; ++p) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(p)])] = rhs[p];
}

void DualSimplex::compute_duals() {
  Eigen::VectorXd y(m_);
  for (int p = 0; p < m_; ++p) y[p] = cost_[static_cast<std::size_t>(head_[static_cast<std::size_t>(p)])];
  btran(y);
  for (int j = 0; j < n_; ++j) {
    const auto u = static_cast<std::size_t>(j);
    if (status_[u] == VarStatus::Basic) {
      d_[u] = 0.0;
      continue;
    }
    double dot = 0;
    for (int k = col_start_[u]; k < col_start_[u + 1]; ++k) {
      dot += y[col_row_[static_cast<std::size_t>(k)]] * col_val_[static_cast<std::size_t>(k)];
    }
    d_[u] = cost_[u] - dot;
  }
  for (int i = 0; i < m_; ++i) {
    const auto u = static_cast<std::size_t>(n_ + i);
    d_[u] = status_[u] == VarStatus::Basic ? 0.0 : cost_[u] + y[i];
  }
}

// Puts every nonbasic variable on the bound its reduced cost prefers. Returns
// true when a primal value changed.
bool DualSimplex::repair_dual_feasibility() {
  bool moved = false;
  const double tol = opts_.dual_tol;
  const std::size_t total = N();
  for (std::size_t j = 0; j < total; ++j) {
    const VarStatus s = status_[j];
    if (s == VarStatus::Basic || fixed(j)) continue;
    const double dj = d_[j];
    if ((s == VarStatus::AtLower || s == VarStatus::Free) && dj < -tol) {
      if (!std::isfinite(up_[j])) {
        up_[j] = std::max(opts_.artificial_bound, lo_[j] + opts_.artificial_bound);
        artificial_[j] |= 2;
      }
      status_[j] = VarStatus::AtUpper;
      moved = true;
    } else if ((s == VarStatus::AtUpper || s == VarStatus::Free) && dj > tol) {
      if (!std::isfinite(lo_[j])) {
        lo_[j] = std::min(-opts_.artificial_bound, up_[j] - opts_.artificial_bound);
        artificial_[j] |= 1;
      }
      status_[j] = VarStatus::AtLower;
      moved = true;
    }
  }
  return moved;
}

void DualSimplex::ensure_factored() {
  if (factored_ && etas_.empty()) return;
  while (!refactor()) {
    if (++recoveries_ > 3) throw NumericalBreakdown("basis factorization failed repeatedly");
    reset_to_slack_basis();
  }
}

void DualSimplex::compute_pivot_row(const Eigen::VectorXd& rho) {
  for (int j : alpha_touched_) alpha_[static_cast<std::size_t>(j)] = 0.0;
  alpha_touched_.clear();
  for (int i = 0; i < m_; ++i) {
    const double ri = rho[i];
    if (std::fabs(ri) < kDropTol) continue;
    const std::size_t li = static_cast<std::size_t>(n_ + i);
    if (status_[li] != VarStatus::Basic) {
      alpha_[li] = -ri;
      alpha_touched_.push_back(n_ + i);
    }
    for (int k = row_start_[static_cast<std::size_t>(i)]; k < row_start_[static_cast<std::size_t>(i) + 1]; ++k) {
      const auto j = static_cast<std::size_t>(row_col_[static_cast<std::size_t>(k)]);
      if (status_[j] == VarStatus::Basic) continue;
      if (alpha_[j] == 0.0) alpha_touched_.push_back(static_cast<int>(j));
      alpha_[j] += ri * row_val_[static_cast<std::size_t>(k)];
      if (alpha_[j] == 0.0) alpha_[j] = 1e-300;  // stay marked as touched
    }
  }
}

int DualSimplex::choose_leaving_row() const {
  int best = -1;
  double best_score = 0;
  int best_var = 1 << 30;
  const double tol = opts_.primal_tol;
  for (int p = 0; p < m_; ++p) {
    const auto j = static_cast<std::size_t>(head_[static_cast<std::size_t>(p)]);
    double infeas = 0;
    if (x_[j] < lo_[j] - tol) infeas = lo_[j] - x_[j];
    else if (x_[j] > up_[j] + tol) infeas = x_[j] - up_[j];
    else continue;
    if (bland_) {
      if (static_cast<int>(j) < best_var) {
        best_var = static_cast<int>(j);
        best = p;
      }
      continue;
    }
    const double score = infeas * infeas / dse_weight_[static_cast<std::size_t>(p)];
    if (score > best_score) {
      best_score = score;
      best = p;
    }
  }
  return best;
}

bool DualSimplex::has_artificial_at_bound() const {
  for (std::size_t j = 0; j < N(); ++j) {
    const bool at_artificial = (status_[j] == VarStatus::AtLower && (artificial_[j] & 1)) ||
                               (status_[j] == VarStatus::AtUpper && (artificial_[j] & 2));
    if (at_artificial && std::fabs(d_[j]) > opts_.dual_tol) return true;
  }
  return false;
}

// Dual degeneracy (many zero reduced costs, as with flat prices) stalls the
// ratio test. Nonbasic costs move away from zero in the direction that keeps
// the basis dual feasible, by a small amount that varies per column.
void DualSimplex::perturb_costs() {
  original_cost_ = cost_;
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::size_t j = 0; j < N(); ++j) {
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 32;
    if (status_[j] == VarStatus::Basic || status_[j] == VarStatus::Free || fixed(j)) continue;
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    const double delta = 5e-7 * (1.0 + std::fabs(cost_[j])) * (1.0 + u);
    const double sign = status_[j] == VarStatus::AtLower ? 1.0 : -1.0;
    cost_[j] += sign * delta;
    d_[j] += sign * delta;
  }
  perturbed_ = true;
}

void DualSimplex::restore_costs() {
  if (!perturbed_) return;
  cost_ = std::move(original_cost_);
  original_cost_.clear();
  perturbed_ = false;
}

// --- main loop ----------------------------------------------------------------------

LpStatus DualSimplex::solve() {
  if (m_ == 0) {
    for (std::size_t j = 0; j < N(); ++j) {
      d_[j] = cost_[j];
      x_[j] = nonbasic_value(j);
    }
    repair_dual_feasibility();
    for (std::size_t j = 0; j < N(); ++j) x_[j] = nonbasic_value(j);
    return has_artificial_at_bound() ? LpStatus::Unbounded : LpStatus::Optimal;
  }

  bland_ = false;
  degenerate_run_ = 0;
  recoveries_ = 0;
  int numerical_retries = 0;
  bool perturbation_used = false;
  struct Restore {
    DualSimplex* self;
    ~Restore() { self->restore_costs(); }
  } restore{this};
  bool fresh = false;  // primal/dual values recomputed from a new factorization

  auto restart_from_factor = [&]() {
    ensure_factored();
    compute_primal();
    compute_duals();
    if (repair_dual_feasibility()) compute_primal();
    fresh = true;
  };
  etas_.clear();
  factored_ = factored_ && false;
  restart_from_factor();

  Eigen::VectorXd rho(m_), column(m_), tau(m_), flip_delta(m_);
  std::vector<int> flips;

  while (true) {
    if (iterations_ >= opts_.iteration_limit) return LpStatus::IterationLimit;
    if ((iterations_ & 63) == 0 && std::chrono::steady_clock::now() > deadline_) return LpStatus::IterationLimit;
    if (static_cast<int>(etas_.size()) >= opts_.refactor_interval) restart_from_factor();

    const int r = choose_leaving_row();
    if (r < 0) {
      if (perturbed_) {
        // Optimal for the perturbed costs; clean up against the true ones.
        restore_costs();
        bland_ = false;
        degenerate_run_ = 0;
        restart_from_factor();
        continue;
      }
      if (!fresh) {
        restart_from_factor();
        continue;
      }
      return has_artificial_at_bound() ? LpStatus::Unbounded : LpStatus::Optimal;
    }

    const auto p = static_cast<std::size_t>(head_[static_cast<std::size_t>(r)]);
    const bool to_lower = x_[p] < lo_[p];
    const double sigma = to_lower ? -1.0 : 1.0;
    const double target = to_lower ? lo_[p] : up_[p];

    rho.setZero();
    rho[r] = 1.0;
    btran(rho);
    dse_weight_[static_cast<std::size_t>(r)] = std::max(rho.squaredNorm(), 1e-12);
    compute_pivot_row(rho);

    // Candidates whose reduced cost reaches zero as the dual step grows.
    candidates_.clear();
    for (int jj : alpha_touched_) {
      const auto j = static_cast<std::size_t>(jj);
      if (status_[j] == VarStatus::Basic || fixed(j)) continue;
      const double a = alpha_[j];
      if (std::fabs(a) < opts_.pivot_tol) continue;
      const double b = sigma * a;
      double ratio;
      if (status_[j] == VarStatus::AtLower && b > 0) ratio = std::max(d_[j], 0.0) / b;
      else if (status_[j] == VarStatus::AtUpper && b < 0) ratio = std::min(d_[j], 0.0) / b;
      else if (status_[j] == VarStatus::Free) ratio = 0.0;
      else continue;
      candidates_.push_back({ratio, jj, std::fabs(b)});
    }
    std::sort(candidates_.begin(), candidates_.end(), [](const Candidate& a, const Candidate& b) {
      return a.ratio < b.ratio || (a.ratio == b.ratio && a.var < b.var);
    });

    std::size_t stop = 0;
    flips.clear();
    if (!bland_) {
      double slope = std::fabs(x_[p] - target);
      while (stop < candidates_.size()) {
        const auto j = static_cast<std::size_t>(candidates_[stop].var);
        if (!boxed(j) || artificial_[j] || status_[j] == VarStatus::Free) break;
        const double next = slope - candidates_[stop].magnitude * (up_[j] - lo_[j]);
        if (next <= opts_.primal_tol) break;
        slope = next;
        flips.push_back(static_cast<int>(j));
        ++stop;
      }
    }
    if (stop == candidates_.size()) {
      // Dual ray: the row cannot be made feasible.
      if (!fresh) {
        restart_from_factor();
        continue;
      }
      return LpStatus::Infeasible;
    }

    // Harris pass: widest pivot among near-tied breakpoints.
    std::size_t pick = stop;
    if (bland_) {
      // Lowest index among the tied breakpoints, skipping pivots far smaller
      // than the widest one so the basis stays well conditioned.
      const double t0 = candidates_[stop].ratio;
      std::size_t end = stop;
      double widest = 0;
      for (; end < candidates_.size() && candidates_[end].ratio <= t0 + 1e-12; ++end) {
        widest = std::max(widest, candidates_[end].magnitude);
      }
      pick = end;
      for (std::size_t k = stop; k < end; ++k) {
        if (candidates_[k].magnitude < 1e-3 * widest) continue;
        if (pick == end || candidates_[k].var < candidates_[pick].var) pick = k;
      }
    } else {
      double bound = kInf;
      for (std::size_t k = stop; k < candidates_.size(); ++k) {
        const auto& c = candidates_[k];
        bound = std::min(bound, c.ratio + opts_.dual_tol / c.magnitude);
        if (c.ratio > bound) break;
      }
      for (std::size_t k = stop; k < candidates_.size() && candidates_[k].ratio <= bound; ++k) {
        if (candidates_[k].magnitude > candidates_[pick].magnitude) pick = k;
      }
    }
    const int q_var = candidates_[pick].var;
    const auto q = static_cast<std::size_t>(q_var);
    const double step_ratio = candidates_[pick].ratio;

    load_column(q, column);
    ftran(column);
    const double alpha_rq = alpha_[q];
    if (std::fabs(column[r] - alpha_rq) > 1e-7 * (1.0 + std::fabs(alpha_rq)) || std::fabs(column[r]) < opts_.pivot_tol) {
      if (++numerical_retries > 5) throw NumericalBreakdown("pivot element disagrees between row and column");
      if (fresh) {
        // Already factored from scratch: drop to the slack basis.
        reset_to_slack_basis();
      }
      restart_from_factor();
      continue;
    }

    // Bound flips of passed breakpoints.
    if (!flips.empty()) {
      flip_delta.setZero();
      for (int jj : flips) {
        const auto j = static_cast<std::size_t>(jj);
        const double delta = status_[j] == VarStatus::AtLower ? up_[j] - lo_[j] : lo_[j] - up_[j];
        status_[j] = status_[j] == VarStatus::AtLower ? VarStatus::AtUpper : VarStatus::AtLower;
        x_[j] = nonbasic_value(j);
        add_column(j, delta, flip_delta);
      }
      ftran(flip_delta);
      for (int k = 0; k < m_; ++k) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(k)])] -= flip_delta[k];
    }

    // Primal step: the leaving variable lands on its bound.
    const double theta_p = (x_[p] - target) / column[r];
    for (int k = 0; k < m_; ++k) {
      if (column[k] != 0.0) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(k)])] -= column[k] * theta_p;
    }
    x_[q] += theta_p;
    x_[p] = target;

    // Dual step.
    const double theta_d = d_[q] / alpha_rq;
    for (int jj : alpha_touched_) {
      const auto j = static_cast<std::size_t>(jj);
      if (status_[j] != VarStatus::Basic) d_[j] -= theta_d * alpha_[j];
    }
    d_[q] = 0.0;
    d_[p] = -theta_d;

    // Dual steepest-edge weights.
    tau = rho;
    ftran(tau);
    const double w_r = dse_weight_[static_cast<std::size_t>(r)];
    for (int k = 0; k < m_; ++k) {
      if (k == r || column[k] == 0.0) continue;
      const double ratio = column[k] / column[r];
      auto& w = dse_weight_[static_cast<std::size_t>(k)];
      w = std::max(w - 2.0 * ratio * tau[k] + ratio * ratio * w_r, 1e-6);
    }
    dse_weight_[static_cast<std::size_t>(r)] = std::max(w_r / (column[r] * column[r]), 1e-6);

    // Basis change.
    status_[p] = (to_lower || fixed(p)) ? VarStatus::AtLower : VarStatus::AtUpper;
    status_[q] = VarStatus::Basic;
    head_[static_cast<std::size_t>(r)] = q_var;
    Eta eta;
    eta.row = r;
    eta.pivot = column[r];
    for (int k = 0; k < m_; ++k) {
      if (k != r && std::fabs(column[k]) > kDropTol) {
        eta.index.push_back(k);
        eta.value.push_back(column[k]);
      }
    }
    etas_.push_back(std::move(eta));
    ++iterations_;
    fresh = false;
    numerical_retries = 0;

    if (step_ratio <= 1e-12) {
      ++degenerate_run_;
      if (!perturbation_used && degenerate_run_ > opts_.perturb_after) {
        perturb_costs();
        perturbation_used = true;
        degenerate_run_ = 0;
      } else if (degenerate_run_ > 200 + m_ / 2) {
        bland_ = true;
      }
    } else {
      degenerate_run_ = 0;
    }
  }
}

double DualSimplex::objective() const {
  double obj = objective_constant_;
  for (int j = 0; j < n_; ++j) obj += cost_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
  return obj;
}

double DualSimplex::dual_bound() const {
  double bound = objective_constant_;
  for (std::size_t j = 0; j < N(); ++j) {
    if (status_[j] == VarStatus::Basic) continue;
    const double dj = d_[j];
    if (dj > 0) bound += dj * lo_[j];
    else if (dj < 0) bound += dj * up_[j];
  }
  return bound;
}

std::vector<double> DualSimplex::values() const {
  return std::vector<double>(x_.begin(), x_.begin() + n_);
}

}  // namespace flexsched::detail
