#include "support/reference_simplex.hpp"

#include <cmath>
#include <limits>

namespace flexsched::testing {

namespace {

constexpr double kEps = 1e-9;

// Column map from model variables to non-negative tableau columns:
// x = offset + sign * col (+ for split free variables, minus col_neg).
struct Mapping {
  int col = -1;
  int col_neg = -1;
  double offset = 0;
  double sign = 1;
};

class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), a_(static_cast<std::size_t>(rows + 1), std::vector<double>(static_cast<std::size_t>(cols + 1), 0.0)) {}

  double& at(int i, int j) { return a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
  double& rhs(int i) { return at(i, n_); }

  // Minimizes the objective row (row m_) over the current basis.
  // Returns false when unbounded.
  bool optimize(std::vector<int>& basis, int usable_cols) {
    while (true) {
      int enter = -1;
      for (int j = 0; j < usable_cols; ++j) {
        if (at(m_, j) < -kEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (at(i, enter) > kEps) {
          const double ratio = rhs(i) / at(i, enter);
          if (ratio < best - kEps || (std::fabs(ratio - best) <= kEps && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
      basis[static_cast<std::size_t>(leave)] = enter;
    }
  }

  void pivot(int r, int c) {
    const double p = at(r, c);
    for (int j = 0; j <= n_; ++j) at(r, j) /= p;
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (int j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
    }
  }

 private:
  int m_, n_;
  std::vector<std::vector<double>> a_;
};

}  // namespace

RefResult reference_lp(const LinearModel& model) {
  const auto& vars = model.variables();
  std::vector<Mapping> map(vars.size());
  int cols = 0;
  struct Row {
    std::vector<std::pair<int, double>> terms;  // tableau columns
    Relation rel;
    double rhs;
  };
  std::vector<Row> rows;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const double lo = vars[j].lower, up = vars[j].upper;
    auto& mp = map[j];
    if (std::isfinite(lo)) {
      mp.col = cols++;
      mp.offset = lo;
      if (std::isfinite(up)) rows.push_back({{{mp.col, 1.0}}, Relation::LessEqual, up - lo});
    } else if (std::isfinite(up)) {
      mp.col = cols++;
      mp.offset = up;
      mp.sign = -1;
    } else {
      mp.col = cols++;
      mp.col_neg = cols++;
    }
  }
  auto translate = [&](const std::vector<Term>& terms, double& constant) {
    std::vector<std::pair<int, double>> out;
    for (const auto& t : terms) {
      const auto& mp = map[static_cast<std::size_t>(t.var)];
      constant += t.coef * mp.offset;
      out.emplace_back(mp.col, t.coef * mp.sign);
      if (mp.col_neg >= 0) out.emplace_back(mp.col_neg, -t.coef);
    }
    return out;
  };
  for (const auto& c : model.constraints()) {
    double constant = 0;
    auto terms = translate(c.terms, constant);
    rows.push_back({terms, c.relation, c.rhs - constant});
  }
  double obj_constant = model.objective_constant();
  const auto obj = translate(model.objective(), obj_constant);

  const int m = static_cast<int>(rows.size());
  int slack_cols = 0;
  for (const auto& r : rows) slack_cols += r.rel == Relation::Equal ? 0 : 1;
  const int real_cols = cols + slack_cols;
  const int total = real_cols + m;  // artificials last
  Tableau tab(m, total);
  std::vector<int> basis(static_cast<std::size_t>(m));
  int slack = cols;
  for (int i = 0; i < m; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (auto [c, v] : r.terms) tab.at(i, c) += v;
    if (r.rel == Relation::LessEqual) tab.at(i, slack++) = 1;
    else if (r.rel == Relation::GreaterEqual) tab.at(i, slack++) = -1;
    tab.rhs(i) = r.rhs;
    if (tab.rhs(i) < 0) {
      for (int j = 0; j < real_cols; ++j) tab.at(i, j) = -tab.at(i, j);
      tab.rhs(i) = -tab.rhs(i);
    }
    tab.at(i, real_cols + i) = 1;
    basis[static_cast<std::size_t>(i)] = real_cols + i;
  }
  // Phase 1: minimize the sum of artificials.
  for (int j = 0; j <= total; ++j) {
    double s = 0;
    for (int i = 0; i < m; ++i) {
      if (j < real_cols || j == total) s += tab.at(i, j);
    }
    tab.at(m, j) = j < real_cols ? -s : (j == total ? -s : 0.0);
  }
  tab.optimize(basis, total);
  RefResult res;
  if (-tab.rhs(m) > 1e-7) {
    res.status = RefStatus::Infeasible;
    return res;
  }
  // Drive remaining artificials out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (basis[static_cast<std::size_t>(i)] < real_cols) continue;
    for (int j = 0; j < real_cols; ++j) {
      if (std::fabs(tab.at(i, j)) > 1e-9) {
        tab.pivot(i, j);
        basis[static_cast<std::size_t>(i)] = j;
        break;
      }
    }
  }
  // Phase 2 objective row in terms of the nonbasics.
  for (int j = 0; j <= total; ++j) tab.at(m, j) = 0;
  for (auto [c, v] : obj) tab.at(m, c) += v;
  for (int i = 0; i < m; ++i) {
    const int b = basis[static_cast<std::size_t>(i)];
    const double f = tab.at(m, b);
    if (f == 0.0) continue;
    for (int j = 0; j <= total; ++j) tab.at(m, j) -= f * tab.at(i, j);
  }
  if (!tab.optimize(basis, real_cols)) {
    res.status = RefStatus::Unbounded;
    return res;
  }
  std::vector<double> col_value(static_cast<std::size_t>(total), 0.0);
  for (int i = 0; i < m; ++i) col_value[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] = tab.rhs(i);
  res.values.resize(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& mp = map[j];
    double v = mp.offset + mp.sign * col_value[static_cast<std::size_t>(mp.col)];
    if (mp.col_neg >= 0) v -= col_value[static_cast<std::size_t>(mp.col_neg)];
    res.values[j] = v;
  }
  res.status = RefStatus::Optimal;
  res.objective = model.evaluate_objective(res.values);
  return res;
}

}  // namespace flexsched::testing
