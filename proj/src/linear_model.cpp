#include "flexsched/linear_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "flexsched/errors.hpp"
#include "text_util.hpp"

namespace flexsched {

int LinearModel::add_variable(std::string name, VarKind kind, double lower, double upper) {
  variables_.push_back(Variable{std::move(name), kind, lower, upper});
  return static_cast<int>(variables_.size()) - 1;
}

int LinearModel::add_constraint(std::string name, std::vector<Term> terms, Relation relation, double rhs) {
  constraints_.push_back(Constraint{std::move(name), std::move(terms), relation, rhs});
  return static_cast<int>(constraints_.size()) - 1;
}

void LinearModel::add_objective(int var, double coef) {
  if (coef != 0.0) objective_.push_back(Term{var, coef});
}

int LinearModel::num_binaries() const {
  return static_cast<int>(std::count_if(variables_.begin(), variables_.end(),
                                        [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

std::vector<std::string> LinearModel::check() const {
  std::vector<std::string> issues;
  const int n = num_variables();
  for (int j = 0; j < n; ++j) {
    const auto& v = variables_[static_cast<std::size_t>(j)];
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      issues.push_back("variable " + v.name + " has empty or NaN bounds");
    }
    if (v.kind == VarKind::Binary && (v.lower < 0 || v.upper > 1)) {
      issues.push_back("binary " + v.name + " has bounds outside [0,1]");
    }
  }
  auto check_terms = [&](const std::vector<Term>& terms, const std::string& where) {
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= n) issues.push_back(where + " references undeclared variable");
      if (!std::isfinite(t.coef)) issues.push_back(where + " has a non-finite coefficient");
    }
  };
  for (const auto& c : constraints_) {
    check_terms(c.terms, "constraint " + c.name);
    if (!std::isfinite(c.rhs)) issues.push_back("constraint " + c.name + " has a non-finite rhs");
  }
  check_terms(objective_, "objective");
  if (!std::isfinite(objective_constant_)) issues.push_back("objective constant is not finite");
  return issues;
}

double LinearModel::evaluate_objective(std::span<const double> x) const {
  double obj = objective_constant_;
  for (const auto& t : objective_) obj += t.coef * x[static_cast<std::size_t>(t.var)];
  return obj;
}

double LinearModel::max_violation(std::span<const double> x) const {
  double worst = 0;
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    const auto& v = variables_[j];
    worst = std::max({worst, v.lower - x[j], x[j] - v.upper});
    if (v.kind == VarKind::Binary) worst = std::max(worst, std::fabs(x[j] - std::round(x[j])));
  }
  for (const auto& c : constraints_) {
    double lhs = 0;
    for (const auto& t : c.terms) lhs += t.coef * x[static_cast<std::size_t>(t.var)];
    switch (c.relation) {
      case Relation::LessEqual: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::GreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::Equal: worst = std::max(worst, std::fabs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

// --- LP format ----------------------------------------------------------------

namespace {

constexpr const char* kConstantName = "obj_constant";

void write_terms(std::ostringstream& out, const std::vector<Term>& terms, const std::vector<Variable>& vars) {
  // Merge duplicates so that every variable appears once per row.
  std::map<int, double> merged;
  for (const auto& t : terms) merged[t.var] += t.coef;
  int on_line = 0;
  bool first = true;
  for (const auto& [var, coef] : merged) {
    if (coef == 0.0) continue;
    if (on_line == 8) {
      out << "\n   ";
      on_line = 0;
    }
    out << (coef < 0 ? " - " : (first ? " " : " + "));
    const double mag = std::fabs(coef);
    if (mag != 1.0) out << detail::format_double(mag) << ' ';
    out << vars[static_cast<std::size_t>(var)].name;
    first = false;
    ++on_line;
  }
  if (first) out << " 0 " << vars.front().name;
}

std::string bound_str(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  return detail::format_double(v);
}

}  // namespace

std::string write_lp(const LinearModel& model) {
  const auto& vars = model.variables();
  std::ostringstream out;
  std::vector<Term> objective = model.objective();
  std::vector<Variable> names = vars;
  const bool has_constant = model.objective_constant() != 0.0;
  if (has_constant) {
    names.push_back(Variable{kConstantName, VarKind::Continuous, 1, 1});
    objective.push_back(Term{static_cast<int>(names.size()) - 1, model.objective_constant()});
  }
  out << "\\ flexsched model: " << vars.size() << " variables, " << model.num_constraints() << " constraints\n";
  out << "Minimize\n obj:";
  if (objective.empty() && !names.empty()) {
    out << " 0 " << names.front().name;
  } else if (!names.empty()) {
    write_terms(out, objective, names);
  }
  out << "\nSubject To\n";
  for (const auto& c : model.constraints()) {
    out << ' ' << c.name << ':';
    write_terms(out, c.terms, names);
    switch (c.relation) {
      case Relation::LessEqual: out << " <= "; break;
      case Relation::GreaterEqual: out << " >= "; break;
      case Relation::Equal: out << " = "; break;
    }
    out << detail::format_double(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : names) {
    if (v.kind == VarKind::Binary && v.lower == 0 && v.upper == 1) continue;
    if (v.lower == -kInf && v.upper == kInf) {
      out << ' ' << v.name << " free\n";
    } else if (v.lower == v.upper) {
      out << ' ' << v.name << " = " << detail::format_double(v.lower) << '\n';
    } else {
      out << ' ' << bound_str(v.lower) << " <= " << v.name << " <= " << bound_str(v.upper) << '\n';
    }
  }
  bool any_binary = false;
  for (const auto& v : names) {
    if (v.kind != VarKind::Binary) continue;
    if (!any_binary) out << "Binaries\n";
    any_binary = true;
    out << ' ' << v.name << '\n';
  }
  out << "End\n";
  return out.str();
}

namespace {

struct Token {
  std::string text;
  bool number = false;
};

bool is_op_char(char c) { return c == '+' || c == '-' || c == '<' || c == '>' || c == '=' || c == ':'; }

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto bs = line.find('\\'); bs != std::string::npos) line.erase(bs);
    std::size_t i = 0;
    while (i < line.size()) {
      const char c = line[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '<' || c == '>' || c == '=') {
        std::string op(1, c);
        if (i + 1 < line.size() && (line[i + 1] == '=' || line[i + 1] == '<' || line[i + 1] == '>')) {
          op += line[i + 1];
          ++i;
        }
        if (op == "=<") op = "<=";
        if (op == "=>") op = ">=";
        if (op == "<") op = "<=";
        if (op == ">") op = ">=";
        tokens.push_back({op, false});
        ++i;
      } else if (c == '+' || c == '-' || c == ':') {
        tokens.push_back({std::string(1, c), false});
        ++i;
      } else {
        const bool numeric = std::isdigit(static_cast<unsigned char>(c)) || c == '.';
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) {
          const char d = line[j];
          if (is_op_char(d)) {
            const bool exponent_sign = numeric && (d == '+' || d == '-') && j > i &&
                                       (line[j - 1] == 'e' || line[j - 1] == 'E');
            if (!exponent_sign) break;
          }
          ++j;
        }
        tokens.push_back({line.substr(i, j - i), numeric});
        i = j;
      }
    }
  }
  return tokens;
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

enum class Section { None, Objective, Constraints, Bounds, Binaries, Generals, End };

class LpReader {
 public:
  explicit LpReader(const std::string& text) : tokens_(tokenize(text)) {}

  LinearModel read() {
    while (pos_ < tokens_.size()) {
      if (auto s = section_at(pos_)) {
        section_ = *s;
        continue;
      }
      switch (section_) {
        case Section::Objective: read_objective(); break;
        case Section::Constraints: read_constraint(); break;
        case Section::Bounds: read_bound(); break;
        case Section::Binaries: read_binary(); break;
        case Section::Generals: throw ParseError("LP: general integers are not supported");
        case Section::End: pos_ = tokens_.size(); break;
        case Section::None: throw ParseError("LP: content before the objective section");
      }
    }
    finish();
    return std::move(model_);
  }

 private:
  // Recognizes a section header at i and advances past it.
  std::optional<Section> section_at(std::size_t i) {
    const std::string t = lower(tokens_[i].text);
    auto next_is = [&](const char* word) { return i + 1 < tokens_.size() && lower(tokens_[i + 1].text) == word; };
    if (t == "minimize" || t == "minimum" || t == "min") {
      pos_ = i + 1;
      return Section::Objective;
    }
    if (t == "maximize" || t == "maximum" || t == "max") {
      maximize_ = true;
      pos_ = i + 1;
      return Section::Objective;
    }
    if ((t == "subject" && next_is("to")) || (t == "such" && next_is("that"))) {
      pos_ = i + 2;
      return Section::Constraints;
    }
    if (t == "st" || t == "s.t.") {
      pos_ = i + 1;
      return Section::Constraints;
    }
    if (t == "bounds" || t == "bound") {
      pos_ = i + 1;
      return Section::Bounds;
    }
    if (t == "binaries" || t == "binary" || t == "bin") {
      pos_ = i + 1;
      return Section::Binaries;
    }
    if (t == "generals" || t == "general" || t == "gen") {
      pos_ = i + 1;
      return Section::Generals;
    }
    if (t == "end") {
      pos_ = i + 1;
      return Section::End;
    }
    return std::nullopt;
  }

  bool at_section() {
    if (pos_ >= tokens_.size()) return true;
    const std::size_t save = pos_;
    const bool maximize = maximize_;
    const bool hit = section_at(pos_).has_value();
    pos_ = save;
    maximize_ = maximize;
    return hit;
  }

  int var_index(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    const int j = model_.add_continuous(name, 0, kInf);
    index_.emplace(name, j);
    return j;
  }

  double number(const Token& t) { return detail::parse_double(t.text, "LP number"); }

  bool is_relation(const Token& t) const { return t.text == "<=" || t.text == ">=" || t.text == "="; }

  // Linear expression; a bare number becomes part of `constant`.
  std::vector<Term> read_expression(double& constant) {
    std::vector<Term> terms;
    while (pos_ < tokens_.size() && !is_relation(tokens_[pos_]) && !at_section()) {
      // Stop when a new named row begins.
      if (pos_ + 1 < tokens_.size() && tokens_[pos_ + 1].text == ":" && !terms.empty()) break;
      double sign = 1;
      while (pos_ < tokens_.size() && (tokens_[pos_].text == "+" || tokens_[pos_].text == "-")) {
        if (tokens_[pos_].text == "-") sign = -sign;
        ++pos_;
      }
      if (pos_ >= tokens_.size()) throw ParseError("LP: dangling sign");
      double coef = 1;
      bool have_coef = false;
      if (tokens_[pos_].number) {
        coef = number(tokens_[pos_]);
        have_coef = true;
        ++pos_;
      }
      const bool var_follows = pos_ < tokens_.size() && !tokens_[pos_].number && !is_relation(tokens_[pos_]) &&
                               tokens_[pos_].text != "+" && tokens_[pos_].text != "-" && !at_section();
      if (var_follows) {
        terms.push_back(Term{var_index(tokens_[pos_].text), sign * coef});
        ++pos_;
      } else if (have_coef) {
        constant += sign * coef;
      } else {
        throw ParseError("LP: expected a term near '" + tokens_[pos_].text + "'");
      }
    }
    return terms;
  }

  void read_objective() {
    if (pos_ + 1 < tokens_.size() && tokens_[pos_ + 1].text == ":") pos_ += 2;
    double constant = 0;
    auto terms = read_expression(constant);
    for (const auto& t : terms) model_.add_objective(t.var, maximize_ ? -t.coef : t.coef);
    model_.set_objective_constant(maximize_ ? -constant : constant);
  }

  void read_constraint() {
    std::string name = "R" + std::to_string(model_.num_constraints() + 1);
    if (pos_ + 1 < tokens_.size() && tokens_[pos_ + 1].text == ":") {
      name = tokens_[pos_].text;
      pos_ += 2;
    }
    double constant = 0;
    auto terms = read_expression(constant);
    if (pos_ >= tokens_.size() || !is_relation(tokens_[pos_])) throw ParseError("LP: row " + name + " lacks a relation");
    const std::string rel = tokens_[pos_++].text;
    double sign = 1;
    while (pos_ < tokens_.size() && (tokens_[pos_].text == "+" || tokens_[pos_].text == "-")) {
      if (tokens_[pos_].text == "-") sign = -sign;
      ++pos_;
    }
    if (pos_ >= tokens_.size() || !tokens_[pos_].number) throw ParseError("LP: row " + name + " lacks a rhs");
    const double rhs = sign * number(tokens_[pos_++]) - constant;
    const Relation r = rel == "<=" ? Relation::LessEqual : rel == ">=" ? Relation::GreaterEqual : Relation::Equal;
    model_.add_constraint(name, std::move(terms), r, rhs);
  }

  // Reads [sign] number | [sign] inf.
  std::optional<double> read_value() {
    const std::size_t save = pos_;
    double sign = 1;
    while (pos_ < tokens_.size() && (tokens_[pos_].text == "+" || tokens_[pos_].text == "-")) {
      if (tokens_[pos_].text == "-") sign = -sign;
      ++pos_;
    }
    if (pos_ < tokens_.size()) {
      const std::string t = lower(tokens_[pos_].text);
      if (tokens_[pos_].number) {
        ++pos_;
        return sign * number(tokens_[pos_ - 1]);
      }
      if (t == "inf" || t == "infinity") {
        ++pos_;
        return sign * kInf;
      }
    }
    pos_ = save;
    return std::nullopt;
  }

  void read_bound() {
    auto& vars = model_.variables();
    if (auto lhs = read_value()) {
      // lo <= x [<= hi]
      if (pos_ >= tokens_.size() || tokens_[pos_].text != "<=") throw ParseError("LP: malformed bound");
      ++pos_;
      const int j = var_index(tokens_.at(pos_++).text);
      vars[static_cast<std::size_t>(j)].lower = *lhs;
      if (pos_ < tokens_.size() && tokens_[pos_].text == "<=") {
        ++pos_;
        auto hi = read_value();
        if (!hi) throw ParseError("LP: malformed upper bound");
        vars[static_cast<std::size_t>(j)].upper = *hi;
      }
      return;
    }
    const int j = var_index(tokens_.at(pos_++).text);
    auto& v = vars[static_cast<std::size_t>(j)];
    if (pos_ < tokens_.size() && lower(tokens_[pos_].text) == "free") {
      ++pos_;
      v.lower = -kInf;
      v.upper = kInf;
      return;
    }
    if (pos_ >= tokens_.size()) throw ParseError("LP: malformed bound");
    const std::string op = tokens_[pos_++].text;
    auto value = read_value();
    if (!value) throw ParseError("LP: malformed bound on " + v.name);
    if (op == "<=") v.upper = *value;
    else if (op == ">=") v.lower = *value;
    else if (op == "=") v.lower = v.upper = *value;
    else throw ParseError("LP: malformed bound on " + v.name);
  }

  void read_binary() {
    const int j = var_index(tokens_[pos_++].text);
    auto& v = model_.variables()[static_cast<std::size_t>(j)];
    v.kind = VarKind::Binary;
    v.lower = std::max(v.lower, 0.0);
    v.upper = std::min(v.upper, 1.0);
  }

  // Folds the fixed constant variable written by write_lp back into the objective.
  void finish() {
    auto it = index_.find(kConstantName);
    if (it == index_.end()) return;
    const int j = it->second;
    const auto& v = model_.variables()[static_cast<std::size_t>(j)];
    if (v.lower != 1 || v.upper != 1) return;
    for (const auto& c : model_.constraints()) {
      for (const auto& t : c.terms) {
        if (t.var == j) return;
      }
    }
    auto remap = [j](int k) { return k > j ? k - 1 : k; };
    LinearModel folded;
    for (int k = 0; k < model_.num_variables(); ++k) {
      if (k == j) continue;
      const auto& var = model_.variables()[static_cast<std::size_t>(k)];
      folded.add_variable(var.name, var.kind, var.lower, var.upper);
    }
    for (const auto& c : model_.constraints()) {
      std::vector<Term> terms = c.terms;
      for (auto& t : terms) t.var = remap(t.var);
      folded.add_constraint(c.name, std::move(terms), c.relation, c.rhs);
    }
    double constant = model_.objective_constant();
    for (const auto& t : model_.objective()) {
      if (t.var == j) constant += t.coef;
      else folded.add_objective(remap(t.var), t.coef);
    }
    folded.set_objective_constant(constant);
    model_ = std::move(folded);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Section section_ = Section::None;
  bool maximize_ = false;
  LinearModel model_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace

LinearModel read_lp(const std::string& text) { return LpReader(text).read(); }

}  // namespace flexsched
