#include "linv/simplex.hpp"

namespace linv {

int Simplex::variable(const Var& v)
{
  auto it = by_var_.find(v);
  if (it != by_var_.end()) return it->second;
  int id = static_cast<int>(vars_.size());
  vars_.push_back(Column{});
  vars_.back().origin = v;
  by_var_.emplace(v, id);
  return id;
}

int Simplex::slack(const std::map<Var, Rational>& coeffs)
{
  auto it = by_form_.find(coeffs);
  if (it != by_form_.end()) return it->second;
  std::map<int, Rational> row;
  DeltaRational value;
  for (const auto& [v, c] : coeffs) {
    int x = variable(v);
    value = value + c * vars_[x].value;
    if (vars_[x].basic) {
      for (const auto& [y, d] : rows_.at(x)) {
        Rational& slot = row[y];
        slot += c * d;
        if (slot == 0) row.erase(y);
      }
    } else {
      Rational& slot = row[x];
      slot += c;
      if (slot == 0) row.erase(x);
    }
  }
  int id = static_cast<int>(vars_.size());
  vars_.push_back(Column{});
  vars_.back().basic = true;
  vars_.back().value = value;
  rows_.emplace(id, std::move(row));
  by_form_.emplace(coeffs, id);
  return id;
}

void Simplex::update(int x, const DeltaRational& v)
{
  DeltaRational diff = v - vars_[x].value;
  for (auto& [b, row] : rows_) {
    auto it = row.find(x);
    if (it != row.end()) vars_[b].value = vars_[b].value + it->second * diff;
  }
  vars_[x].value = v;
}

void Simplex::pivot(int basic, int nonbasic)
{
  std::map<int, Rational> row = std::move(rows_.at(basic));
  rows_.erase(basic);
  Rational a = row.at(nonbasic);
  row.erase(nonbasic);
  std::map<int, Rational> fresh;
  fresh.emplace(basic, 1 / a);
  for (const auto& [j, c] : row) fresh.emplace(j, -c / a);
  for (auto& [b, r] : rows_) {
    auto it = r.find(nonbasic);
    if (it == r.end()) continue;
    Rational k = it->second;
    r.erase(it);
    for (const auto& [j, c] : fresh) {
      Rational& slot = r[j];
      slot += k * c;
      if (slot == 0) r.erase(j);
    }
  }
  rows_.emplace(nonbasic, std::move(fresh));
  vars_[basic].basic = false;
  vars_[nonbasic].basic = true;
}

bool Simplex::assert_upper(int x, const DeltaRational& c, const Reason& r)
{
  Column& col = vars_[x];
  if (col.upper && col.upper->value <= c) return true;
  if (col.lower && c < col.lower->value) {
    conflict_.parts = {{col.lower->reason, 1}, {r, 1}};
    return false;
  }
  trail_.push_back({x, true, col.upper});
  col.upper = Bound{c, r};
  if (!col.basic && col.value > c) update(x, c);
  return true;
}

bool Simplex::assert_lower(int x, const DeltaRational& c, const Reason& r)
{
  Column& col = vars_[x];
  if (col.lower && c <= col.lower->value) return true;
  if (col.upper && col.upper->value < c) {
    conflict_.parts = {{col.upper->reason, 1}, {r, 1}};
    return false;
  }
  trail_.push_back({x, false, col.lower});
  col.lower = Bound{c, r};
  if (!col.basic && col.value < c) update(x, c);
  return true;
}

void Simplex::explain_row(int basic, bool below)
{
  conflict_.parts.clear();
  const Column& b = vars_[basic];
  conflict_.parts.emplace_back(below ? b.lower->reason : b.upper->reason, 1);
  for (const auto& [j, a] : rows_.at(basic)) {
    const Column& col = vars_[j];
    bool use_upper = below ? a > 0 : a < 0;
    const auto& bound = use_upper ? col.upper : col.lower;
    conflict_.parts.emplace_back(bound->reason, a > 0 ? a : Rational(-a));
  }
}

bool Simplex::check(std::size_t pivot_budget)
{
  for (std::size_t steps = 0;; ++steps) {
    if (steps > pivot_budget) throw Error("simplex pivot budget exhausted");
    int violated = -1;
    bool below = false;
    for (const auto& [b, row] : rows_) {
      const Column& col = vars_[b];
      if (col.lower && col.value < col.lower->value) {
        violated = b;
        below = true;
        break;
      }
      if (col.upper && col.value > col.upper->value) {
        violated = b;
        below = false;
        break;
      }
    }
    if (violated < 0) return true;
    int entering = -1;
    for (const auto& [j, a] : rows_.at(violated)) {
      const Column& col = vars_[j];
      bool can_increase = !col.upper || col.value < col.upper->value;
      bool can_decrease = !col.lower || col.value > col.lower->value;
      bool ok = below ? ((a > 0 && can_increase) || (a < 0 && can_decrease))
                      : ((a < 0 && can_increase) || (a > 0 && can_decrease));
      if (ok) {
        entering = j;
        break;
      }
    }
    if (entering < 0) {
      explain_row(violated, below);
      return false;
    }
    const Column& vb = vars_[violated];
    DeltaRational target = below ? vb.lower->value : vb.upper->value;
    Rational a = rows_.at(violated).at(entering);
    DeltaRational theta = (1 / a) * (target - vb.value);
    vars_[violated].value = target;
    vars_[entering].value = vars_[entering].value + theta;
    for (auto& [b, row] : rows_) {
      if (b == violated) continue;
      auto it = row.find(entering);
      if (it != row.end()) vars_[b].value = vars_[b].value + it->second * theta;
    }
    pivot(violated, entering);
  }
}

void Simplex::push() { levels_.push_back(trail_.size()); }

void Simplex::pop()
{
  std::size_t mark = levels_.back();
  levels_.pop_back();
  while (trail_.size() > mark) {
    TrailEntry& e = trail_.back();
    if (e.upper)
      vars_[e.var].upper = e.old;
    else
      vars_[e.var].lower = e.old;
    trail_.pop_back();
  }
}

std::map<Var, Rational> Simplex::model() const
{
  Rational delta = 1;
  for (const auto& col : vars_) {
    const DeltaRational& v = col.value;
    if (col.lower) {
      const DeltaRational& l = col.lower->value;
      if (l.a < v.a && l.b > v.b) {
        Rational d = (v.a - l.a) / (l.b - v.b);
        if (d < delta) delta = d;
      }
    }
    if (col.upper) {
      const DeltaRational& u = col.upper->value;
      if (v.a < u.a && v.b > u.b) {
        Rational d = (u.a - v.a) / (v.b - u.b);
        if (d < delta) delta = d;
      }
    }
  }
  std::map<Var, Rational> out;
  for (const auto& col : vars_)
    if (col.origin) out.emplace(*col.origin, col.value.a + col.value.b * delta);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Loads the constraints into a fresh simplex. Returns the index of a
// constraint that is false on its own (no variables), if any.
std::optional<std::size_t> load(Simplex& sx, const std::vector<LinearConstraint>& cs, bool& ok)
{
  ok = true;
  struct Pending
  {
    std::size_t index;
    int var;
    Rational bound;
    Rational g;
  };
  std::vector<Pending> pending;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const LinearExpr& e = cs[i].expr;
    if (e.is_constant()) {
      if (!LinearConstraint{e, cs[i].rel}.holds(Valuation{})) return i;
      continue;
    }
    Rational g = e.coeffs.begin()->second;
    std::map<Var, Rational> form;
    for (const auto& [v, c] : e.coeffs) form.emplace(v, c / g);
    int x = form.size() == 1 ? sx.variable(form.begin()->first) : sx.slack(form);
    pending.push_back({i, x, -e.constant / g, g});
  }
  for (const auto& p : pending) {
    Relation rel = cs[p.index].rel;
    int id = static_cast<int>(p.index);
    bool as_upper = p.g > 0;
    auto bound = [&](bool upper) {
      Rational b = rel == Relation::Lt ? Rational(upper ? -1 : 1) : Rational(0);
      DeltaRational v(p.bound, b);
      if (upper) return sx.assert_upper(p.var, v, {id, 1 / p.g});
      return sx.assert_lower(p.var, v, {id, -1 / p.g});
    };
    if (rel == Relation::Eq) {
      if (!bound(true) || !bound(false)) {
        ok = false;
        return std::nullopt;
      }
    } else if (!bound(as_upper)) {
      ok = false;
      return std::nullopt;
    }
  }
  ok = sx.check();
  return std::nullopt;
}

}  // namespace

std::optional<FarkasCertificate> farkas_refutation(const std::vector<LinearConstraint>& cs)
{
  Simplex sx;
  bool ok = true;
  FarkasCertificate cert;
  cert.multipliers.assign(cs.size(), 0);
  if (auto bad = load(sx, cs, ok)) {
    const LinearConstraint& c = cs[*bad];
    cert.multipliers[*bad] = c.rel == Relation::Eq && c.expr.constant < 0 ? -1 : 1;
  } else if (ok) {
    return std::nullopt;
  } else {
    for (const auto& [reason, weight] : sx.conflict().parts) cert.multipliers[reason.id] += weight * reason.scale;
  }
  LinearExpr sum;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    sum.add(cs[i].expr, cert.multipliers[i]);
    if (cs[i].rel == Relation::Lt && cert.multipliers[i] > 0) cert.strict = true;
  }
  cert.constant = sum.constant;
  if (!farkas_valid(cs, cert)) throw Error("internal error: invalid Farkas certificate");
  return cert;
}

bool farkas_valid(const std::vector<LinearConstraint>& cs, const FarkasCertificate& cert)
{
  if (cert.multipliers.size() != cs.size()) return false;
  LinearExpr sum;
  bool strict = false;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Rational& m = cert.multipliers[i];
    if (cs[i].rel != Relation::Eq && m < 0) return false;
    if (cs[i].rel == Relation::Lt && m > 0) strict = true;
    sum.add(cs[i].expr, m);
  }
  if (!sum.is_constant() || sum.constant != cert.constant) return false;
  if (cert.strict && !strict) return false;
  return cert.constant > 0 || (cert.strict && cert.constant >= 0);
}

std::optional<Valuation> linear_model(const std::vector<LinearConstraint>& cs)
{
  Simplex sx;
  bool ok = true;
  if (load(sx, cs, ok) || !ok) return std::nullopt;
  Valuation nu;
  for (const auto& [v, q] : sx.model()) nu.set(v, q);
  for (const auto& c : cs)
    for (const auto& [v, k] : c.expr.coeffs)
      if (!nu.contains(v)) nu.set(v, Rational(0));
  return nu;
}

}  // namespace linv
