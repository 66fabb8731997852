#include "linv/atom.hpp"

#include <unordered_set>

namespace linv {

LinearExpr LinearExpr::of(const Term& t)
{
  LinearExpr e;
  switch (t.kind()) {
    case Term::Kind::Const: e.constant = t.value(); break;
    case Term::Kind::Var: e.add_var(t.variable(), 1); break;
    case Term::Kind::Scale: e.add(of(t.lhs()), t.value()); break;
    case Term::Kind::Add:
      e = of(t.lhs());
      e.add(of(t.rhs()));
      break;
    case Term::Kind::Sub:
      e = of(t.lhs());
      e.add(of(t.rhs()), -1);
      break;
  }
  return e;
}

void LinearExpr::add_var(const Var& v, const Rational& k)
{
  if (k == 0) return;
  auto [it, inserted] = coeffs.emplace(v, k);
  if (!inserted) {
    it->second += k;
    if (it->second == 0) coeffs.erase(it);
  }
}

void LinearExpr::add(const LinearExpr& o, const Rational& k)
{
  if (k == 0) return;
  constant += k * o.constant;
  for (const auto& [v, c] : o.coeffs) add_var(v, k * c);
}

LinearExpr LinearExpr::negated() const { return scaled(-1); }

LinearExpr LinearExpr::scaled(const Rational& k) const
{
  LinearExpr e;
  if (k == 0) return e;
  e.constant = constant * k;
  for (const auto& [v, c] : coeffs) e.coeffs.emplace(v, c * k);
  return e;
}

Rational LinearExpr::evaluate(const Valuation& nu) const
{
  Rational r = constant;
  for (const auto& [v, c] : coeffs) r += c * nu.rat(v);
  return r;
}

namespace {

Term monomial(const Var& v, const Rational& k)
{
  Term x = Term::var(v);
  return k == 1 ? x : Term::scale(k, x);
}

}  // namespace

Term LinearExpr::to_term() const
{
  std::optional<Term> acc;
  for (const auto& [v, c] : coeffs) {
    Term m = monomial(v, c);
    acc = acc ? *acc + m : m;
  }
  if (!acc) return Term::constant(constant);
  if (constant != 0) acc = *acc + Term::constant(constant);
  return *acc;
}

bool operator<(const LinearExpr& a, const LinearExpr& b)
{
  if (a.coeffs != b.coeffs) return a.coeffs < b.coeffs;
  return a.constant < b.constant;
}

const char* relation_symbol(Relation r)
{
  switch (r) {
    case Relation::Lt: return "<";
    case Relation::Le: return "<=";
    case Relation::Eq: return "=";
  }
  return "?";
}

namespace {

bool compare_zero(const Rational& v, Relation r)
{
  switch (r) {
    case Relation::Lt: return v < 0;
    case Relation::Le: return v <= 0;
    case Relation::Eq: return v == 0;
  }
  return false;
}

}  // namespace

bool LinearConstraint::holds(const Valuation& nu) const
{
  return compare_zero(expr.evaluate(nu), rel);
}

std::string LinearConstraint::to_string() const
{
  return linv::to_string(expr.to_term()) + " " + relation_symbol(rel) + " 0";
}

LinearExpr integer_normalized(const LinearExpr& e)
{
  mpz_class lcm = e.constant.get_den();
  for (const auto& [v, c] : e.coeffs) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
  LinearExpr out = e.scaled(Rational(lcm));
  mpz_class g = abs(out.constant.get_num());
  for (const auto& [v, c] : out.coeffs) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
  if (g == 0 || g == 1) return out;
  return out.scaled(Rational(1, 1) / Rational(g));
}

Atom Atom::boolean(const Var& v)
{
  Atom a;
  a.is_bool_ = true;
  a.var_ = v;
  return a;
}

Atom Atom::linear(const LinearExpr& e, Relation rel)
{
  if (e.is_constant()) throw Error("linear atom without variables: " + linv::to_string(e.to_term()));
  Atom a;
  a.expr_ = integer_normalized(e);
  if (rel == Relation::Eq && a.expr_.coeffs.begin()->second < 0) a.expr_ = a.expr_.negated();
  a.rel_ = rel;
  return a;
}

std::optional<std::pair<Atom, bool>> Atom::literal_of(const Formula& f)
{
  using K = Formula::Kind;
  bool positive = true;
  const Formula* g = &f;
  if (f.kind() == K::Not) {
    positive = false;
    g = &f.child();
  }
  if (g->kind() == K::BoolVar) return std::pair{boolean(g->variable()), positive};
  if (!g->is_comparison()) return std::nullopt;
  LinearExpr e = LinearExpr::of(g->lhs());
  e.add(LinearExpr::of(g->rhs()), -1);
  if (e.is_constant()) return std::nullopt;
  switch (g->kind()) {
    case K::Eq: return std::pair{linear(e, Relation::Eq), positive};
    case K::Lt:
      if (positive) return std::pair{linear(e, Relation::Lt), true};
      return std::pair{linear(e.negated(), Relation::Le), true};
    default:
      if (positive) return std::pair{linear(e, Relation::Le), true};
      return std::pair{linear(e.negated(), Relation::Lt), true};
  }
}

Atom Atom::complement() const
{
  if (is_bool_ || rel_ == Relation::Eq)
    throw Error("atom " + to_string() + " has no complementary inequality");
  return linear(expr_.negated(), rel_ == Relation::Lt ? Relation::Le : Relation::Lt);
}

Formula Atom::to_formula() const
{
  if (is_bool_) return Formula::bool_var(var_);
  LinearExpr lhs, rhs;
  for (const auto& [v, c] : expr_.coeffs) {
    if (c > 0)
      lhs.add_var(v, c);
    else
      rhs.add_var(v, -c);
  }
  if (expr_.constant > 0)
    lhs.constant = expr_.constant;
  else
    rhs.constant = -expr_.constant;
  Term l = lhs.to_term();
  Term r = rhs.to_term();
  switch (rel_) {
    case Relation::Lt: return Formula::mk_lt(l, r);
    case Relation::Le: return Formula::mk_le(l, r);
    case Relation::Eq: return Formula::mk_eq(l, r);
  }
  return Formula::truth();
}

bool Atom::holds(const Valuation& nu) const
{
  if (is_bool_) return nu.boolean(var_);
  return compare_zero(expr_.evaluate(nu), rel_);
}

std::string Atom::to_string() const { return linv::to_string(to_formula()); }

bool operator==(const Atom& a, const Atom& b)
{
  if (a.is_bool_ != b.is_bool_) return false;
  if (a.is_bool_) return a.var_ == b.var_;
  return a.rel_ == b.rel_ && a.expr_ == b.expr_;
}

bool operator<(const Atom& a, const Atom& b)
{
  if (a.is_bool_ != b.is_bool_) return a.is_bool_;
  if (a.is_bool_) return a.var_ < b.var_;
  if (!(a.expr_ == b.expr_)) return a.expr_ < b.expr_;
  return a.rel_ < b.rel_;
}

bool IntegerVars::contains(const Var& v) const
{
  if (names_.empty()) return false;
  return names_.count(v.name.substr(0, v.name.find('!'))) != 0;
}

bool IntegerVars::covers(const LinearExpr& e) const
{
  if (names_.empty()) return false;
  for (const auto& [v, c] : e.coeffs)
    if (!contains(v)) return false;
  return true;
}

std::optional<LinearConstraint> integer_tightened(const LinearConstraint& c)
{
  if (c.expr.is_constant()) return c;
  mpz_class lcm = c.expr.constant.get_den();
  for (const auto& [v, k] : c.expr.coeffs) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), k.get_den_mpz_t());
  LinearExpr e = c.expr.scaled(Rational(lcm));
  Relation rel = c.rel;
  if (rel == Relation::Lt) {
    e.constant += 1;
    rel = Relation::Le;
  }
  mpz_class g = 0;
  for (const auto& [v, k] : e.coeffs) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), k.get_num_mpz_t());
  mpz_class c0 = e.constant.get_num();
  if (rel == Relation::Eq && c0 % g != 0) return std::nullopt;
  LinearExpr out;
  for (const auto& [v, k] : e.coeffs) out.coeffs.emplace(v, Rational(k.get_num() / g));
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), c0.get_mpz_t(), g.get_mpz_t());
  out.constant = Rational(q);
  return LinearConstraint{out, rel};
}

std::set<Atom> atoms_of(const Formula& f)
{
  std::set<Atom> out;
  std::unordered_set<const void*> seen;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (!seen.insert(g.id()).second) continue;
    if (g.kind() == Formula::Kind::BoolVar || g.is_comparison()) {
      if (auto lit = Atom::literal_of(g)) out.insert(lit->first);
      continue;
    }
    for (const auto& c : g.children()) stack.push_back(c);
  }
  return out;
}

}  // namespace linv
