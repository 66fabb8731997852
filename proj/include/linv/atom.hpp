#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "linv/logic.hpp"

namespace linv {

// c0 + sum(c_i * x_i); zero coefficients are never stored.
struct LinearExpr
{
  std::map<Var, Rational> coeffs;
  Rational constant = 0;

  static LinearExpr of(const Term& t);

  bool is_constant() const { return coeffs.empty(); }
  void add(const LinearExpr& o, const Rational& k = 1);
  void add_var(const Var& v, const Rational& k);
  LinearExpr negated() const;
  LinearExpr scaled(const Rational& k) const;
  Rational evaluate(const Valuation& nu) const;
  Term to_term() const;

  friend bool operator==(const LinearExpr& a, const LinearExpr& b)
  {
    return a.constant == b.constant && a.coeffs == b.coeffs;
  }
  friend bool operator<(const LinearExpr& a, const LinearExpr& b);
};

enum class Relation
{
  Lt,
  Le,
  Eq
};

const char* relation_symbol(Relation r);

// expr rel 0
struct LinearConstraint
{
  LinearExpr expr;
  Relation rel = Relation::Le;

  bool holds(const Valuation& nu) const;
  std::string to_string() const;
};

// A predicate: either a Boolean variable or a linear constraint in normal
// form (integer coefficients with gcd 1; equalities have a positive
// coefficient on their least variable).
class Atom
{
 public:
  static Atom boolean(const Var& v);
  // Throws Error if e has no variables.
  static Atom linear(const LinearExpr& e, Relation rel);

  // Literal view of a formula: an atom plus polarity. Negated
  // inequalities are turned around (!(a <= b) is b < a); negated
  // equalities keep the equality atom with negative polarity.
  static std::optional<std::pair<Atom, bool>> literal_of(const Formula& f);

  bool is_boolean() const { return is_bool_; }
  const Var& bool_var() const { return var_; }
  const LinearExpr& expr() const { return expr_; }
  Relation relation() const { return rel_; }

  // The complementary inequality: !(e <= 0) is -e < 0 and vice versa.
  Atom complement() const;

  Formula to_formula() const;
  bool holds(const Valuation& nu) const;
  std::string to_string() const;

  friend bool operator==(const Atom& a, const Atom& b);
  friend bool operator<(const Atom& a, const Atom& b);
  friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }

 private:
  Atom() = default;
  bool is_bool_ = false;
  Var var_;
  LinearExpr expr_;
  Relation rel_ = Relation::Le;
};

// Scale to integer coefficients with gcd 1, positive factor only.
LinearExpr integer_normalized(const LinearExpr& e);

// Program variables declared integer-valued, by name. Indexed copies and
// fresh symbols derived from a name ("x!t3") share its sort.
class IntegerVars
{
 public:
  IntegerVars() = default;
  explicit IntegerVars(std::set<std::string> names) : names_(std::move(names)) {}

  bool empty() const { return names_.empty(); }
  bool contains(const Var& v) const;
  // Every variable of e is integer-valued.
  bool covers(const LinearExpr& e) const;
  const std::set<std::string>& names() const { return names_; }

 private:
  std::set<std::string> names_;
};

// Over integer-valued variables: an equivalent constraint with coprime
// integer coefficients, never strict, constant rounded inward. nullopt if
// no integer point satisfies it.
std::optional<LinearConstraint> integer_tightened(const LinearConstraint& c);

// Atoms occurring in f; Boolean structure is discarded.
std::set<Atom> atoms_of(const Formula& f);

}  // namespace linv
