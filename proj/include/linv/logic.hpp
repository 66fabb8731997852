#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace linv {

using Rational = mpq_class;

class Error : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

class TypeError : public Error
{
 public:
  using Error::Error;
};

class EvalError : public Error
{
 public:
  using Error::Error;
};

class IndexError : public Error
{
 public:
  using Error::Error;
};

// A program variable, optionally carrying a time index x<k>. Names that
// contain '!' are reserved for fresh symbols introduced internally.
struct Var
{
  std::string name;
  std::optional<unsigned> index;

  Var() = default;
  explicit Var(std::string n, std::optional<unsigned> k = std::nullopt)
      : name(std::move(n)), index(k)
  {
  }

  bool is_fresh() const { return name.find('!') != std::string::npos; }
  std::string to_string() const;

  friend bool operator==(const Var& a, const Var& b)
  {
    return a.name == b.name && a.index == b.index;
  }
  friend bool operator<(const Var& a, const Var& b)
  {
    if (a.name != b.name) return a.name < b.name;
    return a.index < b.index;
  }
};

std::string rational_to_string(const Rational& q);

class Term
{
 public:
  enum class Kind
  {
    Const,
    Var,
    Add,
    Sub,
    Scale
  };

  static Term constant(const Rational& q);
  static Term var(const Var& v);
  static Term var(const std::string& name) { return var(Var(name)); }
  static Term scale(const Rational& k, const Term& t);

  Kind kind() const;
  const Rational& value() const;  // Const, Scale factor
  const Var& variable() const;    // Var
  const Term& lhs() const;        // Add/Sub, Scale operand
  const Term& rhs() const;        // Add/Sub

  const void* id() const { return node_.get(); }
  std::size_t hash() const;

  friend Term operator+(const Term& a, const Term& b);
  friend Term operator-(const Term& a, const Term& b);
  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Term operator+(const Term& a, const Term& b);
Term operator-(const Term& a, const Term& b);
bool operator==(const Term& a, const Term& b);

class Formula
{
 public:
  enum class Kind
  {
    True,
    False,
    BoolVar,
    Not,
    And,
    Or,
    Lt,
    Le,
    Eq
  };

  static Formula truth();
  static Formula falsity();
  static Formula boolean(bool b) { return b ? truth() : falsity(); }
  static Formula bool_var(const Var& v);
  static Formula bool_var(const std::string& name) { return bool_var(Var(name)); }

  // Smart constructors: And/Or are flattened, deduplicated and constant
  // folded; comparisons whose difference has no variables are folded.
  static Formula mk_not(const Formula& f);
  static Formula mk_and(std::vector<Formula> fs);
  static Formula mk_or(std::vector<Formula> fs);
  static Formula mk_and(const Formula& a, const Formula& b) { return mk_and(std::vector{a, b}); }
  static Formula mk_or(const Formula& a, const Formula& b) { return mk_or(std::vector{a, b}); }
  static Formula mk_implies(const Formula& a, const Formula& b);
  static Formula mk_iff(const Formula& a, const Formula& b);
  static Formula mk_lt(const Term& a, const Term& b);
  static Formula mk_le(const Term& a, const Term& b);
  static Formula mk_eq(const Term& a, const Term& b);
  static Formula mk_gt(const Term& a, const Term& b) { return mk_lt(b, a); }
  static Formula mk_ge(const Term& a, const Term& b) { return mk_le(b, a); }

  Kind kind() const;
  bool is_true() const { return kind() == Kind::True; }
  bool is_false() const { return kind() == Kind::False; }
  bool is_comparison() const;

  const Var& variable() const;                 // BoolVar
  std::span<const Formula> children() const;   // Not/And/Or
  const Formula& child() const;                // Not
  const Term& lhs() const;                     // comparisons
  const Term& rhs() const;

  const void* id() const { return node_.get(); }
  std::size_t hash() const;
  std::size_t size() const;  // DAG node count

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Kind k, std::vector<Formula> ch, std::optional<Term> l, std::optional<Term> r,
                      std::optional<Var> v);
  std::shared_ptr<const Node> node_;
};

bool operator==(const Formula& a, const Formula& b);

struct FormulaHash
{
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

using Value = std::variant<Rational, bool>;

class Valuation
{
 public:
  Valuation() = default;

  void set(const Var& v, const Rational& q) { values_[v] = q; }
  void set(const Var& v, bool b) { values_[v] = b; }
  void set(const Var& v, const Value& x) { values_[v] = x; }

  bool contains(const Var& v) const { return values_.count(v) != 0; }
  const Value& get(const Var& v) const;
  const Rational& rat(const Var& v) const;
  bool boolean(const Var& v) const;

  // nu|X<k>: the variables with index k, with the index stripped.
  Valuation restrict_index(unsigned k) const;
  // Keep only the given variables.
  Valuation project(const std::set<Var>& keep) const;

  const std::map<Var, Value>& values() const { return values_; }
  bool empty() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }
  std::string to_string() const;

  friend bool operator==(const Valuation& a, const Valuation& b) { return a.values_ == b.values_; }
  friend bool operator!=(const Valuation& a, const Valuation& b) { return !(a == b); }

 private:
  std::map<Var, Value> values_;
};

struct VarSets
{
  std::set<Var> rat;
  std::set<Var> boolean;

  std::set<Var> all() const;
};

VarSets vars_of(const Formula& f);
VarSets vars_of(const Term& t);
std::set<Var> symbols(const Formula& f);

Rational evaluate(const Term& t, const Valuation& nu);
bool evaluate(const Formula& f, const Valuation& nu);

// Simultaneous substitution. Rational-sorted variables map to terms,
// Boolean variables to formulas; anything else is a TypeError.
using Replacement = std::variant<Term, Formula>;
using Substitution = std::map<Var, Replacement>;

Term substitute(const Term& t, const Substitution& sigma);
Formula substitute(const Formula& f, const Substitution& sigma);

// Consistent renaming of variables (both sorts).
Formula rename(const Formula& f, const std::function<Var(const Var&)>& fn);
Term rename(const Term& t, const std::function<Var(const Var&)>& fn);

// e<k>: every unindexed program variable receives index k.
Formula superscript(const Formula& f, unsigned k);
Term superscript(const Term& t, unsigned k);
// theta<k>: indices i are shifted to i + k.
Formula shift(const Formula& f, unsigned k);
// lambda[X<k> -> X]; every variable must carry index k.
Formula desuperscript(const Formula& f, unsigned k);

// Gamma(nu): the conjunction pinning every variable to its value.
Formula gamma_of_valuation(const Valuation& nu);

std::string to_string(const Term& t);
std::string to_string(const Formula& f);
std::ostream& operator<<(std::ostream& os, const Term& t);
std::ostream& operator<<(std::ostream& os, const Formula& f);
std::ostream& operator<<(std::ostream& os, const Var& v);

}  // namespace linv
