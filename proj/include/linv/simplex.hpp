#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "linv/atom.hpp"

namespace linv {

// a + b*d for a positive infinitesimal d.
struct DeltaRational
{
  Rational a = 0;
  Rational b = 0;

  DeltaRational() = default;
  DeltaRational(Rational x, Rational y = 0) : a(std::move(x)), b(std::move(y)) {}

  friend DeltaRational operator+(const DeltaRational& x, const DeltaRational& y) { return {x.a + y.a, x.b + y.b}; }
  friend DeltaRational operator-(const DeltaRational& x, const DeltaRational& y) { return {x.a - y.a, x.b - y.b}; }
  friend DeltaRational operator*(const Rational& k, const DeltaRational& x) { return {k * x.a, k * x.b}; }
  friend bool operator==(const DeltaRational& x, const DeltaRational& y) { return x.a == y.a && x.b == y.b; }
  friend bool operator<(const DeltaRational& x, const DeltaRational& y)
  {
    return x.a < y.a || (x.a == y.a && x.b < y.b);
  }
  friend bool operator<=(const DeltaRational& x, const DeltaRational& y) { return !(y < x); }
  friend bool operator>(const DeltaRational& x, const DeltaRational& y) { return y < x; }
  friend bool operator>=(const DeltaRational& x, const DeltaRational& y) { return !(x < y); }
};

// Incremental bounded simplex over delta-rationals with Bland's rule.
// Tableau variables are either problem variables or slacks standing for a
// linear form over problem variables. Bounds are tagged with an opaque
// reason and can be retracted with push/pop.
class Simplex
{
 public:
  struct Reason
  {
    int id;
    Rational scale;  // the bound, as `expr <= 0`, equals scale * (constraint id)
  };

  struct Explanation
  {
    // Each entry contributes weight * (bound as `... <= 0`); their sum is a
    // positive constant.
    std::vector<std::pair<Reason, Rational>> parts;
  };

  int variable(const Var& v);
  // Slack for sum(coeffs); must be created before the first check.
  int slack(const std::map<Var, Rational>& coeffs);
  std::size_t num_vars() const { return vars_.size(); }

  // Returns false and fills conflict() when the bound contradicts the
  // opposite bound of the same variable.
  bool assert_upper(int x, const DeltaRational& c, const Reason& r);
  bool assert_lower(int x, const DeltaRational& c, const Reason& r);

  bool check(std::size_t pivot_budget = SIZE_MAX);
  const Explanation& conflict() const { return conflict_; }

  void push();
  void pop();

  // Concrete values for every problem variable; only meaningful after a
  // successful check.
  std::map<Var, Rational> model() const;

 private:
  struct Bound
  {
    DeltaRational value;
    Reason reason;
  };
  struct Column
  {
    std::optional<Bound> lower;
    std::optional<Bound> upper;
    DeltaRational value;
    bool basic = false;
    std::optional<Var> origin;
  };
  struct TrailEntry
  {
    int var;
    bool upper;
    std::optional<Bound> old;
  };

  void update(int x, const DeltaRational& v);
  void pivot(int basic, int nonbasic);
  void explain_row(int basic, bool below);

  std::vector<Column> vars_;
  std::map<int, std::map<int, Rational>> rows_;  // basic -> (nonbasic -> coeff)
  std::map<Var, int> by_var_;
  std::map<std::map<Var, Rational>, int> by_form_;
  std::vector<TrailEntry> trail_;
  std::vector<std::size_t> levels_;
  Explanation conflict_;
};

struct FarkasCertificate
{
  std::vector<Rational> multipliers;  // one per input constraint
  Rational constant;                  // sum(multipliers * expr), all variables cancelled
  bool strict = false;                // a strict constraint carries positive weight
};

// A certificate that the conjunction of the constraints is infeasible, or
// nullopt if it is feasible.
std::optional<FarkasCertificate> farkas_refutation(const std::vector<LinearConstraint>& cs);

// Independent check of a certificate against its constraints.
bool farkas_valid(const std::vector<LinearConstraint>& cs, const FarkasCertificate& cert);

// A model of the constraints, if feasible.
std::optional<Valuation> linear_model(const std::vector<LinearConstraint>& cs);

}  // namespace linv
