#include "linv/interpolate.hpp"

#include <map>
#include <unordered_map>

#include "linv/atom.hpp"
#include "linv/simplex.hpp"
#include "linv/smtlib.hpp"

namespace linv {

namespace {

struct Side
{
  std::vector<LinearConstraint> cons;
  std::vector<LinearExpr> diseqs;  // expr != 0
};

Formula constraint_formula(const LinearExpr& e, Relation rel)
{
  if (e.is_constant()) {
    switch (rel) {
      case Relation::Lt: return Formula::boolean(e.constant < 0);
      case Relation::Le: return Formula::boolean(e.constant <= 0);
      case Relation::Eq: return Formula::boolean(e.constant == 0);
    }
  }
  return Atom::linear(e, rel).to_formula();
}

class CubeSolver
{
 public:
  explicit CubeSolver(const IntegerVars& ints) : ints_(ints) {}

  Formula run(Side a, Side b) { return solve(std::move(a), std::move(b)); }

 private:
  static constexpr int kBranchBudget = 512;

  // Tightens integral constraints; false if one has no integer solution.
  bool tighten(std::vector<LinearConstraint>& cs) const
  {
    for (auto& c : cs) {
      if (!ints_.covers(c.expr) || c.expr.is_constant()) continue;
      auto t = integer_tightened(c);
      if (!t) return false;
      c = *t;
    }
    return true;
  }

  Formula solve(Side a, Side b)
  {
    if (!tighten(a.cons)) return Formula::falsity();
    if (!tighten(b.cons)) return Formula::truth();
    std::vector<LinearConstraint> all = a.cons;
    all.insert(all.end(), b.cons.begin(), b.cons.end());
    if (auto cert = farkas_refutation(all)) return from_certificate(a, *cert);

    Valuation nu = *linear_model(all);
    for (const auto& d : a.diseqs)
      for (const auto& [v, k] : d.coeffs)
        if (!nu.contains(v)) nu.set(v, Rational(0));
    for (const auto& d : b.diseqs)
      for (const auto& [v, k] : d.coeffs)
        if (!nu.contains(v)) nu.set(v, Rational(0));

    // A violated disequality is split into its two strict halves.
    for (std::size_t i = 0; i < a.diseqs.size(); ++i) {
      if (a.diseqs[i].evaluate(nu) != 0) continue;
      LinearExpr d = a.diseqs[i];
      a.diseqs.erase(a.diseqs.begin() + static_cast<long>(i));
      Side lo = a, hi = a;
      lo.cons.push_back({d, Relation::Lt});
      hi.cons.push_back({d.negated(), Relation::Lt});
      return Formula::mk_or(solve(std::move(lo), b), solve(std::move(hi), b));
    }
    for (std::size_t i = 0; i < b.diseqs.size(); ++i) {
      if (b.diseqs[i].evaluate(nu) != 0) continue;
      LinearExpr d = b.diseqs[i];
      if (entails_zero(a.cons, d)) return constraint_formula(d, Relation::Eq);
      b.diseqs.erase(b.diseqs.begin() + static_cast<long>(i));
      Side lo = b, hi = b;
      lo.cons.push_back({d, Relation::Lt});
      hi.cons.push_back({d.negated(), Relation::Lt});
      return Formula::mk_and(solve(a, std::move(lo)), solve(a, std::move(hi)));
    }

    // Branch on a fractional integer variable, on A's side if A mentions it.
    for (const auto& [v, val] : nu.values()) {
      const Rational& q = std::get<Rational>(val);
      if (!ints_.contains(v) || q.get_den() == 1) continue;
      if (++branches_ > kBranchBudget) throw InterpolationIncomplete("integer branching budget exhausted");
      mpz_class fl;
      mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
      LinearExpr le, ge;
      le.add_var(v, 1);
      le.constant = -Rational(fl);  // v - fl <= 0
      ge.add_var(v, -1);
      ge.constant = Rational(fl) + 1;  // fl + 1 - v <= 0
      bool on_a = false;
      for (const auto& c : a.cons) on_a = on_a || c.expr.coeffs.count(v);
      for (const auto& d : a.diseqs) on_a = on_a || d.coeffs.count(v);
      Side& s = on_a ? a : b;
      Side lo = s, hi = s;
      lo.cons.push_back({le, Relation::Le});
      hi.cons.push_back({ge, Relation::Le});
      if (on_a) return Formula::mk_or(solve(std::move(lo), b), solve(std::move(hi), b));
      return Formula::mk_and(solve(a, std::move(lo)), solve(a, std::move(hi)));
    }
    throw InputSatisfiable("cubes are jointly satisfiable");
  }

  // A's constraints alone force d = 0, over variables A mentions.
  static bool entails_zero(const std::vector<LinearConstraint>& cs, const LinearExpr& d)
  {
    for (const auto& [v, k] : d.coeffs) {
      bool seen = false;
      for (const auto& c : cs) seen = seen || c.expr.coeffs.count(v);
      if (!seen) return false;
    }
    for (const LinearExpr& side : {d, d.negated()}) {
      std::vector<LinearConstraint> t = cs;
      t.push_back({side, Relation::Lt});
      if (!farkas_refutation(t)) return false;
    }
    return true;
  }

  Formula from_certificate(const Side& a, const FarkasCertificate& cert) const
  {
    LinearExpr e;
    bool strict = false;
    for (std::size_t i = 0; i < a.cons.size(); ++i) {
      const Rational& m = cert.multipliers[i];
      if (m == 0) continue;
      e.add(a.cons[i].expr, m);
      if (a.cons[i].rel == Relation::Lt) strict = true;
    }
    return constraint_formula(e, strict ? Relation::Lt : Relation::Le);
  }

  const IntegerVars& ints_;
  int branches_ = 0;
};

struct Cube
{
  std::map<Var, bool> bools;
  Side arith;
  bool inconsistent = false;
};

Cube read_cube(const std::vector<Formula>& lits)
{
  Cube c;
  for (const auto& f : lits) {
    if (f.is_true()) continue;
    if (f.is_false()) {
      c.inconsistent = true;
      continue;
    }
    auto lit = Atom::literal_of(f);
    if (!lit) throw Error("not a literal: " + to_string(f));
    const auto& [atom, positive] = *lit;
    if (atom.is_boolean()) {
      auto [it, inserted] = c.bools.emplace(atom.bool_var(), positive);
      if (!inserted && it->second != positive) c.inconsistent = true;
    } else if (atom.relation() == Relation::Eq && !positive) {
      c.arith.diseqs.push_back(atom.expr());
    } else {
      c.arith.cons.push_back({atom.expr(), atom.relation()});
    }
  }
  return c;
}

}  // namespace

Formula cube_interpolant(const std::vector<Formula>& a, const std::vector<Formula>& b,
                         const IntegerVars& ints)
{
  Cube ca = read_cube(a);
  Cube cb = read_cube(b);
  if (ca.inconsistent) return Formula::falsity();
  if (cb.inconsistent) return Formula::truth();
  for (const auto& [v, pol] : ca.bools) {
    auto it = cb.bools.find(v);
    if (it != cb.bools.end() && it->second != pol) {
      Formula x = Formula::bool_var(v);
      return pol ? x : Formula::mk_not(x);
    }
  }
  return CubeSolver(ints).run(std::move(ca.arith), std::move(cb.arith));
}

std::vector<Formula> implicant(const Formula& f, const Valuation& nu)
{
  std::vector<Formula> out;
  std::map<std::pair<const void*, bool>, bool> done;
  std::unordered_map<const void*, bool> values;
  auto value = [&](const Formula& g) {
    auto it = values.find(g.id());
    if (it != values.end()) return it->second;
    bool v = evaluate(g, nu);
    values.emplace(g.id(), v);
    return v;
  };
  // Collect literals making g evaluate to `pol` under nu.
  std::function<void(const Formula&, bool)> walk = [&](const Formula& g, bool pol) {
    if (!done.emplace(std::pair{g.id(), pol}, true).second) return;
    using K = Formula::Kind;
    switch (g.kind()) {
      case K::True:
      case K::False: return;
      case K::Not: walk(g.child(), !pol); return;
      case K::And:
      case K::Or: {
        bool all = (g.kind() == K::And) == pol;
        for (const auto& c : g.children()) {
          if (all) {
            walk(c, pol);
          } else if (value(c) == pol) {
            walk(c, pol);
            return;
          }
        }
        return;
      }
      default: out.push_back(pol ? g : Formula::mk_not(g)); return;
    }
  };
  if (!value(f)) throw Error("implicant: valuation does not satisfy the formula");
  walk(f, true);
  return out;
}

namespace {

// Drops literals of the cube as long as it stays inconsistent with other.
std::vector<Formula> shrink(std::vector<Formula> cube, const Formula& other, Solver& solver)
{
  if (solver.is_sat(Formula::mk_and(Formula::mk_and(cube), other))) return cube;
  for (std::size_t i = cube.size(); i-- > 0;) {
    std::vector<Formula> rest = cube;
    rest.erase(rest.begin() + static_cast<long>(i));
    if (!solver.is_sat(Formula::mk_and(Formula::mk_and(rest), other))) cube = std::move(rest);
  }
  return cube;
}

}  // namespace

Formula binary_interpolant(const Formula& a, const Formula& b, Solver& solver,
                           const InterpolationOptions& opts)
{
  const IntegerVars& ints = solver.config().integers;
  Formula result = Formula::falsity();
  std::size_t a_cubes = 0;
  for (;;) {
    SatResult ra = solver.check_sat(Formula::mk_and(a, Formula::mk_not(result)));
    if (!ra.sat) break;
    if (++a_cubes > opts.dnf_cap) throw DnfBlowup("too many cubes on the A side");
    std::vector<Formula> ca = shrink(implicant(a, ra.model), b, solver);
    Formula part = Formula::truth();
    std::size_t b_cubes = 0;
    for (;;) {
      SatResult rb = solver.check_sat(Formula::mk_and(part, b));
      if (!rb.sat) break;
      if (++b_cubes > opts.dnf_cap) throw DnfBlowup("too many cubes on the B side");
      std::vector<Formula> cb = shrink(implicant(b, rb.model), Formula::mk_and(ca), solver);
      part = Formula::mk_and(part, cube_interpolant(ca, cb, ints));
    }
    result = Formula::mk_or(result, part);
  }
  return result;
}

namespace {

bool subset(const std::set<Var>& a, const std::set<Var>& b)
{
  for (const auto& v : a)
    if (!b.count(v)) return false;
  return true;
}

std::set<Var> intersect(const std::set<Var>& a, const std::set<Var>& b)
{
  std::set<Var> out;
  for (const auto& v : a)
    if (b.count(v)) out.insert(v);
  return out;
}

void check_sequence(const std::vector<Formula>& seq, const std::vector<Formula>& lambda, Solver& solver)
{
  std::size_t m = seq.size();
  if (lambda.size() != m + 1 || !lambda.front().is_true() || !lambda.back().is_false())
    throw SolverFailure("interpolant sequence has the wrong shape");
  std::vector<std::set<Var>> prefix(m + 1), suffix(m + 1);
  for (std::size_t i = 1; i <= m; ++i) {
    prefix[i] = prefix[i - 1];
    for (const auto& v : symbols(seq[i - 1])) prefix[i].insert(v);
  }
  for (std::size_t i = m; i-- > 0;) {
    suffix[i] = suffix[i + 1];
    for (const auto& v : symbols(seq[i])) suffix[i].insert(v);
  }
  for (std::size_t i = 1; i <= m; ++i) {
    if (!solver.is_valid(Formula::mk_implies(Formula::mk_and(lambda[i - 1], seq[i - 1]), lambda[i])))
      throw SolverFailure("interpolant step " + std::to_string(i) + " is not inductive");
    if (!subset(symbols(lambda[i]), intersect(prefix[i], suffix[i])))
      throw SolverFailure("interpolant " + std::to_string(i) + " mentions unshared symbols");
  }
}

}  // namespace

std::vector<Formula> sequence_interpolant(const std::vector<Formula>& seq, Solver& solver,
                                          const InterpolationOptions& opts)
{
  std::size_t m = seq.size();
  if (m == 0 || solver.is_sat(Formula::mk_and(seq))) throw InputSatisfiable("sequence is satisfiable");
  std::vector<Formula> lambda{Formula::truth()};
  if (!opts.external_command.empty()) {
    Clock::time_point d = Clock::now() + solver.config().time_limit;
    if (solver.deadline() && *solver.deadline() < d) d = *solver.deadline();
    for (auto& f : external_sequence_interpolant(seq, opts.external_command, d, solver.config().integers))
      lambda.push_back(f);
  } else {
    std::vector<Formula> suffix(m + 1, Formula::truth());
    for (std::size_t i = m; i-- > 0;) suffix[i] = Formula::mk_and(seq[i], suffix[i + 1]);
    for (std::size_t i = 1; i < m; ++i)
      lambda.push_back(
          binary_interpolant(Formula::mk_and(lambda[i - 1], seq[i - 1]), suffix[i], solver, opts));
  }
  lambda.push_back(Formula::falsity());
  check_sequence(seq, lambda, solver);
  return lambda;
}

}  // namespace linv
