#include "linv/teacher.hpp"

#include <limits>

namespace linv {

std::uint64_t random_answer_threshold(std::size_t n)
{
  mpz_class num, den;
  mpz_ui_pow_ui(num.get_mpz_t(), 13, n);
  mpz_ui_pow_ui(den.get_mpz_t(), 10, n);
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (!q.fits_ulong_p()) return std::numeric_limits<std::uint64_t>::max();
  return q.get_ui();
}

Teacher::Teacher(const AnnotatedLoop& loop, Solver& solver, std::mt19937_64& rng, FreshNames& names)
    : loop_(loop),
      solver_(solver),
      rng_(rng),
      names_(names),
      under_(loop.under_approximation()),
      over_(loop.over_approximation()),
      pre_over_(pre_condition(over_, loop.body, names))
{
  reset(PredicateSet{});
}

void Teacher::reset(const PredicateSet& p)
{
  p_ = p;
  cex_.clear();
  cache_.clear();
  r_ = 0;
  tau_ = random_answer_threshold(p_.size());
}

void Teacher::restart() { cache_.clear(); }

Valuation Teacher::program_state(const Valuation& model) const
{
  Valuation nu;
  for (const auto& d : loop_.decls) {
    Var v(d.name);
    if (model.contains(v))
      nu.set(v, model.get(v));
    else if (d.sort == Sort::Bool)
      nu.set(v, false);
    else
      nu.set(v, Rational(0));
  }
  return nu;
}

// Prefers a model off every equality predicate when one exists.
Valuation Teacher::generic_witness(const Formula& f, const Valuation& model)
{
  Valuation nu = program_state(model);
  std::vector<Formula> off{f};
  for (const auto& a : p_.atoms())
    if (!a.is_boolean() && a.relation() == Relation::Eq && a.holds(nu))
      off.push_back(Formula::mk_not(a.to_formula()));
  if (off.size() > 1) {
    SatResult s = solver_.check_sat(Formula::mk_and(std::move(off)));
    if (s.sat) return program_state(s.model);
  }
  return nu;
}

void Teacher::record(const Valuation& nu, Direction d, const std::string& source)
{
  cex_.push_back(Witness{nu, d, source});
}

void Teacher::remember(const AbstractValuation& mu, bool value, Provenance prov)
{
  auto [it, inserted] = cache_.emplace(mu, CachedAnswer{value, prov});
  if (inserted) return;
  if (it->second.value != value)
    throw Conflict("abstract valuation " + to_string(mu) + " classified both ways");
  if (prov == Provenance::Derived) it->second.provenance = prov;
}

bool Teacher::resolve_membership(const AbstractValuation& mu)
{
  Formula theta = gamma_star(mu, p_);
  SatResult s = solver_.check_sat(theta);
  if (!s.sat) {
    remember(mu, false, Provenance::Derived);
    return false;
  }
  if (solver_.is_valid(Formula::mk_implies(theta, under_))) {
    record(program_state(s.model), Direction::Positive, "membership");
    remember(mu, true, Provenance::Derived);
    return true;
  }
  ValidityResult v = solver_.check_valid(Formula::mk_implies(theta, over_));
  if (!v.valid) {
    record(program_state(v.counterexample), Direction::Negative, "membership");
    remember(mu, false, Provenance::Derived);
    return false;
  }
  auto it = cache_.find(mu);
  if (it != cache_.end()) return it->second.value;
  bool value = (rng_() & 1) != 0;
  remember(mu, value, Provenance::Random);
  return value;
}

InvariantCheck Teacher::check_invariant(const Formula& theta)
{
  InvariantCheck r;
  const std::vector<Formula> clauses{
      Formula::mk_implies(loop_.pre, theta),
      Formula::mk_implies(Formula::mk_and(theta, Formula::mk_not(loop_.guard)), loop_.post),
      Formula::mk_implies(Formula::mk_and(theta, loop_.guard), pre_condition(theta, loop_.body, names_)),
  };
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    ValidityResult v = solver_.check_valid(clauses[i]);
    if (!v.valid) {
      r.failed_clause = static_cast<int>(i) + 1;
      r.counterexample = program_state(v.counterexample);
      return r;
    }
  }
  r.holds = true;
  return r;
}

Answer Teacher::resolve_equivalence(const BoolFormula& beta)
{
  Formula theta = gamma(beta, p_);
  if (check_invariant(theta).holds) return Answer::equivalent();

  struct Clause
  {
    Formula query;
    Direction direction;
    const char* source;
  };
  const Clause clauses[] = {
      {Formula::mk_implies(under_, theta), Direction::Positive, "under"},
      {Formula::mk_implies(theta, over_), Direction::Negative, "over"},
      {Formula::mk_implies(Formula::mk_and(theta, loop_.guard), pre_over_), Direction::Negative, "consecution"},
  };
  for (const auto& c : clauses) {
    ValidityResult v = solver_.check_valid(c.query);
    if (v.valid) continue;
    Valuation nu = generic_witness(Formula::mk_not(c.query), v.counterexample);
    AbstractValuation mu = alpha_star(nu, p_);
    bool positive = c.direction == Direction::Positive;
    if (satisfies(mu, beta) == positive)
      throw Error("internal error: abstract counterexample agrees with the hypothesis");
    record(nu, c.direction, c.source);
    remember(mu, positive, Provenance::Derived);
    return Answer::counter(std::move(mu));
  }

  if (r_ >= tau_) throw ExcessiveRandomAnswers(theta);
  ++r_;
  auto mu = random_counterexample(beta);
  if (!mu) throw ExcessiveRandomAnswers(theta);
  remember(*mu, !satisfies(*mu, beta), Provenance::Random);
  return Answer::counter(std::move(*mu));
}

Answer Teacher::resolve(const Query& q)
{
  if (q.kind == Query::Kind::Membership) return Answer::member(resolve_membership(q.mu));
  return resolve_equivalence(q.beta);
}

// Uniform over the abstract valuations whose cached classification, if
// any, agrees with being a counterexample to beta.
std::optional<AbstractValuation> Teacher::random_counterexample(const BoolFormula& beta)
{
  std::size_t n = p_.size();
  auto admissible = [&](const AbstractValuation& mu) {
    auto it = cache_.find(mu);
    return it == cache_.end() || it->second.value != satisfies(mu, beta);
  };
  auto from_bits = [&](std::uint64_t bits) {
    AbstractValuation mu(n);
    for (std::size_t i = 0; i < n; ++i) mu[i] = (bits >> i) & 1;
    return mu;
  };
  if (n <= 12) {
    std::vector<AbstractValuation> pool;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      AbstractValuation mu = from_bits(bits);
      if (admissible(mu)) pool.push_back(std::move(mu));
    }
    if (pool.empty()) return std::nullopt;
    return pool[rng_() % pool.size()];
  }
  for (int attempt = 0; attempt < 4096; ++attempt) {
    AbstractValuation mu(n);
    for (std::size_t i = 0; i < n; ++i) mu[i] = (rng_() & 1) != 0;
    if (admissible(mu)) return mu;
  }
  return std::nullopt;
}

ConflictEvidence Teacher::find_conflict_pair() const
{
  ConflictEvidence ev;
  std::vector<AbstractValuation> abs;
  for (const auto& w : cex_) abs.push_back(alpha_star(w.nu, p_));
  for (std::size_t i = 0; i < cex_.size(); ++i)
    for (std::size_t j = i + 1; j < cex_.size(); ++j) {
      if (cex_[i].direction == cex_[j].direction || abs[i] != abs[j] || cex_[i].nu == cex_[j].nu) continue;
      ev.concrete = true;
      ev.nu = cex_[i].nu;
      ev.nu_prime = cex_[j].nu;
      return ev;
    }
  return ev;
}

}  // namespace linv
