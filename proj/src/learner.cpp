#include "linv/learner.hpp"

#include <algorithm>

namespace linv {

Learner::Learner(std::size_t n) : n_(n) { ask_equivalence(); }

const Query& Learner::query() const
{
  if (done_) throw ProtocolError("learner has finished");
  return pending_;
}

const BoolFormula& Learner::result() const
{
  if (!done_) throw ProtocolError("learner has not finished");
  return result_;
}

BoolFormula Learner::term(const AbstractValuation& a, const AbstractValuation& u)
{
  std::vector<Formula> lits;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] == a[j]) continue;
    Formula b = Formula::bool_var(indicator(j));
    lits.push_back(u[j] ? b : Formula::mk_not(b));
  }
  return Formula::mk_and(std::move(lits));
}

void Learner::rebuild(Basis& b)
{
  std::vector<Formula> terms;
  for (const auto& u : b.s) terms.push_back(term(b.a, u));
  b.h = Formula::mk_or(std::move(terms));
}

std::string Learner::signature() const
{
  std::string sig;
  for (const auto& b : bases_) {
    sig += to_string(b.a) + ":";
    std::vector<std::string> s;
    for (const auto& u : b.s) s.push_back(to_string(u));
    std::sort(s.begin(), s.end());
    for (const auto& u : s) sig += u + ",";
    sig += ";";
  }
  return sig;
}

BoolFormula Learner::hypothesis() const
{
  std::vector<Formula> hs;
  for (const auto& b : bases_) hs.push_back(b.h);
  return Formula::mk_and(std::move(hs));
}

void Learner::ask_equivalence()
{
  pending_ = Query{Query::Kind::Equivalence, {}, hypothesis()};
}

void Learner::answer(const Answer& ans)
{
  if (done_) throw ProtocolError("learner has finished");
  if (ans.kind != pending_.kind) throw ProtocolError("answer does not match the pending query");

  if (ans.kind == Query::Kind::Membership) {
    ++mem_;
    if (ans.yes) {
      walk_point_ = pending_.mu;
      walk_bit_ = 0;
    } else {
      ++walk_bit_;
    }
    next_walk_step();
    return;
  }

  ++eq_;
  if (ans.yes) {
    done_ = true;
    result_ = pending_.beta;
    return;
  }
  const AbstractValuation& v = ans.counterexample;
  if (v.size() != n_) throw ProtocolError("counterexample has the wrong width");
  if (!seen_.emplace(signature(), to_string(v)).second)
    throw LivelockDetected("counterexample " + to_string(v) + " repeated for the same hypothesis");

  Valuation val = as_valuation(v);
  walk_queue_.clear();
  for (std::size_t t = 0; t < bases_.size(); ++t)
    if (!evaluate(bases_[t].h, val)) walk_queue_.push_back(t);

  if (walk_queue_.empty()) {
    bases_.push_back(Basis{v, {}, Formula::falsity()});
    ask_equivalence();
    return;
  }
  counterexample_ = v;
  walk_point_ = v;
  walk_bit_ = 0;
  next_walk_step();
}

// Tries single-bit flips of the walked point toward the current basis, in
// ascending bit order; each flip is a membership query.
void Learner::next_walk_step()
{
  const Basis& b = bases_[walk_queue_.front()];
  while (walk_bit_ < n_ && walk_point_[walk_bit_] == b.a[walk_bit_]) ++walk_bit_;
  if (walk_bit_ == n_) {
    finish_walk();
    return;
  }
  AbstractValuation w = walk_point_;
  w[walk_bit_] = !w[walk_bit_];
  pending_ = Query{Query::Kind::Membership, std::move(w), Formula::truth()};
}

void Learner::finish_walk()
{
  Basis& b = bases_[walk_queue_.front()];
  b.s.push_back(walk_point_);
  rebuild(b);
  walk_queue_.erase(walk_queue_.begin());
  if (walk_queue_.empty()) {
    ask_equivalence();
    return;
  }
  walk_point_ = counterexample_;
  walk_bit_ = 0;
  next_walk_step();
}

}  // namespace linv
