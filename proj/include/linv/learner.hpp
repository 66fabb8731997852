#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "linv/abstraction.hpp"

namespace linv {

class ProtocolError : public Error
{
 public:
  using Error::Error;
};

// The same equivalence counterexample came back while the learner was in
// the same state; the teacher is contradicting itself.
class LivelockDetected : public Error
{
 public:
  using Error::Error;
};

struct Query
{
  enum class Kind
  {
    Membership,
    Equivalence
  };

  Kind kind = Kind::Equivalence;
  AbstractValuation mu;  // Membership
  BoolFormula beta = Formula::truth();  // Equivalence
};

struct Answer
{
  Query::Kind kind = Query::Kind::Equivalence;
  bool yes = false;
  AbstractValuation counterexample;  // Equivalence, when !yes

  static Answer member(bool yes) { return {Query::Kind::Membership, yes, {}}; }
  static Answer equivalent() { return {Query::Kind::Equivalence, true, {}}; }
  static Answer counter(AbstractValuation mu) { return {Query::Kind::Equivalence, false, std::move(mu)}; }
};

// CDNF over n indicator variables, driven one answer at a time.
class Learner
{
 public:
  struct Basis
  {
    AbstractValuation a;
    std::vector<AbstractValuation> s;
    BoolFormula h = Formula::falsity();
  };

  explicit Learner(std::size_t n);

  std::size_t arity() const { return n_; }
  bool done() const { return done_; }
  const Query& query() const;
  const BoolFormula& result() const;
  void answer(const Answer& ans);

  BoolFormula hypothesis() const;
  const std::vector<Basis>& bases() const { return bases_; }
  std::size_t membership_queries() const { return mem_; }
  std::size_t equivalence_queries() const { return eq_; }

  // term_a(u): the conjunction of u's literals at positions where u and a
  // differ (True if they agree everywhere).
  static BoolFormula term(const AbstractValuation& a, const AbstractValuation& u);

 private:
  void ask_equivalence();
  void next_walk_step();
  void finish_walk();
  void rebuild(Basis& b);
  std::string signature() const;

  std::size_t n_;
  std::vector<Basis> bases_;
  Query pending_;
  bool done_ = false;
  BoolFormula result_ = Formula::truth();
  std::size_t mem_ = 0;
  std::size_t eq_ = 0;

  // Walking state: bases still to process, the point being walked, and the
  // next bit position to try.
  std::vector<std::size_t> walk_queue_;
  AbstractValuation walk_point_;
  AbstractValuation counterexample_;
  std::size_t walk_bit_ = 0;

  std::set<std::pair<std::string, std::string>> seen_;
};

}  // namespace linv
