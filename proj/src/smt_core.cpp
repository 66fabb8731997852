// CDCL search over a Tseitin encoding, with an incremental simplex checking
// the arithmetic literals after every propagation fixpoint.

#include <algorithm>
#include <unordered_map>

#include "linv/atom.hpp"
#include "linv/simplex.hpp"
#include "linv/solver.hpp"

namespace linv {

namespace {

using Lit = int;

Lit make_lit(int v, bool negative) { return 2 * v + (negative ? 1 : 0); }
int var_of(Lit l) { return l >> 1; }
bool is_neg(Lit l) { return (l & 1) != 0; }
Lit negate(Lit l) { return l ^ 1; }

enum class LBool : signed char
{
  False,
  True,
  Undef
};

struct TheoryAtom
{
  int column;
  Rational bound;
  Relation rel;
  Rational step;  // nonzero for integer atoms: distance to the next integer point of the column
};

struct Clause
{
  std::vector<Lit> lits;
  bool learnt = false;
  bool deleted = false;
  double activity = 0;
};

class VarHeap
{
 public:
  explicit VarHeap(const std::vector<double>& act) : act_(act) {}

  void grow(int n) { pos_.resize(n, -1); }
  bool contains(int v) const { return pos_[v] >= 0; }
  bool empty() const { return heap_.empty(); }

  void insert(int v)
  {
    if (contains(v)) return;
    pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    up(pos_[v]);
  }

  void increased(int v)
  {
    if (contains(v)) up(pos_[v]);
  }

  int pop()
  {
    int top = heap_.front();
    int last = heap_.back();
    heap_.pop_back();
    pos_[top] = -1;
    if (!heap_.empty()) {
      heap_[0] = last;
      pos_[last] = 0;
      down(0);
    }
    return top;
  }

 private:
  bool better(int a, int b) const { return act_[a] > act_[b] || (act_[a] == act_[b] && a < b); }

  void up(int i)
  {
    int v = heap_[i];
    while (i > 0) {
      int parent = (i - 1) / 2;
      if (!better(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      pos_[heap_[i]] = i;
      i = parent;
    }
    heap_[i] = v;
    pos_[v] = i;
  }

  void down(int i)
  {
    int v = heap_[i];
    int n = static_cast<int>(heap_.size());
    for (;;) {
      int child = 2 * i + 1;
      if (child >= n) break;
      if (child + 1 < n && better(heap_[child + 1], heap_[child])) ++child;
      if (!better(heap_[child], v)) break;
      heap_[i] = heap_[child];
      pos_[heap_[i]] = i;
      i = child;
    }
    heap_[i] = v;
    pos_[v] = i;
  }

  const std::vector<double>& act_;
  std::vector<int> heap_;
  std::vector<int> pos_;
};

double luby(double y, int x)
{
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

class Core
{
 public:
  Core(Clock::time_point deadline, const IntegerVars& integers)
      : deadline_(deadline), integers_(integers), heap_(activity_)
  {
  }

  SatResult solve(const Formula& f)
  {
    if (f.is_false()) return {};
    encode_top(f);
    SatResult r;
    if (!unsat_ && search()) {
      r.sat = true;
      r.model = model(f);
    }
    return r;
  }

 private:
  // -- encoding ------------------------------------------------------------

  int new_var()
  {
    int v = static_cast<int>(assigns_.size());
    assigns_.push_back(LBool::Undef);
    level_.push_back(0);
    reason_.push_back(-1);
    activity_.push_back(0);
    phase_.push_back(true);
    seen_.push_back(false);
    theory_.emplace_back();
    watches_.emplace_back();
    watches_.emplace_back();
    heap_.grow(v + 1);
    heap_.insert(v);
    return v;
  }

  void add_clause(std::vector<Lit> lits)
  {
    if (unsat_) return;
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 0; i + 1 < lits.size(); ++i)
      if (lits[i + 1] == negate(lits[i])) return;
    if (lits.empty()) {
      unsat_ = true;
      return;
    }
    if (lits.size() == 1) {
      LBool v = value(lits[0]);
      if (v == LBool::False) unsat_ = true;
      if (v == LBool::Undef) enqueue(lits[0], -1);
      return;
    }
    attach(Clause{std::move(lits)});
  }

  int attach(Clause c)
  {
    int idx = static_cast<int>(clauses_.size());
    watches_[c.lits[0]].push_back(idx);
    watches_[c.lits[1]].push_back(idx);
    clauses_.push_back(std::move(c));
    return idx;
  }

  int bool_var(const Var& v)
  {
    auto it = bool_vars_.find(v);
    if (it != bool_vars_.end()) return it->second;
    int x = new_var();
    bool_vars_.emplace(v, x);
    return x;
  }

  // `a` is canonical: an equality, or an inequality with positive leading
  // coefficient; integer atoms are never strict.
  int theory_var(const Atom& a, bool integral)
  {
    auto it = atom_vars_.find(a);
    if (it != atom_vars_.end()) return it->second;
    const LinearExpr& e = a.expr();
    Rational g = e.coeffs.begin()->second;
    std::map<Var, Rational> form;
    for (const auto& [v, c] : e.coeffs) form.emplace(v, c / g);
    int col = form.size() == 1 ? simplex_.variable(form.begin()->first) : simplex_.slack(form);
    int x = new_var();
    theory_[x] = TheoryAtom{col, -e.constant / g, a.relation(), integral ? 1 / g : Rational(0)};
    atom_vars_.emplace(a, x);
    if (a.relation() == Relation::Eq) {
      // e = 0 or e < 0 or e > 0
      LinearExpr below = e;
      if (integral) below.constant += 1;
      Lit eq = make_lit(x, false);
      Lit lt = make_lit(theory_var(Atom::linear(below, integral ? Relation::Le : Relation::Lt), integral), false);
      Lit le = make_lit(theory_var(Atom::linear(e, Relation::Le), integral), false);
      add_clause({eq, lt, negate(le)});
      add_clause({negate(eq), le});
      add_clause({negate(eq), negate(lt)});
    }
    return x;
  }

  Lit constant_lit(bool value)
  {
    if (true_var_ < 0) {
      true_var_ = new_var();
      add_clause({make_lit(true_var_, false)});
    }
    return make_lit(true_var_, !value);
  }

  Lit arith_lit(Atom a, bool pos)
  {
    if (integers_.covers(a.expr())) {
      auto t = integer_tightened({a.expr(), a.relation()});
      if (!t) return constant_lit(!pos);
      LinearExpr e = t->expr;
      if (t->rel == Relation::Le && e.coeffs.begin()->second < 0) {
        // !(e <= 0) is -e + 1 <= 0 over the integers
        e = e.negated();
        e.constant += 1;
        pos = !pos;
      }
      return make_lit(theory_var(Atom::linear(e, t->rel), true), !pos);
    }
    if (a.relation() != Relation::Eq && a.expr().coeffs.begin()->second < 0) {
      a = a.complement();
      pos = !pos;
    }
    return make_lit(theory_var(a, false), !pos);
  }

  Lit encode(const Formula& f)
  {
    auto it = memo_.find(f.id());
    if (it != memo_.end()) return it->second;
    Lit l = 0;
    switch (f.kind()) {
      case Formula::Kind::True:
      case Formula::Kind::False: l = constant_lit(f.is_true()); break;
      case Formula::Kind::BoolVar: l = make_lit(bool_var(f.variable()), false); break;
      case Formula::Kind::Not: l = negate(encode(f.child())); break;
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        bool conj = f.kind() == Formula::Kind::And;
        std::vector<Lit> ch;
        for (const auto& c : f.children()) ch.push_back(encode(c));
        int x = new_var();
        l = make_lit(x, false);
        // And: x -> c_i, (all c_i) -> x.  Or is the dual.
        std::vector<Lit> big{conj ? l : negate(l)};
        for (Lit c : ch) {
          add_clause(conj ? std::vector<Lit>{negate(l), c} : std::vector<Lit>{l, negate(c)});
          big.push_back(conj ? negate(c) : c);
        }
        add_clause(std::move(big));
        break;
      }
      default: {
        auto lit = Atom::literal_of(f);
        if (!lit) throw Error("cannot encode " + to_string(f));
        l = arith_lit(lit->first, lit->second);
        break;
      }
    }
    memo_.emplace(f.id(), l);
    return l;
  }

  void encode_top(const Formula& f)
  {
    if (f.kind() == Formula::Kind::And) {
      for (const auto& c : f.children()) encode_top(c);
      return;
    }
    add_clause({encode(f)});
  }

  // -- assignment ----------------------------------------------------------

  LBool value(Lit l) const
  {
    LBool v = assigns_[var_of(l)];
    if (v == LBool::Undef) return v;
    return (v == LBool::True) != is_neg(l) ? LBool::True : LBool::False;
  }

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, int reason)
  {
    int v = var_of(l);
    assigns_[v] = is_neg(l) ? LBool::False : LBool::True;
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(l);
  }

  void new_level()
  {
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    simplex_.push();
  }

  void backtrack(int lvl)
  {
    if (decision_level() <= lvl) return;
    int mark = trail_lim_[lvl];
    for (int i = static_cast<int>(trail_.size()) - 1; i >= mark; --i) {
      int v = var_of(trail_[i]);
      phase_[v] = is_neg(trail_[i]);
      assigns_[v] = LBool::Undef;
      reason_[v] = -1;
      heap_.insert(v);
    }
    trail_.resize(mark);
    qhead_ = std::min<std::size_t>(qhead_, trail_.size());
    theory_head_ = std::min<std::size_t>(theory_head_, trail_.size());
    stale_ = true;
    while (decision_level() > lvl) {
      trail_lim_.pop_back();
      simplex_.pop();
    }
  }

  // Returns a falsified clause index, or -1.
  int propagate()
  {
    while (qhead_ < trail_.size()) {
      Lit p = trail_[qhead_++];
      Lit falsified = negate(p);
      std::vector<int>& ws = watches_[falsified];
      std::size_t i = 0, j = 0;
      int conflict = -1;
      while (i < ws.size()) {
        int ci = ws[i++];
        Clause& c = clauses_[ci];
        if (c.deleted) continue;
        if (c.lits[0] == falsified) std::swap(c.lits[0], c.lits[1]);
        if (value(c.lits[0]) == LBool::True) {
          ws[j++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.lits.size(); ++k) {
          if (value(c.lits[k]) != LBool::False) {
            std::swap(c.lits[1], c.lits[k]);
            watches_[c.lits[1]].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = ci;
        if (value(c.lits[0]) == LBool::False) {
          conflict = ci;
          while (i < ws.size()) ws[j++] = ws[i++];
        } else {
          enqueue(c.lits[0], ci);
        }
      }
      ws.resize(j);
      if (conflict >= 0) return conflict;
    }
    return -1;
  }

  // Pushes the bounds of newly assigned arithmetic literals and checks
  // feasibility. On conflict returns the responsible true literals.
  std::optional<std::vector<Lit>> theory_check()
  {
    auto explain = [&]() {
      std::vector<Lit> out;
      for (const auto& [reason, w] : simplex_.conflict().parts) out.push_back(reason.id);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    };
    bool touched = false;
    for (; theory_head_ < trail_.size(); ++theory_head_) {
      Lit l = trail_[theory_head_];
      const auto& t = theory_[var_of(l)];
      if (!t) continue;
      touched = true;
      Simplex::Reason r{l, 1};
      bool ok = true;
      if (!is_neg(l)) {
        switch (t->rel) {
          case Relation::Le: ok = simplex_.assert_upper(t->column, {t->bound, 0}, r); break;
          case Relation::Lt: ok = simplex_.assert_upper(t->column, {t->bound, -1}, r); break;
          case Relation::Eq:
            ok = simplex_.assert_upper(t->column, {t->bound, 0}, r) &&
                 simplex_.assert_lower(t->column, {t->bound, 0}, r);
            break;
        }
      } else {
        switch (t->rel) {
          case Relation::Le:
            ok = t->step != 0 ? simplex_.assert_lower(t->column, {t->bound + t->step, 0}, r)
                              : simplex_.assert_lower(t->column, {t->bound, 1}, r);
            break;
          case Relation::Lt: ok = simplex_.assert_lower(t->column, {t->bound, 0}, r); break;
          case Relation::Eq: break;
        }
      }
      if (!ok) {
        ++theory_head_;
        stale_ = true;
        return explain();
      }
    }
    if (touched || stale_) {
      stale_ = false;
      if (!simplex_.check()) {
        stale_ = true;
        return explain();
      }
    }
    return std::nullopt;
  }

  // -- conflict analysis ---------------------------------------------------

  void bump_var(int v)
  {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (double& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    heap_.increased(v);
  }

  void bump_clause(Clause& c)
  {
    c.activity += cla_inc_;
    if (c.activity > 1e20) {
      for (auto& d : clauses_)
        if (d.learnt) d.activity *= 1e-20;
      cla_inc_ *= 1e-20;
    }
  }

  // `conflict` is a clause all of whose literals are false, with at least
  // one at the current level. Returns the learnt clause, asserting literal
  // first, and the backjump level.
  std::pair<std::vector<Lit>, int> analyze(std::vector<Lit> conflict)
  {
    std::vector<Lit> learnt{0};
    int pending = 0;
    Lit p = -1;
    int idx = static_cast<int>(trail_.size()) - 1;
    const std::vector<Lit>* lits = &conflict;
    for (;;) {
      for (Lit q : *lits) {
        if (p >= 0 && q == p) continue;
        int v = var_of(q);
        if (seen_[v] || level_[v] == 0) continue;
        seen_[v] = true;
        bump_var(v);
        if (level_[v] == decision_level())
          ++pending;
        else
          learnt.push_back(q);
      }
      while (!seen_[var_of(trail_[idx])]) --idx;
      p = trail_[idx--];
      seen_[var_of(p)] = false;
      if (--pending == 0) break;
      Clause& c = clauses_[reason_[var_of(p)]];
      if (c.learnt) bump_clause(c);
      lits = &c.lits;
    }
    learnt[0] = negate(p);
    int back = 0;
    std::size_t max_i = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) {
      seen_[var_of(learnt[i])] = false;
      if (level_[var_of(learnt[i])] > back) {
        back = level_[var_of(learnt[i])];
        max_i = i;
      }
    }
    if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
    return {learnt, back};
  }

  // Returns false when the conflict is at level 0.
  bool resolve(std::vector<Lit> conflict)
  {
    int top = 0;
    for (Lit l : conflict) top = std::max(top, level_[var_of(l)]);
    if (top == 0) return false;
    backtrack(top);
    auto [learnt, back] = analyze(std::move(conflict));
    backtrack(back);
    if (learnt.size() == 1) {
      enqueue(learnt[0], -1);
    } else {
      Clause c{learnt, true};
      bump_clause(c);
      int ci = attach(std::move(c));
      ++num_learnts_;
      enqueue(learnt[0], ci);
    }
    var_inc_ /= 0.95;
    cla_inc_ /= 0.999;
    return true;
  }

  void reduce_learnts()
  {
    std::vector<int> cand;
    for (std::size_t i = 0; i < clauses_.size(); ++i) {
      Clause& c = clauses_[i];
      if (!c.learnt || c.deleted || c.lits.size() <= 2) continue;
      int v = var_of(c.lits[0]);
      bool locked = reason_[v] == static_cast<int>(i) && value(c.lits[0]) == LBool::True;
      if (!locked) cand.push_back(static_cast<int>(i));
    }
    std::sort(cand.begin(), cand.end(),
              [&](int a, int b) { return clauses_[a].activity < clauses_[b].activity; });
    for (std::size_t i = 0; i < cand.size() / 2; ++i) {
      clauses_[cand[i]].deleted = true;
      clauses_[cand[i]].lits.clear();
      clauses_[cand[i]].lits.shrink_to_fit();
      --num_learnts_;
    }
  }

  void check_deadline()
  {
    if (Clock::now() > deadline_) throw Timeout("solver time limit reached");
  }

  bool search()
  {
    std::size_t conflicts = 0, since_restart = 0, restarts = 0, steps = 0;
    double max_learnts = std::max<double>(1000, clauses_.size() / 3.0);
    for (;;) {
      if ((++steps & 63) == 0) check_deadline();
      int confl = propagate();
      if (confl >= 0) {
        ++conflicts;
        ++since_restart;
        Clause& c = clauses_[confl];
        if (c.learnt) bump_clause(c);
        if (!resolve(c.lits)) return false;
        continue;
      }
      if (auto tc = theory_check()) {
        ++conflicts;
        ++since_restart;
        std::vector<Lit> clause;
        for (Lit l : *tc) clause.push_back(negate(l));
        if (!resolve(std::move(clause))) return false;
        continue;
      }
      if (since_restart > luby(2, static_cast<int>(restarts)) * 64) {
        since_restart = 0;
        ++restarts;
        backtrack(0);
        continue;
      }
      if (num_learnts_ > max_learnts) {
        reduce_learnts();
        max_learnts *= 1.1;
      }
      int next = -1;
      while (!heap_.empty()) {
        int v = heap_.pop();
        if (assigns_[v] == LBool::Undef) {
          next = v;
          break;
        }
      }
      if (next < 0) {
        if (branch_on_fraction()) continue;
        return true;
      }
      new_level();
      enqueue(make_lit(next, phase_[next]), -1);
    }
  }

  // Branch and bound: split on an integer variable with a fractional value.
  bool branch_on_fraction()
  {
    if (integers_.empty()) return false;
    for (const auto& [v, q] : simplex_.model()) {
      if (q.get_den() == 1 || !integers_.contains(v)) continue;
      if (++branches_ > 20000) throw Timeout("integer branching limit reached");
      mpz_class fl;
      mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
      LinearExpr e;
      e.add_var(v, 1);
      e.constant = -Rational(fl);
      theory_var(Atom::linear(e, Relation::Le), true);
      return true;
    }
    return false;
  }

  Valuation model(const Formula& f)
  {
    Valuation nu;
    auto values = simplex_.model();
    VarSets vs = vars_of(f);
    for (const auto& v : vs.rat) {
      auto it = values.find(v);
      nu.set(v, it == values.end() ? Rational(0) : it->second);
    }
    for (const auto& v : vs.boolean) {
      auto it = bool_vars_.find(v);
      nu.set(v, it != bool_vars_.end() && assigns_[it->second] == LBool::True);
    }
    return nu;
  }

  Clock::time_point deadline_;
  const IntegerVars& integers_;
  std::size_t branches_ = 0;
  bool unsat_ = false;
  std::vector<LBool> assigns_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<double> activity_;
  std::vector<bool> phase_;  // true = negative
  std::vector<bool> seen_;
  std::vector<std::optional<TheoryAtom>> theory_;
  std::vector<std::vector<int>> watches_;
  std::vector<Clause> clauses_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  std::size_t theory_head_ = 0;
  bool stale_ = false;  // simplex assignment not known to satisfy the bounds
  double var_inc_ = 1;
  double cla_inc_ = 1;
  std::size_t num_learnts_ = 0;
  VarHeap heap_;
  Simplex simplex_;
  int true_var_ = -1;
  std::unordered_map<const void*, Lit> memo_;
  std::map<Var, int> bool_vars_;
  std::map<Atom, int> atom_vars_;
};

}  // namespace

SatResult builtin_check_sat(const Formula& f, Clock::time_point deadline, const IntegerVars& integers)
{
  Core core(deadline, integers);
  SatResult r = core.solve(f);
  if (r.sat && !evaluate(f, r.model))
    throw SolverFailure("internal error: model does not satisfy " + to_string(f));
  return r;
}

}  // namespace linv
