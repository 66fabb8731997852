#include "linv/logic.hpp"

#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "linv/atom.hpp"

namespace linv {

namespace {

std::size_t mix(std::size_t h, std::size_t v)
{
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_rational(const Rational& q)
{
  return mix(std::hash<std::string>{}(q.get_num().get_str()),
             std::hash<std::string>{}(q.get_den().get_str()));
}

std::size_t hash_var(const Var& v)
{
  return mix(std::hash<std::string>{}(v.name), v.index ? *v.index + 1 : 0);
}

}  // namespace

std::string Var::to_string() const
{
  if (!index) return name;
  return name + "@" + std::to_string(*index);
}

std::string rational_to_string(const Rational& q)
{
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// ---------------------------------------------------------------------------
// Term

struct Term::Node
{
  Kind kind;
  Rational value;
  Var var;
  std::vector<Term> args;
  std::size_t hash = 0;
};

Term Term::constant(const Rational& q)
{
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->value = q;
  n->hash = mix(1, hash_rational(q));
  return Term(std::move(n));
}

Term Term::var(const Var& v)
{
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = v;
  n->hash = mix(2, hash_var(v));
  return Term(std::move(n));
}

Term Term::scale(const Rational& k, const Term& t)
{
  auto n = std::make_shared<Node>();
  n->kind = Kind::Scale;
  n->value = k;
  n->args = {t};
  n->hash = mix(mix(5, hash_rational(k)), t.hash());
  return Term(std::move(n));
}

Term operator+(const Term& a, const Term& b)
{
  auto n = std::make_shared<Term::Node>();
  n->kind = Term::Kind::Add;
  n->args = {a, b};
  n->hash = mix(mix(3, a.hash()), b.hash());
  return Term(std::move(n));
}

Term operator-(const Term& a, const Term& b)
{
  auto n = std::make_shared<Term::Node>();
  n->kind = Term::Kind::Sub;
  n->args = {a, b};
  n->hash = mix(mix(4, a.hash()), b.hash());
  return Term(std::move(n));
}

Term::Kind Term::kind() const { return node_->kind; }
const Rational& Term::value() const { return node_->value; }
const Var& Term::variable() const { return node_->var; }
const Term& Term::lhs() const { return node_->args.at(0); }
const Term& Term::rhs() const { return node_->args.at(1); }
std::size_t Term::hash() const { return node_->hash; }

bool operator==(const Term& a, const Term& b)
{
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Const: return a.value() == b.value();
    case Term::Kind::Var: return a.variable() == b.variable();
    case Term::Kind::Scale: return a.value() == b.value() && a.lhs() == b.lhs();
    case Term::Kind::Add:
    case Term::Kind::Sub: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Formula

struct Formula::Node
{
  Kind kind;
  std::vector<Formula> children;
  std::optional<Term> lhs;
  std::optional<Term> rhs;
  std::optional<Var> var;
  std::size_t hash = 0;
};

Formula Formula::make(Kind k, std::vector<Formula> ch, std::optional<Term> l,
                      std::optional<Term> r, std::optional<Var> v)
{
  auto n = std::make_shared<Node>();
  n->kind = k;
  std::size_t h = static_cast<std::size_t>(k) + 17;
  for (const auto& c : ch) h = mix(h, c.hash());
  if (l) h = mix(h, l->hash());
  if (r) h = mix(h, r->hash());
  if (v) h = mix(h, hash_var(*v));
  n->hash = h;
  n->children = std::move(ch);
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  n->var = std::move(v);
  return Formula(std::move(n));
}

Formula Formula::truth()
{
  static const Formula t = make(Kind::True, {}, std::nullopt, std::nullopt, std::nullopt);
  return t;
}

Formula Formula::falsity()
{
  static const Formula f = make(Kind::False, {}, std::nullopt, std::nullopt, std::nullopt);
  return f;
}

Formula Formula::bool_var(const Var& v)
{
  return make(Kind::BoolVar, {}, std::nullopt, std::nullopt, v);
}

Formula Formula::mk_not(const Formula& f)
{
  switch (f.kind()) {
    case Kind::True: return falsity();
    case Kind::False: return truth();
    case Kind::Not: return f.child();
    default: return make(Kind::Not, {f}, std::nullopt, std::nullopt, std::nullopt);
  }
}

namespace {

// Shared body of mk_and/mk_or. `unit` is the neutral element kind,
// `zero` the absorbing one.
std::vector<Formula> flatten(std::vector<Formula>&& fs, Formula::Kind self, Formula::Kind unit,
                             Formula::Kind zero, bool& absorbed)
{
  std::vector<Formula> out;
  std::unordered_set<Formula, FormulaHash> seen;
  absorbed = false;
  std::vector<Formula> stack(fs.rbegin(), fs.rend());
  while (!stack.empty()) {
    Formula f = std::move(stack.back());
    stack.pop_back();
    if (f.kind() == unit) continue;
    if (f.kind() == zero) {
      absorbed = true;
      return {};
    }
    if (f.kind() == self) {
      auto ch = f.children();
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
      continue;
    }
    if (seen.insert(f).second) out.push_back(f);
  }
  for (const auto& f : out) {
    if (f.kind() == Formula::Kind::Not && seen.count(f.child())) {
      absorbed = true;
      return {};
    }
  }
  return out;
}

}  // namespace

Formula Formula::mk_and(std::vector<Formula> fs)
{
  bool absorbed = false;
  auto out = flatten(std::move(fs), Kind::And, Kind::True, Kind::False, absorbed);
  if (absorbed) return falsity();
  if (out.empty()) return truth();
  if (out.size() == 1) return out.front();
  return make(Kind::And, std::move(out), std::nullopt, std::nullopt, std::nullopt);
}

Formula Formula::mk_or(std::vector<Formula> fs)
{
  bool absorbed = false;
  auto out = flatten(std::move(fs), Kind::Or, Kind::False, Kind::True, absorbed);
  if (absorbed) return truth();
  if (out.empty()) return falsity();
  if (out.size() == 1) return out.front();
  return make(Kind::Or, std::move(out), std::nullopt, std::nullopt, std::nullopt);
}

Formula Formula::mk_implies(const Formula& a, const Formula& b)
{
  return mk_or(mk_not(a), b);
}

Formula Formula::mk_iff(const Formula& a, const Formula& b)
{
  return mk_or(mk_and(a, b), mk_and(mk_not(a), mk_not(b)));
}

namespace {

std::optional<bool> fold_comparison(Formula::Kind k, const Term& a, const Term& b)
{
  LinearExpr d = LinearExpr::of(a);
  d.add(LinearExpr::of(b), -1);
  if (!d.is_constant()) return std::nullopt;
  switch (k) {
    case Formula::Kind::Lt: return d.constant < 0;
    case Formula::Kind::Le: return d.constant <= 0;
    default: return d.constant == 0;
  }
}

}  // namespace

Formula Formula::mk_lt(const Term& a, const Term& b)
{
  if (auto c = fold_comparison(Kind::Lt, a, b)) return boolean(*c);
  return make(Kind::Lt, {}, a, b, std::nullopt);
}

Formula Formula::mk_le(const Term& a, const Term& b)
{
  if (auto c = fold_comparison(Kind::Le, a, b)) return boolean(*c);
  return make(Kind::Le, {}, a, b, std::nullopt);
}

Formula Formula::mk_eq(const Term& a, const Term& b)
{
  if (auto c = fold_comparison(Kind::Eq, a, b)) return boolean(*c);
  return make(Kind::Eq, {}, a, b, std::nullopt);
}

Formula::Kind Formula::kind() const { return node_->kind; }

bool Formula::is_comparison() const
{
  auto k = kind();
  return k == Kind::Lt || k == Kind::Le || k == Kind::Eq;
}

const Var& Formula::variable() const { return *node_->var; }
std::span<const Formula> Formula::children() const { return node_->children; }
const Formula& Formula::child() const { return node_->children.at(0); }
const Term& Formula::lhs() const { return *node_->lhs; }
const Term& Formula::rhs() const { return *node_->rhs; }
std::size_t Formula::hash() const { return node_->hash; }

std::size_t Formula::size() const
{
  std::unordered_set<const void*> seen;
  std::vector<Formula> stack{*this};
  while (!stack.empty()) {
    Formula f = stack.back();
    stack.pop_back();
    if (!seen.insert(f.id()).second) continue;
    for (const auto& c : f.children()) stack.push_back(c);
  }
  return seen.size();
}

bool operator==(const Formula& a, const Formula& b)
{
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return true;
    case Formula::Kind::BoolVar: return a.variable() == b.variable();
    case Formula::Kind::Lt:
    case Formula::Kind::Le:
    case Formula::Kind::Eq: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    default: {
      auto ca = a.children();
      auto cb = b.children();
      if (ca.size() != cb.size()) return false;
      for (std::size_t i = 0; i < ca.size(); ++i)
        if (!(ca[i] == cb[i])) return false;
      return true;
    }
  }
}

// ---------------------------------------------------------------------------
// Valuation

const Value& Valuation::get(const Var& v) const
{
  auto it = values_.find(v);
  if (it == values_.end()) throw EvalError("unbound variable " + v.to_string());
  return it->second;
}

const Rational& Valuation::rat(const Var& v) const
{
  const auto& x = get(v);
  if (!std::holds_alternative<Rational>(x))
    throw TypeError("variable " + v.to_string() + " is not rational-valued");
  return std::get<Rational>(x);
}

bool Valuation::boolean(const Var& v) const
{
  const auto& x = get(v);
  if (!std::holds_alternative<bool>(x))
    throw TypeError("variable " + v.to_string() + " is not Boolean-valued");
  return std::get<bool>(x);
}

Valuation Valuation::restrict_index(unsigned k) const
{
  Valuation out;
  for (const auto& [v, x] : values_)
    if (v.index == k) out.set(Var(v.name), x);
  return out;
}

Valuation Valuation::project(const std::set<Var>& keep) const
{
  Valuation out;
  for (const auto& [v, x] : values_)
    if (keep.count(v)) out.set(v, x);
  return out;
}

std::string Valuation::to_string() const
{
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [v, x] : values_) {
    if (!first) os << ", ";
    first = false;
    os << v.to_string() << " = ";
    if (std::holds_alternative<bool>(x))
      os << (std::get<bool>(x) ? "true" : "false");
    else
      os << rational_to_string(std::get<Rational>(x));
  }
  os << "}";
  return os.str();
}

std::set<Var> VarSets::all() const
{
  std::set<Var> out = rat;
  out.insert(boolean.begin(), boolean.end());
  return out;
}

// ---------------------------------------------------------------------------
// Traversals

namespace {

void collect_term_vars(const Term& t, std::set<Var>& out)
{
  switch (t.kind()) {
    case Term::Kind::Const: return;
    case Term::Kind::Var: out.insert(t.variable()); return;
    case Term::Kind::Scale: collect_term_vars(t.lhs(), out); return;
    default:
      collect_term_vars(t.lhs(), out);
      collect_term_vars(t.rhs(), out);
  }
}

}  // namespace

VarSets vars_of(const Term& t)
{
  VarSets s;
  collect_term_vars(t, s.rat);
  return s;
}

VarSets vars_of(const Formula& f)
{
  VarSets s;
  std::unordered_set<const void*> seen;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (!seen.insert(g.id()).second) continue;
    if (g.kind() == Formula::Kind::BoolVar) {
      s.boolean.insert(g.variable());
    } else if (g.is_comparison()) {
      collect_term_vars(g.lhs(), s.rat);
      collect_term_vars(g.rhs(), s.rat);
    } else {
      for (const auto& c : g.children()) stack.push_back(c);
    }
  }
  return s;
}

std::set<Var> symbols(const Formula& f) { return vars_of(f).all(); }

Rational evaluate(const Term& t, const Valuation& nu)
{
  switch (t.kind()) {
    case Term::Kind::Const: return t.value();
    case Term::Kind::Var: return nu.rat(t.variable());
    case Term::Kind::Scale: return t.value() * evaluate(t.lhs(), nu);
    case Term::Kind::Add: return evaluate(t.lhs(), nu) + evaluate(t.rhs(), nu);
    case Term::Kind::Sub: return evaluate(t.lhs(), nu) - evaluate(t.rhs(), nu);
  }
  return 0;
}

namespace {

bool eval_rec(const Formula& f, const Valuation& nu, std::unordered_map<const void*, bool>& memo)
{
  auto it = memo.find(f.id());
  if (it != memo.end()) return it->second;
  bool r = false;
  switch (f.kind()) {
    case Formula::Kind::True: r = true; break;
    case Formula::Kind::False: r = false; break;
    case Formula::Kind::BoolVar: r = nu.boolean(f.variable()); break;
    case Formula::Kind::Not: r = !eval_rec(f.child(), nu, memo); break;
    case Formula::Kind::And:
      r = true;
      for (const auto& c : f.children())
        if (!eval_rec(c, nu, memo)) {
          r = false;
          break;
        }
      break;
    case Formula::Kind::Or:
      r = false;
      for (const auto& c : f.children())
        if (eval_rec(c, nu, memo)) {
          r = true;
          break;
        }
      break;
    case Formula::Kind::Lt: r = evaluate(f.lhs(), nu) < evaluate(f.rhs(), nu); break;
    case Formula::Kind::Le: r = evaluate(f.lhs(), nu) <= evaluate(f.rhs(), nu); break;
    case Formula::Kind::Eq: r = evaluate(f.lhs(), nu) == evaluate(f.rhs(), nu); break;
  }
  memo.emplace(f.id(), r);
  return r;
}

}  // namespace

bool evaluate(const Formula& f, const Valuation& nu)
{
  std::unordered_map<const void*, bool> memo;
  return eval_rec(f, nu, memo);
}

namespace {

class Substituter
{
 public:
  explicit Substituter(const Substitution& s) : sigma_(s) {}

  Term term(const Term& t)
  {
    auto it = term_memo_.find(t.id());
    if (it != term_memo_.end()) return it->second;
    Term r = t;
    switch (t.kind()) {
      case Term::Kind::Const: break;
      case Term::Kind::Var: {
        auto s = sigma_.find(t.variable());
        if (s != sigma_.end()) {
          if (!std::holds_alternative<Term>(s->second))
            throw TypeError("rational variable " + t.variable().to_string() +
                            " mapped to a formula");
          r = std::get<Term>(s->second);
        }
        break;
      }
      case Term::Kind::Scale: {
        Term a = term(t.lhs());
        if (a.id() != t.lhs().id()) r = Term::scale(t.value(), a);
        break;
      }
      case Term::Kind::Add:
      case Term::Kind::Sub: {
        Term a = term(t.lhs());
        Term b = term(t.rhs());
        if (a.id() != t.lhs().id() || b.id() != t.rhs().id())
          r = t.kind() == Term::Kind::Add ? a + b : a - b;
        break;
      }
    }
    term_memo_.emplace(t.id(), r);
    return r;
  }

  Formula formula(const Formula& f)
  {
    auto it = memo_.find(f.id());
    if (it != memo_.end()) return it->second;
    Formula r = f;
    switch (f.kind()) {
      case Formula::Kind::True:
      case Formula::Kind::False: break;
      case Formula::Kind::BoolVar: {
        auto s = sigma_.find(f.variable());
        if (s != sigma_.end()) {
          if (!std::holds_alternative<Formula>(s->second))
            throw TypeError("Boolean variable " + f.variable().to_string() + " mapped to a term");
          r = std::get<Formula>(s->second);
        }
        break;
      }
      case Formula::Kind::Not: {
        Formula c = formula(f.child());
        if (c.id() != f.child().id()) r = Formula::mk_not(c);
        break;
      }
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        std::vector<Formula> ch;
        bool changed = false;
        for (const auto& c : f.children()) {
          ch.push_back(formula(c));
          changed |= ch.back().id() != c.id();
        }
        if (changed)
          r = f.kind() == Formula::Kind::And ? Formula::mk_and(std::move(ch))
                                             : Formula::mk_or(std::move(ch));
        break;
      }
      case Formula::Kind::Lt:
      case Formula::Kind::Le:
      case Formula::Kind::Eq: {
        Term a = term(f.lhs());
        Term b = term(f.rhs());
        if (a.id() != f.lhs().id() || b.id() != f.rhs().id()) {
          if (f.kind() == Formula::Kind::Lt)
            r = Formula::mk_lt(a, b);
          else if (f.kind() == Formula::Kind::Le)
            r = Formula::mk_le(a, b);
          else
            r = Formula::mk_eq(a, b);
        }
        break;
      }
    }
    memo_.emplace(f.id(), r);
    return r;
  }

 private:
  const Substitution& sigma_;
  std::unordered_map<const void*, Formula> memo_;
  std::unordered_map<const void*, Term> term_memo_;
};

}  // namespace

Term substitute(const Term& t, const Substitution& sigma)
{
  if (sigma.empty()) return t;
  Substituter s(sigma);
  return s.term(t);
}

Formula substitute(const Formula& f, const Substitution& sigma)
{
  if (sigma.empty()) return f;
  Substituter s(sigma);
  return s.formula(f);
}

Formula rename(const Formula& f, const std::function<Var(const Var&)>& fn)
{
  VarSets vs = vars_of(f);
  Substitution sigma;
  for (const auto& v : vs.rat) {
    Var w = fn(v);
    if (!(w == v)) sigma.emplace(v, Term::var(w));
  }
  for (const auto& v : vs.boolean) {
    Var w = fn(v);
    if (!(w == v)) sigma.emplace(v, Formula::bool_var(w));
  }
  return substitute(f, sigma);
}

Term rename(const Term& t, const std::function<Var(const Var&)>& fn)
{
  Substitution sigma;
  for (const auto& v : vars_of(t).rat) {
    Var w = fn(v);
    if (!(w == v)) sigma.emplace(v, Term::var(w));
  }
  return substitute(t, sigma);
}

Formula superscript(const Formula& f, unsigned k)
{
  return rename(f, [k](const Var& v) {
    if (v.index || v.is_fresh()) return v;
    return Var(v.name, k);
  });
}

Term superscript(const Term& t, unsigned k)
{
  return rename(t, [k](const Var& v) {
    if (v.index || v.is_fresh()) return v;
    return Var(v.name, k);
  });
}

Formula shift(const Formula& f, unsigned k)
{
  if (k == 0) return f;
  return rename(f, [k](const Var& v) {
    if (!v.index) return v;
    return Var(v.name, *v.index + k);
  });
}

Formula desuperscript(const Formula& f, unsigned k)
{
  return rename(f, [k](const Var& v) {
    if (v.index != k)
      throw IndexError("variable " + v.to_string() + " is not indexed " + std::to_string(k));
    return Var(v.name);
  });
}

Formula gamma_of_valuation(const Valuation& nu)
{
  std::vector<Formula> cs;
  for (const auto& [v, x] : nu.values()) {
    if (std::holds_alternative<bool>(x)) {
      Formula b = Formula::bool_var(v);
      cs.push_back(std::get<bool>(x) ? b : Formula::mk_not(b));
    } else {
      cs.push_back(Formula::mk_eq(Term::var(v), Term::constant(std::get<Rational>(x))));
    }
  }
  return Formula::mk_and(std::move(cs));
}

// ---------------------------------------------------------------------------
// Printing. The output is accepted by the loop parser for unindexed
// formulas.

namespace {

void print_term(std::ostream& os, const Term& t, bool parens)
{
  switch (t.kind()) {
    case Term::Kind::Const:
      if (t.value() < 0 || t.value().get_den() != 1) {
        os << "(" << rational_to_string(t.value()) << ")";
      } else {
        os << rational_to_string(t.value());
      }
      return;
    case Term::Kind::Var: os << t.variable().to_string(); return;
    case Term::Kind::Scale: {
      const Rational& k = t.value();
      if (k < 0 || k.get_den() != 1)
        os << "(" << rational_to_string(k) << ")";
      else
        os << rational_to_string(k);
      os << "*";
      bool inner = t.lhs().kind() == Term::Kind::Add || t.lhs().kind() == Term::Kind::Sub ||
                   t.lhs().kind() == Term::Kind::Scale;
      print_term(os, t.lhs(), inner);
      return;
    }
    case Term::Kind::Add:
    case Term::Kind::Sub:
      if (parens) os << "(";
      print_term(os, t.lhs(), false);
      os << (t.kind() == Term::Kind::Add ? " + " : " - ");
      print_term(os, t.rhs(), t.rhs().kind() == Term::Kind::Add || t.rhs().kind() == Term::Kind::Sub);
      if (parens) os << ")";
      return;
  }
}

void print_formula(std::ostream& os, const Formula& f, bool parens)
{
  switch (f.kind()) {
    case Formula::Kind::True: os << "true"; return;
    case Formula::Kind::False: os << "false"; return;
    case Formula::Kind::BoolVar: os << f.variable().to_string(); return;
    case Formula::Kind::Not: {
      const Formula& c = f.child();
      bool atomic = c.kind() == Formula::Kind::BoolVar || c.kind() == Formula::Kind::True ||
                    c.kind() == Formula::Kind::False;
      os << "!";
      print_formula(os, c, !atomic);
      return;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      const char* sep = f.kind() == Formula::Kind::And ? " && " : " || ";
      if (parens) os << "(";
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) os << sep;
        first = false;
        bool nested = c.kind() == Formula::Kind::And || c.kind() == Formula::Kind::Or;
        print_formula(os, c, nested);
      }
      if (parens) os << ")";
      return;
    }
    case Formula::Kind::Lt:
    case Formula::Kind::Le:
    case Formula::Kind::Eq: {
      const char* op = f.kind() == Formula::Kind::Lt ? " < " : f.kind() == Formula::Kind::Le ? " <= " : " = ";
      if (parens) os << "(";
      print_term(os, f.lhs(), false);
      os << op;
      print_term(os, f.rhs(), false);
      if (parens) os << ")";
      return;
    }
  }
}

}  // namespace

std::string to_string(const Term& t)
{
  std::ostringstream os;
  print_term(os, t, false);
  return os.str();
}

std::string to_string(const Formula& f)
{
  std::ostringstream os;
  print_formula(os, f, false);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_string(t); }
std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << to_string(f); }
std::ostream& operator<<(std::ostream& os, const Var& v) { return os << v.to_string(); }

}  // namespace linv
