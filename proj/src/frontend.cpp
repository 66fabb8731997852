#include "linv/frontend.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace linv {

Statement Statement::nop() { return Statement{}; }

Statement Statement::assign(const Var& x, const Term& e)
{
  Statement s;
  s.kind = Kind::Assign;
  s.target = x;
  s.value = e;
  return s;
}

Statement Statement::assign(const Var& x, const Formula& e)
{
  Statement s;
  s.kind = Kind::Assign;
  s.target = x;
  s.value = e;
  return s;
}

Statement Statement::havoc(const Var& x)
{
  Statement s;
  s.kind = Kind::Havoc;
  s.target = x;
  return s;
}

Statement Statement::if_then_else(const Formula& c, std::vector<Statement> t, std::vector<Statement> e)
{
  Statement s;
  s.kind = Kind::If;
  s.cond = c;
  s.then_branch = std::move(t);
  s.else_branch = std::move(e);
  return s;
}

Statement Statement::assume(const Formula& c)
{
  Statement s;
  s.kind = Kind::Assume;
  s.cond = c;
  return s;
}

bool operator==(const Statement& a, const Statement& b)
{
  if (a.kind != b.kind || !(a.target == b.target)) return false;
  if (a.value.has_value() != b.value.has_value()) return false;
  if (a.value) {
    if (a.value->index() != b.value->index()) return false;
    if (std::holds_alternative<Term>(*a.value)) {
      if (!(std::get<Term>(*a.value) == std::get<Term>(*b.value))) return false;
    } else if (std::get<Formula>(*a.value) != std::get<Formula>(*b.value)) {
      return false;
    }
  }
  if (a.cond.has_value() != b.cond.has_value()) return false;
  if (a.cond && *a.cond != *b.cond) return false;
  return a.then_branch == b.then_branch && a.else_branch == b.else_branch;
}

std::vector<Var> AnnotatedLoop::rat_vars() const
{
  std::vector<Var> out;
  for (const auto& d : decls)
    if (d.sort != Sort::Bool) out.emplace_back(d.name);
  return out;
}

IntegerVars AnnotatedLoop::integer_vars() const
{
  std::set<std::string> names;
  for (const auto& d : decls)
    if (d.sort == Sort::Int) names.insert(d.name);
  return IntegerVars(std::move(names));
}

std::vector<Var> AnnotatedLoop::bool_vars() const
{
  std::vector<Var> out;
  for (const auto& d : decls)
    if (d.sort == Sort::Bool) out.emplace_back(d.name);
  return out;
}

Formula AnnotatedLoop::under_approximation() const
{
  return Formula::mk_or(pre, Formula::mk_and(post, Formula::mk_not(guard)));
}

Formula AnnotatedLoop::over_approximation() const { return Formula::mk_or(post, guard); }

std::optional<Sort> AnnotatedLoop::sort_of(const std::string& name) const
{
  for (const auto& d : decls)
    if (d.name == name) return d.sort;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok
{
  Ident,
  Int,
  Sym,
  End
};

struct Token
{
  Tok kind;
  std::string text;
  int line;
  int col;
};

std::vector<Token> lex(const std::string& src)
{
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  static const char* const symbols[] = {":=", "&&", "||", "<=", ">=", "(", ")", "{", "}", ";", ",",
                                        "+",  "-",  "*",  "/",  "!",  "<", ">", "="};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, src.substr(i, j - i), line, col});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, src.substr(i, j - i), line, col});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const char* s : symbols) {
      std::size_t n = std::char_traits<char>::length(s);
      if (src.compare(i, n, s) == 0) {
        out.push_back({Tok::Sym, s, line, col});
        advance(n);
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

bool is_keyword(const std::string& s)
{
  static const char* const kws[] = {"rat", "int", "bool", "pre", "while", "post", "nop", "if",
                                    "else", "assume", "nondet", "true", "false"};
  for (const char* k : kws)
    if (s == k) return true;
  return false;
}

class Parser
{
 public:
  Parser(const std::string& text, AnnotatedLoop& scope) : toks_(lex(text)), scope_(scope) {}

  AnnotatedLoop loop()
  {
    while (peek_ident("rat") || peek_ident("int") || peek_ident("bool")) decl();
    expect_ident("pre");
    expect("{");
    scope_.pre = bexp();
    expect("}");
    expect_ident("while");
    expect("(");
    scope_.guard = bexp();
    expect(")");
    expect("{");
    const Token& body_start = cur();
    scope_.body = stmts();
    if (scope_.body.empty()) throw ParseError("loop body is empty", body_start.line, body_start.col);
    expect("}");
    expect_ident("post");
    expect("{");
    scope_.post = bexp();
    expect("}");
    expect_end();
    return scope_;
  }

  Formula formula_only()
  {
    Formula f = bexp();
    expect_end();
    return f;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, cur().line, cur().col); }

  bool peek(const char* sym) const { return cur().kind == Tok::Sym && cur().text == sym; }
  bool peek_ident(const char* kw) const { return cur().kind == Tok::Ident && cur().text == kw; }

  bool accept(const char* sym)
  {
    if (!peek(sym)) return false;
    ++pos_;
    return true;
  }

  void expect(const char* sym)
  {
    if (!accept(sym)) fail(std::string("expected '") + sym + "'" + found());
  }

  void expect_ident(const char* kw)
  {
    if (!peek_ident(kw)) fail(std::string("expected '") + kw + "'" + found());
    ++pos_;
  }

  void expect_end()
  {
    if (cur().kind != Tok::End) fail("unexpected trailing input" + found());
  }

  std::string found() const
  {
    if (cur().kind == Tok::End) return ", found end of input";
    return ", found '" + cur().text + "'";
  }

  std::string identifier()
  {
    if (cur().kind != Tok::Ident || is_keyword(cur().text)) fail("expected identifier" + found());
    return toks_[pos_++].text;
  }

  void decl()
  {
    Sort sort = cur().text == "rat" ? Sort::Rat : cur().text == "int" ? Sort::Int : Sort::Bool;
    ++pos_;
    do {
      const Token& at = cur();
      std::string name = identifier();
      if (scope_.sort_of(name)) throw ParseError("variable '" + name + "' declared twice", at.line, at.col);
      scope_.decls.push_back({name, sort});
    } while (accept(","));
    expect(";");
  }

  Sort sort_of_ident(const Token& at, const std::string& name) const
  {
    auto s = scope_.sort_of(name);
    if (!s) throw ParseError("undeclared variable '" + name + "'", at.line, at.col);
    return *s;
  }

  std::vector<Statement> stmts()
  {
    std::vector<Statement> out;
    while (!peek("}")) {
      out.push_back(stmt());
      expect(";");
    }
    return out;
  }

  std::vector<Statement> block()
  {
    expect("{");
    auto s = stmts();
    expect("}");
    return s;
  }

  Statement stmt()
  {
    if (peek_ident("nop")) {
      ++pos_;
      return Statement::nop();
    }
    if (peek_ident("if")) {
      ++pos_;
      expect("(");
      Formula c = bexp();
      expect(")");
      auto t = block();
      std::vector<Statement> e{Statement::nop()};
      if (peek_ident("else")) {
        ++pos_;
        e = block();
      }
      return Statement::if_then_else(c, std::move(t), std::move(e));
    }
    if (peek_ident("assume")) {
      ++pos_;
      expect("(");
      Formula c = bexp();
      expect(")");
      return Statement::assume(c);
    }
    const Token& at = cur();
    std::string name = identifier();
    Sort sort = sort_of_ident(at, name);
    expect(":=");
    Var x(name);
    if (peek_ident("nondet")) {
      ++pos_;
      return Statement::havoc(x);
    }
    if (sort == Sort::Bool) return Statement::assign(x, bexp());
    const Token& rhs_at = cur();
    Term e = exp();
    if (sort == Sort::Int && !integral_term(e))
      throw ParseError("non-integer value assigned to int variable '" + name + "'", rhs_at.line, rhs_at.col);
    return Statement::assign(x, e);
  }

  // bexp := disj
  Formula bexp()
  {
    std::vector<Formula> ds{conj()};
    while (accept("||")) ds.push_back(conj());
    return ds.size() == 1 ? ds.front() : Formula::mk_or(std::move(ds));
  }

  Formula conj()
  {
    std::vector<Formula> cs{unary()};
    while (accept("&&")) cs.push_back(unary());
    return cs.size() == 1 ? cs.front() : Formula::mk_and(std::move(cs));
  }

  Formula unary()
  {
    if (accept("!")) return Formula::mk_not(unary());
    return primary();
  }

  Formula primary()
  {
    if (peek_ident("true")) {
      ++pos_;
      return Formula::truth();
    }
    if (peek_ident("false")) {
      ++pos_;
      return Formula::falsity();
    }
    if (cur().kind == Tok::Ident && !is_keyword(cur().text)) {
      const Token& at = cur();
      if (sort_of_ident(at, at.text) == Sort::Bool) {
        ++pos_;
        if (peek("=") || peek("<") || peek("<=") || peek(">") || peek(">="))
          fail("comparison on Boolean variable '" + at.text + "'");
        return Formula::bool_var(at.text);
      }
      return comparison();
    }
    if (peek("(")) {
      // Either a parenthesized formula or a comparison whose left operand
      // starts with a parenthesis.
      std::size_t save = pos_;
      try {
        return comparison();
      } catch (const ParseError&) {
        pos_ = save;
      }
      expect("(");
      Formula f = bexp();
      expect(")");
      return f;
    }
    return comparison();
  }

  Formula comparison()
  {
    Term a = exp();
    std::string op = cur().text;
    if (cur().kind != Tok::Sym || (op != "<" && op != "<=" && op != "=" && op != ">" && op != ">="))
      fail("expected comparison operator" + found());
    ++pos_;
    Term b = exp();
    if (op == "<") return Formula::mk_lt(a, b);
    if (op == "<=") return Formula::mk_le(a, b);
    if (op == "=") return Formula::mk_eq(a, b);
    if (op == ">") return Formula::mk_gt(a, b);
    return Formula::mk_ge(a, b);
  }

  bool integral_term(const Term& t) const
  {
    LinearExpr e = LinearExpr::of(t);
    if (e.constant.get_den() != 1) return false;
    for (const auto& [v, c] : e.coeffs)
      if (c.get_den() != 1 || scope_.sort_of(v.name) != Sort::Int) return false;
    return true;
  }

  static std::optional<Rational> constant_value(const Term& t)
  {
    if (t.kind() == Term::Kind::Const) return t.value();
    return std::nullopt;
  }

  Term exp()
  {
    Term acc = product();
    for (;;) {
      if (accept("+"))
        acc = acc + product();
      else if (accept("-"))
        acc = acc - product();
      else
        return acc;
    }
  }

  Term product()
  {
    Term acc = negation();
    for (;;) {
      if (peek("*")) {
        const Token& at = cur();
        ++pos_;
        Term rhs = negation();
        auto ka = constant_value(acc);
        auto kb = constant_value(rhs);
        if (ka && kb)
          acc = Term::constant(*ka * *kb);
        else if (ka)
          acc = Term::scale(*ka, rhs);
        else if (kb)
          acc = Term::scale(*kb, acc);
        else
          throw ParseError("nonlinear multiplication", at.line, at.col);
      } else if (peek("/")) {
        const Token& at = cur();
        ++pos_;
        Term rhs = negation();
        auto kb = constant_value(rhs);
        if (!kb) throw ParseError("division by a non-constant", at.line, at.col);
        if (*kb == 0) throw ParseError("division by zero", at.line, at.col);
        if (auto ka = constant_value(acc))
          acc = Term::constant(*ka / *kb);
        else
          acc = Term::scale(1 / *kb, acc);
      } else {
        return acc;
      }
    }
  }

  Term negation()
  {
    if (accept("-")) {
      Term t = negation();
      if (auto k = constant_value(t)) return Term::constant(-*k);
      return Term::scale(-1, t);
    }
    return atom();
  }

  Term atom()
  {
    if (cur().kind == Tok::Int) return Term::constant(Rational(toks_[pos_++].text, 10));
    if (accept("(")) {
      Term t = exp();
      expect(")");
      return t;
    }
    const Token& at = cur();
    std::string name = identifier();
    if (sort_of_ident(at, name) == Sort::Bool)
      throw ParseError("Boolean variable '" + name + "' used as a number", at.line, at.col);
    return Term::var(name);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  AnnotatedLoop& scope_;
};

}  // namespace

AnnotatedLoop parse_loop(const std::string& text)
{
  AnnotatedLoop loop;
  Parser p(text, loop);
  return p.loop();
}

AnnotatedLoop parse_loop_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_loop(ss.str());
}

Formula parse_formula(const std::string& text, const AnnotatedLoop& scope)
{
  AnnotatedLoop copy;
  copy.decls = scope.decls;
  Parser p(text, copy);
  return p.formula_only();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print_block(std::ostream& os, const std::vector<Statement>& ss, int indent);

void print_stmt(std::ostream& os, const Statement& s, int indent)
{
  std::string pad(indent, ' ');
  os << pad;
  switch (s.kind) {
    case Statement::Kind::Nop: os << "nop"; break;
    case Statement::Kind::Havoc: os << s.target.to_string() << " := nondet"; break;
    case Statement::Kind::Assign:
      os << s.target.to_string() << " := ";
      if (std::holds_alternative<Term>(*s.value))
        os << to_string(std::get<Term>(*s.value));
      else
        os << to_string(std::get<Formula>(*s.value));
      break;
    case Statement::Kind::Assume: os << "assume(" << to_string(*s.cond) << ")"; break;
    case Statement::Kind::If:
      os << "if (" << to_string(*s.cond) << ") {\n";
      print_block(os, s.then_branch, indent + 2);
      os << pad << "} else {\n";
      print_block(os, s.else_branch, indent + 2);
      os << pad << "}";
      break;
  }
  os << ";\n";
}

void print_block(std::ostream& os, const std::vector<Statement>& ss, int indent)
{
  for (const auto& s : ss) print_stmt(os, s, indent);
}

}  // namespace

std::string print_statements(const std::vector<Statement>& stmts, int indent)
{
  std::ostringstream os;
  print_block(os, stmts, indent);
  return os.str();
}

std::string print_loop(const AnnotatedLoop& loop)
{
  std::ostringstream os;
  for (Sort sort : {Sort::Rat, Sort::Int, Sort::Bool}) {
    const char* kw = sort == Sort::Rat ? "rat " : sort == Sort::Int ? "int " : "bool ";
    bool first = true;
    for (const auto& d : loop.decls) {
      if (d.sort != sort) continue;
      os << (first ? kw : ", ") << d.name;
      first = false;
    }
    if (!first) os << ";\n";
  }
  os << "pre { " << to_string(loop.pre) << " }\n";
  os << "while (" << to_string(loop.guard) << ") {\n";
  print_block(os, loop.body, 2);
  os << "}\n";
  os << "post { " << to_string(loop.post) << " }\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Semantics

Var FreshNames::fresh(const std::string& base, const std::string& tag)
{
  return Var(base + "!" + tag + std::to_string(next_++));
}

namespace {

Formula frame(const AnnotatedLoop& loop, const std::optional<Var>& except)
{
  std::vector<Formula> cs;
  for (const auto& d : loop.decls) {
    if (except && except->name == d.name) continue;
    if (d.sort != Sort::Bool)
      cs.push_back(Formula::mk_eq(Term::var(Var(d.name, 1)), Term::var(Var(d.name, 0))));
    else
      cs.push_back(Formula::mk_iff(Formula::bool_var(Var(d.name, 1)), Formula::bool_var(Var(d.name, 0))));
  }
  return Formula::mk_and(std::move(cs));
}

// Renames index-k program variables to the given fresh block.
Formula to_block(const Formula& f, unsigned k, const std::map<std::string, Var>& block)
{
  return rename(f, [&](const Var& v) {
    if (v.index != k) return v;
    auto it = block.find(v.name);
    return it == block.end() ? v : it->second;
  });
}

}  // namespace

Formula transition(const Statement& s, const AnnotatedLoop& loop, FreshNames& names)
{
  switch (s.kind) {
    case Statement::Kind::Nop: return frame(loop, std::nullopt);
    case Statement::Kind::Havoc: return frame(loop, s.target);
    case Statement::Kind::Assume: return Formula::mk_and(superscript(*s.cond, 0), frame(loop, std::nullopt));
    case Statement::Kind::Assign: {
      Var x1(s.target.name, 1);
      Formula def = std::holds_alternative<Term>(*s.value)
                        ? Formula::mk_eq(Term::var(x1), superscript(std::get<Term>(*s.value), 0))
                        : Formula::mk_iff(Formula::bool_var(x1), superscript(std::get<Formula>(*s.value), 0));
      return Formula::mk_and(def, frame(loop, s.target));
    }
    case Statement::Kind::If: {
      Formula p = superscript(*s.cond, 0);
      return Formula::mk_or(Formula::mk_and(p, transition(s.then_branch, loop, names)),
                            Formula::mk_and(Formula::mk_not(p), transition(s.else_branch, loop, names)));
    }
  }
  return Formula::truth();
}

Formula transition(const std::vector<Statement>& ss, const AnnotatedLoop& loop, FreshNames& names)
{
  if (ss.empty()) return frame(loop, std::nullopt);
  Formula acc = transition(ss.front(), loop, names);
  for (std::size_t i = 1; i < ss.size(); ++i) {
    std::map<std::string, Var> mid;
    for (const auto& d : loop.decls) mid.emplace(d.name, names.fresh(d.name, "t"));
    Formula next = transition(ss[i], loop, names);
    acc = Formula::mk_and(to_block(acc, 1, mid), to_block(next, 0, mid));
  }
  return acc;
}

namespace {

Formula pre_stmt(const Formula& theta, const Statement& s, FreshNames& names);

Formula pre_seq(const Formula& theta, const std::vector<Statement>& ss, FreshNames& names)
{
  Formula acc = theta;
  for (auto it = ss.rbegin(); it != ss.rend(); ++it) acc = pre_stmt(acc, *it, names);
  return acc;
}

Formula pre_stmt(const Formula& theta, const Statement& s, FreshNames& names)
{
  switch (s.kind) {
    case Statement::Kind::Nop: return theta;
    case Statement::Kind::Assign: return substitute(theta, {{s.target, *s.value}});
    case Statement::Kind::Havoc: {
      VarSets vs = vars_of(theta);
      if (vs.rat.count(s.target))
        return substitute(theta, {{s.target, Term::var(names.fresh(s.target.name, "sk"))}});
      if (vs.boolean.count(s.target))
        return substitute(theta, {{s.target, Formula::bool_var(names.fresh(s.target.name, "sk"))}});
      return theta;
    }
    case Statement::Kind::Assume: return Formula::mk_implies(*s.cond, theta);
    case Statement::Kind::If:
      return Formula::mk_and(Formula::mk_implies(*s.cond, pre_seq(theta, s.then_branch, names)),
                             Formula::mk_implies(Formula::mk_not(*s.cond), pre_seq(theta, s.else_branch, names)));
  }
  return theta;
}

}  // namespace

Formula pre_condition(const Formula& theta, const std::vector<Statement>& s, FreshNames& names)
{
  return pre_seq(theta, s, names);
}

std::vector<Formula> xi_sequence(const Formula& phi, const AnnotatedLoop& loop, const Formula& psi,
                                 FreshNames& names)
{
  std::vector<Formula> out;
  out.push_back(superscript(phi, 0));
  for (std::size_t i = 0; i < loop.body.size(); ++i)
    out.push_back(shift(transition(loop.body[i], loop, names), static_cast<unsigned>(i)));
  out.push_back(superscript(Formula::mk_not(psi), static_cast<unsigned>(loop.body.size())));
  return out;
}

namespace {

void statement_atoms(const Statement& s, std::set<Atom>& out)
{
  auto add = [&](const Formula& f) {
    auto a = atoms_of(f);
    out.insert(a.begin(), a.end());
  };
  if (s.cond) add(*s.cond);
  if (s.value && std::holds_alternative<Formula>(*s.value)) add(std::get<Formula>(*s.value));
  if (s.kind == Statement::Kind::Assign || s.kind == Statement::Kind::Havoc) {
    // x := e is read as the predicate x = e; a Boolean target is itself an atom.
    if (s.value && std::holds_alternative<Term>(*s.value)) {
      LinearExpr e = LinearExpr::of(Term::var(s.target));
      e.add(LinearExpr::of(std::get<Term>(*s.value)), -1);
      if (!e.is_constant()) out.insert(Atom::linear(e, Relation::Eq));
    }
  }
  for (const auto& t : s.then_branch) statement_atoms(t, out);
  for (const auto& t : s.else_branch) statement_atoms(t, out);
}

}  // namespace

std::set<Atom> program_atoms(const AnnotatedLoop& loop)
{
  std::set<Atom> out;
  for (const Formula& f : {loop.pre, loop.guard, loop.post}) {
    auto a = atoms_of(f);
    out.insert(a.begin(), a.end());
  }
  for (const auto& d : loop.decls)
    if (d.sort == Sort::Bool) out.insert(Atom::boolean(Var(d.name)));
  for (const auto& s : loop.body) statement_atoms(s, out);
  return out;
}

}  // namespace linv
