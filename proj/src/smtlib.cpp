#include "linv/smtlib.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cstdlib>
#include <cstring>
#include <sstream>

namespace linv {

std::string smt_symbol(const Var& v) { return "|" + v.to_string() + "|"; }

namespace {

std::string smt_rational(const Rational& q)
{
  Rational a = abs(q);
  std::string s = a.get_den() == 1 ? a.get_num().get_str() + ".0"
                                   : "(/ " + a.get_num().get_str() + ".0 " + a.get_den().get_str() + ".0)";
  return q < 0 ? "(- " + s + ")" : s;
}

}  // namespace

std::string to_smtlib(const Term& t, const IntegerVars& ints)
{
  switch (t.kind()) {
    case Term::Kind::Const: return smt_rational(t.value());
    case Term::Kind::Var:
      if (ints.contains(t.variable())) return "(to_real " + smt_symbol(t.variable()) + ")";
      return smt_symbol(t.variable());
    case Term::Kind::Scale: return "(* " + smt_rational(t.value()) + " " + to_smtlib(t.lhs(), ints) + ")";
    case Term::Kind::Add: return "(+ " + to_smtlib(t.lhs(), ints) + " " + to_smtlib(t.rhs(), ints) + ")";
    case Term::Kind::Sub: return "(- " + to_smtlib(t.lhs(), ints) + " " + to_smtlib(t.rhs(), ints) + ")";
  }
  return "";
}

std::string to_smtlib(const Formula& f, const IntegerVars& ints)
{
  switch (f.kind()) {
    case Formula::Kind::True: return "true";
    case Formula::Kind::False: return "false";
    case Formula::Kind::BoolVar: return smt_symbol(f.variable());
    case Formula::Kind::Not: return "(not " + to_smtlib(f.child(), ints) + ")";
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::string s = f.kind() == Formula::Kind::And ? "(and" : "(or";
      for (const auto& c : f.children()) s += " " + to_smtlib(c, ints);
      return s + ")";
    }
    case Formula::Kind::Lt: return "(< " + to_smtlib(f.lhs(), ints) + " " + to_smtlib(f.rhs(), ints) + ")";
    case Formula::Kind::Le: return "(<= " + to_smtlib(f.lhs(), ints) + " " + to_smtlib(f.rhs(), ints) + ")";
    case Formula::Kind::Eq: return "(= " + to_smtlib(f.lhs(), ints) + " " + to_smtlib(f.rhs(), ints) + ")";
  }
  return "";
}

std::string smtlib_logic(const std::vector<Formula>& fs, const IntegerVars& ints)
{
  for (const auto& f : fs)
    for (const auto& v : vars_of(f).rat)
      if (ints.contains(v)) return "QF_LIRA";
  return "QF_LRA";
}

std::string smtlib_declarations(const std::vector<Formula>& fs, const IntegerVars& ints)
{
  VarSets all;
  for (const auto& f : fs) {
    VarSets vs = vars_of(f);
    all.rat.insert(vs.rat.begin(), vs.rat.end());
    all.boolean.insert(vs.boolean.begin(), vs.boolean.end());
  }
  std::ostringstream os;
  for (const auto& v : all.rat)
    os << "(declare-fun " << smt_symbol(v) << (ints.contains(v) ? " () Int)\n" : " () Real)\n");
  for (const auto& v : all.boolean) os << "(declare-fun " << smt_symbol(v) << " () Bool)\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// S-expressions

std::string SExpr::to_string() const
{
  if (is_atom) return atom;
  std::string s = "(";
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) s += " ";
    s += list[i].to_string();
  }
  return s + ")";
}

std::vector<SExpr> parse_sexprs(const std::string& text)
{
  std::vector<std::vector<SExpr>> stack(1);
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '(') {
      stack.emplace_back();
      ++i;
    } else if (c == ')') {
      if (stack.size() < 2) throw Error("unbalanced ')' in solver output");
      SExpr e;
      e.is_atom = false;
      e.list = std::move(stack.back());
      stack.pop_back();
      stack.back().push_back(std::move(e));
      ++i;
    } else if (c == '|') {
      std::size_t j = text.find('|', i + 1);
      if (j == std::string::npos) throw Error("unterminated quoted symbol in solver output");
      stack.back().push_back(SExpr{true, text.substr(i, j - i + 1), {}});
      i = j + 1;
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '"') ++j;
      stack.back().push_back(SExpr{true, text.substr(i, j - i + 1), {}});
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' &&
             text[j] != ')')
        ++j;
      stack.back().push_back(SExpr{true, text.substr(i, j - i), {}});
      i = j;
    }
  }
  if (stack.size() != 1) throw Error("unbalanced '(' in solver output");
  return std::move(stack.front());
}

namespace {

Rational decimal(const std::string& s)
{
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(mpz_class(s, 10));
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  mpz_class den = 1;
  for (std::size_t k = dot + 1; k < s.size(); ++k) den *= 10;
  Rational q(mpz_class(digits.empty() ? "0" : digits, 10), den);
  q.canonicalize();
  return q;
}

bool is_number(const std::string& s)
{
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.') return false;
  return true;
}

std::string unquote(const std::string& s)
{
  if (s.size() >= 2 && s.front() == '|' && s.back() == '|') return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

Rational rational_from_sexpr(const SExpr& e)
{
  if (e.is_atom) {
    if (!is_number(e.atom)) throw Error("not a number: " + e.atom);
    return decimal(e.atom);
  }
  if (e.list.size() == 2 && e.list[0].is_atom && e.list[0].atom == "-") return -rational_from_sexpr(e.list[1]);
  if (e.list.size() == 3 && e.list[0].is_atom && e.list[0].atom == "/")
    return rational_from_sexpr(e.list[1]) / rational_from_sexpr(e.list[2]);
  throw Error("not a rational constant: " + e.to_string());
}

SymbolTable symbol_table(const std::vector<Formula>& fs)
{
  SymbolTable t;
  for (const auto& f : fs) {
    VarSets vs = vars_of(f);
    for (const auto& v : vs.rat) t.emplace(v.to_string(), std::pair{v, false});
    for (const auto& v : vs.boolean) t.emplace(v.to_string(), std::pair{v, true});
  }
  return t;
}

Term term_from_sexpr(const SExpr& e, const SymbolTable& symbols)
{
  if (e.is_atom) {
    if (is_number(e.atom)) return Term::constant(decimal(e.atom));
    auto it = symbols.find(unquote(e.atom));
    if (it == symbols.end() || it->second.second) throw Error("unknown numeric symbol " + e.atom);
    return Term::var(it->second.first);
  }
  if (e.list.empty() || !e.list[0].is_atom) throw Error("malformed term " + e.to_string());
  const std::string& op = e.list[0].atom;
  std::vector<Term> args;
  for (std::size_t i = 1; i < e.list.size(); ++i) args.push_back(term_from_sexpr(e.list[i], symbols));
  if (args.empty()) throw Error("malformed term " + e.to_string());
  if (op == "to_real" && args.size() == 1) return args[0];
  if (op == "+") {
    Term acc = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) acc = acc + args[i];
    return acc;
  }
  if (op == "-") {
    if (args.size() == 1) {
      if (args[0].kind() == Term::Kind::Const) return Term::constant(-args[0].value());
      return Term::scale(-1, args[0]);
    }
    Term acc = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) acc = acc - args[i];
    return acc;
  }
  if (op == "*" && args.size() == 2) {
    if (args[0].kind() == Term::Kind::Const) return Term::scale(args[0].value(), args[1]);
    if (args[1].kind() == Term::Kind::Const) return Term::scale(args[1].value(), args[0]);
  }
  if (op == "/" && args.size() == 2 && args[1].kind() == Term::Kind::Const && args[1].value() != 0) {
    if (args[0].kind() == Term::Kind::Const) return Term::constant(args[0].value() / args[1].value());
    return Term::scale(1 / args[1].value(), args[0]);
  }
  throw Error("unsupported term " + e.to_string());
}

Formula formula_from_sexpr(const SExpr& e, const SymbolTable& symbols)
{
  if (e.is_atom) {
    if (e.atom == "true") return Formula::truth();
    if (e.atom == "false") return Formula::falsity();
    auto it = symbols.find(unquote(e.atom));
    if (it == symbols.end() || !it->second.second) throw Error("unknown Boolean symbol " + e.atom);
    return Formula::bool_var(it->second.first);
  }
  if (e.list.empty() || !e.list[0].is_atom) throw Error("malformed formula " + e.to_string());
  const std::string& op = e.list[0].atom;
  auto sub = [&](std::size_t i) { return formula_from_sexpr(e.list[i], symbols); };
  auto term = [&](std::size_t i) { return term_from_sexpr(e.list[i], symbols); };
  std::size_t n = e.list.size();
  if (op == "not" && n == 2) return Formula::mk_not(sub(1));
  if (op == "and" || op == "or") {
    std::vector<Formula> ch;
    for (std::size_t i = 1; i < n; ++i) ch.push_back(sub(i));
    return op == "and" ? Formula::mk_and(std::move(ch)) : Formula::mk_or(std::move(ch));
  }
  if (op == "=>" && n == 3) return Formula::mk_implies(sub(1), sub(2));
  if (n == 3 && (op == "<" || op == "<=" || op == ">" || op == ">=" || op == "=")) {
    bool boolean_eq = false;
    if (op == "=") {
      try {
        (void)term(1);
      } catch (const Error&) {
        boolean_eq = true;
      }
    }
    if (boolean_eq) return Formula::mk_iff(sub(1), sub(2));
    Term a = term(1), b = term(2);
    if (op == "<") return Formula::mk_lt(a, b);
    if (op == "<=") return Formula::mk_le(a, b);
    if (op == ">") return Formula::mk_gt(a, b);
    if (op == ">=") return Formula::mk_ge(a, b);
    return Formula::mk_eq(a, b);
  }
  throw Error("unsupported formula " + e.to_string());
}

// ---------------------------------------------------------------------------
// Processes

ProcessResult run_process(const std::vector<std::string>& argv_in, const std::string& text,
                          Clock::time_point deadline)
{
  if (argv_in.empty()) throw SolverFailure("empty external command");
  std::vector<std::string> argv = argv_in;
  std::string tmp_path;
  for (auto& a : argv) {
    if (a != "{}") continue;
    if (tmp_path.empty()) {
      const char* dir = std::getenv("TMPDIR");
      std::string templ = std::string(dir ? dir : "/tmp") + "/linv-XXXXXX.smt2";
      std::vector<char> buf(templ.begin(), templ.end());
      buf.push_back('\0');
      int fd = mkstemps(buf.data(), 5);
      if (fd < 0) throw SolverFailure("cannot create temporary file");
      tmp_path = buf.data();
      std::size_t off = 0;
      while (off < text.size()) {
        ssize_t w = ::write(fd, text.data() + off, text.size() - off);
        if (w <= 0) break;
        off += static_cast<std::size_t>(w);
      }
      ::close(fd);
    }
    a = tmp_path;
  }
  bool via_stdin = tmp_path.empty();

  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) throw SolverFailure("pipe failed");
  pid_t pid = fork();
  if (pid < 0) throw SolverFailure("fork failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, STDERR_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    std::vector<char*> args;
    for (auto& a : argv) args.push_back(a.data());
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  signal(SIGPIPE, SIG_IGN);
  int wfd = in_pipe[1];
  int rfd = out_pipe[0];
  fcntl(wfd, F_SETFL, O_NONBLOCK);
  std::size_t written = 0;
  if (!via_stdin) {
    close(wfd);
    wfd = -1;
  }
  ProcessResult res;
  char buf[4096];
  while (rfd >= 0) {
    auto now = Clock::now();
    if (now >= deadline) {
      res.timed_out = true;
      kill(pid, SIGKILL);
      break;
    }
    int ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
    pollfd fds[2];
    int n = 0;
    fds[n++] = {rfd, POLLIN, 0};
    if (wfd >= 0) fds[n++] = {wfd, POLLOUT, 0};
    int r = poll(fds, n, ms);
    if (r < 0) continue;
    if (wfd >= 0 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t w = ::write(wfd, text.data() + written, text.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 || written == text.size()) {
        close(wfd);
        wfd = -1;
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t got = ::read(rfd, buf, sizeof buf);
      if (got <= 0) {
        close(rfd);
        rfd = -1;
      } else {
        res.output.append(buf, static_cast<std::size_t>(got));
      }
    }
  }
  if (wfd >= 0) close(wfd);
  if (rfd >= 0) close(rfd);
  int status = 0;
  waitpid(pid, &status, 0);
  if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
  if (!tmp_path.empty()) unlink(tmp_path.c_str());
  return res;
}

namespace {

void collect_definitions(const SExpr& e, const SymbolTable& symbols, Valuation& nu)
{
  if (e.is_atom) return;
  if (e.list.size() == 5 && e.list[0].is_atom && e.list[0].atom == "define-fun") {
    auto it = symbols.find(unquote(e.list[1].atom));
    if (it == symbols.end()) return;
    const auto& [v, boolean] = it->second;
    if (boolean)
      nu.set(v, e.list[4].is_atom && e.list[4].atom == "true");
    else
      nu.set(v, rational_from_sexpr(e.list[4]));
    return;
  }
  for (const auto& c : e.list) collect_definitions(c, symbols, nu);
}

}  // namespace

SatResult external_check_sat(const Formula& f, const std::vector<std::string>& command,
                             Clock::time_point deadline, const IntegerVars& ints)
{
  std::string script = "(set-option :produce-models true)\n(set-logic " + smtlib_logic({f}, ints) + ")\n" +
                       smtlib_declarations({f}, ints) + "(assert " + to_smtlib(f, ints) +
                       ")\n(check-sat)\n(get-model)\n(exit)\n";
  ProcessResult pr = run_process(command, script, deadline);
  if (pr.timed_out) throw Timeout("external solver time limit reached");
  std::vector<SExpr> out;
  try {
    out = parse_sexprs(pr.output);
  } catch (const Error& e) {
    throw SolverFailure(std::string("cannot read external solver output: ") + e.what());
  }
  if (out.empty() || !out[0].is_atom) throw SolverFailure("external solver gave no verdict: " + pr.output);
  SatResult r;
  if (out[0].atom == "unsat") return r;
  if (out[0].atom != "sat") throw SolverFailure("external solver answered " + out[0].to_string());
  r.sat = true;
  SymbolTable symbols = symbol_table({f});
  for (std::size_t i = 1; i < out.size(); ++i) collect_definitions(out[i], symbols, r.model);
  VarSets vs = vars_of(f);
  for (const auto& v : vs.rat)
    if (!r.model.contains(v)) r.model.set(v, Rational(0));
  for (const auto& v : vs.boolean)
    if (!r.model.contains(v)) r.model.set(v, false);
  if (!evaluate(f, r.model)) throw SolverFailure("external model does not satisfy the query");
  return r;
}

std::vector<Formula> external_sequence_interpolant(const std::vector<Formula>& seq,
                                                   const std::vector<std::string>& command,
                                                   Clock::time_point deadline, const IntegerVars& ints)
{
  std::ostringstream os;
  os << "(set-option :produce-interpolants true)\n(set-logic " << smtlib_logic(seq, ints) << ")\n"
     << smtlib_declarations(seq, ints);
  for (std::size_t i = 0; i < seq.size(); ++i)
    os << "(assert (! " << to_smtlib(seq[i], ints) << " :named a" << i << "))\n";
  os << "(check-sat)\n(get-interpolants";
  for (std::size_t i = 0; i < seq.size(); ++i) os << " a" << i;
  os << ")\n(exit)\n";
  ProcessResult pr = run_process(command, os.str(), deadline);
  if (pr.timed_out) throw Timeout("external interpolator time limit reached");
  std::vector<SExpr> out = parse_sexprs(pr.output);
  if (out.empty() || !out[0].is_atom || out[0].atom != "unsat")
    throw SolverFailure("external interpolator did not report unsat");
  if (out.size() < 2) throw SolverFailure("external interpolator returned no interpolants");
  SymbolTable symbols = symbol_table(seq);
  std::vector<Formula> result;
  // Either one list holding all formulas or one top-level formula each.
  auto is_container = [](const SExpr& e) {
    if (e.is_atom || e.list.empty()) return false;
    const SExpr& h = e.list[0];
    return !h.is_atom || h.atom == "true" || h.atom == "false" || h.atom.front() == '|';
  };
  std::vector<SExpr> items;
  if (out.size() == 2 && is_container(out[1]))
    items = out[1].list;
  else
    items.assign(out.begin() + 1, out.end());
  for (const auto& it : items) result.push_back(formula_from_sexpr(it, symbols));
  if (result.size() + 1 != seq.size())
    throw SolverFailure("external interpolator returned " + std::to_string(result.size()) + " formulas");
  return result;
}

}  // namespace linv
