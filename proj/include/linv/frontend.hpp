#pragma once

#include <map>
#include <string>
#include <vector>

#include "linv/atom.hpp"
#include "linv/logic.hpp"

namespace linv {

class ParseError : public Error
{
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line),
        column_(column)
  {
  }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

enum class Sort
{
  Rat,
  Int,
  Bool
};

struct VarDecl
{
  std::string name;
  Sort sort;
};

struct Statement
{
  enum class Kind
  {
    Nop,
    Assign,
    Havoc,
    If,
    Assume
  };

  Kind kind = Kind::Nop;
  Var target;                        // Assign, Havoc
  std::optional<Replacement> value;  // Assign
  std::optional<Formula> cond;       // If, Assume
  std::vector<Statement> then_branch;
  std::vector<Statement> else_branch;

  static Statement nop();
  static Statement assign(const Var& x, const Term& e);
  static Statement assign(const Var& x, const Formula& e);
  static Statement havoc(const Var& x);
  static Statement if_then_else(const Formula& c, std::vector<Statement> t,
                                std::vector<Statement> e = {Statement::nop()});
  static Statement assume(const Formula& c);

  friend bool operator==(const Statement& a, const Statement& b);
};

struct AnnotatedLoop
{
  std::vector<VarDecl> decls;
  Formula pre = Formula::truth();
  Formula guard = Formula::truth();
  std::vector<Statement> body;
  Formula post = Formula::truth();

  std::vector<Var> rat_vars() const;  // numeric: rat and int
  IntegerVars integer_vars() const;
  std::vector<Var> bool_vars() const;
  std::optional<Sort> sort_of(const std::string& name) const;

  // pre || (post && !guard): any invariant stays one when widened by it.
  Formula under_approximation() const;
  // post || guard: no invariant leaves it.
  Formula over_approximation() const;
};

AnnotatedLoop parse_loop(const std::string& text);
AnnotatedLoop parse_loop_file(const std::string& path);
// A formula over the loop's declared variables, in the same syntax.
Formula parse_formula(const std::string& text, const AnnotatedLoop& scope);

std::string print_loop(const AnnotatedLoop& loop);
std::string print_statements(const std::vector<Statement>& stmts, int indent = 0);

// Source of globally fresh symbols within one problem instance.
class FreshNames
{
 public:
  Var fresh(const std::string& base, const std::string& tag);

 private:
  unsigned next_ = 0;
};

// [[S]] over X<0> (pre-state) and X<1> (post-state). Intermediate states
// of compound statements become fresh unshared symbols.
Formula transition(const Statement& s, const AnnotatedLoop& loop, FreshNames& names);
Formula transition(const std::vector<Statement>& s, const AnnotatedLoop& loop, FreshNames& names);

// Weakest precondition; nondet assignments introduce fresh Skolem constants.
Formula pre_condition(const Formula& theta, const std::vector<Statement>& s, FreshNames& names);

// [phi<0>, [[S1]]<0>, ..., [[Sm]]<m-1>, !psi<m>]
std::vector<Formula> xi_sequence(const Formula& phi, const AnnotatedLoop& loop, const Formula& psi,
                                 FreshNames& names);

// Atoms occurring anywhere in the program text.
std::set<Atom> program_atoms(const AnnotatedLoop& loop);

}  // namespace linv
