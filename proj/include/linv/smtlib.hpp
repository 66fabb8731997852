#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "linv/solver.hpp"

namespace linv {

std::string smt_symbol(const Var& v);
// Integer-valued variables are declared Int and coerced with to_real.
std::string to_smtlib(const Term& t, const IntegerVars& ints = {});
std::string to_smtlib(const Formula& f, const IntegerVars& ints = {});

// declare-fun for every symbol of fs.
std::string smtlib_declarations(const std::vector<Formula>& fs, const IntegerVars& ints = {});
// QF_LRA, or QF_LIRA when an integer-valued variable occurs.
std::string smtlib_logic(const std::vector<Formula>& fs, const IntegerVars& ints = {});

struct SExpr
{
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> list;

  std::string to_string() const;
};

// Parses a whole response into top-level expressions. Throws Error on
// unbalanced input.
std::vector<SExpr> parse_sexprs(const std::string& text);

Rational rational_from_sexpr(const SExpr& e);

// Symbols known to the reader: printed name -> (variable, is Boolean).
using SymbolTable = std::map<std::string, std::pair<Var, bool>>;
SymbolTable symbol_table(const std::vector<Formula>& fs);
Formula formula_from_sexpr(const SExpr& e, const SymbolTable& symbols);
Term term_from_sexpr(const SExpr& e, const SymbolTable& symbols);

struct ProcessResult
{
  int exit_code = -1;
  bool timed_out = false;
  std::string output;
};

// Runs argv with the given text; an argument "{}" is replaced by a
// temporary file holding the text, otherwise the text goes to stdin.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& text,
                          Clock::time_point deadline);

SatResult external_check_sat(const Formula& f, const std::vector<std::string>& command,
                             Clock::time_point deadline, const IntegerVars& ints = {});

// Sequence interpolation by an external interpolating prover that accepts
// named assertions and `(get-interpolants n1 ... nk)`. Returns the k-1
// intermediate formulas.
std::vector<Formula> external_sequence_interpolant(const std::vector<Formula>& seq,
                                                   const std::vector<std::string>& command,
                                                   Clock::time_point deadline,
                                                   const IntegerVars& ints = {});

}  // namespace linv
