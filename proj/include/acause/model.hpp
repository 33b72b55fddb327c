#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Finite-domain structural equation models: signatures, expression-tree
// mechanisms, interventions, contexts, and the solver for strongly
// recursive (acyclic) models. Mechanisms are kept as expression trees for
// printing, but every decision procedure consumes only their extensional
// function, realized as a lookup table over the extensional parent set.

namespace acause {

using VarId = int;  // index into a model's variable list, exogenous first

enum class ErrorCode {
  UnknownVariable,
  ValueOutOfDomain,
  DuplicateVariable,
  SelfReference,
  IllTypedMechanism,
  CyclicModel,
  NotEndogenous,
  SelfCause,
  EffectInSet,
  PathContainsEndpoint,
  DuplicatePathVariable,
  InvalidArgument,
  CorpusMissing,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Ordered finite set of value tokens. Declaration order is the canonical
// enumeration order everywhere: alternative-value searches, table rows,
// and reporting tie-breaks.
struct Domain {
  std::vector<std::string> values;

  Domain() = default;
  Domain(std::initializer_list<std::string> init) : values(init) {}
  explicit Domain(std::vector<std::string> init) : values(std::move(init)) {}

  int size() const { return static_cast<int>(values.size()); }
  const std::string& token(int index) const { return values.at(index); }
  int index_of(std::string_view token) const {
    for (int i = 0; i < size(); ++i)
      if (values[i] == token) return i;
    return -1;
  }
  // True iff declared exactly as {0, 1}; boolean connectives require this.
  bool is_boolean() const {
    return values.size() == 2 && values[0] == "0" && values[1] == "1";
  }
  bool operator==(const Domain&) const = default;
};

// A variable paired with a value, both as dense indices. Values index the
// variable's domain in declaration order.
struct Literal {
  VarId var = -1;
  int value = -1;
  bool operator==(const Literal&) const = default;
};

using AssignmentSet = std::vector<Literal>;

// Simultaneous intervention X <- x on pairwise distinct endogenous
// variables. Validated when applied.
struct Intervention {
  std::vector<Literal> assignments;
  bool operator==(const Intervention&) const = default;
};

// One value per exogenous variable, indexed by VarId (exogenous ids start
// at 0).
struct Context {
  std::vector<int> values;
  bool operator==(const Context&) const = default;
};

// One value per variable (exogenous and endogenous), indexed by VarId.
struct Solution {
  std::vector<int> values;
  int operator[](VarId v) const { return values.at(v); }
  bool operator==(const Solution&) const = default;
};

// ---------------------------------------------------------------------------
// Mechanism expressions
// ---------------------------------------------------------------------------

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression tree. `Ident` is an unresolved name produced by the
// parser or by convenience builders; CausalModel::create resolves it to a
// variable reference or a constant of the target domain.
class Expr {
 public:
  enum class Kind { Constant, Var, Ident, Eq, Not, And, Or, Case };

  struct CaseArm {
    ExprPtr condition;
    std::string value;
  };

  Kind kind;
  std::string name;          // Var/Ident/Eq: variable name; Constant: token
  std::string value;         // Eq: right-hand value token
  std::vector<ExprPtr> operands;  // Not: 1, And/Or: >= 2
  std::vector<CaseArm> arms;      // Case
  std::string else_value;         // Case

  static ExprPtr constant(std::string token);
  static ExprPtr var(std::string name);
  static ExprPtr ident(std::string name);
  static ExprPtr eq(std::string var, std::string value);
  static ExprPtr negation(ExprPtr operand);
  static ExprPtr conjunction(std::vector<ExprPtr> operands);
  static ExprPtr disjunction(std::vector<ExprPtr> operands);
  static ExprPtr table(std::vector<CaseArm> arms, std::string else_value);
};

bool expr_equal(const Expr& a, const Expr& b);
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// One structural equation: target must be endogenous, expr must never
// reference the target and must evaluate into the target's domain for
// every assignment of the referenced variables.
struct Mechanism {
  std::string target;
  ExprPtr expr;
};

struct VariableDecl {
  std::string name;
  Domain domain;
  bool operator==(const VariableDecl&) const = default;
};

struct Signature {
  std::vector<VariableDecl> exogenous;
  std::vector<VariableDecl> endogenous;
};

// ---------------------------------------------------------------------------
// Causal formulas  [X <- x] phi
// ---------------------------------------------------------------------------

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
 public:
  enum class Kind { Lit, Not, And, Or };

  Kind kind;
  Literal literal;                // Lit
  std::vector<FormulaPtr> operands;

  static FormulaPtr lit(Literal l);
  static FormulaPtr negation(FormulaPtr operand);
  static FormulaPtr conjunction(std::vector<FormulaPtr> operands);
  static FormulaPtr disjunction(std::vector<FormulaPtr> operands);
};

struct CausalFormula {
  Intervention prefix;  // may be empty
  FormulaPtr body;
};

// ---------------------------------------------------------------------------
// CausalModel
// ---------------------------------------------------------------------------

// Extensional function of one mechanism: lookup table over the extensional
// parent set (sorted by VarId, mixed-radix, last parent fastest).
struct MechanismTable {
  std::vector<VarId> parents;   // extensional, sorted ascending
  std::vector<int> radices;     // domain sizes, aligned with parents
  std::vector<int> strides;     // mixed-radix strides, aligned with parents
  std::vector<int> values;      // size = product of radices (>= 1)

  // parent_values[i] is the value index of parents[i].
  int lookup(const std::vector<int>& parent_values) const {
    int index = 0;
    for (size_t i = 0; i < strides.size(); ++i)
      index += parent_values[i] * strides[i];
    return values[index];
  }
};

struct ModelCore;  // immutable shared signature data

// Validated acyclic model. Immutable; interventions produce new models
// that share unchanged compiled mechanisms.
class CausalModel {
 public:
  // Validates everything: names, domains, one mechanism per endogenous
  // variable, expression typing and totality, and acyclicity of the
  // extensional dependence relation. Throws Error on any defect.
  static CausalModel create(Signature signature,
                            std::vector<Mechanism> mechanisms);

  int var_count() const;
  int exo_count() const;
  int endo_count() const;
  bool is_exogenous(VarId v) const { return v < exo_count(); }
  const std::string& var_name(VarId v) const;
  const Domain& domain(VarId v) const;
  std::optional<VarId> find_var(std::string_view name) const;
  VarId require_var(std::string_view name) const;  // throws UnknownVariable
  VarId require_endogenous(std::string_view name) const;

  // Builds a validated literal from tokens.
  Literal lit(std::string_view var, std::string_view value) const;
  std::string lit_string(Literal l) const;  // "Name=token"

  // Builds a total context from name/token pairs covering every exogenous
  // variable exactly once.
  Context make_context(
      const std::vector<std::pair<std::string, std::string>>& bindings) const;

  // Endogenous variables in a total order consistent with the extensional
  // parent relation; ties broken by declaration order.
  const std::vector<VarId>& topological_order() const;

  // Extensional parents (exogenous and endogenous) of an endogenous
  // variable, sorted by VarId. Y is a parent of X iff the mechanism of X
  // takes different values on some pair of assignments differing only in Y.
  const std::vector<VarId>& parents(VarId v) const;
  std::vector<VarId> endogenous_parents(VarId v) const;

  const MechanismTable& table(VarId v) const;  // v endogenous
  ExprPtr mechanism_expr(VarId v) const;       // v endogenous

  // Returns a new model with each intervened variable's mechanism replaced
  // by the constant assigned value. Unaffected mechanisms are shared.
  CausalModel intervene(const Intervention& intervention) const;

  // Unique solution of this acyclic model under the given total context.
  Solution solve(const Context& context) const;
  void solve_into(const Context& context, Solution& out) const;

  // (M, u) |= [prefix] body.
  bool evaluate(const Context& context, const CausalFormula& formula) const;

  bool holds(const Solution& solution, Literal l) const {
    return solution[l.var] == l.value;
  }

  void check_literal(Literal l) const;          // var + value in range
  void check_endogenous_literal(Literal l) const;

 private:
  using Core = ModelCore;
  CausalModel() = default;

  std::shared_ptr<const Core> core_;
  std::vector<std::shared_ptr<const MechanismTable>> tables_;  // per endo var
  std::vector<ExprPtr> exprs_;                                 // per endo var
  std::shared_ptr<const std::vector<VarId>> topo_;

  friend bool extensionally_equal(const CausalModel&, const CausalModel&);
};

// Same signature, same extensional parent sets, same reduced tables.
// Insensitive to how mechanisms are written.
bool extensionally_equal(const CausalModel& a, const CausalModel& b);

bool formula_holds(const CausalModel& model, const Solution& solution,
                   const Formula& body);

}  // namespace acause
