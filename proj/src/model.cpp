#include "acause/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace acause {

// ---------------------------------------------------------------------------
// Expr / Formula builders
// ---------------------------------------------------------------------------

namespace {

ExprPtr make_expr(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

void require(bool ok, ErrorCode code, const std::string& message) {
  if (!ok) throw Error(code, message);
}

}  // namespace

ExprPtr Expr::constant(std::string token) {
  Expr e;
  e.kind = Kind::Constant;
  e.name = std::move(token);
  return make_expr(std::move(e));
}

ExprPtr Expr::var(std::string name) {
  Expr e;
  e.kind = Kind::Var;
  e.name = std::move(name);
  return make_expr(std::move(e));
}

ExprPtr Expr::ident(std::string name) {
  Expr e;
  e.kind = Kind::Ident;
  e.name = std::move(name);
  return make_expr(std::move(e));
}

ExprPtr Expr::eq(std::string var, std::string value) {
  Expr e;
  e.kind = Kind::Eq;
  e.name = std::move(var);
  e.value = std::move(value);
  return make_expr(std::move(e));
}

ExprPtr Expr::negation(ExprPtr operand) {
  require(operand != nullptr, ErrorCode::InvalidArgument, "null operand");
  Expr e;
  e.kind = Kind::Not;
  e.operands.push_back(std::move(operand));
  return make_expr(std::move(e));
}

static ExprPtr nary(Expr::Kind kind, std::vector<ExprPtr> operands) {
  require(!operands.empty(), ErrorCode::InvalidArgument, "empty operand list");
  for (const auto& op : operands)
    require(op != nullptr, ErrorCode::InvalidArgument, "null operand");
  if (operands.size() == 1) return operands[0];
  Expr e;
  e.kind = kind;
  e.operands = std::move(operands);
  return make_expr(std::move(e));
}

ExprPtr Expr::conjunction(std::vector<ExprPtr> operands) {
  return nary(Kind::And, std::move(operands));
}

ExprPtr Expr::disjunction(std::vector<ExprPtr> operands) {
  return nary(Kind::Or, std::move(operands));
}

ExprPtr Expr::table(std::vector<CaseArm> arms, std::string else_value) {
  for (const auto& arm : arms)
    require(arm.condition != nullptr, ErrorCode::InvalidArgument,
            "null case condition");
  Expr e;
  e.kind = Kind::Case;
  e.arms = std::move(arms);
  e.else_value = std::move(else_value);
  return make_expr(std::move(e));
}

bool expr_equal(const Expr& a, const Expr& b) {
  // Var and Ident are interchangeable: both print as a bare name, and an
  // Ident resolves to the declared variable of that name when a model is
  // built.
  auto is_ref = [](Expr::Kind k) {
    return k == Expr::Kind::Var || k == Expr::Kind::Ident;
  };
  if (a.kind != b.kind && !(is_ref(a.kind) && is_ref(b.kind))) return false;
  switch (a.kind) {
    case Expr::Kind::Constant:
    case Expr::Kind::Var:
    case Expr::Kind::Ident:
      return a.name == b.name;
    case Expr::Kind::Eq:
      return a.name == b.name && a.value == b.value;
    case Expr::Kind::Not:
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      if (a.operands.size() != b.operands.size()) return false;
      for (size_t i = 0; i < a.operands.size(); ++i)
        if (!expr_equal(*a.operands[i], *b.operands[i])) return false;
      return true;
    }
    case Expr::Kind::Case: {
      if (a.arms.size() != b.arms.size()) return false;
      if (a.else_value != b.else_value) return false;
      for (size_t i = 0; i < a.arms.size(); ++i) {
        if (a.arms[i].value != b.arms[i].value) return false;
        if (!expr_equal(*a.arms[i].condition, *b.arms[i].condition))
          return false;
      }
      return true;
    }
  }
  return false;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return expr_equal(*a, *b);
}

FormulaPtr Formula::lit(Literal l) {
  Formula f;
  f.kind = Kind::Lit;
  f.literal = l;
  return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr Formula::negation(FormulaPtr operand) {
  require(operand != nullptr, ErrorCode::InvalidArgument, "null operand");
  Formula f;
  f.kind = Kind::Not;
  f.operands.push_back(std::move(operand));
  return std::make_shared<const Formula>(std::move(f));
}

static FormulaPtr nary_formula(Formula::Kind kind,
                               std::vector<FormulaPtr> operands) {
  require(!operands.empty(), ErrorCode::InvalidArgument, "empty operand list");
  for (const auto& op : operands)
    require(op != nullptr, ErrorCode::InvalidArgument, "null operand");
  if (operands.size() == 1) return operands[0];
  Formula f;
  f.kind = kind;
  f.operands = std::move(operands);
  return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr Formula::conjunction(std::vector<FormulaPtr> operands) {
  return nary_formula(Kind::And, std::move(operands));
}

FormulaPtr Formula::disjunction(std::vector<FormulaPtr> operands) {
  return nary_formula(Kind::Or, std::move(operands));
}

// ---------------------------------------------------------------------------
// CausalModel core
// ---------------------------------------------------------------------------

struct ModelCore {
  std::vector<VariableDecl> vars;  // exogenous first, then endogenous
  int exo_count = 0;
  std::unordered_map<std::string, VarId> by_name;
};

int CausalModel::var_count() const {
  return static_cast<int>(core_->vars.size());
}
int CausalModel::exo_count() const { return core_->exo_count; }
int CausalModel::endo_count() const { return var_count() - exo_count(); }

const std::string& CausalModel::var_name(VarId v) const {
  return core_->vars.at(v).name;
}

const Domain& CausalModel::domain(VarId v) const {
  return core_->vars.at(v).domain;
}

std::optional<VarId> CausalModel::find_var(std::string_view name) const {
  auto it = core_->by_name.find(std::string(name));
  if (it == core_->by_name.end()) return std::nullopt;
  return it->second;
}

VarId CausalModel::require_var(std::string_view name) const {
  auto v = find_var(name);
  require(v.has_value(), ErrorCode::UnknownVariable,
          "unknown variable: " + std::string(name));
  return *v;
}

VarId CausalModel::require_endogenous(std::string_view name) const {
  VarId v = require_var(name);
  require(!is_exogenous(v), ErrorCode::NotEndogenous,
          "variable is exogenous: " + std::string(name));
  return v;
}

Literal CausalModel::lit(std::string_view var, std::string_view value) const {
  VarId v = require_var(var);
  int ix = domain(v).index_of(value);
  require(ix >= 0, ErrorCode::ValueOutOfDomain,
          "value '" + std::string(value) + "' not in domain of " +
              std::string(var));
  return Literal{v, ix};
}

std::string CausalModel::lit_string(Literal l) const {
  check_literal(l);
  return var_name(l.var) + "=" + domain(l.var).token(l.value);
}

void CausalModel::check_literal(Literal l) const {
  require(l.var >= 0 && l.var < var_count(), ErrorCode::UnknownVariable,
          "literal references an unknown variable id");
  require(l.value >= 0 && l.value < domain(l.var).size(),
          ErrorCode::ValueOutOfDomain,
          "literal value out of domain for " + var_name(l.var));
}

void CausalModel::check_endogenous_literal(Literal l) const {
  check_literal(l);
  require(!is_exogenous(l.var), ErrorCode::NotEndogenous,
          "exogenous literal not admitted here: " + var_name(l.var));
}

Context CausalModel::make_context(
    const std::vector<std::pair<std::string, std::string>>& bindings) const {
  Context u;
  u.values.assign(exo_count(), -1);
  for (const auto& [name, token] : bindings) {
    VarId v = require_var(name);
    require(is_exogenous(v), ErrorCode::InvalidArgument,
            "context assigns endogenous variable: " + name);
    require(u.values[v] < 0, ErrorCode::DuplicateVariable,
            "context assigns " + name + " twice");
    int ix = domain(v).index_of(token);
    require(ix >= 0, ErrorCode::ValueOutOfDomain,
            "value '" + token + "' not in domain of " + name);
    u.values[v] = ix;
  }
  for (VarId v = 0; v < exo_count(); ++v)
    require(u.values[v] >= 0, ErrorCode::InvalidArgument,
            "context missing exogenous variable: " + var_name(v));
  return u;
}

const std::vector<VarId>& CausalModel::topological_order() const {
  return *topo_;
}

const std::vector<VarId>& CausalModel::parents(VarId v) const {
  require(v >= 0 && v < var_count(), ErrorCode::UnknownVariable,
          "unknown variable id");
  require(!is_exogenous(v), ErrorCode::NotEndogenous,
          "parents are defined for endogenous variables only");
  return tables_[v - exo_count()]->parents;
}

std::vector<VarId> CausalModel::endogenous_parents(VarId v) const {
  std::vector<VarId> out;
  for (VarId p : parents(v))
    if (!is_exogenous(p)) out.push_back(p);
  return out;
}

const MechanismTable& CausalModel::table(VarId v) const {
  require(v >= exo_count() && v < var_count(), ErrorCode::NotEndogenous,
          "mechanism tables exist for endogenous variables only");
  return *tables_[v - exo_count()];
}

ExprPtr CausalModel::mechanism_expr(VarId v) const {
  require(v >= exo_count() && v < var_count(), ErrorCode::NotEndogenous,
          "mechanisms exist for endogenous variables only");
  return exprs_[v - exo_count()];
}

// ---------------------------------------------------------------------------
// Expression resolution and table compilation
// ---------------------------------------------------------------------------

namespace {

// Output: the expression must produce members of the target domain.
// Boolean: the expression feeds a connective and must produce 0 or 1.
enum class Position { Output, Boolean };

struct Resolver {
  const ModelCore& core;
  const std::string& target_name;
  const Domain& target_domain;
  std::set<VarId>* refs;

  ExprPtr resolve(const ExprPtr& e, Position pos) const {
    switch (e->kind) {
      case Expr::Kind::Constant:
        check_constant(e->name, pos);
        return e;
      case Expr::Kind::Ident: {
        auto it = core.by_name.find(e->name);
        if (it != core.by_name.end()) return resolve_var(e->name, pos);
        // Not a variable: treat as a value token.
        check_constant(e->name, pos);
        return Expr::constant(e->name);
      }
      case Expr::Kind::Var: {
        require(core.by_name.count(e->name) > 0, ErrorCode::UnknownVariable,
                "unknown variable: " + e->name);
        return resolve_var(e->name, pos);
      }
      case Expr::Kind::Eq: {
        auto it = core.by_name.find(e->name);
        require(it != core.by_name.end(), ErrorCode::UnknownVariable,
                "unknown variable: " + e->name);
        note_reference(it->second);
        const Domain& d = core.vars[it->second].domain;
        require(d.index_of(e->value) >= 0, ErrorCode::ValueOutOfDomain,
                "value '" + e->value + "' not in domain of " + e->name);
        return e;
      }
      case Expr::Kind::Not: {
        auto op = resolve(e->operands[0], Position::Boolean);
        return Expr::negation(std::move(op));
      }
      case Expr::Kind::And:
      case Expr::Kind::Or: {
        std::vector<ExprPtr> ops;
        ops.reserve(e->operands.size());
        for (const auto& op : e->operands)
          ops.push_back(resolve(op, Position::Boolean));
        Expr out;
        out.kind = e->kind;
        out.operands = std::move(ops);
        return std::make_shared<const Expr>(std::move(out));
      }
      case Expr::Kind::Case: {
        std::vector<Expr::CaseArm> arms;
        arms.reserve(e->arms.size());
        for (const auto& arm : e->arms) {
          check_constant(arm.value, pos);
          arms.push_back({resolve(arm.condition, Position::Boolean),
                          arm.value});
        }
        check_constant(e->else_value, pos);
        return Expr::table(std::move(arms), e->else_value);
      }
    }
    throw Error(ErrorCode::InvalidArgument, "corrupt expression node");
  }

  ExprPtr resolve_var(const std::string& name, Position pos) const {
    VarId v = core.by_name.at(name);
    require(core.vars[v].name != target_name, ErrorCode::SelfReference,
            "mechanism of " + target_name + " references its own target");
    if (pos == Position::Boolean)
      require(core.vars[v].domain.is_boolean(), ErrorCode::IllTypedMechanism,
              "boolean connective applied to non-boolean variable " + name +
                  " in mechanism of " + target_name);
    note_reference(v);
    return Expr::var(name);
  }

  void note_reference(VarId v) const {
    require(core.vars[v].name != target_name, ErrorCode::SelfReference,
            "mechanism of " + target_name + " references its own target");
    refs->insert(v);
  }

  void check_constant(const std::string& token, Position pos) const {
    if (pos == Position::Boolean) {
      require(token == "0" || token == "1", ErrorCode::IllTypedMechanism,
              "boolean connective applied to non-boolean value '" + token +
                  "' in mechanism of " + target_name);
    } else {
      require(target_domain.index_of(token) >= 0,
              ErrorCode::IllTypedMechanism,
              "value '" + token + "' outside domain of " + target_name);
    }
  }
};

// Evaluates a resolved expression under an assignment of value indices.
// Returns the value token. Build-time only; hot paths use tables.
struct TreeEvaluator {
  const ModelCore& core;
  const std::vector<int>& env;  // value index per VarId; -1 where unset

  std::string_view eval(const Expr& e) const {
    static const std::string kTrue = "1";
    static const std::string kFalse = "0";
    switch (e.kind) {
      case Expr::Kind::Constant:
        return e.name;
      case Expr::Kind::Var: {
        VarId v = core.by_name.at(e.name);
        return core.vars[v].domain.token(env[v]);
      }
      case Expr::Kind::Eq: {
        VarId v = core.by_name.at(e.name);
        int rhs = core.vars[v].domain.index_of(e.value);
        return env[v] == rhs ? kTrue : kFalse;
      }
      case Expr::Kind::Not:
        return eval(*e.operands[0]) == "1" ? kFalse : kTrue;
      case Expr::Kind::And: {
        for (const auto& op : e.operands)
          if (eval(*op) != "1") return kFalse;
        return kTrue;
      }
      case Expr::Kind::Or: {
        for (const auto& op : e.operands)
          if (eval(*op) == "1") return kTrue;
        return kFalse;
      }
      case Expr::Kind::Case: {
        for (const auto& arm : e.arms)
          if (eval(*arm.condition) == "1") return arm.value;
        return e.else_value;
      }
      case Expr::Kind::Ident:
        break;
    }
    throw Error(ErrorCode::InvalidArgument, "unresolved expression node");
  }
};

std::vector<int> strides_for(const std::vector<int>& radices) {
  std::vector<int> strides(radices.size(), 1);
  for (int i = static_cast<int>(radices.size()) - 2; i >= 0; --i)
    strides[i] = strides[i + 1] * radices[i + 1];
  return strides;
}

// Full truth table of `expr` over the referenced variables, then reduction
// to the extensionally relevant parents.
std::shared_ptr<const MechanismTable> compile_table(
    const ModelCore& core, const std::string& target,
    const Domain& target_domain, const ExprPtr& expr,
    const std::set<VarId>& ref_set) {
  std::vector<VarId> refs(ref_set.begin(), ref_set.end());
  std::vector<int> radices;
  radices.reserve(refs.size());
  for (VarId r : refs) radices.push_back(core.vars[r].domain.size());
  std::vector<int> strides = strides_for(radices);

  long long rows = 1;
  for (int r : radices) rows *= r;
  require(rows <= (1 << 22), ErrorCode::InvalidArgument,
          "mechanism of " + target + " references too many variables");

  std::vector<int> full(static_cast<size_t>(rows));
  std::vector<int> env(core.vars.size(), -1);
  std::vector<int> digits(refs.size(), 0);
  TreeEvaluator evaluator{core, env};
  for (long long row = 0; row < rows; ++row) {
    for (size_t i = 0; i < refs.size(); ++i) env[refs[i]] = digits[i];
    std::string_view token = evaluator.eval(*expr);
    int ix = target_domain.index_of(token);
    require(ix >= 0, ErrorCode::IllTypedMechanism,
            "mechanism of " + target + " evaluates to '" +
                std::string(token) + "' outside its domain");
    full[static_cast<size_t>(row)] = ix;
    for (int i = static_cast<int>(digits.size()) - 1; i >= 0; --i) {
      if (++digits[i] < radices[i]) break;
      digits[i] = 0;
    }
  }

  // A referenced variable is a parent iff the table varies along its axis.
  std::vector<bool> relevant(refs.size(), false);
  for (size_t i = 0; i < refs.size(); ++i) {
    for (long long row = 0; row < rows && !relevant[i]; ++row) {
      int digit = static_cast<int>(row / strides[i]) % radices[i];
      if (digit != 0) continue;
      int base = full[static_cast<size_t>(row)];
      for (int d = 1; d < radices[i]; ++d) {
        if (full[static_cast<size_t>(row + d * strides[i])] != base) {
          relevant[i] = true;
          break;
        }
      }
    }
  }

  auto out = std::make_shared<MechanismTable>();
  for (size_t i = 0; i < refs.size(); ++i)
    if (relevant[i]) {
      out->parents.push_back(refs[i]);
      out->radices.push_back(radices[i]);
    }
  out->strides = strides_for(out->radices);

  long long reduced_rows = 1;
  for (int r : out->radices) reduced_rows *= r;
  out->values.resize(static_cast<size_t>(reduced_rows));
  std::vector<int> pdigits(out->parents.size(), 0);
  for (long long row = 0; row < reduced_rows; ++row) {
    long long full_index = 0;
    size_t pi = 0;
    for (size_t i = 0; i < refs.size(); ++i) {
      if (relevant[i]) full_index += pdigits[pi++] * strides[i];
      // Irrelevant axes contribute digit 0; any digit gives the same value.
    }
    out->values[static_cast<size_t>(row)] = full[static_cast<size_t>(full_index)];
    for (int i = static_cast<int>(pdigits.size()) - 1; i >= 0; --i) {
      if (++pdigits[i] < out->radices[i]) break;
      pdigits[i] = 0;
    }
  }
  return out;
}

std::shared_ptr<const MechanismTable> constant_table(int value) {
  auto out = std::make_shared<MechanismTable>();
  out->values = {value};
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// create / validate
// ---------------------------------------------------------------------------

CausalModel CausalModel::create(Signature signature,
                                std::vector<Mechanism> mechanisms) {
  auto core = std::make_shared<Core>();
  core->exo_count = static_cast<int>(signature.exogenous.size());

  auto add_var = [&](VariableDecl decl) {
    require(!decl.name.empty(), ErrorCode::InvalidArgument,
            "variable with empty name");
    require(decl.domain.size() >= 1, ErrorCode::InvalidArgument,
            "empty domain for variable " + decl.name);
    std::set<std::string> seen;
    for (const auto& t : decl.domain.values) {
      require(!t.empty(), ErrorCode::InvalidArgument,
              "empty value token in domain of " + decl.name);
      require(seen.insert(t).second, ErrorCode::InvalidArgument,
              "duplicate value '" + t + "' in domain of " + decl.name);
    }
    VarId id = static_cast<VarId>(core->vars.size());
    require(core->by_name.emplace(decl.name, id).second,
            ErrorCode::DuplicateVariable,
            "duplicate variable name: " + decl.name);
    core->vars.push_back(std::move(decl));
  };
  for (auto& d : signature.exogenous) add_var(std::move(d));
  for (auto& d : signature.endogenous) add_var(std::move(d));
  require(core->exo_count < static_cast<int>(core->vars.size()),
          ErrorCode::InvalidArgument, "at least one endogenous variable required");

  const int n_endo = static_cast<int>(core->vars.size()) - core->exo_count;

  // Exactly one mechanism per endogenous variable.
  std::vector<const Mechanism*> by_endo(n_endo, nullptr);
  for (const auto& m : mechanisms) {
    auto it = core->by_name.find(m.target);
    require(it != core->by_name.end(), ErrorCode::UnknownVariable,
            "mechanism for unknown variable: " + m.target);
    require(it->second >= core->exo_count, ErrorCode::NotEndogenous,
            "mechanism for exogenous variable: " + m.target);
    require(m.expr != nullptr, ErrorCode::InvalidArgument,
            "null mechanism expression for " + m.target);
    int slot = it->second - core->exo_count;
    require(by_endo[slot] == nullptr, ErrorCode::DuplicateVariable,
            "duplicate mechanism for " + m.target);
    by_endo[slot] = &m;
  }
  for (int i = 0; i < n_endo; ++i)
    require(by_endo[i] != nullptr, ErrorCode::InvalidArgument,
            "missing mechanism for " +
                core->vars[core->exo_count + i].name);

  CausalModel model;
  model.core_ = core;
  model.tables_.resize(n_endo);
  model.exprs_.resize(n_endo);
  for (int i = 0; i < n_endo; ++i) {
    const auto& decl = core->vars[core->exo_count + i];
    std::set<VarId> refs;
    Resolver resolver{*core, decl.name, decl.domain, &refs};
    ExprPtr resolved = resolver.resolve(by_endo[i]->expr, Position::Output);
    model.exprs_[i] = resolved;
    model.tables_[i] =
        compile_table(*core, decl.name, decl.domain, resolved, refs);
  }

  // Kahn's algorithm over extensional endogenous parent edges, smallest
  // declaration index first, so the order is deterministic.
  std::vector<int> indegree(n_endo, 0);
  std::vector<std::vector<int>> children(n_endo);
  for (int i = 0; i < n_endo; ++i)
    for (VarId p : model.tables_[i]->parents)
      if (p >= core->exo_count) {
        ++indegree[i];
        children[p - core->exo_count].push_back(i);
      }
  std::set<int> ready;
  for (int i = 0; i < n_endo; ++i)
    if (indegree[i] == 0) ready.insert(i);
  auto topo = std::make_shared<std::vector<VarId>>();
  topo->reserve(n_endo);
  while (!ready.empty()) {
    int i = *ready.begin();
    ready.erase(ready.begin());
    topo->push_back(core->exo_count + i);
    for (int c : children[i])
      if (--indegree[c] == 0) ready.insert(c);
  }
  if (static_cast<int>(topo->size()) != n_endo) {
    // Recover one cycle for the diagnostic: walk unplaced parents until a
    // variable repeats.
    std::vector<bool> placed(n_endo, false);
    for (VarId v : *topo) placed[v - core->exo_count] = true;
    int at = 0;
    while (placed[at]) ++at;
    std::vector<int> trail;
    std::vector<int> seen_at(n_endo, -1);
    while (seen_at[at] < 0) {
      seen_at[at] = static_cast<int>(trail.size());
      trail.push_back(at);
      for (VarId p : model.tables_[at]->parents)
        if (p >= core->exo_count && !placed[p - core->exo_count]) {
          at = p - core->exo_count;
          break;
        }
    }
    std::string cycle = core->vars[core->exo_count + at].name;
    for (int i = static_cast<int>(trail.size()) - 1; i >= seen_at[at]; --i)
      cycle += " -> " + core->vars[core->exo_count + trail[i]].name;
    throw Error(ErrorCode::CyclicModel, "cyclic dependence: " + cycle);
  }
  model.topo_ = topo;
  return model;
}

// ---------------------------------------------------------------------------
// intervene / solve / evaluate
// ---------------------------------------------------------------------------

CausalModel CausalModel::intervene(const Intervention& intervention) const {
  CausalModel out = *this;
  std::set<VarId> seen;
  for (Literal l : intervention.assignments) {
    check_endogenous_literal(l);
    require(seen.insert(l.var).second, ErrorCode::DuplicateVariable,
            "intervention assigns " + var_name(l.var) + " twice");
    int slot = l.var - exo_count();
    out.tables_[slot] = constant_table(l.value);
    out.exprs_[slot] = Expr::constant(domain(l.var).token(l.value));
  }
  return out;
}

void CausalModel::solve_into(const Context& context, Solution& out) const {
  require(static_cast<int>(context.values.size()) == exo_count(),
          ErrorCode::InvalidArgument,
          "context does not cover the exogenous variables");
  for (VarId v = 0; v < exo_count(); ++v)
    require(context.values[v] >= 0 && context.values[v] < domain(v).size(),
            ErrorCode::ValueOutOfDomain,
            "context value out of domain for " + var_name(v));

  out.values.assign(var_count(), -1);
  for (VarId v = 0; v < exo_count(); ++v) out.values[v] = context.values[v];
  std::vector<int> scratch;
  for (VarId v : *topo_) {
    const MechanismTable& t = *tables_[v - exo_count()];
    scratch.resize(t.parents.size());
    for (size_t i = 0; i < t.parents.size(); ++i)
      scratch[i] = out.values[t.parents[i]];
    out.values[v] = t.lookup(scratch);
  }
}

Solution CausalModel::solve(const Context& context) const {
  Solution s;
  solve_into(context, s);
  return s;
}

bool formula_holds(const CausalModel& model, const Solution& solution,
                   const Formula& body) {
  switch (body.kind) {
    case Formula::Kind::Lit:
      model.check_literal(body.literal);
      return model.holds(solution, body.literal);
    case Formula::Kind::Not:
      return !formula_holds(model, solution, *body.operands[0]);
    case Formula::Kind::And:
      for (const auto& op : body.operands)
        if (!formula_holds(model, solution, *op)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& op : body.operands)
        if (formula_holds(model, solution, *op)) return true;
      return false;
  }
  throw Error(ErrorCode::InvalidArgument, "corrupt formula node");
}

bool CausalModel::evaluate(const Context& context,
                           const CausalFormula& formula) const {
  require(formula.body != nullptr, ErrorCode::InvalidArgument,
          "causal formula without a body");
  if (formula.prefix.assignments.empty()) {
    Solution s = solve(context);
    return formula_holds(*this, s, *formula.body);
  }
  CausalModel m = intervene(formula.prefix);
  Solution s = m.solve(context);
  return formula_holds(m, s, *formula.body);
}

bool extensionally_equal(const CausalModel& a, const CausalModel& b) {
  if (a.core_->exo_count != b.core_->exo_count) return false;
  if (a.core_->vars != b.core_->vars) return false;
  for (size_t i = 0; i < a.tables_.size(); ++i) {
    if (a.tables_[i]->parents != b.tables_[i]->parents) return false;
    if (a.tables_[i]->values != b.tables_[i]->values) return false;
  }
  return true;
}

}  // namespace acause
