#include "acause/causation.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace acause {

const std::vector<Definition>& all_definitions() {
  static const std::vector<Definition> defs = {
      Definition::Cd,   Definition::Suff,  Definition::Dness, Definition::Ness,
      Definition::Bv,   Definition::Cness, Definition::Hp};
  return defs;
}

std::string_view to_string(Definition d) {
  switch (d) {
    case Definition::Cd: return "cd";
    case Definition::Suff: return "suff";
    case Definition::Dness: return "dness";
    case Definition::Ness: return "ness";
    case Definition::Bv: return "bv";
    case Definition::Cness: return "cness";
    case Definition::Hp: return "hp";
  }
  return "?";
}

std::optional<Definition> definition_from_string(std::string_view name) {
  for (Definition d : all_definitions())
    if (to_string(d) == name) return d;
  return std::nullopt;
}

namespace {

void require(bool ok, ErrorCode code, const std::string& message) {
  if (!ok) throw Error(code, message);
}

void validate_pair(const CausalModel& m, Literal cause, Literal effect) {
  m.check_endogenous_literal(cause);
  m.check_endogenous_literal(effect);
  require(cause.var != effect.var, ErrorCode::SelfCause,
          "cause and effect are the same variable: " + m.var_name(cause.var));
}

// Validates an assignment set: endogenous literals over pairwise distinct
// variables, none equal to the effect variable.
void validate_set(const CausalModel& m, const AssignmentSet& set,
                  Literal effect) {
  m.check_endogenous_literal(effect);
  std::set<VarId> seen;
  for (Literal l : set) {
    m.check_endogenous_literal(l);
    require(seen.insert(l.var).second, ErrorCode::DuplicateVariable,
            "assignment set fixes " + m.var_name(l.var) + " twice");
    require(l.var != effect.var, ErrorCode::EffectInSet,
            "assignment set fixes the effect variable " +
                m.var_name(l.var));
  }
}

// Sufficiency by enumeration of the parent completions. `fixed` holds one
// value index per VarId, -1 where free; exogenous parents always read from
// the context.
bool sufficiency_over_parents(const CausalModel& m, const Context& u,
                              const std::vector<int>& fixed, Literal effect) {
  const MechanismTable& t = m.table(effect.var);
  const size_t k = t.parents.size();
  std::vector<int> vals(k, 0);
  std::vector<size_t> free_pos;
  for (size_t i = 0; i < k; ++i) {
    VarId p = t.parents[i];
    if (m.is_exogenous(p)) {
      vals[i] = u.values[p];
    } else if (fixed[p] >= 0) {
      vals[i] = fixed[p];
    } else {
      free_pos.push_back(i);
    }
  }
  for (;;) {
    if (t.lookup(vals) != effect.value) return false;
    size_t i = 0;
    for (; i < free_pos.size(); ++i) {
      size_t pos = free_pos[i];
      if (++vals[pos] < t.radices[pos]) break;
      vals[pos] = 0;
    }
    if (i == free_pos.size()) return true;
  }
}

// Lexicographic-order combinations: calls fn with each size-k index subset
// of {0, .., n-1}; fn returns true to stop. Returns true if stopped.
template <typename Fn>
bool for_each_combination(int n, int k, Fn&& fn) {
  std::vector<int> ix(k);
  for (int i = 0; i < k; ++i) ix[i] = i;
  if (k > n) return false;
  for (;;) {
    if (fn(ix)) return true;
    int i = k - 1;
    while (i >= 0 && ix[i] == n - k + i) --i;
    if (i < 0) return false;
    ++ix[i];
    for (int j = i + 1; j < k; ++j) ix[j] = ix[j - 1] + 1;
  }
}

// Shared state for one (model, context): solution plus a memo of direct
// NESS checks between solution-valued literals.
struct Analysis {
  const CausalModel& m;
  const Context& u;
  Solution sol;
  std::map<std::pair<VarId, VarId>, bool> direct_memo;

  Analysis(const CausalModel& model, const Context& context)
      : m(model), u(context), sol(model.solve(context)) {}

  bool direct_link(VarId cause_var, VarId effect_var) {
    auto key = std::make_pair(cause_var, effect_var);
    auto it = direct_memo.find(key);
    if (it != direct_memo.end()) return it->second;
    bool ok = search_witness(Literal{cause_var, sol[cause_var]},
                             Literal{effect_var, sol[effect_var]})
                  .has_value();
    direct_memo.emplace(key, ok);
    return ok;
  }

  // Direct NESS at explicitly given values; non-actual values never admit
  // a witness (bullet (i) for the cause, sufficiency for the effect).
  std::optional<Witness> search_witness(Literal cause, Literal effect) {
    if (sol[cause.var] != cause.value) return std::nullopt;
    if (sol[effect.var] != effect.value) return std::nullopt;
    const std::vector<VarId>& pa = m.parents(effect.var);
    // A non-parent cause makes (ii) and (iii) contradictory.
    if (!std::binary_search(pa.begin(), pa.end(), cause.var))
      return std::nullopt;

    std::vector<VarId> candidates;
    for (VarId p : pa)
      if (!m.is_exogenous(p) && p != cause.var) candidates.push_back(p);
    std::sort(candidates.begin(), candidates.end(),
              [&](VarId a, VarId b) { return m.var_name(a) < m.var_name(b); });

    std::vector<int> fixed(m.var_count(), -1);
    std::optional<Witness> found;
    const int n = static_cast<int>(candidates.size());
    for (int k = 0; k <= n && !found; ++k) {
      for_each_combination(n, k, [&](const std::vector<int>& ix) {
        for (int i : ix) fixed[candidates[i]] = sol[candidates[i]];
        fixed[cause.var] = cause.value;
        bool with_cause = sufficiency_over_parents(m, u, fixed, effect);
        fixed[cause.var] = -1;
        bool without_cause =
            with_cause && sufficiency_over_parents(m, u, fixed, effect);
        bool ok = with_cause && !without_cause;
        if (ok) {
          Witness w;
          for (int i : ix)
            w.literals.push_back(
                Literal{candidates[i], sol[candidates[i]]});
          found = std::move(w);
        }
        for (int i : ix) fixed[candidates[i]] = -1;
        return ok;
      });
    }
    return found;
  }

  // Chain validity for given endpoint literals and intermediate variables.
  bool valid_chain(Literal cause, Literal effect,
                   const std::vector<VarId>& vars) {
    if (sol[cause.var] != cause.value) return false;
    if (sol[effect.var] != effect.value) return false;
    VarId at = cause.var;
    for (VarId v : vars) {
      if (!direct_link(at, v)) return false;
      at = v;
    }
    return direct_link(at, effect.var);
  }
};

// Endogenous variables strictly between cause and effect in the
// topological order; every valid chain ascends that order, because each
// direct NESS link implies extensional parenthood.
std::vector<VarId> interval_candidates(const CausalModel& m, VarId cause,
                                       VarId effect) {
  const auto& topo = m.topological_order();
  std::vector<int> pos(m.var_count(), -1);
  for (size_t i = 0; i < topo.size(); ++i) pos[topo[i]] = static_cast<int>(i);
  std::vector<VarId> out;
  for (VarId v : topo)
    if (pos[v] > pos[cause] && pos[v] < pos[effect]) out.push_back(v);
  return out;  // already in topological order
}

// All size-k subsets of `candidates` (kept in topological order), sorted
// by the lexicographic order of their variable-name sequences.
std::vector<std::vector<VarId>> ordered_subsets(const CausalModel& m,
                                                const std::vector<VarId>& candidates,
                                                int k) {
  std::vector<std::vector<VarId>> subsets;
  for_each_combination(static_cast<int>(candidates.size()), k,
                       [&](const std::vector<int>& ix) {
                         std::vector<VarId> seq;
                         seq.reserve(ix.size());
                         for (int i : ix) seq.push_back(candidates[i]);
                         subsets.push_back(std::move(seq));
                         return false;
                       });
  std::sort(subsets.begin(), subsets.end(),
            [&](const std::vector<VarId>& a, const std::vector<VarId>& b) {
              std::vector<std::string> an, bn;
              for (VarId v : a) an.push_back(m.var_name(v));
              for (VarId v : b) bn.push_back(m.var_name(v));
              return an < bn;
            });
  return subsets;
}

Chain chain_from(const Analysis& analysis, const std::vector<VarId>& vars) {
  Chain c;
  for (VarId v : vars) c.links.push_back(Literal{v, analysis.sol[v]});
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Definitions
// ---------------------------------------------------------------------------

DependenceResult counterfactually_depends(const CausalModel& m,
                                          const Context& u, Literal cause,
                                          Literal effect) {
  validate_pair(m, cause, effect);
  Solution sol = m.solve(u);
  if (sol[cause.var] != cause.value || sol[effect.var] != effect.value)
    return {};
  for (int alt = 0; alt < m.domain(cause.var).size(); ++alt) {
    CausalFormula f{Intervention{{Literal{cause.var, alt}}},
                    Formula::negation(Formula::lit(effect))};
    if (m.evaluate(u, f)) return {true, alt};
  }
  return {};
}

bool sufficient(const CausalModel& m, const Context& u,
                const AssignmentSet& set, Literal effect) {
  validate_set(m, set, effect);
  std::vector<int> fixed(m.var_count(), -1);
  for (Literal l : set) fixed[l.var] = l.value;
  return sufficiency_over_parents(m, u, fixed, effect);
}

bool sufficient_interventional(const CausalModel& m, const Context& u,
                               const AssignmentSet& set, Literal effect) {
  validate_set(m, set, effect);
  std::vector<VarId> others;
  std::set<VarId> in_set;
  for (Literal l : set) in_set.insert(l.var);
  for (VarId v = m.exo_count(); v < m.var_count(); ++v)
    if (v != effect.var && !in_set.count(v)) others.push_back(v);

  std::vector<int> digits(others.size(), 0);
  for (;;) {
    Intervention iv;
    iv.assignments = set;
    for (size_t i = 0; i < others.size(); ++i)
      iv.assignments.push_back(Literal{others[i], digits[i]});
    if (!m.evaluate(u, CausalFormula{iv, Formula::lit(effect)})) return false;
    size_t i = 0;
    for (; i < others.size(); ++i) {
      if (++digits[i] < m.domain(others[i]).size()) break;
      digits[i] = 0;
    }
    if (i == others.size()) return true;
  }
}

std::optional<Witness> direct_ness_cause(const CausalModel& m,
                                         const Context& u, Literal cause,
                                         Literal effect) {
  validate_pair(m, cause, effect);
  Analysis analysis(m, u);
  return analysis.search_witness(cause, effect);
}

std::optional<Chain> ness_cause(const CausalModel& m, const Context& u,
                                Literal cause, Literal effect) {
  validate_pair(m, cause, effect);
  Analysis analysis(m, u);
  if (analysis.sol[cause.var] != cause.value ||
      analysis.sol[effect.var] != effect.value)
    return std::nullopt;
  std::vector<VarId> candidates = interval_candidates(m, cause.var, effect.var);
  for (int k = 0; k <= static_cast<int>(candidates.size()); ++k) {
    for (const auto& seq : ordered_subsets(m, candidates, k))
      if (analysis.valid_chain(cause, effect, seq))
        return chain_from(analysis, seq);
  }
  return std::nullopt;
}

std::optional<Chain> ness_cause_along_path(const CausalModel& m,
                                           const Context& u, Literal cause,
                                           Literal effect, const Path& path) {
  validate_pair(m, cause, effect);
  std::set<VarId> seen;
  for (VarId v : path.variables) {
    require(v >= 0 && v < m.var_count(), ErrorCode::UnknownVariable,
            "path references an unknown variable id");
    require(!m.is_exogenous(v), ErrorCode::NotEndogenous,
            "path variable is exogenous: " + m.var_name(v));
    require(v != cause.var && v != effect.var,
            ErrorCode::PathContainsEndpoint,
            "path contains endpoint variable " + m.var_name(v));
    require(seen.insert(v).second, ErrorCode::DuplicatePathVariable,
            "path repeats variable " + m.var_name(v));
  }
  Analysis analysis(m, u);
  if (!analysis.valid_chain(cause, effect, path.variables))
    return std::nullopt;
  return chain_from(analysis, path.variables);
}

BvResult bv_cause(const CausalModel& m, const Context& u, Literal cause,
                  Literal effect) {
  auto chain = ness_cause(m, u, cause, effect);
  if (!chain) return {};
  for (int alt = 0; alt < m.domain(cause.var).size(); ++alt) {
    CausalModel altered = m.intervene({{Literal{cause.var, alt}}});
    if (!ness_cause(altered, u, Literal{cause.var, alt}, effect))
      return {true, std::move(chain), alt};
  }
  return {};
}

CnessResult cness_cause(const CausalModel& m, const Context& u, Literal cause,
                        Literal effect) {
  validate_pair(m, cause, effect);
  Analysis analysis(m, u);
  if (analysis.sol[cause.var] != cause.value ||
      analysis.sol[effect.var] != effect.value)
    return {};

  std::vector<VarId> candidates = interval_candidates(m, cause.var, effect.var);
  // The analysis must reference the intervened model it was built from, so
  // both live together in one holder.
  struct AlteredContext {
    CausalModel model;
    Analysis analysis;
    AlteredContext(CausalModel mm, const Context& uu)
        : model(std::move(mm)), analysis(model, uu) {}
  };
  std::map<int, std::unique_ptr<AlteredContext>> altered;
  auto altered_analysis = [&](int alt) -> Analysis& {
    auto it = altered.find(alt);
    if (it == altered.end()) {
      it = altered
               .emplace(alt, std::make_unique<AlteredContext>(
                                 m.intervene({{Literal{cause.var, alt}}}), u))
               .first;
    }
    return it->second->analysis;
  };

  for (int k = 0; k <= static_cast<int>(candidates.size()); ++k) {
    for (const auto& seq : ordered_subsets(m, candidates, k)) {
      if (!analysis.valid_chain(cause, effect, seq)) continue;
      for (int alt = 0; alt < m.domain(cause.var).size(); ++alt) {
        Analysis& counter = altered_analysis(alt);
        Literal alt_cause{cause.var, alt};
        bool all_fail = true;
        const int n = static_cast<int>(seq.size());
        for (int j = 0; j <= n && all_fail; ++j) {
          for_each_combination(n, j, [&](const std::vector<int>& ix) {
            std::vector<VarId> sub;
            sub.reserve(ix.size());
            for (int i : ix) sub.push_back(seq[i]);
            if (counter.valid_chain(alt_cause, effect, sub)) {
              all_fail = false;
              return true;
            }
            return false;
          });
        }
        if (all_fail) return {true, Path{seq}, alt};
      }
    }
  }
  return {};
}

namespace {

// The all-subsets robustness demand of the HP-style check: for every
// subset Z' of the chosen intervention and every subset S of the remaining
// variables at their actual values, [C <- c, Z' <- z', S <- s] E=e.
bool hp_demand_holds(const CausalModel& m, const Context& u, Literal cause,
                     Literal effect, const Intervention& chosen,
                     const Solution& sol) {
  std::vector<Literal> z = chosen.assignments;
  std::vector<VarId> rest;
  std::set<VarId> in_z;
  for (Literal l : z) in_z.insert(l.var);
  for (VarId v = m.exo_count(); v < m.var_count(); ++v)
    if (v != cause.var && v != effect.var && !in_z.count(v))
      rest.push_back(v);

  const size_t zn = z.size(), rn = rest.size();
  for (size_t zmask = 0; zmask < (size_t{1} << zn); ++zmask) {
    for (size_t rmask = 0; rmask < (size_t{1} << rn); ++rmask) {
      Intervention iv;
      iv.assignments.push_back(cause);
      for (size_t i = 0; i < zn; ++i)
        if (zmask & (size_t{1} << i)) iv.assignments.push_back(z[i]);
      for (size_t i = 0; i < rn; ++i)
        if (rmask & (size_t{1} << i))
          iv.assignments.push_back(Literal{rest[i], sol[rest[i]]});
      if (!m.evaluate(u, CausalFormula{iv, Formula::lit(effect)}))
        return false;
    }
  }
  return true;
}

}  // namespace

HpResult hp_cause_described(const CausalModel& m, const Context& u,
                            Literal cause, Literal effect) {
  validate_pair(m, cause, effect);
  Solution sol = m.solve(u);
  if (sol[cause.var] != cause.value || sol[effect.var] != effect.value)
    return {};

  std::vector<VarId> others;
  for (VarId v = m.exo_count(); v < m.var_count(); ++v)
    if (v != cause.var && v != effect.var) others.push_back(v);
  std::sort(others.begin(), others.end(),
            [&](VarId a, VarId b) { return m.var_name(a) < m.var_name(b); });

  const int n = static_cast<int>(others.size());
  for (int k = 0; k <= n; ++k) {
    HpResult found;
    for_each_combination(n, k, [&](const std::vector<int>& ix) {
      std::vector<VarId> zvars;
      for (int i : ix) zvars.push_back(others[i]);
      std::vector<int> digits(zvars.size(), 0);
      for (;;) {
        Intervention chosen;
        for (size_t i = 0; i < zvars.size(); ++i)
          chosen.assignments.push_back(Literal{zvars[i], digits[i]});
        CausalModel mz = m.intervene(chosen);
        if (counterfactually_depends(mz, u, cause, effect).holds &&
            hp_demand_holds(m, u, cause, effect, chosen, sol)) {
          found = {true, std::move(chosen)};
          return true;
        }
        size_t i = 0;
        for (; i < zvars.size(); ++i) {
          if (++digits[i] < m.domain(zvars[i]).size()) break;
          digits[i] = 0;
        }
        if (i == zvars.size()) return false;
      }
    });
    if (found.holds) return found;
  }
  return {};
}

// ---------------------------------------------------------------------------
// decide / replay / printing
// ---------------------------------------------------------------------------

Verdict decide(Definition d, const CausalModel& m, const Context& u,
               Literal cause, Literal effect) {
  switch (d) {
    case Definition::Cd: {
      DependenceResult r = counterfactually_depends(m, u, cause, effect);
      if (!r.holds) return {};
      CauseCertificate cert;
      cert.definition = d;
      cert.alternative = r.alternative;
      return {true, std::move(cert)};
    }
    case Definition::Suff: {
      validate_pair(m, cause, effect);
      return {sufficient(m, u, {cause}, effect), std::nullopt};
    }
    case Definition::Dness: {
      auto w = direct_ness_cause(m, u, cause, effect);
      if (!w) return {};
      CauseCertificate cert;
      cert.definition = d;
      cert.witness = std::move(w);
      return {true, std::move(cert)};
    }
    case Definition::Ness: {
      auto c = ness_cause(m, u, cause, effect);
      if (!c) return {};
      CauseCertificate cert;
      cert.definition = d;
      cert.chain = std::move(c);
      return {true, std::move(cert)};
    }
    case Definition::Bv: {
      BvResult r = bv_cause(m, u, cause, effect);
      if (!r.holds) return {};
      CauseCertificate cert;
      cert.definition = d;
      cert.chain = std::move(r.chain);
      cert.alternative = r.alternative;
      return {true, std::move(cert)};
    }
    case Definition::Cness: {
      CnessResult r = cness_cause(m, u, cause, effect);
      if (!r.holds) return {};
      CauseCertificate cert;
      cert.definition = d;
      cert.path = std::move(r.path);
      cert.alternative = r.alternative;
      return {true, std::move(cert)};
    }
    case Definition::Hp: {
      HpResult r = hp_cause_described(m, u, cause, effect);
      if (!r.holds) return {};
      CauseCertificate cert;
      cert.definition = d;
      cert.intervention = std::move(r.intervention);
      return {true, std::move(cert)};
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown definition");
}

bool replay(const CausalModel& m, const Context& u, Literal cause,
            Literal effect, const CauseCertificate& cert) {
  validate_pair(m, cause, effect);
  switch (cert.definition) {
    case Definition::Cd: {
      if (!cert.alternative) return false;
      Solution sol = m.solve(u);
      if (sol[cause.var] != cause.value || sol[effect.var] != effect.value)
        return false;
      CausalFormula f{Intervention{{Literal{cause.var, *cert.alternative}}},
                      Formula::negation(Formula::lit(effect))};
      return m.evaluate(u, f);
    }
    case Definition::Suff:
      return sufficient(m, u, {cause}, effect);
    case Definition::Dness: {
      if (!cert.witness) return false;
      Solution sol = m.solve(u);
      if (sol[cause.var] != cause.value || sol[effect.var] != effect.value)
        return false;
      AssignmentSet with_cause = {cause};
      AssignmentSet without_cause;
      for (Literal l : cert.witness->literals) {
        if (l.var == cause.var || l.var == effect.var) return false;
        if (sol[l.var] != l.value) return false;  // bullet (i)
        with_cause.push_back(l);
        without_cause.push_back(l);
      }
      return sufficient(m, u, with_cause, effect) &&
             !sufficient(m, u, without_cause, effect);
    }
    case Definition::Ness: {
      if (!cert.chain) return false;
      Path p;
      for (Literal l : cert.chain->links) p.variables.push_back(l.var);
      auto got = ness_cause_along_path(m, u, cause, effect, p);
      return got && *got == *cert.chain;
    }
    case Definition::Bv: {
      if (!cert.chain || !cert.alternative) return false;
      Path p;
      for (Literal l : cert.chain->links) p.variables.push_back(l.var);
      auto got = ness_cause_along_path(m, u, cause, effect, p);
      if (!got || !(*got == *cert.chain)) return false;
      Literal alt_cause{cause.var, *cert.alternative};
      CausalModel altered = m.intervene({{alt_cause}});
      return !ness_cause(altered, u, alt_cause, effect);
    }
    case Definition::Cness: {
      if (!cert.path || !cert.alternative) return false;
      if (!ness_cause_along_path(m, u, cause, effect, *cert.path))
        return false;
      Literal alt_cause{cause.var, *cert.alternative};
      CausalModel altered = m.intervene({{alt_cause}});
      const auto& vars = cert.path->variables;
      const int n = static_cast<int>(vars.size());
      for (int k = 0; k <= n; ++k) {
        bool hit = for_each_combination(n, k, [&](const std::vector<int>& ix) {
          Path sub;
          for (int i : ix) sub.variables.push_back(vars[i]);
          return ness_cause_along_path(altered, u, alt_cause, effect, sub)
              .has_value();
        });
        if (hit) return false;
      }
      return true;
    }
    case Definition::Hp: {
      if (!cert.intervention) return false;
      Solution sol = m.solve(u);
      if (sol[cause.var] != cause.value || sol[effect.var] != effect.value)
        return false;
      for (Literal l : cert.intervention->assignments)
        if (l.var == cause.var || l.var == effect.var) return false;
      CausalModel mz = m.intervene(*cert.intervention);
      return counterfactually_depends(mz, u, cause, effect).holds &&
             hp_demand_holds(m, u, cause, effect, *cert.intervention, sol);
    }
  }
  return false;
}

std::string certificate_string(const CausalModel& m, Literal cause,
                               const CauseCertificate& cert) {
  auto lits = [&](const std::vector<Literal>& ls, char open, char close) {
    std::string out(1, open);
    for (size_t i = 0; i < ls.size(); ++i) {
      if (i > 0) out += ", ";
      out += m.lit_string(ls[i]);
    }
    out += close;
    return out;
  };
  auto alt_token = [&]() {
    return m.domain(cause.var).token(*cert.alternative);
  };
  switch (cert.definition) {
    case Definition::Cd:
      return "c' = " + alt_token();
    case Definition::Suff:
      return "";
    case Definition::Dness:
      return "witness = " + lits(cert.witness->literals, '{', '}');
    case Definition::Ness:
      return "chain = " + lits(cert.chain->links, '(', ')');
    case Definition::Bv:
      return "chain = " + lits(cert.chain->links, '(', ')') +
             ", c' = " + alt_token();
    case Definition::Cness: {
      std::string path = "(";
      const auto& vars = cert.path->variables;
      for (size_t i = 0; i < vars.size(); ++i) {
        if (i > 0) path += ", ";
        path += m.var_name(vars[i]);
      }
      path += ")";
      return "path = " + path + ", c' = " + alt_token();
    }
    case Definition::Hp: {
      std::string iv = "[";
      const auto& as = cert.intervention->assignments;
      for (size_t i = 0; i < as.size(); ++i) {
        if (i > 0) iv += ", ";
        iv += m.var_name(as[i].var) + "<-" +
              m.domain(as[i].var).token(as[i].value);
      }
      iv += "]";
      return "intervention = " + iv;
    }
  }
  return "";
}

}  // namespace acause
