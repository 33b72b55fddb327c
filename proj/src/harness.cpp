#include "acause/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace acause {

namespace {

// ---------------------------------------------------------------------------
// Platform-neutral uniform draws
// ---------------------------------------------------------------------------

// mt19937_64 output is fixed by the standard; the rejection loop below is
// the only mapping we apply, so sequences agree across implementations.
struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}

  // Uniform over [0, n), n >= 1.
  int bounded(int n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod n
    for (;;) {
      std::uint64_t x = engine();
      if (x >= threshold) return static_cast<int>(x % bound);
    }
  }
};

void require_range(int value, int lo, int hi, const char* what) {
  if (value < lo || value > hi)
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " must be in [" + std::to_string(lo) +
                    ", " + std::to_string(hi) + "], got " +
                    std::to_string(value));
}

// Lexicographic k-subsets of {0..n-1}; fn returns false to stop early.
// Returns false iff stopped.
bool combinations(int n, int k, const std::function<bool(const std::vector<int>&)>& fn) {
  std::vector<int> ix(k);
  std::iota(ix.begin(), ix.end(), 0);
  if (k > n) return true;
  for (;;) {
    if (!fn(ix)) return false;
    int i = k - 1;
    while (i >= 0 && ix[i] == n - k + i) --i;
    if (i < 0) return true;
    ++ix[i];
    for (int j = i + 1; j < k; ++j) ix[j] = ix[j - 1] + 1;
  }
}

std::vector<VarId> name_sorted(const CausalModel& m, std::vector<VarId> vars) {
  std::sort(vars.begin(), vars.end(), [&](VarId a, VarId b) {
    return m.var_name(a) < m.var_name(b);
  });
  return vars;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument,
                       "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

GeneratedInstance generate_model(const GeneratorConfig& config) {
  require_range(config.n_exogenous, 0, 4, "n_exogenous");
  require_range(config.n_endogenous, 1, 8, "n_endogenous");
  require_range(config.max_parents, 0, 4, "max_parents");
  require_range(config.domain_size, 2, 4, "domain_size");

  Rng rng(config.seed);
  Domain domain;
  for (int i = 0; i < config.domain_size; ++i)
    domain.values.push_back(std::to_string(i));

  Signature sig;
  std::vector<std::string> names;  // by VarId
  for (int i = 0; i < config.n_exogenous; ++i) {
    sig.exogenous.push_back({"U" + std::to_string(i + 1), domain});
    names.push_back(sig.exogenous.back().name);
  }
  std::vector<Mechanism> mechanisms;
  for (int i = 0; i < config.n_endogenous; ++i) {
    std::string name = "V" + std::to_string(i + 1);
    sig.endogenous.push_back({name, domain});

    const int pool_size = config.n_exogenous + i;
    std::vector<int> pool(pool_size);
    std::iota(pool.begin(), pool.end(), 0);
    const int k = rng.bounded(std::min(config.max_parents, pool_size) + 1);
    for (int j = 0; j < k; ++j) {
      int t = j + rng.bounded(pool_size - j);
      std::swap(pool[j], pool[t]);
    }
    std::vector<int> parents(pool.begin(), pool.begin() + k);
    std::sort(parents.begin(), parents.end());

    ExprPtr expr;
    if (k == 0) {
      expr = Expr::constant(domain.token(rng.bounded(config.domain_size)));
    } else {
      // One arm per parent assignment, last digit fastest; the final row
      // becomes the else branch.
      const int d = config.domain_size;
      long long rows = 1;
      for (int j = 0; j < k; ++j) rows *= d;
      std::vector<int> digits(k, 0);
      std::vector<Expr::CaseArm> arms;
      std::string else_value;
      for (long long r = 0; r < rows; ++r) {
        std::string value = domain.token(rng.bounded(d));
        if (r + 1 == rows) {
          else_value = value;
          break;
        }
        std::vector<ExprPtr> conj;
        for (int j = 0; j < k; ++j)
          conj.push_back(Expr::eq(names[parents[j]], domain.token(digits[j])));
        arms.push_back({Expr::conjunction(std::move(conj)), value});
        for (int j = k - 1; j >= 0; --j) {
          if (++digits[j] < d) break;
          digits[j] = 0;
        }
      }
      expr = Expr::table(std::move(arms), std::move(else_value));
    }
    mechanisms.push_back({name, std::move(expr)});
    names.push_back(name);
  }

  Context u;
  for (int i = 0; i < config.n_exogenous; ++i)
    u.values.push_back(rng.bounded(config.domain_size));

  return {CausalModel::create(std::move(sig), std::move(mechanisms)),
          std::move(u)};
}

ModelDocument instance_document(const GeneratedInstance& instance,
                                const std::string& model_name,
                                const std::string& context_name) {
  ModelDocument doc;
  doc.models.push_back({model_name, instance.model});
  doc.contexts.push_back({context_name, model_name, instance.context});
  return doc;
}

// ---------------------------------------------------------------------------
// Reference searches
// ---------------------------------------------------------------------------

std::optional<Witness> direct_ness_reference(const CausalModel& m,
                                             const Context& u, Literal cause,
                                             Literal effect) {
  m.check_endogenous_literal(cause);
  m.check_endogenous_literal(effect);
  if (cause.var == effect.var)
    throw Error(ErrorCode::SelfCause, "cause and effect share a variable");
  Solution sol = m.solve(u);
  if (!m.holds(sol, cause) || !m.holds(sol, effect)) return std::nullopt;

  std::vector<VarId> cand;
  for (VarId v = m.exo_count(); v < m.var_count(); ++v)
    if (v != cause.var && v != effect.var) cand.push_back(v);
  cand = name_sorted(m, std::move(cand));

  std::optional<Witness> found;
  for (int k = 0; k <= static_cast<int>(cand.size()) && !found; ++k) {
    combinations(static_cast<int>(cand.size()), k,
                 [&](const std::vector<int>& ix) {
                   Witness w;
                   for (int i : ix)
                     w.literals.push_back({cand[i], sol[cand[i]]});
                   AssignmentSet with_cause = w.literals;
                   with_cause.insert(with_cause.begin(), cause);
                   if (sufficient_interventional(m, u, with_cause, effect) &&
                       !sufficient_interventional(m, u, w.literals, effect)) {
                     found = std::move(w);
                     return false;
                   }
                   return true;
                 });
  }
  return found;
}

std::optional<Intervention> exists_dependence_under_intervention(
    const CausalModel& m, const Context& u, Literal cause, Literal effect) {
  m.check_endogenous_literal(cause);
  m.check_endogenous_literal(effect);
  if (cause.var == effect.var)
    throw Error(ErrorCode::SelfCause, "cause and effect share a variable");

  std::vector<VarId> cand;
  for (VarId v = m.exo_count(); v < m.var_count(); ++v)
    if (v != cause.var && v != effect.var) cand.push_back(v);
  cand = name_sorted(m, std::move(cand));

  std::optional<Intervention> found;
  for (int k = 0; k <= static_cast<int>(cand.size()) && !found; ++k) {
    combinations(static_cast<int>(cand.size()), k,
                 [&](const std::vector<int>& ix) {
                   std::vector<int> digits(ix.size(), 0);
                   for (;;) {
                     Intervention iv;
                     for (size_t j = 0; j < ix.size(); ++j)
                       iv.assignments.push_back({cand[ix[j]], digits[j]});
                     CausalModel altered = m.intervene(iv);
                     if (counterfactually_depends(altered, u, cause, effect)
                             .holds) {
                       found = std::move(iv);
                       return false;
                     }
                     size_t j = 0;
                     while (j < digits.size()) {
                       if (++digits[j] < m.domain(cand[ix[j]]).size()) break;
                       digits[j] = 0;
                       ++j;
                     }
                     if (j == digits.size()) return true;
                   }
                 });
  }
  return found;
}

std::optional<std::string> check_theorem_2(const CausalModel& m,
                                           const Context& u) {
  for (VarId c = m.exo_count(); c < m.var_count(); ++c) {
    for (VarId e = m.exo_count(); e < m.var_count(); ++e) {
      if (c == e) continue;
      for (int cv = 0; cv < m.domain(c).size(); ++cv) {
        for (int ev = 0; ev < m.domain(e).size(); ++ev) {
          Literal cause{c, cv};
          Literal effect{e, ev};
          bool lhs = counterfactually_depends(m, u, cause, effect).holds;
          bool rhs = false;
          if (ness_cause(m, u, cause, effect)) {
            for (int alt = 0; alt < m.domain(c).size() && !rhs; ++alt) {
              CausalModel altered =
                  m.intervene(Intervention{{Literal{c, alt}}});
              for (int ev2 = 0; ev2 < m.domain(e).size() && !rhs; ++ev2) {
                if (ev2 == ev) continue;
                if (ness_cause(altered, u, Literal{c, alt}, Literal{e, ev2}))
                  rhs = true;
              }
            }
          }
          if (lhs != rhs)
            return "dependence/NESS biconditional fails for " +
                   m.lit_string(cause) + " -> " + m.lit_string(effect) +
                   ": dependence=" + (lhs ? "true" : "false") +
                   " two-model NESS=" + (rhs ? "true" : "false");
        }
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Extensionally equal rewrites
// ---------------------------------------------------------------------------

namespace {

ExprPtr table_form(const CausalModel& m, VarId v) {
  const MechanismTable& t = m.table(v);
  const int k = static_cast<int>(t.parents.size());
  if (k == 0)
    return Expr::table({}, m.domain(v).token(t.values[0]));
  std::vector<int> digits(k, 0);
  std::vector<Expr::CaseArm> arms;
  const long long rows = static_cast<long long>(t.values.size());
  for (long long r = 0; r < rows; ++r) {
    std::string value = m.domain(v).token(t.lookup(digits));
    if (r + 1 == rows)
      return Expr::table(std::move(arms), std::move(value));
    std::vector<ExprPtr> conj;
    for (int j = 0; j < k; ++j)
      conj.push_back(Expr::eq(m.var_name(t.parents[j]),
                              m.domain(t.parents[j]).token(digits[j])));
    arms.push_back({Expr::conjunction(std::move(conj)), value});
    for (int j = k - 1; j >= 0; --j) {
      if (++digits[j] < t.radices[j]) break;
      digits[j] = 0;
    }
  }
  return nullptr;  // unreachable: rows >= 1
}

ExprPtr dualize(const CausalModel& m, const ExprPtr& e, bool output_pos) {
  switch (e->kind) {
    case Expr::Kind::Constant:
      return output_pos ? Expr::table({}, e->name)
                        : Expr::negation(Expr::negation(e));
    case Expr::Kind::Var:
    case Expr::Kind::Ident: {
      auto v = m.find_var(e->name);
      if (v && m.domain(*v).is_boolean())
        return Expr::negation(Expr::negation(e));
      if (!v && output_pos) return Expr::table({}, e->name);
      return e;
    }
    case Expr::Kind::Eq:
      return Expr::negation(Expr::negation(e));
    case Expr::Kind::Not:
      return Expr::negation(dualize(m, e->operands[0], false));
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      std::vector<ExprPtr> duals;
      for (const ExprPtr& op : e->operands)
        duals.push_back(Expr::negation(dualize(m, op, false)));
      return Expr::negation(e->kind == Expr::Kind::And
                                ? Expr::disjunction(std::move(duals))
                                : Expr::conjunction(std::move(duals)));
    }
    case Expr::Kind::Case: {
      std::vector<Expr::CaseArm> arms;
      for (const auto& arm : e->arms)
        arms.push_back({dualize(m, arm.condition, false), arm.value});
      return Expr::table(std::move(arms), e->else_value);
    }
  }
  return e;
}

}  // namespace

CausalModel rewrite_extensionally_equal(const CausalModel& m, int variant) {
  require_range(variant, 0, 1, "variant");
  Signature sig;
  for (VarId v = 0; v < m.exo_count(); ++v)
    sig.exogenous.push_back({m.var_name(v), m.domain(v)});
  std::vector<Mechanism> mechanisms;
  for (VarId v = m.exo_count(); v < m.var_count(); ++v) {
    sig.endogenous.push_back({m.var_name(v), m.domain(v)});
    ExprPtr expr = variant == 0 ? table_form(m, v)
                                : dualize(m, m.mechanism_expr(v), true);
    mechanisms.push_back({m.var_name(v), std::move(expr)});
  }
  return CausalModel::create(std::move(sig), std::move(mechanisms));
}

// ---------------------------------------------------------------------------
// Verdict matrices
// ---------------------------------------------------------------------------

VerdictMatrix verdict_matrix(const CausalModel& m, const Context& u,
                             bool with_hp) {
  VerdictMatrix out;
  Solution sol = m.solve(u);
  for (VarId c = m.exo_count(); c < m.var_count(); ++c) {
    for (VarId e = m.exo_count(); e < m.var_count(); ++e) {
      if (c == e) continue;
      VerdictRow row;
      row.cause = {c, sol[c]};
      row.effect = {e, sol[e]};
      for (Definition d : all_definitions()) {
        if (d == Definition::Hp && !with_hp) continue;
        row.verdicts[d] = decide(d, m, u, row.cause, row.effect);
      }

      const std::string row_name =
          m.lit_string(row.cause) + " -> " + m.lit_string(row.effect);
      auto holds = [&](Definition d) {
        auto it = row.verdicts.find(d);
        return it != row.verdicts.end() && it->second.holds;
      };
      auto violation = [&](const std::string& text) {
        out.invariant_violations.push_back(row_name + ": " + text);
      };
      if (holds(Definition::Dness) && !holds(Definition::Ness))
        violation("dness holds without ness");
      if (holds(Definition::Bv) && !holds(Definition::Ness))
        violation("bv holds without ness");
      if (holds(Definition::Cness) && !holds(Definition::Ness))
        violation("cness holds without ness");
      if (holds(Definition::Cd) &&
          !(holds(Definition::Ness) && holds(Definition::Bv) &&
            holds(Definition::Cness)))
        violation("cd holds without ness, bv, and cness");
      for (const auto& [d, v] : row.verdicts) {
        if (!v.holds || d == Definition::Suff) continue;
        if (!v.certificate) {
          violation(std::string(to_string(d)) +
                    " positive verdict carries no certificate");
        } else if (!replay(m, u, row.cause, row.effect, *v.certificate)) {
          violation(std::string(to_string(d)) + " certificate fails replay");
        }
      }
      for (Definition d : {Definition::Bv, Definition::Cness}) {
        if (!holds(d)) continue;
        const auto& cert = row.verdicts.at(d).certificate;
        if (!cert || !cert->alternative) continue;
        Literal alt{c, *cert->alternative};
        CausalModel altered = m.intervene(Intervention{{alt}});
        if (sufficient(altered, u, {alt}, row.effect))
          violation(std::string(to_string(d)) +
                    " alternative leaves the cause sufficient");
      }
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

nlohmann::json verdict_to_json(const CausalModel& m, Literal cause,
                               const Verdict& v) {
  if (!v.holds) return false;
  if (!v.certificate) return true;
  const CauseCertificate& c = *v.certificate;
  nlohmann::json cell = nlohmann::json::object();
  if (c.alternative)
    cell["alternative"] = m.domain(cause.var).token(*c.alternative);
  if (c.witness) {
    nlohmann::json arr = nlohmann::json::array();
    for (Literal l : c.witness->literals) arr.push_back(m.lit_string(l));
    cell["witness"] = std::move(arr);
  }
  if (c.chain) {
    nlohmann::json arr = nlohmann::json::array();
    for (Literal l : c.chain->links) arr.push_back(m.lit_string(l));
    cell["chain"] = std::move(arr);
  }
  if (c.path) {
    nlohmann::json arr = nlohmann::json::array();
    for (VarId v2 : c.path->variables) arr.push_back(m.var_name(v2));
    cell["path"] = std::move(arr);
  }
  if (c.intervention) {
    nlohmann::json arr = nlohmann::json::array();
    for (Literal l : c.intervention->assignments)
      arr.push_back(m.var_name(l.var) + "<-" +
                    m.domain(l.var).token(l.value));
    cell["intervention"] = std::move(arr);
  }
  return cell;
}

nlohmann::json matrix_to_json(const CausalModel& m, const VerdictMatrix& mat) {
  nlohmann::json root = nlohmann::json::object();
  for (const VerdictRow& row : mat.rows) {
    nlohmann::json cells = nlohmann::json::object();
    for (const auto& [d, v] : row.verdicts)
      cells[std::string(to_string(d))] = verdict_to_json(m, row.cause, v);
    root[m.lit_string(row.cause) + " -> " + m.lit_string(row.effect)] =
        std::move(cells);
  }
  return root;
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

CorpusReport run_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  CorpusReport report;
  std::vector<fs::path> docs;
  std::set<fs::path> goldens;
  if (fs::exists(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (name.ends_with(".scm.txt")) docs.push_back(entry.path());
      if (name.ends_with(".golden.json")) goldens.insert(entry.path());
    }
  }
  std::sort(docs.begin(), docs.end());
  if (docs.empty())
    throw Error(ErrorCode::CorpusMissing,
                "no *.scm.txt documents under " + dir);

  for (const fs::path& path : docs) {
    ++report.files;
    const std::string filename = path.filename().string();
    const std::string stem =
        filename.substr(0, filename.size() - std::string(".scm.txt").size());
    ParseResult pr;
    try {
      pr = parse_document(read_file(path));
    } catch (const Error& err) {
      report.failures.push_back(filename + ": " + err.what());
      continue;
    }
    if (!pr.ok()) {
      for (const Diagnostic& d : pr.diagnostics)
        report.failures.push_back(format_diagnostic(d, filename));
      continue;
    }
    for (const NamedContext& nc : pr.document->contexts) {
      const std::string label = stem + "." + nc.name;
      const NamedModel* nm = pr.document->find_model(nc.model);
      VerdictMatrix matrix = verdict_matrix(nm->model, nc.values, true);
      for (const std::string& v : matrix.invariant_violations)
        report.failures.push_back(label + ": " + v);
      nlohmann::json computed = matrix_to_json(nm->model, matrix);

      fs::path golden_path = path.parent_path() / (label + ".golden.json");
      if (!fs::exists(golden_path)) {
        report.failures.push_back(label + ": missing golden " +
                                  golden_path.filename().string());
        continue;
      }
      goldens.erase(golden_path);
      nlohmann::json golden;
      try {
        golden = nlohmann::json::parse(read_file(golden_path));
      } catch (const std::exception& err) {
        report.failures.push_back(label + ": unreadable golden: " +
                                  err.what());
        continue;
      }
      for (const auto& [key, value] : computed.items()) {
        ++report.entries;
        if (!golden.contains(key)) {
          report.failures.push_back(label + ": row '" + key +
                                    "' missing from golden");
        } else if (golden[key] != value) {
          report.failures.push_back(label + ": row '" + key + "': golden " +
                                    golden[key].dump() + ", computed " +
                                    value.dump());
        }
      }
      for (const auto& [key, value] : golden.items()) {
        (void)value;
        if (!computed.contains(key))
          report.failures.push_back(label + ": golden row '" + key +
                                    "' not produced");
      }
    }
  }
  for (const fs::path& orphan : goldens)
    report.failures.push_back("orphan golden: " +
                              orphan.filename().string());
  return report;
}

// ---------------------------------------------------------------------------
// Property sweep
// ---------------------------------------------------------------------------

SweepReport run_property_sweep(const SweepConfig& config) {
  SweepReport report;
  for (std::uint64_t i = 0; i < config.seed_count; ++i) {
    const std::uint64_t seed = config.seed_begin + i;
    const std::string tag = "seed " + std::to_string(seed) + ": ";
    try {
      GeneratorConfig gc = config.base;
      gc.seed = seed;
      GeneratedInstance inst = generate_model(gc);
      const CausalModel& m = inst.model;
      const Context& u = inst.context;
      ++report.models;

      VerdictMatrix matrix = verdict_matrix(m, u, config.with_hp);
      report.matrix_rows += static_cast<long long>(matrix.rows.size());
      for (const std::string& v : matrix.invariant_violations)
        report.violations.push_back(tag + v);
      for (const VerdictRow& row : matrix.rows)
        for (const auto& [d, v] : row.verdicts) {
          (void)d;
          if (v.holds && v.certificate) ++report.replay_checks;
        }

      if (auto violation = check_theorem_2(m, u))
        report.violations.push_back(tag + *violation);
      ++report.theorem2_models;

      Rng rng2(seed * 0x9E3779B97F4A7C15ull + 1);
      for (int s = 0; s < config.sufficiency_samples; ++s) {
        VarId effect_var = m.exo_count() + rng2.bounded(m.endo_count());
        Literal effect{effect_var, rng2.bounded(m.domain(effect_var).size())};
        std::vector<VarId> pool;
        for (VarId v = m.exo_count(); v < m.var_count(); ++v)
          if (v != effect_var) pool.push_back(v);
        int k = pool.empty()
                    ? 0
                    : rng2.bounded(static_cast<int>(pool.size()) + 1);
        for (int j = 0; j < k; ++j) {
          int t = j + rng2.bounded(static_cast<int>(pool.size()) - j);
          std::swap(pool[j], pool[t]);
        }
        AssignmentSet set;
        for (int j = 0; j < k; ++j)
          set.push_back({pool[j], rng2.bounded(m.domain(pool[j]).size())});
        bool direct = sufficient(m, u, set, effect);
        bool interventional = sufficient_interventional(m, u, set, effect);
        ++report.sufficiency_checks;
        if (direct != interventional) {
          std::string detail = tag + "sufficiency procedures disagree for {";
          for (size_t j = 0; j < set.size(); ++j)
            detail += (j ? ", " : "") + m.lit_string(set[j]);
          detail += "} -> " + m.lit_string(effect) + ": direct=" +
                    (direct ? "true" : "false") + " interventional=" +
                    (interventional ? "true" : "false");
          report.violations.push_back(detail);
        }
      }

      Solution sol = m.solve(u);
      for (VarId c = m.exo_count(); c < m.var_count(); ++c)
        for (VarId e = m.exo_count(); e < m.var_count(); ++e) {
          if (c == e) continue;
          Literal cause{c, sol[c]};
          Literal effect{e, sol[e]};
          auto fast = direct_ness_cause(m, u, cause, effect);
          auto slow = direct_ness_reference(m, u, cause, effect);
          ++report.witness_checks;
          if (fast != slow)
            report.violations.push_back(
                tag + "witness searches disagree for " + m.lit_string(cause) +
                " -> " + m.lit_string(effect));
        }

      ModelDocument doc = instance_document(inst, "m", "u");
      std::string text = print_document(doc);
      ParseResult pr = parse_document(text);
      ++report.roundtrip_docs;
      if (!pr.ok()) {
        report.violations.push_back(tag +
                                    "printed document fails to parse back");
      } else {
        if (print_document(*pr.document) != text)
          report.violations.push_back(tag + "print is not a fixpoint");
        if (!documents_equal(doc, *pr.document))
          report.violations.push_back(tag +
                                      "round-trip changes the document");
      }
    } catch (const std::exception& err) {
      report.violations.push_back(tag + "exception: " + err.what());
    }
  }
  return report;
}

}  // namespace acause
