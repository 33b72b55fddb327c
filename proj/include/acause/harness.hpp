#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acause/causation.hpp"
#include "acause/lang.hpp"
#include "acause/model.hpp"
#include "json.hpp"

// Randomized verification harness: a deterministic model generator,
// whole-model verdict matrices with built-in cross-definition invariants,
// reference re-implementations of the searches, property sweeps over
// seeded model families, and the canonical-corpus runner.

namespace acause {

// ---------------------------------------------------------------------------
// Deterministic model generation
// ---------------------------------------------------------------------------

// Identical configs produce identical instances on every platform: draws
// come from a fixed-seed mt19937_64 through rejection sampling only (no
// std::uniform_int_distribution, whose mapping is implementation-defined).
// Changing any field changes the whole draw sequence.
struct GeneratorConfig {
  std::uint64_t seed = 0;
  int n_exogenous = 2;   // 0..4, named U1..
  int n_endogenous = 6;  // 1..8, named V1..
  int max_parents = 3;   // 0..4
  int domain_size = 2;   // 2..4, tokens "0", "1", ...
};

struct GeneratedInstance {
  CausalModel model;
  Context context;
};

// Parents of V_i are drawn from the exogenous variables and V_1..V_{i-1},
// so the declaration order is already topological. Mechanisms are random
// case tables over the full parent assignment space; contexts are uniform.
GeneratedInstance generate_model(const GeneratorConfig& config);

// Wraps an instance as a one-model, one-context document for printing and
// round-trip checks.
ModelDocument instance_document(const GeneratedInstance& instance,
                                const std::string& model_name,
                                const std::string& context_name);

// ---------------------------------------------------------------------------
// Reference searches and structural checks
// ---------------------------------------------------------------------------

// Witness search enumerating subsets of ALL endogenous variables other
// than the endpoints, with sufficiency decided by the interventional
// enumeration. Slow; exists to cross-check direct_ness_cause, and must
// return the identical witness.
std::optional<Witness> direct_ness_reference(const CausalModel& m,
                                             const Context& u, Literal cause,
                                             Literal effect);

// First intervention [Z <- z] on endogenous variables other than the
// endpoints under which E=e counterfactually depends on C=c, searched by
// subset size, then variable names, then values. nullopt when no
// intervention produces dependence.
std::optional<Intervention> exists_dependence_under_intervention(
    const CausalModel& m, const Context& u, Literal cause, Literal effect);

// Checks, over every ordered pair of distinct endogenous variables and
// every pair of candidate values (c, e), the biconditional: E=e
// counterfactually depends on C=c iff C=c is a NESS cause of E=e and for
// some alternative c' and some e' != e, C=c' is a NESS cause of E=e' in
// (M_{C<-c'}, u). Returns a description of the first violation, or
// nullopt when the biconditional holds everywhere.
std::optional<std::string> check_theorem_2(const CausalModel& m,
                                           const Context& u);

// Rebuilds every mechanism in a syntactically different but pointwise
// identical form. Variant 0 compiles each mechanism to an exhaustive case
// table over its extensional parents; variant 1 dualizes the boolean
// connectives (double negation, De Morgan) in the original expressions,
// which is valid for models whose bare-name operands are boolean. The
// result always satisfies extensionally_equal with the input.
CausalModel rewrite_extensionally_equal(const CausalModel& m,
                                        int variant = 0);

// ---------------------------------------------------------------------------
// Verdict matrices
// ---------------------------------------------------------------------------

struct VerdictRow {
  Literal cause;
  Literal effect;
  std::map<Definition, Verdict> verdicts;
};

// invariant_violations collects, per row: positive verdicts missing or
// failing certificate replay; holds(dness|bv|cness) without holds(ness);
// holds(cd) without holds(ness & bv & cness); and a certified alternative
// c' of bv or cness under which {C=c'} is still sufficient for E=e in
// (M_{C<-c'}, u).
struct VerdictMatrix {
  std::vector<VerdictRow> rows;
  std::vector<std::string> invariant_violations;
};

// One row per ordered pair of distinct endogenous variables, both taken
// at their solution values. with_hp=false skips the hp column, which
// dominates runtime on larger models.
VerdictMatrix verdict_matrix(const CausalModel& m, const Context& u,
                             bool with_hp = true);

// Stable JSON rendering of one verdict: false when negative, true when
// positive without payload (suff), otherwise an object carrying the
// certificate fields as display strings.
nlohmann::json verdict_to_json(const CausalModel& m, Literal cause,
                               const Verdict& v);

// Stable JSON rendering, used verbatim as the golden format: an object
// keyed "C=c -> E=e", each value an object keyed by definition name with
// verdict_to_json values.
nlohmann::json matrix_to_json(const CausalModel& m, const VerdictMatrix& mat);

// ---------------------------------------------------------------------------
// Canonical corpus
// ---------------------------------------------------------------------------

struct CorpusReport {
  int files = 0;    // *.scm.txt documents parsed
  int entries = 0;  // matrix rows compared against goldens
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Runs every *.scm.txt document in the directory: for each context block,
// computes the full verdict matrix of its model and compares the JSON
// rendering against <doc-stem>.<context>.golden.json, requiring exact
// equality. Orphan goldens and matrix invariant violations are failures.
// Throws Error{CorpusMissing} when the directory holds no documents.
CorpusReport run_corpus(const std::string& dir);

// ---------------------------------------------------------------------------
// Property sweep
// ---------------------------------------------------------------------------

struct SweepConfig {
  std::uint64_t seed_begin = 0;
  std::uint64_t seed_count = 100;
  GeneratorConfig base;  // seed field overridden per instance
  bool with_hp = false;
  int sufficiency_samples = 10;  // random (set, effect) draws per model
};

struct SweepReport {
  long long models = 0;
  long long matrix_rows = 0;
  long long replay_checks = 0;
  long long theorem2_models = 0;
  long long sufficiency_checks = 0;
  long long witness_checks = 0;
  long long roundtrip_docs = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// For every seed in [seed_begin, seed_begin + seed_count): generates an
// instance, computes the verdict matrix with its row invariants, replays
// every certificate, checks the dependence/NESS biconditional, compares
// the two sufficiency procedures on random assignment sets, compares the
// witness search against the reference search on every ordered pair, and
// round-trips the printed document.
SweepReport run_property_sweep(const SweepConfig& config);

}  // namespace acause
