#pragma once

#include <optional>
#include <string>
#include <vector>

#include "acause/model.hpp"

// Actual-causation definitions over a validated model and context:
// counterfactual dependence, sufficiency, direct NESS, NESS, BV, CNESS,
// and the HP-style intervention check. Every positive verdict carries a
// machine-checkable certificate that replays through the defining
// operations.

namespace acause {

enum class Definition { Cd, Suff, Dness, Ness, Bv, Cness, Hp };

const std::vector<Definition>& all_definitions();
std::string_view to_string(Definition d);
std::optional<Definition> definition_from_string(std::string_view name);

// Witness set for direct NESS: endogenous literals at their actual values,
// excluding the cause and effect variables, sorted by variable name.
struct Witness {
  std::vector<Literal> literals;
  bool operator==(const Witness&) const = default;
};

// Intermediate links of a direct-NESS chain from cause to effect, in chain
// order, at their actual values in the examined model. Empty means the
// cause reaches the effect directly.
struct Chain {
  std::vector<Literal> links;
  bool operator==(const Chain&) const = default;
};

// Intermediate variables of a candidate chain, in chain order.
struct Path {
  std::vector<VarId> variables;
  bool operator==(const Path&) const = default;
};

struct DependenceResult {
  bool holds = false;
  std::optional<int> alternative;  // first c' in declaration order
};

struct BvResult {
  bool holds = false;
  std::optional<Chain> chain;      // NESS chain in (M, u)
  std::optional<int> alternative;  // c' defeating NESS in (M_{C<-c'}, u)
};

struct CnessResult {
  bool holds = false;
  std::optional<Path> path;
  std::optional<int> alternative;
};

struct HpResult {
  bool holds = false;
  std::optional<Intervention> intervention;
};

// (M, u) |= C=c and E=e, and [C <- c'] not(E=e) for some c'.
DependenceResult counterfactually_depends(const CausalModel& m,
                                          const Context& u, Literal cause,
                                          Literal effect);

// X=x is sufficient for E=e: every setting of the endogenous variables
// other than E that agrees with X=x makes the mechanism of E produce e,
// with exogenous variables held at u. Enumerates only completions of the
// parents of E not fixed by `set`.
bool sufficient(const CausalModel& m, const Context& u,
                const AssignmentSet& set, Literal effect);

// Same predicate through interventions: for every setting y of
// Y = V - (X u {E}),  (M, u) |= [X <- x, Y <- y] E=e. Kept as a fully
// independent enumeration for cross-checking.
bool sufficient_interventional(const CausalModel& m, const Context& u,
                               const AssignmentSet& set, Literal effect);

// Searches witness sets W within the endogenous parents of the effect:
// (i) C=c and W=w hold actually, (ii) {C=c} u W=w is sufficient for E=e,
// (iii) W=w alone is not. Returns the first minimal witness (smallest
// size, then lexicographic by variable name).
std::optional<Witness> direct_ness_cause(const CausalModel& m,
                                         const Context& u, Literal cause,
                                         Literal effect);

// Chain of direct NESS causes from C=c to E=e. Returns a shortest chain,
// ties broken lexicographically by variable name sequence.
std::optional<Chain> ness_cause(const CausalModel& m, const Context& u,
                                Literal cause, Literal effect);

// The chain restricted to exactly the given intermediate variables, which
// take their solution values. Returns the chain iff every link is a
// direct NESS step.
std::optional<Chain> ness_cause_along_path(const CausalModel& m,
                                           const Context& u, Literal cause,
                                           Literal effect, const Path& path);

// NESS in (M, u) plus some c' whose setting defeats NESS of C=c' for E=e
// in (M_{C<-c'}, u).
BvResult bv_cause(const CausalModel& m, const Context& u, Literal cause,
                  Literal effect);

// Some path p carrying NESS in (M, u) such that for some c', C=c' is not a
// NESS cause of E=e along any subpath of p in (M_{C<-c'}, u). Subpaths are
// the subsets of p's variables in topological order, including the empty
// path and p itself.
CnessResult cness_cause(const CausalModel& m, const Context& u, Literal cause,
                        Literal effect);

// HP-style check: actuality of C=c and E=e, plus an intervention Z <- z on
// variables other than C and E that makes E=e counterfactually depend on
// C=c, such that [C <- c, Z' <- z|Z', S <- actual] E=e holds for every
// subset Z' of Z and every subset S of the remaining variables.
HpResult hp_cause_described(const CausalModel& m, const Context& u,
                            Literal cause, Literal effect);

// ---------------------------------------------------------------------------
// Uniform verdicts and certificates
// ---------------------------------------------------------------------------

struct CauseCertificate {
  Definition definition = Definition::Cd;
  std::optional<int> alternative;          // cd, bv, cness
  std::optional<Witness> witness;          // dness
  std::optional<Chain> chain;              // ness, bv
  std::optional<Path> path;                // cness
  std::optional<Intervention> intervention;  // hp
  bool operator==(const CauseCertificate&) const = default;
};

struct Verdict {
  bool holds = false;
  std::optional<CauseCertificate> certificate;
};

Verdict decide(Definition d, const CausalModel& m, const Context& u,
               Literal cause, Literal effect);

// Re-derives a positive verdict from its certificate using the defining
// checks only (no search). True iff the certificate is valid for the given
// model, context, and literal pair.
bool replay(const CausalModel& m, const Context& u, Literal cause,
            Literal effect, const CauseCertificate& certificate);

// One-line rendering, e.g. "path = (SH), c' = 0". The cause literal is
// needed to name the domain of the alternative value.
std::string certificate_string(const CausalModel& m, Literal cause,
                               const CauseCertificate& certificate);

}  // namespace acause
