// Acceptance gate: every release-blocking property, one line of output
// each, timed. Exits with the number of failed checks.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "acause/harness.hpp"

using namespace acause;

namespace {

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int index, const char* name, bool pass, double seconds,
            const std::string& detail) {
  std::printf("[%s] %d. %s (%.2fs)%s%s\n", pass ? "PASS" : "FAIL", index,
              name, seconds, detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

GeneratorConfig config_for_seed(std::uint64_t seed) {
  GeneratorConfig cfg;  // 2 exogenous, 6 endogenous, 3 parents, binary
  cfg.seed = seed;
  return cfg;
}

std::string plural(long long n, const char* noun) {
  return std::to_string(n) + " " + noun + (n == 1 ? "" : "s");
}

// 1. The canonical corpus reproduces exactly, quickly.
void check_corpus(const std::string& corpus_dir) {
  Timer t;
  std::string detail;
  bool pass = false;
  try {
    CorpusReport r = run_corpus(corpus_dir);
    pass = r.ok() && t.seconds() < 5.0;
    detail = std::to_string(r.files) + " documents, " +
             std::to_string(r.entries) + " rows";
    if (!r.ok()) detail += "; first failure: " + r.failures.front();
    if (t.seconds() >= 5.0) detail += "; over the 5s budget";
  } catch (const Error& e) {
    detail = e.what();
  }
  report(1, "canonical corpus reproduces exactly", pass, t.seconds(), detail);
}

// 2. Counterfactual dependence coincides with defeasible NESS chaining
// on 1000 seeded models.
void check_biconditional() {
  Timer t;
  long long models = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    GeneratedInstance inst = generate_model(config_for_seed(seed));
    ++models;
    if (auto v = check_theorem_2(inst.model, inst.context); v && first.empty())
      first = "seed " + std::to_string(seed) + ": " + *v;
  }
  bool pass = first.empty() && t.seconds() < 300.0;
  std::string detail = plural(models, "model");
  if (!first.empty()) detail += "; " + first;
  if (t.seconds() >= 300.0) detail += "; over the 300s budget";
  report(2, "dependence equals defeasible NESS chaining", pass, t.seconds(),
         detail);
}

// 3. Every dependence cause is also a NESS, BV, and CNESS cause.
void check_implications() {
  Timer t;
  long long cd_rows = 0, violations = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    GeneratedInstance inst = generate_model(config_for_seed(seed));
    VerdictMatrix matrix = verdict_matrix(inst.model, inst.context, false);
    for (const VerdictRow& row : matrix.rows) {
      if (!row.verdicts.at(Definition::Cd).holds) continue;
      ++cd_rows;
      if (row.verdicts.at(Definition::Ness).holds &&
          row.verdicts.at(Definition::Bv).holds &&
          row.verdicts.at(Definition::Cness).holds)
        continue;
      ++violations;
      if (first.empty())
        first = "seed " + std::to_string(seed) + ", " +
                inst.model.lit_string(row.cause) + " -> " +
                inst.model.lit_string(row.effect);
    }
  }
  std::string detail = plural(cd_rows, "dependence-positive row");
  if (violations) detail += "; " + plural(violations, "violation") +
                            "; first: " + first;
  report(3, "dependence causes are NESS, BV, and CNESS causes",
         violations == 0 && cd_rows > 0, t.seconds(), detail);
}

// 4. Certified alternatives of BV and CNESS leave the alternative
// insufficient for the effect in the altered model.
void check_alternatives_defeat_sufficiency() {
  Timer t;
  long long certs = 0, violations = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    GeneratedInstance inst = generate_model(config_for_seed(seed));
    const CausalModel& m = inst.model;
    VerdictMatrix matrix = verdict_matrix(m, inst.context, false);
    for (const VerdictRow& row : matrix.rows)
      for (Definition d : {Definition::Bv, Definition::Cness}) {
        const Verdict& v = row.verdicts.at(d);
        if (!v.holds || !v.certificate || !v.certificate->alternative)
          continue;
        ++certs;
        Literal alt{row.cause.var, *v.certificate->alternative};
        CausalModel altered = m.intervene({{alt}});
        if (!sufficient(altered, inst.context, {alt}, row.effect)) continue;
        ++violations;
        if (first.empty())
          first = "seed " + std::to_string(seed) + ", " +
                  m.lit_string(row.cause) + " -> " +
                  m.lit_string(row.effect) + " under " +
                  std::string(to_string(d));
      }
  }
  std::string detail = plural(certs, "certified alternative");
  if (violations) detail += "; " + plural(violations, "violation") +
                            "; first: " + first;
  report(4, "certified alternatives defeat sufficiency when set",
         violations == 0 && certs > 0, t.seconds(), detail);
}

// 5. The two sufficiency procedures agree on random assignment sets, and
// the parent-restricted witness search agrees with the full-subset
// reference search on every ordered actual pair.
void check_search_agreement() {
  Timer t;
  long long suff_checks = 0, witness_checks = 0, violations = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    GeneratedInstance inst = generate_model(config_for_seed(seed));
    const CausalModel& m = inst.model;
    const Context& u = inst.context;

    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 17);
    auto draw = [&rng](int bound) {
      return static_cast<int>(rng() % static_cast<std::uint64_t>(bound));
    };
    for (int s = 0; s < 10; ++s) {
      VarId effect_var = m.exo_count() + draw(m.endo_count());
      Literal effect{effect_var, draw(m.domain(effect_var).size())};
      std::vector<VarId> others;
      for (VarId v = m.exo_count(); v < m.var_count(); ++v)
        if (v != effect_var) others.push_back(v);
      AssignmentSet set;
      for (VarId v : others)
        if (draw(2) == 1) set.push_back({v, draw(m.domain(v).size())});
      ++suff_checks;
      if (sufficient(m, u, set, effect) !=
          sufficient_interventional(m, u, set, effect)) {
        ++violations;
        if (first.empty())
          first = "sufficiency, seed " + std::to_string(seed) + " sample " +
                  std::to_string(s);
      }
    }

    Solution sol = m.solve(u);
    for (VarId c = m.exo_count(); c < m.var_count(); ++c)
      for (VarId e = m.exo_count(); e < m.var_count(); ++e) {
        if (c == e) continue;
        Literal cause{c, sol[c]}, effect{e, sol[e]};
        ++witness_checks;
        if (direct_ness_cause(m, u, cause, effect) !=
            direct_ness_reference(m, u, cause, effect)) {
          ++violations;
          if (first.empty())
            first = "witness, seed " + std::to_string(seed) + ", " +
                    m.lit_string(cause) + " -> " + m.lit_string(effect);
        }
      }
  }
  std::string detail = plural(suff_checks, "sufficiency comparison") + ", " +
                       plural(witness_checks, "witness comparison");
  if (violations) detail += "; first: " + first;
  report(5, "independent searches agree",
         violations == 0 && suff_checks >= 10000, t.seconds(), detail);
}

// 6. Extensionally equal rewrites leave the whole verdict matrix
// unchanged.
void check_rewrites() {
  Timer t;
  long long models = 0, violations = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GeneratedInstance inst = generate_model(config_for_seed(seed));
    const CausalModel& m = inst.model;
    ++models;
    nlohmann::json original =
        matrix_to_json(m, verdict_matrix(m, inst.context, true));
    for (int variant : {0, 1}) {
      CausalModel rewritten = rewrite_extensionally_equal(m, variant);
      bool ok = extensionally_equal(m, rewritten) &&
                matrix_to_json(rewritten,
                               verdict_matrix(rewritten, inst.context,
                                              true)) == original;
      if (ok) continue;
      ++violations;
      if (first.empty())
        first = "seed " + std::to_string(seed) + ", variant " +
                std::to_string(variant);
    }
  }
  std::string detail = plural(models, "model") + ", 2 variants each";
  if (violations) detail += "; first: " + first;
  report(6, "extensionally equal rewrites keep all verdicts",
         violations == 0 && models >= 100, t.seconds(), detail);
}

// 7. Every positive verdict's certificate replays against the defining
// checks, across both the generated family and the corpus.
void check_replay(const std::string& corpus_dir) {
  Timer t;
  long long total = 0, failed = 0;
  std::string first;
  auto replay_matrix = [&](const CausalModel& m, const Context& u,
                           const VerdictMatrix& matrix,
                           const std::string& tag) {
    for (const VerdictRow& row : matrix.rows)
      for (const auto& [d, v] : row.verdicts) {
        if (!v.holds || d == Definition::Suff) continue;
        ++total;
        if (v.certificate && replay(m, u, row.cause, row.effect,
                                    *v.certificate))
          continue;
        ++failed;
        if (first.empty())
          first = tag + ": " + m.lit_string(row.cause) + " -> " +
                  m.lit_string(row.effect) + " under " +
                  std::string(to_string(d));
      }
  };

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    GeneratedInstance inst = generate_model(config_for_seed(seed));
    replay_matrix(inst.model, inst.context,
                  verdict_matrix(inst.model, inst.context, false),
                  "seed " + std::to_string(seed));
  }
  try {
    namespace fs = std::filesystem;
    for (const auto& entry : fs::directory_iterator(corpus_dir)) {
      if (!entry.path().native().ends_with(".scm.txt")) continue;
      std::ifstream in(entry.path(), std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      ParseResult r = parse_document(ss.str());
      if (!r.ok()) continue;
      for (const NamedContext& nc : r.document->contexts) {
        const NamedModel* nm = r.document->find_model(nc.model);
        replay_matrix(nm->model, nc.values,
                      verdict_matrix(nm->model, nc.values, true),
                      entry.path().filename().string() + "." + nc.name);
      }
    }
  } catch (const std::exception& e) {
    if (first.empty()) first = std::string("corpus: ") + e.what();
    ++failed;
  }

  std::string detail = plural(total, "certificate");
  if (failed) detail += "; " + plural(failed, "failure") + "; first: " + first;
  report(7, "every positive certificate replays", failed == 0 && total > 0,
         t.seconds(), detail);
}

// 8. Printing is a fixpoint of parse/print for the corpus and for
// generated documents.
void check_roundtrip(const std::string& corpus_dir) {
  Timer t;
  long long docs = 0, violations = 0;
  std::string first;
  auto check_doc = [&](const ModelDocument& doc, const std::string& tag) {
    ++docs;
    std::string printed = print_document(doc);
    ParseResult r = parse_document(printed);
    bool ok = r.ok() && documents_equal(doc, *r.document) &&
              print_document(*r.document) == printed;
    if (ok) return;
    ++violations;
    if (first.empty()) first = tag;
  };

  try {
    namespace fs = std::filesystem;
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(corpus_dir))
      if (entry.path().native().ends_with(".scm.txt"))
        paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    for (const fs::path& path : paths) {
      std::ifstream in(path, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      ParseResult r = parse_document(ss.str());
      if (!r.ok()) {
        ++violations;
        if (first.empty()) first = path.filename().string() + " unparseable";
        continue;
      }
      check_doc(*r.document, path.filename().string());
    }
  } catch (const std::exception& e) {
    ++violations;
    if (first.empty()) first = std::string("corpus: ") + e.what();
  }

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GeneratedInstance inst = generate_model(config_for_seed(seed));
    check_doc(instance_document(inst, "m", "c"),
              "generated seed " + std::to_string(seed));
  }

  std::string detail = plural(docs, "document");
  if (violations) detail += "; first: " + first;
  report(8, "printing is a parse/print fixpoint", violations == 0 && docs > 0,
         t.seconds(), detail);
}

}  // namespace

int main(int argc, char** argv) {
  std::string corpus_dir = "corpus";
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--corpus-dir" && i + 1 < argc) corpus_dir = argv[++i];
  }

  Timer total;
  check_corpus(corpus_dir);
  check_biconditional();
  check_implications();
  check_alternatives_defeat_sufficiency();
  check_search_agreement();
  check_rewrites();
  check_replay(corpus_dir);
  check_roundtrip(corpus_dir);
  if (g_failures == 0)
    std::printf("all checks passed in %.2fs\n", total.seconds());
  else
    std::printf("%d checks failed in %.2fs\n", g_failures, total.seconds());
  return g_failures;
}
