#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "acause/harness.hpp"
#include "doctest.h"

using namespace acause;
namespace fs = std::filesystem;

namespace {

#define CHECK_ERROR(expr, expected_code)                \
  do {                                                  \
    try {                                               \
      (void)(expr);                                     \
      FAIL_CHECK("expected Error, got none: " #expr);   \
    } catch (const Error& e) {                          \
      CHECK(e.code() == (expected_code));               \
    }                                                   \
  } while (0)

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

ModelDocument parse_corpus_doc(const std::string& name) {
  ParseResult r = parse_document(read_file(fs::path("corpus") / name));
  REQUIRE(r.ok());
  return *r.document;
}

// Applies fn(model, context, label) for every context of every corpus
// document.
void for_each_corpus_context(
    const std::function<void(const CausalModel&, const Context&,
                             const std::string&)>& fn) {
  std::vector<fs::path> docs;
  for (const auto& entry : fs::directory_iterator("corpus"))
    if (entry.path().native().ends_with(".scm.txt"))
      docs.push_back(entry.path());
  std::sort(docs.begin(), docs.end());
  REQUIRE(docs.size() == 7);
  for (const fs::path& path : docs) {
    ParseResult r = parse_document(read_file(path));
    REQUIRE(r.ok());
    for (const NamedContext& nc : r.document->contexts) {
      const NamedModel* nm = r.document->find_model(nc.model);
      REQUIRE(nm != nullptr);
      fn(nm->model, nc.values,
         path.filename().string() + "." + nc.name);
    }
  }
}

std::string print_instance(const GeneratedInstance& inst) {
  return print_document(instance_document(inst, "m", "c"));
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
  GeneratorConfig cfg;
  cfg.seed = 7;
  GeneratedInstance a = generate_model(cfg);
  GeneratedInstance b = generate_model(cfg);
  CHECK(print_instance(a) == print_instance(b));
  CHECK(a.context == b.context);
  CHECK(extensionally_equal(a.model, b.model));

  GeneratorConfig other = cfg;
  other.seed = 8;
  CHECK(print_instance(generate_model(other)) != print_instance(a));

  // The document form parses back to the same instance.
  ParseResult r = parse_document(print_instance(a));
  REQUIRE(r.ok());
  CHECK(extensionally_equal(r.document->models[0].model, a.model));
  CHECK(r.document->contexts[0].values == a.context);
}

TEST_CASE("generator configs are range-checked") {
  auto with = [](auto mutate) {
    GeneratorConfig cfg;
    mutate(cfg);
    return cfg;
  };
  CHECK_ERROR(generate_model(with([](auto& c) { c.n_exogenous = -1; })),
              ErrorCode::InvalidArgument);
  CHECK_ERROR(generate_model(with([](auto& c) { c.n_exogenous = 5; })),
              ErrorCode::InvalidArgument);
  CHECK_ERROR(generate_model(with([](auto& c) { c.n_endogenous = 0; })),
              ErrorCode::InvalidArgument);
  CHECK_ERROR(generate_model(with([](auto& c) { c.n_endogenous = 9; })),
              ErrorCode::InvalidArgument);
  CHECK_ERROR(generate_model(with([](auto& c) { c.max_parents = -1; })),
              ErrorCode::InvalidArgument);
  CHECK_ERROR(generate_model(with([](auto& c) { c.max_parents = 5; })),
              ErrorCode::InvalidArgument);
  CHECK_ERROR(generate_model(with([](auto& c) { c.domain_size = 1; })),
              ErrorCode::InvalidArgument);
  CHECK_ERROR(generate_model(with([](auto& c) { c.domain_size = 5; })),
              ErrorCode::InvalidArgument);
}

TEST_CASE("verdict matrix matches its golden") {
  ModelDocument doc = parse_corpus_doc("backup.scm.txt");
  const CausalModel& m = doc.find_model("backup")->model;
  const Context& u = doc.find_context("shot")->values;

  VerdictMatrix matrix = verdict_matrix(m, u, true);
  CHECK(matrix.invariant_violations.empty());
  CHECK(matrix.rows.size() == 6);  // ordered pairs of 3 endogenous vars

  nlohmann::json computed = matrix_to_json(m, matrix);
  nlohmann::json golden = nlohmann::json::parse(
      read_file("corpus/backup.shot.golden.json"));
  CHECK(computed == golden);

  // Spot-check the schema itself.
  const auto& direct = computed.at("Trainee=1 -> Supervisor=0");
  CHECK(direct.at("suff") == nlohmann::json(true));
  CHECK(direct.at("cd").at("alternative") == "0");
  CHECK(direct.at("ness").at("chain") == nlohmann::json::array());
  const auto& masked = computed.at("Supervisor=0 -> Victim=1");
  CHECK(masked.at("cd") == nlohmann::json(false));
}

TEST_CASE("matrix invariants hold across the corpus") {
  for_each_corpus_context(
      [](const CausalModel& m, const Context& u, const std::string& label) {
        INFO(label);
        VerdictMatrix matrix = verdict_matrix(m, u, true);
        CHECK(matrix.invariant_violations.empty());
      });
}

TEST_CASE("dependence search under interventions") {
  ModelDocument backup = parse_corpus_doc("backup.scm.txt");
  {
    const CausalModel& m = backup.find_model("backup")->model;
    const Context& u = backup.find_context("shot")->values;
    auto got = exists_dependence_under_intervention(
        m, u, m.lit("Trainee", "1"), m.lit("Victim", "1"));
    REQUIRE(got.has_value());
    CHECK(*got == Intervention{{m.lit("Supervisor", "0")}});
  }
  {
    ModelDocument doc = parse_corpus_doc("chain.scm.txt");
    const CausalModel& m = doc.models[0].model;
    const Context& u = doc.contexts[0].values;
    CHECK(!exists_dependence_under_intervention(m, u, m.lit("C", "1"),
                                                m.lit("E", "1"))
               .has_value());
  }
  {
    ModelDocument doc = parse_corpus_doc("gate.scm.txt");
    const CausalModel& m = doc.models[0].model;
    const Context& u = doc.contexts[0].values;
    CHECK(!exists_dependence_under_intervention(m, u, m.lit("C", "1"),
                                                m.lit("E", "1"))
               .has_value());
  }
  {
    ModelDocument doc = parse_corpus_doc("hp_gap.scm.txt");
    const CausalModel& m = doc.models[0].model;
    const Context& u = doc.contexts[0].values;
    auto got = exists_dependence_under_intervention(
        m, u, m.lit("C", "1"), m.lit("E", "1"));
    REQUIRE(got.has_value());
    CHECK(*got == Intervention{{m.lit("D", "1")}});
    // Same search backs the hp verdict.
    Verdict hp = decide(Definition::Hp, m, u, m.lit("C", "1"),
                        m.lit("E", "1"));
    REQUIRE(hp.holds);
    CHECK(hp.certificate->intervention == got);
  }
}

TEST_CASE("dependence biconditional holds across the corpus") {
  for_each_corpus_context(
      [](const CausalModel& m, const Context& u, const std::string& label) {
        INFO(label);
        auto violation = check_theorem_2(m, u);
        if (violation) MESSAGE(*violation);
        CHECK(!violation.has_value());
      });
}

TEST_CASE("witness searches agree across the corpus") {
  for_each_corpus_context(
      [](const CausalModel& m, const Context& u, const std::string& label) {
        Solution sol = m.solve(u);
        for (VarId c = m.exo_count(); c < m.var_count(); ++c)
          for (VarId e = m.exo_count(); e < m.var_count(); ++e) {
            if (c == e) continue;
            Literal cause{c, sol[c]}, effect{e, sol[e]};
            INFO(label << ": " << m.lit_string(cause) << " -> "
                       << m.lit_string(effect));
            CHECK(direct_ness_cause(m, u, cause, effect) ==
                  direct_ness_reference(m, u, cause, effect));
          }
      });
}

TEST_CASE("extensional rewrites preserve the matrix") {
  for_each_corpus_context(
      [](const CausalModel& m, const Context& u, const std::string& label) {
        nlohmann::json original = matrix_to_json(m, verdict_matrix(m, u));
        for (int variant : {0, 1}) {
          INFO(label << ", variant " << variant);
          CausalModel rewritten = rewrite_extensionally_equal(m, variant);
          CHECK(extensionally_equal(m, rewritten));
          CHECK(matrix_to_json(rewritten, verdict_matrix(rewritten, u)) ==
                original);
        }
      });
}

TEST_CASE("hand-written dual of a conjunction") {
  ModelDocument doc = parse_corpus_doc("conjunction.scm.txt");
  const CausalModel& m = doc.models[0].model;
  const Context& u = doc.contexts[0].values;

  ParseResult dual = parse_document(
      "model dual {\n"
      "  exo UA : {0, 1}\n"
      "  exo UB : {0, 1}\n"
      "  var A : {0, 1} = UA\n"
      "  var B : {0, 1} = UB\n"
      "  var E : {0, 1} = !(!A | !B)\n"
      "}\n");
  REQUIRE(dual.ok());
  const CausalModel& d = dual.document->models[0].model;
  CHECK(extensionally_equal(m, d));
  CHECK(matrix_to_json(d, verdict_matrix(d, u)) ==
        matrix_to_json(m, verdict_matrix(m, u)));
}

TEST_CASE("corpus runner is green") {
  CorpusReport report = run_corpus("corpus");
  for (const std::string& f : report.failures) MESSAGE(f);
  CHECK(report.ok());
  CHECK(report.files == 7);
  CHECK(report.entries == 108);
}

TEST_CASE("corpus runner pinpoints regressions") {
  fs::path dir = fs::temp_directory_path() / "acause_corpus_mutation";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const char* name :
       {"backup.scm.txt", "backup.shot.golden.json",
        "backup.balked.golden.json"})
    fs::copy_file(fs::path("corpus") / name, dir / name);

  SUBCASE("clean copy passes") {
    CorpusReport report = run_corpus(dir.string());
    CHECK(report.ok());
    CHECK(report.files == 1);
    CHECK(report.entries == 12);
  }
  SUBCASE("one flipped verdict is one failure") {
    nlohmann::json golden = nlohmann::json::parse(
        read_file(dir / "backup.shot.golden.json"));
    golden["Supervisor=0 -> Victim=1"]["suff"] = true;
    write_file(dir / "backup.shot.golden.json", golden.dump(2));
    CorpusReport report = run_corpus(dir.string());
    REQUIRE(report.failures.size() == 1);
    CHECK(report.failures[0].find("Supervisor=0 -> Victim=1") !=
          std::string::npos);
    CHECK(report.failures[0].find("backup.shot") != std::string::npos);
  }
  SUBCASE("missing golden is reported") {
    fs::remove(dir / "backup.balked.golden.json");
    CorpusReport report = run_corpus(dir.string());
    REQUIRE(report.failures.size() == 1);
    CHECK(report.failures[0].find("missing golden") != std::string::npos);
  }
  SUBCASE("orphan golden is reported") {
    write_file(dir / "backup.ghost.golden.json", "{}");
    CorpusReport report = run_corpus(dir.string());
    REQUIRE(report.failures.size() == 1);
    CHECK(report.failures[0].find("orphan golden") != std::string::npos);
    CHECK(report.failures[0].find("backup.ghost") != std::string::npos);
  }
  SUBCASE("document without goldens") {
    fs::path lonely = fs::temp_directory_path() / "acause_corpus_lonely";
    fs::remove_all(lonely);
    fs::create_directories(lonely);
    fs::copy_file("corpus/backup.scm.txt", lonely / "backup.scm.txt");
    CorpusReport report = run_corpus(lonely.string());
    CHECK(report.failures.size() == 2);  // one per context
    fs::remove_all(lonely);
  }
  SUBCASE("empty directory") {
    fs::path empty = fs::temp_directory_path() / "acause_corpus_empty";
    fs::remove_all(empty);
    fs::create_directories(empty);
    CHECK_ERROR(run_corpus(empty.string()), ErrorCode::CorpusMissing);
    CHECK_ERROR(run_corpus((empty / "absent").string()),
                ErrorCode::CorpusMissing);
    fs::remove_all(empty);
  }
  fs::remove_all(dir);
}

TEST_CASE("property sweep over a seeded family") {
  SweepConfig cfg;
  cfg.seed_begin = 0;
  cfg.seed_count = 8;
  cfg.with_hp = true;
  cfg.sufficiency_samples = 5;
  SweepReport report = run_property_sweep(cfg);
  for (const std::string& v : report.violations) MESSAGE(v);
  CHECK(report.ok());
  CHECK(report.models == 8);
  CHECK(report.matrix_rows == 8 * 30);  // ordered pairs of 6 endo vars
  CHECK(report.witness_checks == 8 * 30);
  CHECK(report.theorem2_models == 8);
  CHECK(report.sufficiency_checks == 8 * 5);
  CHECK(report.roundtrip_docs == 8);
  CHECK(report.replay_checks > 0);
}

TEST_CASE("property sweep exercises non-boolean domains") {
  SweepConfig cfg;
  cfg.seed_begin = 100;
  cfg.seed_count = 4;
  cfg.base.n_endogenous = 4;
  cfg.base.domain_size = 3;
  cfg.sufficiency_samples = 3;
  SweepReport report = run_property_sweep(cfg);
  for (const std::string& v : report.violations) MESSAGE(v);
  CHECK(report.ok());
  CHECK(report.models == 4);
  CHECK(report.matrix_rows == 4 * 12);
}
