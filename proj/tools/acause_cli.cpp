#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acause/causation.hpp"
#include "acause/harness.hpp"
#include "acause/lang.hpp"
#include "acause/model.hpp"

namespace {

constexpr int kExitTrue = 0;       // success / positive verdict
constexpr int kExitFalse = 1;      // negative verdict or corpus mismatch
constexpr int kExitUsage = 2;      // bad invocation or ill-formed input
constexpr int kExitViolation = 3;  // invariant or property violation

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("error: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

acause::ModelDocument load_document(const std::string& path) {
  acause::ParseResult parsed = acause::parse_document(read_file(path));
  if (!parsed.ok()) {
    std::string message;
    for (size_t i = 0; i < parsed.diagnostics.size(); ++i) {
      if (i) message += '\n';
      message += acause::format_diagnostic(parsed.diagnostics[i], path);
    }
    throw UsageError(message);
  }
  return std::move(*parsed.document);
}

const acause::NamedModel& pick_model(const acause::ModelDocument& doc,
                                     const std::string& name) {
  if (!name.empty()) {
    if (const auto* nm = doc.find_model(name)) return *nm;
    throw UsageError("error: no model named '" + name + "' in the document");
  }
  if (doc.models.size() == 1) return doc.models.front();
  if (doc.models.empty())
    throw UsageError("error: the document declares no model");
  throw UsageError(
      "error: the document declares several models; pick one with --model");
}

const acause::NamedContext& pick_context(const acause::ModelDocument& doc,
                                         const acause::NamedModel& nm,
                                         const std::string& name) {
  if (!name.empty()) {
    const auto* nc = doc.find_context(name);
    if (!nc)
      throw UsageError("error: no context named '" + name +
                       "' in the document");
    if (nc->model != nm.name)
      throw UsageError("error: context '" + name + "' is bound to model " +
                       nc->model + ", not " + nm.name);
    return *nc;
  }
  const acause::NamedContext* only = nullptr;
  for (const auto& nc : doc.contexts) {
    if (nc.model != nm.name) continue;
    if (only)
      throw UsageError("error: several contexts for model " + nm.name +
                       "; pick one with --context");
    only = &nc;
  }
  if (!only)
    throw UsageError("error: no context for model " + nm.name +
                     " in the document");
  return *only;
}

acause::Literal parse_literal(const acause::CausalModel& m,
                              const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= text.size())
    throw UsageError("error: literal must look like NAME=value, got '" +
                     text + "'");
  return m.lit(text.substr(0, eq), text.substr(eq + 1));
}

int run_solve(const std::string& file, const std::string& model,
              const std::string& context) {
  acause::ModelDocument doc = load_document(file);
  const acause::NamedModel& nm = pick_model(doc, model);
  const acause::NamedContext& nc = pick_context(doc, nm, context);
  const acause::CausalModel& m = nm.model;
  acause::Solution sol = m.solve(nc.values);
  for (acause::VarId v = 0; v < m.exo_count(); ++v)
    std::cout << m.var_name(v) << " = "
              << m.domain(v).token(nc.values.values[v]) << "\n";
  for (acause::VarId v : m.topological_order())
    std::cout << m.var_name(v) << " = " << m.domain(v).token(sol[v]) << "\n";
  return kExitTrue;
}

int run_document_queries(const acause::ModelDocument& doc, bool explain,
                         bool json_out) {
  if (doc.queries.empty())
    throw UsageError(
        "error: no --def and literals given, and the document declares no "
        "queries");
  bool all_hold = true;
  nlohmann::json arr = nlohmann::json::array();
  for (const acause::QueryDecl& q : doc.queries) {
    const acause::NamedModel* nm = doc.find_model(q.model);
    const acause::NamedContext* nc = doc.find_context(q.context);
    acause::Literal cause = nm->model.lit(q.cause.var, q.cause.value);
    acause::Literal effect = nm->model.lit(q.effect.var, q.effect.value);
    acause::Verdict v =
        acause::decide(q.definition, nm->model, nc->values, cause, effect);
    all_hold = all_hold && v.holds;
    if (json_out) {
      arr.push_back({{"definition", std::string(to_string(q.definition))},
                     {"cause", nm->model.lit_string(cause)},
                     {"effect", nm->model.lit_string(effect)},
                     {"model", q.model},
                     {"context", q.context},
                     {"holds", v.holds},
                     {"verdict", acause::verdict_to_json(nm->model, cause, v)}});
      continue;
    }
    std::cout << "query " << to_string(q.definition) << " cause "
              << nm->model.lit_string(cause) << " effect "
              << nm->model.lit_string(effect) << " in " << q.model
              << " given " << q.context << ": "
              << (v.holds ? "TRUE" : "FALSE");
    if (explain && v.certificate)
      std::cout << "  (" << certificate_string(nm->model, cause,
                                               *v.certificate)
                << ")";
    std::cout << "\n";
  }
  if (json_out) std::cout << arr.dump(2) << "\n";
  return all_hold ? kExitTrue : kExitFalse;
}

int run_cause(const std::string& file, const std::string& model,
              const std::string& context, const std::string& def_name,
              const std::vector<std::string>& literals, bool explain,
              bool json_out) {
  acause::ModelDocument doc = load_document(file);
  if (def_name.empty() && literals.empty())
    return run_document_queries(doc, explain, json_out);
  if (def_name.empty() || literals.size() != 2)
    throw UsageError(
        "error: expected --def NAME plus two literals (cause, effect), or "
        "neither to run the document's queries");
  auto def = acause::definition_from_string(def_name);
  if (!def)
    throw UsageError("error: unknown definition '" + def_name +
                     "' (expected cd, suff, dness, ness, bv, cness, or hp)");
  const acause::NamedModel& nm = pick_model(doc, model);
  const acause::NamedContext& nc = pick_context(doc, nm, context);
  const acause::CausalModel& m = nm.model;
  acause::Literal cause = parse_literal(m, literals[0]);
  acause::Literal effect = parse_literal(m, literals[1]);
  acause::Verdict v = acause::decide(*def, m, nc.values, cause, effect);
  if (json_out) {
    nlohmann::json out = {{"definition", def_name},
                          {"cause", m.lit_string(cause)},
                          {"effect", m.lit_string(effect)},
                          {"holds", v.holds},
                          {"verdict", acause::verdict_to_json(m, cause, v)}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << (v.holds ? "TRUE" : "FALSE") << "\n";
    if (explain && v.certificate)
      std::cout << certificate_string(m, cause, *v.certificate) << "\n";
  }
  return v.holds ? kExitTrue : kExitFalse;
}

int run_matrix(const std::string& file, const std::string& model,
               const std::string& context, bool json_out, bool skip_hp) {
  acause::ModelDocument doc = load_document(file);
  const acause::NamedModel& nm = pick_model(doc, model);
  const acause::NamedContext& nc = pick_context(doc, nm, context);
  acause::VerdictMatrix mat =
      acause::verdict_matrix(nm.model, nc.values, !skip_hp);
  if (json_out) {
    std::cout << acause::matrix_to_json(nm.model, mat).dump(2) << "\n";
  } else {
    for (const acause::VerdictRow& row : mat.rows) {
      std::cout << nm.model.lit_string(row.cause) << " -> "
                << nm.model.lit_string(row.effect) << ":";
      for (const auto& [d, v] : row.verdicts)
        std::cout << " " << to_string(d) << "=" << (v.holds ? "T" : "F");
      std::cout << "\n";
    }
  }
  for (const std::string& violation : mat.invariant_violations)
    std::cerr << "invariant violation: " << violation << "\n";
  return mat.invariant_violations.empty() ? kExitTrue : kExitViolation;
}

int run_check(bool corpus, const std::string& corpus_dir, bool properties,
              const acause::SweepConfig& sweep) {
  if (!corpus && !properties)
    throw UsageError("error: pass --corpus and/or --properties");
  int code = kExitTrue;
  if (corpus) {
    acause::CorpusReport report = acause::run_corpus(corpus_dir);
    for (const std::string& f : report.failures)
      std::cout << "corpus failure: " << f << "\n";
    std::cout << "corpus: " << report.files << " documents, "
              << report.entries << " rows, " << report.failures.size()
              << " failures\n";
    if (!report.ok()) code = std::max(code, kExitFalse);
  }
  if (properties) {
    acause::SweepReport report = acause::run_property_sweep(sweep);
    for (const std::string& v : report.violations)
      std::cout << "property violation: " << v << "\n";
    std::cout << "properties: " << report.models << " models, "
              << report.matrix_rows << " matrix rows, "
              << report.replay_checks << " replays, "
              << report.theorem2_models << " biconditional checks, "
              << report.sufficiency_checks << " sufficiency checks, "
              << report.witness_checks << " witness checks, "
              << report.roundtrip_docs << " round-trips, "
              << report.violations.size() << " violations\n";
    if (!report.ok()) code = std::max(code, kExitViolation);
  }
  return code;
}

int run_fmt(const std::string& file) {
  std::cout << acause::print_document(load_document(file));
  return kExitTrue;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite structural equation models and actual causation"};
  app.require_subcommand(1);

  std::string file, model, context;
  std::string def_name;
  std::vector<std::string> literals;
  bool explain = false, json_out = false, skip_hp = false;
  bool corpus = false, properties = false;
  std::string corpus_dir = "corpus";
  acause::SweepConfig sweep;

  auto add_selectors = [&](CLI::App* cmd) {
    cmd->add_option("file", file, "model document")->required();
    cmd->add_option("--model", model,
                    "model name (optional when the document has one)");
    cmd->add_option("--context", context,
                    "context name (optional when the model has one)");
  };

  CLI::App* solve = app.add_subcommand(
      "solve", "Print every variable's value under a context");
  add_selectors(solve);

  CLI::App* cause = app.add_subcommand(
      "cause",
      "Decide one definition for a cause/effect pair, or run the "
      "document's queries");
  add_selectors(cause);
  cause->add_option("--def", def_name,
                    "definition: cd, suff, dness, ness, bv, cness, hp");
  cause->add_option("literals", literals,
                    "cause and effect literals, NAME=value");
  cause->add_flag("--explain", explain, "print the certificate");
  cause->add_flag("--json", json_out, "JSON output");

  CLI::App* matrix = app.add_subcommand(
      "matrix", "Decide every definition for every ordered variable pair");
  add_selectors(matrix);
  matrix->add_flag("--json", json_out, "JSON output (golden format)");
  matrix->add_flag("--skip-hp", skip_hp, "skip the hp column");

  CLI::App* check =
      app.add_subcommand("check", "Run the corpus and/or property sweeps");
  check->add_flag("--corpus", corpus, "compare corpus documents to goldens");
  check->add_option("--corpus-dir", corpus_dir, "corpus directory")
      ->capture_default_str();
  check->add_flag("--properties", properties, "run the property sweep");
  check->add_option("--seed-begin", sweep.seed_begin, "first seed")
      ->capture_default_str();
  check->add_option("--seed-count", sweep.seed_count, "number of seeds")
      ->capture_default_str();
  check->add_option("--vars", sweep.base.n_endogenous,
                    "endogenous variables per model")
      ->capture_default_str();
  check->add_option("--max-parents", sweep.base.max_parents,
                    "max parents per mechanism")
      ->capture_default_str();
  check->add_option("--exo", sweep.base.n_exogenous,
                    "exogenous variables per model")
      ->capture_default_str();
  check->add_option("--domain-size", sweep.base.domain_size, "domain size")
      ->capture_default_str();
  check->add_option("--samples", sweep.sufficiency_samples,
                    "sufficiency samples per model")
      ->capture_default_str();
  check->add_flag("--with-hp", sweep.with_hp, "include the hp column");

  CLI::App* fmt =
      app.add_subcommand("fmt", "Reprint a document in canonical form");
  fmt->add_option("file", file, "model document")->required();

  int code = kExitTrue;
  solve->callback([&] { code = run_solve(file, model, context); });
  cause->callback([&] {
    code = run_cause(file, model, context, def_name, literals, explain,
                     json_out);
  });
  matrix->callback(
      [&] { code = run_matrix(file, model, context, json_out, skip_hp); });
  check->callback(
      [&] { code = run_check(corpus, corpus_dir, properties, sweep); });
  fmt->callback([&] { code = run_fmt(file); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int r = app.exit(e);
    return r == 0 ? 0 : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const acause::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitViolation;
  }
  return code;
}
