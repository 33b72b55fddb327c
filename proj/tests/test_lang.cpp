#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "acause/lang.hpp"
#include "doctest.h"

using namespace acause;

namespace {

ModelDocument parse_ok(std::string_view text) {
  ParseResult r = parse_document(text);
  for (const Diagnostic& d : r.diagnostics)
    MESSAGE(format_diagnostic(d, "<test>"));
  REQUIRE(r.ok());
  return *r.document;
}

// The diagnostics of a source expected to be rejected.
std::vector<Diagnostic> parse_bad(std::string_view text) {
  ParseResult r = parse_document(text);
  REQUIRE(!r.diagnostics.empty());
  CHECK(!r.document.has_value());
  return r.diagnostics;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExprPtr v(const char* name) { return Expr::var(name); }

}  // namespace

TEST_CASE("canonical form of a small document") {
  const char* messy =
      " # leading comment\n"
      "model backup{exo UT:{0,1}\n"
      "  var Trainee:{0,1}=UT  # mechanism\n"
      "  var Supervisor : {0, 1} = ! Trainee\n"
      "  var Victim:{0,1}=(Trainee)|((Supervisor))}\n"
      "context shot for backup{UT=1}\n"
      "query cness cause Trainee=1 effect Victim=1 in backup given shot";
  const char* canonical =
      "model backup {\n"
      "  exo UT : {0, 1}\n"
      "  var Trainee : {0, 1} = UT\n"
      "  var Supervisor : {0, 1} = !Trainee\n"
      "  var Victim : {0, 1} = Trainee | Supervisor\n"
      "}\n"
      "\n"
      "context shot for backup { UT = 1 }\n"
      "\n"
      "query cness cause Trainee=1 effect Victim=1 in backup given shot\n";

  ModelDocument doc = parse_ok(messy);
  CHECK(print_document(doc) == canonical);
  ModelDocument again = parse_ok(canonical);
  CHECK(documents_equal(doc, again));
  CHECK(print_document(again) == canonical);

  REQUIRE(doc.models.size() == 1);
  REQUIRE(doc.contexts.size() == 1);
  REQUIRE(doc.queries.size() == 1);
  CHECK(doc.find_model("backup") != nullptr);
  CHECK(doc.find_context("shot") != nullptr);
  CHECK(doc.find_model("nope") == nullptr);
  QueryDecl q = doc.queries[0];
  CHECK(q.definition == Definition::Cness);
  CHECK(q.cause == TokenLiteral{"Trainee", "1"});
  CHECK(q.effect == TokenLiteral{"Victim", "1"});
  CHECK(q.model == "backup");
  CHECK(q.context == "shot");
}

TEST_CASE("operator precedence in printed expressions") {
  ExprPtr a = v("A"), b = v("B"), c = v("C");
  CHECK(print_expr(*Expr::disjunction({a, Expr::conjunction({b, c})})) ==
        "A | B & C");
  CHECK(print_expr(*Expr::conjunction({Expr::disjunction({a, b}), c})) ==
        "(A | B) & C");
  CHECK(print_expr(*Expr::conjunction({Expr::negation(a), b})) == "!A & B");
  CHECK(print_expr(*Expr::negation(Expr::disjunction({a, b}))) ==
        "!(A | B)");
  CHECK(print_expr(*Expr::negation(Expr::negation(a))) == "!!A");
  CHECK(print_expr(*Expr::eq("X", "1")) == "X == 1");
  CHECK(print_expr(*Expr::negation(Expr::eq("X", "1"))) == "!(X == 1)");
  CHECK(print_expr(*Expr::conjunction({a, b, c})) == "A & B & C");
  CHECK(print_expr(*Expr::conjunction({a, Expr::eq("X", "1")})) ==
        "A & X == 1");
}

TEST_CASE("precedence round-trips through the parser") {
  ModelDocument doc = parse_ok(
      "model m {\n"
      "  exo A : {0, 1}\n"
      "  exo B : {0, 1}\n"
      "  exo C : {0, 1}\n"
      "  var X : {0, 1} = A | B & C\n"
      "  var Y : {0, 1} = (A | B) & C\n"
      "  var Z : {0, 1} = !A & B\n"
      "  var W : {0, 1} = !(A == 1)\n"
      "}\n");
  const CausalModel& m = doc.models[0].model;
  auto expr_of = [&](const char* name) {
    return m.mechanism_expr(m.require_endogenous(name));
  };
  CHECK(expr_equal(expr_of("X"),
                   Expr::disjunction({v("A"), Expr::conjunction({v("B"),
                                                                 v("C")})})));
  CHECK(expr_equal(expr_of("Y"),
                   Expr::conjunction({Expr::disjunction({v("A"), v("B")}),
                                      v("C")})));
  CHECK(expr_equal(expr_of("Z"),
                   Expr::conjunction({Expr::negation(v("A")), v("B")})));
  CHECK(expr_equal(expr_of("W"), Expr::negation(Expr::eq("A", "1"))));

  std::string printed = print_document(doc);
  CHECK(documents_equal(doc, parse_ok(printed)));
  CHECK(print_document(parse_ok(printed)) == printed);
}

TEST_CASE("case tables print across lines") {
  const char* text =
      "model m {\n"
      "  exo U : {low, mid, high}\n"
      "  var X : {low, mid, high} = case {\n"
      "    U == low -> mid,\n"
      "    U == mid -> high,\n"
      "    else -> low\n"
      "  }\n"
      "  var Y : {0, 1} = X == high\n"
      "}\n"
      "\n"
      "context c for m { U = mid }\n";
  ModelDocument doc = parse_ok(text);
  CHECK(print_document(doc) == text);

  const CausalModel& m = doc.models[0].model;
  Solution sol = m.solve(doc.contexts[0].values);
  CHECK(sol[m.require_var("X")] == m.domain(m.require_var("X")).index_of("high"));
  CHECK(sol[m.require_var("Y")] == 1);
}

TEST_CASE("comments and layout are immaterial") {
  const char* sparse =
      "# a model\n"
      "model m {\n"
      "  exo U : {0, 1}   # the input\n"
      "  var X : {0, 1} = !U\n"
      "}\n"
      "context c for m { U = 0 }\n";
  const char* dense = "model m{exo U:{0,1} var X:{0,1}=!U}context c for m{U=0}";
  CHECK(documents_equal(parse_ok(sparse), parse_ok(dense)));
}

TEST_CASE("multi-valued domains round-trip") {
  const char* text =
      "model levels {\n"
      "  exo U : {low, mid, high}\n"
      "  var X : {low, mid, high} = U\n"
      "  var Y : {0, 1} = X == high | X == mid\n"
      "}\n"
      "\n"
      "context c for levels { U = high }\n"
      "\n"
      "query ness cause X=high effect Y=1 in levels given c\n";
  ModelDocument doc = parse_ok(text);
  CHECK(print_document(doc) == text);
  CHECK(documents_equal(doc, parse_ok(print_document(doc))));
  const CausalModel& m = doc.models[0].model;
  CHECK(m.domain(m.require_var("X")).size() == 3);
  CHECK(m.solve(doc.contexts[0].values)[m.require_var("Y")] == 1);
}

TEST_CASE("corpus files print to a fixpoint") {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator("corpus"))
    if (entry.path().native().ends_with(".scm.txt"))
      files.push_back(entry.path());
  REQUIRE(files.size() == 7);
  for (const auto& path : files) {
    INFO(path.string());
    ModelDocument doc = parse_ok(read_file(path));
    std::string printed = print_document(doc);
    ModelDocument reparsed = parse_ok(printed);
    CHECK(documents_equal(doc, reparsed));
    CHECK(print_document(reparsed) == printed);
  }
}

TEST_CASE("diagnostics carry codes and positions") {
  SUBCASE("syntax") {
    auto diags = parse_bad("model m {\n  exo U : {0, 1}\n  @\n}\n");
    CHECK(diags[0].code == DiagCode::Syntax);
    CHECK(diags[0].span.line == 3);
    CHECK(diags[0].span.column == 3);
  }
  SUBCASE("undeclared variable") {
    auto diags = parse_bad(
        "model m {\n  exo U : {0, 1}\n  var X : {0, 1} = Y\n}\n");
    CHECK(diags[0].code == DiagCode::UndeclaredVariable);
    CHECK(diags[0].span.line == 3);
    CHECK(diags[0].span.column == 20);
  }
  SUBCASE("domain mismatch in a comparison") {
    auto diags = parse_bad(
        "model m {\n  exo U : {a, b}\n  var X : {0, 1} = U == z\n}\n");
    CHECK(diags[0].code == DiagCode::DomainMismatch);
    CHECK(diags[0].span.line == 3);
    CHECK(diags[0].span.column == 25);
  }
  SUBCASE("variable as a case result gets a hint") {
    auto diags = parse_bad(
        "model m {\n"
        "  exo U : {a, b}\n"
        "  var X : {a, b} = case {\n"
        "    U == a -> b,\n"
        "    else -> U\n"
        "  }\n"
        "}\n");
    CHECK(diags[0].code == DiagCode::DomainMismatch);
    CHECK(diags[0].message.find("not variables") != std::string::npos);
    CHECK(diags[0].span.line == 5);
    CHECK(diags[0].span.column == 13);
  }
  SUBCASE("duplicate model name") {
    auto diags = parse_bad(
        "model m { exo U : {0, 1} var X : {0, 1} = U }\n"
        "model m { exo U : {0, 1} var X : {0, 1} = U }\n");
    CHECK(diags[0].code == DiagCode::DuplicateName);
    CHECK(diags[0].span.line == 2);
    CHECK(diags[0].span.column == 7);
  }
  SUBCASE("duplicate variable and domain value") {
    auto diags = parse_bad(
        "model m {\n  exo U : {0, 1}\n  var U : {0, 1} = 0\n}\n");
    CHECK(diags[0].code == DiagCode::DuplicateName);
    auto diags2 = parse_bad(
        "model m {\n  exo U : {0, 0}\n  var X : {0, 1} = U\n}\n");
    CHECK(diags2[0].code == DiagCode::DuplicateName);
  }
  SUBCASE("unknown model and context names") {
    auto diags = parse_bad(
        "model m { exo U : {0, 1} var X : {0, 1} = U }\n"
        "context c for ghost { U = 1 }\n");
    CHECK(diags[0].code == DiagCode::UnknownName);
    CHECK(diags[0].span.line == 2);
    CHECK(diags[0].span.column == 15);
    auto diags2 = parse_bad(
        "model m { exo U : {0, 1} var X : {0, 1} = U }\n"
        "context c for m { U = 1 }\n"
        "query cd cause X=1 effect X=0 in m given ghost\n");
    CHECK(diags2[0].code == DiagCode::UnknownName);
  }
  SUBCASE("invalid contexts") {
    auto missing = parse_bad(
        "model m { exo U : {0, 1} exo W : {0, 1} var X : {0, 1} = U }\n"
        "context c for m { U = 1 }\n");
    CHECK(missing[0].code == DiagCode::InvalidContext);
    auto endo = parse_bad(
        "model m { exo U : {0, 1} var X : {0, 1} = U }\n"
        "context c for m { U = 1, X = 1 }\n");
    CHECK(endo[0].code == DiagCode::InvalidContext);
    auto twice = parse_bad(
        "model m { exo U : {0, 1} var X : {0, 1} = U }\n"
        "context c for m { U = 1, U = 0 }\n");
    CHECK(twice[0].code == DiagCode::DuplicateName);
    auto bad_value = parse_bad(
        "model m { exo U : {0, 1} var X : {0, 1} = U }\n"
        "context c for m { U = 9 }\n");
    CHECK(bad_value[0].code == DiagCode::DomainMismatch);
  }
  SUBCASE("invalid queries") {
    const char* preamble =
        "model m { exo U : {0, 1} var X : {0, 1} = U }\n"
        "model n { exo U : {0, 1} var X : {0, 1} = U }\n"
        "context cm for m { U = 1 }\n"
        "context cn for n { U = 1 }\n";
    auto unknown_def = parse_bad(std::string(preamble) +
                                 "query zap cause X=1 effect X=0 in m "
                                 "given cm\n");
    CHECK(unknown_def[0].code == DiagCode::InvalidQuery);
    auto wrong_binding = parse_bad(std::string(preamble) +
                                   "query cd cause X=1 effect X=0 in m "
                                   "given cn\n");
    CHECK(wrong_binding[0].code == DiagCode::InvalidQuery);
    auto exo_literal = parse_bad(std::string(preamble) +
                                 "query cd cause U=1 effect X=1 in m "
                                 "given cm\n");
    CHECK(exo_literal[0].code == DiagCode::InvalidQuery);
    auto bad_value = parse_bad(std::string(preamble) +
                               "query cd cause X=9 effect X=1 in m "
                               "given cm\n");
    CHECK(bad_value[0].code == DiagCode::DomainMismatch);
  }
  SUBCASE("self reference") {
    auto diags = parse_bad(
        "model m {\n  exo U : {0, 1}\n  var X : {0, 1} = X | U\n}\n");
    CHECK(diags[0].code == DiagCode::SelfReference);
  }
  SUBCASE("ill-typed mechanism") {
    auto diags = parse_bad(
        "model m {\n  exo U : {a, b}\n  var X : {0, 1} = !U\n}\n");
    CHECK(diags[0].code == DiagCode::IllTypedMechanism);
  }
  SUBCASE("cycle reported at the model name") {
    auto diags = parse_bad(
        "model loop {\n"
        "  exo U : {0, 1}\n"
        "  var X : {0, 1} = Y\n"
        "  var Y : {0, 1} = X\n"
        "}\n");
    CHECK(diags[0].code == DiagCode::CyclicModel);
    CHECK(diags[0].span.line == 1);
    CHECK(diags[0].span.column == 7);
  }
}

TEST_CASE("recovery reports independent errors") {
  auto diags = parse_bad(
      "model a {\n  exo U : {0, 1}\n  var X : {0, 1} = Y\n}\n"
      "model b {\n  exo U : {0, 1}\n  var X : {0, 1} = X\n}\n");
  REQUIRE(diags.size() == 2);
  CHECK(diags[0].code == DiagCode::UndeclaredVariable);
  CHECK(diags[1].code == DiagCode::SelfReference);

  // A broken model silences its dependents instead of cascading.
  auto quiet = parse_bad(
      "model a {\n  exo U : {0, 1}\n  var X : {0, 1} = Y\n}\n"
      "context c for a { U = 1 }\n"
      "query cd cause X=1 effect X=0 in a given c\n");
  REQUIRE(quiet.size() == 1);
  CHECK(quiet[0].code == DiagCode::UndeclaredVariable);
}

TEST_CASE("diagnostic rendering") {
  Diagnostic d{DiagCode::DomainMismatch, "boom", SourceSpan{3, 9, 0, 2}};
  CHECK(format_diagnostic(d, "f.txt") ==
        "f.txt:3:9: error: boom [domain-mismatch]");
  CHECK(to_string(DiagCode::Syntax) == "syntax");
  CHECK(to_string(DiagCode::CyclicModel) == "cyclic-model");
}
