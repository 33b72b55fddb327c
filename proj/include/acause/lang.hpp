#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acause/causation.hpp"
#include "acause/model.hpp"

// Textual model documents (.scm.txt): named models, named contexts bound
// to a model, and causation queries. Parsing resolves and validates
// everything (a returned document only contains validated models);
// printing emits the canonical form, with parse(print(doc)) == doc and
// print idempotent on its own output.
//
// Grammar (# starts a line comment; newlines are ordinary whitespace):
//
//   document := { model | context | query }
//   model    := "model" NAME "{" { vardecl } "}"
//   vardecl  := "exo" NAME ":" domain
//             | "var" NAME ":" domain "=" expr
//   domain   := "{" token { "," token } "}"
//   context  := "context" NAME "for" NAME "{" [ binding { "," binding } ] "}"
//   binding  := NAME "=" token
//   query    := "query" DEF "cause" NAME "=" token "effect" NAME "=" token
//               "in" NAME "given" NAME
//   DEF      := "cd" | "suff" | "dness" | "ness" | "bv" | "cness" | "hp"
//   expr     := or ; or := and { "|" and } ; and := unary { "&" unary }
//   unary    := "!" unary | primary
//   primary  := "(" expr ")" | case | NAME "==" token | NAME | NUMBER
//   case     := "case" "{" { expr "->" token "," } "else" "->" token "}"
//
// "!" binds tighter than "&", which binds tighter than "|"; "==" binds
// tighter than "!". A bare NAME denotes the declared variable of that
// name if one exists, otherwise a value token. Keywords (model, exo, var,
// context, query, case, else, for, cause, effect, in, given) are reserved.

namespace acause {

struct SourceSpan {
  int line = 1;
  int column = 1;        // 1-based, in bytes
  size_t offset = 0;     // byte offset into the source text
  size_t length = 0;
  bool operator==(const SourceSpan&) const = default;
};

enum class DiagCode {
  Syntax,
  UndeclaredVariable,
  DomainMismatch,
  DuplicateName,
  UnknownName,        // undeclared model or context reference
  InvalidContext,     // non-total or ill-formed context block
  InvalidQuery,
  SelfReference,
  IllTypedMechanism,
  CyclicModel,
};

std::string_view to_string(DiagCode code);

struct Diagnostic {
  DiagCode code = DiagCode::Syntax;
  std::string message;
  SourceSpan span;
};

std::string format_diagnostic(const Diagnostic& d, std::string_view filename);

struct NamedModel {
  std::string name;
  CausalModel model;
};

struct NamedContext {
  std::string name;
  std::string model;
  Context values;
};

// Cause/effect literal at the surface level, by tokens.
struct TokenLiteral {
  std::string var;
  std::string value;
  bool operator==(const TokenLiteral&) const = default;
};

struct QueryDecl {
  Definition definition = Definition::Cd;
  TokenLiteral cause;
  TokenLiteral effect;
  std::string model;
  std::string context;
  bool operator==(const QueryDecl&) const = default;
};

struct ModelDocument {
  std::vector<NamedModel> models;
  std::vector<NamedContext> contexts;
  std::vector<QueryDecl> queries;

  const NamedModel* find_model(std::string_view name) const;
  const NamedContext* find_context(std::string_view name) const;
};

struct ParseResult {
  std::optional<ModelDocument> document;  // present iff no diagnostics
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return document.has_value() && diagnostics.empty(); }
};

ParseResult parse_document(std::string_view text);

std::string print_document(const ModelDocument& doc);
std::string print_expr(const Expr& expr);

// Structural equality: same models (names, signatures, mechanism
// expressions), contexts, and queries, in the same order.
bool documents_equal(const ModelDocument& a, const ModelDocument& b);

}  // namespace acause
