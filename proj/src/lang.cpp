#include "acause/lang.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace acause {

std::string_view to_string(DiagCode code) {
  switch (code) {
    case DiagCode::Syntax: return "syntax";
    case DiagCode::UndeclaredVariable: return "undeclared-variable";
    case DiagCode::DomainMismatch: return "domain-mismatch";
    case DiagCode::DuplicateName: return "duplicate-name";
    case DiagCode::UnknownName: return "unknown-name";
    case DiagCode::InvalidContext: return "invalid-context";
    case DiagCode::InvalidQuery: return "invalid-query";
    case DiagCode::SelfReference: return "self-reference";
    case DiagCode::IllTypedMechanism: return "ill-typed-mechanism";
    case DiagCode::CyclicModel: return "cyclic-model";
  }
  return "?";
}

std::string format_diagnostic(const Diagnostic& d, std::string_view filename) {
  return std::string(filename) + ":" + std::to_string(d.span.line) + ":" +
         std::to_string(d.span.column) + ": error: " + d.message + " [" +
         std::string(to_string(d.code)) + "]";
}

const NamedModel* ModelDocument::find_model(std::string_view name) const {
  for (const auto& m : models)
    if (m.name == name) return &m;
  return nullptr;
}

const NamedContext* ModelDocument::find_context(std::string_view name) const {
  for (const auto& c : contexts)
    if (c.name == name) return &c;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
  Ident, Number, LBrace, RBrace, LParen, RParen, Colon, Comma,
  Assign, EqEq, Arrow, Bang, Amp, Pipe, End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

const char* const kKeywords[] = {"model", "exo",    "var",   "context",
                                 "query", "case",   "else",  "for",
                                 "cause", "effect", "in",    "given"};

bool is_keyword(std::string_view s) {
  for (const char* k : kKeywords)
    if (s == k) return true;
  return false;
}

std::vector<Token> lex(std::string_view src, std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  size_t pos = 0;
  int line = 1, col = 1;
  auto span_here = [&](size_t len) {
    return SourceSpan{line, col, pos, len};
  };
  auto advance = [&](size_t n) {
    for (size_t i = 0; i < n; ++i) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  };
  auto push = [&](Tok kind, size_t len) {
    out.push_back({kind, std::string(src.substr(pos, len)), span_here(len)});
    advance(len);
  };
  while (pos < src.size()) {
    char c = src[pos];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
    } else if (c == '#') {
      while (pos < src.size() && src[pos] != '\n') advance(1);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t len = 1;
      while (pos + len < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos + len])) ||
              src[pos + len] == '_'))
        ++len;
      push(Tok::Ident, len);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t len = 1;
      while (pos + len < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[pos + len])))
        ++len;
      push(Tok::Number, len);
    } else if (c == '{') {
      push(Tok::LBrace, 1);
    } else if (c == '}') {
      push(Tok::RBrace, 1);
    } else if (c == '(') {
      push(Tok::LParen, 1);
    } else if (c == ')') {
      push(Tok::RParen, 1);
    } else if (c == ':') {
      push(Tok::Colon, 1);
    } else if (c == ',') {
      push(Tok::Comma, 1);
    } else if (c == '!') {
      push(Tok::Bang, 1);
    } else if (c == '&') {
      push(Tok::Amp, 1);
    } else if (c == '|') {
      push(Tok::Pipe, 1);
    } else if (c == '=') {
      if (pos + 1 < src.size() && src[pos + 1] == '=') {
        push(Tok::EqEq, 2);
      } else {
        push(Tok::Assign, 1);
      }
    } else if (c == '-' && pos + 1 < src.size() && src[pos + 1] == '>') {
      push(Tok::Arrow, 2);
    } else {
      diags.push_back({DiagCode::Syntax,
                       std::string("unexpected character '") + c + "'",
                       span_here(1)});
      advance(1);
    }
  }
  out.push_back({Tok::End, "", SourceSpan{line, col, pos, 0}});
  return out;
}

SourceSpan span_union(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan s = a;
  s.length = (b.offset + b.length) - a.offset;
  return s;
}

// ---------------------------------------------------------------------------
// Parse trees with source spans
// ---------------------------------------------------------------------------

// Mirrors the shape of an Expr: kids align with operands (or case
// conditions); aux is the Eq right-hand side or the case else value;
// arm_values align with case arm values.
struct SpanTree {
  SourceSpan span;
  SourceSpan aux;
  std::vector<SpanTree> kids;
  std::vector<SourceSpan> arm_values;
};

struct ParsedVar {
  bool exogenous = false;
  std::string name;
  SourceSpan name_span;
  Domain domain;
  ExprPtr expr;  // null for exogenous
  SpanTree spans;
};

struct ParsedModel {
  std::string name;
  SourceSpan name_span;
  std::vector<ParsedVar> vars;
};

struct ParsedBinding {
  std::string name;
  SourceSpan name_span;
  std::string value;
  SourceSpan value_span;
};

struct ParsedContext {
  std::string name;
  SourceSpan name_span;
  std::string model;
  SourceSpan model_span;
  std::vector<ParsedBinding> bindings;
};

struct ParsedQuery {
  std::string definition;
  SourceSpan definition_span;
  ParsedBinding cause;
  ParsedBinding effect;
  std::string model;
  SourceSpan model_span;
  std::string context;
  SourceSpan context_span;
};

struct ExprRes {
  ExprPtr expr;
  SpanTree spans;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
  const std::vector<Token>& toks;
  std::vector<Diagnostic>& diags;
  size_t pos = 0;

  Parser(const std::vector<Token>& tokens, std::vector<Diagnostic>& out)
      : toks(tokens), diags(out) {}

  std::vector<ParsedModel> models;
  std::vector<ParsedContext> contexts;
  std::vector<ParsedQuery> queries;

  const Token& peek(size_t k = 0) const {
    size_t i = std::min(pos + k, toks.size() - 1);
    return toks[i];
  }
  bool at(Tok kind) const { return peek().kind == kind; }
  bool at_kw(std::string_view kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }
  const Token& take() {
    const Token& t = toks[pos];
    if (pos + 1 < toks.size()) ++pos;
    return t;
  }
  void error(const std::string& message, DiagCode code = DiagCode::Syntax) {
    diags.push_back({code, message, peek().span});
  }
  bool expect(Tok kind, const char* what) {
    if (at(kind)) {
      take();
      return true;
    }
    error(std::string("expected ") + what);
    return false;
  }
  bool expect_kw(const char* kw) {
    if (at_kw(kw)) {
      take();
      return true;
    }
    error(std::string("expected '") + kw + "'");
    return false;
  }

  bool at_top_decl() const {
    return at_kw("model") || at_kw("context") || at_kw("query");
  }
  void sync_top() {
    while (!at(Tok::End) && !at_top_decl()) take();
  }
  void sync_model_body() {
    while (!at(Tok::End) && !at(Tok::RBrace) && !at_kw("exo") &&
           !at_kw("var") && !at_top_decl())
      take();
  }

  // NAME that is not a keyword.
  std::optional<std::pair<std::string, SourceSpan>> parse_name(
      const char* what) {
    if (at(Tok::Ident) && !is_keyword(peek().text)) {
      const Token& t = take();
      return std::make_pair(t.text, t.span);
    }
    error(std::string("expected ") + what);
    return std::nullopt;
  }

  // Value token: identifier (non-keyword) or number.
  std::optional<std::pair<std::string, SourceSpan>> parse_value_token() {
    if (at(Tok::Number) || (at(Tok::Ident) && !is_keyword(peek().text))) {
      const Token& t = take();
      return std::make_pair(t.text, t.span);
    }
    error("expected a value token");
    return std::nullopt;
  }

  std::optional<Domain> parse_domain() {
    if (!expect(Tok::LBrace, "'{'")) return std::nullopt;
    Domain d;
    for (;;) {
      auto v = parse_value_token();
      if (!v) return std::nullopt;
      d.values.push_back(v->first);
      if (at(Tok::Comma)) {
        take();
        continue;
      }
      break;
    }
    if (!expect(Tok::RBrace, "'}'")) return std::nullopt;
    return d;
  }

  // --- expressions ---

  std::optional<ExprRes> parse_expr() { return parse_or(); }

  std::optional<ExprRes> parse_or() {
    auto first = parse_and();
    if (!first) return std::nullopt;
    if (!at(Tok::Pipe)) return first;
    std::vector<ExprPtr> ops = {first->expr};
    SpanTree st;
    st.kids.push_back(std::move(first->spans));
    while (at(Tok::Pipe)) {
      take();
      auto next = parse_and();
      if (!next) return std::nullopt;
      ops.push_back(next->expr);
      st.kids.push_back(std::move(next->spans));
    }
    st.span = span_union(st.kids.front().span, st.kids.back().span);
    return ExprRes{Expr::disjunction(std::move(ops)), std::move(st)};
  }

  std::optional<ExprRes> parse_and() {
    auto first = parse_unary();
    if (!first) return std::nullopt;
    if (!at(Tok::Amp)) return first;
    std::vector<ExprPtr> ops = {first->expr};
    SpanTree st;
    st.kids.push_back(std::move(first->spans));
    while (at(Tok::Amp)) {
      take();
      auto next = parse_unary();
      if (!next) return std::nullopt;
      ops.push_back(next->expr);
      st.kids.push_back(std::move(next->spans));
    }
    st.span = span_union(st.kids.front().span, st.kids.back().span);
    return ExprRes{Expr::conjunction(std::move(ops)), std::move(st)};
  }

  std::optional<ExprRes> parse_unary() {
    if (at(Tok::Bang)) {
      SourceSpan bang = take().span;
      auto operand = parse_unary();
      if (!operand) return std::nullopt;
      SpanTree st;
      st.span = span_union(bang, operand->spans.span);
      st.kids.push_back(std::move(operand->spans));
      return ExprRes{Expr::negation(operand->expr), std::move(st)};
    }
    return parse_primary();
  }

  std::optional<ExprRes> parse_primary() {
    if (at(Tok::LParen)) {
      SourceSpan open = take().span;
      auto inner = parse_expr();
      if (!inner) return std::nullopt;
      if (!expect(Tok::RParen, "')'")) return std::nullopt;
      inner->spans.span = span_union(open, toks[pos - 1].span);
      return inner;
    }
    if (at_kw("case")) return parse_case();
    if (at(Tok::Number)) {
      const Token& t = take();
      SpanTree st;
      st.span = t.span;
      return ExprRes{Expr::constant(t.text), std::move(st)};
    }
    if (at(Tok::Ident) && !is_keyword(peek().text)) {
      const Token& t = take();
      if (at(Tok::EqEq)) {
        take();
        auto v = parse_value_token();
        if (!v) return std::nullopt;
        SpanTree st;
        st.span = span_union(t.span, v->second);
        st.aux = v->second;
        return ExprRes{Expr::eq(t.text, v->first), std::move(st)};
      }
      SpanTree st;
      st.span = t.span;
      return ExprRes{Expr::ident(t.text), std::move(st)};
    }
    error("expected an expression");
    return std::nullopt;
  }

  std::optional<ExprRes> parse_case() {
    SourceSpan open = take().span;  // 'case'
    if (!expect(Tok::LBrace, "'{'")) return std::nullopt;
    std::vector<Expr::CaseArm> arms;
    SpanTree st;
    for (;;) {
      if (at_kw("else")) {
        take();
        if (!expect(Tok::Arrow, "'->'")) return std::nullopt;
        auto v = parse_value_token();
        if (!v) return std::nullopt;
        st.aux = v->second;
        if (!expect(Tok::RBrace, "'}'")) return std::nullopt;
        st.span = span_union(open, toks[pos - 1].span);
        return ExprRes{Expr::table(std::move(arms), v->first), std::move(st)};
      }
      if (at(Tok::End)) {
        error("unterminated case expression");
        return std::nullopt;
      }
      auto cond = parse_expr();
      if (!cond) return std::nullopt;
      if (!expect(Tok::Arrow, "'->'")) return std::nullopt;
      auto v = parse_value_token();
      if (!v) return std::nullopt;
      if (!expect(Tok::Comma, "','")) return std::nullopt;
      arms.push_back({cond->expr, v->first});
      st.kids.push_back(std::move(cond->spans));
      st.arm_values.push_back(v->second);
    }
  }

  // --- declarations ---

  void parse_model_decl() {
    take();  // 'model'
    auto name = parse_name("a model name");
    if (!name || !expect(Tok::LBrace, "'{'")) {
      sync_top();
      return;
    }
    ParsedModel pm;
    pm.name = name->first;
    pm.name_span = name->second;
    for (;;) {
      if (at(Tok::RBrace)) {
        take();
        break;
      }
      if (at(Tok::End)) {
        error("unterminated model declaration");
        break;
      }
      if (at_kw("exo")) {
        take();
        auto vn = parse_name("a variable name");
        if (!vn || !expect(Tok::Colon, "':'")) {
          sync_model_body();
          continue;
        }
        auto dom = parse_domain();
        if (!dom) {
          sync_model_body();
          continue;
        }
        ParsedVar v;
        v.exogenous = true;
        v.name = vn->first;
        v.name_span = vn->second;
        v.domain = std::move(*dom);
        pm.vars.push_back(std::move(v));
      } else if (at_kw("var")) {
        take();
        auto vn = parse_name("a variable name");
        if (!vn || !expect(Tok::Colon, "':'")) {
          sync_model_body();
          continue;
        }
        auto dom = parse_domain();
        if (!dom || !expect(Tok::Assign, "'='")) {
          sync_model_body();
          continue;
        }
        auto e = parse_expr();
        if (!e) {
          sync_model_body();
          continue;
        }
        ParsedVar v;
        v.name = vn->first;
        v.name_span = vn->second;
        v.domain = std::move(*dom);
        v.expr = e->expr;
        v.spans = std::move(e->spans);
        pm.vars.push_back(std::move(v));
      } else {
        error("expected 'exo', 'var', or '}'");
        sync_model_body();
      }
    }
    models.push_back(std::move(pm));
  }

  void parse_context_decl() {
    take();  // 'context'
    auto name = parse_name("a context name");
    if (!name || !expect_kw("for")) {
      sync_top();
      return;
    }
    auto model = parse_name("a model name");
    if (!model || !expect(Tok::LBrace, "'{'")) {
      sync_top();
      return;
    }
    ParsedContext pc;
    pc.name = name->first;
    pc.name_span = name->second;
    pc.model = model->first;
    pc.model_span = model->second;
    if (!at(Tok::RBrace)) {
      for (;;) {
        auto vn = parse_name("an exogenous variable name");
        if (!vn || !expect(Tok::Assign, "'='")) {
          sync_top();
          return;
        }
        auto v = parse_value_token();
        if (!v) {
          sync_top();
          return;
        }
        pc.bindings.push_back({vn->first, vn->second, v->first, v->second});
        if (at(Tok::Comma)) {
          take();
          continue;
        }
        break;
      }
    }
    if (!expect(Tok::RBrace, "'}'")) {
      sync_top();
      return;
    }
    contexts.push_back(std::move(pc));
  }

  void parse_query_decl() {
    take();  // 'query'
    auto def = parse_name("a definition name");
    if (!def || !expect_kw("cause")) {
      sync_top();
      return;
    }
    auto parse_literal = [&]() -> std::optional<ParsedBinding> {
      auto vn = parse_name("a variable name");
      if (!vn || !expect(Tok::Assign, "'='")) return std::nullopt;
      auto v = parse_value_token();
      if (!v) return std::nullopt;
      return ParsedBinding{vn->first, vn->second, v->first, v->second};
    };
    auto cause = parse_literal();
    if (!cause || !expect_kw("effect")) {
      sync_top();
      return;
    }
    auto effect = parse_literal();
    if (!effect || !expect_kw("in")) {
      sync_top();
      return;
    }
    auto model = parse_name("a model name");
    if (!model || !expect_kw("given")) {
      sync_top();
      return;
    }
    auto context = parse_name("a context name");
    if (!context) {
      sync_top();
      return;
    }
    ParsedQuery pq;
    pq.definition = def->first;
    pq.definition_span = def->second;
    pq.cause = *cause;
    pq.effect = *effect;
    pq.model = model->first;
    pq.model_span = model->second;
    pq.context = context->first;
    pq.context_span = context->second;
    queries.push_back(std::move(pq));
  }

  void parse_document() {
    while (!at(Tok::End)) {
      if (at_kw("model")) {
        parse_model_decl();
      } else if (at_kw("context")) {
        parse_context_decl();
      } else if (at_kw("query")) {
        parse_query_decl();
      } else {
        error("expected 'model', 'context', or 'query'");
        take();
        sync_top();
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Semantic validation (span-accurate), then model construction
// ---------------------------------------------------------------------------

enum class Position { Output, Boolean };

struct ExprValidator {
  const std::string& target_name;
  const Domain& target_domain;
  const std::map<std::string, const Domain*>& declared;
  std::vector<Diagnostic>& diags;

  void validate(const Expr& e, const SpanTree& st, Position pos) {
    switch (e.kind) {
      case Expr::Kind::Constant:
        check_value(e.name, st.span, pos);
        return;
      case Expr::Kind::Ident:
      case Expr::Kind::Var: {
        auto it = declared.find(e.name);
        if (it != declared.end()) {
          if (e.name == target_name) {
            diags.push_back({DiagCode::SelfReference,
                             "mechanism of " + target_name +
                                 " references its own target",
                             st.span});
          } else if (pos == Position::Boolean && !it->second->is_boolean()) {
            diags.push_back({DiagCode::IllTypedMechanism,
                             "boolean connective applied to non-boolean "
                             "variable " + e.name,
                             st.span});
          }
          return;
        }
        // Not a variable: acceptable only as a value token.
        if (pos == Position::Output &&
            target_domain.index_of(e.name) >= 0)
          return;
        if (pos == Position::Boolean && (e.name == "0" || e.name == "1"))
          return;
        diags.push_back({DiagCode::UndeclaredVariable,
                         "undeclared variable or value token: " + e.name,
                         st.span});
        return;
      }
      case Expr::Kind::Eq: {
        auto it = declared.find(e.name);
        if (it == declared.end()) {
          diags.push_back({DiagCode::UndeclaredVariable,
                           "undeclared variable: " + e.name, st.span});
          return;
        }
        if (e.name == target_name) {
          diags.push_back({DiagCode::SelfReference,
                           "mechanism of " + target_name +
                               " references its own target",
                           st.span});
          return;
        }
        if (it->second->index_of(e.value) < 0)
          diags.push_back({DiagCode::DomainMismatch,
                           "value '" + e.value + "' not in domain of " +
                               e.name,
                           st.aux});
        return;
      }
      case Expr::Kind::Not:
        validate(*e.operands[0], st.kids[0], Position::Boolean);
        return;
      case Expr::Kind::And:
      case Expr::Kind::Or:
        for (size_t i = 0; i < e.operands.size(); ++i)
          validate(*e.operands[i], st.kids[i], Position::Boolean);
        return;
      case Expr::Kind::Case: {
        for (size_t i = 0; i < e.arms.size(); ++i) {
          validate(*e.arms[i].condition, st.kids[i], Position::Boolean);
          check_value(e.arms[i].value, st.arm_values[i], pos);
        }
        check_value(e.else_value, st.aux, pos);
        return;
      }
    }
  }

  void check_value(const std::string& token, const SourceSpan& span,
                   Position pos) {
    if (pos == Position::Output) {
      if (target_domain.index_of(token) < 0) {
        std::string message =
            "value '" + token + "' outside domain of " + target_name;
        if (declared.count(token))
          message += " (case arms yield value tokens, not variables)";
        diags.push_back({DiagCode::DomainMismatch, std::move(message), span});
      }
    } else {
      if (token != "0" && token != "1")
        diags.push_back({DiagCode::IllTypedMechanism,
                         "boolean connective applied to non-boolean value '" +
                             token + "'",
                         span});
    }
  }
};

DiagCode diag_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::CyclicModel: return DiagCode::CyclicModel;
    case ErrorCode::IllTypedMechanism: return DiagCode::IllTypedMechanism;
    case ErrorCode::SelfReference: return DiagCode::SelfReference;
    case ErrorCode::UnknownVariable: return DiagCode::UndeclaredVariable;
    case ErrorCode::ValueOutOfDomain: return DiagCode::DomainMismatch;
    case ErrorCode::DuplicateVariable: return DiagCode::DuplicateName;
    default: return DiagCode::Syntax;
  }
}

ModelDocument build_document(Parser& p, std::vector<Diagnostic>& diags) {
  ModelDocument doc;
  std::set<std::string> model_names;
  std::set<std::string> declared_model_names;

  for (const ParsedModel& pm : p.models) {
    declared_model_names.insert(pm.name);
    if (!model_names.insert(pm.name).second) {
      diags.push_back({DiagCode::DuplicateName,
                       "duplicate model name: " + pm.name, pm.name_span});
      continue;
    }
    std::map<std::string, const Domain*> declared;
    bool ok = true;
    for (const ParsedVar& v : pm.vars) {
      if (declared.count(v.name)) {
        diags.push_back({DiagCode::DuplicateName,
                         "duplicate variable name: " + v.name, v.name_span});
        ok = false;
        continue;
      }
      std::set<std::string> seen_values;
      for (const std::string& t : v.domain.values)
        if (!seen_values.insert(t).second) {
          diags.push_back({DiagCode::DuplicateName,
                           "duplicate value '" + t + "' in domain of " +
                               v.name,
                           v.name_span});
          ok = false;
        }
      declared.emplace(v.name, &v.domain);
    }
    if (!ok) continue;
    size_t before = diags.size();
    for (const ParsedVar& v : pm.vars) {
      if (v.exogenous) continue;
      ExprValidator validator{v.name, v.domain, declared, diags};
      validator.validate(*v.expr, v.spans, Position::Output);
    }
    if (diags.size() != before) continue;

    Signature sig;
    std::vector<Mechanism> mechs;
    for (const ParsedVar& v : pm.vars) {
      if (v.exogenous) {
        sig.exogenous.push_back({v.name, v.domain});
      } else {
        sig.endogenous.push_back({v.name, v.domain});
        mechs.push_back({v.name, v.expr});
      }
    }
    try {
      doc.models.push_back(
          {pm.name, CausalModel::create(std::move(sig), std::move(mechs))});
    } catch (const Error& e) {
      diags.push_back(
          {diag_code_for(e.code()), e.what(), pm.name_span});
    }
  }

  std::set<std::string> context_names;
  for (const ParsedContext& pc : p.contexts) {
    if (!context_names.insert(pc.name).second) {
      diags.push_back({DiagCode::DuplicateName,
                       "duplicate context name: " + pc.name, pc.name_span});
      continue;
    }
    const NamedModel* nm = doc.find_model(pc.model);
    if (!nm) {
      // Only report when the name was never declared; a declared-but-
      // invalid model already produced its own diagnostics.
      if (!declared_model_names.count(pc.model))
        diags.push_back({DiagCode::UnknownName,
                         "unknown model: " + pc.model, pc.model_span});
      continue;
    }
    const CausalModel& m = nm->model;
    Context u;
    u.values.assign(m.exo_count(), -1);
    bool ok = true;
    for (const ParsedBinding& b : pc.bindings) {
      auto v = m.find_var(b.name);
      if (!v) {
        diags.push_back({DiagCode::UndeclaredVariable,
                         "undeclared variable: " + b.name, b.name_span});
        ok = false;
        continue;
      }
      if (!m.is_exogenous(*v)) {
        diags.push_back({DiagCode::InvalidContext,
                         "context assigns endogenous variable: " + b.name,
                         b.name_span});
        ok = false;
        continue;
      }
      if (u.values[*v] >= 0) {
        diags.push_back({DiagCode::DuplicateName,
                         "context assigns " + b.name + " twice",
                         b.name_span});
        ok = false;
        continue;
      }
      int ix = m.domain(*v).index_of(b.value);
      if (ix < 0) {
        diags.push_back({DiagCode::DomainMismatch,
                         "value '" + b.value + "' not in domain of " + b.name,
                         b.value_span});
        ok = false;
        continue;
      }
      u.values[*v] = ix;
    }
    for (VarId v = 0; v < m.exo_count(); ++v)
      if (u.values[v] < 0) {
        diags.push_back({DiagCode::InvalidContext,
                         "context " + pc.name +
                             " missing exogenous variable: " + m.var_name(v),
                         pc.name_span});
        ok = false;
      }
    if (ok) doc.contexts.push_back({pc.name, pc.model, std::move(u)});
  }

  std::set<std::string> declared_context_names;
  for (const ParsedContext& pc : p.contexts) declared_context_names.insert(pc.name);

  for (const ParsedQuery& pq : p.queries) {
    auto def = definition_from_string(pq.definition);
    if (!def) {
      diags.push_back({DiagCode::InvalidQuery,
                       "unknown definition: " + pq.definition,
                       pq.definition_span});
      continue;
    }
    const NamedModel* nm = doc.find_model(pq.model);
    if (!nm) {
      if (!declared_model_names.count(pq.model))
        diags.push_back({DiagCode::UnknownName, "unknown model: " + pq.model,
                         pq.model_span});
      continue;
    }
    const NamedContext* nc = doc.find_context(pq.context);
    if (!nc) {
      if (!declared_context_names.count(pq.context))
        diags.push_back({DiagCode::UnknownName,
                         "unknown context: " + pq.context, pq.context_span});
      continue;
    }
    if (nc->model != pq.model) {
      diags.push_back({DiagCode::InvalidQuery,
                       "context " + pq.context + " is bound to model " +
                           nc->model + ", not " + pq.model,
                       pq.context_span});
      continue;
    }
    bool ok = true;
    for (const ParsedBinding* b : {&pq.cause, &pq.effect}) {
      auto v = nm->model.find_var(b->name);
      if (!v) {
        diags.push_back({DiagCode::UndeclaredVariable,
                         "undeclared variable: " + b->name, b->name_span});
        ok = false;
        continue;
      }
      if (nm->model.is_exogenous(*v)) {
        diags.push_back({DiagCode::InvalidQuery,
                         "exogenous literal not admitted in a query: " +
                             b->name,
                         b->name_span});
        ok = false;
        continue;
      }
      if (nm->model.domain(*v).index_of(b->value) < 0) {
        diags.push_back({DiagCode::DomainMismatch,
                         "value '" + b->value + "' not in domain of " +
                             b->name,
                         b->value_span});
        ok = false;
      }
    }
    if (ok)
      doc.queries.push_back({*def,
                             {pq.cause.name, pq.cause.value},
                             {pq.effect.name, pq.effect.value},
                             pq.model,
                             pq.context});
  }
  return doc;
}

}  // namespace

ParseResult parse_document(std::string_view text) {
  ParseResult result;
  std::vector<Token> toks = lex(text, result.diagnostics);
  Parser parser{toks, result.diagnostics};
  parser.parse_document();
  ModelDocument doc = build_document(parser, result.diagnostics);
  if (result.diagnostics.empty()) result.document = std::move(doc);
  return result;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Precedence: | is 1, & is 2, ! is 3, everything else binds tightest.
int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Or: return 1;
    case Expr::Kind::And: return 2;
    case Expr::Kind::Not: return 3;
    default: return 4;
  }
}

void print_rec(std::string& out, const Expr& e, int parent_prec, int indent) {
  bool parens = precedence(e) < parent_prec;
  if (parens) out += "(";
  switch (e.kind) {
    case Expr::Kind::Constant:
    case Expr::Kind::Var:
    case Expr::Kind::Ident:
      out += e.name;
      break;
    case Expr::Kind::Eq:
      out += e.name + " == " + e.value;
      break;
    case Expr::Kind::Not: {
      out += "!";
      const Expr& op = *e.operands[0];
      // "==" binds tighter than "!", but "!X == 1" reads poorly; keep the
      // parentheses (they do not change the parse).
      if (op.kind == Expr::Kind::Eq) {
        out += "(";
        print_rec(out, op, 0, indent);
        out += ")";
      } else {
        print_rec(out, op, precedence(e), indent);
      }
      break;
    }
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      const char* sep = e.kind == Expr::Kind::And ? " & " : " | ";
      int child_prec = precedence(e) + 1;
      for (size_t i = 0; i < e.operands.size(); ++i) {
        if (i > 0) out += sep;
        print_rec(out, *e.operands[i], child_prec, indent);
      }
      break;
    }
    case Expr::Kind::Case: {
      std::string pad(indent + 2, ' ');
      out += "case {\n";
      for (const auto& arm : e.arms) {
        out += pad;
        print_rec(out, *arm.condition, 0, indent + 2);
        out += " -> " + arm.value + ",\n";
      }
      out += pad + "else -> " + e.else_value + "\n";
      out += std::string(indent, ' ') + "}";
      break;
    }
  }
  if (parens) out += ")";
}

std::string domain_string(const Domain& d) {
  std::string out = "{";
  for (int i = 0; i < d.size(); ++i) {
    if (i > 0) out += ", ";
    out += d.token(i);
  }
  out += "}";
  return out;
}

}  // namespace

std::string print_expr(const Expr& expr) {
  std::string out;
  print_rec(out, expr, 0, 0);
  return out;
}

std::string print_document(const ModelDocument& doc) {
  std::string out;
  bool first = true;
  auto sep = [&]() {
    if (!first) out += "\n";
    first = false;
  };
  for (const NamedModel& nm : doc.models) {
    sep();
    const CausalModel& m = nm.model;
    out += "model " + nm.name + " {\n";
    for (VarId v = 0; v < m.exo_count(); ++v)
      out += "  exo " + m.var_name(v) + " : " + domain_string(m.domain(v)) +
             "\n";
    for (VarId v = m.exo_count(); v < m.var_count(); ++v) {
      out += "  var " + m.var_name(v) + " : " + domain_string(m.domain(v)) +
             " = ";
      print_rec(out, *m.mechanism_expr(v), 0, 2);
      out += "\n";
    }
    out += "}\n";
  }
  for (const NamedContext& nc : doc.contexts) {
    sep();
    const NamedModel* nm = doc.find_model(nc.model);
    out += "context " + nc.name + " for " + nc.model + " {";
    if (nm && nm->model.exo_count() > 0) {
      for (VarId v = 0; v < nm->model.exo_count(); ++v) {
        out += v == 0 ? " " : ", ";
        out += nm->model.var_name(v) + " = " +
               nm->model.domain(v).token(nc.values.values[v]);
      }
      out += " ";
    } else {
      out += " ";
    }
    out += "}\n";
  }
  for (const QueryDecl& q : doc.queries) {
    sep();
    out += "query " + std::string(to_string(q.definition)) + " cause " +
           q.cause.var + "=" + q.cause.value + " effect " + q.effect.var +
           "=" + q.effect.value + " in " + q.model + " given " + q.context +
           "\n";
  }
  return out;
}

bool documents_equal(const ModelDocument& a, const ModelDocument& b) {
  if (a.models.size() != b.models.size()) return false;
  if (a.contexts.size() != b.contexts.size()) return false;
  if (a.queries.size() != b.queries.size()) return false;
  for (size_t i = 0; i < a.models.size(); ++i) {
    const NamedModel& x = a.models[i];
    const NamedModel& y = b.models[i];
    if (x.name != y.name) return false;
    const CausalModel& mx = x.model;
    const CausalModel& my = y.model;
    if (mx.var_count() != my.var_count() || mx.exo_count() != my.exo_count())
      return false;
    for (VarId v = 0; v < mx.var_count(); ++v) {
      if (mx.var_name(v) != my.var_name(v)) return false;
      if (!(mx.domain(v) == my.domain(v))) return false;
    }
    for (VarId v = mx.exo_count(); v < mx.var_count(); ++v)
      if (!expr_equal(mx.mechanism_expr(v), my.mechanism_expr(v)))
        return false;
  }
  for (size_t i = 0; i < a.contexts.size(); ++i) {
    const NamedContext& x = a.contexts[i];
    const NamedContext& y = b.contexts[i];
    if (x.name != y.name || x.model != y.model || !(x.values == y.values))
      return false;
  }
  for (size_t i = 0; i < a.queries.size(); ++i)
    if (!(a.queries[i] == b.queries[i])) return false;
  return true;
}

}  // namespace acause
