// Copyright 2026 The TrendSketch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// @file constraint.hpp
/// @brief Structured annotation constraints: AST, text grammar, evaluation
/// against signals and intersection with geometric rankings.
///
/// Grammar (keywords are case-insensitive):
///
///   expr      := and_expr { OR and_expr }
///   and_expr  := unary { AND unary }
///   unary     := NOT unary | '(' expr ')' | predicate
///   predicate := field op literal
///              | field IN '(' literal { ',' literal } ')'
///              | field BETWEEN literal AND literal
///   op        := '=' | '!=' | '<>' | '<' | '<=' | '>' | '>='
///   literal   := 'string' | "string" | number | inf | -inf
///              | @epoch-seconds | ISO-8601 date
///
/// The schema decides what a predicate means. On the time field (also
/// reachable as `time`) it becomes a TimeRange; bare integers there are
/// years. On a measure it becomes a ValueRange. On a categorical field it
/// stays a Compare or In. Strict bounds use the adjacent representable
/// double, so `x > 3` is ValueRange(x, nextafter(3, +inf), +inf).

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "trendsketch/core.hpp"
#include "trendsketch/time.hpp"

namespace trendsketch {

enum class CompareOp { kEq, kNe, kLt, kLe, kGt, kGe };

using Literal = std::variant<std::string, double>;

struct ConstraintExpr;

struct Compare {
  std::string field;
  CompareOp op = CompareOp::kEq;
  Literal value;
};

struct In {
  std::string field;
  std::vector<Literal> values;
};

/// Closed interval of epoch seconds; infinite ends are open-ended.
struct TimeRange {
  double start = -kInf;
  double end = kInf;
};

/// Closed interval on one measure.
struct ValueRange {
  std::string measure;
  double lo = -kInf;
  double hi = kInf;
};

struct And {
  std::vector<ConstraintExpr> operands;
};

struct Or {
  std::vector<ConstraintExpr> operands;
};

struct Not {
  std::shared_ptr<const ConstraintExpr> operand;
};

struct ConstraintExpr {
  std::variant<Compare, In, TimeRange, ValueRange, And, Or, Not> node;
};

inline ConstraintExpr make_not(ConstraintExpr e) {
  return ConstraintExpr{Not{std::make_shared<const ConstraintExpr>(std::move(e))}};
}

inline bool operator==(const ConstraintExpr& a, const ConstraintExpr& b);

inline bool operator==(const Compare& a, const Compare& b) {
  return a.field == b.field && a.op == b.op && a.value == b.value;
}
inline bool operator==(const In& a, const In& b) {
  return a.field == b.field && a.values == b.values;
}
inline bool operator==(const TimeRange& a, const TimeRange& b) {
  return a.start == b.start && a.end == b.end;
}
inline bool operator==(const ValueRange& a, const ValueRange& b) {
  return a.measure == b.measure && a.lo == b.lo && a.hi == b.hi;
}
inline bool operator==(const And& a, const And& b) { return a.operands == b.operands; }
inline bool operator==(const Or& a, const Or& b) { return a.operands == b.operands; }
inline bool operator==(const Not& a, const Not& b) {
  return a.operand && b.operand && *a.operand == *b.operand;
}
inline bool operator==(const ConstraintExpr& a, const ConstraintExpr& b) {
  return a.node == b.node;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    out += c;
    if (c == '\'') out += '\'';
  }
  return out + "'";
}

inline std::string format_literal(const Literal& l) {
  if (const auto* s = std::get_if<std::string>(&l)) return quote(*s);
  return format_number(std::get<double>(l));
}

inline const char* op_text(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "!=";
    case CompareOp::kLt: return "<";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGt: return ">";
    case CompareOp::kGe: return ">=";
  }
  return "=";
}

inline std::string epoch(double v) { return "@" + format_number(v); }

}  // namespace detail

/// Text form that parses back to a structurally equal expression.
inline std::string to_string(const ConstraintExpr& e) {
  struct Printer {
    std::string operator()(const Compare& c) const {
      return c.field + " " + detail::op_text(c.op) + " " + detail::format_literal(c.value);
    }
    std::string operator()(const In& in) const {
      std::string out = in.field + " IN (";
      for (std::size_t i = 0; i < in.values.size(); ++i) {
        if (i) out += ", ";
        out += detail::format_literal(in.values[i]);
      }
      return out + ")";
    }
    std::string operator()(const TimeRange& r) const {
      if (!std::isinf(r.start) && r.end == kInf) return "time >= " + detail::epoch(r.start);
      if (r.start == -kInf && !std::isinf(r.end)) return "time <= " + detail::epoch(r.end);
      return "time BETWEEN " + detail::epoch(r.start) + " AND " + detail::epoch(r.end);
    }
    std::string operator()(const ValueRange& r) const {
      return r.measure + " BETWEEN " + detail::format_number(r.lo) + " AND " +
             detail::format_number(r.hi);
    }
    std::string join(const std::vector<ConstraintExpr>& ops, const char* sep) const {
      std::string out;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        if (i) out += sep;
        out += wrapped(ops[i]);
      }
      return out;
    }
    std::string operator()(const And& a) const { return join(a.operands, " AND "); }
    std::string operator()(const Or& o) const { return join(o.operands, " OR "); }
    std::string operator()(const Not& n) const { return "NOT " + wrapped(*n.operand); }
    std::string wrapped(const ConstraintExpr& child) const {
      const bool compound = std::holds_alternative<And>(child.node) ||
                            std::holds_alternative<Or>(child.node);
      const std::string s = std::visit(*this, child.node);
      return compound ? "(" + s + ")" : s;
    }
  };
  return std::visit(Printer{}, e.node);
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
  enum Kind { kWord, kString, kOp, kLParen, kRParen, kComma, kEnd } kind = kEnd;
  std::string text;
  std::size_t pos = 0;
};

inline Error constraint_error(std::size_t pos, const std::string& msg) {
  return Error(ErrorKind::kConstraint,
               "constraint: " + msg + " (at position " + std::to_string(pos) + ")");
}

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_op_char = [](char c) { return c == '=' || c == '!' || c == '<' || c == '>'; };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (c == '(' || c == ')' || c == ',') {
      out.push_back({c == '(' ? Token::kLParen : c == ')' ? Token::kRParen : Token::kComma,
                     std::string(1, c), start});
      ++i;
    } else if (c == '\'' || c == '"') {
      std::string text;
      ++i;
      bool closed = false;
      while (i < src.size()) {
        if (src[i] == c) {
          if (i + 1 < src.size() && src[i + 1] == c) {
            text += c;
            i += 2;
            continue;
          }
          closed = true;
          ++i;
          break;
        }
        text += src[i++];
      }
      if (!closed) throw constraint_error(start, "unterminated string literal");
      out.push_back({Token::kString, std::move(text), start});
    } else if (is_op_char(c)) {
      std::string op(1, c);
      ++i;
      if (i < src.size() && (src[i] == '=' || (c == '<' && src[i] == '>'))) op += src[i++];
      if (op == "!") throw constraint_error(start, "expected '!='");
      out.push_back({Token::kOp, std::move(op), start});
    } else {
      while (i < src.size() && !std::isspace(static_cast<unsigned char>(src[i])) &&
             src[i] != '(' && src[i] != ')' && src[i] != ',' && src[i] != '\'' &&
             src[i] != '"' && !is_op_char(src[i])) {
        ++i;
      }
      out.push_back({Token::kWord, std::string(src.substr(start, i - start)), start});
    }
  }
  out.push_back({Token::kEnd, "", src.size()});
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

inline std::optional<double> parse_number(std::string_view s) {
  if (iequals(s, "inf") || iequals(s, "+inf")) return kInf;
  if (iequals(s, "-inf")) return -kInf;
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || std::isnan(v)) return std::nullopt;
  // strtod accepts "infinity", hex floats and friends; only plain decimals
  // get here.
  if (!std::isdigit(static_cast<unsigned char>(buf.back())) && buf.back() != '.') {
    return std::nullopt;
  }
  return v;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

enum class FieldRole { kTime, kMeasure, kCategorical };

class Parser {
 public:
  Parser(std::string_view src, const Schema& schema)
      : tokens_(tokenize(src)), schema_(schema) {}

  ConstraintExpr parse() {
    if (peek().kind == Token::kEnd) throw constraint_error(0, "empty expression");
    ConstraintExpr e = parse_or();
    if (peek().kind != Token::kEnd) {
      throw constraint_error(peek().pos, "unexpected '" + peek().text + "'");
    }
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool keyword(std::string_view kw) const {
    return peek().kind == Token::kWord && iequals(peek().text, kw);
  }

  ConstraintExpr parse_or() {
    std::vector<ConstraintExpr> ops{parse_and()};
    while (keyword("OR")) {
      next();
      ops.push_back(parse_and());
    }
    if (ops.size() == 1) return std::move(ops.front());
    return ConstraintExpr{Or{std::move(ops)}};
  }

  ConstraintExpr parse_and() {
    std::vector<ConstraintExpr> ops{parse_unary()};
    while (keyword("AND")) {
      next();
      ops.push_back(parse_unary());
    }
    if (ops.size() == 1) return std::move(ops.front());
    return ConstraintExpr{And{std::move(ops)}};
  }

  ConstraintExpr parse_unary() {
    if (keyword("NOT")) {
      next();
      return make_not(parse_unary());
    }
    if (peek().kind == Token::kLParen) {
      next();
      ConstraintExpr e = parse_or();
      if (peek().kind != Token::kRParen) throw constraint_error(peek().pos, "expected ')'");
      next();
      return e;
    }
    return parse_predicate();
  }

  FieldRole role_of(const Token& t) const {
    if (t.text == schema_.time_field) return FieldRole::kTime;
    if (schema_.measure_index(t.text)) return FieldRole::kMeasure;
    if (schema_.is_categorical(t.text)) return FieldRole::kCategorical;
    if (iequals(t.text, "time")) return FieldRole::kTime;
    throw constraint_error(t.pos, "unknown field '" + t.text + "'");
  }

  double time_literal(const Token& t) {
    if (t.kind == Token::kWord && !t.text.empty() && t.text[0] == '@') {
      if (auto v = parse_number(std::string_view(t.text).substr(1))) return *v;
      throw constraint_error(t.pos, "bad epoch literal '" + t.text + "'");
    }
    if (t.kind == Token::kWord) {
      if (auto v = timeutil::parse_year_or_iso(t.text)) return *v;
      if (parse_number(t.text)) {
        throw constraint_error(t.pos, "type mismatch: time literal '" + t.text +
                                          "' must be a year, ISO-8601 date or @seconds");
      }
    }
    if (t.kind == Token::kString) {
      if (auto v = timeutil::parse_iso8601(t.text)) return *v;
      throw constraint_error(t.pos, "type mismatch: '" + t.text + "' is not an ISO-8601 time");
    }
    throw constraint_error(t.pos, "expected a time literal");
  }

  double number_literal(const Token& t, const std::string& field) {
    if (t.kind == Token::kString) {
      throw constraint_error(t.pos, "type mismatch: string literal for numeric field '" +
                                        field + "'");
    }
    if (t.kind == Token::kWord) {
      if (auto v = parse_number(t.text)) return *v;
    }
    throw constraint_error(t.pos, "expected a number for field '" + field + "'");
  }

  Literal categorical_literal(const Token& t) {
    if (t.kind == Token::kString) return t.text;
    if (t.kind == Token::kWord) {
      if (auto v = parse_number(t.text)) return *v;
    }
    throw constraint_error(t.pos, "expected a quoted string or number");
  }

  double bound(const Token& t, FieldRole role, const std::string& field) {
    return role == FieldRole::kTime ? time_literal(t) : number_literal(t, field);
  }

  ConstraintExpr range(FieldRole role, const std::string& field, double lo, double hi,
                       std::size_t pos) {
    if (!(lo <= hi)) throw constraint_error(pos, "empty range for '" + field + "'");
    if (role == FieldRole::kTime) return ConstraintExpr{TimeRange{lo, hi}};
    return ConstraintExpr{ValueRange{field, lo, hi}};
  }

  ConstraintExpr parse_predicate() {
    const Token field = next();
    if (field.kind != Token::kWord || !is_identifier(field.text)) {
      throw constraint_error(field.pos, field.kind == Token::kEnd
                                            ? "unexpected end of expression"
                                            : "expected a field name, got '" + field.text + "'");
    }
    const FieldRole role = role_of(field);

    if (keyword("IN")) {
      next();
      if (role != FieldRole::kCategorical) {
        throw constraint_error(field.pos, "type mismatch: IN needs a categorical field");
      }
      if (peek().kind != Token::kLParen) throw constraint_error(peek().pos, "expected '('");
      next();
      In in{field.text, {}};
      while (true) {
        in.values.push_back(categorical_literal(next()));
        if (peek().kind == Token::kComma) {
          next();
          continue;
        }
        if (peek().kind != Token::kRParen) throw constraint_error(peek().pos, "expected ')' or ','");
        next();
        break;
      }
      return ConstraintExpr{std::move(in)};
    }

    if (keyword("BETWEEN")) {
      next();
      if (role == FieldRole::kCategorical) {
        throw constraint_error(field.pos, "type mismatch: BETWEEN needs a time or measure field");
      }
      const double lo = bound(next(), role, field.text);
      if (!keyword("AND")) throw constraint_error(peek().pos, "expected AND in BETWEEN");
      next();
      const double hi = bound(next(), role, field.text);
      return range(role, field.text, lo, hi, field.pos);
    }

    const Token op_tok = next();
    if (op_tok.kind != Token::kOp) {
      throw constraint_error(op_tok.pos, "expected a comparison operator after '" +
                                             field.text + "'");
    }
    CompareOp op;
    if (op_tok.text == "=" || op_tok.text == "==") op = CompareOp::kEq;
    else if (op_tok.text == "!=" || op_tok.text == "<>") op = CompareOp::kNe;
    else if (op_tok.text == "<") op = CompareOp::kLt;
    else if (op_tok.text == "<=") op = CompareOp::kLe;
    else if (op_tok.text == ">") op = CompareOp::kGt;
    else if (op_tok.text == ">=") op = CompareOp::kGe;
    else throw constraint_error(op_tok.pos, "unknown operator '" + op_tok.text + "'");

    const Token lit = next();
    if (role == FieldRole::kCategorical) {
      return ConstraintExpr{Compare{field.text, op, categorical_literal(lit)}};
    }
    const double v = bound(lit, role, field.text);
    switch (op) {
      case CompareOp::kEq: return range(role, field.text, v, v, field.pos);
      case CompareOp::kNe: return make_not(range(role, field.text, v, v, field.pos));
      case CompareOp::kLt: return range(role, field.text, -kInf, std::nextafter(v, -kInf), field.pos);
      case CompareOp::kLe: return range(role, field.text, -kInf, v, field.pos);
      case CompareOp::kGt: return range(role, field.text, std::nextafter(v, kInf), kInf, field.pos);
      case CompareOp::kGe: return range(role, field.text, v, kInf, field.pos);
    }
    throw constraint_error(op_tok.pos, "unreachable");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Schema& schema_;
};

}  // namespace detail

/// Parses @p text against @p schema. Errors are kConstraint and name the
/// offending position.
inline ConstraintExpr parse_constraint(std::string_view text, const Schema& schema) {
  return detail::Parser(text, schema).parse();
}

/// Checks an expression built elsewhere (e.g. deserialized JSON) against the
/// schema. Throws kConstraint on unknown fields, wrong field roles or empty
/// ranges.
inline void validate(const ConstraintExpr& e, const Schema& schema) {
  struct V {
    const Schema& schema;
    void operator()(const Compare& c) const {
      if (!schema.is_categorical(c.field)) {
        throw Error(ErrorKind::kConstraint, "constraint: '" + c.field + "' is not a categorical field");
      }
    }
    void operator()(const In& in) const {
      if (!schema.is_categorical(in.field)) {
        throw Error(ErrorKind::kConstraint, "constraint: '" + in.field + "' is not a categorical field");
      }
      if (in.values.empty()) throw Error(ErrorKind::kConstraint, "constraint: IN with no values");
    }
    void operator()(const TimeRange& r) const {
      if (!(r.start <= r.end)) throw Error(ErrorKind::kConstraint, "constraint: empty time range");
    }
    void operator()(const ValueRange& r) const {
      if (!schema.measure_index(r.measure)) {
        throw Error(ErrorKind::kConstraint, "constraint: unknown measure '" + r.measure + "'");
      }
      if (!(r.lo <= r.hi)) throw Error(ErrorKind::kConstraint, "constraint: empty value range");
    }
    void operator()(const And& a) const {
      if (a.operands.empty()) throw Error(ErrorKind::kConstraint, "constraint: empty AND");
      for (const auto& o : a.operands) std::visit(*this, o.node);
    }
    void operator()(const Or& a) const {
      if (a.operands.empty()) throw Error(ErrorKind::kConstraint, "constraint: empty OR");
      for (const auto& o : a.operands) std::visit(*this, o.node);
    }
    void operator()(const Not& n) const {
      if (!n.operand) throw Error(ErrorKind::kConstraint, "constraint: NOT without operand");
      std::visit(*this, n.operand->node);
    }
  };
  std::visit(V{schema}, e.node);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

/// Numeric comparison when both sides read as numbers, lexicographic
/// otherwise. Returns <0, 0, >0.
inline int compare_dim(const std::string& value, const Literal& lit) {
  if (const auto* d = std::get_if<double>(&lit)) {
    if (auto v = parse_number(value)) return *v < *d ? -1 : *v > *d ? 1 : 0;
    const int c = value.compare(format_number(*d));
    return c < 0 ? -1 : c > 0 ? 1 : 0;
  }
  const int c = value.compare(std::get<std::string>(lit));
  return c < 0 ? -1 : c > 0 ? 1 : 0;
}

inline bool apply(CompareOp op, int c) {
  switch (op) {
    case CompareOp::kEq: return c == 0;
    case CompareOp::kNe: return c != 0;
    case CompareOp::kLt: return c < 0;
    case CompareOp::kLe: return c <= 0;
    case CompareOp::kGt: return c > 0;
    case CompareOp::kGe: return c >= 0;
  }
  return false;
}

}  // namespace detail

/// Compare/In test categorical dimensions; TimeRange holds when the
/// signal's time extent overlaps the range; ValueRange holds when any point
/// of the measure falls inside it.
inline bool evaluate(const ConstraintExpr& e, const Signal& signal, const Schema& schema) {
  struct E {
    const Signal& s;
    const Schema& schema;
    const std::string* dim(const std::string& f) const {
      auto it = s.dims().find(f);
      return it == s.dims().end() ? nullptr : &it->second;
    }
    bool operator()(const Compare& c) const {
      const auto* v = dim(c.field);
      return v && detail::apply(c.op, detail::compare_dim(*v, c.value));
    }
    bool operator()(const In& in) const {
      const auto* v = dim(in.field);
      return v && std::any_of(in.values.begin(), in.values.end(), [&](const Literal& l) {
               return detail::compare_dim(*v, l) == 0;
             });
    }
    bool operator()(const TimeRange& r) const {
      return s.t_first() <= r.end && s.t_last() >= r.start;
    }
    bool operator()(const ValueRange& r) const {
      const auto k = schema.measure_index(r.measure);
      if (!k) return false;
      return std::any_of(s.points().begin(), s.points().end(), [&](const Point& p) {
        return p.y[*k] >= r.lo && p.y[*k] <= r.hi;
      });
    }
    bool operator()(const And& a) const {
      return std::all_of(a.operands.begin(), a.operands.end(),
                         [&](const ConstraintExpr& x) { return std::visit(*this, x.node); });
    }
    bool operator()(const Or& o) const {
      return std::any_of(o.operands.begin(), o.operands.end(),
                         [&](const ConstraintExpr& x) { return std::visit(*this, x.node); });
    }
    bool operator()(const Not& n) const { return !std::visit(*this, n.operand->node); }
  };
  return std::visit(E{signal, schema}, e.node);
}

/// Ids of the signals in @p dataset that satisfy @p e.
inline std::unordered_set<std::string> allowed_ids(const ConstraintExpr& e, const Dataset& dataset) {
  std::unordered_set<std::string> out;
  for (const auto& s : dataset.signals()) {
    if (evaluate(e, s, dataset.schema())) out.insert(s.id());
  }
  return out;
}

/// Keeps the entries whose id is allowed, preserving order and scores.
inline RankedMatches intersect(const RankedMatches& geom,
                               const std::unordered_set<std::string>& allowed) {
  RankedMatches out;
  for (const auto& e : geom.entries) {
    if (allowed.count(e.signal_id)) out.entries.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annotation interpretation boundary
// ---------------------------------------------------------------------------

/// What the UI sends alongside a sketch. Only typed text is interpreted by
/// the built-in interpreter; image-based interpreters can use the rest.
struct AnnotationPayload {
  std::string text;
};

/// Turns annotations into a schema-valid constraint, or throws kConstraint.
class AnnotationInterpreter {
 public:
  virtual ~AnnotationInterpreter() = default;
  virtual ConstraintExpr interpret(const AnnotationPayload& payload,
                                   const Schema& schema) const = 0;
};

class TextConstraintInterpreter final : public AnnotationInterpreter {
 public:
  ConstraintExpr interpret(const AnnotationPayload& payload,
                           const Schema& schema) const override {
    ConstraintExpr e = parse_constraint(payload.text, schema);
    validate(e, schema);
    return e;
  }
};

}  // namespace trendsketch
