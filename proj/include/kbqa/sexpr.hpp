#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kbqa/kb_store.hpp"

namespace kbqa {

// ---------------------------------------------------------------------------
// Logical forms over a triple store, written as S-expressions:
//
//   EXPR := ATOM
//         | (AND EXPR EXPR)          set intersection (n-ary input right-associates)
//         | (JOIN REL EXPR)          relational image
//         | (COUNT EXPR)             cardinality, root only
//         | (ARGMIN EXPR rel)        minimizers of a numeric relation, root only
//         | (ARGMAX EXPR rel)        maximizers, root only
//         | (cmp rel LITERAL)        cmp in {lt, le, gt, ge}
//   REL  := rel | (R rel)            (R rel) traverses the relation backwards
//
// Atoms are class names (food.beer), entity ids (m.012d40 — the m./g. id
// convention marks entities), literal tokens (1.067^^float), or template
// placeholders (?entity, ?literal:float) used by the sampling pipeline.
//
// A logical-form string may carry a trailing entity annotation block
// ("... |entity|m.012d40 jackie chan|m.0f1x label2"); the parser strips it
// into a side map of entity labels.
// ---------------------------------------------------------------------------

enum class SExprKind {
    ClassAtom,
    EntityAtom,
    LiteralAtom,
    Placeholder,
    And,
    Join,
    Count,
    ArgMin,
    ArgMax,
    Cmp,
};

enum class CmpOp { Lt, Le, Gt, Ge };

std::string_view cmp_op_name(CmpOp op);

struct SExpr {
    SExprKind kind = SExprKind::ClassAtom;
    std::string name;                   // class/entity id; relation for Join/Cmp/ArgMin/ArgMax
    bool inverse = false;               // Join only: relation traversed backwards
    CmpOp op = CmpOp::Lt;               // Cmp only
    Literal literal;                    // LiteralAtom value, Cmp bound
    bool placeholder_literal = false;   // Placeholder only: literal slot vs entity slot
    std::string placeholder_hint;       // Placeholder only: class name or literal kind
    std::vector<SExpr> children;

    bool operator==(const SExpr& other) const;
};

struct ParsedExpr {
    SExpr expr;
    std::map<std::string, std::string> entity_labels;  // from the |entity| annotation
};

// Throws ParseError with a byte offset on malformed input.
ParsedExpr parse_sexpr(std::string_view text);

// Canonical form: single spaces, binary AND nesting, uppercase set operators,
// lowercase comparators.  parse(serialize(e)) reproduces e.
std::string serialize_sexpr(const SExpr& expr);

// serialize(parse(text)); normalizes whitespace and n-ary AND surface forms.
std::string canonical_form(std::string_view text);

// Exactly one function tag applies to every expression.
enum class FunctionTag { None, Count, Comparative, Superlative };

std::string_view function_tag_name(FunctionTag tag);

struct Analysis {
    std::vector<std::string> entities;   // distinct, first-mention order
    std::vector<std::string> relations;  // distinct, first-mention order
    std::vector<std::string> classes;    // distinct, first-mention order
    FunctionTag function = FunctionTag::None;
    int hops = 0;  // JOIN count along the deepest root-to-leaf path
};

Analysis analyze(const SExpr& expr);

struct Diagnostic {
    enum class Severity { Structural, Name, Warning };
    Severity severity = Severity::Structural;
    std::string message;
    std::string node;  // serialized offending subexpression
};

// Structural checks (function nodes at root only, numeric comparator bounds,
// set-valued AND operands, no placeholders) plus name resolution against the
// schema.  Name diagnostics never block execution; structural ones do.
std::vector<Diagnostic> validate(const SExpr& expr, const SchemaCatalog& schema);

bool has_structural_diagnostics(const std::vector<Diagnostic>& diags);

}  // namespace kbqa
