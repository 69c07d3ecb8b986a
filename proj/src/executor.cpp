#include "kbqa/executor.hpp"

#include <limits>

#include "kbqa/errors.hpp"

namespace kbqa {

namespace {

// Internal value: entities and literals tracked separately so the final
// answer kind follows from provenance instead of token sniffing.
struct ValueSet {
    std::set<std::string> entities;
    std::set<std::string> literals;

    std::size_t size() const { return entities.size() + literals.size(); }
};

class Evaluator {
public:
    Evaluator(const TripleStore& store, const ExecOptions& options,
              std::vector<Diagnostic>* diagnostics)
        : store_(store), options_(options), diagnostics_(diagnostics) {}

    AnswerSet run(const SExpr& expr) {
        if (expr.kind == SExprKind::Count) {
            ValueSet inner = eval(expr.children[0]);
            return AnswerSet::counted(inner.size());
        }
        ValueSet value = eval(expr);
        if (!value.entities.empty() && !value.literals.empty()) {
            throw ExecError(ExecError::Kind::TypeError,
                            "expression yields a mixed entity/literal answer set");
        }
        if (!value.literals.empty()) return AnswerSet::literals(std::move(value.literals));
        return AnswerSet::entities(std::move(value.entities));
    }

private:
    void note(Diagnostic::Severity severity, std::string message, const SExpr& node) {
        if (diagnostics_) {
            diagnostics_->push_back({severity, std::move(message), serialize_sexpr(node)});
        }
    }

    void guard_size(std::size_t size) const {
        if (size > options_.max_intermediate) {
            throw ExecError(ExecError::Kind::Capacity,
                            "intermediate set exceeds cap of " +
                                std::to_string(options_.max_intermediate));
        }
    }

    ValueSet eval(const SExpr& expr) {
        switch (expr.kind) {
            case SExprKind::ClassAtom: {
                ValueSet out;
                if (!store_.schema().classes.count(expr.name)) {
                    note(Diagnostic::Severity::Name, "unknown class '" + expr.name + "'", expr);
                }
                const TokenSet& instances = store_.instances_of(expr.name);
                guard_size(instances.size());
                out.entities.insert(instances.begin(), instances.end());
                return out;
            }
            case SExprKind::EntityAtom: {
                ValueSet out;
                out.entities.insert(expr.name);
                return out;
            }
            case SExprKind::LiteralAtom: {
                ValueSet out;
                out.literals.insert(expr.literal.encoded());
                return out;
            }
            case SExprKind::Placeholder:
                throw ExecError(ExecError::Kind::TypeError,
                                "cannot execute an ungrounded placeholder");
            case SExprKind::And:
                return eval_and(expr);
            case SExprKind::Join:
                return eval_join(expr);
            case SExprKind::Cmp:
                return eval_cmp(expr);
            case SExprKind::ArgMin:
            case SExprKind::ArgMax:
                return eval_superlative(expr);
            case SExprKind::Count:
                throw ExecError(ExecError::Kind::TypeError,
                                "COUNT nested inside a set expression");
        }
        return {};
    }

    ValueSet eval_and(const SExpr& expr) {
        ValueSet left = eval(expr.children[0]);
        ValueSet right = eval(expr.children[1]);
        ValueSet out;
        for (const std::string& token : left.entities) {
            if (right.entities.count(token)) out.entities.insert(token);
        }
        for (const std::string& token : left.literals) {
            if (right.literals.count(token)) out.literals.insert(token);
        }
        return out;
    }

    ValueSet eval_join(const SExpr& expr) {
        if (!store_.schema().relations.count(expr.name)) {
            note(Diagnostic::Severity::Name, "unknown relation '" + expr.name + "'", expr);
        }
        ValueSet operand = eval(expr.children[0]);
        ValueSet out;
        if (!expr.inverse) {
            // {x : exists y in S, (x, rel, y)}; y may be an entity or literal.
            auto gather = [&](const std::set<std::string>& tokens) {
                for (const std::string& token : tokens) {
                    const TokenSet& subjects = store_.subjects_of(expr.name, token);
                    out.entities.insert(subjects.begin(), subjects.end());
                    guard_size(out.size());
                }
            };
            gather(operand.entities);
            gather(operand.literals);
        } else {
            // {x : exists y in S, (y, rel, x)}; only entities can be subjects,
            // so literal members of S contribute nothing.
            for (const std::string& subject : operand.entities) {
                for (const std::string& token : store_.objects_of(subject, expr.name)) {
                    if (store_.literal_from_token(token)) {
                        out.literals.insert(token);
                    } else {
                        out.entities.insert(token);
                    }
                    guard_size(out.size());
                }
            }
        }
        return out;
    }

    ValueSet eval_cmp(const SExpr& expr) {
        if (!expr.children.empty()) {
            throw ExecError(ExecError::Kind::TypeError, "comparator bound is not grounded");
        }
        if (!expr.literal.is_numeric()) {
            throw ExecError(ExecError::Kind::TypeError,
                            "comparator bound must be numeric: " + expr.literal.encoded());
        }
        if (!store_.schema().relations.count(expr.name)) {
            note(Diagnostic::Severity::Name, "unknown relation '" + expr.name + "'", expr);
            return {};
        }
        const double bound = *expr.literal.numeric;
        ValueSet out;
        for (const auto& [object_token, subjects] : store_.relation_objects(expr.name)) {
            const Literal* lit = store_.literal_from_token(object_token);
            if (!lit) continue;  // entity objects fall outside the comparison
            if (!lit->is_numeric()) {
                throw ExecError(ExecError::Kind::TypeError,
                                "non-numeric literal under comparator '" + expr.name +
                                    "': " + object_token);
            }
            const double value = *lit->numeric;
            bool keep = false;
            switch (expr.op) {
                case CmpOp::Lt: keep = value < bound; break;
                case CmpOp::Le: keep = value <= bound; break;
                case CmpOp::Gt: keep = value > bound; break;
                case CmpOp::Ge: keep = value >= bound; break;
            }
            if (keep) {
                out.entities.insert(subjects.begin(), subjects.end());
                guard_size(out.size());
            }
        }
        return out;
    }

    ValueSet eval_superlative(const SExpr& expr) {
        const bool is_max = expr.kind == SExprKind::ArgMax;
        if (!store_.schema().relations.count(expr.name)) {
            note(Diagnostic::Severity::Name, "unknown relation '" + expr.name + "'", expr);
            return {};
        }
        ValueSet operand = eval(expr.children[0]);
        // Each candidate entity scores as its best value of the relation;
        // entities without a numeric value for it are excluded.
        ValueSet out;
        double best = 0.0;
        bool have_best = false;
        for (const std::string& entity : operand.entities) {
            double score = 0.0;
            bool have_score = false;
            for (const std::string& token : store_.objects_of(entity, expr.name)) {
                const Literal* lit = store_.literal_from_token(token);
                if (!lit) continue;
                if (!lit->is_numeric()) {
                    throw ExecError(ExecError::Kind::TypeError,
                                    "non-numeric literal under superlative '" + expr.name +
                                        "': " + token);
                }
                const double value = *lit->numeric;
                if (!have_score || (is_max ? value > score : value < score)) {
                    score = value;
                    have_score = true;
                }
            }
            if (!have_score) continue;
            if (!have_best || (is_max ? score > best : score < best)) {
                best = score;
                have_best = true;
                out.entities.clear();
                out.entities.insert(entity);
            } else if (score == best) {
                out.entities.insert(entity);  // ties are all returned
            }
        }
        return out;
    }

    const TripleStore& store_;
    const ExecOptions& options_;
    std::vector<Diagnostic>* diagnostics_;
};

}  // namespace

AnswerSet AnswerSet::entities(std::set<std::string> items) {
    AnswerSet out;
    out.kind = Kind::Entities;
    out.items = std::move(items);
    return out;
}

AnswerSet AnswerSet::literals(std::set<std::string> items) {
    AnswerSet out;
    // An empty answer set has no literal provenance; normalize to Entities so
    // empty results compare equal regardless of how they were produced.
    out.kind = items.empty() ? Kind::Entities : Kind::Literals;
    out.items = std::move(items);
    return out;
}

AnswerSet AnswerSet::counted(std::uint64_t n) {
    AnswerSet out;
    out.kind = Kind::Count;
    out.count = n;
    return out;
}

bool is_null(const AnswerSet& answers) {
    if (answers.kind == AnswerSet::Kind::Count) return answers.count == 0;
    return answers.items.empty();
}

AnswerSet execute(const SExpr& expr, const TripleStore& store,
                  std::vector<Diagnostic>* diagnostics, const ExecOptions& options) {
    // Superlatives are legal at the root only; evaluating them deeper would
    // still be set-valued, so the evaluator tolerates them and the validator
    // owns the structural complaint.
    Evaluator evaluator(store, options, diagnostics);
    return evaluator.run(expr);
}

}  // namespace kbqa
