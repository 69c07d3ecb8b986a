#include "kbqa/verbalizer.hpp"

#include <set>

#include <json.hpp>

#include "kbqa/errors.hpp"
#include "kbqa/util.hpp"

namespace kbqa {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string label_of(const std::string& entity, const std::map<std::string, std::string>& labels) {
    auto it = labels.find(entity);
    if (it == labels.end() || it->second.empty()) return entity;
    return it->second;
}

std::string_view cmp_phrase(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "less than";
        case CmpOp::Le: return "less than or equal to";
        case CmpOp::Gt: return "greater than";
        case CmpOp::Ge: return "greater than or equal to";
    }
    return "less than";
}

const SExpr* find_kind(const SExpr& expr, SExprKind kind) {
    if (expr.kind == kind) return &expr;
    for (const SExpr& child : expr.children) {
        if (const SExpr* found = find_kind(child, kind)) return found;
    }
    return nullptr;
}

// The answer class slot: the first class mentioned, read left to right.
std::string class_slot(const Analysis& analysis) {
    if (!analysis.classes.empty()) return analysis.classes.front();
    return "entity";
}

}  // namespace

std::string humanize_schema_name(std::string_view dotted) {
    std::size_t last_dot = dotted.rfind('.');
    std::string_view tail =
        last_dot == std::string_view::npos ? dotted : dotted.substr(last_dot + 1);
    std::string out(tail);
    for (char& c : out) {
        if (c == '_') c = ' ';
    }
    return out;
}

std::string verbalize_lf(const SExpr& expr, const std::map<std::string, std::string>& labels) {
    const Analysis analysis = analyze(expr);
    const std::string answer_class = class_slot(analysis);
    std::string text;

    if (expr.kind == SExprKind::ArgMin || expr.kind == SExprKind::ArgMax) {
        const char* extreme = expr.kind == SExprKind::ArgMax ? "largest" : "smallest";
        text = "which " + answer_class + " has the " + extreme + " " +
               humanize_schema_name(expr.name) + "?";
    } else if (const SExpr* cmp = find_kind(expr, SExprKind::Cmp)) {
        text = "which " + answer_class + " has " + humanize_schema_name(cmp->name) + " " +
               std::string(cmp_phrase(cmp->op)) + " " + cmp->literal.raw + "?";
    } else if (expr.kind == SExprKind::Count) {
        const SExpr* join = find_kind(expr, SExprKind::Join);
        const SExpr* entity = find_kind(expr, SExprKind::EntityAtom);
        if (join && entity) {
            text = "how many " + answer_class + " are linked to " +
                   label_of(entity->name, labels) + " via " + humanize_schema_name(join->name) +
                   "?";
        } else {
            text = "how many " + answer_class + " match the given condition?";
        }
    } else if (analysis.hops == 1 && !analysis.entities.empty() && !analysis.relations.empty()) {
        text = "which " + answer_class + " is linked to " +
               label_of(analysis.entities.front(), labels) + " via " +
               humanize_schema_name(analysis.relations.front()) + "?";
    } else if (analysis.hops == 2 && !analysis.entities.empty() && analysis.relations.size() >= 2) {
        text = "which " + answer_class + " is linked to " +
               label_of(analysis.entities.front(), labels) + " via " +
               humanize_schema_name(analysis.relations[0]) + " and " +
               humanize_schema_name(analysis.relations[1]) + "?";
    } else {
        text = "which " + answer_class + " satisfies " + serialize_sexpr(expr) + "?";
    }
    return to_lower(text);
}

std::string verbalize_triple(const Triple& triple,
                             const std::map<std::string, std::string>& labels) {
    return to_lower("what is the " + humanize_schema_name(triple.relation) + " of " +
                    label_of(triple.subject, labels) + "?");
}

void export_generation_requests(const std::vector<DatasetRecord>& records,
                                const std::string& path) {
    std::set<std::string> seen;
    std::string out;
    for (const DatasetRecord& record : records) {
        if (!seen.insert(record.qid).second) {
            throw DataError("export_generation_requests: duplicate id '" + record.qid + "'");
        }
        ordered_json row;
        row["id"] = record.qid;
        row["input"] = record.s_expression;
        ordered_json label_map = ordered_json::object();
        try {
            for (const auto& [id, label] : parse_sexpr(record.s_expression).entity_labels) {
                label_map[id] = label;
            }
        } catch (const ParseError&) {
            // Request rows for unparseable forms still go out; the generator
            // sees the raw input and no labels.
        }
        row["labels"] = label_map;
        out += row.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

std::size_t import_generations(std::vector<DatasetRecord>& records, const std::string& path) {
    const std::string text = read_file(path);
    std::map<std::string, std::string> questions;

    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const std::string where = path + ":" + std::to_string(i + 1);
        nlohmann::json row = nlohmann::json::parse(lines[i], nullptr, false);
        if (row.is_discarded() || !row.is_object()) {
            throw DataError(where + ": line is not a JSON object");
        }
        if (!row.contains("id") || !row["id"].is_string()) {
            throw DataError(where + ": missing string field 'id'");
        }
        if (!row.contains("question") || !row["question"].is_string()) {
            throw DataError(where + ": missing string field 'question'");
        }
        const std::string id = row["id"].get<std::string>();
        if (!questions.emplace(id, row["question"].get<std::string>()).second) {
            throw DataError(where + ": duplicate response id '" + id + "'");
        }
    }

    std::map<std::string, DatasetRecord*> by_qid;
    for (DatasetRecord& record : records) {
        by_qid[record.qid] = &record;
    }
    std::size_t replaced = 0;
    for (const auto& [id, question] : questions) {
        auto it = by_qid.find(id);
        if (it == by_qid.end()) {
            throw DataError("import_generations: response id '" + id + "' matches no record");
        }
        it->second->question = question;
        ++replaced;
    }
    return replaced;
}

}  // namespace kbqa
