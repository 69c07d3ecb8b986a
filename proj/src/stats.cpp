#include "kbqa/stats.hpp"

#include <algorithm>

#include "kbqa/errors.hpp"
#include "kbqa/sexpr.hpp"
#include "kbqa/util.hpp"
#include "kbqa/verbalizer.hpp"

namespace kbqa {

namespace {

std::size_t char_lcs(std::string_view a, std::string_view b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> curr(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                curr[j] = prev[j - 1] + 1;
            } else {
                curr[j] = std::max(prev[j], curr[j - 1]);
            }
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

struct Mean {
    double sum = 0.0;
    std::size_t n = 0;

    void add(double value) {
        sum += value;
        ++n;
    }
    std::optional<double> value() const {
        if (n == 0) return std::nullopt;
        return sum / static_cast<double>(n);
    }
};

}  // namespace

double partial_ratio(std::string_view a, std::string_view b) {
    const std::string la = to_lower(a);
    const std::string lb = to_lower(b);
    if (la.empty() && lb.empty()) return 1.0;
    if (la.empty() || lb.empty()) return 0.0;

    const std::string& shorter = la.size() <= lb.size() ? la : lb;
    const std::string& longer = la.size() <= lb.size() ? lb : la;
    const std::size_t m = shorter.size();

    double best = 0.0;
    for (std::size_t start = 0; start + m <= longer.size(); ++start) {
        const std::string_view window(longer.data() + start, m);
        const std::size_t matched = char_lcs(shorter, window);
        const double sim = 2.0 * static_cast<double>(matched) / static_cast<double>(2 * m);
        best = std::max(best, sim);
        if (best == 1.0) break;
    }
    return best;
}

std::set<std::string> schema_items_of(const std::vector<DatasetRecord>& records) {
    std::set<std::string> items;
    for (const DatasetRecord& record : records) {
        try {
            const Analysis analysis = analyze(parse_sexpr(record.s_expression).expr);
            items.insert(analysis.classes.begin(), analysis.classes.end());
            items.insert(analysis.relations.begin(), analysis.relations.end());
        } catch (const ParseError& err) {
            throw DataError("qid '" + record.qid + "': logical form does not parse: " +
                            err.what());
        }
    }
    return items;
}

StatsReport dataset_statistics(const std::vector<DatasetRecord>& records,
                               const TripleStore& store,
                               const std::optional<std::set<std::string>>& seen_schema) {
    if (records.empty()) throw DataError("dataset_statistics: no records");

    StatsReport report;
    report.question_count = records.size();

    double char_sum = 0.0;
    double entity_sum = 0.0;
    double relation_sum = 0.0;
    Mean sim_entity;
    Mean sim_class;
    Mean sim_relation;
    std::set<std::string> all_items;
    std::set<std::string> unseen_items;
    std::size_t unseen_questions = 0;

    for (const DatasetRecord& record : records) {
        ParsedExpr parsed;
        try {
            parsed = parse_sexpr(record.s_expression);
        } catch (const ParseError& err) {
            throw DataError("qid '" + record.qid + "': logical form does not parse: " +
                            err.what());
        }
        const Analysis analysis = analyze(parsed.expr);

        char_sum += static_cast<double>(utf8_codepoints(record.question));
        entity_sum += static_cast<double>(analysis.entities.size());
        relation_sum += static_cast<double>(analysis.relations.size());

        for (const std::string& entity : analysis.entities) {
            // Prefer the store label, then an annotation label, then the id.
            std::string name = store.label_or_id(entity);
            if (name == entity) {
                auto it = parsed.entity_labels.find(entity);
                if (it != parsed.entity_labels.end() && !it->second.empty()) name = it->second;
            }
            sim_entity.add(partial_ratio(record.question, name));
        }
        for (const std::string& cls : analysis.classes) {
            sim_class.add(partial_ratio(record.question, humanize_schema_name(cls)));
        }
        for (const std::string& rel : analysis.relations) {
            sim_relation.add(partial_ratio(record.question, humanize_schema_name(rel)));
        }

        if (seen_schema) {
            bool touches_unseen = false;
            auto check = [&](const std::vector<std::string>& names) {
                for (const std::string& name : names) {
                    all_items.insert(name);
                    if (!seen_schema->count(name)) {
                        unseen_items.insert(name);
                        touches_unseen = true;
                    }
                }
            };
            check(analysis.classes);
            check(analysis.relations);
            if (touches_unseen) ++unseen_questions;
        }
    }

    const double n = static_cast<double>(records.size());
    report.avg_question_chars = char_sum / n;
    report.avg_entities_per_lf = entity_sum / n;
    report.avg_relations_per_lf = relation_sum / n;
    report.similarity_entity = sim_entity.value();
    report.similarity_class = sim_class.value();
    report.similarity_relation = sim_relation.value();

    if (seen_schema) {
        report.unseen_schema_ratio =
            all_items.empty() ? 0.0
                              : static_cast<double>(unseen_items.size()) /
                                    static_cast<double>(all_items.size());
        report.unseen_question_ratio = static_cast<double>(unseen_questions) / n;
    }
    return report;
}

}  // namespace kbqa
