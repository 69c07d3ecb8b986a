#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kbqa/dataset_io.hpp"
#include "kbqa/kb_store.hpp"

namespace kbqa {

// ---------------------------------------------------------------------------
// Fuzzy substring similarity in [0, 1].  Both strings are lowercased; the
// shorter one is slid across every window of its own length in the longer
// one, and the best window similarity wins, where
//     sim(x, w) = 2 * M / (|x| + |w|)
// and M is the total length of the longest-common-subsequence character
// alignment between x and w.  Empty vs non-empty scores 0; two empty strings
// score 1.
// ---------------------------------------------------------------------------
double partial_ratio(std::string_view a, std::string_view b);

struct StatsReport {
    std::size_t question_count = 0;
    double avg_question_chars = 0.0;     // mean UTF-8 codepoint count
    double avg_entities_per_lf = 0.0;    // distinct mentions per logical form
    double avg_relations_per_lf = 0.0;
    // Mean partial_ratio between each question and the names it mentions;
    // absent when a mention kind never occurs.  Entities compare by label,
    // schema names by their humanized form.
    std::optional<double> similarity_entity;
    std::optional<double> similarity_class;
    std::optional<double> similarity_relation;
    // Present when a seen-schema set is supplied.
    std::optional<double> unseen_schema_ratio;    // unseen distinct schema items / all
    std::optional<double> unseen_question_ratio;  // questions touching >=1 unseen item
};

// Distinct classes and relations mentioned by the records' logical forms.
std::set<std::string> schema_items_of(const std::vector<DatasetRecord>& records);

// Every record's logical form must parse; a failure names the qid.
StatsReport dataset_statistics(const std::vector<DatasetRecord>& records,
                               const TripleStore& store,
                               const std::optional<std::set<std::string>>& seen_schema);

}  // namespace kbqa
