#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kbqa/dataset_io.hpp"
#include "kbqa/kb_store.hpp"
#include "kbqa/sexpr.hpp"

namespace kbqa {

// ---------------------------------------------------------------------------
// Deterministic template verbalization.  Rules are tried most-specific first
// (superlative, comparative, count, 1-hop, 2-hop, fallback); every expression
// matches something and the fallback always starts with "which".  Output is
// lowercase.  These stand-in questions keep datasets self-contained; the
// request/response files below hand the job to an external question
// generator when better text is wanted.
// ---------------------------------------------------------------------------

// Schema names read as their last dotted segment with underscores opened up:
// "people.profession.people_with_this_profession" -> "people with this profession".
std::string humanize_schema_name(std::string_view dotted);

// labels maps entity id -> display label; ids without labels render as ids.
std::string verbalize_lf(const SExpr& expr, const std::map<std::string, std::string>& labels);

std::string verbalize_triple(const Triple& triple, const std::map<std::string, std::string>& labels);

// One JSONL request row per record: {"id", "input", "labels"}.  Errors on
// duplicate ids.  Writes are atomic (temp file + rename).
void export_generation_requests(const std::vector<DatasetRecord>& records,
                                const std::string& path);

// Applies {"id", "question"} response rows onto matching records.  Errors on
// ids that match no record and on duplicate response ids.  Returns the number
// of questions replaced.
std::size_t import_generations(std::vector<DatasetRecord>& records, const std::string& path);

}  // namespace kbqa
