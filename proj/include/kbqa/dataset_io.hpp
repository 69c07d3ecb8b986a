#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kbqa {

// ---------------------------------------------------------------------------
// JSONL dataset exchange.  One JSON object per line; keys are written in the
// fixed order (qid, question, s_expression, answers, template_id, level,
// domain) so identical data produces identical bytes.
// ---------------------------------------------------------------------------

struct DatasetRecord {
    std::string qid;
    std::string question;
    std::string s_expression;
    std::vector<std::string> answers;  // entity ids or encoded literal tokens
    std::optional<std::string> template_id;
    std::optional<std::string> level;  // iid | compositional | zero-shot
    std::optional<std::string> domain;

    // Set while reading: false when s_expression does not parse.  Such
    // records are kept so downstream consumers can decide what to do.
    bool lf_parses = true;
};

struct PredictionRecord {
    std::string qid;
    std::optional<std::string> s_expression;
    std::vector<std::string> answers;
    bool ranked = false;  // list order meaningful (e.g. retrieval output)
};

// Throws DataError on malformed JSON, duplicate qids, missing required
// fields, or an invalid level value.  Unparseable logical forms are flagged
// on the record and reported through *warnings.
std::vector<DatasetRecord> read_dataset(const std::string& path,
                                        std::vector<std::string>* warnings = nullptr);

void write_dataset(const std::vector<DatasetRecord>& records, const std::string& path);
std::string dataset_to_jsonl(const std::vector<DatasetRecord>& records);

std::vector<PredictionRecord> read_predictions(const std::string& path);
void write_predictions(const std::vector<PredictionRecord>& records, const std::string& path);

}  // namespace kbqa
