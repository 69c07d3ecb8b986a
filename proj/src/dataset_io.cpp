#include "kbqa/dataset_io.hpp"

#include <set>

#include <json.hpp>

#include "kbqa/errors.hpp"
#include "kbqa/sexpr.hpp"
#include "kbqa/util.hpp"

namespace kbqa {

namespace {

using ordered_json = nlohmann::ordered_json;

bool valid_level(const std::string& level) {
    return level == "iid" || level == "compositional" || level == "zero-shot";
}

std::string require_string(const nlohmann::json& row, const char* key, const std::string& where) {
    if (!row.contains(key)) throw DataError(where + ": missing field '" + key + "'");
    if (!row[key].is_string()) throw DataError(where + ": field '" + key + "' must be a string");
    return row[key].get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& row, const char* key,
                                           const std::string& where) {
    if (!row.contains(key) || row[key].is_null()) return std::nullopt;
    if (!row[key].is_string()) throw DataError(where + ": field '" + key + "' must be a string");
    return row[key].get<std::string>();
}

std::vector<std::string> string_array(const nlohmann::json& row, const char* key,
                                      const std::string& where, bool required) {
    if (!row.contains(key)) {
        if (required) throw DataError(where + ": missing field '" + key + "'");
        return {};
    }
    if (!row[key].is_array()) throw DataError(where + ": field '" + key + "' must be an array");
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& item : row[key]) {
        if (!item.is_string()) {
            throw DataError(where + ": field '" + key + "' must contain strings");
        }
        std::string value = item.get<std::string>();
        if (seen.insert(value).second) out.push_back(std::move(value));  // deduplicate
    }
    return out;
}

nlohmann::json parse_line(const std::string& line, const std::string& where) {
    nlohmann::json row = nlohmann::json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.is_object()) {
        throw DataError(where + ": line is not a JSON object");
    }
    return row;
}

}  // namespace

std::vector<DatasetRecord> read_dataset(const std::string& path,
                                        std::vector<std::string>* warnings) {
    const std::string text = read_file(path);
    std::vector<DatasetRecord> records;
    std::set<std::string> qids;

    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const std::string where = path + ":" + std::to_string(i + 1);
        nlohmann::json row = parse_line(lines[i], where);

        DatasetRecord record;
        record.qid = require_string(row, "qid", where);
        record.question = require_string(row, "question", where);
        record.s_expression = require_string(row, "s_expression", where);
        record.answers = string_array(row, "answers", where, /*required=*/true);
        record.template_id = optional_string(row, "template_id", where);
        record.level = optional_string(row, "level", where);
        record.domain = optional_string(row, "domain", where);

        if (!qids.insert(record.qid).second) {
            throw DataError(where + ": duplicate qid '" + record.qid + "'");
        }
        if (record.level && !valid_level(*record.level)) {
            throw DataError(where + ": qid '" + record.qid + "' has invalid level '" +
                            *record.level + "'");
        }
        try {
            parse_sexpr(record.s_expression);
        } catch (const ParseError& err) {
            record.lf_parses = false;
            if (warnings) {
                warnings->push_back(where + ": qid '" + record.qid +
                                    "' has an unparseable logical form: " + err.what());
            }
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::string dataset_to_jsonl(const std::vector<DatasetRecord>& records) {
    std::string out;
    for (const DatasetRecord& record : records) {
        ordered_json row;
        row["qid"] = record.qid;
        row["question"] = record.question;
        row["s_expression"] = record.s_expression;
        row["answers"] = record.answers;
        if (record.template_id) row["template_id"] = *record.template_id;
        if (record.level) row["level"] = *record.level;
        if (record.domain) row["domain"] = *record.domain;
        out += row.dump();
        out += '\n';
    }
    return out;
}

void write_dataset(const std::vector<DatasetRecord>& records, const std::string& path) {
    std::set<std::string> qids;
    for (const DatasetRecord& record : records) {
        if (!qids.insert(record.qid).second) {
            throw DataError("duplicate qid '" + record.qid + "' in dataset write");
        }
    }
    write_file_atomic(path, dataset_to_jsonl(records));
}

std::vector<PredictionRecord> read_predictions(const std::string& path) {
    const std::string text = read_file(path);
    std::vector<PredictionRecord> records;
    std::set<std::string> qids;

    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const std::string where = path + ":" + std::to_string(i + 1);
        nlohmann::json row = parse_line(lines[i], where);

        PredictionRecord record;
        record.qid = require_string(row, "qid", where);
        record.s_expression = optional_string(row, "s_expression", where);
        record.answers = string_array(row, "answers", where, /*required=*/false);
        if (row.contains("ranked")) {
            if (!row["ranked"].is_boolean()) {
                throw DataError(where + ": field 'ranked' must be a boolean");
            }
            record.ranked = row["ranked"].get<bool>();
        }
        if (!qids.insert(record.qid).second) {
            throw DataError(where + ": duplicate qid '" + record.qid + "'");
        }
        records.push_back(std::move(record));
    }
    return records;
}

void write_predictions(const std::vector<PredictionRecord>& records, const std::string& path) {
    std::string out;
    for (const PredictionRecord& record : records) {
        ordered_json row;
        row["qid"] = record.qid;
        if (record.s_expression) row["s_expression"] = *record.s_expression;
        row["answers"] = record.answers;
        row["ranked"] = record.ranked;
        out += row.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

}  // namespace kbqa
