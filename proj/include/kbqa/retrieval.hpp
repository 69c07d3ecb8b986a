#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kbqa/kb_store.hpp"

namespace kbqa {

// Lowercases and splits on any non-alphanumeric character, so "what's the"
// tokenizes to ["what", "s", "the"].
std::vector<std::string> bm25_tokenize(std::string_view text);

// ---------------------------------------------------------------------------
// Okapi BM25 over a small in-memory corpus.
//
//   score(q, d) = sum over query tokens t of
//       idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * |d| / avgdl))
//   idf(t)    = ln( (N - df + 0.5) / (df + 0.5) + 1 )    (never negative)
//
// Queries keep duplicate tokens (each occurrence adds its term score).  Query
// results cover the whole corpus ordered by descending score with ties broken
// by ascending document id, truncated to k.
// ---------------------------------------------------------------------------
class Bm25Index {
public:
    struct Scored {
        std::string id;
        double score = 0.0;
    };

    // corpus: (document id, text).  Duplicate ids are a data error.
    explicit Bm25Index(const std::vector<std::pair<std::string, std::string>>& corpus,
                       double k1 = 1.2, double b = 0.75);

    std::vector<Scored> query(std::string_view question, int k) const;

    std::size_t size() const { return docs_.size(); }
    std::size_t document_frequency(const std::string& term) const;
    double average_length() const { return avgdl_; }

private:
    struct Doc {
        std::string id;
        std::map<std::string, std::size_t> term_counts;
        std::size_t length = 0;
    };

    std::vector<Doc> docs_;
    std::map<std::string, std::size_t> df_;
    double avgdl_ = 0.0;
    double k1_;
    double b_;
};

// ---------------------------------------------------------------------------
// Few-shot prompt assembly.  Each block renders as:
//
//   Question: <text>
//   Candidate entities:
//   (A) [<entity label>]
//   Exemplary Logical Forms:
//   (A) <form>
//   Candidate classes:
//   (A) <class>
//   Candidate relations:
//   (A) <relation>
//   Prediction: <gold form, or nothing for the query block>
//
// Blocks are separated by blank lines after the instruction line; the output
// ends with the query's bare "Prediction: " so a completion can follow it.
// Lettered lists cap at 26 entries.
// ---------------------------------------------------------------------------

struct PromptShot {
    std::string question;
    std::vector<std::string> entities;       // labels; brackets added at render time
    std::vector<std::string> logical_forms;  // rendered verbatim
    std::vector<std::string> classes;
    std::vector<std::string> relations;
    std::string prediction;  // gold logical form; ignored for the query block
};

struct PromptSpec {
    std::string instruction =
        "Given a question and Freebase contexts, write a logical form that answers the question.";
    std::vector<PromptShot> shots;
    PromptShot query;
};

std::string assemble_prompt(const PromptSpec& spec);

PromptSpec prompt_spec_from_json(const nlohmann::json& spec);

// Demo-quality heuristic: ranks the store's classes and relations by
// partial_ratio against the question and returns the top k of each.
struct HeuristicContexts {
    std::vector<std::string> classes;
    std::vector<std::string> relations;
};
HeuristicContexts heuristic_contexts(std::string_view question, const SchemaCatalog& schema,
                                     std::size_t k);

}  // namespace kbqa
