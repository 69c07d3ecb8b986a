#include "kbqa/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "kbqa/errors.hpp"
#include "kbqa/stats.hpp"
#include "kbqa/util.hpp"

namespace kbqa {

std::vector<std::string> bm25_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char raw : text) {
        const unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

Bm25Index::Bm25Index(const std::vector<std::pair<std::string, std::string>>& corpus, double k1,
                     double b)
    : k1_(k1), b_(b) {
    if (corpus.empty()) return;  // queries over an empty corpus return nothing

    std::size_t total_length = 0;
    std::map<std::string, bool> seen_ids;
    for (const auto& [id, text] : corpus) {
        if (seen_ids.count(id)) throw DataError("BM25 corpus has duplicate id '" + id + "'");
        seen_ids[id] = true;

        Doc doc;
        doc.id = id;
        for (std::string& token : bm25_tokenize(text)) {
            ++doc.term_counts[token];
            ++doc.length;
        }
        total_length += doc.length;
        for (const auto& [term, count] : doc.term_counts) {
            (void)count;
            ++df_[term];
        }
        docs_.push_back(std::move(doc));
    }
    avgdl_ = static_cast<double>(total_length) / static_cast<double>(docs_.size());
}

std::size_t Bm25Index::document_frequency(const std::string& term) const {
    auto it = df_.find(term);
    if (it == df_.end()) return 0;
    return it->second;
}

std::vector<Bm25Index::Scored> Bm25Index::query(std::string_view question, int k) const {
    if (k < 0) throw DataError("BM25 query: k must be non-negative");
    const std::vector<std::string> terms = bm25_tokenize(question);
    const double n_docs = static_cast<double>(docs_.size());

    std::vector<Scored> scored;
    scored.reserve(docs_.size());
    for (const Doc& doc : docs_) {
        double score = 0.0;
        for (const std::string& term : terms) {
            auto tf_it = doc.term_counts.find(term);
            if (tf_it == doc.term_counts.end()) continue;
            const double tf = static_cast<double>(tf_it->second);
            const double df = static_cast<double>(document_frequency(term));
            const double idf = std::log((n_docs - df + 0.5) / (df + 0.5) + 1.0);
            const double denom =
                tf + k1_ * (1.0 - b_ + b_ * static_cast<double>(doc.length) / avgdl_);
            score += idf * tf * (k1_ + 1.0) / denom;
        }
        scored.push_back({doc.id, score});
    }

    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;  // ties break toward the smaller id
    });
    if (static_cast<std::size_t>(k) < scored.size()) {
        scored.resize(static_cast<std::size_t>(k));
    }
    return scored;
}

namespace {

void render_list(std::string& out, const char* header, const std::vector<std::string>& entries,
                 bool bracketed) {
    if (entries.size() > 26) {
        throw DataError(std::string(header) + " list exceeds 26 lettered entries");
    }
    out += header;
    out += '\n';
    for (std::size_t i = 0; i < entries.size(); ++i) {
        out += '(';
        out += static_cast<char>('A' + i);
        out += ") ";
        if (bracketed) {
            out += '[';
            out += entries[i];
            out += ']';
        } else {
            out += entries[i];
        }
        out += '\n';
    }
}

void render_block(std::string& out, const PromptShot& shot, bool with_prediction) {
    out += "Question: ";
    out += shot.question;
    out += '\n';
    render_list(out, "Candidate entities:", shot.entities, /*bracketed=*/true);
    render_list(out, "Exemplary Logical Forms:", shot.logical_forms, /*bracketed=*/false);
    render_list(out, "Candidate classes:", shot.classes, /*bracketed=*/false);
    render_list(out, "Candidate relations:", shot.relations, /*bracketed=*/false);
    out += "Prediction: ";
    if (with_prediction) out += shot.prediction;
}

std::vector<std::string> json_string_list(const nlohmann::json& node, const char* key) {
    std::vector<std::string> out;
    if (!node.contains(key)) return out;
    if (!node[key].is_array()) {
        throw DataError(std::string("prompt spec: '") + key + "' must be an array");
    }
    for (const auto& item : node[key]) {
        if (!item.is_string()) {
            throw DataError(std::string("prompt spec: '") + key + "' must contain strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

PromptShot shot_from_json(const nlohmann::json& node) {
    if (!node.is_object()) throw DataError("prompt spec: shot must be an object");
    PromptShot shot;
    if (node.contains("question") && node["question"].is_string()) {
        shot.question = node["question"].get<std::string>();
    } else {
        throw DataError("prompt spec: shot needs a string 'question'");
    }
    shot.entities = json_string_list(node, "entities");
    shot.logical_forms = json_string_list(node, "logical_forms");
    shot.classes = json_string_list(node, "classes");
    shot.relations = json_string_list(node, "relations");
    if (node.contains("prediction")) {
        if (!node["prediction"].is_string()) {
            throw DataError("prompt spec: 'prediction' must be a string");
        }
        shot.prediction = node["prediction"].get<std::string>();
    }
    return shot;
}

}  // namespace

std::string assemble_prompt(const PromptSpec& spec) {
    std::string out = spec.instruction;
    for (const PromptShot& shot : spec.shots) {
        if (shot.prediction.empty()) {
            throw DataError("prompt shot for question '" + shot.question +
                            "' is missing its gold prediction");
        }
        out += "\n\n";
        render_block(out, shot, /*with_prediction=*/true);
    }
    out += "\n\n";
    render_block(out, spec.query, /*with_prediction=*/false);
    return out;
}

PromptSpec prompt_spec_from_json(const nlohmann::json& spec) {
    if (!spec.is_object()) throw DataError("prompt spec: top level must be an object");
    PromptSpec out;
    if (spec.contains("instruction")) {
        if (!spec["instruction"].is_string()) {
            throw DataError("prompt spec: 'instruction' must be a string");
        }
        out.instruction = spec["instruction"].get<std::string>();
    }
    if (spec.contains("shots")) {
        if (!spec["shots"].is_array()) throw DataError("prompt spec: 'shots' must be an array");
        for (const auto& shot : spec["shots"]) {
            out.shots.push_back(shot_from_json(shot));
        }
    }
    if (!spec.contains("query")) throw DataError("prompt spec: missing 'query'");
    out.query = shot_from_json(spec["query"]);
    return out;
}

HeuristicContexts heuristic_contexts(std::string_view question, const SchemaCatalog& schema,
                                     std::size_t k) {
    auto rank = [&](const std::set<std::string>& names) {
        std::vector<std::pair<double, std::string>> scored;
        scored.reserve(names.size());
        for (const std::string& name : names) {
            scored.emplace_back(partial_ratio(question, name), name);
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        std::vector<std::string> top;
        for (std::size_t i = 0; i < scored.size() && i < k; ++i) {
            top.push_back(scored[i].second);
        }
        return top;
    };
    HeuristicContexts out;
    out.classes = rank(schema.classes);
    out.relations = rank(schema.relations);
    return out;
}

}  // namespace kbqa
