#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kbqa/dataset_io.hpp"
#include "kbqa/executor.hpp"
#include "kbqa/kb_store.hpp"
#include "kbqa/sexpr.hpp"

namespace kbqa {

// ---------------------------------------------------------------------------
// Graph-search synthesis of question/logical-form pairs:
//
//   1. build_templates   seeded random walks from sampled classes produce
//                        ungrounded skeletons with placeholder leaves
//   2. ground            placeholders are bound to entities/literals that are
//                        actually connected along the walk's relations
//   3. attach_functions  seeded draws wrap queries with COUNT, comparators
//                        over numeric relations, or ARGMIN/ARGMAX
//   4. verify            execute everything, keep only non-null results
//
// plus an independent route that samples raw (subject, relation, object)
// facts as one-hop QA items.  Every stage derives its own RNG stream from the
// root seed, so stages can run per-template in parallel and still merge into
// byte-identical output.
// ---------------------------------------------------------------------------

struct FunctionProbabilities {
    double count = 0.056;
    double comparative = 0.015;
    double superlative = 0.024;
};

struct SamplerConfig {
    std::uint64_t seed = 0;
    int max_hops = 2;
    int classes_per_run = 8;         // sampling units per run (classes or relations)
    int groundings_per_template = 5;
    int entities_per_class = 50;
    int triples_per_entity = 10;
    FunctionProbabilities function_probabilities;
    std::optional<std::set<std::string>> domain_filter;
    int min_relation_triples = 2;  // relation-frequency floor for the triple route
    int workers = 1;
};

// Strict field mirror of SamplerConfig; unknown keys and out-of-range values
// are data errors (probabilities must each sit in [0,1] and sum to <= 1).
SamplerConfig sampler_config_from_json(const nlohmann::json& config);
void validate_sampler_config(const SamplerConfig& config);

struct QueryTemplate {
    SExpr skeleton;  // placeholders where entities/literals will go
    std::string origin_class;
    int hops = 0;
    std::string id;  // stable hash of the normalized skeleton
};

struct GroundedQuery {
    SExpr expr;
    std::string template_id;
    std::string origin_class;
};

struct SyntheticItem {
    enum class Kind { LogicalForm, TripleFact };
    Kind kind = Kind::LogicalForm;
    std::optional<SExpr> expr;     // LogicalForm items
    std::optional<Triple> triple;  // TripleFact items
    std::string question;
    AnswerSet answers;
    std::string template_id;
    std::string domain;
};

// Replaces entity and literal leaves with placeholders and drops entity
// hints, so every grounding of one skeleton hashes to the same template id.
SExpr skeletonize(const SExpr& expr);
std::string skeleton_template_id(const SExpr& expr_or_skeleton);

std::vector<QueryTemplate> build_templates(const TripleStore& store, const SamplerConfig& config,
                                           std::vector<std::string>* warnings = nullptr);

std::vector<GroundedQuery> ground(const QueryTemplate& tmpl, const TripleStore& store,
                                  const SamplerConfig& config);

// The grounded expression always survives; one seeded draw may add a COUNT,
// comparator, or superlative variant.  Comparators and superlatives only form
// over numeric relations observed on the origin class, with comparator bounds
// drawn from observed values.
std::vector<SExpr> attach_functions(const GroundedQuery& grounded, const TripleStore& store,
                                    const SamplerConfig& config);

// Executes each expression and keeps those with non-null answers.  Type
// errors drop the expression and are reported through *dropped.
std::vector<SyntheticItem> verify(const std::vector<SExpr>& exprs, const TripleStore& store,
                                  std::vector<std::string>* dropped = nullptr);

std::vector<SyntheticItem> sample_triples(const TripleStore& store, const SamplerConfig& config);

struct PipelineSummary {
    std::size_t question_count = 0;  // logical-form items
    std::map<int, std::size_t> hop_counts;
    std::map<std::string, std::size_t> function_counts;  // none/count/comparative/superlative
    std::map<std::string, std::size_t> domain_counts;
    std::size_t distinct_classes = 0;
    std::size_t distinct_relations = 0;
    std::size_t distinct_entities = 0;

    std::size_t triple_count = 0;
    std::size_t triple_distinct_relations = 0;
    std::size_t triple_distinct_subjects = 0;
    std::map<std::string, std::size_t> triple_domain_counts;

    std::optional<double> unseen_relation_fraction;

    nlohmann::json to_json() const;
};

struct PipelineResult {
    std::vector<SyntheticItem> lf_items;
    std::vector<SyntheticItem> triple_items;
    PipelineSummary summary;
};

PipelineResult run_pipeline(const TripleStore& store, const SamplerConfig& config,
                            bool with_logical_forms = true, bool with_triples = true,
                            const std::set<std::string>* seen_relations = nullptr,
                            std::vector<std::string>* warnings = nullptr);

// qids run lf-000001... and tq-000001...; triple items carry the one-hop
// logical form (JOIN (R rel) subject) so the record stays executable.
std::vector<DatasetRecord> to_dataset(const std::vector<SyntheticItem>& items);

}  // namespace kbqa
