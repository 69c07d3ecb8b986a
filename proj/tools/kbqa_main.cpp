// kbqa — command-line front end over the toolkit library.
//
// Subcommands: sample-lf, sample-triples, verbalize, execute, evaluate,
// stats, retrieve, build-prompt.  Reports go to stdout as JSON (tables with
// --pretty); log lines go to stderr.  Exit codes: 0 success, 1 usage error,
// 2 data error.  Every command that writes a primary output file also writes
// a `<out>.manifest.json` sidecar recording the command, input fingerprints,
// seed, tool version, and timestamp.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kbqa/dataset_io.hpp"
#include "kbqa/errors.hpp"
#include "kbqa/executor.hpp"
#include "kbqa/kb_store.hpp"
#include "kbqa/metrics.hpp"
#include "kbqa/retrieval.hpp"
#include "kbqa/sampler.hpp"
#include "kbqa/sexpr.hpp"
#include "kbqa/stats.hpp"
#include "kbqa/util.hpp"
#include "kbqa/verbalizer.hpp"
#include "kbqa/version.hpp"

namespace {

using nlohmann::ordered_json;

void log_info(const std::string& message) { std::cerr << "[info] " << message << "\n"; }
void log_warn(const std::string& message) { std::cerr << "[warn] " << message << "\n"; }

void log_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& warning : warnings) log_warn(warning);
}

std::string file_fingerprint(const std::string& path) {
    return kbqa::hex64(kbqa::fnv1a64(kbqa::read_file(path)));
}

nlohmann::json parse_json_file(const std::string& path) {
    nlohmann::json parsed = nlohmann::json::parse(kbqa::read_file(path), nullptr, false);
    if (parsed.is_discarded()) throw kbqa::DataError(path + ": invalid JSON");
    return parsed;
}

// Sidecar written next to every generated file.  config_hash fingerprints the
// effective options plus the content of non-KB inputs, so equal manifests
// (timestamp aside) imply byte-identical outputs.
void write_manifest(const std::string& out_path, const std::string& command,
                    const std::string& config_hash, const std::string& kb_hash,
                    std::uint64_t seed) {
    ordered_json manifest;
    manifest["command"] = command;
    manifest["config_hash"] = config_hash;
    manifest["kb_hash"] = kb_hash;
    manifest["seed"] = seed;
    manifest["tool_version"] = kbqa::kToolVersion;
    manifest["timestamp"] = kbqa::iso8601_utc_now();
    kbqa::write_file_atomic(out_path + ".manifest.json", manifest.dump(2) + "\n");
    log_info("wrote " + out_path + " and its manifest");
}

// ---------------------------------------------------------------------------
// Report output: JSON by default, aligned key/value tables behind --pretty.
// ---------------------------------------------------------------------------

std::string format_scalar(const ordered_json& value) {
    if (value.is_null()) return "-";
    if (value.is_string()) return value.get<std::string>();
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    if (value.is_number_unsigned()) return std::to_string(value.get<std::uint64_t>());
    if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
    if (value.is_number_float()) {
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), "%.6f", value.get<double>());
        return buffer;
    }
    return value.dump();
}

void print_table(const ordered_json& report, const std::string& indent) {
    std::size_t width = 0;
    for (const auto& [key, value] : report.items()) {
        if (!value.is_object()) width = std::max(width, key.size());
    }
    for (const auto& [key, value] : report.items()) {
        if (value.is_object()) {
            std::cout << indent << key << ":\n";
            print_table(value, indent + "  ");
        } else if (value.is_array()) {
            std::cout << indent << key << ": " << value.dump() << "\n";
        } else {
            std::cout << indent << key << std::string(width - key.size(), ' ') << "  "
                      << format_scalar(value) << "\n";
        }
    }
}

void emit_report(const ordered_json& report, const std::string& report_path, bool pretty) {
    if (pretty) {
        print_table(report, "");
    } else {
        std::cout << report.dump(2) << "\n";
    }
    if (!report_path.empty()) {
        kbqa::write_file_atomic(report_path, report.dump(2) + "\n");
        log_info("wrote " + report_path);
    }
}

// ---------------------------------------------------------------------------
// sample-lf / sample-triples
// ---------------------------------------------------------------------------

struct SampleArgs {
    std::string kb_path;
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 0;
    bool workers_given = false;
    bool pretty = false;
};

std::string sampler_config_fingerprint(const kbqa::SamplerConfig& config) {
    ordered_json j;
    j["seed"] = config.seed;
    j["max_hops"] = config.max_hops;
    j["classes_per_run"] = config.classes_per_run;
    j["groundings_per_template"] = config.groundings_per_template;
    j["entities_per_class"] = config.entities_per_class;
    j["triples_per_entity"] = config.triples_per_entity;
    j["function_probabilities"] = {{"count", config.function_probabilities.count},
                                   {"comparative", config.function_probabilities.comparative},
                                   {"superlative", config.function_probabilities.superlative}};
    if (config.domain_filter) {
        j["domain_filter"] =
            std::vector<std::string>(config.domain_filter->begin(), config.domain_filter->end());
    }
    j["min_relation_triples"] = config.min_relation_triples;
    j["workers"] = config.workers;
    return kbqa::hex64(kbqa::fnv1a64(j.dump()));
}

int run_sample(const SampleArgs& args, bool logical_forms, const std::string& command) {
    kbqa::SamplerConfig config;
    if (!args.config_path.empty()) {
        config = kbqa::sampler_config_from_json(parse_json_file(args.config_path));
    }
    if (args.seed_given) config.seed = args.seed;
    if (args.workers_given) config.workers = args.workers;
    kbqa::validate_sampler_config(config);

    const kbqa::TripleStore store = kbqa::TripleStore::load(args.kb_path);
    log_info("loaded " + std::to_string(store.size()) + " triples from " + args.kb_path);

    std::vector<std::string> warnings;
    const kbqa::PipelineResult result =
        kbqa::run_pipeline(store, config, /*with_logical_forms=*/logical_forms,
                           /*with_triples=*/!logical_forms, nullptr, &warnings);
    log_warnings(warnings);

    const auto& items = logical_forms ? result.lf_items : result.triple_items;
    kbqa::write_dataset(kbqa::to_dataset(items), args.out_path);
    write_manifest(args.out_path, command, sampler_config_fingerprint(config),
                   file_fingerprint(args.kb_path), config.seed);

    emit_report(ordered_json(result.summary.to_json()), "", args.pretty);
    return 0;
}

// ---------------------------------------------------------------------------
// verbalize
// ---------------------------------------------------------------------------

int run_verbalize(const std::string& in_path, const std::string& out_path,
                  const std::string& requests_path, const std::string& responses_path,
                  const std::string& kb_path) {
    std::vector<std::string> warnings;
    std::vector<kbqa::DatasetRecord> records = kbqa::read_dataset(in_path, &warnings);
    log_warnings(warnings);

    std::map<std::string, std::string> kb_labels;
    if (!kb_path.empty()) kb_labels = kbqa::TripleStore::load(kb_path).labels();

    ordered_json fingerprint;
    fingerprint["in"] = file_fingerprint(in_path);
    if (!responses_path.empty()) {
        fingerprint["mode"] = "responses";
        fingerprint["responses"] = file_fingerprint(responses_path);
        const std::size_t replaced = kbqa::import_generations(records, responses_path);
        log_info("imported " + std::to_string(replaced) + " generated questions");
    } else {
        for (kbqa::DatasetRecord& record : records) {
            if (!record.lf_parses) {
                log_warn("qid '" + record.qid +
                         "' keeps its question: the logical form does not parse");
                continue;
            }
            const kbqa::ParsedExpr parsed = kbqa::parse_sexpr(record.s_expression);
            std::map<std::string, std::string> labels = kb_labels;
            for (const auto& [id, label] : parsed.entity_labels) labels[id] = label;
            record.question = kbqa::verbalize_lf(parsed.expr, labels);
        }
        if (!requests_path.empty()) {
            fingerprint["mode"] = "requests";
            kbqa::export_generation_requests(records, requests_path);
            log_info("wrote " + std::to_string(records.size()) + " generation requests to " +
                     requests_path);
        } else {
            fingerprint["mode"] = "verbalize";
        }
    }

    kbqa::write_dataset(records, out_path);
    write_manifest(out_path, "verbalize", kbqa::hex64(kbqa::fnv1a64(fingerprint.dump())), "none",
                   0);
    return 0;
}

// ---------------------------------------------------------------------------
// execute
// ---------------------------------------------------------------------------

int run_execute(const std::string& kb_path, const std::string& lf) {
    const kbqa::TripleStore store = kbqa::TripleStore::load(kb_path);
    const kbqa::ParsedExpr parsed = kbqa::parse_sexpr(lf);

    std::vector<kbqa::Diagnostic> diagnostics;
    const kbqa::AnswerSet answers = kbqa::execute(parsed.expr, store, &diagnostics);
    for (const kbqa::Diagnostic& diagnostic : diagnostics) {
        log_warn(diagnostic.message + " in " + diagnostic.node);
    }

    if (answers.kind == kbqa::AnswerSet::Kind::Count) {
        std::cout << "COUNT\t" << answers.count << "\n";
    } else {
        for (const std::string& item : answers.items) std::cout << item << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

ordered_json partition_to_json(const kbqa::PartitionStats& stats) {
    ordered_json j;
    j["count"] = stats.count;
    j["em"] = stats.em;
    j["f1"] = stats.f1;
    j["precision"] = stats.precision;
    j["recall"] = stats.recall;
    j["hits1_exact"] = stats.hits1;
    return j;
}

int run_evaluate(const std::string& gold_path, const std::string& pred_path,
                 const std::string& groups_by, const std::string& partition,
                 const std::string& report_path, bool pretty) {
    if (!groups_by.empty() && groups_by != "template_id") {
        throw kbqa::UsageError("--groups-by supports only 'template_id'");
    }
    if (!partition.empty() && partition != "level" && partition != "domain" &&
        partition != "template_id") {
        throw kbqa::UsageError("--partition supports 'level', 'domain', or 'template_id'");
    }

    std::vector<std::string> warnings;
    const std::vector<kbqa::DatasetRecord> gold = kbqa::read_dataset(gold_path, &warnings);
    log_warnings(warnings);
    if (gold.empty()) throw kbqa::DataError(gold_path + ": no gold records");

    std::map<std::string, const kbqa::PredictionRecord*> predictions;
    const std::vector<kbqa::PredictionRecord> pred_rows = kbqa::read_predictions(pred_path);
    for (const kbqa::PredictionRecord& row : pred_rows) predictions[row.qid] = &row;

    std::vector<kbqa::QuestionScore> scores;
    std::map<std::string, double> em_by_qid;
    std::map<std::string, double> f1_by_qid;
    std::map<std::string, std::string> partition_of;
    std::map<std::string, std::vector<std::string>> group_members;

    for (const kbqa::DatasetRecord& record : gold) {
        auto it = predictions.find(record.qid);
        if (it == predictions.end()) {
            throw kbqa::DataError("no prediction for qid '" + record.qid + "'");
        }
        const kbqa::PredictionRecord& pred = *it->second;

        kbqa::QuestionScore score;
        score.qid = record.qid;
        score.em =
            kbqa::exact_match(pred.s_expression.value_or(""), record.s_expression) ? 1.0 : 0.0;

        const std::set<std::string> pred_answers(pred.answers.begin(), pred.answers.end());
        const std::set<std::string> gold_answers(record.answers.begin(), record.answers.end());
        const kbqa::F1Score f1 = kbqa::answer_f1(pred_answers, gold_answers);
        score.precision = f1.precision;
        score.recall = f1.recall;
        score.f1 = f1.f1;
        score.hits1 = kbqa::exact_expected_hits1(pred_answers, gold_answers);
        scores.push_back(score);

        em_by_qid[record.qid] = score.em;
        f1_by_qid[record.qid] = score.f1;

        if (!partition.empty()) {
            const std::optional<std::string>& label = partition == "level"      ? record.level
                                                      : partition == "domain"   ? record.domain
                                                                                : record.template_id;
            if (label) partition_of[record.qid] = *label;
        }
        if (!groups_by.empty()) {
            if (!record.template_id) {
                throw kbqa::DataError("qid '" + record.qid +
                                      "' has no template_id; required by --groups-by");
            }
            group_members[*record.template_id].push_back(record.qid);
        }
    }

    const kbqa::AggregateReport aggregated =
        kbqa::aggregate(scores, partition.empty() ? nullptr : &partition_of);

    ordered_json report;
    report["em"] = aggregated.overall.em;
    report["f1"] = aggregated.overall.f1;
    report["precision"] = aggregated.overall.precision;
    report["recall"] = aggregated.overall.recall;
    report["hits1_exact"] = aggregated.overall.hits1;
    if (!groups_by.empty()) {
        std::vector<kbqa::ParaphraseGroup> groups;
        for (const auto& [template_id, qids] : group_members) {
            groups.push_back({template_id, qids});
        }
        report["std_em"] = kbqa::paraphrase_std(em_by_qid, groups);
        report["std_f1"] = kbqa::paraphrase_std(f1_by_qid, groups);
    } else {
        report["std_em"] = nullptr;
        report["std_f1"] = nullptr;
    }
    ordered_json per_partition = ordered_json::object();
    for (const auto& [label, stats] : aggregated.per_partition) {
        per_partition[label] = partition_to_json(stats);
    }
    report["per_partition"] = per_partition;

    emit_report(report, report_path, pretty);
    return 0;
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

void set_optional(ordered_json& j, const char* key, const std::optional<double>& value) {
    if (value) {
        j[key] = *value;
    } else {
        j[key] = nullptr;
    }
}

int run_stats(const std::string& kb_path, const std::string& data_path,
              const std::string& train_path, const std::string& report_path, bool pretty) {
    const kbqa::TripleStore store = kbqa::TripleStore::load(kb_path);

    std::vector<std::string> warnings;
    const std::vector<kbqa::DatasetRecord> records = kbqa::read_dataset(data_path, &warnings);
    log_warnings(warnings);

    std::optional<std::set<std::string>> seen_schema;
    if (!train_path.empty()) {
        std::vector<std::string> train_warnings;
        const std::vector<kbqa::DatasetRecord> train =
            kbqa::read_dataset(train_path, &train_warnings);
        log_warnings(train_warnings);
        seen_schema = kbqa::schema_items_of(train);
    }

    const kbqa::StatsReport stats = kbqa::dataset_statistics(records, store, seen_schema);

    ordered_json report;
    report["question_count"] = stats.question_count;
    report["avg_question_chars"] = stats.avg_question_chars;
    report["avg_entities_per_lf"] = stats.avg_entities_per_lf;
    report["avg_relations_per_lf"] = stats.avg_relations_per_lf;
    set_optional(report, "similarity_entity", stats.similarity_entity);
    set_optional(report, "similarity_class", stats.similarity_class);
    set_optional(report, "similarity_relation", stats.similarity_relation);
    set_optional(report, "unseen_schema_ratio", stats.unseen_schema_ratio);
    set_optional(report, "unseen_question_ratio", stats.unseen_question_ratio);

    emit_report(report, report_path, pretty);
    return 0;
}

// ---------------------------------------------------------------------------
// retrieve
// ---------------------------------------------------------------------------

int run_retrieve(const std::string& corpus_path, const std::string& query, int k, double k1,
                 double b, bool pretty) {
    if (k < 1) throw kbqa::UsageError("-k must be at least 1");

    std::vector<std::string> warnings;
    const std::vector<kbqa::DatasetRecord> records = kbqa::read_dataset(corpus_path, &warnings);
    log_warnings(warnings);

    std::vector<std::pair<std::string, std::string>> corpus;
    corpus.reserve(records.size());
    for (const kbqa::DatasetRecord& record : records) {
        corpus.emplace_back(record.qid, record.question);
    }

    const kbqa::Bm25Index index(corpus, k1, b);
    const std::vector<kbqa::Bm25Index::Scored> hits = index.query(query, k);

    ordered_json report = ordered_json::array();
    for (const kbqa::Bm25Index::Scored& hit : hits) {
        ordered_json row;
        row["id"] = hit.id;
        row["score"] = hit.score;
        report.push_back(row);
    }
    if (pretty) {
        for (std::size_t i = 0; i < hits.size(); ++i) {
            std::cout << (i + 1) << ". " << hits[i].id << "  " << format_scalar(hits[i].score)
                      << "\n";
        }
    } else {
        std::cout << report.dump(2) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// build-prompt
// ---------------------------------------------------------------------------

int run_build_prompt(const std::string& spec_path, const std::string& out_path) {
    const kbqa::PromptSpec spec = kbqa::prompt_spec_from_json(parse_json_file(spec_path));
    const std::string prompt = kbqa::assemble_prompt(spec);
    kbqa::write_file_atomic(out_path, prompt);
    write_manifest(out_path, "build-prompt", file_fingerprint(spec_path), "none", 0);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"KBQA data synthesis and evaluation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kbqa::kToolVersion));

    // --- sample-lf / sample-triples -----------------------------------------
    SampleArgs sample_lf;
    CLI::App* cmd_sample_lf =
        app.add_subcommand("sample-lf", "Synthesize logical-form QA items from a KB");
    cmd_sample_lf->add_option("--kb", sample_lf.kb_path, "KB TSV file")->required();
    cmd_sample_lf->add_option("--config", sample_lf.config_path, "sampler config JSON");
    cmd_sample_lf->add_option("--out", sample_lf.out_path, "output dataset JSONL")->required();
    CLI::Option* lf_seed = cmd_sample_lf->add_option("--seed", sample_lf.seed, "override seed");
    CLI::Option* lf_workers =
        cmd_sample_lf->add_option("--workers", sample_lf.workers, "worker threads");
    cmd_sample_lf->add_flag("--pretty", sample_lf.pretty, "table output");

    SampleArgs sample_tq;
    CLI::App* cmd_sample_tq =
        app.add_subcommand("sample-triples", "Sample one-hop fact QA items from a KB");
    cmd_sample_tq->add_option("--kb", sample_tq.kb_path, "KB TSV file")->required();
    cmd_sample_tq->add_option("--config", sample_tq.config_path, "sampler config JSON");
    cmd_sample_tq->add_option("--out", sample_tq.out_path, "output dataset JSONL")->required();
    CLI::Option* tq_seed = cmd_sample_tq->add_option("--seed", sample_tq.seed, "override seed");
    CLI::Option* tq_workers =
        cmd_sample_tq->add_option("--workers", sample_tq.workers, "worker threads");
    cmd_sample_tq->add_flag("--pretty", sample_tq.pretty, "table output");

    // --- verbalize ----------------------------------------------------------
    std::string verb_in, verb_out, verb_requests, verb_responses, verb_kb;
    CLI::App* cmd_verbalize =
        app.add_subcommand("verbalize", "Write template questions for a dataset's logical forms");
    cmd_verbalize->add_option("--in", verb_in, "input dataset JSONL")->required();
    cmd_verbalize->add_option("--out", verb_out, "output dataset JSONL")->required();
    cmd_verbalize->add_option("--kb", verb_kb, "KB TSV file supplying entity labels");
    CLI::Option* opt_requests = cmd_verbalize->add_option(
        "--requests", verb_requests, "also export generation-request JSONL");
    CLI::Option* opt_responses = cmd_verbalize->add_option(
        "--responses", verb_responses, "apply generated questions from response JSONL");
    opt_requests->excludes(opt_responses);
    opt_responses->excludes(opt_requests);

    // --- execute --------------------------------------------------------------
    std::string exec_kb, exec_lf;
    CLI::App* cmd_execute = app.add_subcommand("execute", "Evaluate one logical form against a KB");
    cmd_execute->add_option("--kb", exec_kb, "KB TSV file")->required();
    cmd_execute->add_option("--lf", exec_lf, "s-expression logical form")->required();

    // --- evaluate ---------------------------------------------------------------
    std::string eval_gold, eval_pred, eval_groups_by, eval_partition, eval_report;
    bool eval_pretty = false;
    CLI::App* cmd_evaluate =
        app.add_subcommand("evaluate", "Score predictions against a gold dataset");
    cmd_evaluate->add_option("--gold", eval_gold, "gold dataset JSONL")->required();
    cmd_evaluate->add_option("--pred", eval_pred, "prediction JSONL")->required();
    cmd_evaluate->add_option("--groups-by", eval_groups_by,
                             "paraphrase grouping field (template_id)");
    cmd_evaluate->add_option("--partition", eval_partition,
                             "partition field (level, domain, template_id)");
    cmd_evaluate->add_option("--report", eval_report, "also write the report JSON here");
    cmd_evaluate->add_flag("--pretty", eval_pretty, "table output");

    // --- stats ------------------------------------------------------------------
    std::string stats_kb, stats_data, stats_train, stats_report;
    bool stats_pretty = false;
    CLI::App* cmd_stats = app.add_subcommand("stats", "Dataset distribution diagnostics");
    cmd_stats->add_option("--kb", stats_kb, "KB TSV file")->required();
    cmd_stats->add_option("--data", stats_data, "dataset JSONL")->required();
    cmd_stats->add_option("--train", stats_train, "training split JSONL for unseen ratios");
    cmd_stats->add_option("--report", stats_report, "also write the report JSON here");
    cmd_stats->add_flag("--pretty", stats_pretty, "table output");

    // --- retrieve -----------------------------------------------------------------
    std::string retr_corpus, retr_query;
    int retr_k = 5;
    double retr_k1 = 1.2;
    double retr_b = 0.75;
    bool retr_pretty = false;
    CLI::App* cmd_retrieve = app.add_subcommand("retrieve", "BM25 question retrieval");
    cmd_retrieve->add_option("--corpus", retr_corpus, "corpus dataset JSONL")->required();
    cmd_retrieve->add_option("--query", retr_query, "query text")->required();
    cmd_retrieve->add_option("-k,--k", retr_k, "number of results (default 5)");
    cmd_retrieve->add_option("--k1", retr_k1, "BM25 k1 (default 1.2)");
    cmd_retrieve->add_option("--b", retr_b, "BM25 b (default 0.75)");
    cmd_retrieve->add_flag("--pretty", retr_pretty, "table output");

    // --- build-prompt ----------------------------------------------------------------
    std::string prompt_spec, prompt_out;
    CLI::App* cmd_prompt =
        app.add_subcommand("build-prompt", "Assemble a few-shot prompt from a spec JSON");
    cmd_prompt->add_option("--spec", prompt_spec, "prompt spec JSON")->required();
    cmd_prompt->add_option("--out", prompt_out, "output text file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << app.help() << "\n";
        return 1;
    }

    sample_lf.seed_given = lf_seed->count() > 0;
    sample_lf.workers_given = lf_workers->count() > 0;
    sample_tq.seed_given = tq_seed->count() > 0;
    sample_tq.workers_given = tq_workers->count() > 0;

    try {
        if (cmd_sample_lf->parsed()) return run_sample(sample_lf, true, "sample-lf");
        if (cmd_sample_tq->parsed()) return run_sample(sample_tq, false, "sample-triples");
        if (cmd_verbalize->parsed()) {
            return run_verbalize(verb_in, verb_out, verb_requests, verb_responses, verb_kb);
        }
        if (cmd_execute->parsed()) return run_execute(exec_kb, exec_lf);
        if (cmd_evaluate->parsed()) {
            return run_evaluate(eval_gold, eval_pred, eval_groups_by, eval_partition, eval_report,
                                eval_pretty);
        }
        if (cmd_stats->parsed()) {
            return run_stats(stats_kb, stats_data, stats_train, stats_report, stats_pretty);
        }
        if (cmd_retrieve->parsed()) {
            return run_retrieve(retr_corpus, retr_query, retr_k, retr_k1, retr_b, retr_pretty);
        }
        if (cmd_prompt->parsed()) return run_build_prompt(prompt_spec, prompt_out);
        std::cerr << "error: no subcommand given\n" << app.help() << "\n";
        return 1;
    } catch (const kbqa::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const kbqa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
