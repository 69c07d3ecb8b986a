#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kbqa/dataset_io.hpp"
#include "kbqa/errors.hpp"
#include "kbqa/executor.hpp"
#include "kbqa/kb_store.hpp"
#include "kbqa/sampler.hpp"
#include "kbqa/sexpr.hpp"
#include "kbqa/util.hpp"

using kbqa::AnswerSet;
using kbqa::DataError;
using kbqa::GroundedQuery;
using kbqa::PipelineResult;
using kbqa::QueryTemplate;
using kbqa::SamplerConfig;
using kbqa::SExpr;
using kbqa::SExprKind;
using kbqa::SyntheticItem;
using kbqa::TripleStore;

namespace {

const TripleStore& toy_store() {
    static const TripleStore store = TripleStore::load(std::string(KBQA_DATA_DIR) + "/toy_kb.tsv");
    return store;
}

SExpr parsed(std::string_view text) { return kbqa::parse_sexpr(text).expr; }

std::string canon(std::string_view text) { return kbqa::serialize_sexpr(parsed(text)); }

// A generous config that visits every class/relation of the toy store.
SamplerConfig wide_config(std::uint64_t seed) {
    SamplerConfig config;
    config.seed = seed;
    config.max_hops = 2;
    config.classes_per_run = 16;
    config.groundings_per_template = 4;
    config.entities_per_class = 16;
    config.triples_per_entity = 16;
    return config;
}

std::string lf_jsonl(const PipelineResult& result) {
    return kbqa::dataset_to_jsonl(kbqa::to_dataset(result.lf_items));
}

std::string triple_jsonl(const PipelineResult& result) {
    return kbqa::dataset_to_jsonl(kbqa::to_dataset(result.triple_items));
}

std::size_t sum_counts(const std::map<int, std::size_t>& counts) {
    std::size_t total = 0;
    for (const auto& [key, value] : counts) total += value;
    return total;
}

std::size_t sum_counts(const std::map<std::string, std::size_t>& counts) {
    std::size_t total = 0;
    for (const auto& [key, value] : counts) total += value;
    return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Skeletons and template ids
// ---------------------------------------------------------------------------

TEST_CASE("skeletonize replaces entity and literal leaves with placeholders") {
    CHECK(kbqa::serialize_sexpr(
              kbqa::skeletonize(parsed("(AND food.beer (JOIN food.beer.brewed_by m.brew_1))"))) ==
          "(AND food.beer (JOIN food.beer.brewed_by ?entity))");
    CHECK(kbqa::serialize_sexpr(kbqa::skeletonize(
              parsed("(AND food.beer (le food.beer.original_gravity 1.067^^float))"))) ==
          "(AND food.beer (le food.beer.original_gravity ?float))");
    CHECK(kbqa::serialize_sexpr(
              kbqa::skeletonize(parsed("(JOIN food.beer.style \"pale ale\"^^string)"))) ==
          "(JOIN food.beer.style ?string)");
    CHECK(kbqa::serialize_sexpr(kbqa::skeletonize(
              parsed("(COUNT (AND food.beer (JOIN food.beer.ibu 35^^integer)))"))) ==
          "(COUNT (AND food.beer (JOIN food.beer.ibu ?integer)))");
}

TEST_CASE("entity placeholder hints are advisory and never reach the template id") {
    const SExpr with_hint = parsed("(AND food.beer (JOIN food.beer.brewed_by ?entity:business.brewery))");
    const SExpr bare = parsed("(AND food.beer (JOIN food.beer.brewed_by ?entity))");
    CHECK(kbqa::serialize_sexpr(kbqa::skeletonize(with_hint)) ==
          "(AND food.beer (JOIN food.beer.brewed_by ?entity))");
    CHECK(kbqa::skeleton_template_id(with_hint) == kbqa::skeleton_template_id(bare));
}

TEST_CASE("every grounding of one skeleton shares one template id") {
    const std::string id_1 =
        kbqa::skeleton_template_id(parsed("(AND food.beer (JOIN food.beer.brewed_by m.brew_1))"));
    const std::string id_2 =
        kbqa::skeleton_template_id(parsed("(AND food.beer (JOIN food.beer.brewed_by m.brew_2))"));
    CHECK(id_1 == id_2);
    // The id is a content hash of the serialized skeleton.
    CHECK(id_1 ==
          kbqa::hex64(kbqa::fnv1a64("(AND food.beer (JOIN food.beer.brewed_by ?entity))")));
    CHECK(id_1.size() == 16);

    // Different bounds of one comparator skeleton also agree.
    CHECK(kbqa::skeleton_template_id(
              parsed("(AND food.beer (le food.beer.original_gravity 1.050^^float))")) ==
          kbqa::skeleton_template_id(
              parsed("(AND food.beer (le food.beer.original_gravity 1.090^^float))")));

    // Wrapping changes the skeleton, so the id moves.
    CHECK(kbqa::skeleton_template_id(
              parsed("(COUNT (AND food.beer (JOIN food.beer.brewed_by m.brew_1)))")) != id_1);
}

// ---------------------------------------------------------------------------
// Config parsing and validation
// ---------------------------------------------------------------------------

TEST_CASE("default sampler config is valid and json defaults mirror it") {
    CHECK_NOTHROW(kbqa::validate_sampler_config(SamplerConfig{}));

    const SamplerConfig config = kbqa::sampler_config_from_json(nlohmann::json::object());
    CHECK(config.seed == 0);
    CHECK(config.max_hops == 2);
    CHECK(config.classes_per_run == 8);
    CHECK(config.groundings_per_template == 5);
    CHECK(config.entities_per_class == 50);
    CHECK(config.triples_per_entity == 10);
    CHECK(config.min_relation_triples == 2);
    CHECK(config.workers == 1);
    CHECK(config.function_probabilities.count == doctest::Approx(0.056).epsilon(1e-12));
    CHECK(config.function_probabilities.comparative == doctest::Approx(0.015).epsilon(1e-12));
    CHECK(config.function_probabilities.superlative == doctest::Approx(0.024).epsilon(1e-12));
    CHECK_FALSE(config.domain_filter.has_value());
}

TEST_CASE("sampler config json reads every field") {
    const nlohmann::json payload = {
        {"seed", 7},
        {"max_hops", 3},
        {"classes_per_run", 2},
        {"groundings_per_template", 9},
        {"entities_per_class", 4},
        {"triples_per_entity", 6},
        {"min_relation_triples", 3},
        {"workers", 5},
        {"function_probabilities", {{"count", 0.5}, {"comparative", 0.25}, {"superlative", 0.25}}},
        {"domain_filter", {"food", "people"}},
    };
    const SamplerConfig config = kbqa::sampler_config_from_json(payload);
    CHECK(config.seed == 7);
    CHECK(config.max_hops == 3);
    CHECK(config.classes_per_run == 2);
    CHECK(config.groundings_per_template == 9);
    CHECK(config.entities_per_class == 4);
    CHECK(config.triples_per_entity == 6);
    CHECK(config.min_relation_triples == 3);
    CHECK(config.workers == 5);
    CHECK(config.function_probabilities.count == 0.5);
    CHECK(config.function_probabilities.comparative == 0.25);
    CHECK(config.function_probabilities.superlative == 0.25);
    REQUIRE(config.domain_filter.has_value());
    CHECK(*config.domain_filter == std::set<std::string>{"food", "people"});
}

TEST_CASE("sampler config json rejects malformed input with exact messages") {
    auto reject = [](const nlohmann::json& payload, const char* message) {
        CHECK_THROWS_WITH_AS(kbqa::sampler_config_from_json(payload), message, DataError);
    };
    reject(nlohmann::json::array(), "sampler config: top level must be an object");
    reject({{"bogus", 1}}, "sampler config: unknown key 'bogus'");
    reject({{"seed", "xyz"}}, "sampler config: 'seed' must be an integer");
    reject({{"max_hops", 1.5}}, "sampler config: 'max_hops' must be an integer");
    reject({{"max_hops", 0}}, "sampler config: max_hops must be in [1, 4]");
    reject({{"max_hops", 5}}, "sampler config: max_hops must be in [1, 4]");
    reject({{"classes_per_run", 0}}, "sampler config: classes_per_run must be >= 1");
    reject({{"groundings_per_template", 0}},
           "sampler config: groundings_per_template must be >= 1");
    reject({{"entities_per_class", 0}}, "sampler config: entities_per_class must be >= 1");
    reject({{"triples_per_entity", 0}}, "sampler config: triples_per_entity must be >= 1");
    reject({{"min_relation_triples", 0}}, "sampler config: min_relation_triples must be >= 1");
    reject({{"workers", 0}}, "sampler config: workers must be >= 1");
    reject({{"function_probabilities", 3}},
           "sampler config: 'function_probabilities' must be an object");
    reject({{"function_probabilities", {{"mean", 0.5}}}},
           "sampler config: unknown probability 'mean'");
    reject({{"function_probabilities", {{"count", "lots"}}}},
           "sampler config: probability 'count' must be a number");
    reject({{"function_probabilities", {{"count", 1.5}}}},
           "sampler config: function probabilities must sit in [0, 1]");
    reject({{"function_probabilities", {{"count", -0.1}}}},
           "sampler config: function probabilities must sit in [0, 1]");
    reject({{"function_probabilities", {{"count", 0.6}, {"comparative", 0.6}}}},
           "sampler config: function probabilities must sum to <= 1");
    reject({{"domain_filter", "food"}}, "sampler config: 'domain_filter' must be an array");
    reject({{"domain_filter", {1, 2}}}, "sampler config: 'domain_filter' must contain strings");
}

// ---------------------------------------------------------------------------
// Stage 1: templates
// ---------------------------------------------------------------------------

TEST_CASE("templates pair an origin class with a placeholder-terminated walk") {
    const SamplerConfig config = wide_config(11);
    const std::vector<QueryTemplate> templates = kbqa::build_templates(toy_store(), config);
    REQUIRE(!templates.empty());

    std::set<std::string> ids;
    for (const QueryTemplate& tmpl : templates) {
        CHECK(tmpl.hops >= 1);
        CHECK(tmpl.hops <= config.max_hops);
        CHECK(tmpl.id == kbqa::skeleton_template_id(tmpl.skeleton));
        CHECK(ids.insert(tmpl.id).second);  // ids are unique per run

        const std::string text = kbqa::serialize_sexpr(tmpl.skeleton);
        CHECK(text.rfind("(AND " + tmpl.origin_class + " (JOIN ", 0) == 0);
        CHECK(text.find('?') != std::string::npos);  // exactly the open slot
        // The walk length shows up as JOIN nesting depth.
        CHECK(kbqa::analyze(tmpl.skeleton).hops == tmpl.hops);
    }
}

TEST_CASE("template construction is deterministic for a fixed seed") {
    const SamplerConfig config = wide_config(23);
    const std::vector<QueryTemplate> first = kbqa::build_templates(toy_store(), config);
    const std::vector<QueryTemplate> second = kbqa::build_templates(toy_store(), config);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(kbqa::serialize_sexpr(first[i].skeleton) ==
              kbqa::serialize_sexpr(second[i].skeleton));
        CHECK(first[i].id == second[i].id);
        CHECK(first[i].origin_class == second[i].origin_class);
        CHECK(first[i].hops == second[i].hops);
    }
}

TEST_CASE("max_hops bounds the walk length") {
    SamplerConfig config = wide_config(5);
    config.max_hops = 1;
    for (const QueryTemplate& tmpl : kbqa::build_templates(toy_store(), config)) {
        CHECK(tmpl.hops == 1);
    }
}

TEST_CASE("domain filter restricts template origins") {
    SamplerConfig config = wide_config(9);
    config.domain_filter = std::set<std::string>{"food"};
    const std::vector<QueryTemplate> templates = kbqa::build_templates(toy_store(), config);
    REQUIRE(!templates.empty());
    for (const QueryTemplate& tmpl : templates) {
        CHECK(tmpl.origin_class == "food.beer");
    }

    config.domain_filter = std::set<std::string>{"no_such_domain"};
    std::vector<std::string> warnings;
    CHECK(kbqa::build_templates(toy_store(), config, &warnings).empty());
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0] == "no classes match the domain filter");
}

// ---------------------------------------------------------------------------
// Stage 2: grounding
// ---------------------------------------------------------------------------

TEST_CASE("grounding binds placeholders to connected values") {
    SamplerConfig config = wide_config(31);
    config.domain_filter = std::set<std::string>{"food"};
    const std::vector<QueryTemplate> templates = kbqa::build_templates(toy_store(), config);
    REQUIRE(!templates.empty());

    for (const QueryTemplate& tmpl : templates) {
        const std::vector<GroundedQuery> groundings = kbqa::ground(tmpl, toy_store(), config);
        REQUIRE(!groundings.empty());
        CHECK(groundings.size() <=
              static_cast<std::size_t>(config.groundings_per_template));
        for (const GroundedQuery& grounded : groundings) {
            CHECK(grounded.template_id == tmpl.id);
            CHECK(grounded.origin_class == tmpl.origin_class);
            // Placeholders are gone, and the binding preserves the skeleton.
            const std::string text = kbqa::serialize_sexpr(grounded.expr);
            CHECK(text.find('?') == std::string::npos);
            CHECK(kbqa::skeleton_template_id(grounded.expr) == tmpl.id);
            // Walk-derived bindings stay executable.
            CHECK_NOTHROW(kbqa::execute(grounded.expr, toy_store()));
        }
    }
}

TEST_CASE("grounding a hand-built template enumerates reachable entities") {
    QueryTemplate tmpl;
    tmpl.skeleton = parsed("(AND food.beer (JOIN food.beer.brewed_by ?entity))");
    tmpl.origin_class = "food.beer";
    tmpl.hops = 1;
    tmpl.id = kbqa::skeleton_template_id(tmpl.skeleton);

    SamplerConfig config = wide_config(3);
    config.groundings_per_template = 10;
    const std::vector<GroundedQuery> groundings = kbqa::ground(tmpl, toy_store(), config);

    std::set<std::string> texts;
    for (const GroundedQuery& grounded : groundings) {
        texts.insert(kbqa::serialize_sexpr(grounded.expr));
    }
    // Only the two breweries are reachable on the brewed_by edge from beers.
    CHECK(texts == std::set<std::string>{
                       "(AND food.beer (JOIN food.beer.brewed_by m.brew_1))",
                       "(AND food.beer (JOIN food.beer.brewed_by m.brew_2))",
                   });
}

TEST_CASE("grounding respects the per-template quota") {
    QueryTemplate tmpl;
    tmpl.skeleton = parsed("(AND food.beer (JOIN food.beer.original_gravity ?float))");
    tmpl.origin_class = "food.beer";
    tmpl.hops = 1;
    tmpl.id = kbqa::skeleton_template_id(tmpl.skeleton);

    SamplerConfig config = wide_config(3);
    config.groundings_per_template = 2;
    const std::vector<GroundedQuery> groundings = kbqa::ground(tmpl, toy_store(), config);
    CHECK(groundings.size() == 2);  // three gravities observed, quota wins
    for (const GroundedQuery& grounded : groundings) {
        const std::string text = kbqa::serialize_sexpr(grounded.expr);
        const bool known = text == "(AND food.beer (JOIN food.beer.original_gravity 1.050^^float))" ||
                           text == "(AND food.beer (JOIN food.beer.original_gravity 1.070^^float))" ||
                           text == "(AND food.beer (JOIN food.beer.original_gravity 1.090^^float))";
        CHECK(known);
    }
}

// ---------------------------------------------------------------------------
// Stage 3: function attachment
// ---------------------------------------------------------------------------

TEST_CASE("the grounded expression always survives function attachment") {
    GroundedQuery grounded;
    grounded.expr = parsed("(AND food.beer (JOIN food.beer.brewed_by m.brew_1))");
    grounded.template_id = "t";
    grounded.origin_class = "food.beer";

    SamplerConfig config = wide_config(1);
    config.function_probabilities = {0.0, 0.0, 0.0};
    const std::vector<SExpr> variants = kbqa::attach_functions(grounded, toy_store(), config);
    REQUIRE(variants.size() == 1);
    CHECK(kbqa::serialize_sexpr(variants[0]) == kbqa::serialize_sexpr(grounded.expr));
}

TEST_CASE("a certain count draw wraps the query in COUNT") {
    GroundedQuery grounded;
    grounded.expr = parsed("(AND food.beer (JOIN food.beer.brewed_by m.brew_1))");
    grounded.origin_class = "food.beer";

    SamplerConfig config = wide_config(1);
    config.function_probabilities = {1.0, 0.0, 0.0};
    const std::vector<SExpr> variants = kbqa::attach_functions(grounded, toy_store(), config);
    REQUIRE(variants.size() == 2);
    CHECK(kbqa::serialize_sexpr(variants[0]) ==
          "(AND food.beer (JOIN food.beer.brewed_by m.brew_1))");
    CHECK(kbqa::serialize_sexpr(variants[1]) ==
          "(COUNT (AND food.beer (JOIN food.beer.brewed_by m.brew_1)))");
}

TEST_CASE("a certain comparative draw filters the class by an observed bound") {
    GroundedQuery grounded;
    grounded.expr = parsed("(AND food.beer (JOIN food.beer.brewed_by m.brew_1))");
    grounded.origin_class = "food.beer";

    SamplerConfig config = wide_config(77);
    config.function_probabilities = {0.0, 1.0, 0.0};
    const std::vector<SExpr> variants = kbqa::attach_functions(grounded, toy_store(), config);
    REQUIRE(variants.size() == 2);

    const SExpr& wrapped = variants[1];
    REQUIRE(wrapped.kind == SExprKind::And);
    REQUIRE(wrapped.children[0].kind == SExprKind::ClassAtom);
    CHECK(wrapped.children[0].name == "food.beer");
    const SExpr& inner = wrapped.children[1];
    REQUIRE(inner.kind == SExprKind::And);
    REQUIRE(inner.children[0].kind == SExprKind::Cmp);
    CHECK(kbqa::serialize_sexpr(inner.children[1]) ==
          "(JOIN food.beer.brewed_by m.brew_1)");

    // The comparator runs over a numeric relation of the origin class with a
    // bound that the store actually contains, so the variant is executable.
    const std::string cmp = kbqa::serialize_sexpr(inner.children[0]);
    const std::set<std::string> bounds = {
        "1.050^^float)", "1.070^^float)", "1.090^^float)", "35^^integer)", "70^^integer)"};
    bool bound_observed = false;
    for (const std::string& suffix : bounds) {
        if (cmp.size() >= suffix.size() &&
            cmp.compare(cmp.size() - suffix.size(), suffix.size(), suffix) == 0) {
            bound_observed = true;
        }
    }
    CHECK(bound_observed);
    const bool rel_numeric = inner.children[0].name == "food.beer.original_gravity" ||
                             inner.children[0].name == "food.beer.ibu";
    CHECK(rel_numeric);
    CHECK(kbqa::analyze(wrapped).function == kbqa::FunctionTag::Comparative);
    CHECK_NOTHROW(kbqa::execute(wrapped, toy_store()));
}

TEST_CASE("a certain superlative draw ranks by a numeric relation") {
    GroundedQuery grounded;
    grounded.expr = parsed("(AND food.beer (JOIN food.beer.brewed_by m.brew_1))");
    grounded.origin_class = "food.beer";

    SamplerConfig config = wide_config(123);
    config.function_probabilities = {0.0, 0.0, 1.0};
    const std::vector<SExpr> variants = kbqa::attach_functions(grounded, toy_store(), config);
    REQUIRE(variants.size() == 2);

    const SExpr& wrapped = variants[1];
    const bool is_superlative =
        wrapped.kind == SExprKind::ArgMin || wrapped.kind == SExprKind::ArgMax;
    REQUIRE(is_superlative);
    const bool rel_numeric = wrapped.name == "food.beer.original_gravity" ||
                             wrapped.name == "food.beer.ibu";
    CHECK(rel_numeric);
    CHECK(kbqa::serialize_sexpr(wrapped.children[0]) ==
          "(AND food.beer (JOIN food.beer.brewed_by m.brew_1))");
    CHECK(kbqa::analyze(wrapped).function == kbqa::FunctionTag::Superlative);
}

TEST_CASE("classes without numeric evidence never gain comparators or superlatives") {
    GroundedQuery grounded;
    grounded.expr =
        parsed("(AND people.profession (JOIN people.profession.people_with_this_profession m.012d40))");
    grounded.origin_class = "people.profession";

    SamplerConfig config = wide_config(123);
    config.function_probabilities = {0.0, 0.0, 1.0};
    CHECK(kbqa::attach_functions(grounded, toy_store(), config).size() == 1);
    config.function_probabilities = {0.0, 1.0, 0.0};
    CHECK(kbqa::attach_functions(grounded, toy_store(), config).size() == 1);
}

TEST_CASE("function attachment falls back to the first class in the expression") {
    GroundedQuery grounded;
    grounded.expr = parsed("(AND food.beer (JOIN food.beer.brewed_by m.brew_1))");
    grounded.origin_class.clear();  // force the fallback

    SamplerConfig config = wide_config(123);
    config.function_probabilities = {0.0, 0.0, 1.0};
    const std::vector<SExpr> variants = kbqa::attach_functions(grounded, toy_store(), config);
    CHECK(variants.size() == 2);
}

TEST_CASE("function attachment draws are reproducible") {
    GroundedQuery grounded;
    grounded.expr = parsed("(AND food.beer (JOIN food.beer.brewed_by m.brew_1))");
    grounded.origin_class = "food.beer";

    SamplerConfig config = wide_config(2024);
    config.function_probabilities = {0.2, 0.4, 0.4};
    const std::vector<SExpr> first = kbqa::attach_functions(grounded, toy_store(), config);
    const std::vector<SExpr> second = kbqa::attach_functions(grounded, toy_store(), config);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(kbqa::serialize_sexpr(first[i]) == kbqa::serialize_sexpr(second[i]));
    }
}

// ---------------------------------------------------------------------------
// Stage 4: verification
// ---------------------------------------------------------------------------

TEST_CASE("verification keeps non-null answers and reports type-error drops") {
    const std::vector<SExpr> exprs = {
        parsed("(AND food.beer (le food.beer.original_gravity 1.050^^float))"),  // {m.beer_a}
        parsed("(AND food.beer (lt food.beer.original_gravity 1.050^^float))"),  // empty
        parsed("(le food.beer.style 1.0^^float)"),                               // type error
        parsed("(COUNT (AND food.beer (JOIN food.beer.brewed_by m.unknown)))"),  // count 0
    };
    std::vector<std::string> dropped;
    const std::vector<SyntheticItem> items = kbqa::verify(exprs, toy_store(), &dropped);

    REQUIRE(items.size() == 1);
    const SyntheticItem& item = items[0];
    CHECK(item.kind == SyntheticItem::Kind::LogicalForm);
    REQUIRE(item.expr.has_value());
    CHECK(kbqa::serialize_sexpr(*item.expr) ==
          "(AND food.beer (le food.beer.original_gravity 1.050^^float))");
    CHECK(item.answers == AnswerSet::entities({"m.beer_a"}));
    CHECK(item.template_id == kbqa::skeleton_template_id(*item.expr));
    CHECK(item.domain == "food");
    CHECK(!item.question.empty());
    CHECK(item.question.find("which") == 0);

    // Null results vanish silently; only execution errors are reported.
    REQUIRE(dropped.size() == 1);
    CHECK(dropped[0].find("dropped '(le food.beer.style 1.0^^float)':") == 0);
}

TEST_CASE("verification of a count query records the cardinality") {
    const std::vector<SExpr> exprs = {
        parsed("(COUNT (AND food.beer (JOIN food.beer.brewed_by m.brew_1)))"),
    };
    const std::vector<SyntheticItem> items = kbqa::verify(exprs, toy_store());
    REQUIRE(items.size() == 1);
    CHECK(items[0].answers == AnswerSet::counted(2));
}

// ---------------------------------------------------------------------------
// Triple route
// ---------------------------------------------------------------------------

TEST_CASE("triple sampling emits store facts above the frequency floor") {
    SamplerConfig config = wide_config(42);
    config.min_relation_triples = 3;
    const std::vector<SyntheticItem> items = kbqa::sample_triples(toy_store(), config);

    // Exactly three relations appear three or more times; the wide config
    // keeps every head and tail, so all nine facts come back.
    CHECK(items.size() == 9);
    const std::set<std::string> eligible = {
        "food.beer.original_gravity",
        "food.beer.brewed_by",
        "people.profession.people_with_this_profession",
    };
    for (const SyntheticItem& item : items) {
        CHECK(item.kind == SyntheticItem::Kind::TripleFact);
        CHECK_FALSE(item.expr.has_value());
        REQUIRE(item.triple.has_value());
        CHECK(eligible.count(item.triple->relation) == 1);

        // The sampled fact is a real edge, and the answer is its object.
        const std::string object_token = kbqa::node_token(item.triple->object);
        const auto& objects = toy_store().objects_of(item.triple->subject, item.triple->relation);
        CHECK(objects.count(object_token) == 1);
        REQUIRE(item.answers.items.size() == 1);
        CHECK(*item.answers.items.begin() == object_token);
        const bool literal_object = toy_store().literal_from_token(object_token) != nullptr;
        CHECK(item.answers.kind == (literal_object ? AnswerSet::Kind::Literals
                                                   : AnswerSet::Kind::Entities));

        CHECK(item.template_id == kbqa::hex64(kbqa::fnv1a64("triple:" + item.triple->relation)));
        CHECK(item.domain == kbqa::domain_of_class(item.triple->relation));
        CHECK(!item.question.empty());
        CHECK(item.question.find("what is the ") == 0);
    }
}

TEST_CASE("a high frequency floor removes every relation") {
    SamplerConfig config = wide_config(42);
    config.min_relation_triples = 4;
    CHECK(kbqa::sample_triples(toy_store(), config).empty());
}

TEST_CASE("triple sampling respects the per-entity budget") {
    SamplerConfig config = wide_config(42);
    config.min_relation_triples = 3;
    config.triples_per_entity = 1;
    const std::vector<SyntheticItem> items = kbqa::sample_triples(toy_store(), config);
    // m.actor holds two facts on the profession relation; the budget keeps one.
    CHECK(items.size() == 8);
    std::map<std::string, int> per_head;
    for (const SyntheticItem& item : items) {
        ++per_head[item.triple->relation + "|" + item.triple->subject];
    }
    for (const auto& [key, count] : per_head) {
        CHECK(count == 1);
    }
}

TEST_CASE("triple sampling is seed-deterministic") {
    SamplerConfig config = wide_config(42);
    config.classes_per_run = 2;
    config.entities_per_class = 2;
    config.triples_per_entity = 1;
    auto render = [&](const SamplerConfig& c) {
        std::string out;
        for (const SyntheticItem& item : kbqa::sample_triples(toy_store(), c)) {
            out += item.triple->subject + "\t" + item.triple->relation + "\t" +
                   kbqa::node_token(item.triple->object) + "\n";
        }
        return out;
    };
    CHECK(render(config) == render(config));
    SamplerConfig other = config;
    other.seed = 4242;
    CHECK(render(config) != render(other));
}

// ---------------------------------------------------------------------------
// End-to-end pipeline
// ---------------------------------------------------------------------------

TEST_CASE("pipeline items re-execute to their recorded answers") {
    SamplerConfig config = wide_config(42);
    config.function_probabilities = {0.34, 0.33, 0.33};
    const PipelineResult result = kbqa::run_pipeline(toy_store(), config);
    REQUIRE(!result.lf_items.empty());
    REQUIRE(!result.triple_items.empty());

    for (const SyntheticItem& item : result.lf_items) {
        REQUIRE(item.expr.has_value());
        CHECK_FALSE(kbqa::is_null(item.answers));
        CHECK(kbqa::execute(*item.expr, toy_store()) == item.answers);
        CHECK(item.template_id == kbqa::skeleton_template_id(*item.expr));
        CHECK(!item.question.empty());
        CHECK(!item.domain.empty());
    }
}

TEST_CASE("pipeline summary partitions add up") {
    SamplerConfig config = wide_config(42);
    config.function_probabilities = {0.34, 0.33, 0.33};
    const PipelineResult result = kbqa::run_pipeline(toy_store(), config);
    const kbqa::PipelineSummary& summary = result.summary;

    CHECK(summary.question_count == result.lf_items.size());
    CHECK(sum_counts(summary.hop_counts) == summary.question_count);
    CHECK(sum_counts(summary.function_counts) == summary.question_count);
    CHECK(sum_counts(summary.domain_counts) == summary.question_count);
    CHECK(summary.triple_count == result.triple_items.size());
    CHECK(sum_counts(summary.triple_domain_counts) == summary.triple_count);
    for (const auto& [tag, count] : summary.function_counts) {
        const bool known = tag == "none" || tag == "count" || tag == "comparative" ||
                           tag == "superlative";
        CHECK(known);
    }
    for (const auto& [hops, count] : summary.hop_counts) {
        CHECK(hops >= 1);
        CHECK(hops <= config.max_hops);
    }
    CHECK_FALSE(summary.unseen_relation_fraction.has_value());

    // Distinct schema tallies match a recount over the emitted items.
    std::set<std::string> classes;
    std::set<std::string> relations;
    std::set<std::string> entities;
    for (const SyntheticItem& item : result.lf_items) {
        const kbqa::Analysis analysis = kbqa::analyze(*item.expr);
        classes.insert(analysis.classes.begin(), analysis.classes.end());
        relations.insert(analysis.relations.begin(), analysis.relations.end());
        entities.insert(analysis.entities.begin(), analysis.entities.end());
    }
    CHECK(summary.distinct_classes == classes.size());
    CHECK(summary.distinct_relations == relations.size());
    CHECK(summary.distinct_entities == entities.size());

    const nlohmann::json j = summary.to_json();
    CHECK(j["question_count"].get<std::size_t>() == summary.question_count);
    CHECK(j["triple_count"].get<std::size_t>() == summary.triple_count);
    CHECK(!j.contains("unseen_relation_fraction"));
}

TEST_CASE("pipeline output is byte-identical across reruns and worker counts") {
    SamplerConfig config = wide_config(42);
    config.function_probabilities = {0.34, 0.33, 0.33};

    const PipelineResult base = kbqa::run_pipeline(toy_store(), config);
    const PipelineResult again = kbqa::run_pipeline(toy_store(), config);
    CHECK(lf_jsonl(base) == lf_jsonl(again));
    CHECK(triple_jsonl(base) == triple_jsonl(again));

    SamplerConfig parallel = config;
    parallel.workers = 4;
    const PipelineResult fanned = kbqa::run_pipeline(toy_store(), parallel);
    CHECK(lf_jsonl(base) == lf_jsonl(fanned));
    CHECK(triple_jsonl(base) == triple_jsonl(fanned));

    SamplerConfig reseeded = config;
    reseeded.seed = 999;
    const PipelineResult other = kbqa::run_pipeline(toy_store(), reseeded);
    CHECK(lf_jsonl(base) != lf_jsonl(other));
}

TEST_CASE("unseen relation fraction compares emissions against a seen set") {
    SamplerConfig config = wide_config(42);

    // First run: collect everything the pipeline emits.
    const PipelineResult probe = kbqa::run_pipeline(toy_store(), config);
    std::set<std::string> seen;
    for (const SyntheticItem& item : probe.lf_items) {
        const kbqa::Analysis analysis = kbqa::analyze(*item.expr);
        seen.insert(analysis.relations.begin(), analysis.relations.end());
    }
    for (const SyntheticItem& item : probe.triple_items) {
        seen.insert(item.triple->relation);
    }
    REQUIRE(!seen.empty());

    const PipelineResult covered = kbqa::run_pipeline(toy_store(), config, true, true, &seen);
    REQUIRE(covered.summary.unseen_relation_fraction.has_value());
    CHECK(*covered.summary.unseen_relation_fraction == 0.0);

    const std::set<std::string> empty_seen;
    const PipelineResult fresh = kbqa::run_pipeline(toy_store(), config, true, true, &empty_seen);
    REQUIRE(fresh.summary.unseen_relation_fraction.has_value());
    CHECK(*fresh.summary.unseen_relation_fraction == 1.0);
    CHECK(fresh.summary.to_json()["unseen_relation_fraction"].get<double>() == 1.0);
}

TEST_CASE("pipeline honors the domain filter for logical forms only") {
    SamplerConfig config = wide_config(42);
    config.domain_filter = std::set<std::string>{"food"};
    const PipelineResult result = kbqa::run_pipeline(toy_store(), config);
    REQUIRE(!result.lf_items.empty());
    for (const SyntheticItem& item : result.lf_items) {
        CHECK(item.domain == "food");
    }
    // The raw-fact route ignores class domains by design.
    CHECK(!result.triple_items.empty());

    SamplerConfig hopeless = wide_config(42);
    hopeless.domain_filter = std::set<std::string>{"no_such_domain"};
    std::vector<std::string> warnings;
    const PipelineResult empty =
        kbqa::run_pipeline(toy_store(), hopeless, true, false, nullptr, &warnings);
    CHECK(empty.lf_items.empty());
    CHECK(empty.summary.question_count == 0);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0] == "no classes match the domain filter");
}

TEST_CASE("pipeline can run each route alone") {
    SamplerConfig config = wide_config(42);
    const PipelineResult lf_only = kbqa::run_pipeline(toy_store(), config, true, false);
    CHECK(!lf_only.lf_items.empty());
    CHECK(lf_only.triple_items.empty());
    CHECK(lf_only.summary.triple_count == 0);

    const PipelineResult triples_only = kbqa::run_pipeline(toy_store(), config, false, true);
    CHECK(triples_only.lf_items.empty());
    CHECK(triples_only.summary.question_count == 0);
    CHECK(!triples_only.triple_items.empty());
}

// ---------------------------------------------------------------------------
// Dataset conversion
// ---------------------------------------------------------------------------

TEST_CASE("dataset conversion numbers each item kind independently") {
    SamplerConfig config = wide_config(42);
    config.function_probabilities = {1.0, 0.0, 0.0};  // guarantees count items
    const PipelineResult result = kbqa::run_pipeline(toy_store(), config);
    REQUIRE(result.lf_items.size() >= 2);
    REQUIRE(!result.triple_items.empty());

    std::vector<SyntheticItem> mixed = {
        result.lf_items[0], result.triple_items[0], result.lf_items[1]};
    const std::vector<kbqa::DatasetRecord> records = kbqa::to_dataset(mixed);
    REQUIRE(records.size() == 3);
    CHECK(records[0].qid == "lf-000001");
    CHECK(records[1].qid == "tq-000001");
    CHECK(records[2].qid == "lf-000002");

    // Logical-form records carry the serialized expression verbatim.
    CHECK(records[0].s_expression == kbqa::serialize_sexpr(*result.lf_items[0].expr));
    CHECK(records[0].question == result.lf_items[0].question);
    CHECK(records[0].template_id == result.lf_items[0].template_id);
    CHECK(records[0].domain == result.lf_items[0].domain);

    // Triple records carry an executable inverse join over the subject.
    const kbqa::Triple& fact = *result.triple_items[0].triple;
    CHECK(records[1].s_expression ==
          "(JOIN (R " + fact.relation + ") " + fact.subject + ")");
    REQUIRE(records[1].answers.size() == 1);
    CHECK(records[1].answers[0] == kbqa::node_token(fact.object));
}

TEST_CASE("count answers serialize as the cardinality") {
    const std::vector<SExpr> exprs = {
        parsed("(COUNT (AND food.beer (JOIN food.beer.brewed_by m.brew_1)))"),
    };
    const std::vector<SyntheticItem> items = kbqa::verify(exprs, toy_store());
    REQUIRE(items.size() == 1);
    const std::vector<kbqa::DatasetRecord> records = kbqa::to_dataset(items);
    REQUIRE(records.size() == 1);
    CHECK(records[0].qid == "lf-000001");
    CHECK(records[0].answers == std::vector<std::string>{"2"});
}

TEST_CASE("dataset records from the pipeline survive a serialization round trip") {
    SamplerConfig config = wide_config(42);
    const PipelineResult result = kbqa::run_pipeline(toy_store(), config);
    const std::vector<kbqa::DatasetRecord> records = kbqa::to_dataset(result.lf_items);
    REQUIRE(!records.empty());
    const std::string text = kbqa::dataset_to_jsonl(records);
    // Every emitted logical form parses back to the same canonical string.
    for (const kbqa::DatasetRecord& record : records) {
        CHECK(canon(record.s_expression) == record.s_expression);
    }
    CHECK(text.find("\"level\"") == std::string::npos);  // unset optionals stay absent
}
