#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kbqa/dataset_io.hpp"
#include "kbqa/errors.hpp"
#include "kbqa/kb_store.hpp"
#include "kbqa/stats.hpp"
#include "kbqa/util.hpp"
#include "support/cases.hpp"
#include "support/oracles.hpp"

using kbqa::DatasetRecord;
using kbqa::StatsReport;
using kbqa::TripleStore;

namespace {

const TripleStore& toy_store() {
    static const TripleStore store = TripleStore::load(std::string(KBQA_DATA_DIR) + "/toy_kb.tsv");
    return store;
}

DatasetRecord record(std::string qid, std::string question, std::string lf) {
    DatasetRecord out;
    out.qid = std::move(qid);
    out.question = std::move(question);
    out.s_expression = std::move(lf);
    return out;
}

}  // namespace

TEST_CASE("partial ratio slides the shorter string over the longer") {
    CHECK(kbqa::partial_ratio("jackie chan", "jackie chan") == 1.0);
    CHECK(kbqa::partial_ratio("Jackie Chan", "jackie chan") == 1.0);  // case-folded
    CHECK(kbqa::partial_ratio("abc", "zzabczz") == 1.0);              // embedded window
    CHECK(kbqa::partial_ratio("abc", "xyz") == 0.0);
    CHECK(kbqa::partial_ratio("", "") == 1.0);
    CHECK(kbqa::partial_ratio("", "abc") == 0.0);
    CHECK(kbqa::partial_ratio("abc", "") == 0.0);
    // LCS("ab", "ba") = 1 over window length 2 on both sides.
    CHECK(kbqa::partial_ratio("ab", "ba") == 0.5);
    // Symmetric by construction.
    CHECK(kbqa::partial_ratio("beer", "which beer is strongest?") ==
          kbqa::partial_ratio("which beer is strongest?", "beer"));
}

TEST_CASE("partial ratio agrees with the all-windows reference") {
    kbqa::Rng rng(kbqa::derive_seed(40404, "partial-ratio", 0));
    const std::string alphabet = "abcdefg xyz";
    for (int i = 0; i < 300; ++i) {
        const std::string a = cases::random_text(rng, 30, alphabet);
        const std::string b = cases::random_text(rng, 30, alphabet);
        CAPTURE(a);
        CAPTURE(b);
        CHECK(kbqa::partial_ratio(a, b) ==
              doctest::Approx(oracle::partial_ratio(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("schema item extraction unions classes and relations") {
    const std::vector<DatasetRecord> records = {
        record("q1", "one", "(AND food.beer (JOIN food.beer.brewed_by m.brew_1))"),
        record("q2", "two", "(JOIN business.brewery.city m.city_1)"),
    };
    CHECK(kbqa::schema_items_of(records) ==
          std::set<std::string>{"food.beer", "food.beer.brewed_by", "business.brewery.city"});

    const std::vector<DatasetRecord> broken = {record("q9", "bad", "(AND a.b")};
    CHECK_THROWS_WITH_AS(kbqa::schema_items_of(broken),
                         doctest::Contains("qid 'q9'"), kbqa::DataError);
}

TEST_CASE("dataset statistics average question length and mention counts") {
    const std::vector<DatasetRecord> records = {
        record("q1", "0123456789", "(JOIN food.beer.brewed_by m.brew_1)"),
        record("q2", "01234567890123456789", "(AND food.beer (JOIN food.beer.brewed_by m.brew_1))"),
    };
    const StatsReport report = kbqa::dataset_statistics(records, toy_store(), std::nullopt);
    CHECK(report.question_count == 2);
    CHECK(report.avg_question_chars == 15.0);
    CHECK(report.avg_entities_per_lf == 1.0);
    CHECK(report.avg_relations_per_lf == 1.0);
    // No reference schema given: the unseen ratios stay unset.
    CHECK_FALSE(report.unseen_schema_ratio.has_value());
    CHECK_FALSE(report.unseen_question_ratio.has_value());

    // Question length counts code points, not bytes.
    const StatsReport utf8 = kbqa::dataset_statistics(
        {record("q1", "caf\xc3\xa9 m\xc3\xa5u", "(JOIN food.beer.brewed_by m.brew_1)")},
        toy_store(), std::nullopt);
    CHECK(utf8.avg_question_chars == 8.0);

    CHECK_THROWS_AS(kbqa::dataset_statistics({}, toy_store(), std::nullopt), kbqa::DataError);
    CHECK_THROWS_WITH_AS(
        kbqa::dataset_statistics({record("q7", "x", "(((")}, toy_store(), std::nullopt),
        doctest::Contains("qid 'q7'"), kbqa::DataError);
}

TEST_CASE("question/schema similarity uses labels and humanized names") {
    // The store label of m.012d40 ("jackie chan") appears verbatim in the
    // question, as does the humanized class name ("profession").
    const std::vector<DatasetRecord> labeled = {
        record("q1", "which profession does jackie chan hold?",
               "(AND people.profession (JOIN "
               "people.profession.people_with_this_profession m.012d40))"),
    };
    const StatsReport report = kbqa::dataset_statistics(labeled, toy_store(), std::nullopt);
    REQUIRE(report.similarity_entity.has_value());
    CHECK(*report.similarity_entity == 1.0);
    REQUIRE(report.similarity_class.has_value());
    CHECK(*report.similarity_class == 1.0);
    REQUIRE(report.similarity_relation.has_value());
    CHECK(*report.similarity_relation ==
          kbqa::partial_ratio("which profession does jackie chan hold?",
                              "people with this profession"));

    // Entities missing from the store fall back to annotation labels.
    const std::vector<DatasetRecord> annotated = {
        record("q2", "where does some phrase live?",
               "(JOIN people.person.nationality m.zzz) |entity|m.zzz some phrase"),
    };
    const StatsReport fallback = kbqa::dataset_statistics(annotated, toy_store(), std::nullopt);
    REQUIRE(fallback.similarity_entity.has_value());
    CHECK(*fallback.similarity_entity == 1.0);

    // Without a label anywhere, the raw id is compared.
    const std::vector<DatasetRecord> bare = {
        record("q3", "completely unrelated text", "(JOIN people.person.nationality m.qqq)"),
    };
    const StatsReport raw = kbqa::dataset_statistics(bare, toy_store(), std::nullopt);
    REQUIRE(raw.similarity_entity.has_value());
    CHECK(*raw.similarity_entity ==
          kbqa::partial_ratio("completely unrelated text", "m.qqq"));

    // A dataset with no entity mentions reports no entity similarity.
    const std::vector<DatasetRecord> entityless = {record("q4", "plain", "food.beer")};
    const StatsReport none = kbqa::dataset_statistics(entityless, toy_store(), std::nullopt);
    CHECK_FALSE(none.similarity_entity.has_value());
    CHECK(none.similarity_class.has_value());
}

TEST_CASE("unseen ratios compare evaluation schema against a reference set") {
    const std::vector<DatasetRecord> train = {
        record("t1", "a", "(JOIN rel.r1 m.a)"),
        record("t2", "b", "(JOIN rel.r2 m.b)"),
    };
    const std::set<std::string> seen = kbqa::schema_items_of(train);
    CHECK(seen == std::set<std::string>{"rel.r1", "rel.r2"});

    const std::vector<DatasetRecord> eval_set = {
        record("e1", "c", "(JOIN rel.r1 m.c)"),
        record("e2", "d", "(JOIN rel.r3 m.d)"),
    };
    const StatsReport report =
        kbqa::dataset_statistics(eval_set, toy_store(), std::optional(seen));
    REQUIRE(report.unseen_schema_ratio.has_value());
    REQUIRE(report.unseen_question_ratio.has_value());
    // Items {rel.r1, rel.r3}: one of two is new.  Questions: one of two.
    CHECK(*report.unseen_schema_ratio == 0.5);
    CHECK(*report.unseen_question_ratio == 0.5);

    // A dataset measured against its own schema has nothing unseen.
    const StatsReport self = kbqa::dataset_statistics(
        train, toy_store(), std::optional(kbqa::schema_items_of(train)));
    CHECK(*self.unseen_schema_ratio == 0.0);
    CHECK(*self.unseen_question_ratio == 0.0);

    // Ratios are order-independent.
    std::vector<DatasetRecord> reversed = {eval_set[1], eval_set[0]};
    const StatsReport swapped =
        kbqa::dataset_statistics(reversed, toy_store(), std::optional(seen));
    CHECK(*swapped.unseen_schema_ratio == *report.unseen_schema_ratio);
    CHECK(*swapped.unseen_question_ratio == *report.unseen_question_ratio);
}
