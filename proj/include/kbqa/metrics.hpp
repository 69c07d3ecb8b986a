#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kbqa/executor.hpp"

namespace kbqa {

// ---------------------------------------------------------------------------
// Question-level scoring
// ---------------------------------------------------------------------------

struct F1Score {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Set overlap F1 between answer token sets.  Both empty scores (1,1,1); one
// empty scores (0,0,0).
F1Score answer_f1(const std::set<std::string>& pred, const std::set<std::string>& gold);

// AnswerSet-aware variant: COUNT answers compare by equality, so F1 is 0/1.
F1Score answer_f1(const AnswerSet& pred, const AnswerSet& gold);

// Exact match of canonicalized logical forms.  An unparseable prediction is
// simply not a match; an unparseable gold form is a data error.
bool exact_match(std::string_view pred_lf, std::string_view gold_lf);

// 1 when any of the first k ranked items is a gold answer, else 0.
int hits_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& gold, int k);

// Hits@1 under the "pick one answer uniformly at random" protocol, estimated
// with seeded draws.  An empty prediction never hits.
double stochastic_hits1(const std::set<std::string>& pred, const std::set<std::string>& gold,
                        int trials, std::uint64_t seed);

// Closed form of the same protocol: |pred & gold| / |pred|.
double exact_expected_hits1(const std::set<std::string>& pred, const std::set<std::string>& gold);

// ---------------------------------------------------------------------------
// Paraphrase robustness
// ---------------------------------------------------------------------------

struct ParaphraseGroup {
    std::string template_id;
    std::vector<std::string> qids;
};

// Mean over groups of the population standard deviation of the group's
// scores:  (1/n) * sum_i sqrt( sum_j (x_ij - mean_i)^2 / m_i ).
// Groups weigh equally regardless of size.  Throws DataError when a group
// references a missing qid or when no groups are given.
double paraphrase_std(const std::map<std::string, double>& scores,
                      const std::vector<ParaphraseGroup>& groups);

// ---------------------------------------------------------------------------
// Retrieval and text-generation metrics
// ---------------------------------------------------------------------------

// |gold  &  first k retrieved| / |gold|; gold must be non-empty.
double recall_at_k(const std::vector<std::string>& retrieved, const std::set<std::string>& gold,
                   int k);

// Lowercased whitespace tokenization shared by BLEU and ROUGE.
std::vector<std::string> metric_tokens(std::string_view text);

// Sentence-level BLEU-4: brevity penalty times the geometric mean of clipped
// 1..4-gram precisions, no smoothing (any zero order zeroes the score).
double bleu4(const std::vector<std::string>& candidate,
             const std::vector<std::vector<std::string>>& references);

// Corpus-level variant: n-gram and length statistics pool over all pairs.
double corpus_bleu4(
    const std::vector<std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>>>&
        pairs);

// ROUGE-L F-measure (beta = 1) from the longest common subsequence.
double rouge_l(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct QuestionScore {
    std::string qid;
    double em = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double hits1 = 0.0;
};

struct PartitionStats {
    std::size_t count = 0;
    double em = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double hits1 = 0.0;
};

struct AggregateReport {
    PartitionStats overall;
    std::map<std::string, PartitionStats> per_partition;
};

// Means per partition and over everything.  partition_of maps qid -> label;
// qids without a label aggregate only into the overall row.  Throws DataError
// on an empty score list.
AggregateReport aggregate(const std::vector<QuestionScore>& scores,
                          const std::map<std::string, std::string>* partition_of = nullptr);

}  // namespace kbqa
