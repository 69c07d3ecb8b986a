#include "kbqa/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "kbqa/errors.hpp"
#include "kbqa/sexpr.hpp"
#include "kbqa/util.hpp"

namespace kbqa {

namespace {

std::size_t intersection_size(const std::set<std::string>& a, const std::set<std::string>& b) {
    const std::set<std::string>& small = a.size() <= b.size() ? a : b;
    const std::set<std::string>& large = a.size() <= b.size() ? b : a;
    std::size_t n = 0;
    for (const std::string& item : small) {
        if (large.count(item)) ++n;
    }
    return n;
}

// n-gram counts for orders 1..4, keyed by the joined token span.
std::map<std::string, std::size_t> ngram_counts(const std::vector<std::string>& tokens, int n) {
    std::map<std::string, std::size_t> counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key;
        for (int j = 0; j < n; ++j) {
            if (j) key += '\x1f';
            key += tokens[i + j];
        }
        ++counts[key];
    }
    return counts;
}

struct BleuTally {
    std::size_t matched[4] = {0, 0, 0, 0};
    std::size_t total[4] = {0, 0, 0, 0};
    std::size_t candidate_length = 0;
    std::size_t reference_length = 0;
};

void bleu_accumulate(const std::vector<std::string>& candidate,
                     const std::vector<std::vector<std::string>>& references, BleuTally& tally) {
    if (references.empty()) throw DataError("BLEU needs at least one reference");

    for (int n = 1; n <= 4; ++n) {
        const auto cand = ngram_counts(candidate, n);
        std::map<std::string, std::size_t> best_ref;
        for (const auto& reference : references) {
            for (const auto& [gram, count] : ngram_counts(reference, n)) {
                std::size_t& best = best_ref[gram];
                best = std::max(best, count);
            }
        }
        for (const auto& [gram, count] : cand) {
            tally.total[n - 1] += count;
            auto it = best_ref.find(gram);
            if (it != best_ref.end()) {
                tally.matched[n - 1] += std::min(count, it->second);
            }
        }
    }

    tally.candidate_length += candidate.size();
    // Effective reference length: closest to the candidate, ties to shorter.
    std::size_t best_len = references[0].size();
    for (const auto& reference : references) {
        const auto diff = [&](std::size_t len) {
            return len > candidate.size() ? len - candidate.size() : candidate.size() - len;
        };
        if (diff(reference.size()) < diff(best_len) ||
            (diff(reference.size()) == diff(best_len) && reference.size() < best_len)) {
            best_len = reference.size();
        }
    }
    tally.reference_length += best_len;
}

double bleu_from_tally(const BleuTally& tally) {
    double log_sum = 0.0;
    for (int n = 0; n < 4; ++n) {
        if (tally.total[n] == 0 || tally.matched[n] == 0) return 0.0;  // no smoothing
        log_sum += std::log(static_cast<double>(tally.matched[n]) /
                            static_cast<double>(tally.total[n]));
    }
    const double geo_mean = std::exp(log_sum / 4.0);
    double brevity = 1.0;
    if (tally.candidate_length == 0) return 0.0;
    if (tally.candidate_length < tally.reference_length) {
        brevity = std::exp(1.0 - static_cast<double>(tally.reference_length) /
                                     static_cast<double>(tally.candidate_length));
    }
    return brevity * geo_mean;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> curr(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                curr[j] = prev[j - 1] + 1;
            } else {
                curr[j] = std::max(prev[j], curr[j - 1]);
            }
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

}  // namespace

F1Score answer_f1(const std::set<std::string>& pred, const std::set<std::string>& gold) {
    if (pred.empty() && gold.empty()) return {1.0, 1.0, 1.0};
    if (pred.empty() || gold.empty()) return {0.0, 0.0, 0.0};
    const double overlap = static_cast<double>(intersection_size(pred, gold));
    F1Score score;
    score.precision = overlap / static_cast<double>(pred.size());
    score.recall = overlap / static_cast<double>(gold.size());
    if (score.precision + score.recall > 0.0) {
        score.f1 = 2.0 * score.precision * score.recall / (score.precision + score.recall);
    }
    return score;
}

F1Score answer_f1(const AnswerSet& pred, const AnswerSet& gold) {
    const bool pred_count = pred.kind == AnswerSet::Kind::Count;
    const bool gold_count = gold.kind == AnswerSet::Kind::Count;
    if (pred_count || gold_count) {
        const bool match = pred_count && gold_count && pred.count == gold.count;
        const double v = match ? 1.0 : 0.0;
        return {v, v, v};
    }
    return answer_f1(pred.items, gold.items);
}

bool exact_match(std::string_view pred_lf, std::string_view gold_lf) {
    std::string gold_canonical;
    try {
        gold_canonical = canonical_form(gold_lf);
    } catch (const ParseError& err) {
        throw DataError(std::string("gold logical form does not parse: ") + err.what());
    }
    try {
        return canonical_form(pred_lf) == gold_canonical;
    } catch (const ParseError&) {
        return false;  // an unparseable prediction is just wrong
    }
}

int hits_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& gold, int k) {
    if (k < 0) throw DataError("hits_at_k: k must be non-negative");
    const std::size_t limit = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < limit; ++i) {
        if (gold.count(ranked[i])) return 1;
    }
    return 0;
}

double stochastic_hits1(const std::set<std::string>& pred, const std::set<std::string>& gold,
                        int trials, std::uint64_t seed) {
    if (trials <= 0) throw DataError("stochastic_hits1: trials must be positive");
    if (pred.empty()) return 0.0;
    const std::vector<std::string> items(pred.begin(), pred.end());
    Rng rng(seed);
    std::size_t hits = 0;
    for (int t = 0; t < trials; ++t) {
        const std::string& drawn = items[rng.below(items.size())];
        if (gold.count(drawn)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

double exact_expected_hits1(const std::set<std::string>& pred, const std::set<std::string>& gold) {
    if (pred.empty()) return 0.0;
    return static_cast<double>(intersection_size(pred, gold)) / static_cast<double>(pred.size());
}

double paraphrase_std(const std::map<std::string, double>& scores,
                      const std::vector<ParaphraseGroup>& groups) {
    if (groups.empty()) throw DataError("paraphrase_std: no groups");
    double sum = 0.0;
    for (const ParaphraseGroup& group : groups) {
        if (group.qids.empty()) {
            throw DataError("paraphrase_std: group '" + group.template_id + "' is empty");
        }
        double mean = 0.0;
        for (const std::string& qid : group.qids) {
            auto it = scores.find(qid);
            if (it == scores.end()) {
                throw DataError("paraphrase_std: no score for qid '" + qid + "'");
            }
            mean += it->second;
        }
        mean /= static_cast<double>(group.qids.size());
        double variance = 0.0;
        for (const std::string& qid : group.qids) {
            const double delta = scores.at(qid) - mean;
            variance += delta * delta;
        }
        variance /= static_cast<double>(group.qids.size());  // population variance
        sum += std::sqrt(variance);
    }
    return sum / static_cast<double>(groups.size());
}

double recall_at_k(const std::vector<std::string>& retrieved, const std::set<std::string>& gold,
                   int k) {
    if (gold.empty()) throw DataError("recall_at_k: gold set is empty");
    if (k < 0) throw DataError("recall_at_k: k must be non-negative");
    std::set<std::string> seen;
    const std::size_t limit = std::min<std::size_t>(retrieved.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < limit; ++i) {
        if (gold.count(retrieved[i])) seen.insert(retrieved[i]);
    }
    return static_cast<double>(seen.size()) / static_cast<double>(gold.size());
}

std::vector<std::string> metric_tokens(std::string_view text) {
    return split_whitespace(to_lower(text));
}

double bleu4(const std::vector<std::string>& candidate,
             const std::vector<std::vector<std::string>>& references) {
    BleuTally tally;
    bleu_accumulate(candidate, references, tally);
    return bleu_from_tally(tally);
}

double corpus_bleu4(
    const std::vector<std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>>>&
        pairs) {
    if (pairs.empty()) throw DataError("corpus_bleu4: no pairs");
    BleuTally tally;
    for (const auto& [candidate, references] : pairs) {
        bleu_accumulate(candidate, references, tally);
    }
    return bleu_from_tally(tally);
}

double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference) {
    if (candidate.empty() || reference.empty()) return 0.0;
    const double lcs = static_cast<double>(lcs_length(candidate, reference));
    if (lcs == 0.0) return 0.0;
    const double precision = lcs / static_cast<double>(candidate.size());
    const double recall = lcs / static_cast<double>(reference.size());
    return 2.0 * precision * recall / (precision + recall);
}

AggregateReport aggregate(const std::vector<QuestionScore>& scores,
                          const std::map<std::string, std::string>* partition_of) {
    if (scores.empty()) throw DataError("aggregate: no scores");
    AggregateReport report;
    std::map<std::string, std::vector<const QuestionScore*>> buckets;
    for (const QuestionScore& score : scores) {
        report.overall.count += 1;
        report.overall.em += score.em;
        report.overall.precision += score.precision;
        report.overall.recall += score.recall;
        report.overall.f1 += score.f1;
        report.overall.hits1 += score.hits1;
        if (partition_of) {
            auto it = partition_of->find(score.qid);
            if (it != partition_of->end()) buckets[it->second].push_back(&score);
        }
    }
    auto mean_of = [](PartitionStats& stats) {
        const double n = static_cast<double>(stats.count);
        stats.em /= n;
        stats.precision /= n;
        stats.recall /= n;
        stats.f1 /= n;
        stats.hits1 /= n;
    };
    mean_of(report.overall);
    for (const auto& [label, members] : buckets) {
        PartitionStats stats;
        for (const QuestionScore* score : members) {
            stats.count += 1;
            stats.em += score->em;
            stats.precision += score->precision;
            stats.recall += score->recall;
            stats.f1 += score->f1;
            stats.hits1 += score->hits1;
        }
        mean_of(stats);
        report.per_partition[label] = stats;
    }
    return report;
}

}  // namespace kbqa
