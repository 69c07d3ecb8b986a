#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "kbqa/kb_store.hpp"
#include "kbqa/sexpr.hpp"

namespace kbqa {

// ---------------------------------------------------------------------------
// Evaluation result.  Entity and literal answers never mix in one set; an
// expression that would produce a mixed set fails with a type error.  COUNT
// roots produce a number.  Items hold entity ids or encoded literal tokens.
// ---------------------------------------------------------------------------

struct AnswerSet {
    enum class Kind { Entities, Literals, Count };

    Kind kind = Kind::Entities;
    std::set<std::string> items;
    std::uint64_t count = 0;

    static AnswerSet entities(std::set<std::string> items);
    static AnswerSet literals(std::set<std::string> items);
    static AnswerSet counted(std::uint64_t n);

    bool operator==(const AnswerSet& other) const = default;
};

// Empty set, or COUNT of zero.
bool is_null(const AnswerSet& answers);

struct ExecOptions {
    // Guards pathological joins; evaluation fails once any intermediate set
    // grows past this many members.
    std::size_t max_intermediate = 1'000'000;
};

// Evaluates expr bottom-up against the store:
//   class atom   -> its instances          entity atom -> itself
//   AND          -> intersection           JOIN rel    -> {x : exists y in S, (x,rel,y)}
//   JOIN (R rel) -> {x : exists y in S, (y,rel,x)}
//   cmp rel v    -> {x : exists lit, (x,rel,lit), lit op v}
//   ARGMIN/ARGMAX-> members of S whose best numeric rel value is extremal
//   COUNT        -> |S|
// Unknown class/relation names contribute empty sets and a Name diagnostic;
// non-numeric literals under comparators and superlatives raise ExecError.
AnswerSet execute(const SExpr& expr, const TripleStore& store,
                  std::vector<Diagnostic>* diagnostics = nullptr, const ExecOptions& options = {});

}  // namespace kbqa
