#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kbqa {

// ---------------------------------------------------------------------------
// An in-memory RDF-style triple store.
//
//   file row     S<TAB>R<TAB>O              one triple per line, '#' comments
//   object       entity id  |  "lexical"^^kind   kind in {float,integer,string,date}
//   label row    S<TAB>__label__<TAB>"text"^^string   (kept aside, not a triple)
//
// Objects may be entities or literals; subjects are always entities.  The
// store is immutable after load and keeps sorted indexes so every iteration
// order is reproducible.
// ---------------------------------------------------------------------------

enum class LiteralKind { Float, Integer, String, Date };

std::string_view literal_kind_name(LiteralKind kind);
std::optional<LiteralKind> literal_kind_from_name(std::string_view name);

struct Literal {
    LiteralKind kind = LiteralKind::String;
    std::string raw;                   // lexical form, preserved verbatim
    std::optional<double> numeric;     // set iff kind is Float or Integer

    bool is_numeric() const { return numeric.has_value(); }

    // Canonical token: raw^^kind, quoting the lexical form only when it
    // contains whitespace, parens, quotes, or backslashes.
    std::string encoded() const;

    bool operator==(const Literal& other) const {
        return kind == other.kind && raw == other.raw;
    }
    bool operator<(const Literal& other) const {
        return encoded() < other.encoded();
    }
};

// Builds a Literal, validating that float/integer lexical forms parse as
// numbers.  Throws DataError otherwise.
Literal make_literal(LiteralKind kind, std::string raw);

// Parses a literal token in either surface form: bare (1.067^^float) or
// quoted ("new york"^^string).  Returns nullopt when the token carries no
// ^^kind marker; throws DataError on a malformed suffix or bad number.
std::optional<Literal> parse_literal_token(std::string_view token);

using EntityId = std::string;
using Node = std::variant<EntityId, Literal>;

bool node_is_literal(const Node& node);
std::string node_token(const Node& node);  // entity id, or Literal::encoded()

struct Triple {
    EntityId subject;
    std::string relation;
    Node object;
};

// Dotted schema names group into domains by their first segment; names under
// the "base" umbrella keep two segments ("base.plants.plant" -> "base.plants").
std::string domain_of_class(std::string_view name);

struct SchemaCatalog {
    std::set<std::string> classes;            // objects of the type relation
    std::set<std::string> relations;          // every relation name in the store
    std::set<std::string> numeric_relations;  // relations with >=1 numeric literal object
};

using TokenSet = std::set<std::string>;

class TripleStore {
public:
    static TripleStore load(const std::string& path, std::string type_relation = "type");
    static TripleStore parse(std::string_view text, std::string type_relation = "type",
                             std::string_view source_name = "<memory>");

    std::size_t size() const { return triples_.size(); }
    const std::vector<Triple>& triples() const { return triples_; }
    const std::string& type_relation() const { return type_relation_; }

    // Index lookups.  All return (references to) sorted sets of tokens;
    // missing keys yield an empty set.
    const TokenSet& objects_of(const std::string& subject, const std::string& relation) const;
    const TokenSet& subjects_of(const std::string& relation, const std::string& object_token) const;
    const TokenSet& subjects_with(const std::string& relation) const;
    const TokenSet& instances_of(const std::string& class_name) const;

    // object token -> subjects, for one relation (empty map if unknown).
    const std::map<std::string, TokenSet>& relation_objects(const std::string& relation) const;

    std::vector<Node> objects(const std::string& subject, const std::string& relation) const;
    bool has_triple(const std::string& subject, const std::string& relation,
                    const std::string& object_token) const;

    // Literal registry: every literal token that occurs as an object.
    const Literal* literal_from_token(const std::string& token) const;

    const std::map<std::string, std::string>& labels() const { return labels_; }
    std::string label_or_id(const std::string& entity) const;

    const SchemaCatalog& schema() const { return schema_; }

private:
    void add_triple(Triple triple);
    void finalize();

    std::vector<Triple> triples_;
    std::string type_relation_ = "type";
    std::map<std::string, std::map<std::string, TokenSet>> spo_;  // subject -> rel -> objects
    std::map<std::string, std::map<std::string, TokenSet>> pos_;  // rel -> object -> subjects
    std::map<std::string, TokenSet> relation_subjects_;
    std::map<std::string, std::string> labels_;
    std::map<std::string, Literal> literal_pool_;
    std::set<std::string> seen_keys_;  // dedup guard, cleared after load
    SchemaCatalog schema_;
};

}  // namespace kbqa
