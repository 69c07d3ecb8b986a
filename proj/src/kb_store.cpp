#include "kbqa/kb_store.hpp"

#include <charconv>
#include <cstdlib>

#include "kbqa/errors.hpp"
#include "kbqa/util.hpp"

namespace kbqa {

namespace {

const TokenSet kEmptyTokenSet;
const std::map<std::string, TokenSet> kEmptyObjectMap;

bool needs_quoting(std::string_view raw) {
    if (raw.empty()) return true;
    for (char c : raw) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '(' || c == ')' ||
            c == '"' || c == '\\') {
            return true;
        }
    }
    return false;
}

std::string escape_quoted(std::string_view raw) {
    std::string out = "\"";
    for (char c : raw) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

std::optional<double> parse_number(std::string_view text) {
    if (text.empty()) return std::nullopt;
    const char* begin = text.data();
    const char* end = begin + text.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return value;
}

}  // namespace

std::string_view literal_kind_name(LiteralKind kind) {
    switch (kind) {
        case LiteralKind::Float: return "float";
        case LiteralKind::Integer: return "integer";
        case LiteralKind::String: return "string";
        case LiteralKind::Date: return "date";
    }
    return "string";
}

std::optional<LiteralKind> literal_kind_from_name(std::string_view name) {
    if (name == "float") return LiteralKind::Float;
    if (name == "integer") return LiteralKind::Integer;
    if (name == "string") return LiteralKind::String;
    if (name == "date") return LiteralKind::Date;
    return std::nullopt;
}

std::string Literal::encoded() const {
    std::string lexical = needs_quoting(raw) ? escape_quoted(raw) : raw;
    lexical += "^^";
    lexical += literal_kind_name(kind);
    return lexical;
}

Literal make_literal(LiteralKind kind, std::string raw) {
    Literal lit;
    lit.kind = kind;
    lit.raw = std::move(raw);
    if (kind == LiteralKind::Float || kind == LiteralKind::Integer) {
        lit.numeric = parse_number(lit.raw);
        if (!lit.numeric) {
            throw DataError("numeric literal does not parse as a number: '" + lit.raw + "'");
        }
    }
    return lit;
}

std::optional<Literal> parse_literal_token(std::string_view token) {
    std::string raw;
    std::string_view rest;
    if (!token.empty() && token.front() == '"') {
        // Quoted lexical form with backslash escapes.
        std::size_t i = 1;
        bool closed = false;
        while (i < token.size()) {
            char c = token[i];
            if (c == '\\') {
                if (i + 1 >= token.size()) throw DataError("dangling escape in literal: '" + std::string(token) + "'");
                char esc = token[i + 1];
                switch (esc) {
                    case 'n': raw += '\n'; break;
                    case 't': raw += '\t'; break;
                    case '"': raw += '"'; break;
                    case '\\': raw += '\\'; break;
                    default: raw += esc;
                }
                i += 2;
            } else if (c == '"') {
                closed = true;
                ++i;
                break;
            } else {
                raw += c;
                ++i;
            }
        }
        if (!closed) throw DataError("unterminated quoted literal: '" + std::string(token) + "'");
        rest = token.substr(i);
        if (rest.substr(0, 2) != "^^") {
            throw DataError("quoted literal missing ^^kind suffix: '" + std::string(token) + "'");
        }
    } else {
        std::size_t marker = token.find("^^");
        if (marker == std::string_view::npos) return std::nullopt;
        raw = std::string(token.substr(0, marker));
        rest = token.substr(marker);
    }
    std::string_view kind_name = rest.substr(2);
    auto kind = literal_kind_from_name(kind_name);
    if (!kind) {
        throw DataError("unknown literal kind '" + std::string(kind_name) + "' in '" +
                        std::string(token) + "'");
    }
    return make_literal(*kind, std::move(raw));
}

bool node_is_literal(const Node& node) {
    return std::holds_alternative<Literal>(node);
}

std::string node_token(const Node& node) {
    if (const auto* lit = std::get_if<Literal>(&node)) return lit->encoded();
    return std::get<EntityId>(node);
}

std::string domain_of_class(std::string_view name) {
    if (name.empty()) throw DataError("domain of empty schema name");
    std::size_t first_dot = name.find('.');
    if (first_dot == std::string_view::npos) return std::string(name);
    std::string_view head = name.substr(0, first_dot);
    if (head == "base") {
        std::size_t second_dot = name.find('.', first_dot + 1);
        if (second_dot == std::string_view::npos) return std::string(name);
        return std::string(name.substr(0, second_dot));
    }
    return std::string(head);
}

TripleStore TripleStore::load(const std::string& path, std::string type_relation) {
    return parse(read_file(path), std::move(type_relation), path);
}

TripleStore TripleStore::parse(std::string_view text, std::string type_relation,
                               std::string_view source_name) {
    TripleStore store;
    store.type_relation_ = std::move(type_relation);

    const auto lines = split_lines(text);
    bool saw_record = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        const std::string where = std::string(source_name) + ":" + std::to_string(i + 1);
        if (line.empty() || trim(line).empty()) continue;
        if (line[0] == '#') continue;
        saw_record = true;

        std::vector<std::string> cols;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            if (tab == std::string::npos) {
                cols.push_back(line.substr(start));
                break;
            }
            cols.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (cols.size() != 3) {
            throw DataError(where + ": expected 3 tab-separated columns, found " +
                            std::to_string(cols.size()));
        }
        const std::string& subject = cols[0];
        const std::string& relation = cols[1];
        const std::string& object_text = cols[2];
        if (subject.empty() || contains_whitespace(subject)) {
            throw DataError(where + ": bad subject '" + subject + "'");
        }
        if (relation.empty() || contains_whitespace(relation)) {
            throw DataError(where + ": bad relation '" + relation + "'");
        }
        if (object_text.empty()) {
            throw DataError(where + ": empty object column");
        }

        std::optional<Literal> literal;
        try {
            literal = parse_literal_token(object_text);
        } catch (const DataError& err) {
            throw DataError(where + ": " + err.what());
        }

        if (relation == "__label__") {
            if (!literal || literal->kind != LiteralKind::String) {
                throw DataError(where + ": label rows require a \"text\"^^string object");
            }
            store.labels_[subject] = literal->raw;
            continue;
        }

        Triple triple;
        triple.subject = subject;
        triple.relation = relation;
        if (literal) {
            triple.object = *literal;
        } else {
            if (contains_whitespace(object_text)) {
                throw DataError(where + ": entity object contains whitespace: '" + object_text + "'");
            }
            triple.object = object_text;
        }
        store.add_triple(std::move(triple));
    }

    if (!saw_record) {
        throw DataError(std::string(source_name) + ": empty KB file");
    }
    store.finalize();
    return store;
}

void TripleStore::add_triple(Triple triple) {
    const std::string object_token = node_token(triple.object);
    std::string key = triple.subject;
    key += '\t';
    key += triple.relation;
    key += '\t';
    key += object_token;
    if (!seen_keys_.insert(std::move(key)).second) return;  // duplicates stored once

    if (const auto* lit = std::get_if<Literal>(&triple.object)) {
        literal_pool_.emplace(object_token, *lit);
    }
    spo_[triple.subject][triple.relation].insert(object_token);
    pos_[triple.relation][object_token].insert(triple.subject);
    relation_subjects_[triple.relation].insert(triple.subject);
    triples_.push_back(std::move(triple));
}

void TripleStore::finalize() {
    seen_keys_.clear();
    schema_ = SchemaCatalog{};
    for (const Triple& triple : triples_) {
        schema_.relations.insert(triple.relation);
        if (triple.relation == type_relation_ && !node_is_literal(triple.object)) {
            schema_.classes.insert(std::get<EntityId>(triple.object));
        }
        if (const auto* lit = std::get_if<Literal>(&triple.object); lit && lit->is_numeric()) {
            schema_.numeric_relations.insert(triple.relation);
        }
    }
}

const TokenSet& TripleStore::objects_of(const std::string& subject,
                                        const std::string& relation) const {
    auto s = spo_.find(subject);
    if (s == spo_.end()) return kEmptyTokenSet;
    auto r = s->second.find(relation);
    if (r == s->second.end()) return kEmptyTokenSet;
    return r->second;
}

const TokenSet& TripleStore::subjects_of(const std::string& relation,
                                         const std::string& object_token) const {
    auto r = pos_.find(relation);
    if (r == pos_.end()) return kEmptyTokenSet;
    auto o = r->second.find(object_token);
    if (o == r->second.end()) return kEmptyTokenSet;
    return o->second;
}

const TokenSet& TripleStore::subjects_with(const std::string& relation) const {
    auto r = relation_subjects_.find(relation);
    if (r == relation_subjects_.end()) return kEmptyTokenSet;
    return r->second;
}

const TokenSet& TripleStore::instances_of(const std::string& class_name) const {
    return subjects_of(type_relation_, class_name);
}

const std::map<std::string, TokenSet>& TripleStore::relation_objects(
    const std::string& relation) const {
    auto r = pos_.find(relation);
    if (r == pos_.end()) return kEmptyObjectMap;
    return r->second;
}

std::vector<Node> TripleStore::objects(const std::string& subject,
                                       const std::string& relation) const {
    std::vector<Node> out;
    for (const std::string& token : objects_of(subject, relation)) {
        if (const Literal* lit = literal_from_token(token)) {
            out.emplace_back(*lit);
        } else {
            out.emplace_back(token);
        }
    }
    return out;
}

bool TripleStore::has_triple(const std::string& subject, const std::string& relation,
                             const std::string& object_token) const {
    return objects_of(subject, relation).count(object_token) > 0;
}

const Literal* TripleStore::literal_from_token(const std::string& token) const {
    auto it = literal_pool_.find(token);
    if (it == literal_pool_.end()) return nullptr;
    return &it->second;
}

std::string TripleStore::label_or_id(const std::string& entity) const {
    auto it = labels_.find(entity);
    if (it == labels_.end()) return entity;
    return it->second;
}

}  // namespace kbqa
