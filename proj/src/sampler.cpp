#include "kbqa/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "kbqa/errors.hpp"
#include "kbqa/util.hpp"
#include "kbqa/verbalizer.hpp"

namespace kbqa {

namespace {

// ---------------------------------------------------------------------------
// RNG stream tags.  Every stage keys its stream off stable content hashes,
// never off shared mutable state, so worker count and stage order cannot
// change any draw.
// ---------------------------------------------------------------------------
constexpr const char* kStreamClasses = "sampler/classes";
constexpr const char* kStreamWalk = "sampler/walk";
constexpr const char* kStreamGround = "sampler/ground";
constexpr const char* kStreamFunctions = "sampler/functions";
constexpr const char* kStreamRelations = "sampler/relations";
constexpr const char* kStreamHeads = "sampler/heads";
constexpr const char* kStreamTriples = "sampler/triples";

struct Edge {
    std::string relation;
    bool inverse = false;  // walk follows the relation from object to subject

    bool operator<(const Edge& other) const {
        if (relation != other.relation) return relation < other.relation;
        return inverse < other.inverse;
    }
};

std::vector<std::string> sorted_vector(const TokenSet& tokens) {
    return {tokens.begin(), tokens.end()};
}

// Targets reached from one entity along an edge.
const TokenSet& edge_targets(const TripleStore& store, const std::string& entity,
                             const Edge& edge) {
    if (!edge.inverse) return store.objects_of(entity, edge.relation);
    return store.subjects_of(edge.relation, entity);
}

bool contains_placeholder(const SExpr& expr) {
    if (expr.kind == SExprKind::Placeholder) return true;
    for (const SExpr& child : expr.children) {
        if (contains_placeholder(child)) return true;
    }
    return false;
}

std::string first_class_of(const SExpr& expr) {
    if (expr.kind == SExprKind::ClassAtom) return expr.name;
    for (const SExpr& child : expr.children) {
        std::string found = first_class_of(child);
        if (!found.empty()) return found;
    }
    return {};
}

std::string domain_of_expr(const SExpr& expr) {
    const Analysis analysis = analyze(expr);
    if (!analysis.classes.empty()) return domain_of_class(analysis.classes.front());
    if (!analysis.relations.empty()) return domain_of_class(analysis.relations.front());
    return "unknown";
}

// ---------------------------------------------------------------------------
// Template construction
// ---------------------------------------------------------------------------

struct WalkState {
    std::vector<std::string> frontier;  // entities at the current position
};

// Edge options available from a set of entities, sorted for determinism.
// When require_entity_targets is set, only edges that can continue the walk
// (>=1 entity on the far side) qualify.
std::vector<Edge> collect_edges(const TripleStore& store, const std::vector<std::string>& frontier,
                                bool require_entity_targets) {
    std::set<Edge> options;
    for (const std::string& entity : frontier) {
        for (const std::string& relation : store.schema().relations) {
            if (relation == store.type_relation()) continue;
            for (bool inverse : {false, true}) {
                const Edge edge{relation, inverse};
                if (options.count(edge)) continue;
                const TokenSet& targets = edge_targets(store, entity, edge);
                if (targets.empty()) continue;
                if (require_entity_targets) {
                    bool has_entity = false;
                    for (const std::string& token : targets) {
                        if (!store.literal_from_token(token)) {
                            has_entity = true;
                            break;
                        }
                    }
                    if (!has_entity) continue;
                }
                options.insert(edge);
            }
        }
    }
    return {options.begin(), options.end()};
}

struct FarPopulation {
    std::vector<std::string> entities;
    std::map<LiteralKind, std::size_t> literal_kinds;
    std::map<std::string, std::size_t> entity_classes;
};

FarPopulation survey_targets(const TripleStore& store, const std::vector<std::string>& frontier,
                             const Edge& edge) {
    FarPopulation far;
    std::set<std::string> seen;
    for (const std::string& entity : frontier) {
        for (const std::string& token : edge_targets(store, entity, edge)) {
            if (!seen.insert(token).second) continue;
            if (const Literal* lit = store.literal_from_token(token)) {
                ++far.literal_kinds[lit->kind];
            } else {
                far.entities.push_back(token);
                for (const std::string& cls : store.objects_of(token, store.type_relation())) {
                    ++far.entity_classes[cls];
                }
            }
        }
    }
    std::sort(far.entities.begin(), far.entities.end());
    return far;
}

SExpr placeholder_for(const FarPopulation& far) {
    SExpr node;
    node.kind = SExprKind::Placeholder;
    std::size_t literal_total = 0;
    for (const auto& [kind, count] : far.literal_kinds) literal_total += count;

    if (literal_total > far.entities.size()) {
        node.placeholder_literal = true;
        // Majority literal kind; ties break to the first kind name.
        std::size_t best = 0;
        for (const auto& [kind, count] : far.literal_kinds) {
            if (count > best) {
                best = count;
                node.placeholder_hint = std::string(literal_kind_name(kind));
            }
        }
    } else {
        node.placeholder_literal = false;
        std::size_t best = 0;
        for (const auto& [cls, count] : far.entity_classes) {
            if (count > best) {  // map order makes ties lexicographic-first
                best = count;
                node.placeholder_hint = cls;
            }
        }
    }
    return node;
}

SExpr make_class_atom(const std::string& name) {
    SExpr node;
    node.kind = SExprKind::ClassAtom;
    node.name = name;
    return node;
}

SExpr make_join(const Edge& edge, SExpr child) {
    SExpr node;
    node.kind = SExprKind::Join;
    node.name = edge.relation;
    node.inverse = edge.inverse;
    node.children.push_back(std::move(child));
    return node;
}

SExpr make_and(SExpr left, SExpr right) {
    SExpr node;
    node.kind = SExprKind::And;
    node.children.push_back(std::move(left));
    node.children.push_back(std::move(right));
    return node;
}

// ---------------------------------------------------------------------------
// Grounding: candidate enumeration by frontier propagation
// ---------------------------------------------------------------------------

using Frontier = std::optional<std::vector<std::string>>;  // nullopt = unconstrained

std::vector<std::string> execute_subtree_tokens(const SExpr& expr, const TripleStore& store) {
    try {
        AnswerSet answers = execute(expr, store);
        if (answers.kind == AnswerSet::Kind::Count) return {};
        return {answers.items.begin(), answers.items.end()};
    } catch (const ExecError&) {
        return {};
    }
}

std::vector<std::string> intersect_sorted(const std::vector<std::string>& a,
                                          const std::vector<std::string>& b) {
    std::vector<std::string> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Candidate values for the first placeholder (pre-order), given the entities
// admissible for the current node's variable.
std::vector<std::string> placeholder_candidates(const SExpr& expr, const Frontier& frontier,
                                                const TripleStore& store) {
    switch (expr.kind) {
        case SExprKind::Placeholder: {
            if (!frontier) return {};
            std::vector<std::string> out;
            for (const std::string& token : *frontier) {
                const Literal* lit = store.literal_from_token(token);
                if (expr.placeholder_literal) {
                    if (!lit) continue;
                    if (!expr.placeholder_hint.empty() &&
                        literal_kind_name(lit->kind) != expr.placeholder_hint) {
                        continue;
                    }
                } else if (lit) {
                    continue;
                }
                out.push_back(token);
            }
            return out;
        }
        case SExprKind::And: {
            const bool in_left = contains_placeholder(expr.children[0]);
            const SExpr& ph_branch = in_left ? expr.children[0] : expr.children[1];
            const SExpr& other = in_left ? expr.children[1] : expr.children[0];
            Frontier narrowed = frontier;
            if (!contains_placeholder(other)) {
                std::vector<std::string> other_tokens = execute_subtree_tokens(other, store);
                narrowed = frontier ? intersect_sorted(*frontier, other_tokens)
                                    : Frontier(std::move(other_tokens));
            }
            return placeholder_candidates(ph_branch, narrowed, store);
        }
        case SExprKind::Join: {
            const Edge edge{expr.name, expr.inverse};
            std::set<std::string> targets;
            if (frontier) {
                for (const std::string& entity : *frontier) {
                    const TokenSet& step = edge_targets(store, entity, edge);
                    targets.insert(step.begin(), step.end());
                }
            } else if (!expr.inverse) {
                // Unconstrained forward join: any object of the relation.
                for (const auto& [token, subjects] : store.relation_objects(expr.name)) {
                    (void)subjects;
                    targets.insert(token);
                }
            } else {
                const TokenSet& subjects = store.subjects_with(expr.name);
                targets.insert(subjects.begin(), subjects.end());
            }
            const SExpr& child = expr.children[0];
            if (child.kind == SExprKind::Placeholder) {
                return placeholder_candidates(
                    child, std::vector<std::string>(targets.begin(), targets.end()), store);
            }
            std::vector<std::string> entity_targets;
            for (const std::string& token : targets) {
                if (!store.literal_from_token(token)) entity_targets.push_back(token);
            }
            return placeholder_candidates(child, entity_targets, store);
        }
        case SExprKind::Cmp: {
            // Placeholder bound: observed numeric values of the relation on
            // the admissible subjects.
            std::set<std::string> values;
            if (frontier) {
                for (const std::string& entity : *frontier) {
                    for (const std::string& token : store.objects_of(entity, expr.name)) {
                        const Literal* lit = store.literal_from_token(token);
                        if (lit && lit->is_numeric()) values.insert(token);
                    }
                }
            } else {
                for (const auto& [token, subjects] : store.relation_objects(expr.name)) {
                    (void)subjects;
                    const Literal* lit = store.literal_from_token(token);
                    if (lit && lit->is_numeric()) values.insert(token);
                }
            }
            if (expr.children.empty()) return {};
            return placeholder_candidates(expr.children[0],
                                          sorted_vector({values.begin(), values.end()}), store);
        }
        case SExprKind::Count:
        case SExprKind::ArgMin:
        case SExprKind::ArgMax:
            return placeholder_candidates(expr.children[0], frontier, store);
        default:
            return {};
    }
}

bool substitute_first_placeholder(SExpr& expr, const std::string& token,
                                  const TripleStore& store) {
    if (expr.kind == SExprKind::Placeholder) {
        if (const Literal* lit = store.literal_from_token(token)) {
            expr = SExpr{};
            expr.kind = SExprKind::LiteralAtom;
            expr.literal = *lit;
        } else {
            expr = SExpr{};
            expr.kind = SExprKind::EntityAtom;
            expr.name = token;
        }
        return true;
    }
    if (expr.kind == SExprKind::Cmp && !expr.children.empty()) {
        const Literal* lit = store.literal_from_token(token);
        if (!lit) return false;
        expr.literal = *lit;
        expr.children.clear();
        return true;
    }
    for (SExpr& child : expr.children) {
        if (contains_placeholder(child) ||
            (child.kind == SExprKind::Cmp && !child.children.empty())) {
            if (substitute_first_placeholder(child, token, store)) return true;
        }
    }
    return false;
}

void ground_recursive(const QueryTemplate& tmpl, const SExpr& expr, const TripleStore& store,
                      std::size_t quota, Rng& rng, std::vector<GroundedQuery>& out) {
    if (!contains_placeholder(expr)) {
        out.push_back({expr, tmpl.id, tmpl.origin_class});
        return;
    }
    std::vector<std::string> candidates = placeholder_candidates(expr, std::nullopt, store);
    if (candidates.empty()) return;
    const std::vector<std::string> picks = sample_k(std::move(candidates), quota, rng);
    for (const std::string& token : picks) {
        SExpr bound = expr;
        if (!substitute_first_placeholder(bound, token, store)) return;
        // Later placeholders take one value each so the template's total
        // grounding count stays within quota.
        ground_recursive(tmpl, bound, store, 1, rng, out);
    }
}

// ---------------------------------------------------------------------------
// Function attachment helpers
// ---------------------------------------------------------------------------

std::vector<std::string> numeric_relations_on_class(const TripleStore& store,
                                                    const std::string& class_name) {
    std::vector<std::string> out;
    const TokenSet& instances = store.instances_of(class_name);
    if (instances.empty()) return out;
    for (const std::string& relation : store.schema().numeric_relations) {
        for (const std::string& entity : instances) {
            bool found = false;
            for (const std::string& token : store.objects_of(entity, relation)) {
                const Literal* lit = store.literal_from_token(token);
                if (lit && lit->is_numeric()) {
                    found = true;
                    break;
                }
            }
            if (found) {
                out.push_back(relation);
                break;
            }
        }
    }
    return out;  // iteration over sorted sets keeps this deterministic
}

std::vector<std::string> observed_values(const TripleStore& store, const std::string& class_name,
                                         const std::string& relation) {
    std::set<std::string> values;
    for (const std::string& entity : store.instances_of(class_name)) {
        for (const std::string& token : store.objects_of(entity, relation)) {
            const Literal* lit = store.literal_from_token(token);
            if (lit && lit->is_numeric()) values.insert(token);
        }
    }
    return sorted_vector({values.begin(), values.end()});
}

}  // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

void validate_sampler_config(const SamplerConfig& config) {
    auto require = [](bool ok, const std::string& message) {
        if (!ok) throw DataError("sampler config: " + message);
    };
    require(config.max_hops >= 1 && config.max_hops <= 4, "max_hops must be in [1, 4]");
    require(config.classes_per_run >= 1, "classes_per_run must be >= 1");
    require(config.groundings_per_template >= 1, "groundings_per_template must be >= 1");
    require(config.entities_per_class >= 1, "entities_per_class must be >= 1");
    require(config.triples_per_entity >= 1, "triples_per_entity must be >= 1");
    require(config.min_relation_triples >= 1, "min_relation_triples must be >= 1");
    require(config.workers >= 1, "workers must be >= 1");
    const FunctionProbabilities& p = config.function_probabilities;
    for (double value : {p.count, p.comparative, p.superlative}) {
        require(value >= 0.0 && value <= 1.0, "function probabilities must sit in [0, 1]");
    }
    require(p.count + p.comparative + p.superlative <= 1.0 + 1e-12,
            "function probabilities must sum to <= 1");
}

SamplerConfig sampler_config_from_json(const nlohmann::json& config) {
    if (!config.is_object()) throw DataError("sampler config: top level must be an object");
    static const std::set<std::string> known = {
        "seed", "max_hops", "classes_per_run", "groundings_per_template",
        "entities_per_class", "triples_per_entity", "function_probabilities", "domain_filter",
        "min_relation_triples", "workers"};
    for (const auto& [key, value] : config.items()) {
        (void)value;
        if (!known.count(key)) throw DataError("sampler config: unknown key '" + key + "'");
    }

    SamplerConfig out;
    auto read_int = [&](const char* key, int& field) {
        if (!config.contains(key)) return;
        if (!config[key].is_number_integer()) {
            throw DataError(std::string("sampler config: '") + key + "' must be an integer");
        }
        field = config[key].get<int>();
    };
    if (config.contains("seed")) {
        if (!config["seed"].is_number_unsigned() && !config["seed"].is_number_integer()) {
            throw DataError("sampler config: 'seed' must be an integer");
        }
        out.seed = config["seed"].get<std::uint64_t>();
    }
    read_int("max_hops", out.max_hops);
    read_int("classes_per_run", out.classes_per_run);
    read_int("groundings_per_template", out.groundings_per_template);
    read_int("entities_per_class", out.entities_per_class);
    read_int("triples_per_entity", out.triples_per_entity);
    read_int("min_relation_triples", out.min_relation_triples);
    read_int("workers", out.workers);

    if (config.contains("function_probabilities")) {
        const auto& probs = config["function_probabilities"];
        if (!probs.is_object()) {
            throw DataError("sampler config: 'function_probabilities' must be an object");
        }
        static const std::set<std::string> prob_keys = {"count", "comparative", "superlative"};
        for (const auto& [key, value] : probs.items()) {
            if (!prob_keys.count(key)) {
                throw DataError("sampler config: unknown probability '" + key + "'");
            }
            if (!value.is_number()) {
                throw DataError("sampler config: probability '" + key + "' must be a number");
            }
        }
        if (probs.contains("count")) out.function_probabilities.count = probs["count"].get<double>();
        if (probs.contains("comparative")) {
            out.function_probabilities.comparative = probs["comparative"].get<double>();
        }
        if (probs.contains("superlative")) {
            out.function_probabilities.superlative = probs["superlative"].get<double>();
        }
    }
    if (config.contains("domain_filter")) {
        if (!config["domain_filter"].is_array()) {
            throw DataError("sampler config: 'domain_filter' must be an array");
        }
        std::set<std::string> filter;
        for (const auto& item : config["domain_filter"]) {
            if (!item.is_string()) {
                throw DataError("sampler config: 'domain_filter' must contain strings");
            }
            filter.insert(item.get<std::string>());
        }
        out.domain_filter = std::move(filter);
    }
    validate_sampler_config(out);
    return out;
}

// ---------------------------------------------------------------------------
// Skeletons and template ids
// ---------------------------------------------------------------------------

SExpr skeletonize(const SExpr& expr) {
    SExpr out = expr;
    switch (expr.kind) {
        case SExprKind::EntityAtom: {
            SExpr ph;
            ph.kind = SExprKind::Placeholder;
            ph.placeholder_literal = false;
            return ph;
        }
        case SExprKind::LiteralAtom: {
            SExpr ph;
            ph.kind = SExprKind::Placeholder;
            ph.placeholder_literal = true;
            ph.placeholder_hint = std::string(literal_kind_name(expr.literal.kind));
            return ph;
        }
        case SExprKind::Placeholder:
            if (!out.placeholder_literal) out.placeholder_hint.clear();  // hints are advisory
            return out;
        case SExprKind::Cmp:
            if (out.children.empty()) {
                SExpr ph;
                ph.kind = SExprKind::Placeholder;
                ph.placeholder_literal = true;
                ph.placeholder_hint = std::string(literal_kind_name(expr.literal.kind));
                out.literal = Literal{};
                out.children.push_back(std::move(ph));
            } else {
                out.children[0] = skeletonize(out.children[0]);
            }
            return out;
        default:
            break;
    }
    for (SExpr& child : out.children) {
        child = skeletonize(child);
    }
    return out;
}

std::string skeleton_template_id(const SExpr& expr_or_skeleton) {
    return hex64(fnv1a64(serialize_sexpr(skeletonize(expr_or_skeleton))));
}

// ---------------------------------------------------------------------------
// Stage 1: templates
// ---------------------------------------------------------------------------

std::vector<QueryTemplate> build_templates(const TripleStore& store, const SamplerConfig& config,
                                           std::vector<std::string>* warnings) {
    validate_sampler_config(config);

    std::vector<std::string> candidate_classes;
    for (const std::string& cls : store.schema().classes) {
        if (config.domain_filter && !config.domain_filter->count(domain_of_class(cls))) continue;
        candidate_classes.push_back(cls);
    }
    if (candidate_classes.empty()) {
        if (warnings) {
            warnings->push_back(config.domain_filter
                                    ? "no classes match the domain filter"
                                    : "store declares no classes; no templates built");
        }
        return {};
    }

    Rng class_rng(derive_seed(config.seed, kStreamClasses, 0));
    const std::vector<std::string> chosen = sample_k(
        candidate_classes, static_cast<std::size_t>(config.classes_per_run), class_rng);

    std::vector<QueryTemplate> templates;
    std::set<std::string> seen_ids;

    for (std::size_t class_index = 0; class_index < chosen.size(); ++class_index) {
        const std::string& origin = chosen[class_index];
        Rng walk_rng(derive_seed(config.seed, kStreamWalk, class_index));

        std::vector<std::string> instances = sorted_vector(store.instances_of(origin));
        if (instances.empty()) continue;
        instances = sample_k(std::move(instances),
                             static_cast<std::size_t>(config.entities_per_class), walk_rng);
        std::sort(instances.begin(), instances.end());

        for (int hops = 1; hops <= config.max_hops; ++hops) {
            std::vector<std::string> frontier = instances;
            std::vector<Edge> path;
            bool dead_end = false;
            FarPopulation far;
            for (int step = 0; step < hops; ++step) {
                const bool need_entities = step + 1 < hops;
                std::vector<Edge> options = collect_edges(store, frontier, need_entities);
                if (options.empty()) {
                    dead_end = true;
                    break;
                }
                const Edge edge = options[walk_rng.below(options.size())];
                path.push_back(edge);
                far = survey_targets(store, frontier, edge);
                if (need_entities) {
                    frontier = sample_k(far.entities,
                                        static_cast<std::size_t>(config.entities_per_class),
                                        walk_rng);
                    std::sort(frontier.begin(), frontier.end());
                    if (frontier.empty()) {
                        dead_end = true;
                        break;
                    }
                }
            }
            if (dead_end) continue;

            // Build (AND origin (JOIN e1 [ (JOIN e2 ?) | ? ])) inside-out.
            SExpr node = placeholder_for(far);
            for (std::size_t i = path.size(); i-- > 0;) {
                node = make_join(path[i], std::move(node));
            }
            QueryTemplate tmpl;
            tmpl.skeleton = make_and(make_class_atom(origin), std::move(node));
            tmpl.origin_class = origin;
            tmpl.hops = hops;
            tmpl.id = skeleton_template_id(tmpl.skeleton);
            if (seen_ids.insert(tmpl.id).second) {
                templates.push_back(std::move(tmpl));
            }
        }
    }
    return templates;
}

// ---------------------------------------------------------------------------
// Stage 2: grounding
// ---------------------------------------------------------------------------

std::vector<GroundedQuery> ground(const QueryTemplate& tmpl, const TripleStore& store,
                                  const SamplerConfig& config) {
    validate_sampler_config(config);
    Rng rng(derive_seed(config.seed, kStreamGround, fnv1a64(tmpl.id)));
    std::vector<GroundedQuery> out;
    ground_recursive(tmpl, tmpl.skeleton, store,
                     static_cast<std::size_t>(config.groundings_per_template), rng, out);
    return out;
}

// ---------------------------------------------------------------------------
// Stage 3: functions
// ---------------------------------------------------------------------------

std::vector<SExpr> attach_functions(const GroundedQuery& grounded, const TripleStore& store,
                                    const SamplerConfig& config) {
    validate_sampler_config(config);
    std::vector<SExpr> out;
    out.push_back(grounded.expr);

    const std::string origin =
        grounded.origin_class.empty() ? first_class_of(grounded.expr) : grounded.origin_class;

    Rng rng(derive_seed(config.seed, kStreamFunctions, fnv1a64(serialize_sexpr(grounded.expr))));
    const FunctionProbabilities& p = config.function_probabilities;
    const double draw = rng.real01();

    if (draw < p.count) {
        SExpr wrapped;
        wrapped.kind = SExprKind::Count;
        wrapped.children.push_back(grounded.expr);
        out.push_back(std::move(wrapped));
        return out;
    }
    if (origin.empty()) return out;

    const std::vector<std::string> applicable = numeric_relations_on_class(store, origin);
    if (applicable.empty()) return out;  // no numeric evidence, no variant

    if (draw < p.count + p.comparative) {
        const std::string& relation = applicable[rng.below(applicable.size())];
        const std::vector<std::string> values = observed_values(store, origin, relation);
        if (values.empty()) return out;
        const Literal* bound = store.literal_from_token(values[rng.below(values.size())]);
        static const CmpOp ops[] = {CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
        SExpr cmp;
        cmp.kind = SExprKind::Cmp;
        cmp.op = ops[rng.below(4)];
        cmp.name = relation;
        cmp.literal = *bound;

        // Keep the (AND class rest) surface, filtering rest by the comparator.
        if (grounded.expr.kind == SExprKind::And &&
            grounded.expr.children[0].kind == SExprKind::ClassAtom) {
            out.push_back(make_and(grounded.expr.children[0],
                                   make_and(std::move(cmp), grounded.expr.children[1])));
        } else {
            out.push_back(make_and(grounded.expr, std::move(cmp)));
        }
        return out;
    }
    if (draw < p.count + p.comparative + p.superlative) {
        const std::string& relation = applicable[rng.below(applicable.size())];
        SExpr node;
        node.kind = rng.below(2) == 0 ? SExprKind::ArgMax : SExprKind::ArgMin;
        node.name = relation;
        node.children.push_back(grounded.expr);
        out.push_back(std::move(node));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stage 4: verification by execution
// ---------------------------------------------------------------------------

std::vector<SyntheticItem> verify(const std::vector<SExpr>& exprs, const TripleStore& store,
                                  std::vector<std::string>* dropped) {
    std::vector<SyntheticItem> items;
    for (const SExpr& expr : exprs) {
        AnswerSet answers;
        try {
            answers = execute(expr, store);
        } catch (const ExecError& err) {
            if (dropped) {
                dropped->push_back("dropped '" + serialize_sexpr(expr) + "': " + err.what());
            }
            continue;
        }
        if (is_null(answers)) continue;

        SyntheticItem item;
        item.kind = SyntheticItem::Kind::LogicalForm;
        item.expr = expr;
        item.answers = std::move(answers);
        item.template_id = skeleton_template_id(expr);
        item.domain = domain_of_expr(expr);
        item.question = verbalize_lf(expr, store.labels());
        items.push_back(std::move(item));
    }
    return items;
}

// ---------------------------------------------------------------------------
// Triple route
// ---------------------------------------------------------------------------

std::vector<SyntheticItem> sample_triples(const TripleStore& store, const SamplerConfig& config) {
    validate_sampler_config(config);

    std::map<std::string, std::size_t> relation_counts;
    for (const Triple& triple : store.triples()) {
        if (triple.relation == store.type_relation()) continue;
        ++relation_counts[triple.relation];
    }
    std::vector<std::string> eligible;
    for (const auto& [relation, count] : relation_counts) {
        if (count >= static_cast<std::size_t>(config.min_relation_triples)) {
            eligible.push_back(relation);
        }
    }

    Rng relation_rng(derive_seed(config.seed, kStreamRelations, 0));
    const std::vector<std::string> relations =
        sample_k(std::move(eligible), static_cast<std::size_t>(config.classes_per_run),
                 relation_rng);

    std::vector<SyntheticItem> items;
    for (const std::string& relation : relations) {
        Rng head_rng(derive_seed(config.seed, kStreamHeads, fnv1a64(relation)));
        std::vector<std::string> heads = sorted_vector(store.subjects_with(relation));
        heads = sample_k(std::move(heads), static_cast<std::size_t>(config.entities_per_class),
                         head_rng);
        for (const std::string& head : heads) {
            Rng triple_rng(
                derive_seed(config.seed, kStreamTriples, fnv1a64(relation + "\x1f" + head)));
            std::vector<std::string> tails = sorted_vector(store.objects_of(head, relation));
            tails = sample_k(std::move(tails),
                             static_cast<std::size_t>(config.triples_per_entity), triple_rng);
            for (const std::string& tail : tails) {
                SyntheticItem item;
                item.kind = SyntheticItem::Kind::TripleFact;
                Triple triple;
                triple.subject = head;
                triple.relation = relation;
                if (const Literal* lit = store.literal_from_token(tail)) {
                    triple.object = *lit;
                    item.answers = AnswerSet::literals({tail});
                } else {
                    triple.object = tail;
                    item.answers = AnswerSet::entities({tail});
                }
                item.question = verbalize_triple(triple, store.labels());
                item.triple = std::move(triple);
                item.template_id = hex64(fnv1a64("triple:" + relation));
                item.domain = domain_of_class(relation);
                items.push_back(std::move(item));
            }
        }
    }
    return items;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

namespace {

std::vector<SyntheticItem> synthesize_for_template(const QueryTemplate& tmpl,
                                                   const TripleStore& store,
                                                   const SamplerConfig& config,
                                                   std::vector<std::string>* dropped) {
    std::vector<SExpr> variants;
    for (const GroundedQuery& grounded : ground(tmpl, store, config)) {
        for (SExpr& expr : attach_functions(grounded, store, config)) {
            variants.push_back(std::move(expr));
        }
    }
    return verify(variants, store, dropped);
}

}  // namespace

PipelineResult run_pipeline(const TripleStore& store, const SamplerConfig& config,
                            bool with_logical_forms, bool with_triples,
                            const std::set<std::string>* seen_relations,
                            std::vector<std::string>* warnings) {
    validate_sampler_config(config);
    PipelineResult result;

    if (with_logical_forms) {
        const std::vector<QueryTemplate> templates = build_templates(store, config, warnings);
        std::vector<std::vector<SyntheticItem>> per_template(templates.size());
        std::vector<std::vector<std::string>> per_template_notes(templates.size());

        const std::size_t worker_count =
            std::min<std::size_t>(static_cast<std::size_t>(config.workers),
                                  std::max<std::size_t>(templates.size(), 1));
        if (worker_count <= 1) {
            for (std::size_t i = 0; i < templates.size(); ++i) {
                per_template[i] =
                    synthesize_for_template(templates[i], store, config, &per_template_notes[i]);
            }
        } else {
            std::atomic<std::size_t> next{0};
            auto work = [&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= templates.size()) break;
                    per_template[i] = synthesize_for_template(templates[i], store, config,
                                                              &per_template_notes[i]);
                }
            };
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < worker_count; ++w) pool.emplace_back(work);
            for (std::thread& t : pool) t.join();
        }
        // Merge in template order: worker count never reorders output.
        for (std::size_t i = 0; i < templates.size(); ++i) {
            for (SyntheticItem& item : per_template[i]) {
                result.lf_items.push_back(std::move(item));
            }
            if (warnings) {
                for (std::string& note : per_template_notes[i]) {
                    warnings->push_back(std::move(note));
                }
            }
        }
    }
    if (with_triples) {
        result.triple_items = sample_triples(store, config);
    }

    PipelineSummary& summary = result.summary;
    std::set<std::string> classes;
    std::set<std::string> relations;
    std::set<std::string> entities;
    for (const SyntheticItem& item : result.lf_items) {
        const Analysis analysis = analyze(*item.expr);
        ++summary.question_count;
        ++summary.hop_counts[analysis.hops];
        ++summary.function_counts[std::string(function_tag_name(analysis.function))];
        ++summary.domain_counts[item.domain];
        classes.insert(analysis.classes.begin(), analysis.classes.end());
        relations.insert(analysis.relations.begin(), analysis.relations.end());
        entities.insert(analysis.entities.begin(), analysis.entities.end());
    }
    summary.distinct_classes = classes.size();
    summary.distinct_relations = relations.size();
    summary.distinct_entities = entities.size();

    std::set<std::string> triple_relations;
    std::set<std::string> triple_subjects;
    for (const SyntheticItem& item : result.triple_items) {
        ++summary.triple_count;
        triple_relations.insert(item.triple->relation);
        triple_subjects.insert(item.triple->subject);
        ++summary.triple_domain_counts[item.domain];
    }
    summary.triple_distinct_relations = triple_relations.size();
    summary.triple_distinct_subjects = triple_subjects.size();

    if (seen_relations) {
        std::set<std::string> emitted = relations;
        emitted.insert(triple_relations.begin(), triple_relations.end());
        if (emitted.empty()) {
            summary.unseen_relation_fraction = 0.0;
        } else {
            std::size_t unseen = 0;
            for (const std::string& relation : emitted) {
                if (!seen_relations->count(relation)) ++unseen;
            }
            summary.unseen_relation_fraction =
                static_cast<double>(unseen) / static_cast<double>(emitted.size());
        }
    }
    return result;
}

nlohmann::json PipelineSummary::to_json() const {
    nlohmann::json j;
    j["question_count"] = question_count;
    nlohmann::json hops = nlohmann::json::object();
    for (const auto& [hop, count] : hop_counts) hops[std::to_string(hop)] = count;
    j["hop_counts"] = hops;
    j["function_counts"] = function_counts;
    j["domain_counts"] = domain_counts;
    j["distinct_classes"] = distinct_classes;
    j["distinct_relations"] = distinct_relations;
    j["distinct_entities"] = distinct_entities;
    j["triple_count"] = triple_count;
    j["triple_distinct_relations"] = triple_distinct_relations;
    j["triple_distinct_subjects"] = triple_distinct_subjects;
    j["triple_domain_counts"] = triple_domain_counts;
    if (unseen_relation_fraction) j["unseen_relation_fraction"] = *unseen_relation_fraction;
    return j;
}

std::vector<DatasetRecord> to_dataset(const std::vector<SyntheticItem>& items) {
    std::vector<DatasetRecord> records;
    std::size_t lf_serial = 0;
    std::size_t triple_serial = 0;
    for (const SyntheticItem& item : items) {
        DatasetRecord record;
        if (item.kind == SyntheticItem::Kind::LogicalForm) {
            char qid[24];
            std::snprintf(qid, sizeof(qid), "lf-%06zu", ++lf_serial);
            record.qid = qid;
            record.s_expression = serialize_sexpr(*item.expr);
        } else {
            char qid[24];
            std::snprintf(qid, sizeof(qid), "tq-%06zu", ++triple_serial);
            record.qid = qid;
            SExpr join;
            join.kind = SExprKind::Join;
            join.name = item.triple->relation;
            join.inverse = true;
            SExpr subject;
            subject.kind = SExprKind::EntityAtom;
            subject.name = item.triple->subject;
            join.children.push_back(std::move(subject));
            record.s_expression = serialize_sexpr(join);
        }
        record.question = item.question;
        if (item.answers.kind == AnswerSet::Kind::Count) {
            record.answers.push_back(std::to_string(item.answers.count));
        } else {
            record.answers.assign(item.answers.items.begin(), item.answers.items.end());
        }
        record.template_id = item.template_id;
        record.domain = item.domain;
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace kbqa
