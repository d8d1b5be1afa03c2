#include "sketchml/sketchspace.hpp"

#include <algorithm>
#include <fstream>

namespace sketchml {

using nlohmann::json;

const Hole* Sketch::find_hole(const std::string& name) const {
    for (const auto& h : holes)
        if (h.name == name) return &h;
    return nullptr;
}

std::size_t SearchSpace::size() const {
    std::size_t total = 0;
    for (const auto& s : sketches) total += enumerate(s).size();
    return total;
}

void SearchSpace::log_removal(const std::string& rule, const std::string& what) {
    removal_log.push_back({rule, what, removal_log.size()});
}

namespace {

bool guard_satisfied(const Guard& g, const std::map<std::string, json>& values) {
    auto it = values.find(g.hole);
    if (it == values.end()) return false;
    return std::find(g.allowed.begin(), g.allowed.end(), it->second) != g.allowed.end();
}

std::vector<json> block_candidates(const Hole& hole, const Block& block) {
    auto it = block.find(hole.name);
    if (it == block.end()) return hole.candidates;
    std::vector<json> out;
    for (const auto& v : hole.candidates)
        if (std::find(it->second.begin(), it->second.end(), v) != it->second.end())
            out.push_back(v);
    return out;
}

void enumerate_block(const Sketch& sketch, const Block& block, std::size_t hole_idx,
                     std::map<std::string, json>& current, std::vector<Assignment>& out) {
    if (hole_idx == sketch.holes.size()) {
        out.push_back({sketch.id, current});
        return;
    }
    const Hole& hole = sketch.holes[hole_idx];
    if (hole.active_when && !guard_satisfied(*hole.active_when, current)) {
        enumerate_block(sketch, block, hole_idx + 1, current, out);
        return;
    }
    for (const auto& v : block_candidates(hole, block)) {
        current[hole.name] = v;
        enumerate_block(sketch, block, hole_idx + 1, current, out);
        current.erase(hole.name);
    }
}

}  // namespace

std::vector<Assignment> enumerate(const Sketch& sketch) {
    std::vector<Assignment> out;
    std::map<std::string, json> current;
    for (const auto& block : sketch.blocks)
        enumerate_block(sketch, block, 0, current, out);
    return out;
}

Assignment canonicalize(const Sketch& sketch, const Assignment& a) {
    Assignment out;
    out.sketch_id = a.sketch_id;
    for (const auto& [name, value] : a.values) {
        const Hole* hole = sketch.find_hole(name);
        if (!hole) throw Error("sketchspace", "value for unknown hole '" + name + "'");
        if (hole->active_when && !guard_satisfied(*hole->active_when, a.values)) continue;
        out.values[name] = value;
    }
    return out;
}

ModelSpec generate(const Sketch& sketch, const Assignment& a, std::uint64_t seed) {
    ModelSpec spec;
    spec.id = sketch.id;
    spec.seed = seed;
    for (const auto& [name, value] : a.values) spec.params[name] = value;
    return spec;
}

// ---------------------------------------------------------------------------
// default grids

namespace {

Hole categorical(std::string name, std::vector<json> candidates,
                 std::optional<Guard> guard = std::nullopt) {
    return {std::move(name), HoleKind::categorical, std::move(candidates), std::move(guard)};
}

Hole numeric(std::string name, std::vector<json> candidates,
             std::optional<Guard> guard = std::nullopt) {
    return {std::move(name), HoleKind::ordered_numeric, std::move(candidates),
            std::move(guard)};
}

Sketch logistic_regression_sketch() {
    Sketch s;
    s.id = ClassifierId::logistic_regression;
    s.holes = {
        categorical("solver", {"gradient", "newton"}),
        categorical("penalty", {"l1", "l2"}),
        numeric("C", {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0}),
        numeric("max_iter", {10, 100, 1000}),
        categorical("multi_class", {"ovr", "multinomial"}),
        numeric("tol", {1e-4, 1e-3}),
    };
    // l1 is available under the gradient solver only
    s.blocks = {Block{{"solver", {"gradient"}}},
                Block{{"solver", {"newton"}}, {"penalty", {"l2"}}}};
    return s;
}

Sketch perceptron_sketch() {
    Sketch s;
    s.id = ClassifierId::perceptron;
    s.holes = {
        categorical("penalty", {"none", "l1", "l2"}),
        numeric("alpha", {1e-5, 1e-4, 1e-3, 1e-2}),
        numeric("max_iter", {10, 100, 1000}),
        numeric("eta0", {0.01, 0.1, 1.0}),
        categorical("shuffle", {true, false}),
    };
    s.blocks = {Block{}};
    return s;
}

Sketch linear_svm_sketch() {
    Sketch s;
    s.id = ClassifierId::linear_svm;
    s.holes = {
        numeric("C", {1.0, 10.0, 100.0, 1000.0, 10000.0}),
        categorical("loss", {"hinge", "squared_hinge"}),
        numeric("max_iter", {100, 1000}),
        numeric("tol", {1e-4, 1e-3}),
    };
    s.blocks = {Block{}};
    return s;
}

Sketch kernel_svm_sketch() {
    Sketch s;
    s.id = ClassifierId::kernel_svm;
    s.holes = {
        categorical("kernel", {"linear", "rbf", "sigmoid", "poly"}),
        numeric("C", {1.0, 10.0, 100.0, 1000.0, 10000.0}),
        numeric("degree", {3, 4, 5, 6, 7}, Guard{"kernel", {"poly"}}),
    };
    s.blocks = {Block{{"kernel", {"linear", "rbf", "sigmoid"}}},
                Block{{"kernel", {"poly"}}}};
    return s;
}

// Remove one candidate value from a hole and every block restriction that
// names it. Returns true if anything was removed.
bool remove_candidate(Sketch& sketch, const std::string& hole_name, const json& value) {
    bool removed = false;
    for (auto& hole : sketch.holes) {
        if (hole.name != hole_name) continue;
        auto it = std::find(hole.candidates.begin(), hole.candidates.end(), value);
        if (it != hole.candidates.end()) {
            hole.candidates.erase(it);
            removed = true;
        }
    }
    for (auto& block : sketch.blocks) {
        auto it = block.find(hole_name);
        if (it == block.end()) continue;
        auto vit = std::find(it->second.begin(), it->second.end(), value);
        if (vit != it->second.end()) it->second.erase(vit);
    }
    return removed;
}

Sketch* find_sketch(SearchSpace& space, ClassifierId id) {
    for (auto& s : space.sketches)
        if (s.id == id) return &s;
    return nullptr;
}

}  // namespace

SearchSpace default_space() {
    SearchSpace space;
    space.sketches = {logistic_regression_sketch(), linear_svm_sketch(), perceptron_sketch(),
                      kernel_svm_sketch()};
    return space;
}

SearchSpace static_prune(const SearchSpace& space, const DatasetProfile& profile) {
    if (profile.separability == Separability::unknown)
        throw Error("sketchspace", "static_prune requires a decided separability verdict");
    SearchSpace pruned = space;

    // multiclass rule
    if (profile.n_classes > 2) {
        if (Sketch* lr = find_sketch(pruned, ClassifierId::logistic_regression)) {
            if (remove_candidate(*lr, "multi_class", "ovr"))
                pruned.log_removal("multiclass",
                                   "logistic_regression multi_class=ovr (one-vs-rest "
                                   "removed for multiclass data)");
        }
    }

    // separability rules
    if (profile.separability == Separability::not_separable) {
        auto it = std::find_if(pruned.sketches.begin(), pruned.sketches.end(),
                               [](const Sketch& s) { return s.id == ClassifierId::linear_svm; });
        if (it != pruned.sketches.end()) {
            pruned.sketches.erase(it);
            pruned.log_removal("separability", "linear_svm sketch removed entirely");
        }
        if (Sketch* svm = find_sketch(pruned, ClassifierId::kernel_svm)) {
            if (remove_candidate(*svm, "kernel", "linear"))
                pruned.log_removal("separability", "kernel_svm kernel=linear removed");
        }
        if (Sketch* lr = find_sketch(pruned, ClassifierId::logistic_regression)) {
            if (remove_candidate(*lr, "solver", "gradient"))
                pruned.log_removal("separability",
                                   "logistic_regression solver=gradient removed");
        }
        // try the kernel machine first
        std::stable_sort(pruned.sketches.begin(), pruned.sketches.end(),
                         [](const Sketch& a, const Sketch& b) {
                             return (a.id == ClassifierId::kernel_svm) >
                                    (b.id == ClassifierId::kernel_svm);
                         });
    } else {
        if (Sketch* svm = find_sketch(pruned, ClassifierId::kernel_svm)) {
            for (const char* k : {"rbf", "sigmoid", "poly"}) {
                if (remove_candidate(*svm, "kernel", k))
                    pruned.log_removal("separability",
                                       std::string("kernel_svm kernel=") + k + " removed");
            }
        }
        // linear sketches first, kernel machine (now linear-only) last
        std::stable_sort(pruned.sketches.begin(), pruned.sketches.end(),
                         [](const Sketch& a, const Sketch& b) {
                             return (a.id != ClassifierId::kernel_svm) >
                                    (b.id != ClassifierId::kernel_svm);
                         });
    }

    if (pruned.size() == 0) {
        // fail open: pruning is an optimization, never a correctness gate
        SearchSpace original = space;
        original.log_removal("fail-open", "pruning emptied the space; running unpruned");
        return original;
    }
    return pruned;
}

// ---------------------------------------------------------------------------
// JSON sketch definitions

namespace {

std::string hole_kind_name(HoleKind k) {
    return k == HoleKind::categorical ? "categorical" : "ordered_numeric";
}

HoleKind hole_kind_from_name(const std::string& s) {
    if (s == "categorical") return HoleKind::categorical;
    if (s == "ordered_numeric") return HoleKind::ordered_numeric;
    throw Error("sketchspace", "unknown hole kind '" + s + "'");
}

}  // namespace

std::vector<Sketch> sketches_from_json(const json& doc) {
    std::vector<Sketch> out;
    for (const auto& sj : doc) {
        Sketch s;
        s.id = classifier_id_from_string(sj.at("classifier_id").get<std::string>());
        for (const auto& hj : sj.at("holes")) {
            Hole h;
            h.name = hj.at("name").get<std::string>();
            h.kind = hole_kind_from_name(hj.at("kind").get<std::string>());
            h.candidates = hj.at("candidates").get<std::vector<json>>();
            if (h.candidates.empty())
                throw Error("sketchspace", "hole '" + h.name + "' has no candidates");
            if (hj.contains("active_when")) {
                Guard g;
                g.hole = hj["active_when"].at("hole").get<std::string>();
                g.allowed = hj["active_when"].at("in").get<std::vector<json>>();
                h.active_when = std::move(g);
            }
            s.holes.push_back(std::move(h));
        }
        if (sj.contains("blocks")) {
            for (const auto& bj : sj["blocks"]) {
                Block b;
                for (auto it = bj.begin(); it != bj.end(); ++it)
                    b[it.key()] = it.value().get<std::vector<json>>();
                s.blocks.push_back(std::move(b));
            }
        }
        if (s.blocks.empty()) s.blocks.push_back(Block{});
        out.push_back(std::move(s));
    }
    return out;
}

json sketches_to_json(const std::vector<Sketch>& sketches) {
    json doc = json::array();
    for (const auto& s : sketches) {
        json sj;
        sj["classifier_id"] = to_string(s.id);
        sj["holes"] = json::array();
        for (const auto& h : s.holes) {
            json hj;
            hj["name"] = h.name;
            hj["kind"] = hole_kind_name(h.kind);
            hj["candidates"] = h.candidates;
            if (h.active_when)
                hj["active_when"] = {{"hole", h.active_when->hole},
                                     {"in", h.active_when->allowed}};
            sj["holes"].push_back(hj);
        }
        sj["blocks"] = json::array();
        for (const auto& b : s.blocks) {
            json bj = json::object();
            for (const auto& [name, values] : b) bj[name] = values;
            sj["blocks"].push_back(bj);
        }
        doc.push_back(sj);
    }
    return doc;
}

SearchSpace load_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("sketchspace", "cannot read sketch file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error("sketchspace", "invalid sketch file: " + std::string(e.what()));
    }
    SearchSpace space;
    space.sketches = sketches_from_json(doc);
    return space;
}

}  // namespace sketchml
