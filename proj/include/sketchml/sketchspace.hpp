#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sketchml/inspect.hpp"
#include "sketchml/model_spec.hpp"

namespace sketchml {

enum class HoleKind { categorical, ordered_numeric };

// Guard: the hole is active only when another hole's value is in `allowed`.
struct Guard {
    std::string hole;
    std::vector<nlohmann::json> allowed;
};

struct Hole {
    std::string name;
    HoleKind kind = HoleKind::categorical;
    std::vector<nlohmann::json> candidates;  // ordered_numeric: strictly increasing
    std::optional<Guard> active_when;
};

// A block restricts some holes to candidate subsets; holes absent from the
// block keep their full candidate list. Blocks must be pairwise disjoint.
using Block = std::map<std::string, std::vector<nlohmann::json>>;

struct Sketch {
    ClassifierId id = ClassifierId::perceptron;
    std::vector<Hole> holes;
    std::vector<Block> blocks;

    const Hole* find_hole(const std::string& name) const;
};

// Canonical hole assignment: inactive holes carry no value.
struct Assignment {
    ClassifierId sketch_id = ClassifierId::perceptron;
    std::map<std::string, nlohmann::json> values;

    bool operator==(const Assignment&) const = default;
};

struct RemovalEntry {
    std::string rule;
    std::string what;
    std::size_t order = 0;
};

struct SearchSpace {
    std::vector<Sketch> sketches;
    std::vector<RemovalEntry> removal_log;

    std::size_t size() const;  // sum of per-sketch enumeration counts
    void log_removal(const std::string& rule, const std::string& what);
};

// The documented default grids; kernel_svm follows the two-block 40-combo
// candidate space, the rest are fixed defaults chosen to cover the common
// operating points of each family.
SearchSpace default_space();

// Every satisfying canonical assignment, exactly once, in deterministic order:
// block order, then hole-declaration order, then candidate-index order.
std::vector<Assignment> enumerate(const Sketch& sketch);

// Drop values of holes whose guard is unsatisfied. Idempotent.
Assignment canonicalize(const Sketch& sketch, const Assignment& a);

// Rule-based pruning driven by the dataset profile: the multiclass rule and
// the separability rules. Fails open: if pruning would empty the space, the
// unpruned input is returned with the event logged.
SearchSpace static_prune(const SearchSpace& space, const DatasetProfile& profile);

// Fill a sketch's holes: total for every enumerated assignment.
ModelSpec generate(const Sketch& sketch, const Assignment& a, std::uint64_t seed = kDefaultSeed);

// JSON sketch-definition file support, schema:
//   [{classifier_id, holes:[{name, kind, candidates, active_when?}], blocks:[...]}]
std::vector<Sketch> sketches_from_json(const nlohmann::json& doc);
nlohmann::json sketches_to_json(const std::vector<Sketch>& sketches);
SearchSpace load_space(const std::string& path);

}  // namespace sketchml
