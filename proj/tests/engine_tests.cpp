#include <doctest.h>

#include <set>

#include "sketchml/engine.hpp"
#include "support.hpp"

using namespace sketchml;
using nlohmann::json;

namespace {

Sketch two_hole_sketch() {
    Sketch s;
    s.id = ClassifierId::linear_svm;
    s.holes = {{"C", HoleKind::ordered_numeric, {json(1.0), json(10.0), json(100.0)}, {}},
               {"loss", HoleKind::categorical, {json("hinge"), json("squared_hinge")}, {}}};
    s.blocks = {Block{}};
    return s;
}

EvalRecord record_for(ClassifierId id, std::map<std::string, json> values, double mean,
                      std::size_t seq) {
    EvalRecord r;
    r.classifier_id = id;
    r.assignment = {id, std::move(values)};
    r.mean_accuracy = mean;
    r.seq = seq;
    return r;
}

SearchSpace toy_space() {
    SearchSpace space;
    Sketch s;
    s.id = ClassifierId::linear_svm;
    s.holes = {{"C", HoleKind::ordered_numeric, {json(0.1), json(1.0)}, {}},
               {"loss", HoleKind::categorical, {json("squared_hinge")}, {}},
               {"max_iter", HoleKind::ordered_numeric, {json(50), json(100)}, {}},
               {"tol", HoleKind::ordered_numeric, {json(1e-4)}, {}}};
    s.blocks = {Block{}};
    space.sketches = {s};
    return space;
}

}  // namespace

TEST_CASE("monotone rule skips larger values after a flat consecutive pair") {
    const Sketch s = two_hole_sketch();
    std::vector<EvalRecord> records = {
        record_for(ClassifierId::linear_svm, {{"C", 1.0}, {"loss", "hinge"}}, 0.80, 0),
        record_for(ClassifierId::linear_svm, {{"C", 10.0}, {"loss", "hinge"}}, 0.80, 1),
    };
    std::deque<Assignment> remaining = {
        {ClassifierId::linear_svm, {{"C", json(100.0)}, {"loss", json("hinge")}}},
        {ClassifierId::linear_svm, {{"C", json(100.0)}, {"loss", json("squared_hinge")}}},
    };
    const auto skipped =
        apply_monotone_rule(s, records[1], records, remaining, 0.005);
    // only the sibling with matching non-C values is pruned
    REQUIRE(skipped.size() == 1);
    CHECK(skipped[0].assignment.values.at("loss") == "hinge");
    CHECK(skipped[0].rule == "monotone:C");
    CHECK(remaining.size() == 1);
}

TEST_CASE("monotone rule stays quiet when accuracy improved past epsilon") {
    const Sketch s = two_hole_sketch();
    std::vector<EvalRecord> records = {
        record_for(ClassifierId::linear_svm, {{"C", 1.0}, {"loss", "hinge"}}, 0.80, 0),
        record_for(ClassifierId::linear_svm, {{"C", 10.0}, {"loss", "hinge"}}, 0.81, 1),
    };
    std::deque<Assignment> remaining = {
        {ClassifierId::linear_svm, {{"C", json(100.0)}, {"loss", json("hinge")}}}};
    CHECK(apply_monotone_rule(s, records[1], records, remaining, 0.005).empty());
    CHECK(remaining.size() == 1);
}

TEST_CASE("monotone rule requires consecutive candidates of the same hole") {
    const Sketch s = two_hole_sketch();
    // C=1 then C=100 are not consecutive in {1, 10, 100}: no sibling, no prune
    std::vector<EvalRecord> records = {
        record_for(ClassifierId::linear_svm, {{"C", 1.0}, {"loss", "hinge"}}, 0.80, 0),
        record_for(ClassifierId::linear_svm, {{"C", 100.0}, {"loss", "hinge"}}, 0.80, 1),
    };
    std::deque<Assignment> remaining = {
        {ClassifierId::linear_svm, {{"C", json(10.0)}, {"loss", json("hinge")}}}};
    CHECK(apply_monotone_rule(s, records[1], records, remaining, 0.005).empty());
}

TEST_CASE("monotone rule treats each hole independently") {
    Sketch s = two_hole_sketch();
    s.holes.push_back(
        {"tol", HoleKind::ordered_numeric, {json(1e-4), json(1e-3)}, {}});
    std::vector<EvalRecord> records = {
        record_for(ClassifierId::linear_svm,
                   {{"C", 1.0}, {"loss", "hinge"}, {"tol", 1e-4}}, 0.8, 0),
        record_for(ClassifierId::linear_svm,
                   {{"C", 10.0}, {"loss", "hinge"}, {"tol", 1e-4}}, 0.8, 1),
    };
    std::deque<Assignment> remaining = {
        // differs from the pair in tol as well as C: not a matching sibling
        {ClassifierId::linear_svm,
         {{"C", json(100.0)}, {"loss", json("hinge")}, {"tol", json(1e-3)}}}};
    CHECK(apply_monotone_rule(s, records[1], records, remaining, 0.005).empty());
}

TEST_CASE("demotion triggers on the documented margin example") {
    std::vector<EvalRecord> records = {
        record_for(ClassifierId::kernel_svm, {{"kernel", "rbf"}, {"C", 1.0}}, 0.85, 0),
        record_for(ClassifierId::linear_svm, {{"C", 1.0}, {"loss", "hinge"}}, 0.55, 1),
    };
    CHECK(should_demote_linear(records, 0.15));
    CHECK_FALSE(should_demote_linear(records, 0.35));

    // kernel_svm with a linear kernel counts as linear family
    records.push_back(
        record_for(ClassifierId::kernel_svm, {{"kernel", "linear"}, {"C", 1.0}}, 0.84, 2));
    CHECK_FALSE(should_demote_linear(records, 0.15));
}

TEST_CASE("demotion needs both families present") {
    std::vector<EvalRecord> only_linear = {
        record_for(ClassifierId::perceptron, {{"max_iter", 10.0}}, 0.3, 0)};
    CHECK_FALSE(should_demote_linear(only_linear, 0.15));
    std::vector<EvalRecord> only_kernel = {
        record_for(ClassifierId::kernel_svm, {{"kernel", "rbf"}, {"C", 1.0}}, 0.9, 0)};
    CHECK_FALSE(should_demote_linear(only_kernel, 0.15));
}

TEST_CASE("family classification of records") {
    CHECK(is_linear_family_record(
        record_for(ClassifierId::perceptron, {{"max_iter", 10.0}}, 0.5, 0)));
    CHECK(is_linear_family_record(
        record_for(ClassifierId::kernel_svm, {{"kernel", "linear"}}, 0.5, 0)));
    CHECK_FALSE(is_linear_family_record(
        record_for(ClassifierId::kernel_svm, {{"kernel", "rbf"}}, 0.5, 0)));
    CHECK(is_nonlinear_record(
        record_for(ClassifierId::kernel_svm, {{"kernel", "poly"}}, 0.5, 0)));
    CHECK_FALSE(is_nonlinear_record(
        record_for(ClassifierId::logistic_regression, {}, 0.5, 0)));
}

TEST_CASE("select_best orders by mean desc, std asc, then earliest seq") {
    ResultsLedger ledger;
    EvalRecord a = record_for(ClassifierId::linear_svm, {{"C", 1.0}}, 0.9, 0);
    a.std_accuracy = 0.05;
    EvalRecord b = record_for(ClassifierId::linear_svm, {{"C", 10.0}}, 0.9, 1);
    b.std_accuracy = 0.01;
    EvalRecord c = record_for(ClassifierId::linear_svm, {{"C", 100.0}}, 0.95, 2);
    c.failed = true;  // never selectable
    ledger.records = {a, b, c};
    CHECK(select_best(ledger).seq == 1);

    EvalRecord d = record_for(ClassifierId::linear_svm, {{"C", 0.1}}, 0.9, 3);
    d.std_accuracy = 0.01;
    ledger.records.push_back(d);
    CHECK(select_best(ledger).seq == 1);  // tie resolves to the earlier seq

    ResultsLedger empty;
    CHECK_THROWS_AS(select_best(empty), Error);
    ResultsLedger all_failed;
    all_failed.records = {c};
    CHECK_THROWS_AS(select_best(all_failed), Error);
}

TEST_CASE("every enumerated assignment is evaluated or skipped exactly once") {
    const Dataset d = testsupport::blobs_dataset(30, 5.0);
    const FoldPlan plan = stratified_folds(*d.labels, 5, kDefaultSeed);
    const SearchSpace space = toy_space();
    Budget budget;
    budget.wall_clock_seconds.reset();
    const ResultsLedger ledger = run_search(space, d, plan, budget);

    CHECK(ledger.initial_size == 4);
    CHECK(ledger.visited() == ledger.initial_size);
    std::set<std::string> seen;
    for (const auto& r : ledger.records) {
        json j;
        for (const auto& [k, v] : r.assignment.values) j[k] = v;
        CHECK(seen.insert(j.dump()).second);
    }
    for (const auto& s : ledger.skips) {
        json j;
        for (const auto& [k, v] : s.assignment.values) j[k] = v;
        CHECK(seen.insert(j.dump()).second);
    }
    CHECK(seen.size() == 4);
}

TEST_CASE("evaluation budget caps the record count and keeps a prefix") {
    const Dataset d = testsupport::blobs_dataset(30, 5.0);
    const FoldPlan plan = stratified_folds(*d.labels, 5, kDefaultSeed);
    const SearchSpace space = toy_space();

    Budget unlimited;
    unlimited.wall_clock_seconds.reset();
    SearchOptions options;
    options.dynamic_pruning = false;
    const ResultsLedger full = run_search(space, d, plan, unlimited, options);

    Budget capped = unlimited;
    capped.max_evaluations = 2;
    const ResultsLedger cut = run_search(space, d, plan, capped, options);
    REQUIRE(cut.records.size() == 2);
    CHECK_FALSE(cut.events.empty());
    // budgeted run is a prefix of the unbudgeted one
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(cut.records[i].assignment == full.records[i].assignment);
        CHECK(cut.records[i].mean_accuracy == full.records[i].mean_accuracy);
    }
}

TEST_CASE("warm start does not change results, only work") {
    const Dataset d = testsupport::blobs_dataset(30, 5.0);
    const FoldPlan plan = stratified_folds(*d.labels, 5, kDefaultSeed);
    const SearchSpace space = toy_space();
    Budget budget;
    budget.wall_clock_seconds.reset();

    SearchOptions warm;
    warm.dynamic_pruning = false;
    SearchOptions cold = warm;
    cold.warm_start = false;
    const ResultsLedger a = run_search(space, d, plan, budget, warm);
    const ResultsLedger b = run_search(space, d, plan, budget, cold);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].assignment == b.records[i].assignment);
        CHECK(a.records[i].mean_accuracy ==
              doctest::Approx(b.records[i].mean_accuracy).epsilon(1e-12));
    }
}

TEST_CASE("feature selection modes") {
    Dataset d = testsupport::blobs_dataset(30, 5.0);
    // constant column has zero variance after scaling
    Dataset widened;
    widened.features = Matrix(d.n_rows(), 3);
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        widened.features(i, 0) = d.features(i, 0);
        widened.features(i, 1) = d.features(i, 1);
        widened.features(i, 2) = 7.0;
    }
    widened.labels = d.labels;
    widened.class_names = d.class_names;
    widened.feature_names = {"x0", "x1", "const"};
    widened.missing_mask.assign(d.n_rows() * 3, 0);

    Sketch s = toy_space().sketches[0];
    const auto [all_view, all_mask] =
        select_features(s, widened, FeatureSelectMode::all);
    CHECK(all_mask.selected() == 3);
    const auto [var_view, var_mask] =
        select_features(s, widened, FeatureSelectMode::variance_threshold);
    CHECK(var_mask.selected() == 2);
    CHECK_FALSE(var_mask.mask[2]);
    CHECK(var_view.n_features() == 2);
}

TEST_CASE("final_predict refits on all data and decodes class names") {
    const Dataset d = testsupport::blobs_dataset(40, 6.0);
    EvalRecord best;
    best.classifier_id = ClassifierId::linear_svm;
    best.assignment = {ClassifierId::linear_svm,
                       {{"C", json(1.0)},
                        {"loss", json("squared_hinge")},
                        {"max_iter", json(200)},
                        {"tol", json(1e-4)}}};
    best.features.mask.assign(2, true);

    Dataset test;
    test.features = Matrix(2, 2);
    test.features(0, 0) = 0.0;
    test.features(0, 1) = 0.0;
    test.features(1, 0) = 6.0;
    test.features(1, 1) = 0.0;
    test.missing_mask.assign(4, 0);

    const auto labels = final_predict(best, d, test, kDefaultSeed);
    CHECK(labels == std::vector<std::string>{"neg", "pos"});

    Dataset wrong;
    wrong.features = Matrix(1, 3);
    wrong.missing_mask.assign(3, 0);
    CHECK_THROWS_AS(final_predict(best, d, wrong, kDefaultSeed), Error);
    Dataset empty;
    empty.features = Matrix(0, 2);
    CHECK(final_predict(best, d, empty, kDefaultSeed).empty());
}
