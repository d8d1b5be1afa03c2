#include <doctest.h>

#include <cmath>

#include "sketchml/prep.hpp"
#include "support.hpp"

using namespace sketchml;

namespace {

Dataset tiny_with_missing() {
    Dataset d;
    d.features = Matrix(3, 2);
    d.features(0, 0) = 1.0;
    d.features(0, 1) = 10.0;
    d.features(1, 0) = 3.0;
    d.features(1, 1) = 0.0;  // missing placeholder
    d.features(2, 0) = 2.0;
    d.features(2, 1) = 20.0;
    d.labels = std::vector<int>{0, 1, 0};
    d.class_names = {"a", "b"};
    d.feature_names = {"x", "y"};
    d.missing_mask = {0, 0, 0, 1, 0, 0};
    return d;
}

}  // namespace

TEST_CASE("imputer fills with the mean of present values") {
    const Dataset d = tiny_with_missing();
    const ImputeParams p = fit_imputer(d);
    CHECK(p.fill[0] == doctest::Approx(2.0));
    CHECK(p.fill[1] == doctest::Approx(15.0));
    const Dataset filled = apply_imputer(d, p);
    CHECK(filled.features(1, 1) == doctest::Approx(15.0));
    CHECK_FALSE(filled.has_missing());
}

TEST_CASE("fully missing column is an error") {
    Dataset d = tiny_with_missing();
    d.missing_mask = {0, 1, 0, 1, 0, 1};
    CHECK_THROWS_AS(fit_imputer(d), Error);
}

TEST_CASE("breast cancer V6 imputation mean matches the frozen oracle") {
    // mean of the 683 present values, computed once by an independent pass
    const Dataset d = testsupport::load("breast_cancer.csv");
    const ImputeParams p = fit_imputer(d);
    CHECK(p.fill[5] == doctest::Approx(3.5446559297218156).epsilon(1e-14));
}

TEST_CASE("scaler standardizes to zero mean and unit variance") {
    Dataset d = tiny_with_missing();
    d = apply_imputer(d, fit_imputer(d));
    const ScalerParams sc = fit_scaler(d);
    const Dataset z = apply_scaler(d, sc);
    for (std::size_t j = 0; j < 2; ++j) {
        double mean = 0.0, var = 0.0;
        for (std::size_t i = 0; i < 3; ++i) mean += z.features(i, j);
        mean /= 3.0;
        for (std::size_t i = 0; i < 3; ++i)
            var += (z.features(i, j) - mean) * (z.features(i, j) - mean);
        var /= 3.0;
        CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(sc.fitted_on == 3);
}

TEST_CASE("constant column scales to zeros via the std floor") {
    Dataset d;
    d.features = Matrix(3, 1, 4.0);
    d.missing_mask.assign(3, 0);
    const ScalerParams sc = fit_scaler(d);
    CHECK(sc.stddev[0] >= kStdFloor);
    const Dataset z = apply_scaler(d, sc);
    for (std::size_t i = 0; i < 3; ++i) CHECK(z.features(i, 0) == 0.0);
}

TEST_CASE("train-fitted parameters apply unchanged to new data") {
    Dataset train = tiny_with_missing();
    train = apply_imputer(train, fit_imputer(train));
    const ScalerParams sc = fit_scaler(train);

    Dataset test;
    test.features = Matrix(1, 2);
    test.features(0, 0) = 5.0;
    test.features(0, 1) = 15.0;
    test.missing_mask.assign(2, 0);
    const Dataset z = apply_scaler(test, sc);
    CHECK(z.features(0, 0) ==
          doctest::Approx((5.0 - sc.mean[0]) / sc.stddev[0]).epsilon(1e-14));
    CHECK(z.features(0, 1) ==
          doctest::Approx((15.0 - sc.mean[1]) / sc.stddev[1]).epsilon(1e-14));
}

TEST_CASE("scaling is invertible where std is real") {
    Dataset d = testsupport::load("iris.csv");
    const ScalerParams sc = fit_scaler(d);
    const Dataset z = apply_scaler(d, sc);
    for (std::size_t i = 0; i < d.n_rows(); i += 17)
        for (std::size_t j = 0; j < d.n_features(); ++j)
            CHECK(z.features(i, j) * sc.stddev[j] + sc.mean[j] ==
                  doctest::Approx(d.features(i, j)).epsilon(1e-12));
}
