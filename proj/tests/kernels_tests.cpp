#include <doctest.h>

#include <random>

#include "sketchml/kernels.hpp"

using namespace sketchml;

namespace {

Matrix random_matrix(std::size_t n, std::size_t d, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    Matrix m(n, d);
    for (auto& v : m.data()) v = dist(rng);
    return m;
}

}  // namespace

TEST_CASE("kernel values match their closed forms") {
    const double x[2] = {1.0, 2.0};
    const double y[2] = {3.0, -1.0};
    KernelParams p;
    p.gamma = 0.5;
    p.coef0 = 1.0;
    p.degree = 2;

    p.kind = KernelKind::linear;
    CHECK(kernel_value(p, x, y, 2) == doctest::Approx(1.0));
    p.kind = KernelKind::rbf;
    CHECK(kernel_value(p, x, y, 2) == doctest::Approx(std::exp(-0.5 * 13.0)));
    p.kind = KernelKind::poly;
    CHECK(kernel_value(p, x, y, 2) == doctest::Approx((0.5 * 1.0 + 1.0) * (0.5 * 1.0 + 1.0)));
    p.kind = KernelKind::sigmoid;
    CHECK(kernel_value(p, x, y, 2) == doctest::Approx(std::tanh(0.5 * 1.0 + 1.0)));
}

TEST_CASE("parallel gram matrix is bitwise equal to the serial reference") {
    const Matrix a = random_matrix(37, 6, 1);
    const Matrix b = random_matrix(23, 6, 2);
    for (auto kind :
         {KernelKind::linear, KernelKind::rbf, KernelKind::poly, KernelKind::sigmoid}) {
        KernelParams p;
        p.kind = kind;
        p.gamma = 0.25;
        p.coef0 = 0.5;
        p.degree = 3;
        const Matrix gs = gram_matrix_serial(a, b, p);
        const Matrix gp = gram_matrix_parallel(a, b, p);
        CHECK(gs == gp);  // exact, not approximate
        CHECK(gs.rows() == 37);
        CHECK(gs.cols() == 23);
    }
}

TEST_CASE("parallel linear scores are bitwise equal to the serial reference") {
    const Matrix x = random_matrix(41, 5, 3);
    const Matrix w = random_matrix(4, 5, 4);
    const std::vector<double> intercepts = {0.1, -0.2, 0.3, 0.0};
    const Matrix s = linear_scores_serial(x, w, intercepts);
    const Matrix p = linear_scores_parallel(x, w, intercepts);
    CHECK(s == p);
    CHECK(s.rows() == 41);
    CHECK(s.cols() == 4);
}

TEST_CASE("the parallel switch falls back to the serial path") {
    const Matrix a = random_matrix(8, 3, 5);
    KernelParams p;
    p.kind = KernelKind::rbf;
    p.gamma = 1.0;
    set_parallel_enabled(false);
    CHECK_FALSE(parallel_enabled());
    const Matrix g1 = gram_matrix(a, a, p);
    set_parallel_enabled(true);
    CHECK(parallel_enabled());
    const Matrix g2 = gram_matrix(a, a, p);
    CHECK(g1 == g2);
}

TEST_CASE("kernel kind names round trip") {
    for (auto kind :
         {KernelKind::linear, KernelKind::rbf, KernelKind::poly, KernelKind::sigmoid})
        CHECK(kernel_kind_from_string(to_string(kind)) == kind);
}
