#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "ycda/rng.hpp"
#include "ycda/tensor.hpp"

using namespace ycda;

TEST_CASE("zeros") {
    Tensor t = Tensor::zeros({2, 2});
    CHECK(t.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(t[i] == 0.0);
    CHECK(Tensor::zeros({1}).size() == 1);
    CHECK(Tensor::zeros({3, 2, 2}).size() == 12);
    CHECK_THROWS_AS(Tensor::zeros({2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Tensor::zeros({}), std::invalid_argument);
}

TEST_CASE("elementwise basics") {
    Tensor a({2}, {1, 2}), b({2}, {3, 4});
    Tensor mul = elementwise(a, b, ElementwiseOp::mul);
    CHECK(mul[0] == 3.0);
    CHECK(mul[1] == 8.0);

    Tensor x({2, 1, 2}, {1, 2, 3, 4});
    Tensor sum = elementwise(x, Tensor::zeros({2, 1, 2}), ElementwiseOp::add);
    for (std::size_t i = 0; i < 4; ++i) CHECK(sum[i] == x[i]);
}

TEST_CASE("elementwise channel broadcast") {
    Tensor a({2, 1, 2}, {1, 2, 3, 4});
    Tensor b({2}, {10, 0.5});
    Tensor out = elementwise(a, b, ElementwiseOp::mul);
    CHECK(out[0] == 10.0);
    CHECK(out[1] == 20.0);
    CHECK(out[2] == 1.5);
    CHECK(out[3] == 2.0);

    CHECK_THROWS_AS(elementwise(a, Tensor({3}, {1, 2, 3}), ElementwiseOp::mul),
                    std::invalid_argument);
}

TEST_CASE("channel broadcast equals materialized expansion, all small shapes") {
    Rng rng(7);
    for (std::size_t c = 1; c <= 8; ++c)
        for (std::size_t h = 1; h <= 8; h += 3)
            for (std::size_t w = 1; w <= 8; w += 3) {
                Tensor a({c, h, w});
                for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.uniform(-2, 2);
                Tensor b({c});
                for (std::size_t i = 0; i < c; ++i) b[i] = rng.uniform(-2, 2);
                Tensor expanded(a.shape());
                for (std::size_t ci = 0; ci < c; ++ci)
                    for (std::size_t i = 0; i < h * w; ++i)
                        expanded[ci * h * w + i] = b[ci];
                Tensor via_broadcast = elementwise(a, b, ElementwiseOp::mul);
                Tensor via_expand = elementwise(a, expanded, ElementwiseOp::mul);
                for (std::size_t i = 0; i < a.size(); ++i)
                    CHECK(via_broadcast[i] == via_expand[i]);
            }
}

TEST_CASE("reduce_spatial mean and var") {
    SUBCASE("constant channel") {
        Tensor f({1, 2, 2}, {3.5, 3.5, 3.5, 3.5});
        CHECK(reduce_spatial(f, SpatialStat::mean)[0] == doctest::Approx(3.5));
        CHECK(reduce_spatial(f, SpatialStat::var)[0] == doctest::Approx(0.0));
    }
    SUBCASE("hand-evaluated 2x2") {
        // values {0,0,1,1}: mean 1/2, population variance 1/4
        Tensor f({1, 2, 2}, {0, 0, 1, 1});
        CHECK(reduce_spatial(f, SpatialStat::mean)[0] == doctest::Approx(0.5));
        CHECK(reduce_spatial(f, SpatialStat::var)[0] == doctest::Approx(0.25));
    }
    SUBCASE("rejects non-3D input") {
        CHECK_THROWS_AS(reduce_spatial(Tensor({4}, {1, 2, 3, 4}), SpatialStat::mean),
                        std::invalid_argument);
    }
}

TEST_CASE("stats are permutation invariant and var is nonnegative") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        Tensor f({2, 3, 4});
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(-5, 5);
        Tensor mean = reduce_spatial(f, SpatialStat::mean);
        Tensor var = reduce_spatial(f, SpatialStat::var);
        for (std::size_t c = 0; c < 2; ++c) CHECK(var[c] >= 0.0);

        // shuffle each channel's spatial positions
        Tensor perm = f;
        for (std::size_t c = 0; c < 2; ++c) {
            double* p = perm.data() + c * 12;
            for (std::size_t i = 11; i > 0; --i)
                std::swap(p[i], p[rng.below(i + 1)]);
        }
        Tensor pmean = reduce_spatial(perm, SpatialStat::mean);
        Tensor pvar = reduce_spatial(perm, SpatialStat::var);
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(pmean[c] == doctest::Approx(mean[c]).epsilon(1e-12));
            CHECK(pvar[c] == doctest::Approx(var[c]).epsilon(1e-12));
        }
    }
}

TEST_CASE("var scaling: var(a*x) = a^2 var(x)") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor f({3, 4, 4});
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(-3, 3);
        const double a = rng.uniform(-4, 4);
        Tensor scaled = f;
        for (std::size_t i = 0; i < f.size(); ++i) scaled[i] *= a;
        Tensor v = reduce_spatial(f, SpatialStat::var);
        Tensor sv = reduce_spatial(scaled, SpatialStat::var);
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(sv[c] == doctest::Approx(a * a * v[c]).epsilon(1e-12));
    }
}
