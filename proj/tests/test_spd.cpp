#include <doctest.h>

#include <cmath>

#include "ffa/rng.hpp"
#include "ffa/spd.hpp"

using namespace ffa;

namespace {

MatrixXd random_spd(NormalStream& stream, int d, double jitter = 0.1) {
    MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = stream.normal();
    return a * a.transpose() + jitter * MatrixXd::Identity(d, d);
}

}  // namespace

TEST_CASE("is_symmetric") {
    MatrixXd a(2, 2);
    a << 1.0, 2.0, 2.0, 5.0;
    CHECK(is_symmetric(a));
    a(0, 1) = 2.0 + 1e-6;
    CHECK(!is_symmetric(a));
    CHECK(is_symmetric(a, 1e-3));
}

TEST_CASE("spd_sqrt closed form") {
    // [[2,1],[1,2]] has eigenvalues 1 and 3 on (1,1)/(1,-1); its root is
    // ((sqrt3+1)/2, (sqrt3-1)/2; (sqrt3-1)/2, (sqrt3+1)/2).
    MatrixXd a(2, 2);
    a << 2.0, 1.0, 1.0, 2.0;
    const MatrixXd r = spd_sqrt(a);
    const double s3 = std::sqrt(3.0);
    CHECK(r(0, 0) == doctest::Approx((s3 + 1.0) / 2.0).epsilon(1e-14));
    CHECK(r(0, 1) == doctest::Approx((s3 - 1.0) / 2.0).epsilon(1e-14));
    CHECK((r * r - a).norm() < 1e-13);

    CHECK((spd_sqrt(MatrixXd::Identity(3, 3)) - MatrixXd::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("spd_sqrt random roundtrip and PSD clamping") {
    NormalStream stream(7);
    for (int trial = 0; trial < 50; ++trial) {
        const MatrixXd a = random_spd(stream, 2 + trial % 3);
        const MatrixXd r = spd_sqrt(a);
        CHECK((r * r - a).norm() < 1e-10 * a.norm());
        CHECK(is_symmetric(r, 1e-10));
    }
    // Singular but PSD input is accepted.
    MatrixXd rank1(2, 2);
    rank1 << 1.0, 1.0, 1.0, 1.0;
    const MatrixXd r = spd_sqrt(rank1);
    CHECK((r * r - rank1).norm() < 1e-12);
    // Indefinite input is rejected.
    MatrixXd indef(2, 2);
    indef << 1.0, 0.0, 0.0, -0.5;
    CHECK_THROWS_AS(spd_sqrt(indef), DomainError);
}

TEST_CASE("spd_solve and conditioning") {
    MatrixXd a(2, 2);
    a << 4.0, 1.0, 1.0, 3.0;
    VectorXd b(2);
    b << 9.0, 7.0;
    const VectorXd x = spd_solve(a, b);
    CHECK((a * x - b).norm() < 1e-12);

    MatrixXd bad(2, 2);
    bad << 1.0, 1.0, 1.0, 1.0 + 1e-15;
    CHECK_THROWS_AS(spd_solve(bad, b), IllConditionedError);
    try {
        spd_solve(bad, b);
    } catch (const IllConditionedError& e) {
        CHECK(e.condition() > 1e12);
    }
}

TEST_CASE("psd_factor reproduces the matrix") {
    NormalStream stream(11);
    for (int trial = 0; trial < 50; ++trial) {
        const MatrixXd a = random_spd(stream, 2);
        const MatrixXd l = psd_factor(a);
        CHECK((l * l.transpose() - a).norm() < 1e-11 * std::max(1.0, a.norm()));
    }
    MatrixXd rank1(2, 2);
    rank1 << 4.0, 2.0, 2.0, 1.0;
    const MatrixXd l = psd_factor(rank1);
    CHECK((l * l.transpose() - rank1).norm() < 1e-12);
}

TEST_CASE("spd_condition") {
    MatrixXd a = MatrixXd::Identity(2, 2);
    CHECK(spd_condition(a) == doctest::Approx(1.0));
    a(1, 1) = 1e-6;
    CHECK(spd_condition(a) == doctest::Approx(1e6).epsilon(1e-9));
}
