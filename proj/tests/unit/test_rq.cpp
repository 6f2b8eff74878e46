#include "doctest.h"

#include <random>

#include "aerq/aerq.hpp"
#include "aerq/rq.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using aerq::Index;
using aerq::Matrix;
using aerq::Vector;
using testdata::column;
using testdata::vec;

TEST_CASE("extreme fit examples") {
    SUBCASE("location case gives max y") {
        auto fit = aerq::fit_extreme_rq(testdata::location(vec({1, 3, 2})));
        CHECK(fit.fit.beta0 == 3.0);
        CHECK(fit.fit.active_set == std::vector<Index>{1});
        CHECK(fit.base == std::vector<Index>{1});
    }
    SUBCASE("three-point fixture") {
        const auto data = testdata::fixture();
        auto fit = aerq::fit_extreme_rq(data);
        CHECK(fit.fit.alpha == 1.0);
        CHECK(fit.fit.beta0 == doctest::Approx(3.5).epsilon(1e-14));
        CHECK(fit.fit.slopes(0) == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(fit.fit.objective == doctest::Approx(8.5).epsilon(1e-14));
        CHECK(fit.fit.active_set == std::vector<Index>{1, 2});
        CHECK_FALSE(fit.fit.degenerate);
        CHECK(fit.fit.residuals(0) == doctest::Approx(-2.5));
        CHECK(fit.fit.fitted(1) == doctest::Approx(3.0));
        auto base = aerq::extract_base(fit, data);
        CHECK(base.indices == std::vector<Index>{1, 2});
        CHECK_FALSE(base.exact_fit);
    }
    SUBCASE("square design interpolates") {
        auto data = aerq::validate_dataset(vec({0, 1}), column({0, 1}), aerq::SizeMode::AllowExactFit);
        auto fit = aerq::fit_extreme_rq(data);
        CHECK(std::abs(fit.fit.beta0) <= 1e-15);
        CHECK(fit.fit.slopes(0) == doctest::Approx(1.0));
        CHECK(fit.fit.residuals.cwiseAbs().maxCoeff() <= 1e-15);
        auto base = aerq::extract_base(fit, data);
        CHECK(base.indices == std::vector<Index>{0, 1});
        CHECK(base.exact_fit);
    }
    SUBCASE("duplicated rows give four active constraints") {
        auto data = aerq::validate_dataset(vec({1, 2, 1, 2, 0}), column({0, 1, 0, 1, 0.5}));
        auto fit = aerq::fit_extreme_rq(data);
        CHECK(fit.fit.active_set.size() == 4);
        CHECK(fit.fit.degenerate);
        CHECK(fit.base.empty());
        CHECK_THROWS_AS(aerq::extract_base(fit, data), aerq::DegeneracyError);
    }
}

TEST_CASE("fit_rq examples") {
    SUBCASE("median of three") {
        auto fit = aerq::fit_rq(testdata::location(vec({1, 2, 9})), 0.5);
        CHECK(fit.beta0 == doctest::Approx(2.0));
        CHECK(fit.objective == doctest::Approx(0.5 * 1 + 0.5 * 7));
    }
    SUBCASE("fixture at alpha 0.9 beats every grid neighbour") {
        const auto data = testdata::fixture();
        auto fit = aerq::fit_rq(data, 0.9);
        CHECK(aerq::certify_rq(fit, data).passed);
        CHECK(fit.objective == doctest::Approx(aerq::check_loss(data, 0.9, fit.coefficients())));
        double best = aerq::kInfinity;
        for (int i = -40; i <= 40; ++i) {
            for (int j = -40; j <= 40; ++j) {
                Vector b = fit.coefficients() + vec({i * 0.0125, j * 0.0125});
                best = std::min(best, aerq::check_loss(data, 0.9, b));
            }
        }
        CHECK(fit.objective <= best + 1e-12);
    }
    SUBCASE("alpha outside (0, 1)") {
        const auto data = testdata::fixture();
        CHECK_THROWS_AS(aerq::fit_rq(data, 0.0), aerq::InputError);
        CHECK_THROWS_AS(aerq::fit_rq(data, 1.0), aerq::InputError);
        CHECK_THROWS_AS(aerq::fit_rq(data, 1.5), aerq::InputError);
    }
}

TEST_CASE("fit_rq near one is bounded by the extreme fit") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto data = testdata::random_dataset(rng, 10 + trial, 1 + trial % 3);
        const auto ext = aerq::fit_extreme_rq(data);
        REQUIRE_FALSE(ext.fit.degenerate);
        const double n = static_cast<double>(data.n());
        const double alpha = 1.0 - 1.0 / (2.0 * n);
        const auto fit = aerq::fit_rq(data, alpha);
        const double at_extreme = aerq::check_loss(data, alpha, ext.fit.coefficients());
        // At the extreme fit every residual is <= 0, so the loss is
        // (1 - alpha) n (B(1) - mean y).
        CHECK(at_extreme == doctest::Approx((1.0 - alpha) * n *
                                            (aerq::averaged_rq(ext.fit, data) - data.mean_y())));
        CHECK(fit.objective <= at_extreme + 1e-10);

        // Above 1 - 1/(n max w) the extreme base stays optimal.
        const auto w = aerq::aerq_via_weights(data, ext.base).weights.weights;
        const double threshold = 1.0 - 1.0 / (n * w.maxCoeff());
        const auto top = aerq::fit_rq(data, 0.5 * (threshold + 1.0));
        CHECK(aerq::averaged_rq(top, data) ==
              doctest::Approx(aerq::averaged_rq(ext.fit, data)).epsilon(1e-12));
    }
}

TEST_CASE("extreme fit properties on random instances") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 40; ++trial) {
        const Index p = 1 + trial % 4;
        const auto data = testdata::random_dataset(rng, 8 + trial % 30, p);
        const auto ext = aerq::fit_extreme_rq(data);
        const double scale = 1.0 + data.y().cwiseAbs().maxCoeff();
        CHECK(ext.fit.residuals.maxCoeff() <= 1e-9 * scale);
        CHECK(ext.fit.active_set.size() == static_cast<std::size_t>(p + 1));

        // Random feasible perturbations never improve the objective.
        for (int k = 0; k < 100; ++k) {
            Vector b = ext.fit.coefficients();
            for (Index j = 0; j <= p; ++j) b(j) += 0.3 * g(rng);
            b(0) += (data.y() - data.design() * b).maxCoeff();
            CHECK(data.design_sum().dot(b) >= ext.fit.objective - 1e-9);
        }

        // Regression equivariance.
        Vector gamma(p + 1);
        for (Index j = 0; j <= p; ++j) gamma(j) = g(rng);
        const auto shifted = aerq::validate_dataset(data.y() + data.design() * gamma, data.x());
        const auto ext2 = aerq::fit_extreme_rq(shifted);
        CHECK((ext2.fit.coefficients() - ext.fit.coefficients() - gamma).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("extreme objective matches subset enumeration") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const Index p = 1 + trial % 3;
        const auto data = testdata::random_dataset(rng, p + 3 + trial % 6, p);
        oracle::Dense design;
        oracle::Row y;
        for (Index i = 0; i < data.n(); ++i) {
            oracle::Row r;
            for (Index j = 0; j <= p; ++j) r.push_back(data.design()(i, j));
            design.push_back(r);
            y.push_back(data.y()(i));
        }
        const auto expected = oracle::brute_force_extreme_objective(design, y);
        REQUIRE(expected);
        CHECK(std::abs(aerq::fit_extreme_rq(data).fit.objective - *expected) <= 1e-9);
    }
}

TEST_CASE("fit_rq is optimal along every coordinate direction") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 15; ++trial) {
        const auto data = testdata::random_dataset(rng, 12 + trial, 1 + trial % 3);
        for (double alpha : {0.1, 0.25, 0.5, 0.75, 0.9}) {
            const auto fit = aerq::fit_rq(data, alpha);
            const auto cert = aerq::certify_rq(fit, data);
            CHECK(cert.passed);
            CHECK(cert.min_axis_derivative >= -1e-8);
        }
    }
}
