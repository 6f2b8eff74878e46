#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "aerq/aerq.hpp"
#include "aerq/rankscores.hpp"
#include "aerq/rq.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using aerq::Index;
using aerq::Vector;
using testdata::vec;

namespace {

double constraint_gap(const aerq::Dataset& data, const aerq::RankScoreSolution& s) {
    const Vector lhs = data.design().transpose() * s.scores;
    const Vector rhs = (1.0 - s.alpha) * data.design_sum();
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("rank scores at the boundary levels") {
    const auto data = testdata::fixture();
    auto zero = aerq::solve_rank_scores(data, 0.0);
    CHECK(zero.scores == Vector::Ones(3));
    CHECK(zero.dual_objective == 6.0);
    auto one = aerq::solve_rank_scores(data, 1.0);
    CHECK(one.scores == Vector::Zero(3));
    CHECK(one.dual_objective == 0.0);
    CHECK_THROWS_AS(aerq::solve_rank_scores(data, -0.1), aerq::InputError);
    CHECK_THROWS_AS(aerq::solve_rank_scores(data, 1.1), aerq::InputError);
}

TEST_CASE("rank scores of the fixture at 0.9") {
    const auto data = testdata::fixture();
    auto s = aerq::solve_rank_scores(data, 0.9);
    CHECK(s.scores(0) == doctest::Approx(0.0));
    CHECK(s.scores(1) == doctest::Approx(0.25));
    CHECK(s.scores(2) == doctest::Approx(0.05));
    CHECK(s.coefficients(0) == doctest::Approx(3.5));
    CHECK(s.coefficients(1) == doctest::Approx(-0.5));
    CHECK(constraint_gap(data, s) <= 1e-12);
}

TEST_CASE("Hajek scores") {
    const std::vector<int> r{3, 1, 4, 2};
    auto a = aerq::hajek_scores(r, 0.6);
    CHECK(a(0) == doctest::Approx(0.6));
    CHECK(a(1) == 0.0);
    CHECK(a(2) == 1.0);
    CHECK(a(3) == 0.0);
    CHECK(aerq::hajek_scores(r, 0.0) == Vector::Ones(4));
    CHECK(aerq::hajek_scores(r, 1.0) == Vector::Zero(4));
    CHECK(aerq::hajek_scores(std::vector<int>{1}, 0.5)(0) == doctest::Approx(0.5));
    const std::vector<int> bad{1, 1, 2};
    CHECK_THROWS_AS(aerq::hajek_scores(bad, 0.5), aerq::InputError);
    const std::vector<int> out_of_range{0, 1, 2};
    CHECK_THROWS_AS(aerq::hajek_scores(out_of_range, 0.5), aerq::InputError);
}

TEST_CASE("ranks_of breaks ties by index") {
    auto r = aerq::ranks_of(vec({2, 1, 2, 0}));
    CHECK(r == std::vector<int>{3, 2, 4, 1});
}

TEST_CASE("location rank scores coincide with Hajek scores") {
    SUBCASE("worked example") {
        const auto data = testdata::location(vec({1, 3, 2}));
        auto s = aerq::solve_rank_scores(data, 0.6);
        CHECK(std::abs(s.scores(0) - 0.0) <= 1e-12);
        CHECK(std::abs(s.scores(1) - 1.0) <= 1e-12);
        CHECK(std::abs(s.scores(2) - 0.2) <= 1e-12);
    }
    SUBCASE("random permutations") {
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 30; ++trial) {
            const int n = 3 + trial % 10;
            std::vector<double> vals(static_cast<std::size_t>(n));
            std::iota(vals.begin(), vals.end(), 1.0);
            std::shuffle(vals.begin(), vals.end(), rng);
            Vector y = Eigen::Map<Vector>(vals.data(), n);
            const auto data = testdata::location(y);
            const auto ranks = aerq::ranks_of(y);
            for (double alpha : {0.05, 0.3, 0.5, 0.71, 0.95}) {
                const auto s = aerq::solve_rank_scores(data, alpha);
                for (int i = 0; i < n; ++i) {
                    CHECK(std::abs(s.scores(i) - oracle::hajek(ranks[static_cast<std::size_t>(i)], n, alpha)) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("score derivative at one") {
    SUBCASE("fixture") {
        const auto data = testdata::fixture();
        const std::vector<Index> base{1, 2};
        auto d = aerq::derivative_at_one(data, base);
        CHECK(d.derivative(0) == 0.0);
        CHECK(d.derivative(1) == doctest::Approx(-2.5));
        CHECK(d.derivative(2) == doctest::Approx(-0.5));
        CHECK(aerq::derivative_identity_gap(data, d) <= 1e-12);
        CHECK(aerq::averaged_extreme_from_derivative(data, d) == doctest::Approx(17.0 / 6.0).epsilon(1e-14));
    }
    SUBCASE("location") {
        const auto data = testdata::location(vec({1, 3, 2}));
        const std::vector<Index> base{1};
        auto d = aerq::derivative_at_one(data, base);
        CHECK(d.derivative == vec({0, -3, 0}));
        CHECK(aerq::averaged_extreme_from_derivative(data, d) == 3.0);
    }
    SUBCASE("singular base") {
        auto data = aerq::validate_dataset(vec({1, 2, 1, 0}), testdata::column({0, 1, 0, 0.5}));
        const std::vector<Index> base{0, 2};
        CHECK_THROWS_AS(aerq::derivative_at_one(data, base), aerq::SingularMatrixError);
    }
}

TEST_CASE("finite-difference score route") {
    SUBCASE("fixture at one") {
        const auto data = testdata::fixture();
        const std::vector<double> grid{1.0};
        auto pts = aerq::averaged_rq_via_scores(data, grid);
        REQUIRE(pts.size() == 1);
        CHECK(pts[0].linear);
        CHECK(std::abs(pts[0].value - 17.0 / 6.0) <= 1e-8);
    }
    SUBCASE("location segments give order statistics") {
        const auto data = testdata::location(vec({1, 3, 2}));
        const std::vector<double> grid{0.5, 0.9, 0.1};
        auto pts = aerq::averaged_rq_via_scores(data, grid);
        CHECK(pts[0].value == doctest::Approx(2.0));
        CHECK(pts[1].value == doctest::Approx(3.0));
        CHECK(pts[2].value == doctest::Approx(1.0));
    }
    SUBCASE("breakpoint is flagged") {
        const auto data = testdata::location(vec({1, 3, 2}));
        const std::vector<double> grid{1.0 / 3.0};
        CHECK_FALSE(aerq::averaged_rq_via_scores(data, grid)[0].linear);
    }
}

TEST_CASE("rank score properties on random instances") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const Index p = 1 + trial % 3;
        const auto data = testdata::random_dataset(rng, 10 + trial, p);
        const auto ext = aerq::fit_extreme_rq(data);
        REQUIRE_FALSE(ext.fit.degenerate);

        const auto d = aerq::derivative_at_one(data, ext.base);
        CHECK(aerq::derivative_identity_gap(data, d) <= 1e-9);
        CHECK(std::abs(aerq::averaged_extreme_from_derivative(data, d) -
                       aerq::averaged_rq(ext.fit, data)) <= 1e-9);

        Vector gamma(p + 1);
        for (Index j = 0; j <= p; ++j) gamma(j) = g(rng);
        const auto shifted = aerq::validate_dataset(data.y() + data.design() * gamma, data.x());

        for (double alpha : {0.2, 0.5, 0.8}) {
            const auto s = aerq::solve_rank_scores(data, alpha);
            CHECK(constraint_gap(data, s) <= 1e-9 * (1.0 + data.design_sum().cwiseAbs().maxCoeff()));
            CHECK(s.scores.minCoeff() >= 0.0);
            CHECK(s.scores.maxCoeff() <= 1.0);

            const auto fit = aerq::fit_rq(data, alpha);
            CHECK(aerq::complementary_slackness_gap(data, s, fit.coefficients()) <= 1e-9);

            // Invariance under y -> y + X* gamma, up to possible non-uniqueness.
            const auto s2 = aerq::solve_rank_scores(shifted, alpha);
            if (!s.degenerate && !s2.degenerate) {
                CHECK((s.scores - s2.scores).cwiseAbs().maxCoeff() <= 1e-9);
            }
        }

        // Scores are nonincreasing on the last segment before one.
        const Vector w = aerq::aerq_via_weights(data, ext.base).weights.weights;
        const double start = 1.0 - 1.0 / (static_cast<double>(data.n()) * w.maxCoeff());
        Vector prev = aerq::solve_rank_scores(data, start + 1e-9).scores;
        for (int k = 1; k <= 5; ++k) {
            const double alpha = start + (1.0 - start) * k / 6.0;
            const Vector cur = aerq::solve_rank_scores(data, alpha).scores;
            CHECK((cur - prev).maxCoeff() <= 1e-9);
            prev = cur;
        }
    }
}
