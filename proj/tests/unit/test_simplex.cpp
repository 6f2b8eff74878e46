#include "doctest.h"

#include <random>

#include "aerq/simplex.hpp"
#include "oracles.hpp"

using aerq::Direction;
using aerq::LpProblem;
using aerq::LpStatus;
using aerq::Matrix;
using aerq::Sense;
using aerq::Vector;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<aerq::Index>(v.size()));
    aerq::Index i = 0;
    for (double e : v) out(i++) = e;
    return out;
}

// minimize 3 b0 + 4 b1  s.t.  b0 >= 1, b0 + b1 >= 3, b0 + 3 b1 >= 2.
LpProblem three_row_lp() {
    auto lp = LpProblem::with_free_vars(2);
    lp.objective = vec({3, 4});
    lp.add_row(vec({1, 0}), Sense::GreaterEqual, 1);
    lp.add_row(vec({1, 1}), Sense::GreaterEqual, 3);
    lp.add_row(vec({1, 3}), Sense::GreaterEqual, 2);
    return lp;
}

} // namespace

TEST_CASE("single variable between two rows") {
    auto lp = LpProblem::with_free_vars(1);
    lp.objective = vec({1});
    lp.add_row(vec({1}), Sense::GreaterEqual, 2);
    lp.add_row(vec({1}), Sense::LessEqual, 10);
    auto sol = aerq::solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x(0) == doctest::Approx(2.0));
    CHECK(sol.objective == doctest::Approx(2.0));
    CHECK(aerq::certify_solution(lp, sol).passed);
}

TEST_CASE("three-row LP reaches the enumerated vertex") {
    const auto lp = three_row_lp();
    auto sol = aerq::solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x(0) == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(sol.x(1) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(sol.objective == doctest::Approx(8.5).epsilon(1e-14));
    // Multipliers of the two binding rows solve y2 + y3 = 3, y2 + 3 y3 = 4.
    CHECK(std::abs(sol.duals(0)) <= 1e-12);
    CHECK(sol.duals(1) == doctest::Approx(2.5));
    CHECK(sol.duals(2) == doctest::Approx(0.5));
    CHECK_FALSE(sol.degenerate);

    auto cert = aerq::certify_solution(lp, sol);
    CHECK(cert.passed);
    CHECK(cert.duality_gap <= 1e-10);
    CHECK(cert.dual_objective == doctest::Approx(8.5));

    const auto oracle = oracle::vertex_enumeration_min({3, 4}, {{1, 0}, {1, 1}, {1, 3}}, {1, 3, 2});
    REQUIRE(oracle);
    CHECK(std::abs(*oracle - sol.objective) <= 1e-12);
}

TEST_CASE("certificate rejects a feasible but suboptimal point") {
    const auto lp = three_row_lp();
    auto sol = aerq::solve_lp(lp);
    sol.x = vec({3.6, -0.5});
    sol.objective = lp.objective.dot(sol.x);
    auto cert = aerq::certify_solution(lp, sol);
    CHECK_FALSE(cert.passed);
    CHECK(cert.primal_infeasibility == 0.0);
    CHECK(cert.duality_gap > 0.1);
    CHECK(cert.complementarity > 0.1);
}

TEST_CASE("empty constraint set with a bounded variable") {
    auto lp = LpProblem::with_free_vars(1);
    lp.objective = vec({1});
    lp.lower = vec({2});
    lp.upper = vec({10});
    auto sol = aerq::solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x(0) == 2.0);
    CHECK(aerq::certify_solution(lp, sol).passed);
}

TEST_CASE("unbounded and infeasible statuses") {
    SUBCASE("maximize x with x >= 0") {
        auto lp = LpProblem::with_free_vars(1, Direction::Maximize);
        lp.objective = vec({1});
        lp.add_row(vec({1}), Sense::GreaterEqual, 0);
        CHECK(aerq::solve_lp(lp).status == LpStatus::Unbounded);
    }
    SUBCASE("x >= 3 and x <= 1") {
        auto lp = LpProblem::with_free_vars(1);
        lp.objective = vec({1});
        lp.add_row(vec({1}), Sense::GreaterEqual, 3);
        lp.add_row(vec({1}), Sense::LessEqual, 1);
        auto sol = aerq::solve_lp(lp);
        CHECK(sol.status == LpStatus::Infeasible);
        CHECK_FALSE(aerq::certify_solution(lp, sol).passed);
    }
}

TEST_CASE("invalid problems are rejected") {
    auto lp = LpProblem::with_free_vars(2);
    lp.lower = vec({1, 0});
    lp.upper = vec({0, 1});
    CHECK_THROWS_AS(aerq::solve_lp(lp), aerq::InputError);
    auto lp2 = LpProblem::with_free_vars(2);
    lp2.rhs = vec({1});
    CHECK_THROWS_AS(aerq::solve_lp(lp2), aerq::InputError);
}

TEST_CASE("boxed maximisation with an equality row picks the top responses") {
    // max y'a  s.t.  sum a = 2.5, 0 <= a <= 1.
    const Vector y = vec({0.3, 2.0, -1.0, 1.5, 0.7});
    auto lp = LpProblem::with_free_vars(5, Direction::Maximize);
    lp.objective = y;
    lp.lower = Vector::Zero(5);
    lp.upper = Vector::Ones(5);
    lp.add_row(Vector::Ones(5), Sense::Equal, 2.5);
    auto sol = aerq::solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x(1) == doctest::Approx(1.0));
    CHECK(sol.x(3) == doctest::Approx(1.0));
    CHECK(sol.x(4) == doctest::Approx(0.5));
    CHECK(sol.objective == doctest::Approx(2.0 + 1.5 + 0.35));
    auto cert = aerq::certify_solution(lp, sol);
    CHECK(cert.passed);
    CHECK(cert.dual_objective == doctest::Approx(sol.objective));
}

TEST_CASE("degenerate cycling example terminates under the anti-cycling switch") {
    // Classic example on which the textbook Dantzig rule cycles.
    auto lp = LpProblem::with_free_vars(4);
    lp.objective = vec({-0.75, 20, -0.5, 6});
    lp.lower = Vector::Zero(4);
    lp.add_row(vec({0.25, -8, -1, 9}), Sense::LessEqual, 0);
    lp.add_row(vec({0.5, -12, -0.5, 3}), Sense::LessEqual, 0);
    lp.add_row(vec({0, 0, 1, 0}), Sense::LessEqual, 1);
    for (int streak : {0, 1, 10}) {
        aerq::SimplexOptions opt;
        opt.degenerate_streak = streak;
        auto sol = aerq::solve_lp(lp, opt);
        REQUIRE(sol.status == LpStatus::Optimal);
        CHECK(sol.objective == doctest::Approx(-1.25));
        CHECK(aerq::certify_solution(lp, sol).passed);
    }
}

TEST_CASE("iteration limit raises") {
    const auto lp = three_row_lp();
    aerq::SimplexOptions opt;
    opt.max_iterations = 1;
    // The floor of 50 iterations keeps tiny problems solvable; build a larger one.
    auto big = LpProblem::with_free_vars(3);
    big.objective = vec({1, 1, 1});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        Vector a = vec({u(rng), u(rng), u(rng)});
        a(0) = 1.0;
        big.add_row(a, Sense::GreaterEqual, u(rng) + 5.0);
    }
    opt.max_iterations = 1;
    CHECK_NOTHROW(aerq::solve_lp(lp, opt));
    auto sol = aerq::solve_lp(big);
    REQUIRE(sol.iterations > 50);
    CHECK_THROWS_AS(aerq::solve_lp(big, opt), aerq::IterationLimitError);
}

TEST_CASE("identical input gives bit-identical output") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g;
    auto lp = LpProblem::with_free_vars(3);
    lp.objective = vec({1, 0.2, -0.3});
    for (int i = 0; i < 15; ++i) {
        Vector a = vec({1, g(rng), g(rng)});
        lp.add_row(a, Sense::GreaterEqual, g(rng));
    }
    auto s1 = aerq::solve_lp(lp);
    auto s2 = aerq::solve_lp(lp);
    REQUIRE(s1.status == s2.status);
    CHECK(s1.x == s2.x);
    CHECK(s1.duals == s2.duals);
    CHECK(s1.basis == s2.basis);
    CHECK(s1.iterations == s2.iterations);
}

TEST_CASE("random LPs agree with vertex enumeration and satisfy strong duality") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int nv = 1 + trial % 4;
        const int extra = static_cast<int>(rng() % static_cast<unsigned>(12 - 2 * nv + 1));
        oracle::Row c(nv);
        for (auto& e : c) e = u(rng);
        oracle::Row x0(nv);
        for (auto& e : x0) e = 3.0 * u(rng);
        oracle::Dense rows;
        oracle::Row rhs;
        for (int j = 0; j < nv; ++j) {
            oracle::Row lo(nv, 0.0), hi(nv, 0.0);
            lo[j] = 1.0;
            hi[j] = -1.0;
            rows.push_back(lo);
            rhs.push_back(-10.0);
            rows.push_back(hi);
            rhs.push_back(-10.0);
        }
        for (int k = 0; k < extra; ++k) {
            oracle::Row a(nv);
            double act = 0.0;
            for (int j = 0; j < nv; ++j) {
                a[j] = u(rng);
                act += a[j] * x0[j];
            }
            rows.push_back(a);
            rhs.push_back(act - std::abs(u(rng)));
        }
        auto lp = LpProblem::with_free_vars(nv);
        for (int j = 0; j < nv; ++j) lp.objective(j) = c[j];
        for (std::size_t i = 0; i < rows.size(); ++i) {
            Vector a(nv);
            for (int j = 0; j < nv; ++j) a(j) = rows[i][j];
            lp.add_row(a, Sense::GreaterEqual, rhs[i]);
        }
        auto sol = aerq::solve_lp(lp);
        REQUIRE(sol.status == LpStatus::Optimal);
        const auto expected = oracle::vertex_enumeration_min(c, rows, rhs);
        REQUIRE(expected);
        CHECK(std::abs(sol.objective - *expected) <= 1e-9);
        auto cert = aerq::certify_solution(lp, sol);
        CHECK(cert.passed);
        CHECK(std::abs(cert.dual_objective - sol.objective) <= 1e-9);
        ++checked;
    }
    CHECK(checked == 300);
}
