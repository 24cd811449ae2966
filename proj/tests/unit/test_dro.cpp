#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "otdro/dro.hpp"
#include "otdro/error.hpp"
#include "otdro/settlement.hpp"

using namespace otdro;
using otdro::testing::distribution;
using otdro::testing::random_distribution;
using otdro::testing::support_for;

namespace {

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double vertex_minimum(const PolyhedralSupport& support, double n) {
    double best = kInf;
    for (const auto& v : support.vertices()) best = std::min(best, lifted_profit(n, v));
    return best;
}

double max_vertex_distance(const NominationProblem& p) {
    double far = 0.0;
    for (const auto& xi : p.samples)
        for (const auto& v : p.support.vertices()) far = std::max(far, transport_cost(xi, v));
    return far;
}

SolveOptions simplex_options() {
    SolveOptions o;
    o.backend = Backend::simplex;
    o.keep_point = true;
    return o;
}

}  // namespace

TEST(AssembleLp, Counts) {
    std::mt19937_64 rng(1);
    for (std::size_t m : {1u, 3u}) {
        const auto ref = random_distribution(rng, m);
        const auto sup = support_for(ref);
        const auto lp = assemble_lp(make_problem(ref, sup, 0.5, default_bounds(sup)));
        EXPECT_EQ(lp.num_columns(), 2 + 25 * m);
        EXPECT_EQ(lp.num_rows(), 26 * m);
        EXPECT_EQ(LPLayout{m}.num_columns(), lp.num_columns());
        EXPECT_EQ(LPLayout{m}.num_rows(), lp.num_rows());
    }
    EXPECT_EQ(LPLayout{3}.num_columns(), 77u);
    EXPECT_EQ(LPLayout{3}.num_rows(), 78u);
    EXPECT_EQ(LPLayout{1}.num_columns(), 27u);
    EXPECT_EQ(LPLayout{1}.num_rows(), 26u);
}

TEST(AssembleLp, Objective) {
    std::mt19937_64 rng(2);
    const auto ref = random_distribution(rng, 3);
    const auto sup = support_for(ref);
    const auto zero = assemble_lp(make_problem(ref, sup, 0.0, default_bounds(sup)));
    EXPECT_EQ(zero.columns[LPLayout::lambda_col].cost, 0.0);
    EXPECT_EQ(zero.columns[LPLayout::n_col].cost, 0.0);
    const LPLayout layout{3};
    for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(zero.columns[layout.s_col(i)].cost, ref.weights[i]);
    const auto lp = assemble_lp(make_problem(ref, sup, 1.25, default_bounds(sup)));
    EXPECT_EQ(lp.columns[LPLayout::lambda_col].cost, 1.25);
    EXPECT_EQ(lp.columns[LPLayout::lambda_col].lower, 0.0);
    EXPECT_EQ(lp.columns[LPLayout::n_col].upper, sup.upper(kG));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t r = 0; r < 12; ++r) EXPECT_EQ(lp.columns[layout.gamma_col(i, j, r)].lower, 0.0);
}

TEST(AssembleLp, Errors) {
    const auto ref = distribution({{10, 30, 20, 50}}, {1.0});
    const auto sup = support_for(ref);
    EXPECT_THROW(assemble_lp(make_problem(ref, sup, -1.0, {0, 20})), DataError);
    EXPECT_THROW(assemble_lp(make_problem(ref, sup, 1.0, {0, 20}, TransportCost{2.0})), DataError);
    EXPECT_THROW(make_problem(ref, sup, 1.0, {5, 1}).check(), DataError);
    const auto outside = distribution({{100, 30, 20, 50}}, {1.0});
    EXPECT_THROW(make_problem(outside, sup, 1.0, {0, 20}).check(), DataError);
    const auto unnormalized = distribution({{10, 30, 20, 50}}, {0.5});
    EXPECT_THROW(make_problem(unnormalized, sup, 1.0, {0, 20}).check(), DataError);
}

TEST(AffinePieces, Vectors) {
    const auto a = affine_pieces(3.0);
    EXPECT_EQ(a.a1, (std::array<double, 6>{0, -3, 0, 3, 0, -1}));
    EXPECT_EQ(a.a2, (std::array<double, 6>{0, -3, 3, 0, -1, 0}));
}

TEST(AffinePieces, LiftedProfitMatchesSettlement) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> g(0, 100), s(-50, 200), r(-1000, 3000), n(-10, 120);
    for (int k = 0; k < 10000; ++k) {
        double rm = r(rng), rp = r(rng);
        if (rm > rp) std::swap(rm, rp);
        const std::array<double, 4> x{g(rng), s(rng), rm, rp};
        const double nn = n(rng);
        const double expect = settle_profit(nn, x);
        ASSERT_NEAR(lifted_profit(nn, lift(x)), expect, 1e-9 * std::max(1.0, std::abs(expect)));
    }
}

TEST(SolveNomination, SingleSampleNoBudget) {
    const auto ref = distribution({{10, 30, 20, 50}}, {1.0});
    const auto sup = support_for(ref);
    for (auto backend : {Backend::structured, Backend::simplex}) {
        SolveOptions o;
        o.backend = backend;
        const auto sol = solve_nomination(ref, sup, 0.0, {0, 20}, o);
        EXPECT_NEAR(sol.n_star, 10.0, 1e-6) << to_string(backend);
        EXPECT_NEAR(sol.worst_case_profit, 300.0, 1e-6) << to_string(backend);
        EXPECT_EQ(sol.status, LPStatus::optimal);
        EXPECT_EQ(sol.backend, backend);
    }
}

TEST(SolveNomination, TwoSamplesNoBudget) {
    const auto ref = distribution({{10, 30, 20, 50}, {20, 30, 20, 50}}, {0.5, 0.5});
    const auto sup = support_for(ref);
    for (auto backend : {Backend::structured, Backend::simplex}) {
        SolveOptions o;
        o.backend = backend;
        const auto sol = solve_nomination(ref, sup, 0.0, {0, 30}, o);
        EXPECT_NEAR(sol.n_star, 10.0, 1e-6);
        EXPECT_NEAR(sol.worst_case_profit, 400.0, 1e-6);
    }
    EXPECT_NEAR(expected_profit(ref, 20.0), 350.0, 1e-12);
}

TEST(SolveNomination, MatchesSaaAtZeroBudget) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ref = random_distribution(rng, 1 + trial % 10);
        const auto sup = support_for(ref);
        const auto bounds = default_bounds(sup);
        const auto saa = saa_nomination(ref, bounds);
        const auto sol = solve_nomination(ref, sup, 0.0, bounds);
        ASSERT_LE(rel_gap(sol.worst_case_profit, saa.value), 1e-6) << "trial " << trial;
        // The returned nomination attains the SAA value.
        ASSERT_LE(rel_gap(expected_profit(ref, sol.n_star), saa.value), 1e-6) << "trial " << trial;
    }
}

TEST(SolveNomination, BackendsAgree) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const auto ref = random_distribution(rng, 1 + trial % 6);
        const auto sup = support_for(ref);
        const double eps = 0.25 * (trial % 9);
        const auto problem = make_problem(ref, sup, eps, default_bounds(sup));
        SolveOptions fast;
        fast.keep_point = true;
        const auto a = solve_nomination(problem, fast);
        const auto b = solve_nomination(problem, simplex_options());
        EXPECT_LE(rel_gap(a.worst_case_profit, b.worst_case_profit), 1e-7) << "trial " << trial;
        ASSERT_TRUE(a.max_violation && b.max_violation);
        EXPECT_LE(*a.max_violation, 1e-6);
        EXPECT_LE(*b.max_violation, 1e-6);
        EXPECT_EQ(a.lp_point.size(), LPLayout{ref.size()}.num_columns());
        // The structured point is an LP point with the reported objective.
        const auto lp = assemble_lp(problem);
        EXPECT_LE(rel_gap(-lp.objective(a.lp_point), a.worst_case_profit), 1e-9);
        EXPECT_LE(rel_gap(-lp.objective(b.lp_point), b.worst_case_profit), 1e-7);
    }
}

TEST(SolveNomination, InnerValueAtOptimum) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 40; ++trial) {
        const auto ref = random_distribution(rng, 1 + trial % 8);
        const auto sup = support_for(ref);
        const auto problem = make_problem(ref, sup, 0.5 + trial % 3, default_bounds(sup));
        const auto sol = solve_nomination(problem);
        EXPECT_NEAR(worst_case_profit_at(problem, sol.n_star).worst_case_profit, sol.worst_case_profit,
                    1e-9 * std::max(1.0, std::abs(sol.worst_case_profit)));
        // No other nomination on a fine grid does better.
        const auto b = problem.bounds;
        for (int k = 0; k <= 200; ++k) {
            const double n = b.lower + (b.upper - b.lower) * k / 200.0;
            ASSERT_LE(worst_case_profit_at(problem, n).worst_case_profit,
                      sol.worst_case_profit + 1e-7 * std::max(1.0, std::abs(sol.worst_case_profit)));
        }
    }
}

TEST(SolveNomination, BoundsAndEmpiricalCeiling) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 50; ++trial) {
        const auto ref = random_distribution(rng, 1 + trial % 7);
        const auto sup = support_for(ref);
        const auto bounds = default_bounds(sup);
        const auto sol = solve_nomination(ref, sup, 0.1 * trial, bounds);
        EXPECT_GE(sol.n_star, bounds.lower);
        EXPECT_LE(sol.n_star, bounds.upper);
        EXPECT_GE(sol.lambda, 0.0);
        EXPECT_LE(sol.worst_case_profit, expected_profit(ref, sol.n_star) + 1e-6);
    }
}

TEST(SolveNomination, MonotoneInBudget) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ref = random_distribution(rng, 2 + trial % 5);
        const auto sup = support_for(ref);
        double prev = kInf;
        for (int k = 0; k <= 8; ++k) {
            const double v = solve_nomination(ref, sup, 0.25 * k, default_bounds(sup)).worst_case_profit;
            ASSERT_LE(v, prev + 1e-8) << "trial " << trial << " eps " << 0.25 * k;
            prev = v;
        }
    }
}

TEST(SolveNomination, RobustLimit) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const auto ref = random_distribution(rng, 1 + trial % 4);
        const auto sup = support_for(ref);
        const auto probe = make_problem(ref, sup, 0.0, default_bounds(sup));
        const double eps = max_vertex_distance(probe);
        for (auto backend : {Backend::structured, Backend::simplex}) {
            SolveOptions o;
            o.backend = backend;
            const auto sol = solve_nomination(ref, sup, eps, default_bounds(sup), o);
            const double box_min = vertex_minimum(sup, sol.n_star);
            EXPECT_LE(rel_gap(sol.worst_case_profit, box_min), 1e-6) << to_string(backend);
        }
    }
}

TEST(SolveNomination, StructuredNeedsBox) {
    const auto ref = distribution({{10, 30, 20, 50}}, {1.0});
    auto sup = support_for(ref);
    sup.C[0][kS] = 0.5;  // no longer an axis-aligned box
    sup.d[0] += 0.5 * 40.0;
    EXPECT_THROW(solve_nomination(ref, sup, 1.0, {0, 20}), SolverError);
    EXPECT_NO_THROW(solve_nomination(ref, sup, 1.0, {0, 20}, simplex_options()));
}

TEST(SolveNomination, Deterministic) {
    std::mt19937_64 rng(14);
    const auto ref = random_distribution(rng, 6);
    const auto sup = support_for(ref);
    const auto a = solve_nomination(ref, sup, 1.0, default_bounds(sup));
    const auto b = solve_nomination(ref, sup, 1.0, default_bounds(sup));
    EXPECT_EQ(a.n_star, b.n_star);
    EXPECT_EQ(a.worst_case_profit, b.worst_case_profit);
}

TEST(Saa, Examples) {
    const auto one = distribution({{10, 30, 20, 50}}, {1.0});
    EXPECT_EQ(saa_nomination(one, {0, 20}).n, 10.0);
    EXPECT_EQ(saa_nomination(one, {0, 5}).n, 5.0);
    EXPECT_EQ(saa_nomination(one, {12, 20}).n, 12.0);
    const auto two = distribution({{10, 30, 20, 50}, {20, 30, 20, 50}}, {0.5, 0.5});
    const auto r = saa_nomination(two, {0, 30});
    EXPECT_EQ(r.n, 10.0);
    EXPECT_DOUBLE_EQ(r.value, 400.0);
    const auto same = distribution({{7, 30, 20, 50}, {7, 40, 10, 60}}, {0.5, 0.5});
    EXPECT_EQ(saa_nomination(same, {0, 5}).n, 5.0);
    EXPECT_THROW(saa_nomination(EmpiricalDistribution{}, {0, 5}), DataError);
}

TEST(Saa, TiesGoToSmallestNomination) {
    // r- = s = r+ makes profit flat in n.
    const auto flat = distribution({{10, 30, 30, 30}}, {1.0});
    EXPECT_EQ(saa_nomination(flat, {2, 20}).n, 2.0);
}

TEST(MeanForecast, Examples) {
    EXPECT_EQ(mean_forecast_nomination(std::vector<double>{8, 10, 12}, {0, 100}), 10.0);
    EXPECT_EQ(mean_forecast_nomination(std::vector<double>{5}, {0, 100}), 5.0);
    EXPECT_EQ(mean_forecast_nomination(std::vector<double>{20, 30}, {0, 20}), 20.0);
    EXPECT_EQ(mean_forecast_nomination(std::vector<double>{-3}, {0, 20}), 0.0);
    EXPECT_THROW(mean_forecast_nomination(std::vector<double>{}, {0, 20}), DataError);
}

TEST(Backend, Names) {
    EXPECT_STREQ(to_string(Backend::structured), "structured");
    EXPECT_STREQ(to_string(Backend::simplex), "simplex");
}
