#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "otdro/geometry.hpp"
#include "otdro/lp.hpp"
#include "otdro/reference.hpp"

namespace otdro {

struct NominationBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// [0, upper end of the generation coordinate of the support].
NominationBounds default_bounds(const PolyhedralSupport& support);

struct NominationProblem {
    std::vector<LiftedPoint> samples;
    std::vector<double> weights;
    PolyhedralSupport support;
    double epsilon = 0.0;
    TransportCost cost;
    NominationBounds bounds;

    std::size_t size() const { return samples.size(); }
    // Throws DataError when an invariant fails.
    void check() const;
};

NominationProblem make_problem(const EmpiricalDistribution& ref, const PolyhedralSupport& support, double epsilon,
                               NominationBounds bounds, TransportCost cost = {});

// Loss pieces: pi(n, xi) = -max(a1(n).xi, a2(n).xi).
struct AffinePieces {
    std::array<double, 6> a1{};
    std::array<double, 6> a2{};
};

AffinePieces affine_pieces(double n);
double lifted_profit(double n, const LiftedPoint& xi);

// Column layout of the assembled LP.
struct LPLayout {
    std::size_t samples = 0;

    static constexpr std::size_t n_col = 0;
    static constexpr std::size_t lambda_col = 1;
    std::size_t s_col(std::size_t i) const { return 2 + i; }
    // branch j in {0, 1}, support row r in 0..11
    std::size_t gamma_col(std::size_t i, std::size_t j, std::size_t r) const { return 2 + samples + (2 * i + j) * 12 + r; }
    std::size_t num_columns() const { return 2 + 25 * samples; }
    std::size_t num_rows() const { return 26 * samples; }
};

LPModel assemble_lp(const NominationProblem& problem);

enum class Backend { structured, simplex };

const char* to_string(Backend backend);

struct SolveOptions {
    Backend backend = Backend::structured;
    SimplexOptions simplex;
    // Return the full LP point and its constraint violation.
    bool keep_point = false;
};

struct NominationSolution {
    double n_star = 0.0;
    double worst_case_profit = 0.0;  // minus the LP optimum
    double lambda = 0.0;
    LPStatus status = LPStatus::optimal;
    Backend backend = Backend::structured;
    std::size_t iterations = 0;
    std::optional<double> max_violation;
    std::vector<double> lp_point;
};

// Throws SolverError unless the LP is solved to optimality.
NominationSolution solve_nomination(const NominationProblem& problem, const SolveOptions& options = {});
NominationSolution solve_nomination(const EmpiricalDistribution& ref, const PolyhedralSupport& support, double epsilon,
                                    NominationBounds bounds, const SolveOptions& options = {});

// Worst-case expected profit at a fixed nomination (the inner dual, solved exactly).
struct InnerValue {
    double worst_case_profit = 0.0;
    double lambda = 0.0;
};
InnerValue worst_case_profit_at(const NominationProblem& problem, double n);

double expected_profit(const EmpiricalDistribution& ref, double n);

struct SaaResult {
    double n = 0.0;
    double value = 0.0;
};

// Exact maximizer of the weighted empirical profit over the kink candidates
// {g_i} and the bounds; ties go to the smallest n.
SaaResult saa_nomination(const EmpiricalDistribution& ref, NominationBounds bounds);

double mean_forecast_nomination(std::span<const double> ensemble, NominationBounds bounds);

}  // namespace otdro
