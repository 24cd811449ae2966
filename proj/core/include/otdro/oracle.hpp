#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "otdro/geometry.hpp"

namespace otdro {

// Discrete adversary: sample i with weight w_i may send mass m_ik >= 0 to
// node k (sum_k m_ik = w_i) at cost c_ik, total cost <= epsilon, to minimize
// sum_ik m_ik * payoff_k. Every sample needs at least one zero-cost node.
struct DiscreteAdversary {
    std::vector<double> weights;              // w_i
    std::vector<std::vector<double>> costs;   // costs[i][k]
    std::vector<double> payoffs;              // payoff_k
};

struct MassAssignment {
    std::size_t sample = 0;
    std::size_t node = 0;
    double mass = 0.0;
};

struct AdversaryResult {
    double value = 0.0;
    double budget_used = 0.0;
    std::vector<MassAssignment> transport;  // nonzero masses
};

// Exact: each sample's cost/payoff frontier is the lower convex hull of its
// (cost, payoff) points, and the budget is spent greedily on the steepest
// hull segments across samples.
AdversaryResult solve_discrete_adversary(const DiscreteAdversary& problem, double epsilon);

struct OracleGrid {
    std::size_t resolution = 2;       // evenly spaced nodes per box interval, >= 2
    std::size_t node_cap = 200'000;
};

// Grid axes: per coordinate, `resolution` evenly spaced points over the box
// interval plus every sample coordinate; a degenerate interval is one point.
std::array<std::vector<double>, 6> oracle_axes(std::span<const LiftedPoint> samples, const PolyhedralSupport& support,
                                               std::size_t resolution);

struct OracleResult {
    double value = 0.0;  // minimum expected profit over the gridded ambiguity set
    std::size_t nodes = 0;
    double budget_used = 0.0;
};

// Worst-case expected profit at nomination n over distributions supported on
// the grid within l1 transport budget epsilon of the weighted samples.
OracleResult worst_case_oracle(std::span<const LiftedPoint> samples, std::span<const double> weights,
                               const PolyhedralSupport& support, double n, double epsilon, const OracleGrid& grid = {});

}  // namespace otdro
