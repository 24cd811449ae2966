#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace otdro {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { le, ge, eq };

struct LPColumn {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    double cost = 0.0;
};

struct LPRow {
    std::string name;
    std::vector<std::pair<std::size_t, double>> entries;  // (column, coefficient)
    RowSense sense = RowSense::le;
    double rhs = 0.0;
};

// min c'x  s.t.  rows, lower <= x <= upper.
struct LPModel {
    std::vector<LPColumn> columns;
    std::vector<LPRow> rows;

    std::size_t add_column(std::string name, double lower, double upper, double cost);
    std::size_t add_row(std::string name, std::vector<std::pair<std::size_t, double>> entries, RowSense sense,
                        double rhs);

    std::size_t num_columns() const { return columns.size(); }
    std::size_t num_rows() const { return rows.size(); }
    std::size_t num_nonzeros() const;

    double objective(std::span<const double> x) const;
    double row_activity(std::size_t row, std::span<const double> x) const;
    // Largest absolute violation of any row or variable bound.
    double max_violation(std::span<const double> x) const;
};

enum class LPStatus { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

const char* to_string(LPStatus status);

struct LPSolution {
    LPStatus status = LPStatus::numerical_failure;
    double objective = 0.0;
    std::vector<double> x;
    std::size_t iterations = 0;
    double max_violation = 0.0;
    std::string message;
};

struct SimplexOptions {
    double tol = 1e-8;                // optimality and relative feasibility tolerance
    std::size_t max_iterations = 0;   // 0 selects a size-based default
};

// Dense bounded-variable primal simplex, two phases. Deterministic: Dantzig
// pricing with a switch to Bland's rule while the objective stalls.
LPSolution solve_lp(const LPModel& model, const SimplexOptions& options = {});

// CPLEX LP text format (Minimize / Subject To / Bounds / End).
void write_lp(std::ostream& out, const LPModel& model);

}  // namespace otdro
