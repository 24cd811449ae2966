#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "otdro/market_data.hpp"

namespace otdro {

// Coordinates of x = (g, s, r-, r+) and the lifted xi = (x, g*r-, g*r+).
enum Coord : std::size_t { kG = 0, kS = 1, kRMinus = 2, kRPlus = 3, kTMinus = 4, kTPlus = 5 };

inline constexpr double kDefaultMargin = 0.2;

using LiftedPoint = std::array<double, 6>;

struct Box4 {
    std::array<double, 4> lower{};
    std::array<double, 4> upper{};

    bool contains(const std::array<double, 4>& x) const;
};

// Xi = { xi : C xi <= d } with rows +e_k (d = upper_k) for k = 0..5 followed
// by -e_k (d = -lower_k). The relation t = g*r is deliberately not imposed.
struct PolyhedralSupport {
    std::array<std::array<double, 6>, 12> C{};
    std::array<double, 12> d{};

    static PolyhedralSupport from_bounds(const std::array<double, 6>& lower, const std::array<double, 6>& upper);

    double lower(std::size_t k) const { return -d[6 + k]; }
    double upper(std::size_t k) const { return d[k]; }
    bool contains(const LiftedPoint& xi, double tol = 0.0) const;
    std::vector<LiftedPoint> vertices() const;  // 64 corners
};

// lower = min - margin*|min|, upper = max + margin*|max|.
std::pair<double, double> widen_range(double lo, double hi, double margin);

Box4 build_support_x(std::span<const MarketRecord> train, double margin = kDefaultMargin);

LiftedPoint lift(const std::array<double, 4>& x);
inline LiftedPoint lift(const MarketRecord& r) { return lift(r.as_vector()); }

PolyhedralSupport build_support_xi(std::span<const MarketRecord> train, double margin = kDefaultMargin);

enum class Norm { l1 };

// c(a, b) = ||a - b||^p. Only p = 1 with the l1 norm is supported by the
// solvers; other exponents may be carried for reporting.
struct TransportCost {
    double p = 1.0;
    Norm norm = Norm::l1;

    void require_solver_support() const;
};

double transport_cost(const LiftedPoint& a, const LiftedPoint& b, const TransportCost& cost = {});

// Largest probability mass an OT budget epsilon can place at a deviation of
// magnitude q: min(1, epsilon * q^-p).
double max_mass_at_deviation(double epsilon, double q, double p);

std::string to_json(const PolyhedralSupport& support);

}  // namespace otdro
