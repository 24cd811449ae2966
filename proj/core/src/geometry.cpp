#include "otdro/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "otdro/error.hpp"
#include "otdro/text.hpp"

namespace otdro {

bool Box4::contains(const std::array<double, 4>& x) const {
    for (std::size_t k = 0; k < 4; ++k)
        if (x[k] < lower[k] || x[k] > upper[k]) return false;
    return true;
}

PolyhedralSupport PolyhedralSupport::from_bounds(const std::array<double, 6>& lower,
                                                 const std::array<double, 6>& upper) {
    PolyhedralSupport s;
    for (std::size_t k = 0; k < 6; ++k) {
        if (!(lower[k] <= upper[k])) throw DataError("support: lower bound exceeds upper bound");
        s.C[k][k] = 1.0;
        s.d[k] = upper[k];
        s.C[6 + k][k] = -1.0;
        s.d[6 + k] = -lower[k];
    }
    return s;
}

bool PolyhedralSupport::contains(const LiftedPoint& xi, double tol) const {
    for (std::size_t r = 0; r < 12; ++r) {
        double lhs = 0.0;
        for (std::size_t k = 0; k < 6; ++k) lhs += C[r][k] * xi[k];
        if (lhs > d[r] + tol) return false;
    }
    return true;
}

std::vector<LiftedPoint> PolyhedralSupport::vertices() const {
    std::vector<LiftedPoint> out;
    out.reserve(64);
    for (unsigned mask = 0; mask < 64; ++mask) {
        LiftedPoint v{};
        for (std::size_t k = 0; k < 6; ++k) v[k] = (mask >> k) & 1U ? upper(k) : lower(k);
        out.push_back(v);
    }
    return out;
}

std::pair<double, double> widen_range(double lo, double hi, double margin) {
    if (!(margin >= 0.0)) throw DataError("support margin must be nonnegative");
    return {lo - margin * std::abs(lo), hi + margin * std::abs(hi)};
}

Box4 build_support_x(std::span<const MarketRecord> train, double margin) {
    if (train.empty()) throw DataError("build_support_x: empty training set");
    std::array<double, 4> lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& r : train) {
        const auto x = r.as_vector();
        for (std::size_t k = 0; k < 4; ++k) {
            lo[k] = std::min(lo[k], x[k]);
            hi[k] = std::max(hi[k], x[k]);
        }
    }
    Box4 box;
    for (std::size_t k = 0; k < 4; ++k) std::tie(box.lower[k], box.upper[k]) = widen_range(lo[k], hi[k], margin);
    return box;
}

LiftedPoint lift(const std::array<double, 4>& x) {
    return {x[kG], x[kS], x[kRMinus], x[kRPlus], x[kG] * x[kRMinus], x[kG] * x[kRPlus]};
}

PolyhedralSupport build_support_xi(std::span<const MarketRecord> train, double margin) {
    if (train.empty()) throw DataError("build_support_xi: empty training set");
    std::array<double, 6> lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& r : train) {
        const LiftedPoint xi = lift(r);
        for (std::size_t k = 0; k < 6; ++k) {
            lo[k] = std::min(lo[k], xi[k]);
            hi[k] = std::max(hi[k], xi[k]);
        }
    }
    std::array<double, 6> lower, upper;
    for (std::size_t k = 0; k < 6; ++k) std::tie(lower[k], upper[k]) = widen_range(lo[k], hi[k], margin);
    return PolyhedralSupport::from_bounds(lower, upper);
}

void TransportCost::require_solver_support() const {
    if (p != 1.0 || norm != Norm::l1) {
        throw DataError("transport cost with exponent p = " + format_number(p) +
                        " is not supported by the solver (only p = 1 with the l1 norm)");
    }
}

double transport_cost(const LiftedPoint& a, const LiftedPoint& b, const TransportCost& cost) {
    double sum = 0.0;
    for (std::size_t k = 0; k < 6; ++k) sum += std::abs(a[k] - b[k]);
    return cost.p == 1.0 ? sum : std::pow(sum, cost.p);
}

double max_mass_at_deviation(double epsilon, double q, double p) {
    if (!(q > 0.0)) throw DataError("max_mass_at_deviation: deviation must be positive");
    if (!(epsilon >= 0.0)) throw DataError("max_mass_at_deviation: epsilon must be nonnegative");
    if (!(p >= 1.0)) throw DataError("max_mass_at_deviation: exponent must be >= 1");
    return std::min(1.0, epsilon * std::pow(q, -p));
}

std::string to_json(const PolyhedralSupport& support) {
    nlohmann::ordered_json j;
    j["rows"] = 12;
    j["cols"] = 6;
    auto& c = j["C"] = nlohmann::ordered_json::array();
    for (const auto& row : support.C)
        for (double v : row) c.push_back(v);
    j["d"] = support.d;
    return j.dump(2) + "\n";
}

}  // namespace otdro
