#include "otdro/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "otdro/dro.hpp"
#include "otdro/error.hpp"

namespace otdro {

namespace {

struct Segment {
    double slope;  // payoff change per unit cost, < 0
    double dcost;
    double dpayoff;
    std::size_t sample;
    std::size_t index;  // position along this sample's hull
};

struct Hull {
    std::vector<std::size_t> vertices;  // node ids; vertices[0] is the zero-cost start
    double base = 0.0;
};

Hull frontier(std::span<const double> cost, std::span<const double> payoff, std::size_t sample,
              std::vector<Segment>& segments) {
    std::vector<std::size_t> order(cost.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cost[a] != cost[b]) return cost[a] < cost[b];
        if (payoff[a] != payoff[b]) return payoff[a] < payoff[b];
        return a < b;
    });
    if (order.empty() || cost[order.front()] != 0.0)
        throw DataError("discrete adversary: sample " + std::to_string(sample) + " has no zero-cost node");

    // Lower convex hull (monotone chain), keeping one point per cost.
    std::vector<std::size_t> hull;
    for (std::size_t idx : order) {
        if (!hull.empty() && cost[hull.back()] == cost[idx]) continue;
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2], b = hull.back();
            const double cross = (cost[b] - cost[a]) * (payoff[idx] - payoff[a]) -
                                 (payoff[b] - payoff[a]) * (cost[idx] - cost[a]);
            if (cross <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(idx);
    }

    Hull h;
    h.base = payoff[hull.front()];
    h.vertices.push_back(hull.front());
    for (std::size_t v = 1; v < hull.size(); ++v) {
        const std::size_t a = hull[v - 1], b = hull[v];
        const double dc = cost[b] - cost[a], dp = payoff[b] - payoff[a];
        if (!(dp < 0.0)) break;
        segments.push_back({dp / dc, dc, dp, sample, v - 1});
        h.vertices.push_back(b);
    }
    return h;
}

}  // namespace

AdversaryResult solve_discrete_adversary(const DiscreteAdversary& problem, double epsilon) {
    if (!(epsilon >= 0.0)) throw DataError("discrete adversary: epsilon must be >= 0");
    const std::size_t M = problem.weights.size();
    if (problem.costs.size() != M) throw DataError("discrete adversary: cost rows do not match weights");
    std::vector<Segment> segments;
    std::vector<Hull> hulls;
    hulls.reserve(M);
    for (std::size_t i = 0; i < M; ++i) {
        if (problem.costs[i].size() != problem.payoffs.size())
            throw DataError("discrete adversary: cost row " + std::to_string(i) + " does not match the node count");
        hulls.push_back(frontier(problem.costs[i], problem.payoffs, i, segments));
    }
    std::stable_sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) {
        if (a.slope != b.slope) return a.slope < b.slope;
        if (a.sample != b.sample) return a.sample < b.sample;
        return a.index < b.index;
    });

    AdversaryResult out;
    for (std::size_t i = 0; i < M; ++i) out.value += problem.weights[i] * hulls[i].base;
    // progress[i] = (full segments taken, fraction of the next one)
    std::vector<std::pair<std::size_t, double>> progress(M, {0, 0.0});
    double budget = epsilon;
    for (const auto& s : segments) {
        const double w = problem.weights[s.sample];
        if (w <= 0.0) continue;
        const double need = w * s.dcost;
        if (need <= budget) {
            budget -= need;
            out.value += w * s.dpayoff;
            progress[s.sample].first = s.index + 1;
        } else {
            const double f = budget / need;
            out.value += f * w * s.dpayoff;
            progress[s.sample].second = f;
            budget = 0.0;
            break;
        }
    }
    out.budget_used = epsilon - budget;

    for (std::size_t i = 0; i < M; ++i) {
        const double w = problem.weights[i];
        if (w <= 0.0) continue;
        const auto [full, frac] = progress[i];
        const auto& v = hulls[i].vertices;
        if (frac > 0.0) {
            out.transport.push_back({i, v[full], (1.0 - frac) * w});
            out.transport.push_back({i, v[full + 1], frac * w});
        } else {
            out.transport.push_back({i, v[full], w});
        }
    }
    return out;
}

std::array<std::vector<double>, 6> oracle_axes(std::span<const LiftedPoint> samples, const PolyhedralSupport& support,
                                               std::size_t resolution) {
    if (resolution < 2) throw DataError("oracle grid resolution must be >= 2");
    std::array<std::vector<double>, 6> axes;
    for (std::size_t k = 0; k < 6; ++k) {
        const double lo = support.lower(k), hi = support.upper(k);
        auto& ax = axes[k];
        if (lo == hi) {
            ax.push_back(lo);
            continue;
        }
        for (std::size_t r = 0; r < resolution; ++r)
            ax.push_back(r + 1 == resolution ? hi : lo + (hi - lo) * static_cast<double>(r) / static_cast<double>(resolution - 1));
        for (const auto& xi : samples) ax.push_back(xi[k]);
        std::sort(ax.begin(), ax.end());
        ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
    }
    return axes;
}

OracleResult worst_case_oracle(std::span<const LiftedPoint> samples, std::span<const double> weights,
                               const PolyhedralSupport& support, double n, double epsilon, const OracleGrid& grid) {
    if (samples.empty() || samples.size() != weights.size())
        throw DataError("worst_case_oracle: samples and weights must be non-empty and of equal length");
    for (const auto& xi : samples)
        if (!support.contains(xi, 1e-12)) throw DataError("worst_case_oracle: sample outside the support");
    const auto axes = oracle_axes(samples, support, grid.resolution);

    double count = 1.0;
    for (const auto& ax : axes) count *= static_cast<double>(ax.size());
    if (count > static_cast<double>(grid.node_cap))
        throw DataError("worst_case_oracle: grid has " + std::to_string(static_cast<long long>(count)) +
                        " nodes, above the cap of " + std::to_string(grid.node_cap));
    const std::size_t K = static_cast<std::size_t>(count);

    std::vector<LiftedPoint> nodes(K);
    std::array<std::size_t, 6> digit{};
    for (std::size_t node = 0; node < K; ++node) {
        for (std::size_t k = 0; k < 6; ++k) nodes[node][k] = axes[k][digit[k]];
        for (std::size_t k = 6; k-- > 0;) {
            if (++digit[k] < axes[k].size()) break;
            digit[k] = 0;
        }
    }

    DiscreteAdversary adv;
    adv.weights.assign(weights.begin(), weights.end());
    adv.payoffs.resize(K);
    for (std::size_t node = 0; node < K; ++node) adv.payoffs[node] = lifted_profit(n, nodes[node]);
    adv.costs.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        adv.costs[i].resize(K);
        for (std::size_t node = 0; node < K; ++node) adv.costs[i][node] = transport_cost(samples[i], nodes[node]);
    }
    const auto res = solve_discrete_adversary(adv, epsilon);
    return {res.value, K, res.budget_used};
}

}  // namespace otdro
