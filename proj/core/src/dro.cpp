#include "otdro/dro.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "otdro/error.hpp"
#include "otdro/settlement.hpp"
#include "otdro/text.hpp"

namespace otdro {

namespace {

// e_j and f_j with a_j(n) = n * e_j + f_j.
constexpr std::array<std::array<double, 6>, 2> kSlope{{{0, -1, 0, 1, 0, 0}, {0, -1, 1, 0, 0, 0}}};
constexpr std::array<std::array<double, 6>, 2> kOffset{{{0, 0, 0, 0, 0, -1}, {0, 0, 0, 0, -1, 0}}};

double dot(const std::array<double, 6>& a, const LiftedPoint& b) {
    double v = 0.0;
    for (std::size_t k = 0; k < 6; ++k) v += a[k] * b[k];
    return v;
}

bool is_box(const PolyhedralSupport& support) {
    for (std::size_t r = 0; r < 12; ++r)
        for (std::size_t k = 0; k < 6; ++k) {
            const double want = r < 6 ? (r == k ? 1.0 : 0.0) : (r - 6 == k ? -1.0 : 0.0);
            if (support.C[r][k] != want) return false;
        }
    return true;
}

// For fixed (n, lambda) the supremum over the box of a_j(n).xi - lambda*||xi - xi_i||_1
// separates by coordinate:
//   h_ij = a_j(n).xi_i + (|n| - lambda)_+ * P_ij + (1 - lambda)_+ * Q_ij
// where P_ij and Q_ij are the distances from xi_i to the box faces that the
// n-dependent and constant parts of a_j push toward.
class StructuredSolver {
public:
    explicit StructuredSolver(const NominationProblem& p) : p_(p) {
        if (!is_box(p.support)) throw SolverError("structured backend requires a box support; use the simplex backend");
        const auto& sup = p.support;
        const std::size_t m = p.size();
        pieces_.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& xi = p.samples[i];
            auto& pc = pieces_[i];
            const double s_down = xi[kS] - sup.lower(kS), s_up = sup.upper(kS) - xi[kS];
            pc.s = xi[kS];
            pc.r = {xi[kRPlus], xi[kRMinus]};
            pc.t = {xi[kTPlus], xi[kTMinus]};
            pc.p_pos = {s_down + (sup.upper(kRPlus) - xi[kRPlus]), s_down + (sup.upper(kRMinus) - xi[kRMinus])};
            pc.p_neg = {s_up + (xi[kRPlus] - sup.lower(kRPlus)), s_up + (xi[kRMinus] - sup.lower(kRMinus))};
            pc.q = {xi[kTPlus] - sup.lower(kTPlus), xi[kTMinus] - sup.lower(kTMinus)};
        }
    }

    double line(std::size_t i, std::size_t j, double n, double lambda) const {
        const auto& pc = pieces_[i];
        const double P = n >= 0.0 ? pc.p_pos[j] : pc.p_neg[j];
        // Same operation order as lifted_profit, so a zero budget reproduces it bit for bit.
        const double base = (-n * pc.s + n * pc.r[j]) - pc.t[j];
        return base + std::max(std::abs(n) - lambda, 0.0) * P + std::max(1.0 - lambda, 0.0) * pc.q[j];
    }

    double objective(double n, double lambda) const {
        double v = 0.0;
        for (std::size_t i = 0; i < pieces_.size(); ++i)
            v += p_.weights[i] * std::max(line(i, 0, n, lambda), line(i, 1, n, lambda));
        return lambda * p_.epsilon + v;
    }

    struct Inner {
        double lambda;
        double value;
    };

    Inner inner(double n) const {
        const double m = std::abs(n);
        const double b1 = std::min(m, 1.0), b2 = std::max(m, 1.0);
        double lambda;
        if (left_slope(n, b2) <= 0.0)
            lambda = b2;
        else if (b1 < b2 && (b1 == 0.0 || left_slope(n, b1) <= 0.0))
            lambda = sweep(n, b1, b2);
        else
            lambda = sweep(n, 0.0, b1);
        return {lambda, objective(n, lambda)};
    }

    struct Outer {
        double n;
        Inner inner;
    };

    Outer outer() const {
        const double lo = p_.bounds.lower, hi = p_.bounds.upper;
        if (!(hi > lo)) return {lo, inner(lo)};
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        const double tol = 1e-12 * std::max(1.0, hi - lo);
        double a = lo, b = hi;
        double c = b - invphi * (b - a), d = a + invphi * (b - a);
        double fc = inner(c).value, fd = inner(d).value;
        while (b - a > tol) {
            if (fc <= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = inner(c).value;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = inner(d).value;
            }
        }
        Outer best{0.5 * (a + b), inner(0.5 * (a + b))};
        for (double cand : {lo, hi}) {
            const Inner in = inner(cand);
            if (in.value < best.inner.value) best = {cand, in};
        }
        return best;
    }

    // Optimal LP point for a given (n, lambda): s_i = max_j h_ij and gamma
    // carrying the part of |a_jk| that exceeds lambda.
    std::vector<double> lp_point(double n, double lambda) const {
        const LPLayout layout{p_.size()};
        std::vector<double> x(layout.num_columns(), 0.0);
        x[LPLayout::n_col] = n;
        x[LPLayout::lambda_col] = lambda;
        for (std::size_t i = 0; i < p_.size(); ++i) {
            x[layout.s_col(i)] = std::max(line(i, 0, n, lambda), line(i, 1, n, lambda));
            for (std::size_t j = 0; j < 2; ++j)
                for (std::size_t k = 0; k < 6; ++k) {
                    const double a = n * kSlope[j][k] + kOffset[j][k];
                    x[layout.gamma_col(i, j, k)] = std::max(a - lambda, 0.0);
                    x[layout.gamma_col(i, j, 6 + k)] = std::max(-a - lambda, 0.0);
                }
        }
        return x;
    }

private:
    struct Pieces {
        double s = 0.0;
        std::array<double, 2> r{}, t{}, p_pos{}, p_neg{}, q{};
    };

    double slope(std::size_t i, std::size_t j, double n, bool below_m, bool below_one) const {
        const auto& pc = pieces_[i];
        const double P = n >= 0.0 ? pc.p_pos[j] : pc.p_neg[j];
        return -(below_m ? P : 0.0) - (below_one ? pc.q[j] : 0.0);
    }

    // Left derivative of the objective in lambda at lam > 0.
    double left_slope(double n, double lam) const {
        const double m = std::abs(n);
        const bool below_m = lam <= m, below_one = lam <= 1.0;
        double total = p_.epsilon;
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const double h0 = line(i, 0, n, lam), h1 = line(i, 1, n, lam);
            const double s0 = slope(i, 0, n, below_m, below_one), s1 = slope(i, 1, n, below_m, below_one);
            total += p_.weights[i] * (h0 > h1 ? s0 : h1 > h0 ? s1 : std::min(s0, s1));
        }
        return total;
    }

    // Minimizer over [L, R], an interval on which every line is affine in lambda.
    double sweep(double n, double L, double R) const {
        const double m = std::abs(n);
        const bool below_m = L < m, below_one = L < 1.0;
        double total = p_.epsilon;
        events_.clear();
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const double h0 = line(i, 0, n, L), h1 = line(i, 1, n, L);
            const double s0 = slope(i, 0, n, below_m, below_one), s1 = slope(i, 1, n, below_m, below_one);
            const bool first = h0 > h1 || (h0 == h1 && s0 >= s1);
            const double hd = first ? h0 : h1, ho = first ? h1 : h0;
            const double sd = first ? s0 : s1, so = first ? s1 : s0;
            total += p_.weights[i] * sd;
            if (so > sd) {
                const double at = L + (hd - ho) / (so - sd);
                if (at < R) events_.push_back({at, p_.weights[i] * (so - sd)});
            }
        }
        if (total >= 0.0) return L;
        std::sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) { return a.at < b.at; });
        for (const auto& e : events_) {
            total += e.gain;
            if (total >= 0.0) return e.at;
        }
        return R;
    }

    struct Event {
        double at;
        double gain;
    };

    const NominationProblem& p_;
    std::vector<Pieces> pieces_;
    mutable std::vector<Event> events_;
};

double lp_feasibility(const NominationProblem& problem, std::span<const double> x) {
    return assemble_lp(problem).max_violation(x);
}

}  // namespace

NominationBounds default_bounds(const PolyhedralSupport& support) {
    return {0.0, std::max(0.0, support.upper(kG))};
}

void NominationProblem::check() const {
    if (samples.empty()) throw DataError("nomination problem: no samples");
    if (weights.size() != samples.size()) throw DataError("nomination problem: weights and samples differ in length");
    if (!std::isfinite(epsilon) || epsilon < 0.0)
        throw DataError("nomination problem: epsilon must be finite and >= 0, got " + format_number(epsilon));
    if (!std::isfinite(bounds.lower) || !std::isfinite(bounds.upper) || bounds.lower > bounds.upper)
        throw DataError("nomination problem: invalid nomination bounds [" + format_number(bounds.lower) + ", " +
                        format_number(bounds.upper) + "]");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw DataError("nomination problem: negative or NaN weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DataError("nomination problem: weights sum to " + format_number(sum));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double scale = 1.0;
        for (double v : samples[i]) scale = std::max(scale, std::abs(v));
        if (!support.contains(samples[i], 1e-12 * scale))
            throw DataError("nomination problem: sample " + std::to_string(i) + " lies outside the support");
    }
    cost.require_solver_support();
}

NominationProblem make_problem(const EmpiricalDistribution& ref, const PolyhedralSupport& support, double epsilon,
                               NominationBounds bounds, TransportCost cost) {
    NominationProblem p;
    p.samples.reserve(ref.size());
    for (const auto& x : ref.samples) p.samples.push_back(lift(x));
    p.weights = ref.weights;
    p.support = support;
    p.epsilon = epsilon;
    p.cost = cost;
    p.bounds = bounds;
    return p;
}

AffinePieces affine_pieces(double n) {
    AffinePieces a;
    for (std::size_t k = 0; k < 6; ++k) {
        a.a1[k] = n * kSlope[0][k] + kOffset[0][k];
        a.a2[k] = n * kSlope[1][k] + kOffset[1][k];
    }
    return a;
}

double lifted_profit(double n, const LiftedPoint& xi) {
    const AffinePieces a = affine_pieces(n);
    return -std::max(dot(a.a1, xi), dot(a.a2, xi));
}

LPModel assemble_lp(const NominationProblem& problem) {
    problem.check();
    const std::size_t M = problem.size();
    const LPLayout layout{M};
    const auto& C = problem.support.C;
    const auto& d = problem.support.d;

    LPModel model;
    model.columns.reserve(layout.num_columns());
    model.rows.reserve(layout.num_rows());
    model.add_column("n", problem.bounds.lower, problem.bounds.upper, 0.0);
    model.add_column("lambda", 0.0, kInf, problem.epsilon);
    for (std::size_t i = 0; i < M; ++i) model.add_column("s_" + std::to_string(i + 1), -kInf, kInf, problem.weights[i]);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t r = 0; r < 12; ++r)
                model.add_column("gamma_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + "_" + std::to_string(r + 1),
                                 0.0, kInf, 0.0);

    for (std::size_t i = 0; i < M; ++i) {
        const auto& xi = problem.samples[i];
        for (std::size_t j = 0; j < 2; ++j) {
            const std::string tag = std::to_string(i + 1) + "_" + std::to_string(j + 1);
            // a_j(n).xi_i + gamma.(d - C xi_i) - s_i <= 0, with a_j(n).xi_i = n*(e_j.xi_i) + f_j.xi_i
            std::vector<std::pair<std::size_t, double>> epi;
            epi.emplace_back(LPLayout::n_col, dot(kSlope[j], xi));
            for (std::size_t r = 0; r < 12; ++r) {
                double slack = d[r];
                for (std::size_t k = 0; k < 6; ++k) slack -= C[r][k] * xi[k];
                if (slack != 0.0) epi.emplace_back(layout.gamma_col(i, j, r), slack);
            }
            epi.emplace_back(layout.s_col(i), -1.0);
            model.add_row("epi_" + tag, std::move(epi), RowSense::le, -dot(kOffset[j], xi));

            // |(C' gamma)_k - a_jk(n)| <= lambda
            for (std::size_t k = 0; k < 6; ++k) {
                std::vector<std::pair<std::size_t, double>> plus, minus;
                for (std::size_t r = 0; r < 12; ++r)
                    if (C[r][k] != 0.0) {
                        plus.emplace_back(layout.gamma_col(i, j, r), C[r][k]);
                        minus.emplace_back(layout.gamma_col(i, j, r), -C[r][k]);
                    }
                if (kSlope[j][k] != 0.0) {
                    plus.emplace_back(LPLayout::n_col, -kSlope[j][k]);
                    minus.emplace_back(LPLayout::n_col, kSlope[j][k]);
                }
                plus.emplace_back(LPLayout::lambda_col, -1.0);
                minus.emplace_back(LPLayout::lambda_col, -1.0);
                const std::string k_tag = tag + "_" + std::to_string(k + 1);
                model.add_row("dnp_" + k_tag, std::move(plus), RowSense::le, kOffset[j][k]);
                model.add_row("dnm_" + k_tag, std::move(minus), RowSense::le, -kOffset[j][k]);
            }
        }
    }
    return model;
}

const char* to_string(Backend backend) {
    return backend == Backend::structured ? "structured" : "simplex";
}

NominationSolution solve_nomination(const NominationProblem& problem, const SolveOptions& options) {
    problem.check();
    NominationSolution sol;
    sol.backend = options.backend;
    if (options.backend == Backend::simplex) {
        const LPModel model = assemble_lp(problem);
        LPSolution lp = solve_lp(model, options.simplex);
        if (lp.status != LPStatus::optimal)
            throw SolverError(std::string("nomination LP ") + to_string(lp.status) + ": " + lp.message);
        sol.status = lp.status;
        sol.n_star = lp.x[LPLayout::n_col];
        sol.lambda = lp.x[LPLayout::lambda_col];
        sol.worst_case_profit = -lp.objective;
        sol.iterations = lp.iterations;
        if (options.keep_point) {
            sol.max_violation = lp.max_violation;
            sol.lp_point = std::move(lp.x);
        }
        return sol;
    }

    const StructuredSolver solver(problem);
    const auto best = solver.outer();
    sol.status = LPStatus::optimal;
    sol.n_star = best.n;
    sol.lambda = best.inner.lambda;
    sol.worst_case_profit = -best.inner.value;
    if (options.keep_point) {
        sol.lp_point = solver.lp_point(best.n, best.inner.lambda);
        sol.max_violation = lp_feasibility(problem, sol.lp_point);
        if (*sol.max_violation > 1e-6)
            throw SolverError("structured solution violates the LP by " + format_number(*sol.max_violation));
    }
    return sol;
}

NominationSolution solve_nomination(const EmpiricalDistribution& ref, const PolyhedralSupport& support, double epsilon,
                                    NominationBounds bounds, const SolveOptions& options) {
    return solve_nomination(make_problem(ref, support, epsilon, bounds), options);
}

InnerValue worst_case_profit_at(const NominationProblem& problem, double n) {
    problem.check();
    const StructuredSolver solver(problem);
    const auto in = solver.inner(n);
    return {-in.value, in.lambda};
}

double expected_profit(const EmpiricalDistribution& ref, double n) {
    double v = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) v += ref.weights[i] * settle_profit(n, ref.samples[i]);
    return v;
}

SaaResult saa_nomination(const EmpiricalDistribution& ref, NominationBounds bounds) {
    if (ref.size() == 0) throw DataError("saa_nomination: empty reference distribution");
    if (bounds.lower > bounds.upper) throw DataError("saa_nomination: invalid nomination bounds");
    std::vector<double> cand{bounds.lower, bounds.upper};
    for (const auto& x : ref.samples) cand.push_back(std::clamp(x[kG], bounds.lower, bounds.upper));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    SaaResult best{cand.front(), expected_profit(ref, cand.front())};
    for (std::size_t c = 1; c < cand.size(); ++c) {
        const double v = expected_profit(ref, cand[c]);
        if (v > best.value) best = {cand[c], v};
    }
    return best;
}

double mean_forecast_nomination(std::span<const double> ensemble, NominationBounds bounds) {
    if (ensemble.empty()) throw DataError("mean_forecast_nomination: empty ensemble");
    const double mean = std::accumulate(ensemble.begin(), ensemble.end(), 0.0) / static_cast<double>(ensemble.size());
    return std::clamp(mean, bounds.lower, bounds.upper);
}

}  // namespace otdro
