#include "otdro/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "otdro/error.hpp"
#include "otdro/text.hpp"

namespace otdro {

std::size_t LPModel::add_column(std::string name, double lower, double upper, double cost) {
    if (lower > upper) throw DataError("LP column '" + name + "': lower bound exceeds upper bound");
    columns.push_back({std::move(name), lower, upper, cost});
    return columns.size() - 1;
}

std::size_t LPModel::add_row(std::string name, std::vector<std::pair<std::size_t, double>> entries, RowSense sense,
                             double rhs) {
    for (const auto& [col, v] : entries) {
        if (col >= columns.size()) throw DataError("LP row '" + name + "' references an unknown column");
        (void)v;
    }
    rows.push_back({std::move(name), std::move(entries), sense, rhs});
    return rows.size() - 1;
}

std::size_t LPModel::num_nonzeros() const {
    std::size_t nnz = 0;
    for (const auto& r : rows) nnz += r.entries.size();
    return nnz;
}

double LPModel::objective(std::span<const double> x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < columns.size(); ++j) v += columns[j].cost * x[j];
    return v;
}

double LPModel::row_activity(std::size_t row, std::span<const double> x) const {
    double v = 0.0;
    for (const auto& [col, a] : rows[row].entries) v += a * x[col];
    return v;
}

double LPModel::max_violation(std::span<const double> x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        worst = std::max(worst, columns[j].lower - x[j]);
        worst = std::max(worst, x[j] - columns[j].upper);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double act = row_activity(i, x);
        const double rhs = rows[i].rhs;
        switch (rows[i].sense) {
            case RowSense::le: worst = std::max(worst, act - rhs); break;
            case RowSense::ge: worst = std::max(worst, rhs - act); break;
            case RowSense::eq: worst = std::max(worst, std::abs(act - rhs)); break;
        }
    }
    return worst;
}

const char* to_string(LPStatus status) {
    switch (status) {
        case LPStatus::optimal: return "optimal";
        case LPStatus::infeasible: return "infeasible";
        case LPStatus::unbounded: return "unbounded";
        case LPStatus::iteration_limit: return "iteration_limit";
        case LPStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

namespace {

enum class VarState { basic, at_lower, at_upper, free_zero };

// Tableau T = B^-1 [A | I | artificials]. Columns: structural, one slack per
// row, then one artificial per row that needed one.
class Tableau {
public:
    Tableau(const LPModel& model, const SimplexOptions& options) : model_(model), opt_(options) {
        n_ = model.num_columns();
        m_ = model.num_rows();
        build();
    }

    LPSolution run() {
        LPSolution sol;
        const std::size_t limit = opt_.max_iterations ? opt_.max_iterations : 50 * (m_ + n_) + 1000;

        if (num_art_ > 0) {
            set_phase_costs(true);
            const auto st = iterate(limit, sol.iterations);
            if (st == LPStatus::iteration_limit) return finish(sol, st, "iteration limit in phase 1");
            refresh_basic_values();
            double infeas = 0.0;
            for (std::size_t j = art_begin(); j < cols_; ++j) infeas += value(j);
            if (infeas > feas_tol_ * static_cast<double>(std::max<std::size_t>(1, num_art_)))
                return finish(sol, LPStatus::infeasible, "phase 1 optimum has residual infeasibility " + format_number(infeas));
            for (std::size_t j = art_begin(); j < cols_; ++j) up_[j] = 0.0;
            drive_out_artificials();
        }
        set_phase_costs(false);
        const auto st = iterate(limit, sol.iterations);
        if (st != LPStatus::optimal) return finish(sol, st, st == LPStatus::unbounded ? "objective unbounded below" : "iteration limit in phase 2");
        refresh_basic_values();
        return finish(sol, LPStatus::optimal, {});
    }

private:
    std::size_t art_begin() const { return n_ + m_; }
    double& t(std::size_t i, std::size_t j) { return T_[i * cols_ + j]; }
    double t(std::size_t i, std::size_t j) const { return T_[i * cols_ + j]; }

    double value(std::size_t j) const {
        if (state_[j] == VarState::basic) return beta_[row_of_[j]];
        return xn_[j];
    }

    void build() {
        lo_.assign(n_ + m_, 0.0);
        up_.assign(n_ + m_, 0.0);
        cost_.assign(n_ + m_, 0.0);
        double scale = 1.0;
        for (std::size_t j = 0; j < n_; ++j) {
            lo_[j] = model_.columns[j].lower;
            up_[j] = model_.columns[j].upper;
            cost_[j] = model_.columns[j].cost;
        }
        for (std::size_t i = 0; i < m_; ++i) {
            scale = std::max(scale, std::abs(model_.rows[i].rhs));
            const std::size_t s = n_ + i;
            switch (model_.rows[i].sense) {
                case RowSense::le: lo_[s] = 0.0; up_[s] = kInf; break;
                case RowSense::ge: lo_[s] = -kInf; up_[s] = 0.0; break;
                case RowSense::eq: lo_[s] = 0.0; up_[s] = 0.0; break;
            }
        }
        feas_tol_ = opt_.tol * scale;

        state_.assign(n_ + m_, VarState::at_lower);
        xn_.assign(n_ + m_, 0.0);
        for (std::size_t j = 0; j < n_ + m_; ++j) {
            if (std::isfinite(lo_[j])) {
                state_[j] = VarState::at_lower;
                xn_[j] = lo_[j];
            } else if (std::isfinite(up_[j])) {
                state_[j] = VarState::at_upper;
                xn_[j] = up_[j];
            } else {
                state_[j] = VarState::free_zero;
                xn_[j] = 0.0;
            }
        }

        // Residual per row with structurals at their starting values.
        std::vector<double> resid(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            double act = 0.0;
            for (const auto& [col, a] : model_.rows[i].entries) act += a * xn_[col];
            resid[i] = model_.rows[i].rhs - act;
        }
        std::vector<double> art_sign(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t s = n_ + i;
            if (resid[i] < lo_[s] || resid[i] > up_[s]) {
                art_sign[i] = resid[i] >= 0.0 ? 1.0 : -1.0;
                ++num_art_;
            }
        }
        cols_ = n_ + m_ + num_art_;
        lo_.resize(cols_, 0.0);
        up_.resize(cols_, kInf);
        cost_.resize(cols_, 0.0);
        state_.resize(cols_, VarState::at_lower);
        xn_.resize(cols_, 0.0);
        phase_cost_.assign(cols_, 0.0);
        row_of_.assign(cols_, 0);
        basis_.assign(m_, 0);
        beta_.assign(m_, 0.0);
        T_.assign(m_ * cols_, 0.0);
        rhs_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) rhs_[i] = model_.rows[i].rhs;

        std::size_t next_art = art_begin();
        for (std::size_t i = 0; i < m_; ++i) {
            double basis_coef = 1.0;
            std::size_t basic_col = n_ + i;
            if (art_sign[i] != 0.0) {
                basic_col = next_art++;
                basis_coef = art_sign[i];
                t(i, basic_col) = art_sign[i];
            }
            for (const auto& [col, a] : model_.rows[i].entries) t(i, col) += a;
            t(i, n_ + i) = 1.0;
            if (basis_coef != 1.0)
                for (std::size_t j = 0; j < cols_; ++j) t(i, j) /= basis_coef;
            basis_[i] = basic_col;
            state_[basic_col] = VarState::basic;
            row_of_[basic_col] = i;
            beta_[i] = resid[i] / basis_coef;
        }
        for (std::size_t j = 0; j < n_ + m_; ++j)
            if (state_[j] == VarState::basic) xn_[j] = 0.0;
    }

    // Recomputes basic values from B^-1 (the slack block of T) to shed drift.
    void refresh_basic_values() {
        std::vector<double> r(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            double act = 0.0;
            for (const auto& [col, a] : model_.rows[i].entries)
                if (state_[col] != VarState::basic) act += a * xn_[col];
            if (state_[n_ + i] != VarState::basic) act += xn_[n_ + i];
            r[i] = rhs_[i] - act;
        }
        // Nonbasic artificials sit at zero; basic ones are covered by B^-1.
        for (std::size_t i = 0; i < m_; ++i) {
            double v = 0.0;
            for (std::size_t k = 0; k < m_; ++k) v += t(i, n_ + k) * r[k];
            beta_[i] = v;
        }
    }

    void set_phase_costs(bool phase1) {
        for (std::size_t j = 0; j < cols_; ++j) phase_cost_[j] = phase1 ? (j >= art_begin() ? 1.0 : 0.0) : cost_[j];
        reduced_.assign(cols_, 0.0);
        for (std::size_t j = 0; j < cols_; ++j) {
            double d = phase_cost_[j];
            for (std::size_t i = 0; i < m_; ++i) d -= phase_cost_[basis_[i]] * t(i, j);
            reduced_[j] = d;
        }
        for (std::size_t i = 0; i < m_; ++i) reduced_[basis_[i]] = 0.0;
        double cmax = 1.0;
        for (double c : phase_cost_) cmax = std::max(cmax, std::abs(c));
        opt_tol_ = opt_.tol * cmax;
    }

    double phase_objective() const {
        double v = 0.0;
        for (std::size_t j = 0; j < cols_; ++j)
            if (phase_cost_[j] != 0.0) v += phase_cost_[j] * value(j);
        return v;
    }

    // Direction +1 (increase) / -1 (decrease) if j may improve, else 0.
    int improving_direction(std::size_t j) const {
        if (state_[j] == VarState::basic || lo_[j] == up_[j]) return 0;
        const double d = reduced_[j];
        if (d < -opt_tol_ && (state_[j] != VarState::at_upper)) return +1;
        if (d > opt_tol_ && (state_[j] != VarState::at_lower)) return -1;
        return 0;
    }

    LPStatus iterate(std::size_t limit, std::size_t& iterations) {
        std::size_t stall = 0;
        double last_obj = phase_objective();
        bool bland = false;
        while (true) {
            if (iterations >= limit) return LPStatus::iteration_limit;

            std::size_t enter = cols_;
            int dir = 0;
            double best = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) {
                const int dj = improving_direction(j);
                if (dj == 0) continue;
                if (bland) {
                    enter = j;
                    dir = dj;
                    break;
                }
                const double score = std::abs(reduced_[j]);
                if (score > best) {
                    best = score;
                    enter = j;
                    dir = dj;
                }
            }
            if (enter == cols_) return LPStatus::optimal;

            // Ratio test: entering bound flip versus the first blocking basic variable.
            const double flip = (std::isfinite(lo_[enter]) && std::isfinite(up_[enter])) ? up_[enter] - lo_[enter] : kInf;
            double theta_rows = kInf;
            std::size_t leave_row = m_;
            double leave_alpha = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                const double alpha = dir * t(i, enter);
                if (std::abs(alpha) <= kPivotTol) continue;
                const std::size_t b = basis_[i];
                double limit_i;
                if (alpha > 0.0) {
                    if (!std::isfinite(lo_[b])) continue;
                    limit_i = (beta_[i] - lo_[b]) / alpha;
                } else {
                    if (!std::isfinite(up_[b])) continue;
                    limit_i = (up_[b] - beta_[i]) / -alpha;
                }
                limit_i = std::max(limit_i, 0.0);
                bool take = false;
                if (leave_row == m_ || limit_i < theta_rows - kRatioTie) {
                    take = true;
                } else if (limit_i <= theta_rows + kRatioTie) {
                    take = bland ? basis_[i] < basis_[leave_row] : std::abs(alpha) > std::abs(leave_alpha);
                }
                if (take) {
                    theta_rows = limit_i;
                    leave_row = i;
                    leave_alpha = alpha;
                }
            }
            const bool bound_flip = flip <= theta_rows;
            const double theta = bound_flip ? flip : theta_rows;
            if (!std::isfinite(theta)) return LPStatus::unbounded;
            ++iterations;

            for (std::size_t i = 0; i < m_; ++i) beta_[i] -= dir * theta * t(i, enter);
            const double entering_value = xn_[enter] + dir * theta;
            if (bound_flip) {
                state_[enter] = dir > 0 ? VarState::at_upper : VarState::at_lower;
                xn_[enter] = dir > 0 ? up_[enter] : lo_[enter];
            } else {
                pivot(leave_row, enter, entering_value, leave_alpha > 0.0);
            }

            const double obj = phase_objective();
            if (obj < last_obj - opt_tol_ * std::max(1.0, std::abs(last_obj))) {
                stall = 0;
                bland = false;
                last_obj = obj;
            } else if (++stall > 50) {
                bland = true;
            }
        }
    }

    void pivot(std::size_t r, std::size_t enter, double entering_value, bool leaving_decreased) {
        const std::size_t leave = basis_[r];
        state_[leave] = leaving_decreased ? VarState::at_lower : VarState::at_upper;
        xn_[leave] = leaving_decreased ? lo_[leave] : up_[leave];
        if (!std::isfinite(xn_[leave])) {
            // Free variable can only leave at a finite value; keep it at its current value.
            xn_[leave] = beta_[r];
            state_[leave] = VarState::free_zero;
        }

        const double piv = t(r, enter);
        double* rowr = &T_[r * cols_];
        for (std::size_t j = 0; j < cols_; ++j) rowr[j] /= piv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = t(i, enter);
            if (f == 0.0) continue;
            double* rowi = &T_[i * cols_];
            for (std::size_t j = 0; j < cols_; ++j) rowi[j] -= f * rowr[j];
            rowi[enter] = 0.0;
        }
        const double dr = reduced_[enter];
        if (dr != 0.0)
            for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= dr * rowr[j];
        reduced_[enter] = 0.0;

        basis_[r] = enter;
        row_of_[enter] = r;
        state_[enter] = VarState::basic;
        beta_[r] = entering_value;
        xn_[enter] = 0.0;
    }

    void drive_out_artificials() {
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < art_begin()) continue;
            std::size_t best = cols_;
            double best_abs = 1e-7;
            for (std::size_t j = 0; j < art_begin(); ++j) {
                if (state_[j] == VarState::basic) continue;
                if (std::abs(t(r, j)) > best_abs) {
                    best_abs = std::abs(t(r, j));
                    best = j;
                }
            }
            if (best == cols_) continue;  // redundant row; artificial stays basic at 0
            // Degenerate pivot: the artificial is at 0 so no values move.
            reduced_.assign(cols_, 0.0);
            pivot(r, best, xn_[best], true);
            state_[basis_[r]] = VarState::basic;
        }
    }

    LPSolution& finish(LPSolution& sol, LPStatus status, std::string message) {
        sol.status = status;
        sol.message = std::move(message);
        sol.x.assign(n_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) sol.x[j] = value(j);
        sol.objective = model_.objective(sol.x);
        sol.max_violation = model_.max_violation(sol.x);
        if (status == LPStatus::optimal && sol.max_violation > 1e-6 * std::max(1.0, feas_tol_ / opt_.tol)) {
            sol.status = LPStatus::numerical_failure;
            sol.message = "solution violates constraints by " + format_number(sol.max_violation);
        }
        return sol;
    }

    static constexpr double kPivotTol = 1e-9;
    static constexpr double kRatioTie = 1e-12;

    const LPModel& model_;
    SimplexOptions opt_;
    std::size_t n_ = 0, m_ = 0, cols_ = 0, num_art_ = 0;
    std::vector<double> lo_, up_, cost_, phase_cost_, reduced_, xn_, beta_, rhs_, T_;
    std::vector<VarState> state_;
    std::vector<std::size_t> basis_, row_of_;
    double feas_tol_ = 0.0, opt_tol_ = 0.0;
};

void write_term(std::ostream& out, double coef, const std::string& name, bool first) {
    if (coef < 0.0)
        out << (first ? "- " : " - ") << format_number(-coef) << ' ' << name;
    else
        out << (first ? "" : " + ") << format_number(coef) << ' ' << name;
}

void write_terms(std::ostream& out, const std::vector<std::pair<std::size_t, double>>& terms, const LPModel& model) {
    if (terms.empty()) {
        out << "0 " << model.columns.front().name;
        return;
    }
    std::size_t on_line = 0;
    bool first = true;
    for (const auto& [col, coef] : terms) {
        if (on_line == 6) {
            out << "\n   ";
            on_line = 0;
        }
        write_term(out, coef, model.columns[col].name, first);
        first = false;
        ++on_line;
    }
}

}  // namespace

LPSolution solve_lp(const LPModel& model, const SimplexOptions& options) {
    if (!(options.tol > 0.0)) throw DataError("solve_lp: tolerance must be positive");
    if (model.num_columns() == 0) throw DataError("solve_lp: model has no columns");
    Tableau tab(model, options);
    return tab.run();
}

void write_lp(std::ostream& out, const LPModel& model) {
    out << "\\ written by otdro\n";
    out << "Minimize\n obj: ";
    std::vector<std::pair<std::size_t, double>> obj;
    for (std::size_t j = 0; j < model.columns.size(); ++j)
        if (model.columns[j].cost != 0.0) obj.emplace_back(j, model.columns[j].cost);
    write_terms(out, obj, model);
    out << "\nSubject To\n";
    for (const auto& row : model.rows) {
        out << ' ' << row.name << ": ";
        write_terms(out, row.entries, model);
        switch (row.sense) {
            case RowSense::le: out << " <= "; break;
            case RowSense::ge: out << " >= "; break;
            case RowSense::eq: out << " = "; break;
        }
        out << format_number(row.rhs) << '\n';
    }
    out << "Bounds\n";
    for (const auto& c : model.columns) {
        const bool lo_inf = !std::isfinite(c.lower);
        const bool up_inf = !std::isfinite(c.upper);
        if (lo_inf && up_inf) {
            out << ' ' << c.name << " free\n";
        } else if (lo_inf) {
            out << " -inf <= " << c.name << " <= " << format_number(c.upper) << '\n';
        } else if (up_inf) {
            out << ' ' << c.name << " >= " << format_number(c.lower) << '\n';
        } else if (c.lower == c.upper) {
            out << ' ' << c.name << " = " << format_number(c.lower) << '\n';
        } else {
            out << ' ' << format_number(c.lower) << " <= " << c.name << " <= " << format_number(c.upper) << '\n';
        }
    }
    out << "End\n";
}

}  // namespace otdro
