#include "otdro/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "otdro/error.hpp"
#include "otdro/text.hpp"

namespace otdro {

TailReport tail_exceedance(std::span<const double> prices, std::span<const double> thresholds) {
    if (prices.empty()) throw DataError("tail_exceedance: empty price series");
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        if (!(thresholds[k] > 0.0)) throw DataError("tail_exceedance: thresholds must be positive");
        if (k > 0 && !(thresholds[k] > thresholds[k - 1]))
            throw DataError("tail_exceedance: thresholds must be strictly increasing");
    }
    TailReport rep;
    rep.n_obs = prices.size();
    const double n = static_cast<double>(prices.size());
    for (double q : thresholds) {
        TailRow row;
        row.q = q;
        row.count = static_cast<std::size_t>(std::count_if(prices.begin(), prices.end(), [q](double p) { return p >= q; }));
        row.freq = static_cast<double>(row.count) / n;
        row.epsilon_q = q * row.freq;
        rep.rows.push_back(row);
    }
    return rep;
}

double estimate_tail_exponent(std::span<const TailRow> rows) {
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        if (r.count == 0) continue;
        xs.push_back(std::log(r.q));
        ys.push_back(std::log(r.freq));
    }
    if (xs.size() < 2) throw DataError("estimate_tail_exponent: need at least two thresholds with exceedances");
    const double m = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return -sxy / sxx;
}

double estimate_tail_exponent(std::span<const double> prices, std::span<const double> thresholds) {
    return estimate_tail_exponent(tail_exceedance(prices, thresholds).rows);
}

void attach_tail_exponent(TailReport& report) {
    const auto usable = std::count_if(report.rows.begin(), report.rows.end(), [](const TailRow& r) { return r.count > 0; });
    report.p_hat = usable >= 2 ? std::optional<double>(estimate_tail_exponent(report.rows)) : std::nullopt;
}

std::array<double, 3> suggest_radii(std::span<const TailRow> rows, RadiusClamp clamp) {
    std::vector<double> eps;
    for (const auto& r : rows)
        if (r.count > 0 && r.epsilon_q > 0.0) eps.push_back(std::round(r.epsilon_q * 10.0) / 10.0);
    if (eps.empty()) throw DataError("suggest_radii: no threshold has exceedances");
    std::sort(eps.begin(), eps.end());
    const std::size_t m = eps.size();
    const double mid = m % 2 == 1 ? eps[m / 2] : 0.5 * (eps[m / 2 - 1] + eps[m / 2]);
    const double median = std::round(mid * 100.0) / 100.0;
    auto c = [&](double v) { return std::clamp(v, clamp.lower, clamp.upper); };
    return {c(eps.front()), c(median), c(eps.back())};
}

std::string to_csv(const TailReport& report) {
    std::ostringstream out;
    out << "q_eur_mwh,count,freq,freq_percent,epsilon_q\n";
    for (const auto& r : report.rows) {
        out << format_number(r.q) << ',' << r.count << ',' << format_number(r.freq) << ','
            << format_fixed(100.0 * r.freq, 2) << ',' << format_number(r.epsilon_q) << '\n';
    }
    out << "# n_obs=" << report.n_obs << '\n';
    out << "# p_hat=" << (report.p_hat ? format_number(*report.p_hat) : std::string("NA")) << '\n';
    return out.str();
}

}  // namespace otdro
