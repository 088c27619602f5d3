#include "skintone/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "skintone/error.hpp"

namespace skintone {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
    constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

struct Pooled {
    std::vector<double> ranks;        // per observation, group-major
    std::vector<double> rank_means;   // per group
    std::size_t n = 0;
    double ties = 0;
};

Pooled pool(std::span<const NamedGroup> groups) {
    Pooled p;
    std::vector<double> all;
    for (const auto& g : groups) all.insert(all.end(), g.values.begin(), g.values.end());
    p.n = all.size();
    p.ranks = midranks(all);
    p.ties = tie_sum(all);
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double s = 0;
        for (std::size_t i = 0; i < g.values.size(); ++i) s += p.ranks[offset + i];
        p.rank_means.push_back(s / static_cast<double>(g.values.size()));
        offset += g.values.size();
    }
    return p;
}

void check_groups(std::span<const NamedGroup> groups) {
    if (groups.size() < 2) throw DataError("need at least two groups");
    std::size_t total = 0;
    for (const auto& g : groups) {
        if (g.values.empty()) throw DataError("group '" + g.name + "' is empty");
        for (double v : g.values) {
            if (!std::isfinite(v)) throw DataError("group '" + g.name + "' holds a non-finite value");
        }
        total += g.values.size();
    }
    if (total < 3) throw DataError("need at least three observations");
}

}  // namespace

double regularized_gamma_q(double a, double x) {
    if (a <= 0) throw DataError("gamma shape must be positive");
    if (x <= 0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double chi_square_sf(double x, double df) {
    if (df <= 0) throw DataError("chi-square needs df > 0");
    return std::clamp(regularized_gamma_q(df / 2.0, x / 2.0), 0.0, 1.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = r;
        i = j;
    }
    return ranks;
}

double tie_sum(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    double s = 0;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        const double t = static_cast<double>(j - i);
        s += t * t * t - t;
        i = j;
    }
    return s;
}

std::string_view to_string(Correction c) { return c == Correction::Bonferroni ? "bonferroni" : "holm"; }

StatsResult kruskal_wallis(std::span<const NamedGroup> groups) {
    check_groups(groups);
    const Pooled p = pool(groups);
    StatsResult r;
    r.df = static_cast<int>(groups.size()) - 1;
    for (const auto& g : groups) {
        r.groups.push_back(g.name);
        r.sizes.push_back(g.values.size());
    }
    const double n = static_cast<double>(p.n);
    const double correction = 1.0 - p.ties / (n * n * n - n);
    if (correction <= 0) {
        r.degenerate = true;
        r.h = 0;
        r.p = 1;
        return r;
    }
    double s = 0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const double ni = static_cast<double>(groups[i].values.size());
        const double ri = p.rank_means[i] * ni;
        s += ri * ri / ni;
    }
    r.h = std::max(0.0, (12.0 / (n * (n + 1.0)) * s - 3.0 * (n + 1.0)) / correction);
    r.p = chi_square_sf(r.h, r.df);
    return r;
}

std::vector<double> adjust_p_values(std::span<const double> p, Correction correction) {
    const std::size_t m = p.size();
    std::vector<double> out(m);
    if (correction == Correction::Bonferroni) {
        for (std::size_t i = 0; i < m; ++i) out[i] = std::min(1.0, p[i] * static_cast<double>(m));
        return out;
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    double running = 0;
    for (std::size_t i = 0; i < m; ++i) {
        running = std::max(running, std::min(1.0, static_cast<double>(m - i) * p[order[i]]));
        out[order[i]] = running;
    }
    return out;
}

std::vector<DunnComparison> dunn_posthoc(std::span<const NamedGroup> groups, Correction correction) {
    check_groups(groups);
    const Pooled p = pool(groups);
    const double n = static_cast<double>(p.n);
    const double variance = n * (n + 1.0) / 12.0 - p.ties / (12.0 * (n - 1.0));
    std::vector<DunnComparison> out;
    std::vector<double> raw;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            DunnComparison c{groups[i].name, groups[j].name, 0.0, 1.0, 1.0};
            const double se2 = variance * (1.0 / groups[i].values.size() + 1.0 / groups[j].values.size());
            if (se2 > 0) {
                c.z = (p.rank_means[i] - p.rank_means[j]) / std::sqrt(se2);
                c.p = std::min(1.0, 2.0 * normal_sf(std::abs(c.z)));
            }
            raw.push_back(c.p);
            out.push_back(c);
        }
    }
    const auto adjusted = adjust_p_values(raw, correction);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].p_adjusted = adjusted[i];
    return out;
}

StatsResult kruskal_wallis_dunn(std::span<const NamedGroup> groups, Correction correction) {
    StatsResult r = kruskal_wallis(groups);
    r.correction = correction;
    r.posthoc = dunn_posthoc(groups, correction);
    return r;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw DataError("quantile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::vector<double> values) {
    if (values.empty()) throw DataError("median of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

Summary summarize(std::span<const double> values) {
    if (values.empty()) throw DataError("summary of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    Summary s;
    s.n = v.size();
    s.median = v.size() % 2 ? v[v.size() / 2] : (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2.0;
    s.q1 = quantile_sorted(v, 0.25);
    s.q3 = quantile_sorted(v, 0.75);
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    s.min = v.front();
    s.max = v.back();
    return s;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DataError("spearman needs two samples of equal size >= 2");
    const auto rx = midranks(x);
    const auto ry = midranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace skintone
