#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skintone {

// Regularised upper incomplete gamma Q(a, x): series for x < a + 1, Lentz
// continued fraction otherwise. Absolute error below 1e-12 for a <= 1e3.
double regularized_gamma_q(double a, double x);

// Survival function of the chi-square distribution.
double chi_square_sf(double x, double df);

// P(Z > z) for a standard normal, via erfc.
double normal_sf(double z);

// 1-based ranks with ties replaced by their mean rank.
std::vector<double> midranks(std::span<const double> values);

// sum over tie groups of (t^3 - t).
double tie_sum(std::span<const double> values);

struct NamedGroup {
    std::string name;
    std::vector<double> values;
};

enum class Correction { Bonferroni, Holm };
std::string_view to_string(Correction c);

struct DunnComparison {
    std::string group_a;
    std::string group_b;
    double z = 0;
    double p = 1;
    double p_adjusted = 1;
};

struct StatsResult {
    std::string test = "kruskal-wallis";
    std::vector<std::string> groups;
    std::vector<std::size_t> sizes;
    double h = 0;
    int df = 0;
    double p = 1;
    bool degenerate = false;  // every observation equal
    Correction correction = Correction::Bonferroni;
    std::vector<DunnComparison> posthoc;
};

// Tie-corrected Kruskal-Wallis H with a chi-square (k - 1 df) p value. Needs at
// least two groups, each non-empty, and three observations in total.
StatsResult kruskal_wallis(std::span<const NamedGroup> groups);

// Dunn pairwise z tests on the pooled ranks, two-sided, adjusted for all k(k-1)/2 pairs.
std::vector<DunnComparison> dunn_posthoc(std::span<const NamedGroup> groups, Correction correction = Correction::Bonferroni);

// Kruskal-Wallis followed by Dunn.
StatsResult kruskal_wallis_dunn(std::span<const NamedGroup> groups, Correction correction = Correction::Bonferroni);

std::vector<double> adjust_p_values(std::span<const double> p, Correction correction);

struct Summary {
    std::size_t n = 0;
    double median = 0;
    double q1 = 0;  // linear interpolation between order statistics
    double q3 = 0;
    double mean = 0;
    double min = 0;
    double max = 0;
};

double median(std::vector<double> values);
double quantile_sorted(std::span<const double> sorted, double q);
Summary summarize(std::span<const double> values);

// Spearman rank correlation (Pearson correlation of midranks).
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace skintone
