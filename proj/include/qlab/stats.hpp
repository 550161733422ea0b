#pragma once

#include <vector>

namespace qlab {

// Upper regularized incomplete gamma Q(a, x); used for chi-square p-values.
double gamma_q(double a, double x);

struct ChiSquareResult {
    double statistic;
    int dof;
    double p_value;
};

// Pearson goodness-of-fit. Expected counts below `min_expected` are pooled
// into their neighbor to keep the asymptotics valid.
ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected, double min_expected = 5.0);

// Total variation distance between two discrete distributions.
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace qlab
