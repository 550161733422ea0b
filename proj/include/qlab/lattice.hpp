#pragma once

#include <array>
#include <vector>

#include "qlab/zq.hpp"

namespace qlab {

// Dense basis for lattices of dimension 1 or 2; enough for the desk-scale
// reduction experiments. Columns are basis vectors.
struct LatticeBasis {
    int dim;
    std::array<double, 4> b;  // row-major dim x dim

    static LatticeBasis integers() { return LatticeBasis{1, {1, 0, 0, 1}}; }
    static LatticeBasis scaled_integers(double s) { return LatticeBasis{1, {s, 0, 0, 1}}; }
    static LatticeBasis z2() { return LatticeBasis{2, {1, 0, 0, 1}}; }
    static LatticeBasis from_2x2(double a00, double a01, double a10, double a11) {
        return LatticeBasis{2, {a00, a01, a10, a11}};
    }

    double det() const;
    LatticeBasis dual() const;                    // basis of L* (B^{-T})
    LatticeBasis scaled(double factor) const;     // basis of factor * L
    std::vector<double> vec(const std::vector<i64>& coeffs) const;
    // Coefficients of a lattice point (assumes the point is in L).
    std::vector<i64> coeffs_of(const std::vector<double>& point) const;
};

// Shortest nonzero vector length (l2) by enumeration.
double lattice_lambda1(const LatticeBasis& L);

// Closest lattice vector to x (unique when dist < lambda1/2; ties resolved
// by the enumeration order).
std::vector<double> lattice_kappa(const LatticeBasis& L, const std::vector<double>& x);

double dist_to_lattice(const LatticeBasis& L, const std::vector<double>& x);

// rho_{1/s}(L* \ {0}) evaluated by enumeration.
double dual_rho_tail(const LatticeBasis& L, double s);

// Smoothing parameter eta_eps(L): smallest s with rho_{1/s}(L* \ 0) <= eps,
// by bisection.
double eta_eps(const LatticeBasis& L, double eps);

}  // namespace qlab
