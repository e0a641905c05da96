#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "ifsdim/ifs_system.hpp"

namespace ifsdim {

// Affine system x -> ratio_i * x + offset_i on V = [0, 1].
inline IfsSystem cantor_affine(const std::vector<double>& ratios,
                               const std::vector<double>& offsets) {
    if (ratios.size() != offsets.size() || ratios.empty())
        throw std::invalid_argument("cantor_affine: ratios/offsets size mismatch");
    SeedSet seed = SeedSet::interval(0.0, 1.0);
    std::vector<ConformalMap> maps;
    maps.reserve(ratios.size());
    for (std::size_t i = 0; i < ratios.size(); ++i)
        maps.emplace_back(AffineMap1D{ratios[i], offsets[i]}, seed.box);
    return IfsSystem(std::move(maps), seed);
}

// The nonlinear family F_j(x) = lambda*x + eps*x^2 + eps*x^3 + lambda*j for
// j in {0, 1, 3}, on V = [0, 3*lambda/(1-lambda) + 0.1]. For eps = 0 the
// images of F_0 and F_1 touch or overlap while F_3 stays separated, which is
// what makes the {0,1},{3} grouping work.
inline IfsSystem cubic_family(double lambda, double eps) {
    if (!(lambda >= 0.25 - 1e-12 && lambda <= 1.0 / 3.0 + 1e-12))
        throw std::invalid_argument("cubic_family: lambda must be in [1/4, 1/3]");
    if (eps < 0.0) throw std::invalid_argument("cubic_family: eps must be >= 0");
    const double hi = 3.0 * lambda / (1.0 - lambda) + 0.1;
    SeedSet seed = SeedSet::interval(0.0, hi);
    std::vector<ConformalMap> maps;
    for (int j : {0, 1, 3})
        maps.emplace_back(CubicMap1D{lambda, eps, lambda * j}, seed.box);
    return IfsSystem(std::move(maps), seed); // validation reports the first violated bound
}

// One rational map R(z) = gamma z^d + eps_1 z^(d-1) + ... + eps_{d-1} z + c.
struct JuliaMapSpec {
    int degree;
    std::complex<double> gamma{1.0, 0.0};
    std::complex<double> c{0.0, 0.0};
    std::vector<std::complex<double>> eps;
};

struct JuliaSpec {
    std::vector<JuliaMapSpec> maps;
    double r_lo = 0.8;
    double r_hi = 1.25;
    bool auto_shrink = true;
};

// System of all inverse branches f_{j,k} of the given expanding maps on an
// annulus around the unit circle. If validation fails and auto_shrink is
// set, the annulus is narrowed toward |z| = 1 until every branch validates
// or the floor is hit.
inline IfsSystem mixed_julia(const JuliaSpec& spec) {
    if (spec.maps.empty()) throw std::invalid_argument("mixed_julia: no maps given");
    for (const auto& m : spec.maps) {
        if (m.degree < 2) throw std::invalid_argument("mixed_julia: degree must be >= 2");
        if (static_cast<int>(m.eps.size()) > m.degree - 1)
            throw std::invalid_argument("mixed_julia: too many lower-order coefficients");
    }
    double lo = spec.r_lo, hi = spec.r_hi;
    std::string last_error;
    for (int attempt = 0; attempt < 24; ++attempt) {
        try {
            SeedSet seed = SeedSet::annulus_set(lo, hi);
            std::vector<ConformalMap> maps;
            for (const auto& m : spec.maps)
                for (int k = 0; k < m.degree; ++k)
                    maps.emplace_back(JuliaBranchMap{m.degree, m.gamma, m.c, m.eps, k}, lo, hi);
            return IfsSystem(std::move(maps), seed);
        } catch (const std::exception& e) {
            last_error = e.what();
            if (!spec.auto_shrink) break;
            lo = 1.0 - 0.8 * (1.0 - lo);
            hi = 1.0 + 0.8 * (hi - 1.0);
            if (hi - lo < 0.02) break;
        }
    }
    throw std::invalid_argument("mixed_julia: no validating annulus found (" + last_error + ")");
}

} // namespace ifsdim
