#include "esocp/pricer_full.hpp"

#include <algorithm>
#include <limits>

namespace esocp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void fill_prices(const Lattice& lat, int k, std::vector<double>& prices) {
    prices.resize(k + 1);
    for (int j = 0; j <= k; ++j) prices[j] = lat.price(k, j);
}

}  // namespace

FullInfoResult price_full(const Model& model, const LatticeSetup& s, bool retain_slices) {
    const int n = s.lattice.steps;
    const double strike = model.params.strike;
    const auto& q = s.q;
    const auto& p = s.p;

    FullInfoResult out;
    out.lattice = s.lattice;
    out.boundary0.assign(n + 1, kInf);
    out.boundary1.assign(n + 1, kInf);
    out.boundary0[n] = strike;
    out.boundary1[n] = strike;

    std::vector<double> prices;
    fill_prices(s.lattice, n, prices);
    std::vector<double> v0(n + 1);
    std::vector<double> v1(n + 1);
    for (int j = 0; j <= n; ++j) v0[j] = v1[j] = std::max(prices[j] - strike, 0.0);

    if (retain_slices) {
        out.slices.emplace();
        out.slices->regime0.resize(n + 1);
        out.slices->regime1.resize(n + 1);
        out.slices->regime0[n] = v0;
        out.slices->regime1[n] = v1;
    }

    for (int k = n - 1; k >= 0; --k) {
        fill_prices(s.lattice, k, prices);
        int first0 = -1;
        int first1 = -1;
        for (int j = 0; j <= k; ++j) {
            const double e0 = p.up0 * v0[j + 1] + p.down0 * v0[j];
            const double e1 = p.up1 * v1[j + 1] + p.down1 * v1[j];
            const double c0 = s.discount * (q.q00 * e0 + q.q01 * e1);
            const double c1 = s.discount * (q.q10 * e0 + q.q11 * e1);
            const double intrinsic = std::max(prices[j] - strike, 0.0);
            if (first0 < 0 && exercise_optimal(intrinsic, c0)) first0 = j;
            if (first1 < 0 && exercise_optimal(intrinsic, c1)) first1 = j;
            v0[j] = std::max(intrinsic, c0);
            v1[j] = std::max(intrinsic, c1);
        }
        if (first0 >= 0) out.boundary0[k] = prices[first0];
        if (first1 >= 0) out.boundary1[k] = prices[first1];
        if (retain_slices) {
            out.slices->regime0[k].assign(v0.begin(), v0.begin() + k + 1);
            out.slices->regime1[k].assign(v1.begin(), v1.begin() + k + 1);
        }
    }
    out.v0_root = v0[0];
    out.v1_root = v1[0];
    return out;
}

FullInfoResult price_full(const Model& model, int steps, const FullInfoOptions& options) {
    return price_full(model, make_setup(model, steps, options.convention), options.retain_slices);
}

Boundary extract_boundary(const FullInfoSlices& slices, Regime regime, const Lattice& lattice, double strike) {
    const auto& values = slices.of(regime);
    const int n = lattice.steps;
    Boundary b(n + 1, kInf);
    b[n] = strike;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j <= k; ++j) {
            const double intrinsic = std::max(lattice.price(k, j) - strike, 0.0);
            // value = max(intrinsic, continuation), so the same test applies to the value
            if (exercise_optimal(intrinsic, values[k][j])) {
                b[k] = lattice.price(k, j);
                break;
            }
        }
    }
    return b;
}

EuropeanValues price_european_reference(const Model& model, const LatticeSetup& s) {
    const int n = s.lattice.steps;
    const double strike = model.params.strike;
    const auto& q = s.q;
    const auto& p = s.p;
    std::vector<double> v0(n + 1);
    std::vector<double> v1(n + 1);
    for (int j = 0; j <= n; ++j) v0[j] = v1[j] = std::max(s.lattice.price(n, j) - strike, 0.0);
    for (int k = n - 1; k >= 0; --k) {
        for (int j = 0; j <= k; ++j) {
            const double e0 = p.up0 * v0[j + 1] + p.down0 * v0[j];
            const double e1 = p.up1 * v1[j + 1] + p.down1 * v1[j];
            v0[j] = s.discount * (q.q00 * e0 + q.q01 * e1);
            v1[j] = s.discount * (q.q10 * e0 + q.q11 * e1);
        }
    }
    return {v0[0], v1[0]};
}

EuropeanValues price_european_reference(const Model& model, int steps, DriftConvention convention) {
    return price_european_reference(model, make_setup(model, steps, convention));
}

}  // namespace esocp
