#include "doctest.h"

#include "crr_reference.hpp"
#include "esocp/pricer_full.hpp"

#include <cmath>
#include <limits>

using namespace esocp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Model base() { return validate(ModelParams{}); }

}  // namespace

TEST_CASE("no switching reduces to a single-regime CRR tree") {
    ModelParams p;
    p.lambda = 0.0;
    const Model m = validate(p);
    for (int n : {1, 7, 200, 1000}) {
        const FullInfoResult r = price_full(m, n);
        const double american0 = crr_reference::call(p.spot, p.strike, p.r, p.mu0, p.sigma, p.maturity, n, true);
        const double american1 = crr_reference::call(p.spot, p.strike, p.r, p.mu1, p.sigma, p.maturity, n, true);
        CHECK(std::abs(r.v0_root - american0) <= 1e-12);
        CHECK(std::abs(r.v1_root - american1) <= 1e-12);
        const EuropeanValues e = price_european_reference(m, n);
        CHECK(std::abs(e.regime1 - crr_reference::call(p.spot, p.strike, p.r, p.mu1, p.sigma, p.maturity, n, false)) <=
              1e-12);
    }
}

TEST_CASE("single step closed form") {
    ModelParams p;
    p.maturity = 0.5;
    const Model m = validate(p);
    const LatticeSetup s = make_setup(m, 1);
    const FullInfoResult r = price_full(m, s);
    const double up_pay = s.lattice.spot * s.lattice.up - p.strike;
    const double expected0 = s.discount * (s.q.q00 * s.p.up0 + s.q.q01 * s.p.up1) * up_pay;
    const double expected1 = s.discount * s.p.up1 * up_pay;
    CHECK(r.v0_root == doctest::Approx(expected0).epsilon(1e-14));
    CHECK(r.v1_root == doctest::Approx(expected1).epsilon(1e-14));

    ModelParams tiny = p;
    tiny.maturity = 1e-10;
    tiny.spot = 130.0;
    CHECK(price_full(validate(tiny), 1).v0_root == doctest::Approx(30.0).epsilon(1e-6));
}

TEST_CASE("zero strike is exercised immediately") {
    ModelParams p;
    p.strike = 0.0;
    const FullInfoResult r = price_full(validate(p), 300);
    CHECK(r.v0_root == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(r.v1_root == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("high drifts never exercise early") {
    ModelParams p;
    p.mu0 = 0.05;
    p.mu1 = 0.05;
    const Model m = validate(p, DriftOrdering::allow_equal);
    const LatticeSetup s = make_setup(m, 500);
    const FullInfoResult r = price_full(m, s);
    const EuropeanValues e = price_european_reference(m, s);
    CHECK(std::abs(r.v0_root - e.regime0) <= 1e-9);
    CHECK(std::abs(r.v1_root - e.regime1) <= 1e-9);
    for (int k = 0; k < 500; ++k) {
        CHECK(r.boundary0[k] == kInf);
        CHECK(r.boundary1[k] == kInf);
    }
    CHECK(r.boundary0[500] == p.strike);

    ModelParams only_post;
    only_post.mu0 = 0.06;
    only_post.mu1 = 0.03;
    const FullInfoResult r1 = price_full(validate(only_post), 200);
    for (int k = 0; k < 200; ++k) CHECK(r1.boundary1[k] == kInf);
}

TEST_CASE("value slices satisfy the structural properties") {
    const Model m = base();
    const int n = 400;
    FullInfoOptions opts;
    opts.retain_slices = true;
    const FullInfoResult r = price_full(m, n, opts);
    REQUIRE(r.slices);
    const auto& s0 = r.slices->regime0;
    const auto& s1 = r.slices->regime1;
    CHECK(s0[0][0] == r.v0_root);
    CHECK(r.v0_root >= r.v1_root);
    bool dominance = true;
    bool intrinsic = true;
    bool monotone = true;
    bool convex = true;
    bool decay = true;
    for (int k = 0; k <= n; ++k) {
        for (int j = 0; j <= k; ++j) {
            const double x = r.lattice.price(k, j);
            dominance = dominance && s0[k][j] >= s1[k][j] - 1e-12;
            for (const auto* sl : {&s0, &s1}) {
                const double v = (*sl)[k][j];
                intrinsic = intrinsic && v >= std::max(x - m.params.strike, 0.0) && v >= 0.0;
                if (j > 0) monotone = monotone && v >= (*sl)[k][j - 1];
                if (j > 0 && j < k) {
                    // second difference on a non-uniform price grid
                    const double xl = r.lattice.price(k, j - 1);
                    const double xr = r.lattice.price(k, j + 1);
                    const double left = (v - (*sl)[k][j - 1]) / (x - xl);
                    const double right = ((*sl)[k][j + 1] - v) / (xr - x);
                    convex = convex && right - left >= -1e-10;
                }
                // same price two steps later is node (k+2, j+1)
                if (k + 2 <= n) decay = decay && (*sl)[k + 2][j + 1] <= v + 1e-10;
            }
        }
    }
    CHECK(dominance);
    CHECK(intrinsic);
    CHECK(monotone);
    CHECK(convex);
    CHECK(decay);
}

TEST_CASE("boundaries") {
    const Model m = base();
    const int n = 500;
    FullInfoOptions opts;
    opts.retain_slices = true;
    const FullInfoResult r = price_full(m, n, opts);
    CHECK(r.boundary0[n] == m.params.strike);
    CHECK(r.boundary1[n] == m.params.strike);

    const Boundary b0 = extract_boundary(*r.slices, Regime::pre_switch, r.lattice, m.params.strike);
    const Boundary b1 = extract_boundary(*r.slices, Regime::post_switch, r.lattice, m.params.strike);
    CHECK(b0 == r.boundary0);
    CHECK(b1 == r.boundary1);

    int finite1 = 0;
    for (int k = 0; k <= n; ++k) {
        if (std::isfinite(b0[k]) && std::isfinite(b1[k])) CHECK(b1[k] <= b0[k]);
        if (std::isfinite(b1[k])) ++finite1;
        if (k > 0 && std::isfinite(b1[k]) && std::isfinite(b1[k - 1])) {
            // non-increasing in time up to one lattice node
            CHECK(b1[k] <= b1[k - 1] * r.lattice.up * r.lattice.up * (1.0 + 1e-12));
        }
        if (k > 0 && std::isfinite(b0[k]) && std::isfinite(b0[k - 1])) {
            CHECK(b0[k] <= b0[k - 1] * r.lattice.up * r.lattice.up * (1.0 + 1e-12));
        }
    }
    CHECK(finite1 > n / 2);
    // every finite boundary point is in the money
    for (int k = 0; k < n; ++k) {
        if (std::isfinite(b1[k])) CHECK(b1[k] > m.params.strike);
    }
}

TEST_CASE("american dominates european") {
    for (double sigma : {0.2, 0.3, 0.4}) {
        ModelParams p;
        p.sigma = sigma;
        const Model m = validate(p);
        const LatticeSetup s = make_setup(m, 300);
        const FullInfoResult a = price_full(m, s);
        const EuropeanValues e = price_european_reference(m, s);
        CHECK(a.v0_root >= e.regime0);
        CHECK(a.v1_root >= e.regime1);
        CHECK(e.at_belief(0.0) == e.regime0);
        CHECK(e.at_belief(1.0) == e.regime1);
    }
}

TEST_CASE("literal exponent changes the values") {
    const Model m = base();
    FullInfoOptions literal;
    literal.convention = DriftConvention::literal_sqrt_h;
    const FullInfoResult a = price_full(m, 200);
    const FullInfoResult b = price_full(m, 200, literal);
    CHECK(a.v0_root != b.v0_root);
}
