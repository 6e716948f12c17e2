#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flowlab/core/poly_filter.hpp"
#include "flowlab/core/rng.hpp"
#include "flowlab/geom/ops.hpp"

using namespace flowlab;

namespace {

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("backgrounds: round metric, standard J, normalized volume") {
    Geometry geo((Grid(6.0, 801)));
    const Grid& g = geo.grid;
    // center node carries the identity metric
    CHECK((geo.round[g.center()] - M2::identity()).frobenius() <= 1e-15);
    // normalized mass is 4 pi to quadrature accuracy
    CHECK(std::abs(geo.dv_round.mass(g) - kTotalMass) <= 1e-8);
    // the normalization factor is ~1 thanks to the pole-tail weights
    CHECK(std::abs(geo.dv_round.dens[g.center()] - 1.0) <= 1e-7);
    // (round, J_std) is exactly compatible
    CHECK(compat_defect(g, geo.round, geo.jstd) <= 1e-15);
    CHECK(jsq_defect(g, geo.jstd) <= 1e-15);
}

TEST_CASE("raw curvature stencil on the round sphere") {
    // every round-background quantity is a low-degree polynomial in tanh(s),
    // which the stencils differentiate exactly: the raw error is round-off
    auto raw_k_err = [](int n) {
        Grid g(6.0, n);
        const TensorField round = round_metric(g);
        const ChristoffelField ch = christoffels(g, round);
        const TensorField ric = ricci_raw(g, ch);
        const ScalarField sc = scal_of(g, round, ric);
        double worst = 0.0;
        for (int i = 0; i < g.n; ++i) worst = std::max(worst, std::abs(0.5 * sc[i] - 1.0));
        return worst;
    };
    CHECK(raw_k_err(801) <= 5e-4);
    CHECK(raw_k_err(801) <= 2e-6);
    CHECK(raw_k_err(1601) <= 2e-6);
}

TEST_CASE("well-balanced curvature: exact on round, scale invariant, 2nd order off round") {
    Geometry geo((Grid(6.0, 801)));
    const Grid& g = geo.grid;

    auto pack = curvature_package(geo, geo.round);
    CHECK(max_abs_diff(pack.gauss, ScalarField(g.n, 1.0)) <= 1e-12);
    for (int i = 0; i < g.n; ++i)
        CHECK((pack.ricci[i] - geo.round[i]).max_abs() <= 1e-12);

    // scaled metric: K = 1/4, Ricci unchanged
    TensorField scaled(g.n);
    for (int i = 0; i < g.n; ++i) scaled[i] = geo.round[i] * 4.0;
    pack = curvature_package(geo, scaled);
    CHECK(max_abs_diff(pack.gauss, ScalarField(g.n, 0.25)) <= 1e-12);
    for (int i = 0; i < g.n; ++i)
        CHECK((pack.ricci[i] - geo.round[i]).max_abs() <= 1e-12);

    // conformal perturbation e^{2 eps mu} round with mu = tanh^2:
    // K = e^{-2 eps mu} (1 - 2 eps (sech^2 - 2 tanh^2))
    auto k_err = [](int n) {
        Geometry geo2((Grid(6.0, n)));
        const Grid& gg = geo2.grid;
        const double eps = 0.01;
        TensorField pert(gg.n);
        ScalarField k_exact(gg.n);
        for (int i = 0; i < gg.n; ++i) {
            const double t = gg.t[i], s2 = gg.sech2[i];
            const double mu = t * t;
            pert[i] = geo2.round[i] * std::exp(2.0 * eps * mu);
            k_exact[i] = std::exp(-2.0 * eps * mu) * (1.0 - 2.0 * eps * (s2 - 2.0 * t * t));
        }
        auto p = curvature_package(geo2, pert);
        double w = 0.0;
        for (int i = 0; i < gg.n; ++i) w = std::max(w, std::abs(p.gauss[i] - k_exact[i]));
        return w;
    };
    const double e1 = k_err(801);
    const double e2 = k_err(1601);
    CHECK(e1 <= 5e-4);
    CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("scalar calculus on the round sphere") {
    Geometry geo((Grid(6.0, 801)));
    const Grid& g = geo.grid;
    const ChristoffelField ch = christoffels(g, geo.round);

    // constant potential: everything vanishes
    {
        const ScalarField c(g.n, 2.5);
        const auto grad = gradient(g, geo.round, c);
        const auto hess = hessian(g, ch, c);
        for (int i = 0; i < g.n; ++i) {
            CHECK(std::abs(grad.vs[i]) <= 1e-12);
            CHECK(hess[i].max_abs() <= 1e-12);
        }
    }

    // f = tanh s: Delta f = 2 tanh s and Hess* = -tanh(s) I (holomorphic gradient)
    ScalarField f(g.n);
    for (int i = 0; i < g.n; ++i) f[i] = g.t[i];
    const auto hess = hessian(g, ch, f);
    const auto lap = laplacian(g, geo.round, hess);
    double worst_lap = 0.0, worst_hess = 0.0;
    for (int i = 0; i < g.n; ++i) {
        worst_lap = std::max(worst_lap, std::abs(lap[i] - 2.0 * g.t[i]));
        const M2 hstar = geo.round[i].inverse() * hess[i];
        worst_hess = std::max(worst_hess, (hstar - M2::identity() * (-g.t[i])).max_abs());
    }
    CHECK(worst_lap <= 2e-4);
    CHECK(worst_hess <= 2e-4);

    // gradient of tanh is the unit coordinate field d_s
    const auto grad = gradient(g, geo.round, f);
    for (int i = 0; i < g.n; i += 100) {
        CHECK(std::abs(grad.vs[i] - 1.0) <= 5e-4);
        CHECK(std::abs(grad.vt[i]) <= 1e-12);
    }
}

TEST_CASE("bakry-emery tensor") {
    Geometry geo((Grid(6.0, 801)));
    const Grid& g = geo.grid;

    // Einstein case: exact fixed point of the well-balanced operator
    auto be = bakry_emery(geo, geo.round, geo.dv_round);
    for (int i = 0; i < g.n; ++i)
        CHECK((be[i] - geo.round[i]).max_abs() <= 1e-10);

    // constant rescale: ratio log is constant, so the Hessian drops out
    TensorField scaled(g.n);
    for (int i = 0; i < g.n; ++i) scaled[i] = geo.round[i] * 4.0;
    be = bakry_emery(geo, scaled, geo.dv_round);
    for (int i = 0; i < g.n; ++i)
        CHECK((be[i] - geo.round[i]).max_abs() <= 1e-10);

    // tilted volume form: Ric_g(Omega) = round + c Hess(tanh), and
    // Hess(tanh) = -tanh sech^2 I on the round sphere
    const double c = 0.3;
    const VolumeForm vol = tanh_volume(g, c);
    be = bakry_emery(geo, geo.round, vol);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const M2 expect = geo.round[i] + M2::identity() * (-c * g.t[i] * g.sech2[i]);
        worst = std::max(worst, (be[i] - expect).max_abs());
    }
    CHECK(worst <= 2e-4);
}

TEST_CASE("ricci form: exactness, tilted volume, curvature identity") {
    Geometry geo((Grid(6.0, 801)));
    const Grid& g = geo.grid;

    // round volume reproduces the round form exactly (well-balanced)
    auto rf = ricci_form_std(geo, geo.dv_round);
    CHECK(max_abs_diff(rf.comp, g.sech2) <= 1e-10);

    // e^{-c tanh} volume: component sech^2 (1 - c tanh); positive iff |c| < 1
    const double c = 0.3;
    auto rf_tanh = ricci_form_std(geo, tanh_volume(g, c));
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
        worst = std::max(worst,
                         std::abs(rf_tanh.comp[i] - g.sech2[i] * (1.0 - c * g.t[i])));
    CHECK(worst <= 2e-4);

    // identity Ric(g) = -Ric_J(omega^n) J for a Kahler pair, at stencil order
    auto identity_residual = [](int n) {
        Geometry geo2((Grid(6.0, n)));
        const Grid& gg = geo2.grid;
        const double eps = 0.05;
        TensorField metric(gg.n);
        VolumeForm vol; // omega^n as a density; normalization is irrelevant here
        vol.dens.resize(gg.n);
        for (int i = 0; i < gg.n; ++i) {
            const double f = std::exp(2.0 * eps * gg.t[i] * gg.t[i]);
            metric[i] = geo2.round[i] * f;
            vol.dens[i] = gg.sech2[i] * f;
        }
        const auto pack = curvature_package(geo2, metric);
        const auto form = ricci_form_std(geo2, vol);
        double w = 0.0;
        for (int i = 0; i < gg.n; ++i) {
            const M2 lhs = pack.ricci[i];
            const M2 rhs = (M2::two_form(form.comp[i]) * geo2.jstd[i]) * -1.0;
            w = std::max(w, (lhs - rhs).max_abs());
        }
        return w;
    };
    const double r1 = identity_residual(801);
    const double r2 = identity_residual(1601);
    CHECK(r1 <= 5e-4);
    CHECK(r1 / r2 >= 3.5);
}

TEST_CASE("ricci form inverse and roundtrip") {
    Geometry geo((Grid(6.0, 801)));
    const Grid& g = geo.grid;

    // omega_round -> dV_round
    TwoFormField w;
    w.comp = g.sech2;
    const VolumeForm vol = ricci_form_inverse(geo, w);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
        worst = std::max(worst, std::abs(vol.dens[i] - geo.dv_round.dens[i]));
    CHECK(worst <= 2e-4);
    CHECK(std::abs(vol.mass(g) - kTotalMass) <= 1e-8);

    // roundtrip on a tilted positive form
    TwoFormField wt;
    wt.comp.resize(g.n);
    for (int i = 0; i < g.n; ++i) wt.comp[i] = g.sech2[i] * (1.0 - 0.3 * g.t[i]);
    const VolumeForm v2 = ricci_form_inverse(geo, wt);
    const auto back = ricci_form_std(geo, v2);
    CHECK(max_abs_diff(back.comp, wt.comp) <= 2e-4);

    // non-positive component refuses
    TwoFormField bad;
    bad.comp.assign(g.n, -1.0);
    CHECK_THROWS_AS(ricci_form_inverse(geo, bad), NotFano);
}

TEST_CASE("dbar gradient: holomorphic and non-holomorphic witnesses") {
    auto defect_of = [](int n, int power) {
        Geometry geo((Grid(6.0, n)));
        const Grid& g = geo.grid;
        ScalarField f(g.n);
        for (int i = 0; i < g.n; ++i) f[i] = std::pow(g.t[i], power);
        const auto e = dbar_gradient(geo, geo.round, geo.jstd, f);
        return l2_norm_endo(g, e, geo.round);
    };

    // tanh has holomorphic gradient: the defect vanishes (here to round-off,
    // since every intermediate is quadratic in tanh)
    CHECK(defect_of(801, 1) <= 1e-9);
    CHECK(defect_of(1601, 1) <= 1e-9);

    // tanh^2 does not: defect approaches sqrt(64 pi / 15) = 3.6612...
    const double expect = std::sqrt(64.0 * kPi / 15.0);
    const double q801 = defect_of(801, 2);
    const double q1601 = defect_of(1601, 2);
    CHECK(std::abs(q801 - expect) <= 1e-2);
    CHECK(std::abs(q1601 - expect) <= 1e-2);
    // and the truncation error of the defect decays at 2nd order
    CHECK(std::abs(q801 - expect) / std::abs(q1601 - expect) >= 3.5);

    // tanh^3 witness with its closed-form defect sqrt(576 pi / 105)
    const double cubic = std::sqrt(576.0 * kPi / 105.0);
    const double c801 = defect_of(801, 3);
    CHECK(std::abs(c801 - cubic) <= 1e-2);

    // constant potential: identically zero
    Geometry geo((Grid(6.0, 401)));
    const auto e0 = dbar_gradient(geo, geo.round, geo.jstd, ScalarField(geo.grid.n, 1.0));
    for (int i = 0; i < geo.grid.n; ++i) CHECK(e0[i].max_abs() <= 1e-12);
}

TEST_CASE("smooth projector reproduces band fields and kills grid noise") {
    Grid g(6.0, 801);
    SmoothProjector proj(g, 6);

    // polynomial in tanh passes through unchanged
    ScalarField f(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double t = g.t[i];
        f[i] = 0.3 - 1.2 * t + 0.5 * t * t * t - 0.1 * t * t * t * t * t * t;
    }
    CHECK(max_abs_diff(proj.scalar(f), f) <= 1e-11);

    // white noise mostly dies; only the 7-dimensional band survives
    SplitMix64 rng(97);
    ScalarField noise(g.n);
    for (int i = 0; i < g.n; ++i) noise[i] = rng.uniform(-1.0, 1.0);
    const ScalarField pn = proj.scalar(noise);
    double rms = 0.0;
    for (int i = 0; i < g.n; ++i) rms += pn[i] * pn[i];
    rms = std::sqrt(rms / g.n);
    CHECK(rms <= 0.15);

    // tensor projection keeps smooth band tensors exactly: a conformal part
    // plus a traceless spin-2 part with the right pole weights
    TensorField x(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double s2 = g.sech2[i], t = g.t[i];
        const double tr = s2 * (2.0 + t);
        const double dd = s2 * (1.0 - t * t) * (0.3 - 0.7 * t);
        const double off = s2 * (1.0 - t * t) * 0.4;
        x[i] = {tr + dd, off, off, tr - dd};
    }
    const TensorField px = proj.sym_tensor(g, x);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i) worst = std::max(worst, (px[i] - x[i]).max_abs());
    CHECK(worst <= 1e-11);
}

TEST_CASE("general-J curvature form agrees with the density route at J_std") {
    Geometry geo((Grid(6.0, 801)));
    const Grid& g = geo.grid;
    // exact agreement on the round state
    auto a = ricci_form(geo, geo.dv_round, geo.round, geo.jstd);
    auto b = ricci_form_std(geo, geo.dv_round);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i) worst = std::max(worst, std::abs(a.comp[i] - b.comp[i]));
    CHECK(worst <= 1e-9);

    // 2nd-order agreement on a conformal Kahler state with a tilted volume
    auto mismatch = [](int n) {
        Geometry geo2((Grid(6.0, n)));
        const Grid& gg = geo2.grid;
        TensorField metric(gg.n);
        for (int i = 0; i < gg.n; ++i)
            metric[i] = geo2.round[i] * std::exp(2.0 * 0.05 * gg.t[i] * gg.t[i]);
        const VolumeForm vol = tanh_volume(gg, 0.3);
        const auto ga = ricci_form(geo2, vol, metric, geo2.jstd);
        const auto gb = ricci_form_std(geo2, vol);
        double w = 0.0;
        for (int i = 0; i < gg.n; ++i) w = std::max(w, std::abs(ga.comp[i] - gb.comp[i]));
        return w;
    };
    const double m1 = mismatch(801);
    const double m2 = mismatch(1601);
    CHECK(m1 <= 5e-4);
    CHECK(m1 / m2 >= 3.5);
}
