#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flowlab/tensor/ops.hpp"

using namespace flowlab;

namespace {

Mat mat2(double a, double b, double c, double d) {
    Mat m(2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = c;
    m(1, 1) = d;
    return m;
}

} // namespace

TEST_CASE("musical_sharp against direct multiplication") {
    // identity metric leaves the tensor alone
    Mat v = mat2(2, 0, 0, 3);
    Mat r = musical_sharp(Mat::identity(2), v);
    CHECK((r - v).frobenius() == doctest::Approx(0.0).epsilon(1e-14));

    // v = g gives the identity endomorphism
    Mat g = mat2(4, 0, 0, 1);
    r = musical_sharp(g, g);
    CHECK((r - Mat::identity(2)).frobenius() == doctest::Approx(0.0).epsilon(1e-14));

    // random SPD g, random symmetric v: g * sharp = v and the sharp is
    // g-self-adjoint
    SplitMix64 rng(7);
    for (int n = 1; n <= 3; ++n) {
        for (int rep = 0; rep < 50; ++rep) {
            const Mat gg = random_spd(rng, 2 * n);
            const Mat vv = random_symmetric(rng, 2 * n);
            const Mat sharp = musical_sharp(gg, vv);
            CHECK((gg * sharp - vv).frobenius() <= 1e-12 * (1.0 + vv.frobenius()));
            CHECK((g_transpose(sharp, gg) - sharp).frobenius() <=
                  1e-11 * (1.0 + sharp.frobenius()));
        }
    }

    CHECK_THROWS_AS(musical_sharp(mat2(1, 0, 0, -1), Mat::identity(2)), InvalidMetric);
}

TEST_CASE("form/metric dictionary roundtrip") {
    const Mat jstd = j_standard(2);
    Mat w = omega_from(Mat::identity(2), jstd);
    CHECK((w - jstd).frobenius() == doctest::Approx(0.0));
    CHECK((g_from(w, jstd) - Mat::identity(2)).frobenius() == doctest::Approx(0.0));

    SplitMix64 rng(11);
    for (int n = 1; n <= 3; ++n) {
        for (int rep = 0; rep < 40; ++rep) {
            Mat g(2 * n), j(2 * n);
            random_compatible_pair(rng, 2 * n, g, j);
            const Mat om = omega_from(g, j);
            CHECK((g_from(om, j) - g).frobenius() <= 1e-12 * (1.0 + g.frobenius()));
        }
    }

    // incompatible pair reports the defect
    Mat bad = mat2(0, -2, 1, 0); // not a complex structure for I
    CHECK_THROWS_AS(omega_from(Mat::identity(2), bad), CompatibilityError);
}

TEST_CASE("type split commutes/anticommutes and re-sums") {
    const Mat jstd = j_standard(2);

    // A = J splits as (J, 0)
    auto sp = type_split(jstd, jstd);
    CHECK((sp.j_linear - jstd).frobenius() <= 1e-14);
    CHECK(sp.j_antilinear.frobenius() <= 1e-14);

    // A = diag(1,-1) is purely antilinear for the standard J
    const Mat a = mat2(1, 0, 0, -1);
    sp = type_split(a, jstd);
    CHECK(sp.j_linear.frobenius() <= 1e-14);
    CHECK((sp.j_antilinear - a).frobenius() <= 1e-14);

    SplitMix64 rng(13);
    for (int n = 1; n <= 3; ++n) {
        for (int rep = 0; rep < 40; ++rep) {
            Mat g(2 * n), j(2 * n);
            random_compatible_pair(rng, 2 * n, g, j);
            Mat x(2 * n);
            for (int i = 0; i < 2 * n; ++i)
                for (int k = 0; k < 2 * n; ++k) x(i, k) = rng.uniform(-1, 1);
            auto s = type_split(x, j);
            CHECK((s.j_linear + s.j_antilinear - x).frobenius() <= 1e-12 * (1 + x.frobenius()));
            CHECK(commutator(j, s.j_linear).frobenius() <= 1e-11 * (1 + x.frobenius()));
            CHECK((j * s.j_antilinear + s.j_antilinear * j).frobenius() <=
                  1e-11 * (1 + x.frobenius()));
        }
    }
}

TEST_CASE("g-norm identities") {
    const Mat jstd = j_standard(2);
    CHECK(g_norm(jstd, Mat::identity(2)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(g_norm(Mat::identity(2), mat2(3, 1, 1, 2)) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    // |J|_g^2 = 2n for every compatible pair
    SplitMix64 rng(17);
    for (int n = 1; n <= 3; ++n) {
        for (int rep = 0; rep < 60; ++rep) {
            Mat g(2 * n), j(2 * n);
            random_compatible_pair(rng, 2 * n, g, j);
            const double nrm = g_norm(j, g);
            CHECK(std::abs(nrm * nrm - 2.0 * n) <= 1e-11 * (1.0 + nrm * nrm));
        }
    }
}
