#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "wjsr/matrix.hpp"

using namespace wjsr;

namespace {

Mat random_mat(std::mt19937& rng, int n, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = u(rng);
    return m;
}

double max_abs_diff(const Mat& a, const Mat& b) {
    double d = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

Mat rotation(double theta) {
    return Mat{{std::cos(theta), -std::sin(theta)}, {std::sin(theta), std::cos(theta)}};
}

}  // namespace

TEST_CASE("matrix arithmetic and shape checks", "[matrix]") {
    Mat a{{1.0, 2.0}, {3.0, 4.0}};
    Mat b{{0.0, 1.0}, {1.0, 0.0}};

    Mat c = a * b;
    REQUIRE(c(0, 0) == Catch::Approx(2.0));
    REQUIRE(c(0, 1) == Catch::Approx(1.0));
    REQUIRE(c(1, 0) == Catch::Approx(4.0));
    REQUIRE(c(1, 1) == Catch::Approx(3.0));

    REQUIRE(a.trace() == Catch::Approx(5.0));
    REQUIRE(a.transpose()(0, 1) == Catch::Approx(3.0));

    Vec x = mat_vec(a, {1.0, -1.0});
    REQUIRE(x[0] == Catch::Approx(-1.0));
    REQUIRE(x[1] == Catch::Approx(-1.0));

    REQUIRE_THROWS_AS(Mat({{1.0, 2.0}, {3.0}}), std::invalid_argument);
    REQUIRE_THROWS_AS(a * Mat(3, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(mat_vec(a, Vec{1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("vector norms and helpers", "[matrix]") {
    Vec v{3.0, -4.0};
    REQUIRE(norm2(v) == Catch::Approx(5.0));
    REQUIRE(norm_inf(v) == Catch::Approx(4.0));
    REQUIRE(dot(v, Vec{1.0, 1.0}) == Catch::Approx(-1.0));
    Vec s = scaled(v, 0.5);
    REQUIRE(s[0] == Catch::Approx(1.5));
    Vec d = vsub(v, Vec{1.0, 1.0});
    REQUIRE(d[1] == Catch::Approx(-5.0));
}

TEST_CASE("operator norm equals largest singular value", "[matrix]") {
    REQUIRE(operator_norm(Mat::identity(3)) == Catch::Approx(1.0));
    REQUIRE(operator_norm(Mat{{3.0, 0.0}, {0.0, 2.0}}) == Catch::Approx(3.0));
    REQUIRE(operator_norm(rotation(0.7)) == Catch::Approx(1.0));

    // Jordan block [[3,1],[0,3]]: sigma_max^2 is the larger root of
    // x^2 - 19x + 81, i.e. (19 + sqrt(37)) / 2.
    double expected = std::sqrt((19.0 + std::sqrt(37.0)) / 2.0);
    REQUIRE(operator_norm(Mat{{3.0, 1.0}, {0.0, 3.0}}) == Catch::Approx(expected).epsilon(1e-12));

    // Submultiplicative and symmetric under transpose.
    std::mt19937 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        Mat m = random_mat(rng, 3);
        Mat n = random_mat(rng, 3);
        REQUIRE(operator_norm(m * n) <= operator_norm(m) * operator_norm(n) + 1e-12);
        REQUIRE(operator_norm(m.transpose()) == Catch::Approx(operator_norm(m)).margin(1e-12));
    }
}

TEST_CASE("matrix norms", "[matrix]") {
    Mat m{{1.0, -2.0}, {3.0, 4.0}};
    REQUIRE(norm_inf(m) == Catch::Approx(7.0));   // max row sum
    REQUIRE(norm_one(m) == Catch::Approx(6.0));   // max column sum
    REQUIRE(norm_fro(m) == Catch::Approx(std::sqrt(30.0)));
}

TEST_CASE("eigenvalues match trace and determinant", "[matrix][eig]") {
    std::mt19937 rng(7);
    for (int n : {2, 3, 4, 5, 6}) {
        for (int trial = 0; trial < 10; ++trial) {
            Mat m = random_mat(rng, n, 2.0);
            auto eig = eigenvalues(m);
            REQUIRE(int(eig.size()) == n);
            Complex sum{0.0, 0.0}, prod{1.0, 0.0};
            for (const auto& z : eig) {
                sum += z;
                prod *= z;
            }
            REQUIRE(sum.real() == Catch::Approx(m.trace()).margin(1e-8));
            REQUIRE(std::abs(sum.imag()) < 1e-8);
            REQUIRE(prod.real() == Catch::Approx(determinant(m)).margin(1e-6));
        }
    }
}

TEST_CASE("eigenvalues of closed-form cases", "[matrix][eig]") {
    // Scaled rotation: r * e^{+-i theta}.
    double r = 1.7, th = 0.6;
    Mat m = r * rotation(th);
    auto eig = eigenvalues(m);
    std::sort(eig.begin(), eig.end(),
              [](const Complex& a, const Complex& b) { return a.imag() < b.imag(); });
    REQUIRE(std::abs(eig[0] - Complex(r * std::cos(th), -r * std::sin(th))) < 1e-12);
    REQUIRE(std::abs(eig[1] - Complex(r * std::cos(th), r * std::sin(th))) < 1e-12);

    // Companion matrix of (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6.
    Mat comp{{6.0, -11.0, 6.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    auto ce = eigenvalues(comp);
    std::vector<double> mods;
    for (const auto& z : ce) {
        REQUIRE(std::abs(z.imag()) < 1e-9);
        mods.push_back(z.real());
    }
    std::sort(mods.begin(), mods.end());
    REQUIRE(mods[0] == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(mods[1] == Catch::Approx(2.0).margin(1e-9));
    REQUIRE(mods[2] == Catch::Approx(3.0).margin(1e-9));
}

TEST_CASE("eigenvalues of graded near-nilpotent 4x4", "[matrix][eig]") {
    // Anti-block-diagonal with one block O(1) and one block O(1e-16), the
    // shape produced by long products of lifted dwell generators. Eigenvalues
    // are +-sqrt(eig(R*S)) with R*S ~ 1e-16, far below the matrix norm.
    Mat m(4, 4);
    m(0, 2) = 1.0;
    m(0, 3) = 2.0;
    m(1, 2) = 3.0;
    m(1, 3) = 4.1;
    m(2, 0) = 1.3e-16;
    m(2, 1) = 2.9e-16;
    m(3, 0) = 4.4e-17;
    m(3, 1) = 8.1e-16;

    std::vector<Complex> eig;
    REQUIRE_NOTHROW(eig = eigenvalues(m));
    REQUIRE(eig.size() == 4);
    Complex sum{0.0, 0.0};
    for (const auto& z : eig) {
        REQUIRE(std::abs(z) < 1e-7);
        sum += z;
    }
    REQUIRE(std::abs(sum) < 1e-9);
    REQUIRE(spectral_radius(m) < 1e-7);
}

TEST_CASE("spectral radius is multiplicative along powers", "[matrix][eig]") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + trial % 3;
        Mat m = random_mat(rng, n);
        double rho = spectral_radius(m);
        Mat p = m;
        for (int k = 2; k <= 6; ++k) {
            p = p * m;
            REQUIRE(spectral_radius(p) == Catch::Approx(std::pow(rho, k)).margin(1e-9 * std::pow(std::max(rho, 1.0), k)));
        }
    }
}

TEST_CASE("symmetric eigenvalues ascend and match closed form", "[matrix][eig]") {
    Mat m{{2.0, 1.0}, {1.0, 2.0}};
    auto ev = symmetric_eigenvalues(m);
    REQUIRE(ev.size() == 2);
    REQUIRE(ev[0] == Catch::Approx(1.0));
    REQUIRE(ev[1] == Catch::Approx(3.0));

    std::mt19937 rng(3);
    Mat a = random_mat(rng, 5);
    Mat s = a + a.transpose();
    auto se = symmetric_eigenvalues(s);
    REQUIRE(std::is_sorted(se.begin(), se.end()));
    double sum = 0.0;
    for (double v : se) sum += v;
    REQUIRE(sum == Catch::Approx(s.trace()).margin(1e-9));
}

TEST_CASE("leading eigenpair", "[matrix][eig]") {
    auto d = leading_eigenpair(Mat{{3.0, 0.0}, {0.0, 1.0}});
    REQUIRE(d.is_unique_simple);
    REQUIRE(d.is_real);
    REQUIRE(d.leading_modulus == Catch::Approx(3.0));
    REQUIRE(std::abs(d.leading_vector[0]) == Catch::Approx(1.0));
    REQUIRE(d.leading_vector[1] == Catch::Approx(0.0).margin(1e-10));

    // Complex pair of equal modulus: not unique/simple in the real sense.
    auto r = leading_eigenpair(rotation(1.0));
    REQUIRE_FALSE((r.is_unique_simple && r.is_real));

    // Defective double eigenvalue: no modulus gap.
    auto j = leading_eigenpair(Mat{{3.0, 1.0}, {0.0, 3.0}});
    REQUIRE_FALSE(j.is_unique_simple);

    // Residual check on a generic matrix: M v = lambda v.
    Mat m{{2.0, 1.0, 0.0}, {0.5, 1.5, 0.3}, {0.1, 0.0, 0.5}};
    auto e = leading_eigenpair(m);
    REQUIRE(e.is_unique_simple);
    REQUIRE(e.is_real);
    Vec mv = mat_vec(m, e.leading_vector);
    for (size_t i = 0; i < mv.size(); ++i)
        REQUIRE(mv[i] == Catch::Approx(e.leading_modulus * e.leading_vector[i]).margin(1e-9));
}

TEST_CASE("lu solve, determinant, inverse", "[matrix]") {
    Mat m{{4.0, 3.0}, {6.0, 3.0}};
    REQUIRE(determinant(m) == Catch::Approx(-6.0));

    Vec x = lu_solve(lu_factor(m), Vec{10.0, 12.0});
    REQUIRE(x[0] == Catch::Approx(1.0));
    REQUIRE(x[1] == Catch::Approx(2.0));

    Mat inv = inverse(m);
    REQUIRE(max_abs_diff(m * inv, Mat::identity(2)) < 1e-12);

    Mat sing{{1.0, 2.0}, {2.0, 4.0}};
    REQUIRE_THROWS_AS(inverse(sing), NumericalError);
    REQUIRE(determinant(sing) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("matrix exponential identities", "[matrix][expm]") {
    REQUIRE(max_abs_diff(expm(Mat::zero(3, 3)), Mat::identity(3)) < 1e-15);

    Mat d{{0.3, 0.0}, {0.0, -1.2}};
    Mat ed = expm(d);
    REQUIRE(ed(0, 0) == Catch::Approx(std::exp(0.3)).epsilon(1e-13));
    REQUIRE(ed(1, 1) == Catch::Approx(std::exp(-1.2)).epsilon(1e-13));
    REQUIRE(ed(0, 1) == Catch::Approx(0.0).margin(1e-15));

    // Rotation generator integrates to a rotation.
    Mat gen{{0.0, -1.0}, {1.0, 0.0}};
    REQUIRE(max_abs_diff(expm(gen, 0.9), rotation(0.9)) < 1e-13);

    // Nilpotent: e^N = I + N.
    Mat nil{{0.0, 1.0}, {0.0, 0.0}};
    REQUIRE(max_abs_diff(expm(nil), Mat{{1.0, 1.0}, {0.0, 1.0}}) < 1e-15);

    // Inverse of the flow.
    std::mt19937 rng(5);
    Mat a = random_mat(rng, 4);
    REQUIRE(max_abs_diff(expm(a) * expm(a, -1.0), Mat::identity(4)) < 1e-12);

    // Semigroup in t.
    REQUIRE(max_abs_diff(expm(a, 0.4) * expm(a, 0.6), expm(a, 1.0)) < 1e-12);

    REQUIRE_THROWS_AS(expm(Mat(2, 3)), std::invalid_argument);
}

TEST_CASE("matrix logarithm inverts expm on safe spectra", "[matrix][expm]") {
    REQUIRE(max_abs_diff(logm(Mat::identity(3)), Mat::zero(3, 3)) < 1e-12);

    std::mt19937 rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        Mat a = random_mat(rng, 3, 0.6);  // keep spectrum inside the principal strip
        Mat back = logm(expm(a));
        REQUIRE(max_abs_diff(back, a) < 1e-9);
    }

    // Branch cut: spectrum touching the closed negative real axis.
    REQUIRE_THROWS_AS(logm(Mat{{-1.0, 0.0}, {0.0, 1.0}}), NumericalError);
    REQUIRE_THROWS_AS(logm(Mat{{0.0, 0.0}, {0.0, 1.0}}), NumericalError);
}
