#pragma once

#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace wjsr {

using Vec = std::vector<double>;
using Complex = std::complex<double>;

// Numerical failure (branch cuts, non-convergence, singular solves).
// Bad *input* (shape mismatch, invalid options) throws std::invalid_argument instead.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense row-major real matrix. Sizes here are small (state dimension of a
// switching system), so everything is plain O(n^3) dense linear algebra.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : r_(rows), c_(cols), a_(size_t(rows) * cols, 0.0) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative dimension");
    }
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    static Mat identity(int n);
    static Mat zero(int rows, int cols) { return Mat(rows, cols); }

    int rows() const { return r_; }
    int cols() const { return c_; }
    bool square() const { return r_ == c_; }

    double& operator()(int i, int j) { return a_[size_t(i) * c_ + j]; }
    double operator()(int i, int j) const { return a_[size_t(i) * c_ + j]; }

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(double s);

    Mat transpose() const;
    double trace() const;

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

private:
    int r_ = 0, c_ = 0;
    std::vector<double> a_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double s, Mat a);
bool operator==(const Mat& a, const Mat& b);

Vec mat_vec(const Mat& m, const Vec& x);   // m * x

// Vector helpers.
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double norm_inf(const Vec& a);
Vec scaled(const Vec& a, double s);
Vec vsub(const Vec& a, const Vec& b);

double norm_inf(const Mat& m);   // max row sum
double norm_one(const Mat& m);   // max column sum
double norm_fro(const Mat& m);

// LU with partial pivoting; used for solves, determinants and inverse iteration.
struct Lu {
    Mat lu;
    std::vector<int> perm;
    int sign = 1;
    bool singular = false;
};
Lu lu_factor(const Mat& m);
Vec lu_solve(const Lu& f, Vec b);
Mat lu_solve(const Lu& f, const Mat& b);
Mat inverse(const Mat& m);       // throws NumericalError on singular input
double determinant(const Mat& m);

// All eigenvalues. Closed form for d <= 3 (quadratic / Cardano), LAPACK
// dgeev for d >= 4. Order is unspecified.
std::vector<Complex> eigenvalues(const Mat& m);

// Eigenvalues of a symmetric matrix via cyclic Jacobi (values only, ascending).
std::vector<double> symmetric_eigenvalues(Mat m);

double spectral_radius(const Mat& m);

struct EigenResult {
    double leading_modulus = 0.0;
    Vec leading_vector;            // unit 2-norm, largest-|entry| positive; empty unless is_unique_simple && is_real
    bool is_unique_simple = false; // modulus gap above gap_tol and algebraic multiplicity one
    bool is_real = false;
};

// Leading eigenpair. `gap_tol` is the relative modulus gap below which the
// leading eigenvalue is reported as not unique/simple.
EigenResult leading_eigenpair(const Mat& m, double gap_tol = 1e-8);

// exp(t*M) by scaling and squaring with diagonal Pade approximants.
Mat expm(const Mat& m, double t = 1.0);

// Principal matrix logarithm via inverse scaling and squaring. Throws
// NumericalError naming the offending eigenvalue if the spectrum touches the
// closed negative real axis (branch cut), including 0.
Mat logm(const Mat& m);

// Largest singular value (spectral operator norm).
double operator_norm(const Mat& m);

std::string to_string(const Mat& m);

}  // namespace wjsr
