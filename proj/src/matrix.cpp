#include "wjsr/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace wjsr {

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
    r_ = int(rows.size());
    c_ = r_ ? int(rows.begin()->size()) : 0;
    a_.reserve(size_t(r_) * c_);
    for (const auto& row : rows) {
        if (int(row.size()) != c_) throw std::invalid_argument("Mat: ragged initializer");
        a_.insert(a_.end(), row.begin(), row.end());
    }
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat& Mat::operator+=(const Mat& o) {
    if (r_ != o.r_ || c_ != o.c_) throw std::invalid_argument("Mat: shape mismatch in +=");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    if (r_ != o.r_ || c_ != o.c_) throw std::invalid_argument("Mat: shape mismatch in -=");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

Mat Mat::transpose() const {
    Mat t(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Mat::trace() const {
    double s = 0.0;
    for (int i = 0; i < std::min(r_, c_); ++i) s += (*this)(i, i);
    return s;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("Mat: shape mismatch in *");
    Mat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

bool operator==(const Mat& a, const Mat& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a.data() == b.data();
}

Vec mat_vec(const Mat& m, const Vec& x) {
    if (m.cols() != int(x.size())) throw std::invalid_argument("Mat: shape mismatch in apply");
    Vec y(m.rows(), 0.0);
    for (int i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vec& a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

Vec scaled(const Vec& a, double s) {
    Vec r(a);
    for (double& v : r) v *= s;
    return r;
}

Vec vsub(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vsub: size mismatch");
    Vec r(a);
    for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

double norm_inf(const Mat& m) {
    double best = 0.0;
    for (int i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols(); ++j) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

double norm_one(const Mat& m) {
    double best = 0.0;
    for (int j = 0; j < m.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

double norm_fro(const Mat& m) {
    double s = 0.0;
    for (double v : m.data()) s += v * v;
    return std::sqrt(s);
}

Lu lu_factor(const Mat& m) {
    if (!m.square()) throw std::invalid_argument("lu_factor: matrix not square");
    const int n = m.rows();
    Lu f{m, std::vector<int>(n), 1, false};
    for (int i = 0; i < n; ++i) f.perm[i] = i;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(f.lu(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(f.lu(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) { f.singular = true; continue; }
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
            f.sign = -f.sign;
        }
        for (int i = k + 1; i < n; ++i) {
            f.lu(i, k) /= f.lu(k, k);
            const double lik = f.lu(i, k);
            if (lik == 0.0) continue;
            for (int j = k + 1; j < n; ++j) f.lu(i, j) -= lik * f.lu(k, j);
        }
    }
    return f;
}

Vec lu_solve(const Lu& f, Vec b) {
    if (f.singular) throw NumericalError("lu_solve: singular matrix");
    const int n = f.lu.rows();
    if (int(b.size()) != n) throw std::invalid_argument("lu_solve: size mismatch");
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
        x[i] /= f.lu(i, i);
    }
    return x;
}

Mat lu_solve(const Lu& f, const Mat& b) {
    const int n = f.lu.rows();
    if (b.rows() != n) throw std::invalid_argument("lu_solve: shape mismatch");
    Mat x(n, b.cols());
    Vec col(n);
    for (int j = 0; j < b.cols(); ++j) {
        for (int i = 0; i < n; ++i) col[i] = b(i, j);
        Vec s = lu_solve(f, col);
        for (int i = 0; i < n; ++i) x(i, j) = s[i];
    }
    return x;
}

Mat inverse(const Mat& m) {
    Lu f = lu_factor(m);
    if (f.singular) throw NumericalError("inverse: singular matrix");
    return lu_solve(f, Mat::identity(m.rows()));
}

double determinant(const Mat& m) {
    Lu f = lu_factor(m);
    if (f.singular) return 0.0;
    double d = f.sign;
    for (int i = 0; i < m.rows(); ++i) d *= f.lu(i, i);
    return d;
}

namespace {

// LAPACK general eigenvalue driver (eigenvalues only).
extern "C" void dgeev_(const char* jobvl, const char* jobvr, const int* n,
                       double* a, const int* lda, double* wr, double* wi,
                       double* vl, const int* ldvl, double* vr, const int* ldvr,
                       double* work, const int* lwork, int* info);

std::vector<Complex> dense_eigenvalues(const Mat& m) {
    const int n = m.rows();
    // Column-major copy for LAPACK.
    std::vector<double> a(size_t(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a[size_t(j) * n + i] = m(i, j);
    std::vector<double> wr(n), wi(n);
    int info = 0;
    int lwork = -1;
    double wk_query = 0.0;
    dgeev_("N", "N", &n, a.data(), &n, wr.data(), wi.data(), nullptr, &n,
           nullptr, &n, &wk_query, &lwork, &info);
    if (info != 0) throw NumericalError("eigenvalues: workspace query failed");
    lwork = int(wk_query);
    std::vector<double> work(lwork);
    dgeev_("N", "N", &n, a.data(), &n, wr.data(), wi.data(), nullptr, &n,
           nullptr, &n, work.data(), &lwork, &info);
    if (info != 0) throw NumericalError("eigenvalues: QR iteration failed to converge");
    std::vector<Complex> w(n);
    for (int i = 0; i < n; ++i) w[i] = Complex(wr[i], wi[i]);
    return w;
}

std::vector<Complex> eig_2x2(double a, double b, double c, double d) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        // Stable pairing: compute the larger-magnitude root first, derive the
        // other from the determinant when possible.
        double l1 = 0.5 * (tr >= 0.0 ? tr + s : tr - s);
        double l2 = (l1 != 0.0) ? det / l1 : 0.5 * (tr >= 0.0 ? tr - s : tr + s);
        return {Complex(l1, 0.0), Complex(l2, 0.0)};
    }
    const double im = 0.5 * std::sqrt(-disc);
    return {Complex(0.5 * tr, im), Complex(0.5 * tr, -im)};
}

// Roots of lambda^3 + p2 lambda^2 + p1 lambda + p0 (real coefficients),
// by Cardano / trigonometric method.
std::vector<Complex> cubic_roots(double p2, double p1, double p0) {
    const double shift = p2 / 3.0;
    const double q = p1 - p2 * p2 / 3.0;
    const double r = 2.0 * p2 * p2 * p2 / 27.0 - p2 * p1 / 3.0 + p0;
    // Depressed cubic y^3 + q y + r = 0 with lambda = y - shift.
    const double half_r = r / 2.0, third_q = q / 3.0;
    const double disc = half_r * half_r + third_q * third_q * third_q;
    std::vector<Complex> roots;
    if (disc > 0.0) {  // one real root, complex pair
        const double s = std::sqrt(disc);
        const double u = std::cbrt(-half_r + s);
        const double v = std::cbrt(-half_r - s);
        const double y1 = u + v;
        const double re = -y1 / 2.0;
        const double im = std::sqrt(3.0) / 2.0 * (u - v);
        roots = {Complex(y1, 0.0), Complex(re, im), Complex(re, -im)};
    } else {  // three real roots
        const double rho = std::sqrt(std::max(0.0, -third_q * third_q * third_q));
        const double theta = std::acos(std::clamp(rho == 0.0 ? 0.0 : -half_r / rho, -1.0, 1.0));
        const double mag = 2.0 * std::sqrt(std::max(0.0, -third_q));
        for (int k = 0; k < 3; ++k)
            roots.push_back(Complex(mag * std::cos((theta + 2.0 * M_PI * k) / 3.0), 0.0));
    }
    for (auto& z : roots) z -= shift;
    return roots;
}

}  // namespace

std::vector<Complex> eigenvalues(const Mat& m) {
    if (!m.square()) throw std::invalid_argument("eigenvalues: matrix not square");
    const int n = m.rows();
    if (n == 0) return {};
    if (n == 1) return {Complex(m(0, 0), 0.0)};
    if (n == 2) return eig_2x2(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
    if (n == 3) {
        const double tr = m.trace();
        const double c1 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)
                        + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)
                        + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
        const double det = determinant(m);
        // char poly: lambda^3 - tr lambda^2 + c1 lambda - det
        return cubic_roots(-tr, c1, -det);
    }
    return dense_eigenvalues(m);
}

std::vector<double> symmetric_eigenvalues(Mat m) {
    if (!m.square()) throw std::invalid_argument("symmetric_eigenvalues: matrix not square");
    const int n = m.rows();
    // Cyclic Jacobi sweeps; terminates when all off-diagonal mass is negligible.
    const double tol = 1e-15;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (std::sqrt(off) <= tol * (1.0 + norm_fro(m))) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (m(p, q) == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = m(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

double spectral_radius(const Mat& m) {
    double r = 0.0;
    for (const Complex& z : eigenvalues(m)) r = std::max(r, std::abs(z));
    return r;
}

EigenResult leading_eigenpair(const Mat& m, double gap_tol) {
    if (!m.square()) throw std::invalid_argument("leading_eigenpair: matrix not square");
    const int n = m.rows();
    EigenResult res;
    auto ev = eigenvalues(m);
    if (ev.empty()) return res;
    std::sort(ev.begin(), ev.end(),
              [](const Complex& a, const Complex& b) { return std::abs(a) > std::abs(b); });
    const Complex lead = ev[0];
    res.leading_modulus = std::abs(lead);
    const double scale = std::max(res.leading_modulus, 1e-300);
    res.is_real = std::abs(lead.imag()) <= 1e-10 * std::max(1.0, res.leading_modulus);
    res.is_unique_simple = true;
    if (ev.size() > 1) {
        const double gap = (res.leading_modulus - std::abs(ev[1])) / scale;
        if (gap <= gap_tol) res.is_unique_simple = false;
    }
    if (!res.is_real || !res.is_unique_simple) return res;

    // Inverse iteration for the eigenvector of the (real, simple) leading value.
    const double lambda = lead.real();
    const double jitter = 1e-12 * std::max(1.0, std::abs(lambda));
    Mat shifted = m;
    for (int i = 0; i < n; ++i) shifted(i, i) -= lambda;
    Lu f = lu_factor(shifted);
    if (f.singular) {
        for (int i = 0; i < n; ++i) shifted(i, i) -= jitter;
        f = lu_factor(shifted);
        if (f.singular) throw NumericalError("leading_eigenpair: inverse iteration pivot failure");
    }
    // Slightly graded start vector: a uniform one can be orthogonal to the
    // target eigenvector and stall the iteration.
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * i;
    v = scaled(v, 1.0 / norm2(v));
    for (int it = 0; it < 8; ++it) {
        Vec w = lu_solve(f, v);
        const double nw = norm2(w);
        if (!(nw > 0.0) || !std::isfinite(nw)) break;
        v = scaled(w, 1.0 / nw);
        Vec r = vsub(mat_vec(m, v), scaled(v, lambda));
        if (norm_inf(r) <= 1e-13 * std::max(1.0, norm_inf(m))) break;
    }
    {
        Vec r = vsub(mat_vec(m, v), scaled(v, lambda));
        if (norm_inf(r) > 1e-7 * std::max(1.0, norm_inf(m)))
            throw NumericalError("leading_eigenpair: eigenvector residual too large");
    }
    // Sign convention: entry of largest magnitude is positive.
    int arg = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    if (v[arg] < 0.0) v = scaled(v, -1.0);
    res.leading_vector = std::move(v);
    return res;
}

namespace {

Mat pade_expm(const Mat& a, const std::vector<double>& b) {
    const int n = a.rows();
    const Mat a2 = a * a;
    // U = A * (odd coefficients in A^2), V = even coefficients in A^2.
    Mat u = Mat::zero(n, n), v = Mat::zero(n, n);
    Mat pow = Mat::identity(n);  // A^(2k)
    for (size_t k = 0; 2 * k < b.size(); ++k) {
        if (2 * k > 0) pow = pow * a2;
        v += b[2 * k] * pow;
        if (2 * k + 1 < b.size()) u += b[2 * k + 1] * pow;
    }
    u = a * u;
    Lu f = lu_factor(v - u);
    if (f.singular) throw NumericalError("expm: Pade denominator singular");
    return lu_solve(f, v + u);
}

Mat pade13_expm(const Mat& a) {
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const int n = a.rows();
    const Mat a2 = a * a, a4 = a2 * a2, a6 = a2 * a4;
    const Mat id = Mat::identity(n);
    Mat u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                 b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
            b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    Lu f = lu_factor(v - u);
    if (f.singular) throw NumericalError("expm: Pade denominator singular");
    return lu_solve(f, v + u);
}

}  // namespace

Mat expm(const Mat& m, double t) {
    if (!m.square()) throw std::invalid_argument("expm: matrix not square");
    if (!std::isfinite(t)) throw std::invalid_argument("expm: non-finite time");
    const int n = m.rows();
    if (n == 0) return m;
    Mat a = m;
    a *= t;
    const double eta = norm_one(a);
    // Degree/scaling thresholds from the standard scaling-and-squaring analysis.
    static const double theta3 = 1.495585217958292e-2, theta5 = 2.539398330063230e-1,
                        theta7 = 9.504178996162932e-1, theta9 = 2.097847961257068,
                        theta13 = 5.371920351148152;
    if (eta <= theta3) return pade_expm(a, {120.0, 60.0, 12.0, 1.0});
    if (eta <= theta5) return pade_expm(a, {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0});
    if (eta <= theta7)
        return pade_expm(a, {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0});
    if (eta <= theta9)
        return pade_expm(a, {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                             2162160.0, 110880.0, 3960.0, 90.0, 1.0});
    int s = std::max(0, int(std::ceil(std::log2(eta / theta13))));
    a *= std::ldexp(1.0, -s);
    Mat e = pade13_expm(a);
    for (int i = 0; i < s; ++i) e = e * e;
    return e;
}

namespace {

// Principal square root by scaled Denman-Beavers iteration.
Mat sqrtm_db(const Mat& a) {
    const int n = a.rows();
    Mat x = a, y = Mat::identity(n);
    for (int it = 0; it < 60; ++it) {
        Lu fx = lu_factor(x), fy = lu_factor(y);
        if (fx.singular || fy.singular) throw NumericalError("logm: singular iterate in square root");
        // Determinant scaling accelerates convergence markedly.
        double dx = std::abs(determinant(x)), dy = std::abs(determinant(y));
        double g = 1.0;
        if (dx > 0.0 && dy > 0.0) g = std::pow(dx * dy, -1.0 / (2.0 * n));
        if (!std::isfinite(g) || g <= 0.0) g = 1.0;
        Mat xinv = lu_solve(fx, Mat::identity(n));
        Mat yinv = lu_solve(fy, Mat::identity(n));
        Mat xn = 0.5 * (g * x + (1.0 / g) * yinv);
        Mat yn = 0.5 * (g * y + (1.0 / g) * xinv);
        double delta = norm_one(xn - x);
        x = std::move(xn);
        y = std::move(yn);
        if (delta <= 1e-15 * (1.0 + norm_one(x))) break;
    }
    return x;
}

}  // namespace

Mat logm(const Mat& m) {
    if (!m.square()) throw std::invalid_argument("logm: matrix not square");
    const int n = m.rows();
    if (n == 0) return m;
    // The principal logarithm requires the spectrum to avoid (-inf, 0].
    for (const Complex& z : eigenvalues(m)) {
        const double scale = std::max(1.0, std::abs(z));
        if (z.real() <= 1e-12 * scale && std::abs(z.imag()) <= 1e-12 * scale) {
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "logm: eigenvalue %.6g%+.6gi on the branch cut (closed negative real axis)",
                          z.real(), z.imag());
            throw NumericalError(buf);
        }
    }
    // Inverse scaling and squaring: repeated square roots until close to I.
    Mat x = m;
    int s = 0;
    const Mat id = Mat::identity(n);
    while (norm_one(x - id) > 0.15 && s < 50) {
        x = sqrtm_db(x);
        ++s;
    }
    // log(I + G) via the 8-node Gauss-Legendre form of the diagonal Pade
    // approximant: log(I+G) = sum_j w_j G (t_j G + I)^{-1}.
    static const double gl_nodes[8] = {0.01985507175123188, 0.10166676129318664,
                                       0.2372337950418355,  0.40828267875217505,
                                       0.591717321247825,   0.7627662049581645,
                                       0.8983332387068134,  0.9801449282487681};
    static const double gl_weights[8] = {0.05061426814518813, 0.11119051722668723,
                                         0.15685332293894363, 0.18134189168918097,
                                         0.18134189168918097, 0.15685332293894363,
                                         0.11119051722668723, 0.05061426814518813};
    const Mat g = x - id;
    Mat out = Mat::zero(n, n);
    for (int j = 0; j < 8; ++j) {
        Lu f = lu_factor(gl_nodes[j] * g + id);
        if (f.singular) throw NumericalError("logm: quadrature solve singular");
        out += gl_weights[j] * lu_solve(f, g);
    }
    out *= std::ldexp(1.0, s);
    return out;
}

double operator_norm(const Mat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    // Largest singular value = sqrt(lambda_max(M^T M)); Jacobi is accurate and
    // the Gram matrix keeps everything symmetric by construction.
    const Mat g = m.transpose() * m;
    const auto ev = symmetric_eigenvalues(g);
    return std::sqrt(std::max(0.0, ev.back()));
}

std::string to_string(const Mat& m) {
    std::string s;
    char buf[64];
    for (int i = 0; i < m.rows(); ++i) {
        s += i ? "\n[" : "[";
        for (int j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%s% .12g", j ? ", " : "", m(i, j));
            s += buf;
        }
        s += "]";
    }
    return s;
}

}  // namespace wjsr
