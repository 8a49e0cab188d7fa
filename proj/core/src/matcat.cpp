#include "fibercat/matcat.hpp"

#include <cstdlib>
#include <string>

namespace fibercat {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Dimension: return "dimension";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Schema: return "schema";
        case ErrorKind::Resolution: return "resolution";
        case ErrorKind::RefineCover: return "refine-cover";
        case ErrorKind::Inconsistency: return "inconsistency";
        case ErrorKind::GaugeInvalid: return "gauge-invalid";
        case ErrorKind::NotEquivalent: return "not-equivalent";
    }
    return "unknown";
}

Config Config::from_env() {
    Config cfg;
    if (const char* env = std::getenv("FIBERCAT_THREADS")) {
        int t = std::atoi(env);
        if (t >= 1) cfg.threads = t;
    }
    cfg.validate();
    return cfg;
}

Arrow Arrow::make(int src, int dst, Mat m) {
    if (src < 0 || dst < 0)
        fail(ErrorKind::Validation, "arrow ranks must be nonnegative");
    if (m.rows() != dst || m.cols() != src)
        fail(ErrorKind::Dimension,
             "arrow matrix is " + std::to_string(m.rows()) + "x" +
                 std::to_string(m.cols()) + ", declared " + std::to_string(dst) +
                 "x" + std::to_string(src));
    return Arrow{src, dst, std::move(m)};
}

Arrow Arrow::identity(int n) {
    return Arrow{n, n, Mat::Identity(n, n)};
}

Arrow compose(const Arrow& g, const Arrow& f) {
    if (f.dst != g.src)
        fail(ErrorKind::Dimension,
             "compose: inner ranks differ (" + std::to_string(f.dst) + " vs " +
                 std::to_string(g.src) + ")");
    return Arrow{f.src, g.dst, g.mat * f.mat};
}

Arrow adjoint(const Arrow& f) {
    return Arrow{f.dst, f.src, f.mat.adjoint()};
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat kron_pow(const Mat& a, int m) {
    if (m < 0) fail(ErrorKind::Validation, "kron_pow: negative power");
    Mat out = Mat::Identity(1, 1);
    for (int i = 0; i < m; ++i) out = kron(out, a);
    return out;
}

Arrow tensor(const Arrow& f, const Arrow& g) {
    return Arrow{f.src * g.src, f.dst * g.dst, kron(f.mat, g.mat)};
}

double op_norm(const Mat& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    if (a.rows() <= 32 && a.cols() <= 32) {
        Eigen::JacobiSVD<Mat> svd(a);
        return svd.singularValues()(0);
    }
    // Largest eigenvalue of a*a; cheaper than SVD for the big graded matrices.
    const bool wide = a.cols() > a.rows();
    Mat gram = wide ? Mat(a * a.adjoint()) : Mat(a.adjoint() * a);
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    if (es.info() != Eigen::Success)
        fail(ErrorKind::Inconsistency, "op_norm: eigensolver failed");
    double top = es.eigenvalues().maxCoeff();
    return top > 0.0 ? std::sqrt(top) : 0.0;
}

std::pair<Arrow, Arrow> direct_sum_isometries(int n, int m) {
    if (n < 0 || m < 0) fail(ErrorKind::Validation, "direct sum: negative rank");
    Mat v = Mat::Zero(n + m, n);
    Mat w = Mat::Zero(n + m, m);
    v.topRows(n) = Mat::Identity(n, n);
    w.bottomRows(m) = Mat::Identity(m, m);
    return {Arrow{n, n + m, std::move(v)}, Arrow{m, n + m, std::move(w)}};
}

bool is_projection(const Mat& p, double tol) {
    if (p.rows() != p.cols()) return false;
    if (p.rows() == 0) return true;
    if (op_norm(p - p.adjoint()) > tol) return false;
    return op_norm(p * p - p) <= tol;
}

int projection_rank(const Mat& p) {
    if (p.rows() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (p + p.adjoint()));
    int r = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > 0.5) ++r;
    return r;
}

Mat range_isometry(const Mat& p, double projection_tol) {
    if (!is_projection(p, projection_tol))
        fail(ErrorKind::Validation, "range_isometry: input is not a projection");
    const Eigen::Index n = p.rows();
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (p + p.adjoint()));
    if (n > 0 && es.info() != Eigen::Success)
        fail(ErrorKind::Inconsistency, "range_isometry: eigensolver failed");
    int rank = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (es.eigenvalues()(i) > 0.5) ++rank;
    Mat w(n, rank);
    // Eigen sorts ascending; take range vectors in descending eigenvalue order.
    for (int c = 0; c < rank; ++c) w.col(c) = es.eigenvectors().col(n - 1 - c);
    return w;
}

Arrow range_isometry(const Arrow& p, const Config& cfg) {
    if (p.src != p.dst)
        fail(ErrorKind::Validation, "range_isometry: arrow is not an endomorphism");
    Mat w = range_isometry(p.mat, cfg.tol.projection);
    return Arrow{static_cast<int>(w.cols()), p.dst, std::move(w)};
}

Arrow flip_symmetry(int n, int m) {
    if (n < 0 || m < 0) fail(ErrorKind::Validation, "flip_symmetry: negative rank");
    Mat theta = Mat::Zero(m * n, n * m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            theta(j * n + i, i * m + j) = 1.0;
    return Arrow{n * m, m * n, std::move(theta)};
}

} // namespace fibercat
