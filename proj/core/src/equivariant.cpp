#include "fibercat/equivariant.hpp"

#include <cmath>

namespace fibercat {

namespace {

double unitary_residual(const Mat& u) {
    return op_norm(Mat(u * u.adjoint() - Mat::Identity(u.rows(), u.rows())));
}

long ipow(long b, int e) {
    long out = 1;
    for (int i = 0; i < e; ++i) out *= b;
    return out;
}

} // namespace

FiniteGroupRep FiniteGroupRep::create(std::vector<Mat> elements, double match_tol) {
    if (elements.empty())
        fail(ErrorKind::Validation, "group needs at least one element");
    const Eigen::Index n = elements[0].rows();
    for (const auto& u : elements) {
        if (u.rows() != n || u.cols() != n)
            fail(ErrorKind::Dimension, "group elements have mixed sizes");
        if (unitary_residual(u) > match_tol * 100)
            fail(ErrorKind::Validation, "group element is not unitary");
    }
    FiniteGroupRep g;
    const int order = static_cast<int>(elements.size());
    g.mult.assign(order, std::vector<int>(order, -1));
    for (int a = 0; a < order; ++a)
        for (int b = 0; b < order; ++b) {
            const Mat prod = elements[a] * elements[b];
            int match = -1;
            for (int c = 0; c < order; ++c) {
                if (op_norm(Mat(prod - elements[c])) <= match_tol) {
                    if (match >= 0)
                        fail(ErrorKind::Validation,
                             "ambiguous group element match; elements too close");
                    match = c;
                }
            }
            if (match < 0)
                fail(ErrorKind::Validation, "group is not closed under products");
            g.mult[a][b] = match;
        }
    for (int c = 0; c < order; ++c)
        if (op_norm(Mat(elements[c] - Mat::Identity(n, n))) <= match_tol)
            g.identity = c;
    if (g.identity < 0)
        fail(ErrorKind::Validation, "group has no identity element");
    // Closure plus finiteness forces inverses; verify anyway.
    for (int a = 0; a < order; ++a) {
        bool has_inverse = false;
        for (int b = 0; b < order; ++b)
            if (g.mult[a][b] == g.identity) has_inverse = true;
        if (!has_inverse)
            fail(ErrorKind::Validation, "group element has no inverse in the list");
    }
    g.elements = std::move(elements);
    return g;
}

Mat group_action(const Mat& g, int level, int grade, const Mat& t) {
    if (level < 0 || level + grade < 0)
        fail(ErrorKind::Validation, "group action needs level >= 0 and level+grade >= 0");
    const long rows = ipow(g.rows(), level + grade);
    const long cols = ipow(g.rows(), level);
    if (t.rows() != rows || t.cols() != cols)
        fail(ErrorKind::Dimension, "group action: matrix shape does not match level/grade");
    return kron_pow(g, level + grade) * t * kron_pow(g.adjoint(), level);
}

namespace {

void check_equivariant(const Mat& e, const FiniteGroupRep& group, double tol) {
    for (const auto& u : group.elements)
        if (op_norm(Mat(e * u - u * e)) > tol)
            fail(ErrorKind::Validation,
                 "projection does not commute with the group representation");
}

// dim of the fixed subspace = trace of the averaging projector. With
// w the range isometry of e, the compressed actions w^{*m} g^{tensor m} w^m
// give tr P = (1/|G|) sum_g tr(G1) conj(tr(G2)).
int averaged_dimension(const Mat& e, const FiniteGroupRep& group, int level,
                       int grade, const Config& cfg) {
    check_equivariant(e, group, cfg.tol.intertwiner);
    const Mat w = range_isometry(e, cfg.tol.projection);
    const Mat wt = kron_pow(w, level + grade);
    const Mat ws = kron_pow(w, level);
    Scalar acc(0.0, 0.0);
    for (const auto& u : group.elements) {
        const Scalar t1 = (wt.adjoint() * kron_pow(u, level + grade) * wt).trace();
        const Scalar t2 = (ws.adjoint() * kron_pow(u, level) * ws).trace();
        acc += t1 * std::conj(t2);
    }
    const double value = acc.real() / group.order();
    const long rounded = std::lround(value);
    if (std::abs(value - static_cast<double>(rounded)) > 1e-6 ||
        std::abs(acc.imag()) / group.order() > 1e-6)
        fail(ErrorKind::Inconsistency, "averaged dimension is not an integer");
    return static_cast<int>(rounded);
}

} // namespace

std::vector<int> invariant_dimensions(const FieldProjection& e,
                                      const FiniteGroupRep& group, int level,
                                      int grade, const Config& cfg) {
    if (group.dim() != e.ambient_rank)
        fail(ErrorKind::Dimension, "group representation and field sizes differ");
    std::vector<int> dims(e.num_points());
    for (int p = 0; p < e.num_points(); ++p)
        dims[p] = averaged_dimension(e.at(p), group, level, grade, cfg);
    return dims;
}

int invariant_dimension_fiber(const Mat& e, const FiniteGroupRep& group,
                              int level, int grade, const Config& cfg) {
    if (group.dim() != e.rows())
        fail(ErrorKind::Dimension, "group representation and projection sizes differ");
    return averaged_dimension(e, group, level, grade, cfg);
}

std::vector<Mat> invariant_basis_fiber(const Mat& e, const FiniteGroupRep& group,
                                       int level, int grade, const Config& cfg) {
    check_equivariant(e, group, cfg.tol.intertwiner);
    const Mat w = range_isometry(e, cfg.tol.projection);
    const long rank = w.cols();
    const long na = ipow(rank, level + grade);
    const long nb = ipow(rank, level);

    // Average each graded basis element, then orthonormalize the images by
    // modified Gram-Schmidt in the fixed pivot order (a, b) lexicographic.
    auto basis_elem = [&](long a, long b) {
        Mat unit = Mat::Zero(na, nb);
        unit(a, b) = 1.0;
        return Mat(kron_pow(w, level + grade) * unit * kron_pow(w, level).adjoint());
    };
    std::vector<Mat> fixed;
    const double cutoff = cfg.tol.support_cutoff;
    for (long a = 0; a < na; ++a)
        for (long b = 0; b < nb; ++b) {
            Mat avg = Mat::Zero(ipow(e.rows(), level + grade), ipow(e.rows(), level));
            const Mat t = basis_elem(a, b);
            for (const auto& u : group.elements) avg += group_action(u, level, grade, t);
            avg /= static_cast<double>(group.order());
            for (const auto& q : fixed)
                avg -= (q.adjoint() * avg).trace() * q;
            const double norm = std::sqrt(std::abs((avg.adjoint() * avg).trace()));
            if (norm > std::sqrt(cutoff)) fixed.push_back(avg / norm);
        }
    return fixed;
}

} // namespace fibercat
