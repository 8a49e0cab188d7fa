#include "fibercat/amplimorph.hpp"

#include <cmath>

namespace fibercat {

namespace {

// Unknown x in M_{rows x cols} tensor A is parametrized by coefficients on
// kron(E_ij, a_k); those basis matrices are Hilbert-Schmidt orthonormal.
struct ArrowBasis {
    int rows, cols;
    std::shared_ptr<const FiniteCStar> algebra;

    long size() const {
        return static_cast<long>(rows) * cols * algebra->basis_size();
    }
    Mat element(long index) const {
        const int bs = algebra->basis_size();
        const int k = static_cast<int>(index % bs);
        const int j = static_cast<int>((index / bs) % cols);
        const int i = static_cast<int>(index / (static_cast<long>(bs) * cols));
        const int d = algebra->total_dim();
        Mat out = Mat::Zero(static_cast<long>(rows) * d, static_cast<long>(cols) * d);
        out.block(static_cast<long>(i) * d, static_cast<long>(j) * d, d, d) =
            algebra->basis_element(k);
        return out;
    }
};

Eigen::VectorXcd vec(const Mat& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

// Null space of the linear map expr over the span of `basis`, returned as
// matrices assembled from the SVD's trailing right-singular vectors.
std::vector<Mat> null_space(const ArrowBasis& basis,
                            const std::function<Mat(const Mat&)>& expr,
                            double cutoff) {
    const long unknowns = basis.size();
    if (unknowns == 0) return {};
    Mat first = expr(basis.element(0));
    Mat constraint(first.size(), unknowns);
    constraint.col(0) = vec(first);
    for (long c = 1; c < unknowns; ++c) constraint.col(c) = vec(expr(basis.element(c)));
    Eigen::JacobiSVD<Mat> svd(constraint, Eigen::ComputeFullV);
    const auto& sing = svd.singularValues();
    const double scale = sing.size() > 0 ? std::max(1.0, sing(0)) : 1.0;
    std::vector<Mat> out;
    for (Eigen::Index c = 0; c < svd.matrixV().cols(); ++c) {
        const double sigma = c < sing.size() ? sing(c) : 0.0;
        if (sigma > cutoff * scale) continue;
        Mat x = Mat::Zero(first.rows() == 0 ? 0 : 0, 0);
        const int d = basis.algebra->total_dim();
        x = Mat::Zero(static_cast<long>(basis.rows) * d,
                      static_cast<long>(basis.cols) * d);
        for (long b = 0; b < unknowns; ++b)
            x += svd.matrixV()(b, c) * basis.element(b);
        out.push_back(std::move(x));
    }
    return out;
}

} // namespace

std::shared_ptr<const FiniteCStar> FiniteCStar::create(std::vector<int> blocks) {
    if (blocks.empty()) fail(ErrorKind::Validation, "algebra needs at least one block");
    auto a = std::make_shared<FiniteCStar>();
    for (int d : blocks) {
        if (d < 1) fail(ErrorKind::Validation, "block sizes must be positive");
        a->offsets_.push_back(a->total_dim_);
        a->total_dim_ += d;
        a->basis_size_ += d * d;
    }
    a->blocks_ = std::move(blocks);
    return a;
}

Mat FiniteCStar::basis_element(int index) const {
    if (index < 0 || index >= basis_size_)
        fail(ErrorKind::Validation, "basis index out of range");
    int b = 0;
    while (index >= blocks_[b] * blocks_[b]) {
        index -= blocks_[b] * blocks_[b];
        ++b;
    }
    const int d = blocks_[b];
    const int p = index / d;
    const int q = index % d;
    Mat out = Mat::Zero(total_dim_, total_dim_);
    out(offsets_[b] + p, offsets_[b] + q) = 1.0;
    return out;
}

Mat FiniteCStar::unit() const { return Mat::Identity(total_dim_, total_dim_); }

Mat FiniteCStar::central_projection(int b) const {
    Mat out = Mat::Zero(total_dim_, total_dim_);
    out.block(offsets_.at(b), offsets_.at(b), blocks_.at(b), blocks_.at(b)) =
        Mat::Identity(blocks_.at(b), blocks_.at(b));
    return out;
}

std::vector<Scalar> FiniteCStar::coefficients(const Mat& a, double tol) const {
    if (a.rows() != total_dim_ || a.cols() != total_dim_)
        fail(ErrorKind::Dimension, "element has wrong size for this algebra");
    Mat reassembled = Mat::Zero(total_dim_, total_dim_);
    std::vector<Scalar> coeff;
    coeff.reserve(basis_size_);
    for (int b = 0; b < num_blocks(); ++b) {
        const int d = blocks_[b], off = offsets_[b];
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q) {
                coeff.push_back(a(off + p, off + q));
                reassembled(off + p, off + q) = a(off + p, off + q);
            }
    }
    if ((a - reassembled).cwiseAbs().maxCoeff() > tol)
        fail(ErrorKind::Validation, "element does not respect the block structure");
    return coeff;
}

Mat Amplimorphism::apply(const Mat& a, double tol) const {
    const auto coeff = algebra->coefficients(a, tol);
    const long n = static_cast<long>(target_rank) * algebra->total_dim();
    Mat out = Mat::Zero(n, n);
    for (size_t k = 0; k < coeff.size(); ++k)
        if (coeff[k] != Scalar(0.0, 0.0)) out += coeff[k] * images[k];
    return out;
}

Mat Amplimorphism::unit_image() const { return apply(algebra->unit()); }

Amplimorphism identity_amp(std::shared_ptr<const FiniteCStar> algebra) {
    Amplimorphism phi;
    phi.target_rank = 1;
    phi.images.reserve(algebra->basis_size());
    for (int k = 0; k < algebra->basis_size(); ++k)
        phi.images.push_back(algebra->basis_element(k));
    phi.algebra = std::move(algebra);
    return phi;
}

namespace {

// Asserts that m lies in M_n tensor A, i.e. every n x n block is in A.
void check_in_amplified_algebra(const FiniteCStar& algebra, int n, const Mat& m,
                                double tol) {
    const int d = algebra.total_dim();
    if (m.rows() != static_cast<long>(n) * d || m.cols() != static_cast<long>(n) * d)
        fail(ErrorKind::Dimension, "matrix has wrong size for M_n tensor A");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            algebra.coefficients(m.block(static_cast<long>(i) * d,
                                         static_cast<long>(j) * d, d, d),
                                 tol);
}

} // namespace

Amplimorphism amp_from_central_projection(std::shared_ptr<const FiniteCStar> algebra,
                                          int n, const Mat& e, const Config& cfg) {
    const int d = algebra->total_dim();
    if (e.rows() != static_cast<long>(n) * d || e.cols() != e.rows())
        fail(ErrorKind::Dimension, "projection has wrong size for M_n tensor A");
    if (!is_projection(e, cfg.tol.projection))
        fail(ErrorKind::Validation, "input is not a projection");
    check_in_amplified_algebra(*algebra, n, e, cfg.tol.projection);
    // Centrality: e must commute with 1_n tensor a for every basis element.
    for (int k = 0; k < algebra->basis_size(); ++k) {
        const Mat amp = kron(Mat::Identity(n, n), algebra->basis_element(k));
        if (op_norm(Mat(e * amp - amp * e)) > cfg.tol.intertwiner)
            fail(ErrorKind::Validation,
                 "projection does not commute with 1 tensor A; not central");
    }
    Amplimorphism phi;
    phi.algebra = algebra;
    phi.target_rank = n;
    phi.images.reserve(algebra->basis_size());
    for (int k = 0; k < algebra->basis_size(); ++k)
        phi.images.push_back(
            Mat(e * kron(Mat::Identity(n, n), algebra->basis_element(k))));
    validate_amplimorphism(phi, cfg);
    return phi;
}

double amplimorphism_residual(const Amplimorphism& phi) {
    const auto& algebra = *phi.algebra;
    double residual = 0.0;
    for (int a = 0; a < algebra.basis_size(); ++a) {
        const Mat ea = algebra.basis_element(a);
        // *-preservation: the adjoint of a matrix unit is another basis element.
        residual = std::max(
            residual, op_norm(Mat(phi.apply(ea.adjoint()) - phi.images[a].adjoint())));
        for (int b = 0; b < algebra.basis_size(); ++b) {
            const Mat eb = algebra.basis_element(b);
            residual = std::max(
                residual,
                op_norm(Mat(phi.apply(Mat(ea * eb)) - phi.images[a] * phi.images[b])));
        }
    }
    const Mat one = phi.unit_image();
    residual = std::max(residual, op_norm(Mat(one * one - one)));
    residual = std::max(residual, op_norm(Mat(one - one.adjoint())));
    return residual;
}

void validate_amplimorphism(const Amplimorphism& phi, const Config& cfg) {
    if (!phi.algebra) fail(ErrorKind::Validation, "amplimorphism has no algebra");
    if (phi.target_rank < 1) fail(ErrorKind::Validation, "target rank must be >= 1");
    if (static_cast<int>(phi.images.size()) != phi.algebra->basis_size())
        fail(ErrorKind::Validation, "wrong number of basis images");
    for (const auto& m : phi.images)
        check_in_amplified_algebra(*phi.algebra, phi.target_rank, m,
                                   cfg.tol.intertwiner);
    if (amplimorphism_residual(phi) > cfg.tol.intertwiner)
        fail(ErrorKind::Validation, "map is not multiplicative and *-preserving");
}

std::vector<Mat> arrow_space_mod(const Amplimorphism& phi, const Amplimorphism& psi,
                                 const Config& cfg) {
    if (phi.algebra.get() != psi.algebra.get() &&
        phi.algebra->blocks() != psi.algebra->blocks())
        fail(ErrorKind::Validation, "amplimorphisms live over different algebras");
    ArrowBasis basis{psi.target_rank, phi.target_rank, phi.algebra};
    const Mat pe = phi.unit_image(), qe = psi.unit_image();
    auto expr = [&](const Mat& x) {
        Mat top(2 * x.rows(), x.cols());
        top.topRows(x.rows()) = x * pe - x;
        top.bottomRows(x.rows()) = qe * x - x;
        return top;
    };
    return null_space(basis, expr, cfg.tol.support_cutoff);
}

std::vector<Mat> arrow_space_bimod(const Amplimorphism& phi, const Amplimorphism& psi,
                                   const Config& cfg) {
    if (phi.algebra.get() != psi.algebra.get() &&
        phi.algebra->blocks() != psi.algebra->blocks())
        fail(ErrorKind::Validation, "amplimorphisms live over different algebras");
    ArrowBasis basis{psi.target_rank, phi.target_rank, phi.algebra};
    const Mat pe = phi.unit_image(), qe = psi.unit_image();
    const int nb = phi.algebra->basis_size();
    auto expr = [&](const Mat& x) {
        Mat rows((2 + nb) * x.rows(), x.cols());
        rows.topRows(x.rows()) = x * pe - x;
        rows.middleRows(x.rows(), x.rows()) = qe * x - x;
        for (int k = 0; k < nb; ++k)
            rows.middleRows((2 + k) * x.rows(), x.rows()) =
                psi.images[k] * x - x * phi.images[k];
        return rows;
    };
    return null_space(basis, expr, cfg.tol.support_cutoff);
}

namespace {

// The lift psi_{rho,rho'} applied to x in M_{rows x cols} tensor A: apply
// psi to each A-valued block of x and splice the target legs in the order
// (m, rows/cols, D).
Mat amp_lift(const Amplimorphism& psi, const Mat& x, int rows, int cols,
             double tol) {
    const int d = psi.algebra->total_dim();
    const int m = psi.target_rank;
    Mat out = Mat::Zero(static_cast<long>(m) * rows * d,
                        static_cast<long>(m) * cols * d);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const Mat block =
                x.block(static_cast<long>(i) * d, static_cast<long>(j) * d, d, d);
            const Mat y = psi.apply(block, tol);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    out.block((static_cast<long>(a) * rows + i) * d,
                              (static_cast<long>(b) * cols + j) * d, d, d) =
                        y.block(static_cast<long>(a) * d, static_cast<long>(b) * d, d,
                                d);
        }
    return out;
}

// i_rho(y): inserts an identity middle leg of size n.
Mat leg_insert(const Mat& y, int rows, int cols, int n, int d) {
    Mat out = Mat::Zero(static_cast<long>(rows) * n * d,
                        static_cast<long>(cols) * n * d);
    for (int a = 0; a < rows; ++a)
        for (int b = 0; b < cols; ++b) {
            const Mat block =
                y.block(static_cast<long>(a) * d, static_cast<long>(b) * d, d, d);
            for (int j = 0; j < n; ++j)
                out.block((static_cast<long>(a) * n + j) * d,
                          (static_cast<long>(b) * n + j) * d, d, d) = block;
        }
    return out;
}

} // namespace

Amplimorphism amp_tensor(const Amplimorphism& phi, const Amplimorphism& psi,
                         const Config& cfg) {
    if (phi.algebra->blocks() != psi.algebra->blocks())
        fail(ErrorKind::Validation, "amplimorphisms live over different algebras");
    Amplimorphism out;
    out.algebra = phi.algebra;
    out.target_rank = psi.target_rank * phi.target_rank;
    out.images.reserve(phi.images.size());
    for (const auto& img : phi.images)
        out.images.push_back(amp_lift(psi, img, phi.target_rank, phi.target_rank,
                                      cfg.tol.intertwiner));
    if (amplimorphism_residual(out) > cfg.tol.intertwiner)
        fail(ErrorKind::Inconsistency, "composite is not an amplimorphism");
    return out;
}

Mat arrow_tensor(const Mat& x, const Amplimorphism& phi, const Amplimorphism& phi2,
                 const Mat& y, const Amplimorphism& psi, const Amplimorphism& psi2,
                 const Config& cfg) {
    const int d = phi.algebra->total_dim();
    const int n = phi.target_rank, n2 = phi2.target_rank;
    const int m = psi.target_rank, m2 = psi2.target_rank;
    if (x.rows() != static_cast<long>(n2) * d || x.cols() != static_cast<long>(n) * d)
        fail(ErrorKind::Dimension, "left arrow has wrong shape");
    if (y.rows() != static_cast<long>(m2) * d || y.cols() != static_cast<long>(m) * d)
        fail(ErrorKind::Dimension, "right arrow has wrong shape");
    const Mat lhs = amp_lift(psi2, x, n2, n, cfg.tol.intertwiner) *
                    leg_insert(y, m2, m, n, d);
    const Mat rhs = leg_insert(y, m2, m, n2, d) *
                    amp_lift(psi, x, n2, n, cfg.tol.intertwiner);
    if (op_norm(Mat(lhs - rhs)) > cfg.tol.intertwiner)
        fail(ErrorKind::Validation,
             "orderings disagree: operands are not bimodule arrows");
    return lhs;
}

AmpDirectSum amp_direct_sum(const Amplimorphism& phi, const Amplimorphism& psi,
                            const Config& cfg) {
    if (phi.algebra->blocks() != psi.algebra->blocks())
        fail(ErrorKind::Validation, "amplimorphisms live over different algebras");
    const int d = phi.algebra->total_dim();
    auto [v, w] = direct_sum_isometries(phi.target_rank, psi.target_rank);
    const Mat vd = kron(v.mat, Mat::Identity(d, d));
    const Mat wd = kron(w.mat, Mat::Identity(d, d));
    AmpDirectSum out;
    out.delta.algebra = phi.algebra;
    out.delta.target_rank = phi.target_rank + psi.target_rank;
    out.delta.images.reserve(phi.images.size());
    for (size_t k = 0; k < phi.images.size(); ++k)
        out.delta.images.push_back(
            Mat(vd * phi.images[k] * vd.adjoint() + wd * psi.images[k] * wd.adjoint()));
    if (amplimorphism_residual(out.delta) > cfg.tol.intertwiner)
        fail(ErrorKind::Inconsistency, "direct sum is not an amplimorphism");
    out.embed_left = vd * phi.unit_image();
    out.embed_right = wd * psi.unit_image();
    const Mat resum = out.embed_left * out.embed_left.adjoint() +
                      out.embed_right * out.embed_right.adjoint();
    if (op_norm(Mat(resum - out.delta.unit_image())) > cfg.tol.intertwiner)
        fail(ErrorKind::Inconsistency, "embeddings do not reassemble the unit");
    return out;
}

std::vector<CommutativeCompareEntry> commutative_compare(
    std::shared_ptr<const FiniteCStar> algebra, int n, const Mat& e, int max_level,
    int max_grade, const Config& cfg) {
    const Amplimorphism phi_e = amp_from_central_projection(algebra, n, e, cfg);
    const int d = algebra->total_dim();
    // Per-block compressions e_b in M_n; centrality makes the block scalar.
    std::vector<Mat> eb(algebra->num_blocks());
    for (int b = 0; b < algebra->num_blocks(); ++b) {
        const int off = algebra->block_offset(b);
        eb[b] = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                eb[b](i, j) = e(static_cast<long>(i) * d + off,
                                static_cast<long>(j) * d + off);
    }
    std::vector<int> rank_b(algebra->num_blocks());
    for (int b = 0; b < algebra->num_blocks(); ++b) rank_b[b] = projection_rank(eb[b]);

    // Powers phi_e^r; r = 0 is the identity object.
    std::vector<Amplimorphism> powers{identity_amp(algebra)};
    for (int r = 1; r <= max_level + max_grade; ++r)
        powers.push_back(amp_tensor(powers.back(), phi_e, cfg));

    std::vector<CommutativeCompareEntry> table;
    for (int r = 0; r <= max_level; ++r)
        for (int k = -max_grade; k <= max_grade; ++k) {
            if (r + k < 0 || r + k > max_level + max_grade) continue;
            CommutativeCompareEntry entry;
            entry.level = r;
            entry.grade = k;
            for (int b = 0; b < algebra->num_blocks(); ++b) {
                long central = 1, mod = 1;
                for (int i = 0; i < 2 * r + k; ++i) central *= rank_b[b];
                mod = central * algebra->blocks()[b] * algebra->blocks()[b];
                entry.dim_central += static_cast<int>(central);
                entry.dim_mod_expected += static_cast<int>(mod);
            }
            entry.dim_bimod = static_cast<int>(
                arrow_space_bimod(powers[r], powers[r + k], cfg).size());
            entry.dim_mod = static_cast<int>(
                arrow_space_mod(powers[r], powers[r + k], cfg).size());
            entry.pass = entry.dim_bimod == entry.dim_central &&
                         entry.dim_mod == entry.dim_mod_expected;
            table.push_back(entry);
        }
    return table;
}

InnerTestReport inner_test(const Amplimorphism& phi, const Config& cfg) {
    const auto& algebra = *phi.algebra;
    const int d = algebra.total_dim();
    const int n = phi.target_rank;
    const Mat pe = phi.unit_image();

    ArrowBasis column_basis{n, 1, phi.algebra};
    auto x_expr = [&](const Mat& x) { return Mat(pe * x - x); };
    const auto x_basis = null_space(column_basis, x_expr, cfg.tol.support_cutoff);

    const int nb = algebra.basis_size();
    auto xphi_expr = [&](const Mat& x) {
        Mat rows((1 + nb) * x.rows(), x.cols());
        rows.topRows(x.rows()) = pe * x - x;
        for (int k = 0; k < nb; ++k)
            rows.middleRows((1 + k) * x.rows(), x.rows()) =
                phi.images[k] * x - x * algebra.basis_element(k);
        return rows;
    };
    const auto xphi_basis = null_space(column_basis, xphi_expr, cfg.tol.support_cutoff);

    InnerTestReport report;
    report.x_dim = static_cast<int>(x_basis.size());
    report.xphi_dim = static_cast<int>(xphi_basis.size());

    // Support projection: the orthogonal projection onto the joint range of
    // the x x* over a spanning family of X^phi.
    Mat s = Mat::Zero(static_cast<long>(n) * d, static_cast<long>(n) * d);
    for (const auto& x : xphi_basis) s += x * x.adjoint();
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s + s.adjoint()));
    report.support = Mat::Zero(s.rows(), s.cols());
    const double scale = std::max(1.0, es.eigenvalues().size() > 0
                                           ? es.eigenvalues().maxCoeff()
                                           : 1.0);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > cfg.tol.support_cutoff * scale)
            report.support +=
                es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();

    report.inner = op_norm(Mat(report.support - pe)) <= cfg.tol.intertwiner;

    report.block_ranks.resize(algebra.num_blocks());
    long generated_dim = 0;
    for (int b = 0; b < algebra.num_blocks(); ++b) {
        const int db = algebra.blocks()[b];
        const int off = algebra.block_offset(b);
        Mat pb(static_cast<long>(n) * db, static_cast<long>(n) * db);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                pb.block(static_cast<long>(i) * db, static_cast<long>(j) * db, db, db) =
                    report.support.block(static_cast<long>(i) * d + off,
                                         static_cast<long>(j) * d + off, db, db);
        report.block_ranks[b] = projection_rank(pb);
        generated_dim += static_cast<long>(report.block_ranks[b]) * db;
    }
    report.generated = generated_dim == report.x_dim;
    return report;
}

} // namespace fibercat
