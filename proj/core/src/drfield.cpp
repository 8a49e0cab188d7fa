#include "fibercat/drfield.hpp"

#include <cmath>
#include <random>

namespace fibercat {

namespace {

bool same_base(const FieldProjection& a, const FieldProjection& b) {
    if (&a == &b) return true;
    if (a.ambient_rank != b.ambient_rank || a.proj.size() != b.proj.size())
        return false;
    for (size_t p = 0; p < a.proj.size(); ++p)
        if ((a.proj[p] - b.proj[p]).cwiseAbs().maxCoeff() > 1e-12) return false;
    return true;
}

long ipow(long b, int e) {
    long out = 1;
    for (int i = 0; i < e; ++i) out *= b;
    return out;
}

// Column a of the m-fold Kronecker power of w, assembled digit by digit.
Eigen::VectorXcd kron_power_column(const Mat& w, int m, long a) {
    Eigen::VectorXcd col = Eigen::VectorXcd::Ones(1);
    const long r = w.cols();
    // Most significant digit first matches the lexicographic convention.
    std::vector<int> digits(m, 0);
    for (int d = m - 1; d >= 0; --d) {
        digits[d] = static_cast<int>(a % r);
        a /= r;
    }
    for (int d = 0; d < m; ++d) {
        Eigen::VectorXcd next(col.size() * w.rows());
        for (Eigen::Index i = 0; i < col.size(); ++i)
            next.segment(i * w.rows(), w.rows()) = col(i) * w.col(digits[d]);
        col = std::move(next);
    }
    return col;
}

} // namespace

GradedField GradedField::create(std::shared_ptr<const FieldProjection> base,
                                int level, int grade, std::vector<Mat> val,
                                const Config& cfg) {
    if (!base) fail(ErrorKind::Validation, "graded field needs a base field");
    if (level < 0 || level + grade < 0)
        fail(ErrorKind::Validation, "graded field needs level >= 0 and level+grade >= 0");
    if (val.size() != base->proj.size())
        fail(ErrorKind::Validation, "graded field has wrong number of sample points");
    const long rows = ipow(base->ambient_rank, level + grade);
    const long cols = ipow(base->ambient_rank, level);
    double residual = 0.0;
    for (size_t p = 0; p < val.size(); ++p) {
        if (val[p].rows() != rows || val[p].cols() != cols)
            fail(ErrorKind::Dimension, "graded field entry has wrong shape");
        const Mat et = kron_pow(base->at(static_cast<int>(p)), level + grade);
        const Mat es = kron_pow(base->at(static_cast<int>(p)), level);
        residual = std::max(residual, op_norm(Mat(et * val[p] * es - val[p])));
    }
    if (residual > cfg.tol.intertwiner)
        fail(ErrorKind::Validation, "graded field entries are not supported by e");
    return GradedField{std::move(base), level, grade, std::move(val)};
}

GradedField product(const GradedField& x, const GradedField& y, const Config& cfg) {
    (void)cfg;
    if (!same_base(*x.base, *y.base))
        fail(ErrorKind::Validation, "graded product: operands have different bases");
    const int c = std::max(x.level, y.level + y.grade);
    const int a = c - x.level;
    const int b = c - (y.level + y.grade);
    GradedField out;
    out.base = x.base;
    out.level = y.level + b;
    out.grade = x.grade + y.grade;
    out.val.resize(x.val.size());
    for (size_t p = 0; p < x.val.size(); ++p) {
        const Mat ep = x.base->at(static_cast<int>(p));
        const Mat xe = a == 0 ? x.val[p] : kron(x.val[p], kron_pow(ep, a));
        const Mat ye = b == 0 ? y.val[p] : kron(y.val[p], kron_pow(ep, b));
        out.val[p] = xe * ye;
    }
    return out;
}

GradedField adjoint(const GradedField& x) {
    GradedField out;
    out.base = x.base;
    out.level = x.level + x.grade;
    out.grade = -x.grade;
    out.val.resize(x.val.size());
    for (size_t p = 0; p < x.val.size(); ++p) out.val[p] = x.val[p].adjoint();
    return out;
}

GradedField gauge_action(Scalar z, const GradedField& x) {
    if (std::abs(std::abs(z) - 1.0) > 1e-12)
        fail(ErrorKind::Validation, "gauge action needs |z| = 1");
    const Scalar factor = std::pow(z, x.grade);
    GradedField out = x;
    for (auto& m : out.val) m *= factor;
    return out;
}

GradedField right_embed(const GradedField& x, int steps) {
    if (steps < 0) fail(ErrorKind::Validation, "right_embed: negative step count");
    if (steps == 0) return x;
    GradedField out;
    out.base = x.base;
    out.level = x.level + steps;
    out.grade = x.grade;
    out.val.resize(x.val.size());
    for (size_t p = 0; p < x.val.size(); ++p)
        out.val[p] = kron(x.val[p], kron_pow(x.base->at(static_cast<int>(p)), steps));
    return out;
}

GradedField canonical_endo(const GradedField& x) {
    GradedField out;
    out.base = x.base;
    out.level = x.level + 1;
    out.grade = x.grade;
    out.val.resize(x.val.size());
    for (size_t p = 0; p < x.val.size(); ++p)
        out.val[p] = kron(x.base->at(static_cast<int>(p)), x.val[p]);
    return out;
}

NormReport field_norm(const GradedField& x) {
    NormReport report;
    report.pointwise.resize(x.val.size());
    for (size_t p = 0; p < x.val.size(); ++p) {
        report.pointwise[p] = op_norm(x.val[p]);
        report.sup = std::max(report.sup, report.pointwise[p]);
    }
    return report;
}

GradedComponent::GradedComponent(std::shared_ptr<const FieldProjection> base,
                                 int level, int grade, const Config& cfg)
    : base_(std::move(base)), level_(level), grade_(grade) {
    if (!base_) fail(ErrorKind::Validation, "graded component needs a base field");
    if (level_ < 0 || level_ + grade_ < 0)
        fail(ErrorKind::Validation, "graded component needs level >= 0 and level+grade >= 0");
    const int n = base_->num_points();
    fiber_isometry_.resize(n);
    dims_.resize(n);
    for (int p = 0; p < n; ++p) {
        fiber_isometry_[p] = range_isometry(base_->at(p), cfg.tol.projection);
        const long rank = fiber_isometry_[p].cols();
        dims_[p] = static_cast<int>(ipow(rank, 2 * level_ + grade_));
    }
}

Mat GradedComponent::basis_element(int point, int a, int b) const {
    const Mat& w = fiber_isometry_.at(point);
    const long rank = w.cols();
    if (a < 0 || b < 0 || a >= ipow(rank, level_ + grade_) || b >= ipow(rank, level_))
        fail(ErrorKind::Validation, "basis index out of range");
    const Eigen::VectorXcd target = kron_power_column(w, level_ + grade_, a);
    const Eigen::VectorXcd source = kron_power_column(w, level_, b);
    return target * source.adjoint();
}

std::vector<Mat> GradedComponent::basis(int point) const {
    const long rank = fiber_isometry_.at(point).cols();
    const long na = ipow(rank, level_ + grade_);
    const long nb = ipow(rank, level_);
    std::vector<Mat> out;
    out.reserve(static_cast<size_t>(na * nb));
    for (long a = 0; a < na; ++a)
        for (long b = 0; b < nb; ++b)
            out.push_back(basis_element(point, static_cast<int>(a), static_cast<int>(b)));
    return out;
}

GradedComponent graded_component(std::shared_ptr<const FieldProjection> base,
                                 int level, int grade, const Config& cfg) {
    return GradedComponent(std::move(base), level, grade, cfg);
}

SectionFamily section_generators(std::shared_ptr<const FieldProjection> base,
                                 const Config& cfg) {
    if (!base) fail(ErrorKind::Validation, "section generators need a base field");
    const int amb = base->ambient_rank;
    const int npts = base->num_points();
    SectionFamily family;
    family.psi.reserve(amb);
    for (int l = 0; l < amb; ++l) {
        std::vector<Mat> val(npts);
        for (int p = 0; p < npts; ++p) val[p] = base->at(p).col(l);
        family.psi.push_back(
            GradedField::create(base, 0, 1, std::move(val), cfg));
    }
    for (int p = 0; p < npts; ++p) {
        const Mat& e = base->at(p);
        Mat gram(amb, amb);
        Mat sum = Mat::Zero(amb, amb);
        for (int l = 0; l < amb; ++l) {
            for (int m = 0; m < amb; ++m)
                gram(l, m) = (family.psi[l].val[p].adjoint() * family.psi[m].val[p])(0, 0);
            sum += family.psi[l].val[p] * family.psi[l].val[p].adjoint();
        }
        family.gram_residual = std::max(family.gram_residual, op_norm(Mat(gram - e)));
        family.sum_residual = std::max(family.sum_residual, op_norm(Mat(sum - e)));
    }
    if (family.gram_residual > cfg.tol.intertwiner ||
        family.sum_residual > cfg.tol.intertwiner)
        fail(ErrorKind::Inconsistency, "section generators violate the gram relations");

    // Inner-endomorphism identity on sampled elements of small components.
    std::mt19937 rng(20240811u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto [r, k] : {std::pair{0, 1}, std::pair{1, 0}, std::pair{1, 1}}) {
        if (r + k > cfg.level_cap) continue;
        const GradedComponent comp(base, r, k, cfg);
        std::vector<Mat> val(npts);
        for (int p = 0; p < npts; ++p) {
            Mat x = Mat::Zero(ipow(amb, r + k), ipow(amb, r));
            const long na = ipow(base->fiber_rank, r + k);
            const long nb = ipow(base->fiber_rank, r);
            for (long a = 0; a < na; ++a)
                for (long b = 0; b < nb; ++b)
                    x += Scalar(gauss(rng), gauss(rng)) *
                         comp.basis_element(p, static_cast<int>(a), static_cast<int>(b));
            val[p] = std::move(x);
        }
        GradedField x = GradedField::create(base, r, k, std::move(val), cfg);
        GradedField lhs = canonical_endo(x);
        GradedField rhs;
        bool first = true;
        for (const auto& psi : family.psi) {
            GradedField term = product(product(psi, x, cfg), adjoint(psi), cfg);
            if (first) {
                rhs = std::move(term);
                first = false;
            } else {
                for (int p = 0; p < npts; ++p) rhs.val[p] += term.val[p];
            }
        }
        for (int p = 0; p < npts; ++p)
            family.inner_residual =
                std::max(family.inner_residual, op_norm(Mat(lhs.val[p] - rhs.val[p])));
    }
    if (family.inner_residual > cfg.tol.intertwiner)
        fail(ErrorKind::Inconsistency, "canonical endomorphism is not implemented by the sections");
    return family;
}

PushforwardCocycle::PushforwardCocycle(Cocycle cocycle, int level, int grade)
    : cocycle_(std::move(cocycle)), level_(level), grade_(grade) {
    if (level_ < 0 || level_ + grade_ < 0)
        fail(ErrorKind::Validation, "pushforward needs level >= 0 and level+grade >= 0");
}

Mat PushforwardCocycle::apply(int i, int j, int position, const Mat& t) const {
    const Mat a = cocycle_.at(i, j, position);
    const long rows = ipow(cocycle_.fiber_rank, level_ + grade_);
    const long cols = ipow(cocycle_.fiber_rank, level_);
    if (t.rows() != rows || t.cols() != cols)
        fail(ErrorKind::Dimension, "pushforward: graded matrix has wrong shape");
    return kron_pow(a, level_ + grade_) * t * kron_pow(a.adjoint(), level_);
}

} // namespace fibercat
