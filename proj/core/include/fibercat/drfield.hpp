// drfield.hpp — truncated graded components of the algebra attached to a
// projection field: fiberwise intertwiner spaces between tensor powers,
// graded arithmetic with the circle action, the canonical endomorphism,
// norm functions, section generators with their Cuntz-type relations, and
// the pushforward of transition cocycles to graded conjugations.

#pragma once

#include <memory>

#include "fibercat/fieldobj.hpp"

namespace fibercat {

// An element of (e^r, e^(r+k)) sampled over the base: at each point a
// matrix x with e^{tensor(r+k)} x e^{tensor r} = x, stored in the ambient
// matrix space.
struct GradedField {
    std::shared_ptr<const FieldProjection> base;
    int level = 0; // r >= 0
    int grade = 0; // k, with r + k >= 0
    std::vector<Mat> val;

    static GradedField create(std::shared_ptr<const FieldProjection> base,
                              int level, int grade, std::vector<Mat> val,
                              const Config& cfg = {});
};

// x after y, composed at the minimal common level; grades add.
GradedField product(const GradedField& x, const GradedField& y, const Config& cfg = {});
GradedField adjoint(const GradedField& x);
// Circle action: multiplies grade-k elements by z^k. |z| must be 1.
GradedField gauge_action(Scalar z, const GradedField& x);
// x tensor e^{tensor s} on the right; the level rises by s, the grade and
// all pointwise operator norms are unchanged.
GradedField right_embed(const GradedField& x, int steps);
// e tensor x on the left; the level rises by one, the grade is unchanged.
GradedField canonical_endo(const GradedField& x);

struct NormReport {
    std::vector<double> pointwise;
    double sup = 0.0;
};
NormReport field_norm(const GradedField& x);

// Per-point orthonormal (Hilbert-Schmidt) bases of (e^r, e^(r+k)). Basis
// elements are built from range isometries of the tensor powers and are
// materialized on demand; dim(point) = fiber_rank^(2r+k).
class GradedComponent {
public:
    GradedComponent(std::shared_ptr<const FieldProjection> base, int level,
                    int grade, const Config& cfg = {});

    int level() const { return level_; }
    int grade() const { return grade_; }
    int dim(int point) const { return dims_.at(point); }
    const std::vector<int>& dims() const { return dims_; }

    // Element indexed by (a, b) with a < fiber_rank^(r+k), b < fiber_rank^r.
    Mat basis_element(int point, int a, int b) const;
    std::vector<Mat> basis(int point) const; // all of them, (a,b) lexicographic

private:
    std::shared_ptr<const FieldProjection> base_;
    int level_, grade_;
    std::vector<Mat> fiber_isometry_; // per point, ambient x fiber_rank
    std::vector<int> dims_;
};

GradedComponent graded_component(std::shared_ptr<const FieldProjection> base,
                                 int level, int grade, const Config& cfg = {});

// Generators psi_l = e * (l-th standard column) of the grade-1 component,
// with gram matrix e itself: psi_l* psi_m = e_lm and sum_l psi_l psi_l* = e.
// Construction verifies both relations and the inner-endomorphism identity
// sigma_e(x) = sum_l psi_l x psi_l* on sampled graded elements.
struct SectionFamily {
    std::vector<GradedField> psi;
    double gram_residual = 0.0;
    double sum_residual = 0.0;
    double inner_residual = 0.0;
};

SectionFamily section_generators(std::shared_ptr<const FieldProjection> base,
                                 const Config& cfg = {});

// Grade-wise conjugation action of a transition cocycle:
// t -> alpha^{tensor(r+k)} t (alpha*)^{tensor r}.
class PushforwardCocycle {
public:
    PushforwardCocycle(Cocycle cocycle, int level, int grade);

    int level() const { return level_; }
    int grade() const { return grade_; }
    Mat apply(int i, int j, int position, const Mat& t) const;

private:
    Cocycle cocycle_;
    int level_, grade_;
};

} // namespace fibercat
