// equivariant.hpp — finite-group actions on graded components by
// conjugation with tensor powers, and invariant intertwiners computed by
// group averaging.

#pragma once

#include <memory>

#include "fibercat/drfield.hpp"

namespace fibercat {

// A finite group given by the unitary matrices of a representation. The
// element list must be closed under products and inverses; products are
// matched back to list entries within a tolerance, and ambiguous matches
// are rejected.
struct FiniteGroupRep {
    std::vector<Mat> elements;
    int identity = -1;
    std::vector<std::vector<int>> mult; // mult[g][h] = index of elements[g]*elements[h]

    static FiniteGroupRep create(std::vector<Mat> elements, double match_tol = 1e-10);

    int dim() const { return elements.empty() ? 0 : static_cast<int>(elements[0].rows()); }
    int order() const { return static_cast<int>(elements.size()); }
};

// g^{tensor(r+k)} t (g*)^{tensor r}.
Mat group_action(const Mat& g, int level, int grade, const Mat& t);

// Trace of the averaging projector restricted to (e^r, e^(r+k)), i.e. the
// dimension of the fixed subspace, computed numerically from compressed
// actions. Requires e(point) to commute with every group element.
std::vector<int> invariant_dimensions(const FieldProjection& e,
                                      const FiniteGroupRep& group, int level,
                                      int grade, const Config& cfg = {});

// Single-fiber variant for a constant projection.
int invariant_dimension_fiber(const Mat& e, const FiniteGroupRep& group,
                              int level, int grade, const Config& cfg = {});

// Orthonormal basis of the fixed subspace at one fiber, obtained by
// averaging the graded basis and re-orthonormalizing (Hilbert-Schmidt,
// deterministic pivot order). Intended for small components.
std::vector<Mat> invariant_basis_fiber(const Mat& e, const FiniteGroupRep& group,
                                       int level, int grade, const Config& cfg = {});

} // namespace fibercat
