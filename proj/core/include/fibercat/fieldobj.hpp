// fieldobj.hpp — objects and arrows of the extension category over a
// discretized base: projection-valued fields, Murray-von Neumann isometries,
// trivializations, transition cocycles, the equivalence decision and the
// clutching construction.

#pragma once

#include <memory>
#include <optional>
#include <string>

#include "fibercat/basespace.hpp"
#include "fibercat/matcat.hpp"

namespace fibercat {

// A projection-valued map on sample points. delta is the continuity
// certificate max over edges of ||e(a) - e(b)|| and must stay below 1 for
// the trivialization machinery to apply. On a connected space the fiber
// rank is constant; create() verifies all of this.
struct FieldProjection {
    int ambient_rank = 0;
    std::vector<Mat> proj; // one per point
    double delta = 0.0;
    int fiber_rank = 0;

    static FieldProjection create(const SampleSpace& space, int ambient_rank,
                                  std::vector<Mat> proj, const Config& cfg = {});

    const Mat& at(int point) const { return proj.at(point); }
    int num_points() const { return static_cast<int>(proj.size()); }
};

// A pointwise intertwiner x with f x e = x at every point.
struct FieldArrow {
    std::vector<Mat> val;
    double delta = 0.0;        // max edge increment, informational
    double max_residual = 0.0; // worst ||f x e - x||
};

FieldArrow make_field_arrow(const SampleSpace& space, const FieldProjection& e,
                            const FieldProjection& f, std::vector<Mat> val,
                            const Config& cfg = {});

// Per-patch coisometry fields v_i with v_i* v_i = e and v_i v_i* = 1 on the
// constant fiber, indexed like the cover's patch point lists.
struct Trivialization {
    int fiber_rank = 0;
    std::vector<std::vector<Mat>> charts;
};

// Transition unitaries alpha_ij = v_i v_j* on overlaps; satisfies
// alpha_ij alpha_jk = alpha_ik on triple overlaps and alpha_ji = alpha_ij*.
struct Cocycle {
    int fiber_rank = 0;
    std::map<std::pair<int, int>, std::vector<Mat>> alpha; // keyed i < j

    // Either orientation; (i, j) with i > j returns the adjoint entry.
    Mat at(int i, int j, int position) const;
    const std::vector<Mat>& entries(int i, int j) const; // requires i < j
};

// Partial isometry u with u*u = p, u u* = q, built as the polar part of qp.
// Requires ||p - q|| < 1; otherwise the projections need not be equivalent
// and a NotEquivalent error is raised.
Mat mvn_isometry(const Mat& p, const Mat& q, const Config& cfg = {});

// Chart construction per patch from the patch's lowest point id as base
// point. Fails with RefineCover when some in-patch distance reaches 1 and
// with Inconsistency when patches disagree on the fiber rank.
Trivialization trivialize(const SampleSpace& space, const Cover& cover,
                          const FieldProjection& e, const Config& cfg = {});

Cocycle cocycle_of(const SampleSpace& space, const Cover& cover,
                   const Trivialization& t, const Config& cfg = {});

// Integer Cech class of a rank-1 cocycle: total winding of arg(alpha) along
// the closed loops formed by overlaps, phase-unwrapped with steps < pi.
// Overlap components that are not closed loops contribute nothing.
int chern_number(const SampleSpace& space, const Cover& cover, const Cocycle& c);

// Pointwise determinant cocycle; rank-1 cocycles return a copy.
Cocycle determinant_cocycle(const Cocycle& c);

struct GaugeFamily {
    int fiber_rank = 0;
    std::vector<std::vector<Mat>> u; // per patch, indexed like patch point lists
    double max_residual = 0.0;       // worst ||u_i a'_ij u_j* - a_ij|| over overlaps
    double edge_delta = 0.0;         // max in-patch edge increment, informational
};

enum class Equivalence { Equivalent, Inequivalent, Undecided };

struct EquivalenceResult {
    Equivalence decision = Equivalence::Undecided;
    std::optional<GaugeFamily> gauge; // present when Equivalent
    std::string witness;              // human-readable certificate summary
};

// Decides delta(c1) = delta(c2) over a common cover. Distinct integer Chern
// classes of the determinant cocycles certify inequivalence; otherwise a
// spanning-tree gauge is constructed and verified on every overlap. The
// tree gauge is sound but not complete, so Undecided is a possible outcome.
EquivalenceResult equivalent(const SampleSpace& space, const Cover& cover,
                             const Cocycle& c1, const Cocycle& c2,
                             const Config& cfg = {});

// Assembles a global unitary intertwiner w with w*w = e, w w* = f from
// patchwise pieces (v^f_i)* u_i* v^e_i; the pieces must agree on overlaps,
// which is exactly the gauge relation alpha^e_ij = u_i alpha^f_ij u_j*.
FieldArrow clutch_intertwiner(const SampleSpace& space, const Cover& cover,
                              const FieldProjection& e, const FieldProjection& f,
                              const Trivialization& te, const Trivialization& tf,
                              const GaugeFamily& gauge, const Config& cfg = {});

// (m*e)(p) = e(point_map[p]) for a graph morphism point_map from `domain`
// into the space carrying e; edges must map to edges or collapse.
FieldProjection pullback(const SampleSpace& domain, const std::vector<int>& point_map,
                         const SampleSpace& target, const FieldProjection& e,
                         const Config& cfg = {});

} // namespace fibercat
