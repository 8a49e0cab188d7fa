// bundles.hpp — concrete line bundles over the standard meshes: prescribed
// winding classes, duals and tensor products, graded section modules, the
// sampled sphere-bundle check, and the dual-bundle comparison that exhibits
// distinct bundles with identified graded section data.

#pragma once

#include "fibercat/fieldobj.hpp"

namespace fibercat {

enum class BaseKind { Circle, TwoPatchSphere };

const char* base_kind_name(BaseKind kind);

struct LineBundleModel {
    BaseKind kind = BaseKind::TwoPatchSphere;
    int resolution = 0;
    Mesh mesh; // rebuilt deterministically from kind + resolution
    Cocycle cocycle;
    int chern = 0;
};

// Transition exp(i c theta) along the overlap angle coordinate; the stored
// class is recomputed from the cocycle and must agree with c. The circle
// base only carries the trivial class. Requires resolution >= 4|c| + 4.
LineBundleModel make_line_bundle(int c, BaseKind kind, int resolution,
                                 const Config& cfg = {});

// Rebuilds the model invariants from parts (deserialization path).
LineBundleModel assemble_line_bundle(BaseKind kind, int resolution,
                                     Cocycle cocycle, const Config& cfg = {});

LineBundleModel dual(const LineBundleModel& l, const Config& cfg = {});
LineBundleModel tensor_bundle(const LineBundleModel& a, const LineBundleModel& b,
                              const Config& cfg = {});
// Block-diagonal direct sum of cocycles over a common cover; fiber ranks add.
Cocycle dsum_cocycle(const Cocycle& a, const Cocycle& b);

// Local scalar data {psi_i} per patch satisfying psi_i = lambda_ij^k psi_j
// at overlap samples, seeded as 1 on patch 0 and propagated through the
// gluing relation. Sample zeros are reported, not failed.
struct SectionData {
    int grade = 0;
    std::vector<std::vector<Scalar>> values; // aligned with patch point lists
    double max_residual = 0.0;
    int zero_count = 0;
    int local_rank = 1;
};

SectionData section_module(const LineBundleModel& l, int grade, const Config& cfg = {});
// Pointwise product of local data; grades add and compatibility is rechecked.
SectionData section_product(const LineBundleModel& l, const SectionData& a,
                            const SectionData& b, const Config& cfg = {});
double section_sup_norm(const SectionData& s);

// Maps graded sections psi to functions hat{psi}_i(w, z) = psi_i(w) z^{-k}
// on the sampled sphere bundle glued by (w, z) -> (w, lambda_ij(w) z) and
// verifies chart consistency, multiplicativity, adjoint compatibility and
// sup-norm preservation.
struct SpectrumReport {
    double chart_residual = 0.0;
    double mult_residual = 0.0;
    double norm_residual = 0.0;
    double adjoint_residual = 0.0;
    bool pass = false;
};

SpectrumReport spectrum_hat_map(const LineBundleModel& l, int grade_cap,
                                int fiber_samples, const Config& cfg = {});

// Grade-k section data of L coincides with grade-(-k) data of the dual,
// while the classes differ whenever the winding is nonzero.
struct DualIsoReport {
    int chern = 0;
    int chern_dual = 0;
    double identification_residual = 0.0;
    bool classes_equal = false;
    bool pass = false;
};

DualIsoReport dual_iso_check(const LineBundleModel& l, int grade_cap,
                             const Config& cfg = {});

} // namespace fibercat
