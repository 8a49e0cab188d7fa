#include "fibercat/bundles.hpp"

#include <cmath>
#include <deque>
#include <set>

namespace fibercat {

namespace {

Mesh build_base(BaseKind kind, int resolution) {
    switch (kind) {
        case BaseKind::Circle: return build_circle(resolution);
        case BaseKind::TwoPatchSphere: return build_two_patch_sphere(resolution);
    }
    fail(ErrorKind::Validation, "unknown base kind");
}

double angle_coordinate(const SampleSpace& space, int point) {
    const auto& xy = space.coords.at(point);
    return std::atan2(xy[1], xy[0]);
}

Scalar unit_phase(double angle) { return Scalar(std::cos(angle), std::sin(angle)); }

Scalar int_pow(Scalar z, int k) {
    Scalar out(1.0, 0.0);
    const Scalar base = k >= 0 ? z : Scalar(1.0, 0.0) / z;
    for (int i = 0; i < std::abs(k); ++i) out *= base;
    return out;
}

// BFS copy of scalar values from seed points into the rest of a patch.
void extend_scalars(const SampleSpace& space, const Cover& cover, int patch_index,
                    const std::vector<int>& seeds, std::vector<Scalar>& values,
                    std::vector<char>& have) {
    const auto& patch = cover.patches[patch_index];
    std::set<int> in_patch(patch.begin(), patch.end());
    std::deque<int> queue;
    for (int s : seeds) {
        const int pos = cover.patch_position(patch_index, s);
        if (pos >= 0 && have[pos]) queue.push_back(s);
    }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        const int vpos = cover.patch_position(patch_index, v);
        for (int w : space.neighbors[v]) {
            if (!in_patch.count(w)) continue;
            const int wpos = cover.patch_position(patch_index, w);
            if (!have[wpos]) {
                have[wpos] = 1;
                values[wpos] = values[vpos];
                queue.push_back(w);
            }
        }
    }
}

} // namespace

const char* base_kind_name(BaseKind kind) {
    switch (kind) {
        case BaseKind::Circle: return "circle";
        case BaseKind::TwoPatchSphere: return "two_patch_sphere";
    }
    return "unknown";
}

LineBundleModel assemble_line_bundle(BaseKind kind, int resolution, Cocycle cocycle,
                                     const Config& cfg) {
    (void)cfg;
    if (cocycle.fiber_rank != 1)
        fail(ErrorKind::Validation, "line bundle needs a rank-1 cocycle");
    LineBundleModel l;
    l.kind = kind;
    l.resolution = resolution;
    l.mesh = build_base(kind, resolution);
    for (const auto& [key, points] : l.mesh.cover.overlaps) {
        auto it = cocycle.alpha.find(key);
        if (it == cocycle.alpha.end() || it->second.size() != points.size())
            fail(ErrorKind::Validation, "cocycle does not match the base cover");
    }
    l.cocycle = std::move(cocycle);
    l.chern = chern_number(l.mesh.space, l.mesh.cover, l.cocycle);
    return l;
}

LineBundleModel make_line_bundle(int c, BaseKind kind, int resolution,
                                 const Config& cfg) {
    if (resolution < 4 * std::abs(c) + 4)
        fail(ErrorKind::Resolution,
             "resolution too small for winding " + std::to_string(c) +
                 "; need at least " + std::to_string(4 * std::abs(c) + 4));
    if (kind == BaseKind::Circle && c != 0)
        fail(ErrorKind::Validation,
             "the circle base carries only the trivial class");
    Mesh mesh = build_base(kind, resolution);
    Cocycle cocycle;
    cocycle.fiber_rank = 1;
    for (const auto& [key, points] : mesh.cover.overlaps) {
        std::vector<Mat> entries(points.size());
        for (size_t idx = 0; idx < points.size(); ++idx) {
            Mat m(1, 1);
            m(0, 0) = unit_phase(c * angle_coordinate(mesh.space, points[idx]));
            entries[idx] = std::move(m);
        }
        cocycle.alpha[key] = std::move(entries);
    }
    LineBundleModel l = assemble_line_bundle(kind, resolution, std::move(cocycle), cfg);
    if (l.chern != c)
        fail(ErrorKind::Inconsistency,
             "constructed class " + std::to_string(l.chern) + " instead of " +
                 std::to_string(c));
    return l;
}

LineBundleModel dual(const LineBundleModel& l, const Config& cfg) {
    Cocycle conj;
    conj.fiber_rank = 1;
    for (const auto& [key, mats] : l.cocycle.alpha) {
        std::vector<Mat> entries(mats.size());
        for (size_t idx = 0; idx < mats.size(); ++idx)
            entries[idx] = mats[idx].conjugate();
        conj.alpha[key] = std::move(entries);
    }
    return assemble_line_bundle(l.kind, l.resolution, std::move(conj), cfg);
}

LineBundleModel tensor_bundle(const LineBundleModel& a, const LineBundleModel& b,
                              const Config& cfg) {
    if (a.kind != b.kind || a.resolution != b.resolution)
        fail(ErrorKind::Validation, "tensor: line bundles live over different bases");
    Cocycle prod;
    prod.fiber_rank = 1;
    for (const auto& [key, mats] : a.cocycle.alpha) {
        const auto& other = b.cocycle.alpha.at(key);
        std::vector<Mat> entries(mats.size());
        for (size_t idx = 0; idx < mats.size(); ++idx)
            entries[idx] = mats[idx].cwiseProduct(other[idx]);
        prod.alpha[key] = std::move(entries);
    }
    return assemble_line_bundle(a.kind, a.resolution, std::move(prod), cfg);
}

Cocycle dsum_cocycle(const Cocycle& a, const Cocycle& b) {
    Cocycle out;
    out.fiber_rank = a.fiber_rank + b.fiber_rank;
    for (const auto& [key, mats] : a.alpha) {
        auto it = b.alpha.find(key);
        if (it == b.alpha.end() || it->second.size() != mats.size())
            fail(ErrorKind::Validation, "direct sum: cocycles live over different covers");
        std::vector<Mat> entries(mats.size());
        for (size_t idx = 0; idx < mats.size(); ++idx) {
            Mat m = Mat::Zero(out.fiber_rank, out.fiber_rank);
            m.topLeftCorner(a.fiber_rank, a.fiber_rank) = mats[idx];
            m.bottomRightCorner(b.fiber_rank, b.fiber_rank) = it->second[idx];
            entries[idx] = std::move(m);
        }
        out.alpha[key] = std::move(entries);
    }
    if (b.alpha.size() != a.alpha.size())
        fail(ErrorKind::Validation, "direct sum: cocycles live over different covers");
    return out;
}

SectionData section_module(const LineBundleModel& l, int grade, const Config& cfg) {
    if (std::abs(grade) > cfg.grade_window)
        fail(ErrorKind::Validation, "grade exceeds the configured window");
    const SampleSpace& space = l.mesh.space;
    const Cover& cover = l.mesh.cover;
    SectionData s;
    s.grade = grade;
    s.values.resize(cover.patches.size());
    std::vector<std::vector<char>> have(cover.patches.size());
    for (size_t i = 0; i < cover.patches.size(); ++i) {
        s.values[i].assign(cover.patches[i].size(), Scalar(0.0, 0.0));
        have[i].assign(cover.patches[i].size(), 0);
    }
    // Seed patch 0 with the constant 1, then glue outward along the nerve tree.
    for (size_t pos = 0; pos < cover.patches[0].size(); ++pos) {
        s.values[0][pos] = Scalar(1.0, 0.0);
        have[0][pos] = 1;
    }
    const Nerve nn = nerve(cover);
    for (const auto& [parent, child] : nn.tree_edges) {
        const auto& pts = cover.overlap(parent, child);
        for (int point : pts) {
            const int ppos = cover.patch_position(parent, point);
            const int cpos = cover.patch_position(child, point);
            const int opos = cover.overlap_position(std::min(parent, child),
                                                    std::max(parent, child), point);
            // psi_parent = lambda_{parent,child}^k psi_child on the overlap.
            const Scalar lam = l.cocycle.at(parent, child, opos)(0, 0);
            s.values[child][cpos] = int_pow(lam, -grade) * s.values[parent][ppos];
            have[child][cpos] = 1;
        }
        extend_scalars(space, cover, child, pts, s.values[child], have[child]);
    }
    for (const auto& [key, points] : cover.overlaps) {
        const auto [i, j] = key;
        for (size_t idx = 0; idx < points.size(); ++idx) {
            const int point = points[idx];
            const Scalar lam = l.cocycle.at(i, j, static_cast<int>(idx))(0, 0);
            const Scalar lhs = s.values[i][cover.patch_position(i, point)];
            const Scalar rhs =
                int_pow(lam, grade) * s.values[j][cover.patch_position(j, point)];
            s.max_residual = std::max(s.max_residual, std::abs(lhs - rhs));
        }
    }
    for (const auto& patch_values : s.values)
        for (const auto& v : patch_values)
            if (std::abs(v) < 1e-12) ++s.zero_count;
    s.local_rank = 1;
    return s;
}

SectionData section_product(const LineBundleModel& l, const SectionData& a,
                            const SectionData& b, const Config& cfg) {
    (void)cfg;
    SectionData s;
    s.grade = a.grade + b.grade;
    s.values.resize(a.values.size());
    for (size_t i = 0; i < a.values.size(); ++i) {
        if (a.values[i].size() != b.values[i].size())
            fail(ErrorKind::Validation, "section product: patch data sizes differ");
        s.values[i].resize(a.values[i].size());
        for (size_t p = 0; p < a.values[i].size(); ++p)
            s.values[i][p] = a.values[i][p] * b.values[i][p];
    }
    const Cover& cover = l.mesh.cover;
    for (const auto& [key, points] : cover.overlaps) {
        const auto [i, j] = key;
        for (size_t idx = 0; idx < points.size(); ++idx) {
            const int point = points[idx];
            const Scalar lam = l.cocycle.at(i, j, static_cast<int>(idx))(0, 0);
            const Scalar lhs = s.values[i][cover.patch_position(i, point)];
            const Scalar rhs =
                int_pow(lam, s.grade) * s.values[j][cover.patch_position(j, point)];
            s.max_residual = std::max(s.max_residual, std::abs(lhs - rhs));
        }
    }
    for (const auto& patch_values : s.values)
        for (const auto& v : patch_values)
            if (std::abs(v) < 1e-12) ++s.zero_count;
    return s;
}

double section_sup_norm(const SectionData& s) {
    double sup = 0.0;
    for (const auto& patch_values : s.values)
        for (const auto& v : patch_values) sup = std::max(sup, std::abs(v));
    return sup;
}

SpectrumReport spectrum_hat_map(const LineBundleModel& l, int grade_cap,
                                int fiber_samples, const Config& cfg) {
    if (fiber_samples < 4 * grade_cap + 4)
        fail(ErrorKind::Validation,
             "fiber sampling too coarse for the requested grades");
    const Cover& cover = l.mesh.cover;
    std::vector<SectionData> sections;
    for (int k = -grade_cap; k <= grade_cap; ++k)
        sections.push_back(section_module(l, k, cfg));
    auto section_of = [&](int k) -> const SectionData& {
        return sections[static_cast<size_t>(k + grade_cap)];
    };
    std::vector<Scalar> fiber(fiber_samples);
    for (int t = 0; t < fiber_samples; ++t)
        fiber[t] = unit_phase(2.0 * M_PI * t / fiber_samples);

    SpectrumReport report;
    auto hat = [](const SectionData& s, int patch, int pos, Scalar z) {
        return s.values[patch][pos] * int_pow(z, -s.grade);
    };

    // (a) chart consistency across the glued fiber coordinate.
    for (int k = -grade_cap; k <= grade_cap; ++k) {
        const SectionData& s = section_of(k);
        for (const auto& [key, points] : cover.overlaps) {
            const auto [i, j] = key;
            for (size_t idx = 0; idx < points.size(); ++idx) {
                const int point = points[idx];
                const Scalar lam = l.cocycle.at(i, j, static_cast<int>(idx))(0, 0);
                const int ipos = cover.patch_position(i, point);
                const int jpos = cover.patch_position(j, point);
                for (const Scalar& z : fiber)
                    report.chart_residual = std::max(
                        report.chart_residual,
                        std::abs(hat(s, i, ipos, lam * z) - hat(s, j, jpos, z)));
            }
        }
    }

    // (b) multiplicativity and (adjoint) conjugation compatibility.
    for (int k1 = -grade_cap; k1 <= grade_cap; ++k1)
        for (int k2 = -grade_cap; k2 <= grade_cap; ++k2) {
            if (std::abs(k1 + k2) > grade_cap) continue;
            const SectionData prod = section_product(l, section_of(k1), section_of(k2), cfg);
            for (size_t i = 0; i < cover.patches.size(); ++i)
                for (size_t pos = 0; pos < cover.patches[i].size(); ++pos)
                    for (const Scalar& z : fiber) {
                        const Scalar lhs = hat(prod, static_cast<int>(i),
                                               static_cast<int>(pos), z);
                        const Scalar rhs =
                            hat(section_of(k1), static_cast<int>(i), static_cast<int>(pos), z) *
                            hat(section_of(k2), static_cast<int>(i), static_cast<int>(pos), z);
                        report.mult_residual =
                            std::max(report.mult_residual, std::abs(lhs - rhs));
                    }
        }
    for (int k = -grade_cap; k <= grade_cap; ++k) {
        const SectionData& s = section_of(k);
        for (size_t i = 0; i < cover.patches.size(); ++i)
            for (size_t pos = 0; pos < cover.patches[i].size(); ++pos)
                for (const Scalar& z : fiber) {
                    // The adjoint section has conjugate values and grade -k.
                    const Scalar direct =
                        std::conj(s.values[i][pos]) * int_pow(z, k);
                    const Scalar conj_hat =
                        std::conj(hat(s, static_cast<int>(i), static_cast<int>(pos), z));
                    report.adjoint_residual =
                        std::max(report.adjoint_residual, std::abs(direct - conj_hat));
                }
    }

    // (c) sup norms agree since |z^{-k}| = 1 on the fiber circle.
    for (int k = -grade_cap; k <= grade_cap; ++k) {
        const SectionData& s = section_of(k);
        double hat_sup = 0.0;
        for (size_t i = 0; i < cover.patches.size(); ++i)
            for (size_t pos = 0; pos < cover.patches[i].size(); ++pos)
                for (const Scalar& z : fiber)
                    hat_sup = std::max(
                        hat_sup,
                        std::abs(hat(s, static_cast<int>(i), static_cast<int>(pos), z)));
        report.norm_residual = std::max(
            report.norm_residual, std::abs(hat_sup - section_sup_norm(s)));
    }

    const double tol = cfg.tol.intertwiner;
    report.pass = report.chart_residual <= tol && report.mult_residual <= tol &&
                  report.norm_residual <= tol && report.adjoint_residual <= tol;
    return report;
}

DualIsoReport dual_iso_check(const LineBundleModel& l, int grade_cap,
                             const Config& cfg) {
    DualIsoReport report;
    const LineBundleModel dl = dual(l, cfg);
    report.chern = l.chern;
    report.chern_dual = dl.chern;
    report.classes_equal = (report.chern == report.chern_dual);
    for (int k = -grade_cap; k <= grade_cap; ++k) {
        const SectionData sk = section_module(l, k, cfg);
        const SectionData dk = section_module(dl, -k, cfg);
        for (size_t i = 0; i < sk.values.size(); ++i)
            for (size_t pos = 0; pos < sk.values[i].size(); ++pos)
                report.identification_residual =
                    std::max(report.identification_residual,
                             std::abs(sk.values[i][pos] - dk.values[i][pos]));
    }
    report.pass = report.identification_residual <= cfg.tol.intertwiner;
    return report;
}

} // namespace fibercat
