#include "fibercat/fieldobj.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "fibercat/detail/parallel.hpp"

namespace fibercat {

namespace {

Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

double unitary_residual(const Mat& u) {
    const Eigen::Index r = u.rows();
    double a = op_norm(Mat(u * u.adjoint() - Mat::Identity(r, r)));
    double b = op_norm(Mat(u.adjoint() * u - Mat::Identity(u.cols(), u.cols())));
    return std::max(a, b);
}

} // namespace

FieldProjection FieldProjection::create(const SampleSpace& space, int ambient_rank,
                                        std::vector<Mat> proj, const Config& cfg) {
    if (ambient_rank < 0) fail(ErrorKind::Validation, "negative ambient rank");
    if (static_cast<int>(proj.size()) != space.num_points)
        fail(ErrorKind::Validation, "field has wrong number of sample points");
    for (const auto& p : proj) {
        if (p.rows() != ambient_rank || p.cols() != ambient_rank)
            fail(ErrorKind::Dimension, "field entry has wrong ambient rank");
        if (!is_projection(p, cfg.tol.projection))
            fail(ErrorKind::Validation, "field entry is not a projection");
    }
    FieldProjection e;
    e.ambient_rank = ambient_rank;
    e.proj = std::move(proj);
    for (const auto& [a, b] : space.edges)
        e.delta = std::max(e.delta, op_norm(Mat(e.proj[a] - e.proj[b])));
    if (e.delta >= 1.0)
        fail(ErrorKind::Validation,
             "continuity certificate delta >= 1; refine the sampling");
    e.fiber_rank = space.num_points > 0 ? projection_rank(e.proj[0]) : 0;
    if (space.connected()) {
        for (const auto& p : e.proj)
            if (projection_rank(p) != e.fiber_rank)
                fail(ErrorKind::Inconsistency,
                     "fiber rank is not constant on a connected space");
    }
    return e;
}

FieldArrow make_field_arrow(const SampleSpace& space, const FieldProjection& e,
                            const FieldProjection& f, std::vector<Mat> val,
                            const Config& cfg) {
    if (static_cast<int>(val.size()) != space.num_points)
        fail(ErrorKind::Validation, "arrow has wrong number of sample points");
    FieldArrow x;
    for (int p = 0; p < space.num_points; ++p) {
        const Mat& v = val[p];
        if (v.rows() != f.ambient_rank || v.cols() != e.ambient_rank)
            fail(ErrorKind::Dimension, "arrow entry has wrong shape");
        x.max_residual =
            std::max(x.max_residual, op_norm(Mat(f.at(p) * v * e.at(p) - v)));
    }
    if (x.max_residual > cfg.tol.intertwiner)
        fail(ErrorKind::Validation, "arrow does not intertwine the fields");
    for (const auto& [a, b] : space.edges)
        x.delta = std::max(x.delta, op_norm(Mat(val[a] - val[b])));
    x.val = std::move(val);
    return x;
}

Mat Cocycle::at(int i, int j, int position) const {
    if (i == j) return Mat::Identity(fiber_rank, fiber_rank);
    if (i < j) return alpha.at({i, j}).at(position);
    return alpha.at({j, i}).at(position).adjoint();
}

const std::vector<Mat>& Cocycle::entries(int i, int j) const {
    auto it = alpha.find({i, j});
    if (it == alpha.end())
        fail(ErrorKind::Validation, "cocycle has no entry for this overlap");
    return it->second;
}

Mat mvn_isometry(const Mat& p, const Mat& q, const Config& cfg) {
    if (p.rows() != p.cols() || q.rows() != q.cols() || p.rows() != q.rows())
        fail(ErrorKind::Dimension, "mvn_isometry: shapes differ");
    if (!is_projection(p, cfg.tol.projection) || !is_projection(q, cfg.tol.projection))
        fail(ErrorKind::Validation, "mvn_isometry: inputs must be projections");
    const double dist = op_norm(Mat(p - q));
    if (dist >= 1.0)
        fail(ErrorKind::NotEquivalent,
             "||p - q|| >= 1: projections need not be equivalent");
    const Eigen::Index n = p.rows();
    if (n == 0) return Mat::Zero(0, 0);
    // Polar part of qp: u = qp (pqp)^{-1/2} on range(p). All eigenvalues of
    // pqp on range(p) are >= 1 - dist, so the cutoff below is safe.
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(p * q * p));
    if (es.info() != Eigen::Success)
        fail(ErrorKind::Inconsistency, "mvn_isometry: eigensolver failed");
    const double cutoff = 0.5 * (1.0 - dist);
    Mat inv_sqrt = Mat::Zero(n, n);
    int kept = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lambda = es.eigenvalues()(i);
        if (lambda > cutoff) {
            inv_sqrt += (1.0 / std::sqrt(lambda)) * es.eigenvectors().col(i) *
                        es.eigenvectors().col(i).adjoint();
            ++kept;
        }
    }
    if (kept != projection_rank(p))
        fail(ErrorKind::Inconsistency, "mvn_isometry: rank drop in pqp");
    Mat u = q * p * inv_sqrt;
    const double check = std::max(op_norm(Mat(u.adjoint() * u - p)),
                                  op_norm(Mat(u * u.adjoint() - q)));
    if (check > cfg.tol.intertwiner)
        fail(ErrorKind::Inconsistency, "mvn_isometry: polar part lost accuracy");
    return u;
}

Trivialization trivialize(const SampleSpace& space, const Cover& cover,
                          const FieldProjection& e, const Config& cfg) {
    Trivialization t;
    t.charts.resize(cover.patches.size());
    int fiber_rank = -1;
    for (size_t i = 0; i < cover.patches.size(); ++i) {
        const auto& patch = cover.patches[i];
        const int base = patch.front(); // lowest id; deterministic
        const Mat& pb = e.at(base);
        for (int point : patch)
            if (op_norm(Mat(e.at(point) - pb)) >= 1.0)
                fail(ErrorKind::RefineCover,
                     "patch " + std::to_string(i) +
                         " is too coarse: in-patch distance reaches 1");
        const int rank = projection_rank(pb);
        if (fiber_rank < 0)
            fiber_rank = rank;
        else if (rank != fiber_rank)
            fail(ErrorKind::Inconsistency,
                 "patches disagree on the fiber rank over a connected space");
        const Mat w = range_isometry(pb, cfg.tol.projection); // ambient x rank
        auto& chart = t.charts[i];
        chart.resize(patch.size());
        detail::parallel_for(
            static_cast<int>(patch.size()), cfg.threads, [&](int idx) {
                const int point = patch[idx];
                const Mat u = mvn_isometry(e.at(point), pb, cfg);
                Mat v = w.adjoint() * u; // rank x ambient
                const double res =
                    std::max(op_norm(Mat(v * v.adjoint() - Mat::Identity(rank, rank))),
                             op_norm(Mat(v.adjoint() * v - e.at(point))));
                if (res > cfg.tol.intertwiner)
                    fail(ErrorKind::Inconsistency, "trivialization chart lost accuracy");
                chart[idx] = std::move(v);
            });
    }
    t.fiber_rank = std::max(fiber_rank, 0);
    return t;
}

Cocycle cocycle_of(const SampleSpace& space, const Cover& cover,
                   const Trivialization& t, const Config& cfg) {
    (void)space;
    Cocycle c;
    c.fiber_rank = t.fiber_rank;
    for (const auto& [key, points] : cover.overlaps) {
        const auto [i, j] = key;
        std::vector<Mat> entries(points.size());
        for (size_t idx = 0; idx < points.size(); ++idx) {
            const int point = points[idx];
            const Mat& vi = t.charts[i][cover.patch_position(i, point)];
            const Mat& vj = t.charts[j][cover.patch_position(j, point)];
            Mat a = vi * vj.adjoint();
            if (unitary_residual(a) > cfg.tol.unitarity)
                fail(ErrorKind::Inconsistency, "transition matrix is not unitary");
            entries[idx] = std::move(a);
        }
        c.alpha[key] = std::move(entries);
    }
    for (const auto& [key, points] : cover.triples) {
        const auto [i, j, k] = key;
        for (int point : points) {
            const Mat aij = c.at(i, j, cover.overlap_position(i, j, point));
            const Mat ajk = c.at(j, k, cover.overlap_position(j, k, point));
            const Mat aik = c.at(i, k, cover.overlap_position(i, k, point));
            if (op_norm(Mat(aij * ajk - aik)) > cfg.tol.intertwiner)
                fail(ErrorKind::Inconsistency, "cocycle identity fails on a triple");
        }
    }
    return c;
}

namespace {

// Closed loops inside one overlap: components where every vertex has exactly
// two neighbors. Returned in cyclic order, starting from the lowest id and
// stepping first to its lower-id neighbor; that orientation is what makes
// the winding sign reproducible.
std::vector<std::vector<int>> overlap_loops(const SampleSpace& space,
                                            const std::vector<int>& points) {
    std::vector<std::vector<int>> loops;
    for (const auto& comp : induced_components(space, points)) {
        if (comp.size() < 3) continue;
        std::set<int> in_comp(comp.begin(), comp.end());
        bool cycle = true;
        std::map<int, std::vector<int>> nbrs;
        for (int v : comp) {
            for (int w : space.neighbors[v])
                if (in_comp.count(w)) nbrs[v].push_back(w);
            if (nbrs[v].size() != 2) {
                cycle = false;
                break;
            }
        }
        if (!cycle) continue;
        std::vector<int> seq;
        int start = comp.front();
        int cur = std::min(nbrs[start][0], nbrs[start][1]);
        int prev = start;
        seq.push_back(start);
        while (cur != start) {
            seq.push_back(cur);
            int nxt = nbrs[cur][0] == prev ? nbrs[cur][1] : nbrs[cur][0];
            prev = cur;
            cur = nxt;
        }
        loops.push_back(std::move(seq));
    }
    return loops;
}

double phase_step(Scalar from, Scalar to) {
    if (std::abs(from) == 0.0 || std::abs(to) == 0.0)
        fail(ErrorKind::Inconsistency, "vanishing transition value");
    double step = std::arg(to / from);
    if (std::abs(step) >= M_PI - 1e-12)
        fail(ErrorKind::Resolution,
             "phase step >= pi between adjacent samples; winding undefined at this mesh");
    return step;
}

} // namespace

int chern_number(const SampleSpace& space, const Cover& cover, const Cocycle& c) {
    if (c.fiber_rank != 1)
        fail(ErrorKind::Validation, "chern_number needs a rank-1 cocycle");
    long total = 0;
    for (const auto& [key, points] : cover.overlaps) {
        const auto [i, j] = key;
        for (const auto& loop : overlap_loops(space, points)) {
            double winding = 0.0;
            for (size_t s = 0; s < loop.size(); ++s) {
                const int a = loop[s];
                const int b = loop[(s + 1) % loop.size()];
                const Scalar za = c.at(i, j, cover.overlap_position(i, j, a))(0, 0);
                const Scalar zb = c.at(i, j, cover.overlap_position(i, j, b))(0, 0);
                winding += phase_step(za, zb);
            }
            const double turns = winding / (2.0 * M_PI);
            const long rounded = std::lround(turns);
            if (std::abs(turns - static_cast<double>(rounded)) > 1e-6)
                fail(ErrorKind::Inconsistency, "winding did not close up to an integer");
            total += rounded;
        }
    }
    return static_cast<int>(total);
}

Cocycle determinant_cocycle(const Cocycle& c) {
    Cocycle d;
    d.fiber_rank = 1;
    for (const auto& [key, mats] : c.alpha) {
        std::vector<Mat> dets(mats.size());
        for (size_t idx = 0; idx < mats.size(); ++idx) {
            Mat m(1, 1);
            m(0, 0) = c.fiber_rank == 0 ? Scalar(1.0, 0.0) : mats[idx].determinant();
            dets[idx] = std::move(m);
        }
        d.alpha[key] = std::move(dets);
    }
    return d;
}

namespace {

void check_cocycle_matches_cover(const Cover& cover, const Cocycle& c) {
    for (const auto& [key, points] : cover.overlaps) {
        auto it = c.alpha.find(key);
        if (it == c.alpha.end() || it->second.size() != points.size())
            fail(ErrorKind::Validation, "cocycle does not match the cover's overlaps");
        for (const auto& m : it->second)
            if (m.rows() != c.fiber_rank || m.cols() != c.fiber_rank)
                fail(ErrorKind::Dimension, "cocycle entry has wrong fiber rank");
    }
}

// Extends values already defined on `seeds` to the rest of the patch by
// copying along patch edges, breadth-first, lowest id first.
void extend_over_patch(const SampleSpace& space, const std::vector<int>& patch,
                       const std::vector<int>& seeds, std::vector<Mat>& values,
                       const Cover& cover, int patch_index) {
    std::set<int> in_patch(patch.begin(), patch.end());
    std::vector<char> have(patch.size(), 0);
    std::deque<int> queue;
    for (int s : seeds) {
        const int pos = cover.patch_position(patch_index, s);
        if (pos >= 0 && !have[pos]) {
            have[pos] = 1;
            queue.push_back(s);
        }
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
    // Points unreachable from the seeds keep their identity placeholder.
}

} // namespace

EquivalenceResult equivalent(const SampleSpace& space, const Cover& cover,
                             const Cocycle& c1, const Cocycle& c2,
                             const Config& cfg) {
    if (c1.fiber_rank != c2.fiber_rank)
        fail(ErrorKind::Validation, "cocycles have different fiber ranks");
    check_cocycle_matches_cover(cover, c1);
    check_cocycle_matches_cover(cover, c2);
    require_connected_overlaps(space, cover);
    const int rank = c1.fiber_rank;

    EquivalenceResult result;
    // Determinant winding is gauge invariant; distinct integers certify
    // distinct classes. Skipped when the mesh is too coarse to unwind.
    if (rank >= 1) {
        try {
            const int ch1 = chern_number(space, cover, determinant_cocycle(c1));
            const int ch2 = chern_number(space, cover, determinant_cocycle(c2));
            if (ch1 != ch2) {
                result.decision = Equivalence::Inequivalent;
                result.witness = "determinant winding " + std::to_string(ch1) +
                                 " != " + std::to_string(ch2);
                return result;
            }
        } catch (const Error& err) {
            if (err.kind() != ErrorKind::Resolution) throw;
        }
    }

    const Nerve nn = nerve(cover);
    if (static_cast<int>(nn.tree_edges.size()) + 1 <
        static_cast<int>(cover.patches.size()))
        fail(ErrorKind::Validation, "nerve is disconnected");

    GaugeFamily gauge;
    gauge.fiber_rank = rank;
    gauge.u.resize(cover.patches.size());
    for (size_t i = 0; i < cover.patches.size(); ++i)
        gauge.u[i].assign(cover.patches[i].size(), Mat::Identity(rank, rank));

    // u_root = 1; across each tree edge solve u_i a'_ij u_j* = a_ij for u_j
    // on the overlap, then extend into the rest of the patch.
    for (const auto& [parent, child] : nn.tree_edges) {
        const auto& pts = cover.overlap(parent, child);
        for (int point : pts) {
            const int opos = cover.overlap_position(std::min(parent, child),
                                                    std::max(parent, child), point);
            const Mat a1 = c1.at(parent, child, opos);
            const Mat a2 = c2.at(parent, child, opos);
            const Mat& up = gauge.u[parent][cover.patch_position(parent, point)];
            gauge.u[child][cover.patch_position(child, point)] =
                a1.adjoint() * up * a2;
        }
        extend_over_patch(space, cover.patches[child], pts, gauge.u[child], cover,
                          child);
    }

    for (const auto& [key, points] : cover.overlaps) {
        const auto [i, j] = key;
        for (size_t idx = 0; idx < points.size(); ++idx) {
            const int point = points[idx];
            const Mat& ui = gauge.u[i][cover.patch_position(i, point)];
            const Mat& uj = gauge.u[j][cover.patch_position(j, point)];
            const Mat a1 = c1.at(i, j, static_cast<int>(idx));
            const Mat a2 = c2.at(i, j, static_cast<int>(idx));
            gauge.max_residual = std::max(
                gauge.max_residual, op_norm(Mat(ui * a2 * uj.adjoint() - a1)));
        }
    }
    for (size_t i = 0; i < cover.patches.size(); ++i) {
        const auto& patch = cover.patches[i];
        for (size_t a = 0; a < patch.size(); ++a)
            for (int b : space.neighbors[patch[a]]) {
                const int bpos = cover.patch_position(static_cast<int>(i), b);
                if (bpos < 0) continue;
                gauge.edge_delta = std::max(
                    gauge.edge_delta, op_norm(Mat(gauge.u[i][a] - gauge.u[i][bpos])));
            }
    }

    if (gauge.max_residual <= cfg.tol.intertwiner) {
        result.decision = Equivalence::Equivalent;
        result.witness = "tree gauge verified on every overlap";
        result.gauge = std::move(gauge);
    } else {
        result.decision = Equivalence::Undecided;
        result.witness = "tree gauge residual " + std::to_string(gauge.max_residual) +
                         " exceeds tolerance";
    }
    return result;
}

FieldArrow clutch_intertwiner(const SampleSpace& space, const Cover& cover,
                              const FieldProjection& e, const FieldProjection& f,
                              const Trivialization& te, const Trivialization& tf,
                              const GaugeFamily& gauge, const Config& cfg) {
    if (te.fiber_rank != tf.fiber_rank || gauge.fiber_rank != te.fiber_rank)
        fail(ErrorKind::Validation, "fiber ranks disagree");
    if (e.ambient_rank != f.ambient_rank)
        fail(ErrorKind::Dimension, "fields live in different ambient ranks");
    std::vector<Mat> val(space.num_points);
    for (int point = 0; point < space.num_points; ++point) {
        bool assigned = false;
        for (size_t i = 0; i < cover.patches.size(); ++i) {
            const int pos = cover.patch_position(static_cast<int>(i), point);
            if (pos < 0) continue;
            Mat piece = tf.charts[i][pos].adjoint() * gauge.u[i][pos].adjoint() *
                        te.charts[i][pos];
            if (!assigned) {
                val[point] = std::move(piece);
                assigned = true;
            } else if (op_norm(Mat(piece - val[point])) > cfg.tol.intertwiner) {
                fail(ErrorKind::GaugeInvalid,
                     "patchwise pieces disagree on an overlap; gauge is invalid");
            }
        }
        if (!assigned)
            fail(ErrorKind::Validation, "point not covered by any patch");
        const double res = std::max(
            op_norm(Mat(val[point].adjoint() * val[point] - e.at(point))),
            op_norm(Mat(val[point] * val[point].adjoint() - f.at(point))));
        if (res > cfg.tol.intertwiner)
            fail(ErrorKind::GaugeInvalid, "clutched arrow is not a unitary intertwiner");
    }
    return make_field_arrow(space, e, f, std::move(val), cfg);
}

FieldProjection pullback(const SampleSpace& domain, const std::vector<int>& point_map,
                         const SampleSpace& target, const FieldProjection& e,
                         const Config& cfg) {
    if (static_cast<int>(point_map.size()) != domain.num_points)
        fail(ErrorKind::Validation, "point map has wrong size");
    for (int image : point_map)
        if (image < 0 || image >= target.num_points)
            fail(ErrorKind::Validation, "point map image out of range");
    for (const auto& [a, b] : domain.edges) {
        const int ia = point_map[a], ib = point_map[b];
        if (ia != ib && !target.has_edge(ia, ib))
            fail(ErrorKind::Validation,
                 "point map is not a graph morphism: an edge maps to a non-edge");
    }
    std::vector<Mat> proj(domain.num_points);
    for (int p = 0; p < domain.num_points; ++p) proj[p] = e.at(point_map[p]);
    return FieldProjection::create(domain, e.ambient_rank, std::move(proj), cfg);
}

} // namespace fibercat
