#include "fibercat/basespace.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <string>

namespace fibercat {

namespace {

std::vector<int> sorted_intersection(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace

SampleSpace SampleSpace::create(int num_points,
                                std::vector<std::pair<int, int>> edges,
                                std::vector<std::vector<double>> coords) {
    if (num_points < 0) fail(ErrorKind::Validation, "negative point count");
    SampleSpace s;
    s.num_points = num_points;
    s.neighbors.assign(num_points, {});
    for (auto& [a, b] : edges) {
        if (a == b) fail(ErrorKind::Validation, "edge endpoints must be distinct");
        if (a < 0 || b < 0 || a >= num_points || b >= num_points)
            fail(ErrorKind::Validation, "edge endpoint out of range");
        if (a > b) std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const auto& [a, b] : edges) {
        s.neighbors[a].push_back(b);
        s.neighbors[b].push_back(a);
    }
    for (auto& nbrs : s.neighbors) std::sort(nbrs.begin(), nbrs.end());
    s.edges = std::move(edges);
    if (!coords.empty() && static_cast<int>(coords.size()) != num_points)
        fail(ErrorKind::Validation, "coords size does not match point count");
    s.coords = std::move(coords);
    return s;
}

bool SampleSpace::connected() const {
    if (num_points == 0) return true;
    std::vector<char> seen(num_points, 0);
    std::deque<int> q{0};
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int w : neighbors[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                q.push_back(w);
            }
    }
    return reached == num_points;
}

void SampleSpace::require_connected() const {
    if (!connected()) fail(ErrorKind::Validation, "sample space is not connected");
}

bool SampleSpace::has_edge(int a, int b) const {
    if (a < 0 || b < 0 || a >= num_points || b >= num_points) return false;
    const auto& nbrs = neighbors[a];
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

Cover Cover::from_patches(const SampleSpace& space,
                          std::vector<std::vector<int>> patches) {
    Cover c;
    if (patches.empty()) fail(ErrorKind::Validation, "cover needs at least one patch");
    std::vector<char> covered(space.num_points, 0);
    for (auto& patch : patches) {
        std::sort(patch.begin(), patch.end());
        patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
        if (patch.empty()) fail(ErrorKind::Validation, "empty patch in cover");
        for (int p : patch) {
            if (p < 0 || p >= space.num_points)
                fail(ErrorKind::Validation, "patch point out of range");
            covered[p] = 1;
        }
    }
    for (int p = 0; p < space.num_points; ++p)
        if (!covered[p])
            fail(ErrorKind::Validation,
                 "point " + std::to_string(p) + " is not covered by any patch");
    const int np = static_cast<int>(patches.size());
    for (int i = 0; i < np; ++i)
        for (int j = i + 1; j < np; ++j) {
            auto inter = sorted_intersection(patches[i], patches[j]);
            if (!inter.empty()) c.overlaps[{i, j}] = std::move(inter);
        }
    for (int i = 0; i < np; ++i)
        for (int j = i + 1; j < np; ++j) {
            auto ij = c.overlaps.find({i, j});
            if (ij == c.overlaps.end()) continue;
            for (int k = j + 1; k < np; ++k) {
                auto inter = sorted_intersection(ij->second, patches[k]);
                if (!inter.empty()) c.triples[{i, j, k}] = std::move(inter);
            }
        }
    c.patches = std::move(patches);
    return c;
}

const std::vector<int>& Cover::overlap(int i, int j) const {
    if (i > j) std::swap(i, j);
    auto it = overlaps.find({i, j});
    if (it == overlaps.end())
        fail(ErrorKind::Validation,
             "patches " + std::to_string(i) + "," + std::to_string(j) + " do not overlap");
    return it->second;
}

bool Cover::has_overlap(int i, int j) const {
    if (i > j) std::swap(i, j);
    return overlaps.count({i, j}) > 0;
}

int Cover::patch_position(int patch, int point) const {
    const auto& pts = patches.at(patch);
    auto it = std::lower_bound(pts.begin(), pts.end(), point);
    if (it == pts.end() || *it != point) return -1;
    return static_cast<int>(it - pts.begin());
}

int Cover::overlap_position(int i, int j, int point) const {
    const auto& pts = overlap(i, j);
    auto it = std::lower_bound(pts.begin(), pts.end(), point);
    if (it == pts.end() || *it != point) return -1;
    return static_cast<int>(it - pts.begin());
}

Nerve nerve(const Cover& cover) {
    Nerve n;
    n.num_vertices = static_cast<int>(cover.patches.size());
    for (const auto& [key, pts] : cover.overlaps) {
        (void)pts;
        n.edges.push_back(key);
    }
    for (const auto& [key, pts] : cover.triples) {
        (void)pts;
        n.triangles.push_back(key);
    }
    // BFS spanning tree, lowest index first.
    std::vector<std::vector<int>> adj(n.num_vertices);
    for (const auto& [a, b] : n.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& v : adj) std::sort(v.begin(), v.end());
    std::vector<char> seen(n.num_vertices, 0);
    std::set<std::pair<int, int>> in_tree;
    std::deque<int> q{0};
    if (n.num_vertices > 0) seen[0] = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                n.tree_edges.emplace_back(v, w);
                in_tree.insert({std::min(v, w), std::max(v, w)});
                q.push_back(w);
            }
    }
    for (const auto& e : n.edges)
        if (!in_tree.count(e)) n.non_tree_edges.push_back(e);
    return n;
}

std::vector<std::vector<int>> induced_components(const SampleSpace& space,
                                                 const std::vector<int>& points) {
    std::set<int> todo(points.begin(), points.end());
    std::vector<std::vector<int>> comps;
    while (!todo.empty()) {
        int start = *todo.begin();
        todo.erase(todo.begin());
        std::vector<int> comp{start};
        std::deque<int> q{start};
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int w : space.neighbors[v]) {
                auto it = todo.find(w);
                if (it != todo.end()) {
                    todo.erase(it);
                    comp.push_back(w);
                    q.push_back(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

void require_connected_overlaps(const SampleSpace& space, const Cover& cover) {
    for (const auto& [key, pts] : cover.overlaps) {
        if (induced_components(space, pts).size() > 1)
            fail(ErrorKind::RefineCover,
                 "overlap of patches " + std::to_string(key.first) + "," +
                     std::to_string(key.second) +
                     " is disconnected; gauge propagation needs connected overlaps");
    }
}

Mesh build_circle(int n) {
    if (n < 3) fail(ErrorKind::Validation, "circle mesh needs at least 3 points");
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<double>> coords;
    for (int i = 0; i < n; ++i) {
        edges.emplace_back(i, (i + 1) % n);
        double t = 2.0 * M_PI * i / n;
        coords.push_back({std::cos(t), std::sin(t)});
    }
    SampleSpace space = SampleSpace::create(n, std::move(edges), std::move(coords));
    // Two arcs overlapping at both ends.
    const int half = n / 2;
    std::vector<int> arc0, arc1;
    arc0.push_back(n - 1);
    for (int i = 0; i <= std::min(half + 1, n - 1); ++i) arc0.push_back(i);
    for (int i = half; i < n; ++i) arc1.push_back(i);
    arc1.push_back(0);
    Cover cover = Cover::from_patches(space, {arc0, arc1});
    return {std::move(space), std::move(cover)};
}

Mesh build_two_patch_sphere(int n_eq) {
    if (n_eq < 3) fail(ErrorKind::Validation, "sphere mesh needs at least 3 equator points");
    const int n = n_eq;
    // ids: 0 north pole, 1 south pole, then three latitude rings of n points
    // (45N, equator, 45S). Poles come first so each patch's lowest id is its pole.
    const int north = 0, south = 1;
    auto ring_id = [n](int ring, int j) { return 2 + ring * n + j; };
    const int total = 2 + 3 * n;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<double>> coords(total);
    coords[north] = {0.0, 0.0, 1.0};
    coords[south] = {0.0, 0.0, -1.0};
    const double polar[3] = {M_PI / 4.0, M_PI / 2.0, 3.0 * M_PI / 4.0};
    for (int r = 0; r < 3; ++r)
        for (int j = 0; j < n; ++j) {
            double theta = 2.0 * M_PI * j / n;
            coords[ring_id(r, j)] = {std::sin(polar[r]) * std::cos(theta),
                                     std::sin(polar[r]) * std::sin(theta),
                                     std::cos(polar[r])};
            edges.emplace_back(ring_id(r, j), ring_id(r, (j + 1) % n));
            if (r + 1 < 3) edges.emplace_back(ring_id(r, j), ring_id(r + 1, j));
        }
    for (int j = 0; j < n; ++j) {
        edges.emplace_back(north, ring_id(0, j));
        edges.emplace_back(south, ring_id(2, j));
    }
    SampleSpace space = SampleSpace::create(total, std::move(edges), std::move(coords));
    std::vector<int> north_patch{north}, south_patch{south};
    for (int j = 0; j < n; ++j) {
        north_patch.push_back(ring_id(0, j));
        north_patch.push_back(ring_id(1, j));
        south_patch.push_back(ring_id(1, j));
        south_patch.push_back(ring_id(2, j));
    }
    Cover cover = Cover::from_patches(space, {north_patch, south_patch});
    return {std::move(space), std::move(cover)};
}

Mesh build_torus_grid(int n, int m) {
    if (n < 4 || m < 4) fail(ErrorKind::Validation, "torus mesh needs at least 4x4 points");
    auto id = [m](int i, int j) { return i * m + j; };
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<double>> coords(static_cast<size_t>(n) * m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            edges.emplace_back(id(i, j), id((i + 1) % n, j));
            edges.emplace_back(id(i, j), id(i, (j + 1) % m));
            coords[id(i, j)] = {2.0 * M_PI * i / n, 2.0 * M_PI * j / m};
        }
    SampleSpace space = SampleSpace::create(n * m, std::move(edges), std::move(coords));
    // Two overlapping index bands per direction, crossed into four patches.
    auto band = [](int size, bool low) {
        std::vector<int> out;
        int half = size / 2;
        if (low) {
            out.push_back(size - 1);
            for (int i = 0; i <= half + 1 && i < size - 1; ++i) out.push_back(i);
        } else {
            for (int i = half; i < size; ++i) out.push_back(i);
            out.push_back(0);
        }
        return out;
    };
    std::vector<std::vector<int>> patches;
    for (bool ilow : {true, false})
        for (bool jlow : {true, false}) {
            std::vector<int> patch;
            for (int i : band(n, ilow))
                for (int j : band(m, jlow)) patch.push_back(id(i, j));
            patches.push_back(std::move(patch));
        }
    Cover cover = Cover::from_patches(space, std::move(patches));
    return {std::move(space), std::move(cover)};
}

} // namespace fibercat
