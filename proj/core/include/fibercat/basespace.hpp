// basespace.hpp — discretized compact base spaces: sample points with an
// adjacency graph as the continuity surrogate, finite covers with recomputed
// pairwise and triple overlaps, and the nerve used by all Cech machinery.

#pragma once

#include <array>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "fibercat/error.hpp"

namespace fibercat {

struct SampleSpace {
    int num_points = 0;
    std::vector<std::pair<int, int>> edges;        // unordered, stored a < b
    std::vector<std::vector<double>> coords;       // optional embedding, may be empty
    std::vector<std::vector<int>> neighbors;       // built on create()

    static SampleSpace create(int num_points,
                              std::vector<std::pair<int, int>> edges,
                              std::vector<std::vector<double>> coords = {});

    bool connected() const;
    void require_connected() const;
    bool has_edge(int a, int b) const;
};

struct Cover {
    std::vector<std::vector<int>> patches;                      // sorted point ids
    std::map<std::pair<int, int>, std::vector<int>> overlaps;   // i<j, nonempty only
    std::map<std::array<int, 3>, std::vector<int>> triples;     // i<j<k, nonempty only

    // Recomputes overlaps/triples from the patches and checks that the
    // patches cover every point.
    static Cover from_patches(const SampleSpace& space,
                              std::vector<std::vector<int>> patches);

    const std::vector<int>& overlap(int i, int j) const; // i != j, either order
    bool has_overlap(int i, int j) const;
    int patch_position(int patch, int point) const;      // index into patches[patch], -1 if absent
    int overlap_position(int i, int j, int point) const; // index into overlap(i,j), -1 if absent
};

// Vertices are patches, edges are nonempty pairwise overlaps, triangles are
// nonempty triple overlaps. The spanning tree is breadth-first from vertex 0
// with neighbors visited lowest-index-first, so it is deterministic.
struct Nerve {
    int num_vertices = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::pair<int, int>> tree_edges;     // (parent, child), BFS order
    std::vector<std::pair<int, int>> non_tree_edges; // remaining edges, a < b
};

Nerve nerve(const Cover& cover);

struct Mesh {
    SampleSpace space;
    Cover cover;
};

// Standard fixtures. circle: two overlapping arcs. two_patch_sphere: two
// polar patches whose overlap is the equatorial ring of n_eq points.
// torus_grid: four rectangular patches wrapping both directions.
Mesh build_circle(int n);
Mesh build_two_patch_sphere(int n_eq);
Mesh build_torus_grid(int n, int m);

// Connected components of the subgraph induced on `points`, each sorted.
std::vector<std::vector<int>> induced_components(const SampleSpace& space,
                                                 const std::vector<int>& points);

// The gauge-propagation pipeline needs every overlap connected; rejects
// covers with a disconnected overlap.
void require_connected_overlaps(const SampleSpace& space, const Cover& cover);

} // namespace fibercat
