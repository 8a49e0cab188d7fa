// matcat.hpp — the strict tensor category of complex matrices: objects are
// ranks, arrows are rectangular matrices, tensor is the lexicographic
// Kronecker product. Every other module reuses the conventions fixed here.

#pragma once

#include <complex>
#include <Eigen/Dense>

#include "fibercat/config.hpp"
#include "fibercat/error.hpp"

namespace fibercat {

using Scalar = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;

// An arrow n -> m is an m x n matrix; rank-0 objects give empty matrices.
struct Arrow {
    int src = 0;
    int dst = 0;
    Mat mat;

    static Arrow make(int src, int dst, Mat m);
    static Arrow identity(int n);
};

Arrow compose(const Arrow& g, const Arrow& f); // g after f; requires f.dst == g.src
Arrow tensor(const Arrow& f, const Arrow& g);  // Kronecker, lexicographic index order
Arrow adjoint(const Arrow& f);

// Largest singular value (the C*-norm on matrix arrow spaces).
double op_norm(const Mat& a);
inline double op_norm(const Arrow& a) { return op_norm(a.mat); }

// Lexicographic Kronecker product: entry ((i,k),(j,l)) = a(i,j) * b(k,l).
Mat kron(const Mat& a, const Mat& b);
Mat kron_pow(const Mat& a, int m); // m = 0 gives the 1x1 identity

// Isometries v: n -> n+m, w: m -> n+m with v*v = 1, w*w = 1,
// v v* + w w* = 1, v*w = 0.
std::pair<Arrow, Arrow> direct_sum_isometries(int n, int m);

// For a projection p in M_n, an isometry w: rank(p) -> n with w w* = p and
// w* w = 1; columns are an orthonormal basis of range(p) ordered by
// descending eigenvalue. rank(p) = 0 gives the empty arrow.
Arrow range_isometry(const Arrow& p, const Config& cfg = {});
Mat range_isometry(const Mat& p, double projection_tol);

// Permutation unitary theta: nm -> mn with theta (x tensor y) theta* =
// y tensor x for x in M_n, y in M_m.
Arrow flip_symmetry(int n, int m);

bool is_projection(const Mat& p, double tol);
int projection_rank(const Mat& p); // eigenvalue count above 1/2

} // namespace fibercat
