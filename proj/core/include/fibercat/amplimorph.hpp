// amplimorph.hpp — finite-dimensional block C*-algebras, amplimorphisms
// A -> M_n tensor A, right-module and bimodule intertwiner spaces, the
// amplimorphism tensor calculus, direct sums, the comparison with central
// projections, and the inner-endomorphism test.

#pragma once

#include <memory>

#include "fibercat/matcat.hpp"

namespace fibercat {

// A = direct sum of full matrix blocks, represented block-diagonally inside
// M_D with D the sum of the block sizes. The distinguished basis consists
// of the blocks' matrix units in block order, row-major within each block.
class FiniteCStar {
public:
    static std::shared_ptr<const FiniteCStar> create(std::vector<int> blocks);

    const std::vector<int>& blocks() const { return blocks_; }
    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    int total_dim() const { return total_dim_; }   // D
    int basis_size() const { return basis_size_; } // dim A = sum d_b^2
    int block_offset(int b) const { return offsets_.at(b); }

    Mat basis_element(int index) const;
    Mat unit() const;
    Mat central_projection(int b) const;

    // Coefficients in the matrix-unit basis; fails unless a respects the
    // block structure within `tol`.
    std::vector<Scalar> coefficients(const Mat& a, double tol) const;

private:
    std::vector<int> blocks_;
    std::vector<int> offsets_;
    int total_dim_ = 0;
    int basis_size_ = 0;
};

// A linear map A -> M_n tensor A specified by its values on the matrix-unit
// basis. M_n tensor A sits inside M_{nD} with the matrix leg first, i.e. as
// n x n blocks of elements of A.
struct Amplimorphism {
    std::shared_ptr<const FiniteCStar> algebra;
    int target_rank = 0;
    std::vector<Mat> images; // one (nD)x(nD) matrix per basis element

    Mat apply(const Mat& a, double tol = 1e-10) const;
    Mat unit_image() const; // phi(1), a projection for a valid amplimorphism
};

Amplimorphism identity_amp(std::shared_ptr<const FiniteCStar> algebra);

// phi_e(a) = e (1_n tensor a) for a projection e in M_n tensor Z.
Amplimorphism amp_from_central_projection(std::shared_ptr<const FiniteCStar> algebra,
                                          int n, const Mat& e, const Config& cfg = {});

// Multiplicativity on basis pairs, *-preservation, phi(1) projection, and
// membership of every image in M_n tensor A.
double amplimorphism_residual(const Amplimorphism& phi);
void validate_amplimorphism(const Amplimorphism& phi, const Config& cfg = {});

// Orthonormal bases (Hilbert-Schmidt) of the arrow spaces
//   Mod:   {x : x phi(1) = psi(1) x = x}
//   Bimod: additionally psi(a) x = x phi(a) for all a.
std::vector<Mat> arrow_space_mod(const Amplimorphism& phi, const Amplimorphism& psi,
                                 const Config& cfg = {});
std::vector<Mat> arrow_space_bimod(const Amplimorphism& phi, const Amplimorphism& psi,
                                   const Config& cfg = {});

// The composite (phi psi)(a), an amplimorphism of rank n_psi * n_phi.
Amplimorphism amp_tensor(const Amplimorphism& phi, const Amplimorphism& psi,
                         const Config& cfg = {});

// Tensor product of bimodule arrows x in (phi, phi'), y in (psi, psi');
// both orderings of the defining formula are evaluated and must agree.
Mat arrow_tensor(const Mat& x, const Amplimorphism& phi, const Amplimorphism& phi2,
                 const Mat& y, const Amplimorphism& psi, const Amplimorphism& psi2,
                 const Config& cfg = {});

struct AmpDirectSum {
    Amplimorphism delta;
    Mat embed_left;  // in Mod(phi, delta)
    Mat embed_right; // in Mod(psi, delta)
};

AmpDirectSum amp_direct_sum(const Amplimorphism& phi, const Amplimorphism& psi,
                            const Config& cfg = {});

// For central projections the bimodule arrow spaces of phi_e coincide with
// the intertwiner spaces of e over Z, and the Mod spaces are their
// amplifications by the blocks.
struct CommutativeCompareEntry {
    int level = 0;
    int grade = 0;
    int dim_central = 0; // sum_b rank_b^{2r+k}
    int dim_bimod = 0;
    int dim_mod = 0;
    int dim_mod_expected = 0; // sum_b rank_b^{2r+k} d_b^2
    bool pass = false;
};

std::vector<CommutativeCompareEntry> commutative_compare(
    std::shared_ptr<const FiniteCStar> algebra, int n, const Mat& e, int max_level,
    int max_grade, const Config& cfg = {});

struct InnerTestReport {
    bool inner = false;
    int x_dim = 0;
    int xphi_dim = 0;
    Mat support;                  // support projection of X^phi
    std::vector<int> block_ranks; // matrix rank of the support per block
    bool generated = false;       // dim X = sum_b block_rank_b * d_b
};

InnerTestReport inner_test(const Amplimorphism& phi, const Config& cfg = {});

} // namespace fibercat
