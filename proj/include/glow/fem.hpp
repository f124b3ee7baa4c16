#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "glow/grid.hpp"

namespace glow {

// Node box the Galerkin system is assembled on (inclusive index bounds).
// Defaults to the Omega box of the grid; the permittivity recovery also runs
// on a one-layer enlargement so the recovered values are well defined up to
// and including the Omega faces.
struct FemBox {
    int i0 = 0, i1 = 0, j0 = 0, j1 = 0, k0 = 0, k1 = 0;
};

FemBox omega_box(const Grid3& g);
FemBox enlarged_box(const Grid3& g, int layers = 1);

// Continuous trilinear Galerkin system on a structured hexahedral node box.
// Cells must be cubic (hx = hy = hz). Dirichlet solves take and return
// full-grid fields: values outside the box pass through untouched, box
// boundary values are read from the input, interior values are replaced.
class FemSystem {
  public:
    FemSystem(const Grid3& g, const FemBox& box);
    FemSystem(const Grid3& g) : FemSystem(g, omega_box(g)) {}

    const FemBox& box() const { return box_; }
    std::size_t node_count() const { return nn_; }
    std::size_t interior_count() const { return ni_; }
    std::size_t element_count() const { return enod_.size(); }

    // Discrete harmonic extension of the box-boundary values of bval.
    ScalarField solve_dirichlet_laplace(const ScalarField& bval) const;

    // Weighted convection-diffusion solve for the per-interval correction:
    //   Laplace(q) + A1 * gvec . grad(q) = -A2 |gvec|^2,  q = psi_n on the box boundary,
    // where gvec = (gx,gy,gz) is evaluated at quadrature points from its nodal
    // values. rhs_override, when given, replaces -A2 |gvec|^2 as the nodal
    // right-hand side f in Laplace(q) + A1 gvec . grad(q) = f (test hook for
    // manufactured solutions).
    ScalarField solve_q_equation(const ScalarField& gx, const ScalarField& gy,
                                 const ScalarField& gz, double A1, double A2,
                                 const ScalarField& psi_n,
                                 const ScalarField* rhs_override = nullptr) const;

    // Explicit recovery of the permittivity from w = exp(s^2 v): lumped-mass
    // inversion of the stiffness action plus the boundary flux load with
    // second-order one-sided normal derivatives of v at the box faces.
    // Values are clipped to [1, 15] on box nodes; 1 elsewhere.
    ScalarField recover_epsilon(const ScalarField& w, double s) const;

  private:
    const Grid3 g_;
    FemBox box_;
    int nxO_ = 0, nyO_ = 0, nzO_ = 0;
    double h_ = 0;
    std::size_t nn_ = 0, ni_ = 0, nb_ = 0;

    double Nval_[8][8];      // shape values at the 8 Gauss points
    double Gval_[8][8][3];   // shape gradients (already divided by h)
    double Ke_[8][8];        // element stiffness
    double wg_ = 0;          // Gauss weight (volume)
    double N2_[4][4];        // face shape values at the 4 Gauss points
    double w2_ = 0;          // Gauss weight (face)

    std::vector<std::array<int, 3>> nodes_;         // box node -> (i,j,k)
    std::vector<std::array<int32_t, 8>> enod_;      // element -> box node ids
    std::vector<uint8_t> isb_;                      // box node on box boundary
    std::vector<int32_t> intid_;                    // box node -> interior dof or -1
    std::vector<int32_t> bndid_;                    // box node -> boundary dof or -1

    Eigen::SparseMatrix<double, Eigen::RowMajor> Gii_, Gib_;

    std::size_t box_node(int i, int j, int k) const {
        return std::size_t(i - box_.i0) +
               std::size_t(nxO_) * (std::size_t(j - box_.j0) + std::size_t(nyO_) * (k - box_.k0));
    }
    std::vector<double> gather(const ScalarField& f) const;
    void scatter(const std::vector<double>& vals, ScalarField& out) const;
    std::vector<double> flux_load(const ScalarField& v, const ScalarField& w, double s) const;
};

}  // namespace glow
