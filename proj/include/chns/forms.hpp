#pragma once

#include <Eigen/Sparse>
#include <filesystem>
#include <memory>

#include "chns/dgspace.hpp"

namespace chns {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Sign of the symmetrizing term in the interior penalty forms.
enum class PenaltyVariant { Symmetric, NonSymmetric };

/// Matrix convention throughout: entry (i, j) = form(trial_j, test_i), i.e.
/// rows index the test function.

/// Scalar and vector L2 mass matrices.
SparseMatrix assemble_mass(const ScalarSpace& space);
SparseMatrix assemble_mass(const VectorSpace& space);

/// a_D(c, chi): broken gradients, consistency and symmetry terms and a
/// sigma / h_e jump penalty, all over interior faces only.
SparseMatrix assemble_a_D(const ScalarSpace& space, double sigma,
                          PenaltyVariant variant = PenaltyVariant::Symmetric);

/// a_eps(v, theta): vector analogue of a_D with face sums over interior and
/// boundary faces; the boundary penalty weakly enforces v = 0.
SparseMatrix assemble_a_eps(const VectorSpace& space, double sigma,
                            PenaltyVariant variant = PenaltyVariant::Symmetric);

/// Gram matrices of the DG (semi-)norms: broken gradients plus sigma / h_e
/// weighted jumps; the vector version also includes boundary faces.
SparseMatrix assemble_dg_gram(const ScalarSpace& space, double sigma);
SparseMatrix assemble_dg_gram(const VectorSpace& space, double sigma);

/// b_P(p, theta); rows: pressure space, columns: velocity space.
SparseMatrix assemble_b_P(const ScalarSpace& pressure, const VectorSpace& velocity);

/// a_A(c, v, chi) for frozen c; rows: chi in c's space, columns: v.
SparseMatrix assemble_a_A(const ScalarField& c, const VectorSpace& velocity);

/// b_I(c, mu, theta) for frozen c; rows: theta, columns: mu in `mu_space`.
SparseMatrix assemble_b_I(const ScalarField& c, const ScalarSpace& mu_space,
                          const VectorSpace& velocity);

/// a_C(w, v, z, theta) for frozen (w, v); rows: theta, columns: z.
/// The inflow part of each element boundary is {w} . n_E < 0, decided
/// pointwise; faces are split at the zeros of {w} . n_e so the upwind term is
/// integrated exactly.
SparseMatrix assemble_a_C(const VectorField& w, const VectorField& v);

/// Constant-in-time operators of one discretization.
struct AssembledForms {
  double sigma = 0.0;
  SparseMatrix mass_c;
  SparseMatrix mass_v;
  SparseMatrix a_D;
  SparseMatrix a_eps;
  SparseMatrix b_P;

  static AssembledForms build(const ScalarSpace& scalar, const VectorSpace& velocity,
                              const ScalarSpace& pressure, double sigma);
};

/// Form evaluators (bilinear/trilinear values through the assembled data).
double eval_a_D(const ScalarSpace& space, double sigma, const ScalarField& c, const ScalarField& chi);
double eval_a_eps(double sigma, const VectorField& v, const VectorField& theta);
double eval_b_P(const ScalarField& p, const VectorField& theta);
double eval_a_A(const ScalarField& c, const VectorField& v, const ScalarField& chi);
double eval_b_I(const ScalarField& c, const ScalarField& mu, const VectorField& theta);
double eval_a_C(const VectorField& w, const VectorField& v, const VectorField& z,
                const VectorField& theta);

/// Coefficient vector of the constant function 1 in a scalar space.
Eigen::VectorXd constant_vector(const ScalarSpace& space);
/// Vector of integrals (phi_i, 1).
Eigen::VectorXd mean_functional(const ScalarSpace& space);

/// Writes a MatrixMarket coordinate file.
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m);

}  // namespace chns
