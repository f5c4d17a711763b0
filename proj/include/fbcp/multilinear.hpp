#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fbcp/tensor.hpp"

namespace fbcp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// I_n x R factor matrix; row i is the latent vector of slice i.
using FactorMatrix = Eigen::MatrixXd;

/// Mode-n matricization (Kolda ordering): entry (i_1..i_N) lands at row i_n,
/// column sum_{k != n} i_k J_k with J_k the product of the lower non-n extents.
Matrix unfold(const DenseTensor& t, std::size_t mode);

/// Inverse of unfold.
DenseTensor fold(const Matrix& m, std::size_t mode, const Shape& shape);

/// Column-wise Kronecker product mats[0] (.) mats[1] (.) ... ; the row index of
/// the last matrix varies fastest.
Matrix khatri_rao(std::span<const Matrix> mats);

/// mats[N-1] (.) ... (.) mats[0]: the first matrix's row index varies fastest,
/// which matches the column-major vectorization of the tensor.
Matrix khatri_rao_reverse(std::span<const Matrix> mats);

/// khatri_rao_reverse over every matrix except `skip`.
Matrix khatri_rao_except(std::span<const Matrix> mats, std::size_t skip);

Matrix hadamard(std::span<const Matrix> mats);

/// Sum of R rank-one tensors built from the columns of the factors.
DenseTensor kruskal(std::span<const FactorMatrix> factors);

/// sum_r prod_n v^(n)_r
double generalized_inner_product(std::span<const Vector> vecs);

/// Squared Frobenius norm restricted to observed entries.
double masked_sq_frobenius(const DenseTensor& t, const ObservationMask& mask);

}  // namespace fbcp
