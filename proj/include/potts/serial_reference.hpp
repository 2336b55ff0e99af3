#pragma once

#include "potts/coupling.hpp"
#include "potts/model.hpp"
#include "potts/pseudolikelihood.hpp"

// Straightforward single-threaded versions of the hot kernels. They follow
// the textbook formulas term by term and are kept as the reference the
// parallel kernels are tested and benchmarked against.
namespace potts::serial {

/// Scatter form: every site j adds a_ij to column x_j of each neighbour row i.
LocalFieldTable local_fields(const CouplingMatrix& a, const Configuration& x, int q);

/// Value, gradient and Hessian from the pairwise-over-colors expressions,
/// summed over sites in order.
PseudoLikEval evaluate(const CouplingMatrix& a, const Configuration& x, const PottsParams& params);

}  // namespace potts::serial
