#pragma once

#include "tweezersense/fieldgrid.hpp"

// Independent reference evaluations used by the test suites and the
// `validate` command. Nothing in the simulation path depends on these.
namespace tweezersense::oracle {

/// Trapezoid-rule integral of fa^* . fb over the lattice spanned by the sample
/// centres, after bilinear resampling onto a lattice `refinement` times finer.
/// refinement must be 1, 2 or 4. Throws DimensionError on grid mismatch and
/// DomainError on plane mismatch or an unsupported refinement.
Complex quadrature_overlap(const TransverseField& fa, const TransverseField& fb, int refinement);

/// exp(-d^2 / (2 w^2)): overlap of two unit Gaussians of radius w offset by d.
double analytic_displaced_gaussian_overlap(double d, double w);

/// d/dd <sign(x) u00, u00(. - d x)> at d = 0, for a unit Gaussian of radius w.
///
/// With u00^2 = 2/(pi w^2) exp(-2 rho^2 / w^2) and d/dd u00(x - d) = (2x/w^2) u00:
///   slope = (2/w^2)(2/(pi w^2)) * int |x| e^{-2x^2/w^2} dx * int e^{-2y^2/w^2} dy
///         = (4/(pi w^4)) (w^2/2) (w sqrt(pi/2)) = sqrt(2/pi) / w.
double analytic_flipped_overlap_slope(double w);

}  // namespace tweezersense::oracle
