#pragma once

#include <cvf/metrics.hpp>

#include <random>

namespace cvf {

// Uniform points in the box shrunk by a safety margin so finite-difference
// stencils never step outside.
std::vector<Vector> sample_points(const DomainBox& box, int count, std::mt19937_64& rng,
                                  double margin);

// Unit-sphere directions rejected against the singular-domain rule of the phi
// family, with |beta|/alpha kept above s_margin so lifts stay conditioned.
// DomainViolation after max_retries consecutive rejections.
std::vector<Vector> sample_rays(const MetricField& a, const OneFormField& b, const PhiFamily& phi,
                                const Vector& x, int count, std::mt19937_64& rng,
                                double s_margin = 0.05, int max_retries = 100);

}  // namespace cvf
