#pragma once

#include <vector>

#include "kfp/domain.hpp"

namespace kfp {

// Precomputed Hermite machinery for one DomainSpec.
//
// H_k are probabilists' Hermite polynomials normalized against the standard
// Gaussian, so <H_a, H_b>_mu = delta_ab and
//   v H_k  = sqrt(k+1) H_{k+1} + sqrt(k) H_{k-1}
//   H_k'   = sqrt(k) H_{k-1}
//   (d^2/dv^2 - v d/dv) H_k = -k H_k.
//
// The Gauss-Hermite table integrates mu-weighted polynomials of degree
// <= 2*nq - 1 exactly; it exists for quadrature-based cross checks, the
// production operators never leave coefficient space.
struct BasisTables {
    DomainSpec dom;
    std::vector<double> sqrt_int;   // sqrt_int[k] = sqrt(k), k = 0..Kv+1
    std::vector<double> gh_nodes;   // nq Gauss nodes for weight mu(v)
    std::vector<double> gh_weights; // matching weights, sum = 1
    std::vector<double> hermite_at_nodes; // [q * (Kv+1) + k] = H_k(node_q)

    int nq() const { return static_cast<int>(gh_nodes.size()); }
    double hval(int q, int k) const { return hermite_at_nodes[static_cast<std::size_t>(q) * (dom.Kv + 1) + k]; }
};

// nq = 0 picks the default Kv + 4 nodes (enough for quartic products).
BasisTables build_basis(const DomainSpec& dom, int nq = 0);

// H_0..H_kmax at one point, by the normalized recurrence.
std::vector<double> hermite_values(int kmax, double v);

} // namespace kfp
