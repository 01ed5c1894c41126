#include "kfp/basis.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace kfp {

std::vector<double> hermite_values(int kmax, double v) {
    std::vector<double> h(kmax + 1);
    h[0] = 1.0;
    if (kmax >= 1) h[1] = v;
    for (int k = 1; k < kmax; ++k)
        h[k + 1] = (v * h[k] - std::sqrt(static_cast<double>(k)) * h[k - 1]) /
                   std::sqrt(static_cast<double>(k + 1));
    return h;
}

BasisTables build_basis(const DomainSpec& dom, int nq) {
    dom.validate();
    if (nq <= 0) nq = dom.Kv + 4;

    BasisTables bt;
    bt.dom = dom;
    bt.sqrt_int.resize(dom.Kv + 2);
    for (int k = 0; k <= dom.Kv + 1; ++k)
        bt.sqrt_int[k] = std::sqrt(static_cast<double>(k));

    // Golub-Welsch on the monic three-term recurrence: the Jacobi matrix for
    // probabilists' Hermite has zero diagonal and off-diagonal sqrt(k).
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nq, nq);
    for (int k = 1; k < nq; ++k) {
        double b = std::sqrt(static_cast<double>(k));
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    bt.gh_nodes.resize(nq);
    bt.gh_weights.resize(nq);
    for (int q = 0; q < nq; ++q) {
        bt.gh_nodes[q] = es.eigenvalues()(q);
        double v0 = es.eigenvectors()(0, q);
        bt.gh_weights[q] = v0 * v0; // total mass of mu is 1
    }

    bt.hermite_at_nodes.resize(static_cast<std::size_t>(nq) * (dom.Kv + 1));
    for (int q = 0; q < nq; ++q) {
        auto h = hermite_values(dom.Kv, bt.gh_nodes[q]);
        for (int k = 0; k <= dom.Kv; ++k)
            bt.hermite_at_nodes[static_cast<std::size_t>(q) * (dom.Kv + 1) + k] = h[k];
    }
    return bt;
}

} // namespace kfp
