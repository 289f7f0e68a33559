#include "bhpc/driven_chain.hpp"

#include <stdexcept>

namespace bhpc {

namespace {

void check_spec(const DrivenChainSpec& spec) {
    if (spec.l < 1) throw std::invalid_argument("driven chain: length must be >= 1");
    if (!(spec.gamma_l > 0.0) || !(spec.gamma_r > 0.0))
        throw std::invalid_argument("driven chain: boundary rates must be positive");
    if (spec.n_l < 0.0 || spec.n_r < 0.0)
        throw std::invalid_argument("driven chain: reservoir densities must be >= 0");
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

double analytic_current(const DrivenChainSpec& spec) {
    check_spec(spec);
    if (spec.gamma_l != spec.gamma_r)
        throw std::invalid_argument("analytic_current: formula assumes equal boundary rates");
    const double j2 = spec.j_hop * spec.j_hop;
    const double g = spec.gamma_l;
    return j2 * g / (j2 + g * g) * (spec.n_l - spec.n_r) / 2.0;
}

SteadyCovariance steady_covariance(const DrivenChainSpec& spec) {
    check_spec(spec);
    const int l = spec.l;
    using Mat = Eigen::MatrixXcd;
    Mat h = Mat::Zero(l, l);
    for (int i = 0; i + 1 < l; ++i) {
        h(i, i + 1) = -0.5 * spec.j_hop;
        h(i + 1, i) = -0.5 * spec.j_hop;
    }
    Mat g = Mat::Zero(l, l);
    Mat p = Mat::Zero(l, l);
    g(0, 0) += spec.gamma_l;
    p(0, 0) += spec.gamma_l * spec.n_l;
    g(l - 1, l - 1) += spec.gamma_r;
    p(l - 1, l - 1) += spec.gamma_r * spec.n_r;

    // Column-major vec identities: vec(h sigma) = (I (x) h) vec(sigma),
    // vec(sigma h) = (h^T (x) I) vec(sigma).
    Mat eye = Mat::Identity(l, l);
    const std::complex<double> im(0.0, 1.0);
    Mat a = im * (kron(eye, h) - kron(h.transpose(), eye)) -
            0.5 * (kron(eye, g) + kron(g.transpose(), eye));
    Eigen::VectorXcd rhs(l * l);
    for (int col = 0; col < l; ++col)
        for (int row = 0; row < l; ++row) rhs[col * l + row] = -p(row, col);
    Eigen::VectorXcd x = a.fullPivLu().solve(rhs);

    SteadyCovariance out;
    out.sigma.resize(l, l);
    for (int col = 0; col < l; ++col)
        for (int row = 0; row < l; ++row) out.sigma(row, col) = x[col * l + row];
    out.current = spec.gamma_l * (spec.n_l - out.sigma(0, 0).real());
    for (int i = 0; i + 1 < l; ++i)
        out.bond_currents.push_back(spec.j_hop * out.sigma(i, i + 1).imag());
    return out;
}

}  // namespace bhpc
