#include "ccm/quantum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ccm/error.hpp"

namespace ccm {

namespace {

Eigen::MatrixXcd to_eigen(const CMatrix& m) {
    Eigen::MatrixXcd e(m.n, m.n);
    for (int r = 0; r < m.n; ++r)
        for (int c = 0; c < m.n; ++c) e(r, c) = m(r, c);
    return e;
}

void check_hermitian_spectrum(const CMatrix& m, double lo, double hi, const char* what) {
    Eigen::MatrixXcd e = to_eigen(m);
    if ((e - e.adjoint()).cwiseAbs().maxCoeff() > kQuantumTol)
        throw Error(ErrorKind::InvalidModel, std::string(what) + " is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(e, Eigen::EigenvaluesOnly);
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double ev = es.eigenvalues()(i);
        if (ev < lo - kQuantumTol || ev > hi + kQuantumTol)
            throw Error(ErrorKind::InvalidModel, std::string(what) + " has eigenvalue out of range");
    }
}

}  // namespace

CMatrix CMatrix::identity(int dim) {
    CMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

int QuantumState::total_dim() const {
    int d = 1;
    for (int x : dims) d *= x;
    return d;
}

QuantumState QuantumState::pure(std::vector<int> dims, const std::vector<Complex>& amplitudes) {
    QuantumState s;
    s.dims = std::move(dims);
    int d = s.total_dim();
    if (static_cast<int>(amplitudes.size()) != d)
        throw Error(ErrorKind::DimensionMismatch, "amplitude vector length does not match dims");
    s.rho = CMatrix(d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) s.rho(r, c) = amplitudes[r] * std::conj(amplitudes[c]);
    return s;
}

QuantumState QuantumState::mixed(std::vector<int> dims, CMatrix rho) {
    QuantumState s;
    s.dims = std::move(dims);
    if (rho.n != s.total_dim()) throw Error(ErrorKind::DimensionMismatch, "density matrix size does not match dims");
    s.rho = std::move(rho);
    return s;
}

void validate_state(const QuantumState& s) {
    if (s.dims.empty()) throw Error(ErrorKind::InvalidModel, "quantum state without subsystems");
    for (int d : s.dims)
        if (d < 1) throw Error(ErrorKind::InvalidModel, "subsystem dimension < 1");
    if (s.total_dim() > kMaxQuantumDim) throw Error(ErrorKind::InvalidModel, "quantum dimension above 16");
    if (s.rho.n != s.total_dim()) throw Error(ErrorKind::DimensionMismatch, "state size");
    Complex tr = 0;
    for (int i = 0; i < s.rho.n; ++i) tr += s.rho(i, i);
    if (std::abs(tr - Complex(1.0)) > kQuantumTol) throw Error(ErrorKind::InvalidModel, "state trace is not 1");
    check_hermitian_spectrum(s.rho, 0.0, 1.0, "density matrix");
}

void validate_effect(const CMatrix& e) { check_hermitian_spectrum(e, 0.0, 1.0, "effect"); }

void validate_povm(const std::vector<CMatrix>& effects) {
    if (effects.empty()) throw Error(ErrorKind::InvalidModel, "empty POVM");
    int n = effects.front().n;
    CMatrix sum(n);
    for (auto& e : effects) {
        if (e.n != n) throw Error(ErrorKind::DimensionMismatch, "POVM elements differ in size");
        validate_effect(e);
        for (std::size_t i = 0; i < sum.a.size(); ++i) sum.a[i] += e.a[i];
    }
    CMatrix id = CMatrix::identity(n);
    for (std::size_t i = 0; i < sum.a.size(); ++i)
        if (std::abs(sum.a[i] - id.a[i]) > kQuantumTol) throw Error(ErrorKind::InvalidModel, "POVM does not sum to identity");
}

double born_probability(const QuantumState& state, const std::vector<std::pair<std::vector<int>, CMatrix>>& effects) {
    const int nf = static_cast<int>(state.dims.size());
    std::vector<int> owner(nf, -1);
    for (std::size_t k = 0; k < effects.size(); ++k) {
        int need = 1;
        for (int f : effects[k].first) {
            if (f < 0 || f >= nf || owner[f] != -1)
                throw Error(ErrorKind::DimensionMismatch, "effect factors must be distinct valid subsystem indices");
            owner[f] = static_cast<int>(k);
            need *= state.dims[f];
        }
        if (effects[k].second.n != need) throw Error(ErrorKind::DimensionMismatch, "effect size does not match its factors");
    }
    const int d = state.total_dim();
    auto digits = [&](int idx) {
        std::vector<int> dg(nf);
        for (int f = nf - 1; f >= 0; --f) {
            dg[f] = idx % state.dims[f];
            idx /= state.dims[f];
        }
        return dg;
    };
    std::vector<std::vector<int>> dig(d);
    for (int i = 0; i < d; ++i) dig[i] = digits(i);

    Complex total = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            Complex op = 1.0;
            for (int f = 0; f < nf && op != Complex(0.0); ++f)
                if (owner[f] == -1 && dig[i][f] != dig[j][f]) op = 0.0;
            if (op == Complex(0.0)) continue;
            for (std::size_t k = 0; k < effects.size(); ++k) {
                int r = 0, c = 0;
                for (int f : effects[k].first) {
                    r = r * state.dims[f] + dig[i][f];
                    c = c * state.dims[f] + dig[j][f];
                }
                op *= effects[k].second(r, c);
            }
            total += op * state.rho(j, i);
        }
    }
    double p = total.real();
    if (p < 0.0 && p > -1e-12) p = 0.0;
    if (p > 1.0 && p < 1.0 + 1e-12) p = 1.0;
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace ccm
