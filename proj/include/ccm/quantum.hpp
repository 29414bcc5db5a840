#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace ccm {

using Complex = std::complex<double>;

// Dense square complex matrix, row-major.
struct CMatrix {
    int n = 0;
    std::vector<Complex> a;

    CMatrix() = default;
    explicit CMatrix(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim) {}
    static CMatrix identity(int dim);
    Complex& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
    const Complex& operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }
};

// A numeric entry plus the literal it was written as, so files round-trip exactly.
struct Scalar {
    Complex value;
    std::string literal;  // JSON text of the original literal
};

struct QuantumState {
    std::vector<int> dims;
    CMatrix rho;

    static QuantumState pure(std::vector<int> dims, const std::vector<Complex>& amplitudes);
    static QuantumState mixed(std::vector<int> dims, CMatrix rho);
    int total_dim() const;
};

constexpr double kQuantumTol = 1e-9;
constexpr int kMaxQuantumDim = 16;

void validate_state(const QuantumState& s);                   // unit trace, Hermitian, PSD
void validate_effect(const CMatrix& e);                       // Hermitian, spectrum in [0,1]
void validate_povm(const std::vector<CMatrix>& effects);      // complete: sums to identity

// tr((E_1 (x) ... (x) identity on untouched factors) rho), clamped into [0,1].
double born_probability(const QuantumState& state, const std::vector<std::pair<std::vector<int>, CMatrix>>& effects);

}  // namespace ccm
