#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "splitlab/types.hpp"

namespace splitlab {

// Product of sigma^x (xmask) and sigma^z (zmask) factors with a real
// coefficient, sigma^z acting first:  P = coeff * X_{xmask} Z_{zmask}.
// The models here never need sigma^y, so the algebra stays real.
struct PauliString {
    EdgeMask xmask = 0;
    EdgeMask zmask = 0;
    double coeff = 1.0;
};

// P|b> = sign |b XOR xmask>, sign = coeff * (-1)^|zmask AND b|.
inline std::pair<EdgeMask, double> apply(const PauliString& p, EdgeMask basis) {
    return {basis ^ p.xmask, p.coeff * parity_sign(p.zmask & basis)};
}

// X_{x1}Z_{z1} X_{x2}Z_{z2} = (-1)^|z1 AND x2| X_{x1^x2} Z_{z1^z2}
inline PauliString string_mul(const PauliString& a, const PauliString& b) {
    PauliString r;
    r.xmask = a.xmask ^ b.xmask;
    r.zmask = a.zmask ^ b.zmask;
    r.coeff = a.coeff * b.coeff * parity_sign(a.zmask & b.xmask);
    return r;
}

inline bool strings_commute(const PauliString& a, const PauliString& b) {
    int c = popcount(a.zmask & b.xmask) + popcount(a.xmask & b.zmask);
    return (c & 1) == 0;
}

// Hermitian sum of Pauli strings over n_sites spins.
struct OperatorSum {
    int n_sites = 0;
    std::vector<PauliString> terms;

    std::size_t dim() const { return std::size_t{1} << n_sites; }
};

// Merge duplicate (xmask, zmask) pairs and drop coefficients below 1e-15.
inline void simplify(OperatorSum& op) {
    auto key_less = [](const PauliString& a, const PauliString& b) {
        return a.xmask != b.xmask ? a.xmask < b.xmask : a.zmask < b.zmask;
    };
    std::sort(op.terms.begin(), op.terms.end(), key_less);
    std::vector<PauliString> merged;
    merged.reserve(op.terms.size());
    for (const auto& t : op.terms) {
        if (!merged.empty() && merged.back().xmask == t.xmask && merged.back().zmask == t.zmask) {
            merged.back().coeff += t.coeff;
        } else {
            merged.push_back(t);
        }
    }
    std::erase_if(merged, [](const PauliString& t) { return std::abs(t.coeff) < 1e-15; });
    op.terms = std::move(merged);
}

inline OperatorSum operator_add(const OperatorSum& a, const OperatorSum& b) {
    OperatorSum r = a;
    r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
    simplify(r);
    return r;
}

// [A, B] as an OperatorSum (empty terms list when they commute).
inline OperatorSum commutator(const OperatorSum& a, const OperatorSum& b) {
    OperatorSum r;
    r.n_sites = a.n_sites;
    for (const auto& p : a.terms) {
        for (const auto& q : b.terms) {
            PauliString pq = string_mul(p, q);
            PauliString qp = string_mul(q, p);
            qp.coeff = -qp.coeff;
            r.terms.push_back(pq);
            r.terms.push_back(qp);
        }
    }
    simplify(r);
    return r;
}

// y = O v, streamed term by term; no dense matrix is materialized.
inline void matvec(const OperatorSum& op, const StateVector& v, StateVector& y) {
    const std::size_t dim = op.dim();
    if (v.size() != dim) throw std::invalid_argument("matvec: dimension mismatch");
    y.assign(dim, 0.0);
    for (const auto& t : op.terms) {
        const EdgeMask x = t.xmask, z = t.zmask;
        const double c = t.coeff;
        if (x == 0 && z == 0) {
            for (std::size_t b = 0; b < dim; ++b) y[b] += c * v[b];
        } else if (x == 0) {
            for (std::size_t b = 0; b < dim; ++b) y[b] += c * parity_sign(z & b) * v[b];
        } else {
            for (std::size_t b = 0; b < dim; ++b) y[b ^ x] += c * parity_sign(z & b) * v[b];
        }
    }
}

inline StateVector matvec(const OperatorSum& op, const StateVector& v) {
    StateVector y;
    matvec(op, v, y);
    return y;
}

// <v|O|v> without allocating the intermediate vector.
inline double expectation(const StateVector& v, const OperatorSum& op) {
    const std::size_t dim = op.dim();
    if (v.size() != dim) throw std::invalid_argument("expectation: dimension mismatch");
    long double acc = 0.0L;
    for (const auto& t : op.terms) {
        long double s = 0.0L;
        for (std::size_t b = 0; b < dim; ++b) {
            s += static_cast<long double>(v[b ^ t.xmask]) * parity_sign(t.zmask & b) * v[b];
        }
        acc += t.coeff * s;
    }
    return static_cast<double>(acc);
}

inline double expectation(const StateVector& v, const PauliString& p) {
    OperatorSum op;
    op.n_sites = static_cast<int>(std::bit_width(v.size()) - 1);
    op.terms = {p};
    return expectation(v, op);
}

// <PQ> - <P><Q>
inline double connected_correlator(const StateVector& v, const PauliString& p, const PauliString& q) {
    return expectation(v, string_mul(p, q)) - expectation(v, p) * expectation(v, q);
}

// Dense realization, for small-system oracle checks only.
inline std::vector<std::vector<double>> to_dense(const OperatorSum& op) {
    if (op.n_sites > 14) throw CapExceeded("dense realization is capped at 14 spins");
    const std::size_t dim = op.dim();
    std::vector<std::vector<double>> m(dim, std::vector<double>(dim, 0.0));
    for (const auto& t : op.terms) {
        for (std::size_t b = 0; b < dim; ++b) {
            auto [b2, s] = apply(t, b);
            m[b2][b] += s;
        }
    }
    return m;
}

}  // namespace splitlab
