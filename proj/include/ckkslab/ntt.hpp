// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "ckkslab/primes.hpp"

namespace ckks {

// Negacyclic NTT over Z_q[X]/(X^N + 1) for one prime. Forward output is in
// natural order: out[j] = p(psi^(2j+1)) for j = 0..N-1, so pointwise products
// realize negacyclic convolution and the evaluation points line up with the
// oracle definition. Uses Harvey/Shoup butterflies with precomputed tables.
class NttTable {
public:
    NttTable() = default;
    NttTable(const PrimeModulus& prime, size_t degree);

    void forward(u64* data) const;   // coefficient -> evaluation (natural order)
    void inverse(u64* data) const;   // evaluation (natural order) -> coefficient

    u64 modulus() const { return q_; }
    size_t degree() const { return n_; }

private:
    size_t n_ = 0;
    int log_n_ = 0;
    u64 q_ = 0;
    std::vector<u64> psi_rev_, psi_rev_shoup_;    // CT tables, bit-reversed
    std::vector<u64> ipsi_rev_, ipsi_rev_shoup_;  // GS tables, bit-reversed
    u64 n_inv_ = 0, n_inv_shoup_ = 0;
    std::vector<uint32_t> bit_rev_;
};

}  // namespace ckks
