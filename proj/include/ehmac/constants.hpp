#pragma once

#include <cmath>
#include <numbers>

namespace ehmac {

// All rates in this library are in bits per channel use (logs base 2).

// 0.5 * log2(1 + x), the per-slot AWGN rate for received power x.
inline double half_log2_1p(double x) {
  return 0.5 * std::log1p(x) / std::numbers::ln2;
}

// Differential entropy of a unit-variance Gaussian: 0.5 * log2(2*pi*e).
inline double gaussian_entropy_bits() {
  return 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e);
}

// Rate loss of uniform versus Gaussian inputs through the entropy power
// inequality: 0.5 * log2(pi*e/2), about 1.05 bits. Kept exact everywhere;
// 1.05 is only its documented decimal.
inline double epi_gap_bits() {
  return 0.5 * std::log2(std::numbers::pi * std::numbers::e / 2.0);
}

// Long-term throughput gap of the fixed-fraction policy to the AWGN bound.
inline constexpr double kFixedFractionGapBits = 0.72;

// Throughput gap of the bounded-entropy online policy (entropy rate <= 1 bit)
// used for the no-receiver-side-information inner bounds.
inline constexpr double kBoundedEntropyPolicyGapBits = 1.80;

// Sum-capacity gap with receiver side information: 0.72 + epi, about 1.77.
inline double sum_gap_txrx_bits() {
  return kFixedFractionGapBits + epi_gap_bits();
}

// Sum-capacity gap without receiver side information under fully correlated
// arrivals: 1.80 + epi + 1 (entropy rate) bits, about 3.85.
inline double sum_gap_tx_correlated_bits() {
  return kBoundedEntropyPolicyGapBits + epi_gap_bits() + 1.0;
}

// Region gap without receiver side information, K independent users:
// 1.80 + epi + K bits, about 2.85 + K.
inline double region_gap_tx_bits(int num_users) {
  return kBoundedEntropyPolicyGapBits + epi_gap_bits() + num_users;
}

}  // namespace ehmac
