#pragma once

#include <span>

#include "ofdm/numgrad/diff_array.hpp"

namespace ofdm::ng {

// Binary elementwise ops accept three operand layouts for `b`:
//   - exactly a's shape,
//   - a's shape without its leading (batch) dimension, repeated over it,
//   - a single element.
DiffArray add(const DiffArray& a, const DiffArray& b);
DiffArray sub(const DiffArray& a, const DiffArray& b);
DiffArray mul(const DiffArray& a, const DiffArray& b);
DiffArray div(const DiffArray& a, const DiffArray& b);

DiffArray neg(const DiffArray& a);
DiffArray scale(const DiffArray& a, double factor);
DiffArray relu(const DiffArray& a);
DiffArray exp(const DiffArray& a);
DiffArray log(const DiffArray& a);  // DomainError on non-positive input
DiffArray sqrt(const DiffArray& a);  // DomainError on negative input
DiffArray square(const DiffArray& a);
// log(1 + e^x), evaluated without overflow.
DiffArray softplus(const DiffArray& a);

DiffArray sum(const DiffArray& a);
DiffArray mean(const DiffArray& a);
// Reduces the leading dimension: [N, ...] -> [...].
DiffArray sum_rows(const DiffArray& a);
DiffArray mean_rows(const DiffArray& a);

DiffArray reshape(const DiffArray& a, Shape shape);
// Selects rows of `table` ([N, ...]) -> [indices.size(), ...].
DiffArray gather_rows(const DiffArray& table, std::span<const int> indices);

// Complex ops on a trailing dimension of size 2.
DiffArray cmul(const DiffArray& a, const DiffArray& b);
DiffArray cconj(const DiffArray& a);
// |z|^2, dropping the trailing dimension.
DiffArray cabs2(const DiffArray& a);

}  // namespace ofdm::ng
