#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sentistock {

std::uint64_t fnv1a64(std::string_view data);

// SplitMix64 step; used to derive independent child seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t x);

// Lossless double <-> text helpers for model files. format_hex emits the C99
// "%a" form; parse_hex accepts it back bit-exactly.
std::string format_hex(double v);
double parse_hex(const std::string& token);

// Shortest-ish decimal form that still round-trips ("%.17g"); used for CSV
// outputs that must be byte-identical across runs.
std::string format_g17(double v);

}  // namespace sentistock
