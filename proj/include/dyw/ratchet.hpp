// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DYW_RATCHET_HPP_
#define DYW_RATCHET_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyw::ratchet {

inline constexpr std::size_t kPartSize = 32;
inline constexpr std::size_t kParts = 4;
inline constexpr std::size_t kSeedSize = kParts * kPartSize;  // 128 bytes
inline constexpr std::uint64_t kIndexCeiling = 1ULL << 32;

using Part = std::array<std::uint8_t, kPartSize>;

class RatchetError : public std::runtime_error {
public:
    explicit RatchetError(const std::string& what) : std::runtime_error(what) {}
};

/// Group-session hash ratchet: a 32-bit index and four 256-bit parts, where
/// part j re-seeds from part j-1 every 2^(8*(4-j)) steps. Values are
/// immutable; advancement returns a new state.
struct RatchetState {
    std::uint32_t index = 0;
    std::array<Part, kParts> parts{};
};

struct MessageKeys {
    std::array<std::uint8_t, 32> cipher_key{};
    std::array<std::uint8_t, 32> mac_key{};
    std::array<std::uint8_t, 16> iv{};
};

/// Keyed hash family separating the four parts: H_j(x) = HMAC-SHA256(key=x,
/// msg=[j]) truncated to the part size (SHA-256 output is exactly 32 bytes).
Part part_hash(unsigned j, const Part& input);

struct AdvanceResult {
    RatchetState state;
    /// Exact number of part_hash invocations this call performed.
    std::uint32_t hash_ops = 0;
};

/// Splits 128 bytes of entropy into the four initial parts at index 0.
RatchetState init(std::span<const std::uint8_t> seed);

/// Moves the ratchet forward to `target`, re-seeding parts at every crossed
/// window boundary and iterating H3 for the residual steps. Never more than
/// 1020 hash invocations. target < state.index is a monotonicity error.
AdvanceResult advance(const RatchetState& state, std::uint64_t target);

/// HKDF-SHA256 over R0||R1||R2||R3 with info label "MEGOLM_KEYS",
/// split 32+32+16.
MessageKeys derive_message_keys(const RatchetState& state);

/// 4-byte big-endian index followed by the 128 bytes of parts.
std::vector<std::uint8_t> export_state(const RatchetState& state);
RatchetState import_state(std::span<const std::uint8_t> bytes);

}  // namespace dyw::ratchet

#endif  // DYW_RATCHET_HPP_
