// SPDX-FileCopyrightText: 2026 dyw contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "dyw/ratchet.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/kdf.h>

#include <cstring>

namespace dyw::ratchet {

Part part_hash(unsigned j, const Part& input) {
    Part out{};
    unsigned int len = 0;
    std::uint8_t msg = static_cast<std::uint8_t>(j);
    HMAC(EVP_sha256(), input.data(), static_cast<int>(input.size()), &msg, 1, out.data(), &len);
    if (len != kPartSize) throw RatchetError("unexpected HMAC output length");
    return out;
}

RatchetState init(std::span<const std::uint8_t> seed) {
    if (seed.size() != kSeedSize)
        throw RatchetError("seed must be exactly 128 bytes, got " + std::to_string(seed.size()));
    RatchetState s;
    for (std::size_t j = 0; j < kParts; ++j)
        std::memcpy(s.parts[j].data(), seed.data() + j * kPartSize, kPartSize);
    return s;
}

AdvanceResult advance(const RatchetState& state, std::uint64_t target) {
    if (target >= kIndexCeiling)
        throw RatchetError("target index " + std::to_string(target) + " outside 32-bit range");
    if (target < state.index)
        throw RatchetError("ratchet only advances: index " + std::to_string(state.index) +
                           " > target " + std::to_string(target));

    AdvanceResult res;
    res.state = state;
    auto& r = res.state.parts;
    std::uint32_t t = static_cast<std::uint32_t>(target);
    std::uint32_t idx = res.state.index;

    auto hash = [&res](unsigned j, const Part& in) {
        ++res.hash_ops;
        return part_hash(j, in);
    };

    // Part 0 window: 2^24. Crossing n boundaries applies H0 n times; parts
    // 1..3 re-seed from the value one step before the last boundary.
    std::uint32_t k0 = (t >> 24) - (idx >> 24);
    if (k0 > 0) {
        for (std::uint32_t i = 0; i + 1 < k0; ++i) r[0] = hash(0, r[0]);
        Part src = r[0];
        r[0] = hash(0, src);
        r[1] = hash(1, src);
        r[2] = hash(2, src);
        r[3] = hash(3, src);
        idx = (t >> 24) << 24;
    }

    // Part 1 window: 2^16.
    std::uint32_t k1 = (t >> 16) - (idx >> 16);
    if (k1 > 0) {
        for (std::uint32_t i = 0; i + 1 < k1; ++i) r[1] = hash(1, r[1]);
        Part src = r[1];
        r[1] = hash(1, src);
        r[2] = hash(2, src);
        r[3] = hash(3, src);
        idx = (t >> 16) << 16;
    }

    // Part 2 window: 2^8. Part 2 itself only changes at 2^16 boundaries, so
    // R3's re-seed from it is identical at every crossed 2^8 boundary and a
    // single invocation covers them all.
    std::uint32_t k2 = (t >> 8) - (idx >> 8);
    if (k2 > 0) {
        r[3] = hash(3, r[2]);
        idx = (t >> 8) << 8;
    }

    // Residual steps iterate H3.
    for (std::uint32_t i = idx; i < t; ++i) r[3] = hash(3, r[3]);

    res.state.index = t;
    return res;
}

MessageKeys derive_message_keys(const RatchetState& state) {
    std::uint8_t ikm[kSeedSize];
    for (std::size_t j = 0; j < kParts; ++j)
        std::memcpy(ikm + j * kPartSize, state.parts[j].data(), kPartSize);

    static const char kInfo[] = "MEGOLM_KEYS";
    std::uint8_t salt[kPartSize] = {0};
    std::uint8_t okm[80];

    EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new_id(EVP_PKEY_HKDF, nullptr);
    if (!ctx) throw RatchetError("HKDF context allocation failed");
    std::size_t out_len = sizeof(okm);
    bool ok = EVP_PKEY_derive_init(ctx) > 0 &&
              EVP_PKEY_CTX_set_hkdf_md(ctx, EVP_sha256()) > 0 &&
              EVP_PKEY_CTX_set1_hkdf_salt(ctx, salt, sizeof(salt)) > 0 &&
              EVP_PKEY_CTX_set1_hkdf_key(ctx, ikm, sizeof(ikm)) > 0 &&
              EVP_PKEY_CTX_add1_hkdf_info(ctx, reinterpret_cast<const std::uint8_t*>(kInfo),
                                          sizeof(kInfo) - 1) > 0 &&
              EVP_PKEY_derive(ctx, okm, &out_len) > 0 && out_len == sizeof(okm);
    EVP_PKEY_CTX_free(ctx);
    if (!ok) throw RatchetError("HKDF derivation failed");

    MessageKeys keys;
    std::memcpy(keys.cipher_key.data(), okm, 32);
    std::memcpy(keys.mac_key.data(), okm + 32, 32);
    std::memcpy(keys.iv.data(), okm + 64, 16);
    return keys;
}

std::vector<std::uint8_t> export_state(const RatchetState& state) {
    std::vector<std::uint8_t> out(4 + kSeedSize);
    out[0] = static_cast<std::uint8_t>(state.index >> 24);
    out[1] = static_cast<std::uint8_t>(state.index >> 16);
    out[2] = static_cast<std::uint8_t>(state.index >> 8);
    out[3] = static_cast<std::uint8_t>(state.index);
    for (std::size_t j = 0; j < kParts; ++j)
        std::memcpy(out.data() + 4 + j * kPartSize, state.parts[j].data(), kPartSize);
    return out;
}

RatchetState import_state(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != 4 + kSeedSize)
        throw RatchetError("ratchet state blob must be 132 bytes, got " +
                           std::to_string(bytes.size()));
    RatchetState s;
    s.index = (static_cast<std::uint32_t>(bytes[0]) << 24) |
              (static_cast<std::uint32_t>(bytes[1]) << 16) |
              (static_cast<std::uint32_t>(bytes[2]) << 8) | static_cast<std::uint32_t>(bytes[3]);
    for (std::size_t j = 0; j < kParts; ++j)
        std::memcpy(s.parts[j].data(), bytes.data() + 4 + j * kPartSize, kPartSize);
    return s;
}

}  // namespace dyw::ratchet
