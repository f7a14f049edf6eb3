#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "physaug/stda.hpp"

namespace physaug::dataio {

// Batch frame, little-endian throughout:
//
//   offset  size        field
//   0       4           magic "PPDA"
//   4       2           version (u16) = 1
//   6       4           N batch size (u32)
//   10      4           T window length (u32)
//   14      4           C channels (u32)
//   18      2           dtype (u16) = 1, float32
//   20      4*N*T*C     samples, row-major [n][t][c]
//   ..      4*N         labels (u32)
//   ..      4           CRC-32 (zlib polynomial) over samples and labels
//
// Reward frame: magic "REWD", version (u16) = 1, M (u32), then M pairs of
// (sub-policy index u32, reward f32).
//
// Stream and file messages are a u32 byte count followed by the body. The
// server-to-client body is (sub-policy index u32, batch frame); the
// client-to-server body is a reward frame.

inline constexpr std::array<char, 4> kBatchMagic{'P', 'P', 'D', 'A'};
inline constexpr std::array<char, 4> kRewardMagic{'R', 'E', 'W', 'D'};
inline constexpr std::uint16_t kBatchVersion = 1;
inline constexpr std::uint16_t kRewardVersion = 1;
inline constexpr std::uint16_t kDtypeFloat32 = 1;
inline constexpr std::size_t kBatchHeaderBytes = 20;
inline constexpr std::uint32_t kMaxMessageBytes = 1u << 30;

struct Batch {
  std::uint32_t count = 0;
  std::uint32_t frames = 0;
  std::uint32_t channels = 0;
  std::vector<float> samples;  // count * frames * channels
  std::vector<std::uint32_t> labels;

  friend bool operator==(const Batch&, const Batch&) = default;
};

/// Stacks equally shaped windows. Throws LengthError on a shape mismatch.
Batch make_batch(std::span<const stda::SignalWindow> windows);

std::vector<std::uint8_t> encode_batch(const Batch& batch);
/// Throws FrameError with kind BadMagic, BadVersion, BadDtype, Truncated or BadCrc.
Batch decode_batch(std::span<const std::uint8_t> bytes);

struct RewardEntry {
  std::uint32_t index = 0;
  float reward = 0.0f;
  friend bool operator==(const RewardEntry&, const RewardEntry&) = default;
};

std::vector<std::uint8_t> encode_rewards(std::span<const RewardEntry> rewards);
std::vector<RewardEntry> decode_rewards(std::span<const std::uint8_t> bytes);

/// u32 length prefix + body.
std::vector<std::uint8_t> frame_message(std::span<const std::uint8_t> body);
/// Body of a server-to-client message.
std::vector<std::uint8_t> batch_message_body(std::uint32_t subpolicy, std::span<const std::uint8_t> frame);

struct BatchMessage {
  std::uint32_t subpolicy = 0;
  Batch batch;
};
BatchMessage decode_batch_message(std::span<const std::uint8_t> body);

/// Splits a byte string of concatenated length-prefixed messages.
std::vector<std::vector<std::uint8_t>> split_messages(std::span<const std::uint8_t> bytes);

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);

}  // namespace physaug::dataio
