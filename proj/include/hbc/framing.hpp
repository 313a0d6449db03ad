#pragma once

// Bit-level wire frame: preamble 0xAA, sync 0x7E, payload byte, CRC-8/DARC of
// the payload. 32 bits, MSB-first within every byte.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hbc::framing {

inline constexpr std::uint8_t preamble_byte = 0xAA;
inline constexpr std::uint8_t sync_byte = 0x7E;
inline constexpr std::size_t frame_bits = 32;
inline constexpr std::size_t sync_bits = 16;

/// Sequence of 0/1 symbols.
using BitStream = std::vector<std::uint8_t>;

/// CRC-8/DARC: poly 0x39, init 0x00, reflected in/out, xorout 0x00.
std::uint8_t crc8_darc(std::span<const std::uint8_t> data);
std::uint8_t crc8_darc(std::uint8_t byte);

struct Frame {
    std::uint8_t payload = 0;
    std::uint8_t crc = 0;

    static Frame make(std::uint8_t payload) { return {payload, crc8_darc(payload)}; }
    bool valid() const { return crc == crc8_darc(payload); }
    friend bool operator==(const Frame&, const Frame&) = default;
};

/// Appends the 8 bits of `byte` MSB-first.
void append_byte(BitStream& bits, std::uint8_t byte);

/// Reads 8 bits MSB-first starting at `offset`. Caller guarantees range.
std::uint8_t read_byte(std::span<const std::uint8_t> bits, std::size_t offset);

BitStream encode_frame(std::uint8_t payload);

/// Every offset at which preamble+sync starts, ascending. Overlaps allowed.
std::vector<std::size_t> find_sync(std::span<const std::uint8_t> stream);

enum class DecodeStatus { Ok, CrcMismatch, Truncated };

struct FrameDecode {
    DecodeStatus status = DecodeStatus::Truncated;
    Frame frame;

    bool ok() const { return status == DecodeStatus::Ok; }
};

/// Decodes the frame starting at `offset`. Preamble/sync are not re-checked;
/// `offset` normally comes from find_sync.
FrameDecode decode_frame(std::span<const std::uint8_t> stream, std::size_t offset);

} // namespace hbc::framing
