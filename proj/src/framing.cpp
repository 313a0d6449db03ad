#include "hbc/framing.hpp"

#include <array>

namespace hbc::framing {

namespace {

// 0x39 bit-reversed.
constexpr std::uint8_t reflected_poly = 0x9C;

constexpr std::array<std::uint8_t, 256> make_table()
{
    std::array<std::uint8_t, 256> table{};
    for (unsigned i = 0; i < 256; ++i) {
        auto c = static_cast<std::uint8_t>(i);
        for (int b = 0; b < 8; ++b)
            c = (c & 1) ? static_cast<std::uint8_t>((c >> 1) ^ reflected_poly)
                        : static_cast<std::uint8_t>(c >> 1);
        table[i] = c;
    }
    return table;
}

constexpr auto crc_table = make_table();

} // namespace

std::uint8_t crc8_darc(std::span<const std::uint8_t> data)
{
    std::uint8_t crc = 0x00;
    for (auto byte : data)
        crc = crc_table[crc ^ byte];
    return crc;
}

std::uint8_t crc8_darc(std::uint8_t byte)
{
    return crc_table[byte];
}

void append_byte(BitStream& bits, std::uint8_t byte)
{
    for (int i = 7; i >= 0; --i)
        bits.push_back(static_cast<std::uint8_t>((byte >> i) & 1));
}

std::uint8_t read_byte(std::span<const std::uint8_t> bits, std::size_t offset)
{
    std::uint8_t byte = 0;
    for (std::size_t i = 0; i < 8; ++i)
        byte = static_cast<std::uint8_t>((byte << 1) | (bits[offset + i] & 1));
    return byte;
}

BitStream encode_frame(std::uint8_t payload)
{
    BitStream bits;
    bits.reserve(frame_bits);
    append_byte(bits, preamble_byte);
    append_byte(bits, sync_byte);
    append_byte(bits, payload);
    append_byte(bits, crc8_darc(payload));
    return bits;
}

std::vector<std::size_t> find_sync(std::span<const std::uint8_t> stream)
{
    std::vector<std::size_t> offsets;
    if (stream.size() < frame_bits)
        return offsets;
    for (std::size_t i = 0; i + frame_bits <= stream.size(); ++i) {
        if (read_byte(stream, i) == preamble_byte && read_byte(stream, i + 8) == sync_byte)
            offsets.push_back(i);
    }
    return offsets;
}

FrameDecode decode_frame(std::span<const std::uint8_t> stream, std::size_t offset)
{
    FrameDecode result;
    if (offset > stream.size() || stream.size() - offset < frame_bits) {
        result.status = DecodeStatus::Truncated;
        return result;
    }
    result.frame.payload = read_byte(stream, offset + 16);
    result.frame.crc = read_byte(stream, offset + 24);
    result.status = result.frame.valid() ? DecodeStatus::Ok : DecodeStatus::CrcMismatch;
    return result;
}

} // namespace hbc::framing
