#include "hbc/framing.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <string_view>

using namespace hbc::framing;

namespace {

BitStream bits_of(std::initializer_list<std::uint8_t> bytes)
{
    BitStream bits;
    for (auto b : bytes)
        append_byte(bits, b);
    return bits;
}

// Flips bit `i` of the 16-bit payload+crc region (0 = payload MSB).
void flip_region_bit(BitStream& bits, int i)
{
    bits[16 + static_cast<std::size_t>(i)] ^= 1;
}

} // namespace

TEST_CASE("crc8_darc check values")
{
    CHECK(crc8_darc(std::span<const std::uint8_t>{}) == 0x00);

    constexpr std::string_view check = "123456789";
    const std::vector<std::uint8_t> ascii(check.begin(), check.end());
    CHECK(crc8_darc(ascii) == 0x15);
    CHECK(oracle::crc8_darc_long_division(ascii) == 0x15);

    // Pinned from the long-division oracle.
    const std::uint8_t zero[] = {0x00};
    CHECK(oracle::crc8_darc_long_division(zero) == 0x00);
    CHECK(crc8_darc(zero) == 0x00);
    CHECK(crc8_darc(std::uint8_t{0xFF}) == 0xC6);
    CHECK(crc8_darc(std::uint8_t{0x5A}) == 0xFE);
}

TEST_CASE("crc8_darc table matches long division on random inputs")
{
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::uint8_t> data(rng() % 40);
        for (auto& b : data)
            b = static_cast<std::uint8_t>(rng());
        REQUIRE(crc8_darc(data) == oracle::crc8_darc_long_division(data));
    }
    for (unsigned b = 0; b < 256; ++b) {
        const std::uint8_t one[] = {static_cast<std::uint8_t>(b)};
        REQUIRE(crc8_darc(static_cast<std::uint8_t>(b)) == oracle::crc8_darc_long_division(one));
    }
}

TEST_CASE("encode_frame layout")
{
    CHECK(encode_frame(0x00) == bits_of({0xAA, 0x7E, 0x00, 0x00}));

    const auto ff = encode_frame(0xFF);
    REQUIRE(ff.size() == 32);
    const BitStream prefix(ff.begin(), ff.begin() + 16);
    CHECK(prefix == BitStream{1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 1, 1, 1, 1, 1, 0});
    CHECK(read_byte(ff, 24) == 0xC6);
}

TEST_CASE("round trip over every payload")
{
    for (unsigned p = 0; p < 256; ++p) {
        const auto bits = encode_frame(static_cast<std::uint8_t>(p));
        REQUIRE(bits.size() == frame_bits);
        for (auto b : bits)
            REQUIRE((b == 0 || b == 1));
        const auto d = decode_frame(bits, 0);
        REQUIRE(d.ok());
        REQUIRE(d.frame.payload == p);
    }
}

TEST_CASE("find_sync")
{
    SUBCASE("embedded after 5 zero bits")
    {
        BitStream s(5, 0);
        const auto f = encode_frame(0x42);
        s.insert(s.end(), f.begin(), f.end());
        CHECK(find_sync(s) == std::vector<std::size_t>{5});
    }
    SUBCASE("all zero")
    {
        CHECK(find_sync(BitStream(64, 0)).empty());
    }
    SUBCASE("back to back")
    {
        auto s = encode_frame(0x11);
        const auto f = encode_frame(0x22);
        s.insert(s.end(), f.begin(), f.end());
        CHECK(find_sync(s) == std::vector<std::size_t>{0, 32});
    }
    SUBCASE("shorter than a frame")
    {
        const auto f = encode_frame(0x42);
        CHECK(find_sync(std::span(f).first(31)).empty());
    }
}

TEST_CASE("decode_frame errors")
{
    CHECK(decode_frame(BitStream(20, 0), 0).status == DecodeStatus::Truncated);
    CHECK(decode_frame(encode_frame(0x01), 1).status == DecodeStatus::Truncated);
    CHECK(decode_frame(encode_frame(0x01), 40).status == DecodeStatus::Truncated);
}

TEST_CASE("every single-bit error in payload+crc is detected")
{
    for (unsigned p = 0; p < 256; ++p) {
        for (int i = 0; i < 16; ++i) {
            auto bits = encode_frame(static_cast<std::uint8_t>(p));
            flip_region_bit(bits, i);
            REQUIRE(decode_frame(bits, 0).status == DecodeStatus::CrcMismatch);
        }
    }
}

TEST_CASE("bursts of length <= 8")
{
    auto valid = [](const BitStream& bits) { return decode_frame(bits, 0).ok(); };
    // In the order the reflected CRC reads bits, every burst is caught.
    const auto crc_order = oracle::enumerate_bursts(true, encode_frame, valid);
    CHECK(crc_order.cases == 327424);
    CHECK(crc_order.undetected == 0);
    // On the MSB-first wire a burst that crosses the payload/crc boundary is
    // not contiguous for the CRC; 4 length-8 patterns per payload slip by.
    const auto wire_order = oracle::enumerate_bursts(false, encode_frame, valid);
    CHECK(wire_order.cases == 327424);
    CHECK(wire_order.undetected == 1024);
}

TEST_CASE("two-bit error detection rate")
{
    std::size_t detected = 0;
    std::size_t total = 0;
    for (unsigned p = 0; p < 256; ++p) {
        for (int i = 0; i < 16; ++i) {
            for (int j = i + 1; j < 16; ++j) {
                auto bits = encode_frame(static_cast<std::uint8_t>(p));
                flip_region_bit(bits, i);
                flip_region_bit(bits, j);
                ++total;
                detected += decode_frame(bits, 0).ok() ? 0 : 1;
            }
        }
    }
    // Enumerated: 30720 / 30720.
    CHECK(total == 30720);
    CHECK(detected == 30720);
}
