#include "hbc/wav.hpp"

#include "hbc/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace hbc::wav {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char (&tag)[5])
{
    out.insert(out.end(), tag, tag + 4);
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at)
{
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at)
{
    return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
           static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char (&tag)[5])
{
    return std::equal(tag, tag + 4, b.begin() + static_cast<std::ptrdiff_t>(at));
}

[[noreturn]] void fail(const std::string& what)
{
    throw Error(ErrorCode::Format, "WAV: " + what);
}

} // namespace

std::int16_t to_pcm16(double sample)
{
    const double scaled = std::round(std::clamp(sample, -1.0, 1.0) * 32768.0);
    return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

std::vector<std::uint8_t> encode(const dsp::SampleBuffer& buffer)
{
    const auto rate = static_cast<std::uint32_t>(std::llround(buffer.sample_rate));
    const auto data_bytes = static_cast<std::uint32_t>(buffer.size() * 2);
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, rate);
    put_u32(out, rate * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    put_tag(out, "data");
    put_u32(out, data_bytes);
    for (double s : buffer.samples)
        put_u16(out, static_cast<std::uint16_t>(to_pcm16(s)));
    return out;
}

dsp::SampleBuffer decode(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE"))
        fail("not a RIFF/WAVE file");

    bool have_fmt = false;
    std::uint32_t rate = 0;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t size = get_u32(bytes, pos + 4);
        const std::size_t body = pos + 8;
        if (size > bytes.size() - body)
            fail("chunk runs past end of file");
        if (tag_is(bytes, pos, "fmt ")) {
            if (size < 16)
                fail("short fmt chunk");
            const auto format = get_u16(bytes, body);
            const auto channels = get_u16(bytes, body + 2);
            const auto bits = get_u16(bytes, body + 14);
            if (format != 1)
                fail("only integer PCM is supported (format tag " + std::to_string(format) + ")");
            if (channels != 1)
                fail("expected mono, got " + std::to_string(channels) + " channels");
            if (bits != 16)
                fail("expected 16-bit samples, got " + std::to_string(bits));
            rate = get_u32(bytes, body + 4);
            if (rate == 0)
                fail("zero sample rate");
            have_fmt = true;
        } else if (tag_is(bytes, pos, "data")) {
            if (!have_fmt)
                fail("data chunk before fmt chunk");
            dsp::SampleBuffer out{std::vector<double>(size / 2), static_cast<double>(rate)};
            for (std::size_t i = 0; i < out.size(); ++i)
                out.samples[i] = static_cast<std::int16_t>(get_u16(bytes, body + 2 * i)) / 32768.0;
            return out;
        }
        pos = body + size + (size & 1);
    }
    fail(have_fmt ? "no data chunk" : "no fmt chunk");
}

void write_file(const std::filesystem::path& path, const dsp::SampleBuffer& buffer)
{
    const auto bytes = encode(buffer);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error(ErrorCode::Io, "write failed: " + path.string());
}

dsp::SampleBuffer read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode(bytes);
}

} // namespace hbc::wav
