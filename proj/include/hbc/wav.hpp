#pragma once

// 16-bit signed PCM mono WAV. Read scales by 1/32768; write rounds half away
// from zero after scaling by 32768 and saturates to the int16 range.

#include "hbc/dsp.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace hbc::wav {

std::vector<std::uint8_t> encode(const dsp::SampleBuffer& buffer);
dsp::SampleBuffer decode(std::span<const std::uint8_t> bytes);

std::int16_t to_pcm16(double sample);

void write_file(const std::filesystem::path& path, const dsp::SampleBuffer& buffer);
dsp::SampleBuffer read_file(const std::filesystem::path& path);

} // namespace hbc::wav
