#pragma once

#include "hbc/framing.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hbc::dsp {

/// Uniformly sampled real signal. Samples are nominally in [-1, 1].
struct SampleBuffer {
    std::vector<double> samples;
    double sample_rate = 44100.0;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double duration_s() const { return static_cast<double>(samples.size()) / sample_rate; }

    friend bool operator==(const SampleBuffer&, const SampleBuffer&) = default;
};

struct FirTaps {
    std::vector<double> coefficients;

    std::size_t size() const { return coefficients.size(); }
};

struct BandSpec {
    std::size_t taps = 20;
    double center_hz = 1000.0;
    double bandwidth_hz = 400.0;
};

using ProbeOffsets = std::array<double, 3>;
inline constexpr ProbeOffsets default_probe_offsets{0.25, 0.50, 0.75};

/// Hamming-windowed sinc band-pass. The taps are made zero-sum (no DC
/// response) and scaled to unit gain at the center frequency; at 20 taps
/// the raw windowed sinc is too short to reject low frequencies otherwise.
FirTaps design_bandpass_fir(const BandSpec& band, double sample_rate);

/// |H(f)| of an FIR at frequency `hz`.
double magnitude_response(const FirTaps& taps, double hz, double sample_rate);

/// Direct-form convolution, zero initial state, output length == input length.
SampleBuffer fir_filter(const SampleBuffer& input, const FirTaps& taps);

SampleBuffer rectify(const SampleBuffer& input);

/// Mean over windows of `window_len` samples advancing by `hop`.
/// Output rate is input rate / hop; output sample j covers input
/// [j*hop, j*hop + window_len).
SampleBuffer envelope(const SampleBuffer& input, std::size_t window_len, std::size_t hop);

/// Mean of the span, summed in index order.
double window_mean(std::span<const double> samples);

/// 1 where envelope >= relative_threshold * max(envelope); all 0 when max is 0.
SampleBuffer binarize(const SampleBuffer& envelope, double relative_threshold);

/// Same rule as binarize, but the reference maximum is taken over
/// [i - radius, i + radius] clipped to the buffer.
SampleBuffer binarize_windowed(const SampleBuffer& envelope, double relative_threshold,
                               std::size_t radius);

/// Index of the sample probed at fractional position `offset` of millisecond `ms`.
std::size_t probe_index(std::size_t ms, double offset, double sample_rate);

/// Number of whole milliseconds whose three probes lie inside a buffer of
/// `length` samples.
std::size_t decimated_length(std::size_t length, double sample_rate, const ProbeOffsets& probes);

/// One symbol per millisecond: 1 iff any of the three probed samples is 1.
SampleBuffer decimate_per_ms(const SampleBuffer& binary,
                             const ProbeOffsets& probes = default_probe_offsets);

/// Majority vote over groups of 1000/bit_rate symbols; ties resolve to 1.
framing::BitStream slice_bits(const SampleBuffer& decimated, unsigned bit_rate);
framing::BitStream slice_bits(std::span<const std::uint8_t> symbols, unsigned bit_rate);

/// Symbols per bit at the 1000 Hz decimated rate; throws IncompatibleRate.
std::size_t symbols_per_bit(unsigned bit_rate);

} // namespace hbc::dsp
