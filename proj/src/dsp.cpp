#include "hbc/dsp.hpp"

#include "hbc/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <numbers>
#include <string>

namespace hbc::dsp {

namespace {

double sinc(double x)
{
    if (x == 0.0)
        return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

// Windowed ideal low-pass with cutoff `fc` (cycles/sample), centered on (N-1)/2.
double lowpass_tap(double fc, double m)
{
    return 2.0 * fc * sinc(2.0 * fc * m);
}

} // namespace

FirTaps design_bandpass_fir(const BandSpec& band, double sample_rate)
{
    const double lo = band.center_hz - band.bandwidth_hz / 2.0;
    const double hi = band.center_hz + band.bandwidth_hz / 2.0;
    if (!(sample_rate > 0.0) || band.taps < 3 || !(band.bandwidth_hz > 0.0) || !(lo > 0.0) ||
        !(hi < sample_rate / 2.0)) {
        throw Error(ErrorCode::InvalidBand,
                    "band " + std::to_string(lo) + ".." + std::to_string(hi) +
                        " Hz invalid at " + std::to_string(sample_rate) + " Hz with " +
                        std::to_string(band.taps) + " taps");
    }

    const std::size_t n_taps = band.taps;
    const double mid = static_cast<double>(n_taps - 1) / 2.0;
    std::vector<double> window(n_taps);
    std::vector<double> h(n_taps);
    for (std::size_t n = 0; n < n_taps; ++n) {
        window[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                           static_cast<double>(n_taps - 1));
        const double m = static_cast<double>(n) - mid;
        h[n] = window[n] * (lowpass_tap(hi / sample_rate, m) - lowpass_tap(lo / sample_rate, m));
    }

    // Null the DC response by removing a scaled copy of the window.
    double h_sum = 0.0;
    double w_sum = 0.0;
    for (std::size_t n = 0; n < n_taps; ++n) {
        h_sum += h[n];
        w_sum += window[n];
    }
    for (std::size_t n = 0; n < n_taps; ++n)
        h[n] -= window[n] * h_sum / w_sum;

    FirTaps taps{std::move(h)};
    const double gain = magnitude_response(taps, band.center_hz, sample_rate);
    if (!(gain > 0.0) || !std::isfinite(gain))
        throw Error(ErrorCode::InvalidBand, "band-pass design has no gain at center frequency");
    for (auto& c : taps.coefficients)
        c /= gain;
    return taps;
}

double magnitude_response(const FirTaps& taps, double hz, double sample_rate)
{
    std::complex<double> acc{0.0, 0.0};
    const double w = 2.0 * std::numbers::pi * hz / sample_rate;
    for (std::size_t n = 0; n < taps.size(); ++n)
        acc += taps.coefficients[n] * std::polar(1.0, -w * static_cast<double>(n));
    return std::abs(acc);
}

SampleBuffer fir_filter(const SampleBuffer& input, const FirTaps& taps)
{
    SampleBuffer out{std::vector<double>(input.size()), input.sample_rate};
    const auto& h = taps.coefficients;
    const auto& x = input.samples;
    for (std::size_t n = 0; n < x.size(); ++n) {
        double acc = 0.0;
        const std::size_t reach = std::min(h.size(), n + 1);
        for (std::size_t i = 0; i < reach; ++i)
            acc += h[i] * x[n - i];
        out.samples[n] = acc;
    }
    return out;
}

SampleBuffer rectify(const SampleBuffer& input)
{
    SampleBuffer out{input.samples, input.sample_rate};
    for (auto& s : out.samples)
        s = std::abs(s);
    return out;
}

double window_mean(std::span<const double> samples)
{
    double sum = 0.0;
    for (double s : samples)
        sum += s;
    return sum / static_cast<double>(samples.size());
}

SampleBuffer envelope(const SampleBuffer& input, std::size_t window_len, std::size_t hop)
{
    if (hop < 1 || hop > window_len || window_len > input.size()) {
        throw Error(ErrorCode::BadWindow, "envelope needs 1 <= hop <= window <= length (hop=" +
                                              std::to_string(hop) + ", window=" +
                                              std::to_string(window_len) + ", length=" +
                                              std::to_string(input.size()) + ")");
    }
    const std::size_t count = (input.size() - window_len) / hop + 1;
    SampleBuffer out{std::vector<double>(count), input.sample_rate / static_cast<double>(hop)};
    const std::span<const double> x{input.samples};
    for (std::size_t j = 0; j < count; ++j)
        out.samples[j] = window_mean(x.subspan(j * hop, window_len));
    return out;
}

SampleBuffer binarize(const SampleBuffer& envelope, double relative_threshold)
{
    SampleBuffer out{std::vector<double>(envelope.size(), 0.0), envelope.sample_rate};
    if (envelope.empty())
        return out;
    const double peak = *std::max_element(envelope.samples.begin(), envelope.samples.end());
    if (!(peak > 0.0))
        return out;
    const double level = relative_threshold * peak;
    for (std::size_t i = 0; i < envelope.size(); ++i)
        out.samples[i] = envelope.samples[i] >= level ? 1.0 : 0.0;
    return out;
}

SampleBuffer binarize_windowed(const SampleBuffer& envelope, double relative_threshold,
                               std::size_t radius)
{
    const auto& e = envelope.samples;
    SampleBuffer out{std::vector<double>(e.size(), 0.0), envelope.sample_rate};
    std::deque<std::size_t> window;  // indices with decreasing values
    std::size_t pushed = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const std::size_t right = std::min(e.size() - 1, i + radius);
        for (; pushed <= right; ++pushed) {
            while (!window.empty() && e[window.back()] <= e[pushed])
                window.pop_back();
            window.push_back(pushed);
        }
        while (window.front() + radius < i)
            window.pop_front();
        const double peak = e[window.front()];
        if (peak > 0.0 && e[i] >= relative_threshold * peak)
            out.samples[i] = 1.0;
    }
    return out;
}

std::size_t probe_index(std::size_t ms, double offset, double sample_rate)
{
    return static_cast<std::size_t>(
        std::llround((static_cast<double>(ms) + offset) * sample_rate / 1000.0));
}

std::size_t decimated_length(std::size_t length, double sample_rate, const ProbeOffsets& probes)
{
    auto m = static_cast<std::size_t>(static_cast<double>(length) * 1000.0 / sample_rate);
    while (m > 0 && probe_index(m - 1, probes[2], sample_rate) >= length)
        --m;
    while (probe_index(m, probes[2], sample_rate) < length)
        ++m;
    return m;
}

SampleBuffer decimate_per_ms(const SampleBuffer& binary, const ProbeOffsets& probes)
{
    if (binary.sample_rate < 3000.0) {
        throw Error(ErrorCode::RateTooLow,
                    "decimation needs >= 3000 Hz, got " + std::to_string(binary.sample_rate));
    }
    if (!(probes[0] >= 0.0 && probes[0] < probes[1] && probes[1] < probes[2] && probes[2] < 1.0))
        throw Error(ErrorCode::InvalidConfig, "probe offsets must be increasing within [0, 1)");

    const std::size_t count = decimated_length(binary.size(), binary.sample_rate, probes);
    SampleBuffer out{std::vector<double>(count, 0.0), 1000.0};
    for (std::size_t m = 0; m < count; ++m) {
        for (double offset : probes) {
            if (binary.samples[probe_index(m, offset, binary.sample_rate)] != 0.0) {
                out.samples[m] = 1.0;
                break;
            }
        }
    }
    return out;
}

std::size_t symbols_per_bit(unsigned bit_rate)
{
    if (bit_rate == 0 || 1000 % bit_rate != 0) {
        throw Error(ErrorCode::IncompatibleRate,
                    "bit rate " + std::to_string(bit_rate) + " does not divide 1000");
    }
    return 1000 / bit_rate;
}

framing::BitStream slice_bits(std::span<const std::uint8_t> symbols, unsigned bit_rate)
{
    const std::size_t group = symbols_per_bit(bit_rate);
    framing::BitStream bits;
    bits.reserve(symbols.size() / group);
    for (std::size_t start = 0; start + group <= symbols.size(); start += group) {
        std::size_t ones = 0;
        for (std::size_t i = 0; i < group; ++i)
            ones += symbols[start + i] ? 1 : 0;
        bits.push_back(2 * ones >= group ? 1 : 0);
    }
    return bits;
}

framing::BitStream slice_bits(const SampleBuffer& decimated, unsigned bit_rate)
{
    if (decimated.sample_rate != 1000.0) {
        throw Error(ErrorCode::IncompatibleRate,
                    "slicing expects 1000 Hz symbols, got " + std::to_string(decimated.sample_rate));
    }
    std::vector<std::uint8_t> symbols(decimated.size());
    std::transform(decimated.samples.begin(), decimated.samples.end(), symbols.begin(),
                   [](double s) { return static_cast<std::uint8_t>(s != 0.0 ? 1 : 0); });
    return slice_bits(symbols, bit_rate);
}

} // namespace hbc::dsp
