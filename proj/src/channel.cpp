#include "hbc/channel.hpp"

#include "hbc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hbc::channel {

GaussianSource::GaussianSource(std::uint64_t seed) : engine_(seed) {}

double GaussianSource::uniform()
{
    // 53 random bits -> (0, 1]
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianSource::next()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double mean_power(std::span<const double> samples)
{
    if (samples.empty())
        return 0.0;
    double sum = 0.0;
    for (double s : samples)
        sum += s * s;
    return sum / static_cast<double>(samples.size());
}

namespace {

struct SampleRange {
    std::size_t begin;
    std::size_t end;
};

std::vector<SampleRange> dropout_ranges(const dsp::SampleBuffer& input,
                                        const std::vector<Dropout>& dropouts)
{
    std::vector<SampleRange> ranges;
    for (const auto& d : dropouts) {
        if (!(d.start_ms >= 0.0) || !(d.duration_ms > 0.0))
            throw Error(ErrorCode::BadDropout, "dropout needs start >= 0 and duration > 0");
        const auto begin = static_cast<std::size_t>(std::llround(d.start_ms * input.sample_rate / 1000.0));
        const auto end = static_cast<std::size_t>(
            std::llround((d.start_ms + d.duration_ms) * input.sample_rate / 1000.0));
        if (end > input.size()) {
            throw Error(ErrorCode::BadDropout, "dropout at " + std::to_string(d.start_ms) +
                                                   " ms runs past the end of the buffer");
        }
        ranges.push_back({begin, end});
    }
    std::sort(ranges.begin(), ranges.end(),
              [](const SampleRange& a, const SampleRange& b) { return a.begin < b.begin; });
    for (std::size_t i = 1; i < ranges.size(); ++i) {
        if (ranges[i].begin < ranges[i - 1].end)
            throw Error(ErrorCode::BadDropout, "dropout intervals overlap");
    }
    return ranges;
}

} // namespace

dsp::SampleBuffer apply_channel(const dsp::SampleBuffer& input, const ChannelConfig& cfg)
{
    const auto ranges = dropout_ranges(input, cfg.dropouts);
    const double gain = std::pow(10.0, cfg.gain_db / 20.0);

    dsp::SampleBuffer out{input.samples, input.sample_rate};
    double keyed_power = 0.0;
    std::size_t keyed = 0;
    for (auto& s : out.samples) {
        s *= gain;
        if (s != 0.0) {
            keyed_power += s * s;
            ++keyed;
        }
    }

    if (cfg.snr_db && keyed > 0) {
        keyed_power /= static_cast<double>(keyed);
        const double sigma = std::sqrt(keyed_power / std::pow(10.0, *cfg.snr_db / 10.0));
        GaussianSource noise(cfg.seed);
        for (auto& s : out.samples)
            s += sigma * noise.next();
    }

    for (auto& s : out.samples) {
        s += cfg.dc_offset;
        if (cfg.clamp)
            s = std::clamp(s, -1.0, 1.0);
    }
    for (const auto& r : ranges)
        std::fill(out.samples.begin() + static_cast<std::ptrdiff_t>(r.begin),
                  out.samples.begin() + static_cast<std::ptrdiff_t>(r.end), 0.0);
    return out;
}

double measure_snr(const dsp::SampleBuffer& signal, const dsp::SampleBuffer& noisy)
{
    if (signal.size() != noisy.size()) {
        throw Error(ErrorCode::LengthMismatch, "signal has " + std::to_string(signal.size()) +
                                                   " samples, noisy has " +
                                                   std::to_string(noisy.size()));
    }
    double signal_sum = 0.0;
    double noise_sum = 0.0;
    for (std::size_t i = 0; i < signal.size(); ++i) {
        const double d = noisy.samples[i] - signal.samples[i];
        signal_sum += signal.samples[i] * signal.samples[i];
        noise_sum += d * d;
    }
    if (noise_sum == 0.0)
        return std::numeric_limits<double>::infinity();
    if (signal_sum == 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(signal_sum / noise_sum);
}

} // namespace hbc::channel
