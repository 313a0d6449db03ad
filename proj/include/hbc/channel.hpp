#pragma once

#include "hbc/dsp.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace hbc::channel {

struct Dropout {
    double start_ms = 0.0;
    double duration_ms = 0.0;
};

struct ChannelConfig {
    double gain_db = 0.0;
    std::optional<double> snr_db;  // nullopt = noiseless
    double dc_offset = 0.0;
    std::vector<Dropout> dropouts;
    std::uint64_t seed = 1;
    bool clamp = true;  // ADC saturation at [-1, 1]
};

/// clamp(gain*x + noise + dc) with dropout intervals zeroed. Noise power is
/// set against the mean power of the nonzero samples of gain*x.
dsp::SampleBuffer apply_channel(const dsp::SampleBuffer& input, const ChannelConfig& cfg);

/// 10*log10(P(signal) / P(noisy - signal)); +inf for identical buffers,
/// -inf for zero signal with nonzero difference.
double measure_snr(const dsp::SampleBuffer& signal, const dsp::SampleBuffer& noisy);

double mean_power(std::span<const double> samples);

/// Seeded N(0,1) stream, portable across standard libraries.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed);
    double next();

private:
    std::mt19937_64 engine_;
    double uniform();
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// splitmix64 finalizer, used to derive per-trial seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

} // namespace hbc::channel
