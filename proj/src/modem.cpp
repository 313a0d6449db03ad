#include "hbc/modem.hpp"

#include "hbc/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hbc::modem {

void validate(const ModemConfig& cfg)
{
    if (!(cfg.sample_rate > 0.0) || cfg.bit_rate == 0)
        throw Error(ErrorCode::InvalidConfig, "sample rate and bit rate must be positive");
    samples_per_bit(cfg);
    if (!(cfg.subcarrier_hz > 0.0) || !(cfg.subcarrier_hz < cfg.sample_rate / 2.0))
        throw Error(ErrorCode::InvalidConfig, "sub-carrier must lie in (0, Nyquist)");
    const double cycles_per_bit = cfg.subcarrier_hz / cfg.bit_rate;
    if (cycles_per_bit != std::floor(cycles_per_bit))
        throw Error(ErrorCode::InvalidConfig, "bit rate must divide the sub-carrier frequency");
    if (!(cfg.amplitude > 0.0 && cfg.amplitude <= 1.0))
        throw Error(ErrorCode::InvalidConfig, "amplitude must be in (0, 1]");
}

std::size_t samples_per_bit(const ModemConfig& cfg)
{
    const double spb = cfg.sample_rate / cfg.bit_rate;
    if (cfg.bit_rate == 0 || spb != std::floor(spb) || spb < 1.0) {
        throw Error(ErrorCode::NonIntegralBitPeriod,
                    std::to_string(cfg.sample_rate) + " Hz / " + std::to_string(cfg.bit_rate) +
                        " bps is not a whole number of samples");
    }
    return static_cast<std::size_t>(spb);
}

dsp::SampleBuffer modulate(const framing::BitStream& bits, const ModemConfig& cfg)
{
    validate(cfg);
    if (bits.empty())
        throw Error(ErrorCode::InvalidConfig, "nothing to modulate");

    const std::size_t spb = samples_per_bit(cfg);
    std::vector<double> tone(spb);
    const double w = 2.0 * std::numbers::pi * cfg.subcarrier_hz / cfg.sample_rate;
    for (std::size_t n = 0; n < spb; ++n)
        tone[n] = cfg.amplitude * std::sin(w * static_cast<double>(n));

    dsp::SampleBuffer out{{}, cfg.sample_rate};
    out.samples.reserve(bits.size() * spb);
    for (auto bit : bits) {
        if (bit)
            out.samples.insert(out.samples.end(), tone.begin(), tone.end());
        else
            out.samples.insert(out.samples.end(), spb, 0.0);
    }
    return out;
}

dsp::SampleBuffer silence(double seconds, const ModemConfig& cfg)
{
    const auto n = static_cast<std::size_t>(std::llround(seconds * cfg.sample_rate));
    return {std::vector<double>(n, 0.0), cfg.sample_rate};
}

void append(dsp::SampleBuffer& dst, const dsp::SampleBuffer& src)
{
    dst.samples.insert(dst.samples.end(), src.samples.begin(), src.samples.end());
}

dsp::SampleBuffer modulate_frame(std::uint8_t payload, const ModemConfig& cfg, double pad_s)
{
    auto out = silence(pad_s, cfg);
    append(out, modulate(framing::encode_frame(payload), cfg));
    append(out, silence(pad_s, cfg));
    return out;
}

} // namespace hbc::modem
