#pragma once

#include "hbc/dsp.hpp"
#include "hbc/framing.hpp"

#include <cstddef>

namespace hbc::modem {

struct ModemConfig {
    unsigned bit_rate = 100;
    double subcarrier_hz = 1000.0;
    double sample_rate = 44100.0;
    double amplitude = 0.8;
    // Informational only; the RF carrier is never synthesized.
    double rf_carrier_hz = 125000.0;
};

/// Throws InvalidConfig / NonIntegralBitPeriod.
void validate(const ModemConfig& cfg);

std::size_t samples_per_bit(const ModemConfig& cfg);

/// OOK on the sub-carrier. The tone phase restarts at every bit boundary,
/// which is continuous because each bit holds a whole number of cycles.
dsp::SampleBuffer modulate(const framing::BitStream& bits, const ModemConfig& cfg);

/// `seconds` of zero samples at the modem rate.
dsp::SampleBuffer silence(double seconds, const ModemConfig& cfg);

/// Frame waveform with `pad_s` of silence on each side.
dsp::SampleBuffer modulate_frame(std::uint8_t payload, const ModemConfig& cfg, double pad_s = 0.1);

void append(dsp::SampleBuffer& dst, const dsp::SampleBuffer& src);

} // namespace hbc::modem
