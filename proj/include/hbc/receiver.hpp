#pragma once

// OOK receive chain: optional FIR -> rectify -> envelope -> windowed binarize
// -> per-millisecond decimation -> bit slicing at every ms phase -> sync
// search -> CRC check.

#include "hbc/channel.hpp"
#include "hbc/dsp.hpp"
#include "hbc/framing.hpp"
#include "hbc/modem.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

namespace hbc::receiver {

struct ReceiverConfig {
    double sample_rate = 44100.0;
    bool fir_enabled = true;
    dsp::BandSpec fir{};
    std::size_t window_len = 441;  // k
    std::size_t hop = 11;
    double relative_threshold = 0.6;
    double threshold_radius_ms = 320.0;
    dsp::ProbeOffsets probe_offsets = dsp::default_probe_offsets;
    unsigned bit_rate = 100;
    bool report_invalid = false;
    std::optional<double> record_seconds;  // n; capture-length hint only

    /// Window/hop scaled for another input rate (10 ms window, ~0.25 ms hop).
    static ReceiverConfig for_rate(double sample_rate);
};

/// Throws hbc::Error with the dsp error code of the violated parameter.
void validate(const ReceiverConfig& cfg);

struct DecodedFrame {
    std::uint8_t payload = 0;
    std::int64_t start_ms = 0;
    bool crc_ok = false;

    friend bool operator==(const DecodedFrame&, const DecodedFrame&) = default;
};

/// Front half of the chain: the 1000 Hz binary symbol stream.
dsp::SampleBuffer detect_symbols(const dsp::SampleBuffer& input, const ReceiverConfig& cfg);

/// Back half of the chain over a 1000 Hz 0/1 symbol stream.
std::vector<DecodedFrame> decode_symbols(std::span<const std::uint8_t> symbols,
                                         const ReceiverConfig& cfg);

std::vector<DecodedFrame> decode_buffer(const dsp::SampleBuffer& input, const ReceiverConfig& cfg);

/// Incremental frame search over 1000 Hz symbols. Candidates from every
/// slicing phase are resolved in start order: the earliest CRC-valid frame
/// wins and its 32-bit span is skipped.
class FrameSearcher {
public:
    explicit FrameSearcher(const ReceiverConfig& cfg);

    /// Appends symbols and returns frames that are now final.
    std::vector<DecodedFrame> push(std::span<const std::uint8_t> symbols);
    /// End of input: resolves everything still pending.
    std::vector<DecodedFrame> finish();

private:
    void scan_candidates();
    std::vector<DecodedFrame> resolve(bool final);
    bool has_valid_in(std::size_t from, std::size_t to) const;

    std::size_t group_;  // symbols per bit
    std::int64_t start_offset_ms_;
    bool report_invalid_;
    unsigned bit_rate_;

    std::vector<std::uint8_t> symbols_;
    std::size_t symbols_base_ = 0;  // absolute ms of symbols_[0]
    std::size_t symbol_count_ = 0;
    std::size_t next_candidate_ = 0;  // next start ms to examine
    std::map<std::size_t, framing::FrameDecode> candidates_;  // by start ms, sync matched
    std::size_t skip_until_ = 0;
};

/// Chunked decoding session. Equivalent to decode_buffer on the concatenated
/// chunks; frames are emitted as soon as they are final. Single owner.
class StreamDecoder {
public:
    explicit StreamDecoder(const ReceiverConfig& cfg);

    std::vector<DecodedFrame> push(const dsp::SampleBuffer& chunk);
    std::vector<DecodedFrame> finish();

private:
    std::vector<DecodedFrame> advance(bool final);

    ReceiverConfig cfg_;
    std::optional<dsp::FirTaps> taps_;
    double envelope_rate_;
    std::size_t radius_;
    FrameSearcher searcher_;
    bool finished_ = false;

    std::vector<double> fir_history_;  // last taps-1 raw inputs
    std::size_t input_count_ = 0;

    // Each stage keeps a window of its output; *_base_ is the absolute index
    // of element 0 and *_count_ the total produced so far.
    std::vector<double> rectified_;
    std::size_t rectified_base_ = 0;

    std::vector<double> envelope_;
    std::size_t envelope_base_ = 0;
    std::size_t envelope_count_ = 0;
    std::deque<std::size_t> max_queue_;  // envelope indices, decreasing values
    std::size_t max_pushed_ = 0;

    std::vector<std::uint8_t> binary_;
    std::size_t binary_base_ = 0;
    std::size_t binary_count_ = 0;
    std::size_t next_ms_ = 0;
};

std::vector<DecodedFrame> decode_stream(const std::vector<dsp::SampleBuffer>& chunks,
                                        const ReceiverConfig& cfg);

struct TrialResult {
    std::size_t total_frames = 0;
    std::size_t frame_successes = 0;
    std::size_t frames_detected = 0;  // any frame reported, valid or not
    std::size_t frames_lost = 0;
    std::size_t bit_errors = 0;       // payload bits, over detected frames

    double success_rate() const;
    double bit_error_rate() const;
};

/// Encode, modulate (100 ms silence each side), apply the channel with a
/// per-frame seed and decode, for every payload.
TrialResult ber_trial(std::span<const std::uint8_t> payloads, const channel::ChannelConfig& channel,
                      const modem::ModemConfig& modem, const ReceiverConfig& rx);

} // namespace hbc::receiver
