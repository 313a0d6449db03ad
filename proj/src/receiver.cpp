#include "hbc/receiver.hpp"

#include "hbc/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace hbc::receiver {

namespace {

std::size_t threshold_radius(const ReceiverConfig& cfg)
{
    const double envelope_rate = cfg.sample_rate / static_cast<double>(cfg.hop);
    return static_cast<std::size_t>(std::llround(cfg.threshold_radius_ms * envelope_rate / 1000.0));
}

// Drops the first `n` elements once enough have accumulated to be worth a move.
template <typename T>
void drop_front(std::vector<T>& v, std::size_t& base, std::size_t keep_from)
{
    if (keep_from <= base)
        return;
    const std::size_t n = std::min(keep_from - base, v.size());
    if (n < 4096 && n < v.size() / 2)
        return;
    v.erase(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
    base += n;
}

const ReceiverConfig& validated(const ReceiverConfig& cfg)
{
    validate(cfg);
    return cfg;
}

} // namespace

ReceiverConfig ReceiverConfig::for_rate(double sample_rate)
{
    ReceiverConfig cfg;
    cfg.sample_rate = sample_rate;
    cfg.window_len = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sample_rate / 100.0)));
    cfg.hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sample_rate / 4000.0)));
    return cfg;
}

void validate(const ReceiverConfig& cfg)
{
    if (!(cfg.sample_rate > 0.0))
        throw Error(ErrorCode::InvalidConfig, "sample rate must be positive");
    if (cfg.fir_enabled)
        dsp::design_bandpass_fir(cfg.fir, cfg.sample_rate);
    if (cfg.window_len < 1 || cfg.hop < 1 || cfg.hop > cfg.window_len) {
        throw Error(ErrorCode::BadWindow, "need 1 <= hop <= window (hop=" + std::to_string(cfg.hop) +
                                              ", window=" + std::to_string(cfg.window_len) + ")");
    }
    const double envelope_rate = cfg.sample_rate / static_cast<double>(cfg.hop);
    if (envelope_rate < 3000.0) {
        throw Error(ErrorCode::RateTooLow, "envelope rate " + std::to_string(envelope_rate) +
                                               " Hz is below the 3000 Hz decimation minimum");
    }
    const auto& p = cfg.probe_offsets;
    if (!(p[0] >= 0.0 && p[0] < p[1] && p[1] < p[2] && p[2] < 1.0))
        throw Error(ErrorCode::InvalidConfig, "probe offsets must be increasing within [0, 1)");
    if (!(cfg.relative_threshold > 0.0 && cfg.relative_threshold < 1.0))
        throw Error(ErrorCode::InvalidConfig, "relative threshold must be in (0, 1)");
    if (!(cfg.threshold_radius_ms > 0.0))
        throw Error(ErrorCode::InvalidConfig, "threshold radius must be positive");
    dsp::symbols_per_bit(cfg.bit_rate);
}

dsp::SampleBuffer detect_symbols(const dsp::SampleBuffer& input, const ReceiverConfig& cfg)
{
    validate(cfg);
    if (input.sample_rate != cfg.sample_rate) {
        throw Error(ErrorCode::InvalidConfig, "input is " + std::to_string(input.sample_rate) +
                                                  " Hz, receiver configured for " +
                                                  std::to_string(cfg.sample_rate) + " Hz");
    }
    if (input.size() < cfg.window_len)
        return {{}, 1000.0};

    dsp::SampleBuffer x = cfg.fir_enabled
                              ? dsp::fir_filter(input, dsp::design_bandpass_fir(cfg.fir, cfg.sample_rate))
                              : input;
    x = dsp::rectify(x);
    x = dsp::envelope(x, cfg.window_len, cfg.hop);
    x = dsp::binarize_windowed(x, cfg.relative_threshold, threshold_radius(cfg));
    return dsp::decimate_per_ms(x, cfg.probe_offsets);
}

std::vector<DecodedFrame> decode_symbols(std::span<const std::uint8_t> symbols,
                                         const ReceiverConfig& cfg)
{
    FrameSearcher searcher(cfg);
    auto frames = searcher.push(symbols);
    auto rest = searcher.finish();
    frames.insert(frames.end(), rest.begin(), rest.end());
    return frames;
}

std::vector<DecodedFrame> decode_buffer(const dsp::SampleBuffer& input, const ReceiverConfig& cfg)
{
    const auto symbols = detect_symbols(input, cfg);
    std::vector<std::uint8_t> bits(symbols.size());
    std::transform(symbols.samples.begin(), symbols.samples.end(), bits.begin(),
                   [](double s) { return static_cast<std::uint8_t>(s != 0.0 ? 1 : 0); });
    return decode_symbols(bits, cfg);
}

// ---------------------------------------------------------------------------
// FrameSearcher

FrameSearcher::FrameSearcher(const ReceiverConfig& cfg)
    : group_(dsp::symbols_per_bit(cfg.bit_rate)),
      // Envelope samples are stamped with their window start, so a bit's
      // energy peaks half a window before the bit itself starts.
      start_offset_ms_(std::llround(static_cast<double>(cfg.window_len) * 1000.0 / cfg.sample_rate / 2.0)),
      report_invalid_(cfg.report_invalid),
      bit_rate_(cfg.bit_rate)
{
}

std::vector<DecodedFrame> FrameSearcher::push(std::span<const std::uint8_t> symbols)
{
    symbols_.insert(symbols_.end(), symbols.begin(), symbols.end());
    symbol_count_ += symbols.size();
    scan_candidates();
    auto frames = resolve(false);
    drop_front(symbols_, symbols_base_, next_candidate_);
    return frames;
}

std::vector<DecodedFrame> FrameSearcher::finish()
{
    scan_candidates();
    return resolve(true);
}

void FrameSearcher::scan_candidates()
{
    const std::size_t span = framing::frame_bits * group_;
    for (; next_candidate_ + span <= symbol_count_; ++next_candidate_) {
        const std::span<const std::uint8_t> window{symbols_.data() + (next_candidate_ - symbols_base_), span};
        // Cheap reject on the first preamble bit before slicing the whole frame.
        if (dsp::slice_bits(window.first(group_), bit_rate_)[0] != 1)
            continue;
        const auto bits = dsp::slice_bits(window, bit_rate_);
        // Exactly one frame of bits, so a sync hit can only be at offset 0.
        if (framing::find_sync(bits).empty())
            continue;
        candidates_.emplace(next_candidate_, framing::decode_frame(bits, 0));
    }
}

bool FrameSearcher::has_valid_in(std::size_t from, std::size_t to) const
{
    for (auto it = candidates_.lower_bound(from); it != candidates_.end() && it->first < to; ++it) {
        if (it->second.ok())
            return true;
    }
    return false;
}

std::vector<DecodedFrame> FrameSearcher::resolve(bool final)
{
    std::vector<DecodedFrame> out;
    const std::size_t frame_span = framing::frame_bits * group_;
    // Deciding on a candidate needs every candidate starting within one frame
    // (plus one bit for the phase cluster) after it.
    const std::size_t horizon = 2 * frame_span + 2 * group_;

    while (!candidates_.empty()) {
        const auto it = candidates_.begin();
        const std::size_t start = it->first;
        if (!final && start + horizon > symbol_count_)
            break;
        const auto decode = it->second;

        if (start < skip_until_) {
            candidates_.erase(it);
            continue;
        }

        if (decode.ok()) {
            // Adjacent phases usually decode the same frame; report the middle.
            std::size_t last = start;
            for (auto next = std::next(it); next != candidates_.end() && next->first == last + 1 &&
                                            next->first < start + group_ && next->second.ok() &&
                                            next->second.frame.payload == decode.frame.payload;
                 ++next)
                last = next->first;
            const auto mid = static_cast<std::int64_t>((start + last) / 2);
            out.push_back({decode.frame.payload, mid + start_offset_ms_, true});
            skip_until_ = start + frame_span;
        } else if (!has_valid_in(start + 1, start + frame_span)) {
            if (report_invalid_) {
                out.push_back({decode.frame.payload, static_cast<std::int64_t>(start) + start_offset_ms_,
                               false});
                skip_until_ = start + frame_span;
            }
        }
        candidates_.erase(it);
    }
    return out;
}

// ---------------------------------------------------------------------------
// StreamDecoder

StreamDecoder::StreamDecoder(const ReceiverConfig& cfg)
    : cfg_(validated(cfg)),
      envelope_rate_(cfg.sample_rate / static_cast<double>(std::max<std::size_t>(cfg.hop, 1))),
      radius_(0),
      searcher_(cfg)
{
    if (cfg_.fir_enabled)
        taps_ = dsp::design_bandpass_fir(cfg_.fir, cfg_.sample_rate);
    radius_ = threshold_radius(cfg_);
}

std::vector<DecodedFrame> StreamDecoder::push(const dsp::SampleBuffer& chunk)
{
    if (finished_)
        throw Error(ErrorCode::InvalidConfig, "stream already finished");
    if (chunk.sample_rate != cfg_.sample_rate) {
        throw Error(ErrorCode::InvalidConfig, "chunk is " + std::to_string(chunk.sample_rate) +
                                                  " Hz, stream is " + std::to_string(cfg_.sample_rate) +
                                                  " Hz");
    }

    if (taps_) {
        const auto& h = taps_->coefficients;
        std::vector<double> work = fir_history_;
        work.insert(work.end(), chunk.samples.begin(), chunk.samples.end());
        const std::size_t work_base = input_count_ - fir_history_.size();
        for (std::size_t k = 0; k < chunk.size(); ++k) {
            const std::size_t n = input_count_ + k;
            double acc = 0.0;
            const std::size_t reach = std::min(h.size(), n + 1);
            for (std::size_t i = 0; i < reach; ++i)
                acc += h[i] * work[n - i - work_base];
            rectified_.push_back(std::abs(acc));
        }
        const std::size_t keep = std::min(work.size(), h.size() - 1);
        fir_history_.assign(work.end() - static_cast<std::ptrdiff_t>(keep), work.end());
    } else {
        for (double s : chunk.samples)
            rectified_.push_back(std::abs(s));
    }
    input_count_ += chunk.size();
    return advance(false);
}

std::vector<DecodedFrame> StreamDecoder::finish()
{
    if (finished_)
        return {};
    auto frames = advance(true);
    finished_ = true;
    return frames;
}

std::vector<DecodedFrame> StreamDecoder::advance(bool final)
{
    const std::size_t k = cfg_.window_len;
    const std::size_t hop = cfg_.hop;

    // envelope
    for (; envelope_count_ * hop + k <= input_count_; ++envelope_count_) {
        const std::span<const double> window{rectified_.data() + (envelope_count_ * hop - rectified_base_), k};
        envelope_.push_back(dsp::window_mean(window));
    }
    drop_front(rectified_, rectified_base_, envelope_count_ * hop);

    // windowed binarize; needs envelope up to i + radius unless the input ended
    for (; binary_count_ < envelope_count_; ++binary_count_) {
        const std::size_t i = binary_count_;
        if (!final && i + radius_ >= envelope_count_)
            break;
        const std::size_t right = std::min(envelope_count_ - 1, i + radius_);
        for (; max_pushed_ <= right; ++max_pushed_) {
            const double v = envelope_[max_pushed_ - envelope_base_];
            while (!max_queue_.empty() && envelope_[max_queue_.back() - envelope_base_] <= v)
                max_queue_.pop_back();
            max_queue_.push_back(max_pushed_);
        }
        while (max_queue_.front() + radius_ < i)
            max_queue_.pop_front();
        const double peak = envelope_[max_queue_.front() - envelope_base_];
        const double value = envelope_[i - envelope_base_];
        binary_.push_back(peak > 0.0 && value >= cfg_.relative_threshold * peak ? 1 : 0);
    }
    const std::size_t needed_env = binary_count_ > radius_ ? binary_count_ - radius_ : 0;
    drop_front(envelope_, envelope_base_, std::min(needed_env, max_queue_.empty() ? needed_env : max_queue_.front()));

    // per-millisecond decimation
    std::vector<std::uint8_t> symbols;
    const auto& probes = cfg_.probe_offsets;
    for (; dsp::probe_index(next_ms_, probes[2], envelope_rate_) < binary_count_; ++next_ms_) {
        std::uint8_t symbol = 0;
        for (double offset : probes)
            symbol |= binary_[dsp::probe_index(next_ms_, offset, envelope_rate_) - binary_base_];
        symbols.push_back(symbol);
    }
    drop_front(binary_, binary_base_, dsp::probe_index(next_ms_, probes[0], envelope_rate_));

    auto frames = searcher_.push(symbols);
    if (final) {
        auto rest = searcher_.finish();
        frames.insert(frames.end(), rest.begin(), rest.end());
    }
    return frames;
}

std::vector<DecodedFrame> decode_stream(const std::vector<dsp::SampleBuffer>& chunks,
                                        const ReceiverConfig& cfg)
{
    StreamDecoder session(cfg);
    std::vector<DecodedFrame> frames;
    for (const auto& chunk : chunks) {
        auto got = session.push(chunk);
        frames.insert(frames.end(), got.begin(), got.end());
    }
    auto rest = session.finish();
    frames.insert(frames.end(), rest.begin(), rest.end());
    return frames;
}

// ---------------------------------------------------------------------------
// Monte-Carlo harness

double TrialResult::success_rate() const
{
    return total_frames ? static_cast<double>(frame_successes) / static_cast<double>(total_frames) : 0.0;
}

double TrialResult::bit_error_rate() const
{
    return frames_detected ? static_cast<double>(bit_errors) / (8.0 * static_cast<double>(frames_detected))
                           : 0.0;
}

TrialResult ber_trial(std::span<const std::uint8_t> payloads, const channel::ChannelConfig& channel,
                      const modem::ModemConfig& modem, const ReceiverConfig& rx)
{
    ReceiverConfig rx_cfg = rx;
    rx_cfg.report_invalid = true;

    TrialResult result;
    result.total_frames = payloads.size();
    for (std::size_t i = 0; i < payloads.size(); ++i) {
        const auto sent = payloads[i];
        auto ch = channel;
        ch.seed = channel::mix_seed(channel.seed, i);
        const auto received = channel::apply_channel(modem::modulate_frame(sent, modem), ch);
        const auto frames = decode_buffer(received, rx_cfg);
        if (frames.empty()) {
            ++result.frames_lost;
            continue;
        }
        ++result.frames_detected;
        const auto valid = std::find_if(frames.begin(), frames.end(), [](const DecodedFrame& f) { return f.crc_ok; });
        const auto& chosen = valid != frames.end() ? *valid : frames.front();
        result.bit_errors += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(chosen.payload ^ sent)));
        if (chosen.crc_ok && chosen.payload == sent)
            ++result.frame_successes;
    }
    return result;
}

} // namespace hbc::receiver
