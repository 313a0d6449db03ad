#include "cli.hpp"

#include "hbc/channel.hpp"
#include "hbc/error.hpp"
#include "hbc/framing.hpp"
#include "hbc/modem.hpp"
#include "hbc/receiver.hpp"
#include "hbc/replay.hpp"
#include "hbc/wav.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace hbc::cli {

namespace {

std::uint8_t parse_payload(const std::string& text)
{
    std::string digits = text;
    if (digits.size() >= 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X'))
        digits.erase(0, 2);
    if (digits.empty() || digits.size() > 2 ||
        !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); }))
        throw CLI::ValidationError("--payload", "'" + text + "' is not a single hex byte");
    return static_cast<std::uint8_t>(std::stoul(digits, nullptr, 16));
}

std::string byte_hex(std::uint8_t value)
{
    std::ostringstream s;
    s << "0x" << std::uppercase << std::hex << std::setw(2) << std::setfill('0') << unsigned{value};
    return s.str();
}

struct ModemFlags {
    unsigned bit_rate = 100;
    double subcarrier_hz = 1000.0;
    double sample_rate = 44100.0;
    double amplitude = 0.8;

    void attach(CLI::App& cmd)
    {
        cmd.add_option("--bit-rate", bit_rate, "Bits per second")->capture_default_str();
        cmd.add_option("--subcarrier", subcarrier_hz, "Sub-carrier tone (Hz)")->capture_default_str();
        cmd.add_option("--sample-rate", sample_rate, "Output sample rate (Hz)")->capture_default_str();
        cmd.add_option("--amplitude", amplitude, "Tone amplitude, fraction of full scale")->capture_default_str();
    }

    modem::ModemConfig config() const
    {
        modem::ModemConfig cfg;
        cfg.bit_rate = bit_rate;
        cfg.subcarrier_hz = subcarrier_hz;
        cfg.sample_rate = sample_rate;
        cfg.amplitude = amplitude;
        return cfg;
    }
};

struct ReceiverFlags {
    bool no_fir = false;
    std::size_t window = 0;
    std::size_t hop = 0;
    double threshold = receiver::ReceiverConfig{}.relative_threshold;
    double radius_ms = 320.0;
    unsigned bit_rate = 100;

    void attach(CLI::App& cmd)
    {
        cmd.add_flag("--no-fir", no_fir, "Bypass the band-pass FIR");
        cmd.add_option("--window", window, "Envelope window in samples (default: 10 ms)");
        cmd.add_option("--hop", hop, "Envelope hop in samples (default: ~0.25 ms)");
        cmd.add_option("--threshold", threshold, "Relative threshold in (0, 1)")->capture_default_str();
        cmd.add_option("--radius-ms", radius_ms, "Threshold reference window radius (ms)")->capture_default_str();
        cmd.add_option("--bit-rate", bit_rate, "Bits per second")->capture_default_str();
    }

    receiver::ReceiverConfig config(double sample_rate) const
    {
        auto cfg = receiver::ReceiverConfig::for_rate(sample_rate);
        cfg.fir_enabled = !no_fir;
        if (window)
            cfg.window_len = window;
        if (hop)
            cfg.hop = hop;
        cfg.relative_threshold = threshold;
        cfg.threshold_radius_ms = radius_ms;
        cfg.bit_rate = bit_rate;
        return cfg;
    }
};

std::optional<double> parse_snr(const std::string& text)
{
    if (text == "noiseless" || text == "inf")
        return std::nullopt;
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size())
        throw CLI::ValidationError("--snr", "'" + text + "' is not a number or 'noiseless'");
    return value;
}

channel::Dropout parse_dropout(const std::string& text)
{
    const auto colon = text.find(':');
    try {
        if (colon != std::string::npos)
            return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError("--dropout", "'" + text + "' is not START_MS:DURATION_MS");
}

int cmd_encode(const std::string& payload_text, const std::string& out_path, const ModemFlags& modem_flags,
               std::ostream& out)
{
    const auto payload = parse_payload(payload_text);
    const auto signal = modem::modulate_frame(payload, modem_flags.config());
    wav::write_file(out_path, signal);
    out << "wrote " << out_path << ": payload " << byte_hex(payload) << ", " << signal.size() << " samples\n";
    return exit_ok;
}

int cmd_simulate(const std::string& payload_text, const std::string& out_path, const ModemFlags& modem_flags,
                 const channel::ChannelConfig& channel_cfg, std::ostream& out)
{
    const auto payload = parse_payload(payload_text);
    const auto clean = modem::modulate_frame(payload, modem_flags.config());
    wav::write_file(out_path, channel::apply_channel(clean, channel_cfg));
    out << "wrote " << out_path << ": payload " << byte_hex(payload) << ", " << clean.size() << " samples\n";
    return exit_ok;
}

int cmd_decode(const std::string& in_path, const ReceiverFlags& rx_flags, bool as_json, bool report_invalid,
               std::size_t chunk, std::ostream& out)
{
    const auto signal = wav::read_file(in_path);
    auto cfg = rx_flags.config(signal.sample_rate);
    cfg.report_invalid = report_invalid;

    std::vector<receiver::DecodedFrame> frames;
    if (chunk == 0) {
        frames = receiver::decode_buffer(signal, cfg);
    } else {
        std::vector<dsp::SampleBuffer> chunks;
        for (std::size_t at = 0; at < signal.size(); at += chunk) {
            const auto end = std::min(signal.size(), at + chunk);
            chunks.push_back({{signal.samples.begin() + static_cast<std::ptrdiff_t>(at),
                               signal.samples.begin() + static_cast<std::ptrdiff_t>(end)},
                              signal.sample_rate});
        }
        frames = receiver::decode_stream(chunks, cfg);
    }

    if (as_json) {
        auto report = nlohmann::json::array();
        for (const auto& f : frames)
            report.push_back({{"start_ms", f.start_ms}, {"payload", byte_hex(f.payload)}, {"crc_ok", f.crc_ok}});
        out << report.dump(2) << '\n';
    } else {
        for (const auto& f : frames)
            out << "start_ms=" << f.start_ms << " payload=" << byte_hex(f.payload)
                << " crc=" << (f.crc_ok ? "OK" : "BAD") << '\n';
    }
    const bool any_valid = std::any_of(frames.begin(), frames.end(), [](const auto& f) { return f.crc_ok; });
    return any_valid ? exit_ok : exit_no_frames;
}

int cmd_ber_sweep(const std::vector<std::string>& snr_list, std::size_t frames, std::uint64_t seed,
                  const std::string& csv_path, const ReceiverFlags& rx_flags, std::ostream& out)
{
    if (frames < 1)
        throw CLI::ValidationError("--frames", "must be at least 1");
    std::vector<std::optional<double>> points;
    for (const auto& s : snr_list)
        points.push_back(parse_snr(s));

    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> payloads(frames);
    for (auto& p : payloads)
        p = static_cast<std::uint8_t>(rng() & 0xFF);

    const modem::ModemConfig modem_cfg;
    const auto rx_cfg = rx_flags.config(modem_cfg.sample_rate);

    std::ostringstream csv;
    csv << "snr_db,frame_success_rate,bit_error_rate\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        channel::ChannelConfig ch;
        ch.snr_db = points[i];
        ch.seed = seed;
        const auto result = receiver::ber_trial(payloads, ch, modem_cfg, rx_cfg);
        csv << snr_list[i] << ',' << std::fixed << std::setprecision(6) << result.success_rate() << ','
            << result.bit_error_rate() << '\n';
    }

    if (csv_path.empty() || csv_path == "-") {
        out << csv.str();
    } else {
        std::ofstream file(csv_path, std::ios::trunc);
        if (!file)
            throw Error(ErrorCode::Io, "cannot open " + csv_path + " for writing");
        file << csv.str();
        out << "wrote " << csv_path << '\n';
    }
    return exit_ok;
}

int cmd_replay(const std::string& trace_path, const std::string& registry_path, bool as_json, std::ostream& out)
{
    std::ifstream registry_file(registry_path);
    if (!registry_file)
        throw Error(ErrorCode::Io, "cannot open " + registry_path);
    const auto registry = replay::load_registry(registry_file);

    std::ifstream trace_file(trace_path);
    if (!trace_file)
        throw Error(ErrorCode::Io, "cannot open " + trace_path);
    const auto records = replay::parse_trace(trace_file, registry);
    const auto result = replay::run(records, registry);

    if (as_json) {
        auto log = nlohmann::json::array();
        for (const auto& entry : result.log)
            log.push_back(replay::to_json(entry, registry));
        out << log.dump(2) << '\n';
    } else {
        for (const auto& entry : result.log)
            out << replay::format_text(entry, registry) << '\n';
        out << "unarmed_frames=" << result.unarmed_frames << '\n';
    }
    return exit_ok;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Body-channel OOK modem and beacon proximity toolkit", "hbc"};
    app.require_subcommand(1);

    std::string payload;
    std::string out_path;
    ModemFlags encode_modem;
    auto* encode = app.add_subcommand("encode", "Write one frame as a 16-bit mono WAV");
    encode->add_option("--payload", payload, "Payload byte, hex (e.g. 0x5A)")->required();
    encode->add_option("out", out_path, "Output WAV path")->required();
    encode_modem.attach(*encode);

    ModemFlags sim_modem;
    channel::ChannelConfig sim_channel;
    std::string sim_snr = "noiseless";
    std::vector<std::string> sim_dropouts;
    auto* simulate = app.add_subcommand("simulate", "Encode one frame and pass it through the channel model");
    simulate->add_option("--payload", payload, "Payload byte, hex")->required();
    simulate->add_option("out", out_path, "Output WAV path")->required();
    simulate->add_option("--snr", sim_snr, "SNR in dB over key-on samples, or 'noiseless'")->capture_default_str();
    simulate->add_option("--gain-db", sim_channel.gain_db, "Channel gain (dB)")->capture_default_str();
    simulate->add_option("--dc", sim_channel.dc_offset, "DC offset, fraction of full scale")->capture_default_str();
    simulate->add_option("--dropout", sim_dropouts, "Zeroed interval START_MS:DURATION_MS (repeatable)");
    simulate->add_option("--seed", sim_channel.seed, "Noise seed")->capture_default_str();
    sim_modem.attach(*simulate);

    std::string in_path;
    ReceiverFlags rx_flags;
    bool decode_json = false;
    bool report_invalid = false;
    std::size_t chunk = 0;
    auto* decode = app.add_subcommand("decode", "Decode frames from a 16-bit mono WAV");
    decode->add_option("in", in_path, "Input WAV path")->required();
    decode->add_flag("--json", decode_json, "Emit a JSON array");
    decode->add_flag("--report-invalid", report_invalid, "Also list frames that fail the CRC");
    decode->add_option("--chunk", chunk, "Decode as a stream of N-sample chunks");
    rx_flags.attach(*decode);

    std::vector<std::string> snr_list;
    std::size_t frames = 200;
    std::uint64_t seed = 1;
    std::string csv_path;
    ReceiverFlags sweep_rx;
    auto* sweep = app.add_subcommand("ber-sweep", "Seeded Monte-Carlo frame success / BER over SNR points");
    sweep->add_option("--snr", snr_list, "Comma-separated SNR points in dB, or 'noiseless'")
        ->required()
        ->delimiter(',');
    sweep->add_option("--frames", frames, "Frames per point")->capture_default_str();
    sweep->add_option("--seed", seed, "Seed")->capture_default_str();
    sweep->add_option("--csv", csv_path, "Write CSV here instead of stdout");
    sweep_rx.attach(*sweep);

    std::string trace_path;
    std::string registry_path;
    bool replay_json = false;
    auto* replay_cmd = app.add_subcommand("replay", "Replay a beacon/HBC trace through monitoring and fusion");
    replay_cmd->add_option("trace", trace_path, "Trace file (JSON lines)")->required();
    replay_cmd->add_option("registry", registry_path, "Region/artifact registry (JSON)")->required();
    replay_cmd->add_flag("--json", replay_json, "Emit a JSON array");

    try {
        app.parse(argc, argv);
        if (*encode)
            return cmd_encode(payload, out_path, encode_modem, out);
        if (*simulate) {
            sim_channel.snr_db = parse_snr(sim_snr);
            for (const auto& d : sim_dropouts)
                sim_channel.dropouts.push_back(parse_dropout(d));
            return cmd_simulate(payload, out_path, sim_modem, sim_channel, out);
        }
        if (*decode)
            return cmd_decode(in_path, rx_flags, decode_json, report_invalid, chunk, out);
        if (*sweep)
            return cmd_ber_sweep(snr_list, frames, seed, csv_path, sweep_rx, out);
        if (*replay_cmd)
            return cmd_replay(trace_path, registry_path, replay_json, out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_failure;
    } catch (const replay::TraceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    } catch (const Error& e) {
        err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
        return exit_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_failure;
}

} // namespace hbc::cli
