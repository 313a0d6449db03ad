#include "hbc/beacon.hpp"

#include "hbc/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace hbc::beacon {

const char* to_string(Zone zone)
{
    switch (zone) {
    case Zone::Immediate: return "Immediate";
    case Zone::Near: return "Near";
    case Zone::Far: return "Far";
    case Zone::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::string to_hex(std::span<const std::uint8_t> bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0F]);
    }
    return out;
}

std::vector<std::uint8_t> parse_hex(std::string_view text)
{
    if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
        text.remove_prefix(2);
    if (text.size() % 2 != 0)
        throw Error(ErrorCode::Format, "odd number of hex digits");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9')
            return c - '0';
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        throw Error(ErrorCode::Format, std::string("bad hex digit '") + c + "'");
    };
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < text.size(); i += 2)
        out.push_back(static_cast<std::uint8_t>(nibble(text[i]) << 4 | nibble(text[i + 1])));
    return out;
}

std::string BeaconId::to_string() const
{
    return to_hex(ns) + ":" + to_hex(instance);
}

BeaconId parse_eddystone_uid(std::span<const std::uint8_t> frame)
{
    if (!frame.empty() && frame[0] != eddystone_uid_type)
        throw Error(ErrorCode::NotUidFrame, "Eddystone frame type " + to_hex(frame.first(1)) + " is not UID");
    if (frame.size() < 18) {
        throw Error(ErrorCode::Truncated,
                    "Eddystone-UID needs 18 bytes, got " + std::to_string(frame.size()));
    }
    BeaconId id;
    id.tx_power_1m = static_cast<std::int8_t>(frame[1]);
    std::copy_n(frame.begin() + 2, id.ns.size(), id.ns.begin());
    std::copy_n(frame.begin() + 12, id.instance.size(), id.instance.begin());
    return id;
}

double RssiSmoother::update(double rssi, double alpha)
{
    value = value ? alpha * rssi + (1.0 - alpha) * *value : rssi;
    return *value;
}

double smooth_rssi(RssiSmoother& state, const BeaconReading& reading, double alpha)
{
    return state.update(reading.rssi, alpha);
}

double estimate_distance(double rssi, double tx_power_1m, double path_loss_exponent)
{
    return std::pow(10.0, (tx_power_1m - rssi) / (10.0 * path_loss_exponent));
}

Zone classify_zone(std::optional<double> distance_m, const ZoneBounds& bounds)
{
    if (!distance_m || !(*distance_m > 0.0) || std::isnan(*distance_m))
        return Zone::Unknown;
    if (*distance_m < bounds.immediate_below_m)
        return Zone::Immediate;
    if (*distance_m < bounds.near_below_m)
        return Zone::Near;
    return Zone::Far;
}

// ---------------------------------------------------------------------------
// RegionMonitor

void RegionMonitor::advance_clock(std::int64_t timestamp_ms)
{
    if (now_ms_ && timestamp_ms < *now_ms_) {
        throw Error(ErrorCode::NonMonotonicTime, "time went backwards: " + std::to_string(timestamp_ms) +
                                                     " ms after " + std::to_string(*now_ms_) + " ms");
    }
    now_ms_ = timestamp_ms;
}

std::vector<RegionEvent> RegionMonitor::step(const BeaconReading& reading)
{
    if (!(reading.rssi >= -120.0 && reading.rssi <= 0.0))
        throw Error(ErrorCode::InvalidReading, "rssi " + std::to_string(reading.rssi) + " dBm out of range");
    advance_clock(reading.timestamp_ms);

    auto [it, inserted] = tracks_.try_emplace(reading.beacon.key());
    Track& track = it->second;
    if (inserted)
        track.beacon = reading.beacon;
    else if (reading.timestamp_ms - track.last_seen_ms >= cfg_.exit_after_ms)
        track.consecutive = 0;
    track.last_seen_ms = reading.timestamp_ms;
    ++track.consecutive;

    std::vector<RegionEvent> events;
    if (!track.entered && track.consecutive >= cfg_.enter_after_readings) {
        track.entered = true;
        events.push_back({RegionEventKind::Enter, track.beacon, reading.timestamp_ms});
    }
    return events;
}

std::vector<RegionEvent> RegionMonitor::step(const Tick& tick)
{
    advance_clock(tick.timestamp_ms);
    std::vector<RegionEvent> events;
    for (auto& [key, track] : tracks_) {
        if (track.entered && tick.timestamp_ms - track.last_seen_ms >= cfg_.exit_after_ms) {
            track.entered = false;
            track.consecutive = 0;
            events.push_back({RegionEventKind::Exit, track.beacon, tick.timestamp_ms});
        }
    }
    return events;
}

bool RegionMonitor::entered(const BeaconId& beacon) const
{
    const auto it = tracks_.find(beacon.key());
    return it != tracks_.end() && it->second.entered;
}

// ---------------------------------------------------------------------------
// Ranger

ZoneUpdate Ranger::step(const BeaconReading& reading)
{
    const double smoothed = smooth_rssi(smoothers_[reading.beacon.key()], reading, cfg_.alpha);
    const double distance = estimate_distance(smoothed, reading.beacon.tx_power_1m, cfg_.path_loss_exponent);
    return {reading.beacon, classify_zone(distance, cfg_.bounds), distance, reading.timestamp_ms};
}

// ---------------------------------------------------------------------------
// Fusion

void ArtifactRegistry::add(const BeaconId& region, std::uint8_t artifact_id, std::string descriptor)
{
    entries_[{region.key(), artifact_id}] = std::move(descriptor);
}

const std::string* ArtifactRegistry::find(const BeaconId& region, std::uint8_t artifact_id) const
{
    const auto it = entries_.find({region.key(), artifact_id});
    return it == entries_.end() ? nullptr : &it->second;
}

const FusionSession::RegionState* FusionSession::current_region() const
{
    const RegionState* best = nullptr;
    for (const auto& [key, state] : regions_) {
        if (!state.entered || (state.zone != Zone::Immediate && state.zone != Zone::Near))
            continue;
        if (!best || state.distance_m < best->distance_m)
            best = &state;
    }
    return best;
}

bool FusionSession::armed() const
{
    return current_region() != nullptr;
}

std::optional<LocalizationFix> FusionSession::step(const FusionInput& input)
{
    if (const auto* update = std::get_if<ZoneUpdate>(&input)) {
        auto& state = regions_[update->beacon.key()];
        state.beacon = update->beacon;
        state.zone = update->zone;
        state.distance_m = update->distance_m;
        return std::nullopt;
    }
    if (const auto* event = std::get_if<RegionEvent>(&input)) {
        auto& state = regions_[event->beacon.key()];
        state.beacon = event->beacon;
        state.entered = event->kind == RegionEventKind::Enter;
        if (!state.entered)
            state.zone = Zone::Unknown;
        return std::nullopt;
    }

    const auto& hbc = std::get<HbcFrame>(input);
    if (!hbc.frame.crc_ok)
        return std::nullopt;
    const RegionState* region = current_region();
    if (!region) {
        ++unarmed_frames_;
        return std::nullopt;
    }
    LocalizationFix fix;
    fix.region = region->beacon;
    fix.artifact_id = hbc.frame.payload;
    fix.timestamp_ms = hbc.timestamp_ms;
    fix.zone = region->zone;
    fix.registered = registry_.find(region->beacon, hbc.frame.payload) != nullptr;
    return fix;
}

} // namespace hbc::beacon
