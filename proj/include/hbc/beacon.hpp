#pragma once

// Eddystone-UID identity, RSSI ranging, region monitoring and fusion of
// beacon regions with body-channel artifact identifiers.

#include "hbc/receiver.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hbc::beacon {

using Namespace = std::array<std::uint8_t, 10>;
using Instance = std::array<std::uint8_t, 6>;

struct BeaconId {
    Namespace ns{};
    Instance instance{};
    int tx_power_1m = -59;

    /// Region identity ignores tx power.
    auto key() const { return std::pair{ns, instance}; }
    std::string to_string() const;  // "<ns hex>:<instance hex>"
    friend bool operator==(const BeaconId& a, const BeaconId& b) { return a.key() == b.key(); }
};

struct BeaconReading {
    BeaconId beacon;
    double rssi = -70.0;
    std::int64_t timestamp_ms = 0;
};

enum class Zone { Immediate, Near, Far, Unknown };
const char* to_string(Zone zone);

enum class RegionEventKind { Enter, Exit };

struct RegionEvent {
    RegionEventKind kind = RegionEventKind::Enter;
    BeaconId beacon;
    std::int64_t timestamp_ms = 0;
};

struct LocalizationFix {
    BeaconId region;
    std::uint8_t artifact_id = 0;
    std::int64_t timestamp_ms = 0;
    Zone zone = Zone::Unknown;
    bool registered = true;
};

inline constexpr std::uint8_t eddystone_uid_type = 0x00;

/// Eddystone-UID service data: type 0x00, signed ranging byte (taken as the
/// 1 m reference power), 10-byte namespace, 6-byte instance. Bytes past 18
/// are reserved and ignored.
BeaconId parse_eddystone_uid(std::span<const std::uint8_t> frame);

/// Hex helpers shared with the trace format.
std::vector<std::uint8_t> parse_hex(std::string_view text);
std::string to_hex(std::span<const std::uint8_t> bytes);

struct RssiSmoother {
    std::optional<double> value;

    double update(double rssi, double alpha);
};

double smooth_rssi(RssiSmoother& state, const BeaconReading& reading, double alpha);

double estimate_distance(double rssi, double tx_power_1m, double path_loss_exponent = 2.0);

struct ZoneBounds {
    double immediate_below_m = 0.5;
    double near_below_m = 4.0;
};

/// nullopt distance means no estimate.
Zone classify_zone(std::optional<double> distance_m, const ZoneBounds& bounds = {});

struct Tick {
    std::int64_t timestamp_ms = 0;
};

struct MonitorConfig {
    unsigned enter_after_readings = 3;  // M
    std::int64_t exit_after_ms = 10000;  // T
};

/// Monitoring state machine: Enter after M readings without a silence of
/// T ms, Exit once an entered beacon has been silent for T ms (seen on ticks).
class RegionMonitor {
public:
    explicit RegionMonitor(MonitorConfig cfg = {}) : cfg_(cfg) {}

    std::vector<RegionEvent> step(const BeaconReading& reading);
    std::vector<RegionEvent> step(const Tick& tick);

    bool entered(const BeaconId& beacon) const;

private:
    struct Track {
        BeaconId beacon;
        unsigned consecutive = 0;
        std::int64_t last_seen_ms = 0;
        bool entered = false;
    };

    void advance_clock(std::int64_t timestamp_ms);

    MonitorConfig cfg_;
    std::map<std::pair<Namespace, Instance>, Track> tracks_;
    std::optional<std::int64_t> now_ms_;
};

/// Ranging pipeline per reading: smoothed RSSI -> distance -> zone.
struct RangingConfig {
    double alpha = 0.5;
    double path_loss_exponent = 2.0;
    ZoneBounds bounds{};
};

struct ZoneUpdate {
    BeaconId beacon;
    Zone zone = Zone::Unknown;
    double distance_m = 0.0;
    std::int64_t timestamp_ms = 0;
};

class Ranger {
public:
    explicit Ranger(RangingConfig cfg = {}) : cfg_(cfg) {}

    ZoneUpdate step(const BeaconReading& reading);

private:
    RangingConfig cfg_;
    std::map<std::pair<Namespace, Instance>, RssiSmoother> smoothers_;
};

struct HbcFrame {
    receiver::DecodedFrame frame;
    std::int64_t timestamp_ms = 0;
};

using FusionInput = std::variant<ZoneUpdate, RegionEvent, HbcFrame>;

/// (region, artifact id) -> descriptor.
class ArtifactRegistry {
public:
    void add(const BeaconId& region, std::uint8_t artifact_id, std::string descriptor);
    const std::string* find(const BeaconId& region, std::uint8_t artifact_id) const;

private:
    std::map<std::pair<std::pair<Namespace, Instance>, std::uint8_t>, std::string> entries_;
};

/// Arms HBC decoding while some entered region is at Immediate/Near range;
/// a CRC-valid frame while armed becomes a fix for the nearest such region.
class FusionSession {
public:
    explicit FusionSession(ArtifactRegistry registry) : registry_(std::move(registry)) {}

    std::optional<LocalizationFix> step(const FusionInput& input);

    bool armed() const;
    std::size_t unarmed_frames() const { return unarmed_frames_; }
    const ArtifactRegistry& registry() const { return registry_; }

private:
    struct RegionState {
        BeaconId beacon;
        bool entered = false;
        Zone zone = Zone::Unknown;
        double distance_m = 0.0;
    };

    const RegionState* current_region() const;

    ArtifactRegistry registry_;
    std::map<std::pair<Namespace, Instance>, RegionState> regions_;
    std::size_t unarmed_frames_ = 0;
};

} // namespace hbc::beacon
