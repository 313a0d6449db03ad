#pragma once

// Trace replay: JSON-lines beacon/HBC records through monitoring, ranging and
// fusion. Formats are documented in docs/FORMATS.md.

#include "hbc/beacon.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace hbc::replay {

struct Region {
    beacon::BeaconId beacon;
    std::string name;
};

struct Registry {
    std::vector<Region> regions;
    beacon::ArtifactRegistry artifacts;
    beacon::MonitorConfig monitor{};
    beacon::RangingConfig ranging{};

    const Region* find(const beacon::BeaconId& id) const;
};

Registry parse_registry(const nlohmann::json& doc);
Registry load_registry(std::istream& in);

struct TraceRecord {
    std::size_t line = 0;
    std::int64_t timestamp_ms = 0;
    std::variant<beacon::BeaconReading, beacon::HbcFrame, beacon::Tick> body;
};

/// Thrown for malformed or out-of-order records; carries the 1-based line.
class TraceError : public std::runtime_error {
public:
    TraceError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Parses every record; blank lines and lines starting with '#' are skipped.
std::vector<TraceRecord> parse_trace(std::istream& in, const Registry& registry);

enum class LogKind { Enter, Exit, Fix };

struct LogEntry {
    LogKind kind = LogKind::Enter;
    std::int64_t timestamp_ms = 0;
    beacon::BeaconId region;
    std::optional<beacon::LocalizationFix> fix;
};

struct ReplayResult {
    std::vector<LogEntry> log;
    std::size_t unarmed_frames = 0;
};

ReplayResult run(const std::vector<TraceRecord>& records, const Registry& registry);

std::string format_text(const LogEntry& entry, const Registry& registry);
nlohmann::json to_json(const LogEntry& entry, const Registry& registry);

} // namespace hbc::replay
