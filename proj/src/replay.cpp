#include "hbc/replay.hpp"

#include "hbc/error.hpp"
#include "hbc/framing.hpp"

#include <iomanip>
#include <sstream>

namespace hbc::replay {

using nlohmann::json;

namespace {

template <std::size_t N>
std::array<std::uint8_t, N> parse_fixed_hex(const std::string& text, const char* what)
{
    const auto bytes = beacon::parse_hex(text);
    if (bytes.size() != N)
        throw Error(ErrorCode::Format, std::string(what) + " must be " + std::to_string(N) + " bytes");
    std::array<std::uint8_t, N> out{};
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return out;
}

std::uint8_t parse_byte(const json& value, const char* what)
{
    if (value.is_number_unsigned() && value.get<std::uint64_t>() <= 0xFF)
        return static_cast<std::uint8_t>(value.get<std::uint64_t>());
    if (value.is_string()) {
        auto text = value.get<std::string>();
        if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
            text.erase(0, 2);
        if (text.size() == 1)
            text.insert(0, "0");
        const auto bytes = beacon::parse_hex(text);
        if (bytes.size() == 1)
            return bytes[0];
    }
    throw Error(ErrorCode::Format, std::string(what) + " must be a single byte");
}

std::string byte_hex(std::uint8_t value)
{
    std::ostringstream out;
    out << "0x" << std::uppercase << std::hex << std::setw(2) << std::setfill('0') << unsigned{value};
    return out.str();
}

} // namespace

const Region* Registry::find(const beacon::BeaconId& id) const
{
    for (const auto& r : regions) {
        if (r.beacon == id)
            return &r;
    }
    return nullptr;
}

Registry parse_registry(const json& doc)
{
    Registry reg;
    try {
        if (doc.contains("monitor")) {
            const auto& m = doc.at("monitor");
            reg.monitor.enter_after_readings = m.value("enter_after_readings", reg.monitor.enter_after_readings);
            reg.monitor.exit_after_ms = m.value("exit_after_ms", reg.monitor.exit_after_ms);
        }
        if (doc.contains("ranging")) {
            const auto& r = doc.at("ranging");
            reg.ranging.alpha = r.value("alpha", reg.ranging.alpha);
            reg.ranging.path_loss_exponent = r.value("path_loss_exponent", reg.ranging.path_loss_exponent);
            reg.ranging.bounds.immediate_below_m = r.value("immediate_below_m", reg.ranging.bounds.immediate_below_m);
            reg.ranging.bounds.near_below_m = r.value("near_below_m", reg.ranging.bounds.near_below_m);
        }
        if (!(reg.ranging.alpha > 0.0 && reg.ranging.alpha <= 1.0))
            throw Error(ErrorCode::Format, "ranging.alpha must be in (0, 1]");
        if (!(reg.ranging.path_loss_exponent >= 1.5 && reg.ranging.path_loss_exponent <= 4.0))
            throw Error(ErrorCode::Format, "ranging.path_loss_exponent must be in [1.5, 4]");

        for (const auto& r : doc.at("regions")) {
            Region region;
            region.beacon.ns = parse_fixed_hex<10>(r.at("namespace").get<std::string>(), "namespace");
            region.beacon.instance = parse_fixed_hex<6>(r.at("instance").get<std::string>(), "instance");
            region.beacon.tx_power_1m = r.value("tx_power_1m", region.beacon.tx_power_1m);
            region.name = r.value("name", std::string{});
            if (r.contains("artifacts")) {
                for (const auto& a : r.at("artifacts"))
                    reg.artifacts.add(region.beacon, parse_byte(a.at("id"), "artifact id"),
                                      a.value("description", std::string{}));
            }
            reg.regions.push_back(std::move(region));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Format, std::string("registry: ") + e.what());
    }
    return reg;
}

Registry load_registry(std::istream& in)
{
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Format, std::string("registry: ") + e.what());
    }
    return parse_registry(doc);
}

std::vector<TraceRecord> parse_trace(std::istream& in, const Registry& registry)
{
    std::vector<TraceRecord> records;
    std::string text;
    std::size_t line = 0;
    std::optional<std::int64_t> last_ms;
    while (std::getline(in, text)) {
        ++line;
        const auto first = text.find_first_not_of(" \t\r");
        if (first == std::string::npos || text[first] == '#')
            continue;

        TraceRecord record;
        record.line = line;
        try {
            const json j = json::parse(text);
            record.timestamp_ms = j.at("t_ms").get<std::int64_t>();
            if (j.contains("hbc")) {
                receiver::DecodedFrame frame;
                frame.payload = parse_byte(j.at("hbc"), "hbc");
                frame.crc_ok = !j.contains("crc") ||
                               parse_byte(j.at("crc"), "crc") == framing::crc8_darc(frame.payload);
                frame.start_ms = record.timestamp_ms;
                record.body = beacon::HbcFrame{frame, record.timestamp_ms};
            } else if (j.contains("rssi")) {
                beacon::BeaconReading reading;
                reading.timestamp_ms = record.timestamp_ms;
                reading.rssi = j.at("rssi").get<double>();
                if (j.contains("eddystone")) {
                    reading.beacon = beacon::parse_eddystone_uid(beacon::parse_hex(j.at("eddystone").get<std::string>()));
                } else {
                    reading.beacon.ns = parse_fixed_hex<10>(j.at("namespace").get<std::string>(), "namespace");
                    reading.beacon.instance = parse_fixed_hex<6>(j.at("instance").get<std::string>(), "instance");
                    if (j.contains("tx_power"))
                        reading.beacon.tx_power_1m = j.at("tx_power").get<int>();
                    else if (const auto* known = registry.find(reading.beacon))
                        reading.beacon.tx_power_1m = known->beacon.tx_power_1m;
                }
                if (!(reading.rssi >= -120.0 && reading.rssi <= 0.0))
                    throw Error(ErrorCode::InvalidReading, "rssi out of [-120, 0] dBm");
                record.body = reading;
            } else if (j.value("tick", false)) {
                record.body = beacon::Tick{record.timestamp_ms};
            } else {
                throw Error(ErrorCode::Format, "record is neither a beacon reading, an hbc frame nor a tick");
            }
        } catch (const json::exception& e) {
            throw TraceError(line, e.what());
        } catch (const Error& e) {
            throw TraceError(line, e.what());
        }
        if (last_ms && record.timestamp_ms < *last_ms) {
            throw TraceError(line, "timestamp " + std::to_string(record.timestamp_ms) +
                                       " ms is earlier than the previous record (" +
                                       std::to_string(*last_ms) + " ms)");
        }
        last_ms = record.timestamp_ms;
        records.push_back(std::move(record));
    }
    return records;
}

ReplayResult run(const std::vector<TraceRecord>& records, const Registry& registry)
{
    beacon::RegionMonitor monitor(registry.monitor);
    beacon::Ranger ranger(registry.ranging);
    beacon::FusionSession fusion(registry.artifacts);
    ReplayResult result;

    auto log_region = [&](const beacon::RegionEvent& event) {
        result.log.push_back({event.kind == beacon::RegionEventKind::Enter ? LogKind::Enter : LogKind::Exit,
                              event.timestamp_ms, event.beacon, std::nullopt});
        fusion.step(event);
    };

    for (const auto& record : records) {
        try {
            for (const auto& event : monitor.step(beacon::Tick{record.timestamp_ms}))
                log_region(event);
            if (const auto* reading = std::get_if<beacon::BeaconReading>(&record.body)) {
                for (const auto& event : monitor.step(*reading))
                    log_region(event);
                fusion.step(ranger.step(*reading));
            } else if (const auto* frame = std::get_if<beacon::HbcFrame>(&record.body)) {
                if (auto fix = fusion.step(*frame))
                    result.log.push_back({LogKind::Fix, fix->timestamp_ms, fix->region, fix});
            }
        } catch (const Error& e) {
            throw TraceError(record.line, e.what());
        }
    }
    result.unarmed_frames = fusion.unarmed_frames();
    return result;
}

std::string format_text(const LogEntry& entry, const Registry& registry)
{
    std::ostringstream out;
    out << "t=" << entry.timestamp_ms << ' ';
    switch (entry.kind) {
    case LogKind::Enter: out << "ENTER"; break;
    case LogKind::Exit: out << "EXIT"; break;
    case LogKind::Fix: out << "FIX"; break;
    }
    out << " region=" << entry.region.to_string();
    if (const auto* region = registry.find(entry.region); region && !region->name.empty())
        out << " name=\"" << region->name << '"';
    if (entry.fix) {
        out << " artifact=" << byte_hex(entry.fix->artifact_id) << " zone=" << beacon::to_string(entry.fix->zone);
        if (const auto* desc = registry.artifacts.find(entry.region, entry.fix->artifact_id))
            out << " description=\"" << *desc << '"';
        else
            out << " unregistered";
    }
    return out.str();
}

json to_json(const LogEntry& entry, const Registry& registry)
{
    json j;
    j["t_ms"] = entry.timestamp_ms;
    j["event"] = entry.kind == LogKind::Enter ? "enter" : entry.kind == LogKind::Exit ? "exit" : "fix";
    j["region"] = entry.region.to_string();
    if (const auto* region = registry.find(entry.region); region && !region->name.empty())
        j["name"] = region->name;
    if (entry.fix) {
        j["artifact"] = byte_hex(entry.fix->artifact_id);
        j["zone"] = beacon::to_string(entry.fix->zone);
        j["registered"] = entry.fix->registered;
        if (const auto* desc = registry.artifacts.find(entry.region, entry.fix->artifact_id))
            j["description"] = *desc;
    }
    return j;
}

} // namespace hbc::replay
