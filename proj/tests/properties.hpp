#pragma once

// Property checks shared by the unit tests and the acceptance suite.

#include "hbc/beacon.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

namespace property {

inline hbc::beacon::BeaconId test_beacon(std::uint8_t tag)
{
    hbc::beacon::BeaconId id;
    id.ns.fill(0xE0);
    id.instance[5] = tag;
    return id;
}

struct AlternationReport {
    std::size_t traces = 0;
    std::size_t events = 0;
    std::size_t violations = 0;
};

/// Random readings and ticks from three beacons; every beacon's events must
/// alternate Enter, Exit, Enter, ... starting with Enter.
inline AlternationReport check_alternation(std::size_t traces, std::uint64_t seed)
{
    using namespace hbc::beacon;
    std::mt19937_64 rng(seed);
    AlternationReport report;
    for (std::size_t t = 0; t < traces; ++t) {
        RegionMonitor monitor;
        std::map<std::uint8_t, bool> inside;
        std::int64_t now = 0;
        const std::size_t steps = 20 + rng() % 200;
        for (std::size_t s = 0; s < steps; ++s) {
            now += static_cast<std::int64_t>(rng() % 7000);
            std::vector<RegionEvent> events;
            if (rng() % 3 == 0) {
                events = monitor.step(Tick{now});
            } else {
                const auto tag = static_cast<std::uint8_t>(rng() % 3);
                events = monitor.step(BeaconReading{test_beacon(tag), -40.0 - static_cast<double>(rng() % 60), now});
            }
            for (const auto& e : events) {
                ++report.events;
                bool& in = inside[e.beacon.instance[5]];
                const bool expect_enter = !in;
                if ((e.kind == RegionEventKind::Enter) != expect_enter || e.timestamp_ms != now)
                    ++report.violations;
                in = e.kind == RegionEventKind::Enter;
            }
        }
        ++report.traces;
    }
    return report;
}

struct InterleavingReport {
    std::size_t sequences = 0;
    std::size_t fixes = 0;
    std::size_t violations = 0;
};

/// Every fusion input sequence up to `depth` over a small alphabet (two
/// regions, enter/exit, zones, valid and corrupt frames). A fix is a
/// violation unless its region is entered and last ranged at Immediate/Near.
inline InterleavingReport check_fuse_interleavings(std::size_t depth)
{
    using namespace hbc::beacon;
    const BeaconId a = test_beacon(1);
    const BeaconId b = test_beacon(2);
    const hbc::receiver::DecodedFrame good{0x07, 0, true};
    const hbc::receiver::DecodedFrame bad{0x07, 0, false};
    const std::vector<FusionInput> alphabet = {
        RegionEvent{RegionEventKind::Enter, a, 0},
        RegionEvent{RegionEventKind::Exit, a, 0},
        ZoneUpdate{a, Zone::Near, 2.0, 0},
        ZoneUpdate{a, Zone::Far, 9.0, 0},
        RegionEvent{RegionEventKind::Enter, b, 0},
        ZoneUpdate{b, Zone::Immediate, 0.2, 0},
        HbcFrame{good, 0},
        HbcFrame{bad, 0},
    };

    // Independent model of what fuse may see.
    struct Model {
        std::set<std::uint8_t> entered;
        std::map<std::uint8_t, Zone> zone;
    };

    ArtifactRegistry registry;
    registry.add(a, 0x07, "a");
    InterleavingReport report;

    struct Frame {
        FusionSession session;
        Model model;
    };
    std::vector<Frame> stack;
    stack.push_back({FusionSession(registry), {}});
    std::vector<std::size_t> choice(depth + 1, 0);

    // Iterative DFS; each level holds the state after its prefix.
    std::size_t level = 0;
    while (true) {
        if (level < depth && choice[level] < alphabet.size()) {
            const auto& input = alphabet[choice[level]++];
            Frame next = stack.back();
            const auto fix = next.session.step(input);
            if (const auto* e = std::get_if<RegionEvent>(&input)) {
                const auto tag = e->beacon.instance[5];
                if (e->kind == RegionEventKind::Enter) {
                    next.model.entered.insert(tag);
                } else {
                    next.model.entered.erase(tag);
                    next.model.zone[tag] = Zone::Unknown;
                }
            } else if (const auto* z = std::get_if<ZoneUpdate>(&input)) {
                next.model.zone[z->beacon.instance[5]] = z->zone;
            }
            ++report.sequences;
            if (fix) {
                ++report.fixes;
                const auto tag = fix->region.instance[5];
                const auto zone = next.model.zone.count(tag) ? next.model.zone.at(tag) : Zone::Unknown;
                const bool allowed = next.model.entered.count(tag) && (zone == Zone::Immediate || zone == Zone::Near) &&
                                     std::holds_alternative<HbcFrame>(input);
                if (!allowed)
                    ++report.violations;
            }
            stack.push_back(std::move(next));
            ++level;
            choice[level] = 0;
        } else {
            if (level == 0)
                break;
            stack.pop_back();
            --level;
        }
    }
    return report;
}

} // namespace property
