#include "hbc/dsp.hpp"
#include "hbc/error.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hbc::dsp;
using hbc::ErrorCode;

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const hbc::Error& e) {
        return e.code();
    }
    FAIL("expected hbc::Error");
    return ErrorCode::Io;
}

SampleBuffer random_buffer(std::mt19937_64& rng, std::size_t n, double rate = 44100.0)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SampleBuffer b{std::vector<double>(n), rate};
    for (auto& s : b.samples)
        s = u(rng);
    return b;
}

SampleBuffer random_binary(std::mt19937_64& rng, std::size_t n, double rate)
{
    SampleBuffer b{std::vector<double>(n), rate};
    for (auto& s : b.samples)
        s = static_cast<double>(rng() % 5 == 0);
    return b;
}

} // namespace

TEST_CASE("design_bandpass_fir defaults")
{
    const auto taps = design_bandpass_fir({}, 44100.0);
    REQUIRE(taps.size() == 20);
    for (double c : taps.coefficients)
        CHECK(std::isfinite(c));

    const double at_center = oracle::fir_response(taps.coefficients, 1000.0, 44100.0);
    CHECK(at_center > oracle::fir_response(taps.coefficients, 100.0, 44100.0));
    CHECK(at_center > oracle::fir_response(taps.coefficients, 5000.0, 44100.0));
    CHECK(at_center == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(magnitude_response(taps, 1000.0, 44100.0) == doctest::Approx(at_center).epsilon(1e-12));
}

TEST_CASE("design_bandpass_fir shapes and errors")
{
    const auto three = design_bandpass_fir({3, 1000.0, 400.0}, 44100.0);
    CHECK(three.size() == 3);
    for (double c : three.coefficients)
        CHECK(std::isfinite(c));

    CHECK(code_of([] { design_bandpass_fir({20, 25000.0, 400.0}, 44100.0); }) == ErrorCode::InvalidBand);
    CHECK(code_of([] { design_bandpass_fir({20, 100.0, 400.0}, 44100.0); }) == ErrorCode::InvalidBand);
    CHECK(code_of([] { design_bandpass_fir({20, 1000.0, 0.0}, 44100.0); }) == ErrorCode::InvalidBand);
    CHECK(code_of([] { design_bandpass_fir({2, 1000.0, 400.0}, 44100.0); }) == ErrorCode::InvalidBand);
}

TEST_CASE("fir_filter impulse, zeros, linearity")
{
    const auto taps = design_bandpass_fir({}, 44100.0);
    SampleBuffer impulse{std::vector<double>(64, 0.0), 44100.0};
    impulse.samples[0] = 1.0;
    const auto response = fir_filter(impulse, taps);
    REQUIRE(response.size() == 64);
    for (std::size_t i = 0; i < taps.size(); ++i)
        CHECK(response.samples[i] == taps.coefficients[i]);
    for (std::size_t i = taps.size(); i < 64; ++i)
        CHECK(response.samples[i] == 0.0);

    const SampleBuffer zeros{std::vector<double>(100, 0.0), 44100.0};
    for (double s : fir_filter(zeros, taps).samples)
        CHECK(s == 0.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = random_buffer(rng, 300);
        const auto y = random_buffer(rng, 300);
        const double a = coef(rng);
        const double b = coef(rng);
        SampleBuffer mix{std::vector<double>(300), 44100.0};
        for (std::size_t i = 0; i < 300; ++i)
            mix.samples[i] = a * x.samples[i] + b * y.samples[i];
        const auto fm = fir_filter(mix, taps);
        const auto fx = fir_filter(x, taps);
        const auto fy = fir_filter(y, taps);
        for (std::size_t i = 0; i < 300; ++i)
            REQUIRE(std::abs(fm.samples[i] - (a * fx.samples[i] + b * fy.samples[i])) <= 1e-9);
    }
}

TEST_CASE("rectify")
{
    const SampleBuffer in{{-0.5, 0.25, 0.0}, 8000.0};
    const auto out = rectify(in);
    CHECK(out.samples == std::vector<double>{0.5, 0.25, 0.0});
    CHECK(out.sample_rate == 8000.0);
    CHECK(rectify(out) == out);

    std::mt19937_64 rng(3);
    const auto x = random_buffer(rng, 200);
    CHECK(rectify(rectify(x)) == rectify(x));
}

TEST_CASE("envelope")
{
    SUBCASE("constant input")
    {
        const SampleBuffer c{std::vector<double>(1000, 0.37), 44100.0};
        for (auto [k, hop] : {std::pair<std::size_t, std::size_t>{441, 11}, {10, 10}, {1, 1}, {100, 33}}) {
            const auto e = envelope(c, k, hop);
            for (double v : e.samples)
                CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
        }
    }
    SUBCASE("rectified 1 kHz tone averages to 2/pi")
    {
        const double expected = oracle::mean_abs_sine();
        CHECK(expected == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-9));
        SampleBuffer tone{std::vector<double>(44100), 44100.0};
        for (std::size_t n = 0; n < tone.size(); ++n)
            tone.samples[n] = std::sin(2.0 * std::numbers::pi * 1000.0 * static_cast<double>(n) / 44100.0);
        const auto e = envelope(rectify(tone), 441, 441);
        CHECK(e.sample_rate == doctest::Approx(100.0));
        for (double v : e.samples)
            CHECK(std::abs(v - expected) <= 0.02 * expected);
    }
    SUBCASE("errors")
    {
        const SampleBuffer x{std::vector<double>(100, 0.0), 44100.0};
        CHECK(code_of([&] { envelope(x, 10, 11); }) == ErrorCode::BadWindow);
        CHECK(code_of([&] { envelope(x, 10, 0); }) == ErrorCode::BadWindow);
        CHECK(code_of([&] { envelope(x, 101, 1); }) == ErrorCode::BadWindow);
    }
    SUBCASE("output length")
    {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t len = 1 + rng() % 500;
            const std::size_t k = 1 + rng() % len;
            const std::size_t hop = 1 + rng() % k;
            const auto e = envelope(random_buffer(rng, len), k, hop);
            REQUIRE(e.size() == (len - k) / hop + 1);
        }
    }
}

TEST_CASE("binarize")
{
    const SampleBuffer e{{0.0, 1.0, 0.1}, 1000.0};
    CHECK(binarize(e, 0.5).samples == std::vector<double>{0.0, 1.0, 0.0});

    const SampleBuffer zero{std::vector<double>(5, 0.0), 1000.0};
    CHECK(binarize(zero, 0.4).samples == std::vector<double>(5, 0.0));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        SampleBuffer env{std::vector<double>(200), 4000.0};
        for (auto& v : env.samples)
            v = u(rng);
        const auto base = binarize(env, 0.4);
        for (double alpha : {0.1, 10.0, 3.7}) {
            SampleBuffer scaled = env;
            for (auto& v : scaled.samples)
                v *= alpha;
            REQUIRE(binarize(scaled, 0.4) == base);
        }
        CHECK(binarize_windowed(env, 0.4, env.size()) == base);
    }
}

TEST_CASE("binarize_windowed uses the local maximum")
{
    SampleBuffer e{std::vector<double>(100, 0.1), 1000.0};
    e.samples[0] = 1.0;
    // Far from the loud sample only the quiet level counts.
    const auto local = binarize_windowed(e, 0.5, 10);
    CHECK(local.samples[0] == 1.0);
    CHECK(local.samples[5] == 0.0);
    CHECK(local.samples[50] == 1.0);
    CHECK(binarize(e, 0.5).samples[50] == 0.0);
}

TEST_CASE("decimate_per_ms")
{
    SUBCASE("one probe set is enough")
    {
        // 4 samples per ms; probes 0.25/0.5/0.75 land on samples 1, 2, 3.
        const SampleBuffer b{{0, 0, 0, 1, 0, 0, 0, 0}, 4000.0};
        const auto d = decimate_per_ms(b);
        CHECK(d.sample_rate == 1000.0);
        CHECK(d.samples == std::vector<double>{1.0, 0.0});
    }
    SUBCASE("all zero / all one")
    {
        CHECK(decimate_per_ms({std::vector<double>(44100, 0.0), 44100.0}).samples ==
              std::vector<double>(1000, 0.0));
        const auto ones = decimate_per_ms({std::vector<double>(44100, 1.0), 44100.0});
        CHECK(ones.samples == std::vector<double>(ones.size(), 1.0));
        CHECK(ones.size() >= 999);
    }
    SUBCASE("rate too low")
    {
        CHECK(code_of([] { decimate_per_ms({std::vector<double>(10, 0.0), 2999.0}); }) == ErrorCode::RateTooLow);
    }
    SUBCASE("matches brute-force nearest-sample scan")
    {
        std::mt19937_64 rng(99);
        const double probes[3] = {0.25, 0.5, 0.75};
        for (double rate : {44100.0 / 11.0, 3000.0, 4000.0, 8000.0, 44100.0}) {
            for (int trial = 0; trial < 20; ++trial) {
                const auto b = random_binary(rng, 50 + rng() % 400, rate);
                const auto fast = decimate_per_ms(b);
                const auto slow = oracle::decimate_brute_force(b.samples, rate, probes);
                REQUIRE(fast.samples == slow);
            }
        }
    }
}

TEST_CASE("slice_bits")
{
    auto symbols = [](std::vector<double> v) { return SampleBuffer{std::move(v), 1000.0}; };
    CHECK(slice_bits(symbols(std::vector<double>(10, 1.0)), 100) == hbc::framing::BitStream{1});
    CHECK(slice_bits(symbols({1, 1, 1, 1, 1, 1, 0, 0, 0, 0}), 100) == hbc::framing::BitStream{1});
    CHECK(slice_bits(symbols({1, 1, 1, 0, 0, 0, 0, 0, 0, 0}), 100) == hbc::framing::BitStream{0});
    CHECK(slice_bits(symbols({1, 1, 1, 1, 1, 0, 0, 0, 0, 0}), 100) == hbc::framing::BitStream{1});
    CHECK(slice_bits(symbols(std::vector<double>(25, 0.0)), 100).size() == 2);
    CHECK(code_of([&] { slice_bits(symbols({1}), 300); }) == ErrorCode::IncompatibleRate);
    CHECK(code_of([&] { slice_bits(symbols({1}), 0); }) == ErrorCode::IncompatibleRate);
}
