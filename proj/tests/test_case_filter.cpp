#include <catch2/catch_amalgamated.hpp>

#include "grnea/core/rng.hpp"
#include "grnea/filter/case_filter.hpp"

using grnea::Image;
using grnea::Rng;
namespace filt = grnea::filt;

namespace {

Image solid(int size, float r, float g, float b) {
    Image img(size, size);
    img.fill(r, g, b);
    return img;
}

filt::HsvImage outline_as_hsv(const filt::OutlineImage& o) {
    filt::HsvImage img(o.h, o.w);
    for (std::size_t i = 0; i < o.white.size(); ++i)
        img.px[i] = o.white[i] ? filt::Hsv8{0, 0, 255} : filt::Hsv8{0, 0, 0};
    return img;
}

/// Colored plate with a white border frame, the shape family the filter sees.
Image framed_plate(int size, int margin, float r, float g, float b) {
    Image img(size, size);
    img.fill(1, 1, 1);
    for (int y = margin; y < size - margin; ++y)
        for (int x = margin; x < size - margin; ++x) {
            img.at(y, x, 0) = r;
            img.at(y, x, 1) = g;
            img.at(y, x, 2) = b;
        }
    return img;
}

}  // namespace

TEST_CASE("rgb to hsv hand values") {
    auto red = filt::rgb_to_hsv(solid(2, 1, 0, 0));
    REQUIRE(red.at(0, 0).h == 0);
    REQUIRE(red.at(0, 0).s == 255);
    REQUIRE(red.at(0, 0).v == 255);

    auto white = filt::rgb_to_hsv(solid(2, 1, 1, 1));
    REQUIRE(white.at(0, 0).h == 0);
    REQUIRE(white.at(0, 0).s == 0);
    REQUIRE(white.at(0, 0).v == 255);

    auto black = filt::rgb_to_hsv(solid(2, 0, 0, 0));
    REQUIRE(black.at(0, 0).h == 0);
    REQUIRE(black.at(0, 0).s == 0);
    REQUIRE(black.at(0, 0).v == 0);
}

TEST_CASE("binarize outline white window") {
    filt::FilterConfig cfg;
    filt::HsvImage img(1, 3);
    img.at(0, 0) = {90, 10, 240};   // white: S <= 30, V >= 221
    img.at(0, 1) = {90, 200, 240};  // saturated -> black
    img.at(0, 2) = {90, 10, 100};   // dark -> black
    auto o = filt::binarize_outline(img, cfg);
    REQUIRE(o.at(0, 0) == 1);
    REQUIRE(o.at(0, 1) == 0);
    REQUIRE(o.at(0, 2) == 0);
}

TEST_CASE("binarize outline is idempotent") {
    Rng rng = grnea::make_rng(3);
    filt::FilterConfig cfg;
    filt::HsvImage img(8, 8);
    for (auto& p : img.px)
        p = {static_cast<std::uint8_t>(grnea::uniform(rng, 0, 180)),
             static_cast<std::uint8_t>(grnea::uniform(rng, 0, 256)),
             static_cast<std::uint8_t>(grnea::uniform(rng, 0, 256))};
    auto once = filt::binarize_outline(img, cfg);
    auto twice = filt::binarize_outline(outline_as_hsv(once), cfg);
    REQUIRE(once.white == twice.white);
}

TEST_CASE("noise count basics") {
    filt::OutlineImage a(64, 64), b(64, 64);
    REQUIRE(filt::noise_count(a, b) == 0);

    b.at(10, 20) = 1;
    REQUIRE(filt::noise_count(a, b) == 1);

    filt::OutlineImage inv(64, 64);
    for (auto& v : inv.white) v = 1;
    REQUIRE(filt::noise_count(a, inv) == 4096);

    filt::OutlineImage other(64, 63);
    REQUIRE_THROWS_AS(filt::noise_count(a, other), std::invalid_argument);
}

TEST_CASE("noise count is a metric") {
    Rng rng = grnea::make_rng(5);
    auto random_outline = [&rng](int size) {
        filt::OutlineImage o(size, size);
        for (auto& v : o.white) v = grnea::uniform(rng) < 0.5 ? 1 : 0;
        return o;
    };
    for (int rep = 0; rep < 20; ++rep) {
        auto a = random_outline(10), b = random_outline(10), c = random_outline(10);
        REQUIRE(filt::noise_count(a, b) == filt::noise_count(b, a));
        REQUIRE((filt::noise_count(a, b) == 0) == (a.white == b.white));
        REQUIRE(filt::noise_count(a, c) <= filt::noise_count(a, b) + filt::noise_count(b, c));
    }
}

TEST_CASE("noise count is monotone in flipped pixels") {
    Rng rng = grnea::make_rng(7);
    filt::OutlineImage ref(16, 16);
    for (auto& v : ref.white) v = grnea::uniform(rng) < 0.5 ? 1 : 0;
    filt::OutlineImage probe = ref;
    long prev = 0;
    std::vector<int> order(256);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 0; i < 50; ++i) {
        probe.white[order[i]] ^= 1;  // flip one more pixel away from ref
        const long now = filt::noise_count(probe, ref);
        REQUIRE(now > prev);
        prev = now;
    }
}

TEST_CASE("is_reasonable decision boundary is exactly C") {
    const int size = 16;
    Image base = framed_plate(size, 2, 0.1f, 0.5f, 0.9f);
    filt::FilterConfig cfg;
    cfg.reference = filt::binarize_outline(filt::rgb_to_hsv(base), cfg);
    cfg.threshold_c = 5;

    auto self = filt::is_reasonable(base, cfg);
    REQUIRE(self.reasonable);
    REQUIRE(self.n_noise == 0);

    // flip pixels to white one at a time
    Image probe = base;
    for (int k = 0; k < 7; ++k) {
        probe.at(4, 4 + k, 0) = 1.0f;
        probe.at(4, 4 + k, 1) = 1.0f;
        probe.at(4, 4 + k, 2) = 1.0f;
        auto d = filt::is_reasonable(probe, cfg);
        REQUIRE(d.n_noise == k + 1);
        REQUIRE(d.reasonable == (k + 1 <= 5));
    }
}

TEST_CASE("calibrate threshold floors at 1 and respects the quantile") {
    const int size = 16;
    Image base = framed_plate(size, 2, 0.2f, 0.6f, 0.3f);
    filt::FilterConfig cfg;
    cfg.reference = filt::binarize_outline(filt::rgb_to_hsv(base), cfg);

    std::vector<Image> identical(25, base);
    REQUIRE(filt::calibrate_threshold(identical, cfg, 0.95) == 1);

    // quantile 1.0 covers the worst observed case
    Rng rng = grnea::make_rng(11);
    std::vector<Image> noisy;
    long worst = 0;
    for (int i = 0; i < 30; ++i) {
        Image img = base;
        const int flips = static_cast<int>(grnea::uniform(rng, 0, 12));
        for (int f = 0; f < flips; ++f) {
            const int y = static_cast<int>(grnea::uniform(rng, 3, size - 3));
            const int x = static_cast<int>(grnea::uniform(rng, 3, size - 3));
            img.at(y, x, 0) = img.at(y, x, 1) = img.at(y, x, 2) = 1.0f;
        }
        auto o = filt::binarize_outline(filt::rgb_to_hsv(img), cfg);
        worst = std::max(worst, filt::noise_count(o, cfg.reference));
        noisy.push_back(img);
    }
    REQUIRE(filt::calibrate_threshold(noisy, cfg, 1.0) >= worst);

    REQUIRE_THROWS_AS(filt::calibrate_threshold({}, cfg, 0.9), std::invalid_argument);
    REQUIRE_THROWS_AS(filt::calibrate_threshold(identical, cfg, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(filt::calibrate_threshold(identical, cfg, 1.5), std::invalid_argument);
}

TEST_CASE("occlusion corruption is rejected after calibration") {
    const int size = 64;
    Image base = framed_plate(size, 4, 0.1f, 0.4f, 0.9f);
    filt::FilterConfig cfg;
    cfg.reference = filt::binarize_outline(filt::rgb_to_hsv(base), cfg);

    // "reconstructions": base plus mild pixel jitter
    Rng rng = grnea::make_rng(13);
    std::vector<Image> recons;
    for (int i = 0; i < 40; ++i) {
        Image img = base;
        for (int f = 0; f < 20; ++f) {
            const int y = static_cast<int>(grnea::uniform(rng, 0, size));
            const int x = static_cast<int>(grnea::uniform(rng, 0, size));
            for (int c = 0; c < 3; ++c)
                img.at(y, x, c) =
                    std::clamp(img.at(y, x, c) + static_cast<float>(grnea::uniform(rng, -0.2, 0.2)),
                               0.0f, 1.0f);
        }
        recons.push_back(img);
    }
    cfg.threshold_c = filt::calibrate_threshold(recons, cfg, 0.98);

    int accepted = 0;
    for (const auto& img : recons)
        if (filt::is_reasonable(img, cfg).reasonable) ++accepted;
    REQUIRE(accepted >= static_cast<int>(0.95 * recons.size()));

    // white 20x20 occlusion patches at random positions
    int rejected = 0;
    const int probes = 100;
    for (int i = 0; i < probes; ++i) {
        Image img = recons[i % recons.size()];
        const int py = static_cast<int>(grnea::uniform(rng, 0, size - 20));
        const int px = static_cast<int>(grnea::uniform(rng, 0, size - 20));
        for (int y = py; y < py + 20; ++y)
            for (int x = px; x < px + 20; ++x)
                img.at(y, x, 0) = img.at(y, x, 1) = img.at(y, x, 2) = 1.0f;
        if (!filt::is_reasonable(img, cfg).reasonable) ++rejected;
    }
    REQUIRE(rejected >= static_cast<int>(0.95 * probes));
}
