#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "povmremap/image.hpp"
#include "povmremap/image_io.hpp"

using namespace povmremap;
namespace fs = std::filesystem;

namespace {

fs::path tmp_file(const std::string& name) {
    return fs::temp_directory_path() / ("povmremap_test_" + name);
}

} // namespace

TEST_CASE("binary PGM loads bit-exactly") {
    const auto p = tmp_file("p5.pgm");
    {
        std::ofstream f(p, std::ios::binary);
        f << "P5\n2 2\n255\n";
        const unsigned char px[4] = {0, 128, 255, 64};
        f.write(reinterpret_cast<const char*>(px), 4);
    }
    const GrayImage img = load_image(p.string());
    REQUIRE(img.width == 2);
    REQUIRE(img.height == 2);
    REQUIRE(img.data == std::vector<std::uint8_t>{0, 128, 255, 64});
}

TEST_CASE("ascii PGM loads") {
    const auto p = tmp_file("p2.pgm");
    std::ofstream(p) << "P2 1 1 255 200";
    const GrayImage img = load_image(p.string(), ImageFormat::pgm_ascii);
    REQUIRE(img.width == 1);
    REQUIRE(img.height == 1);
    REQUIRE(img.data[0] == 200);
}

TEST_CASE("16-bit PGM is rejected") {
    const auto p = tmp_file("p5_16bit.pgm");
    std::ofstream(p, std::ios::binary) << "P5\n1 1\n65535\n\0\0";
    REQUIRE_THROWS_AS(load_image(p.string()), FormatError);
}

TEST_CASE("missing file raises IoError") {
    REQUIRE_THROWS_AS(load_image("/nonexistent/nope.pgm"), IoError);
}

TEST_CASE("save to unwritable directory raises IoError") {
    REQUIRE_THROWS_AS(save_image(GrayImage(2, 2), "/nonexistent/dir/out.pgm"), IoError);
}

TEST_CASE("PGM round-trip is bit-exact for random images") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> dim(1, 40);
    std::uniform_int_distribution<int> px(0, 255);
    for (int rep = 0; rep < 25; ++rep) {
        GrayImage img(dim(rng), dim(rng));
        for (auto& v : img.data) v = static_cast<std::uint8_t>(px(rng));
        const auto p = tmp_file("roundtrip.pgm");
        save_image(img, p.string());
        REQUIRE(load_image(p.string()) == img);
    }
}

TEST_CASE("all-zero image round-trips") {
    GrayImage img(8, 8);
    const auto p = tmp_file("zeros.pgm");
    save_image(img, p.string());
    REQUIRE(load_image(p.string()) == img);
}

TEST_CASE("histogram counts and probs") {
    const GrayImage img(2, 2, {0, 0, 255, 255});
    const Histogram h = compute_histogram(img);
    REQUIRE(h.counts[0] == 2);
    REQUIRE(h.counts[255] == 2);
    REQUIRE(h.probs[0] == Catch::Approx(0.5));
    REQUIRE(h.probs[255] == Catch::Approx(0.5));
    REQUIRE(h.total == 4);
}

TEST_CASE("histogram of constant image") {
    const GrayImage img(5, 2, 7);
    const Histogram h = compute_histogram(img);
    REQUIRE(h.probs[7] == 1.0);
    for (int i = 0; i < 256; ++i)
        if (i != 7) REQUIRE(h.probs[i] == 0.0);
}

TEST_CASE("histogram of full ramp is uniform") {
    GrayImage img(256, 1);
    for (int i = 0; i < 256; ++i) img.data[i] = static_cast<std::uint8_t>(i);
    const Histogram h = compute_histogram(img);
    for (int i = 0; i < 256; ++i) REQUIRE(h.probs[i] == Catch::Approx(1.0 / 256));
}

TEST_CASE("histogram probs sum to one and ignore pixel order") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> px(0, 255);
    GrayImage img(30, 20);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(px(rng));
    const Histogram h1 = compute_histogram(img);
    double sum = 0.0;
    for (double p : h1.probs) sum += p;
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));

    std::shuffle(img.data.begin(), img.data.end(), rng);
    const Histogram h2 = compute_histogram(img);
    REQUIRE(h1.counts == h2.counts);
}

TEST_CASE("empty image is an error") {
    REQUIRE_THROWS_AS(compute_histogram(GrayImage{}), EmptyImage);
}

TEST_CASE("synthetic generator: degenerate single component") {
    const GrayImage img = synth_mixture_image(16, 16, {{100.0, 0.0, 1.0}}, 1);
    for (auto v : img.data) REQUIRE(v == 100);
}

TEST_CASE("synthetic generator: two point masses") {
    const GrayImage img = synth_mixture_image(
        32, 32, {{0.0, 0.0, 0.5}, {255.0, 0.0, 0.5}}, 5);
    for (auto v : img.data) REQUIRE((v == 0 || v == 255));
}

TEST_CASE("synthetic generator: sample mean near mixture mean") {
    const GrayImage img = synth_mixture_image(
        256, 256, {{60.0, 5.0, 0.5}, {200.0, 5.0, 0.5}}, 42);
    double mean = 0.0;
    for (auto v : img.data) mean += v;
    mean /= static_cast<double>(img.size());
    REQUIRE(mean > 125.0);
    REQUIRE(mean < 135.0);
}

TEST_CASE("synthetic generator is deterministic for a fixed seed") {
    const auto a = synth_mixture_image(64, 64, {{60.0, 5.0, 0.5}, {200.0, 5.0, 0.5}}, 9);
    const auto b = synth_mixture_image(64, 64, {{60.0, 5.0, 0.5}, {200.0, 5.0, 0.5}}, 9);
    REQUIRE(a == b);
}

TEST_CASE("synthetic generator parameter validation") {
    REQUIRE_THROWS_AS(synth_mixture_image(4, 4, {{10.0, -1.0, 1.0}}, 0), InvalidParams);
    REQUIRE_THROWS_AS(synth_mixture_image(4, 4, {{10.0, 1.0, 0.6}}, 0), InvalidParams);
}

TEST_CASE("PNG grayscale and RGB load with BT.601 luma") {
    // write a tiny PNG via libpng, then read it back
    const auto p = tmp_file("rgb.png");
    {
        std::FILE* fp = std::fopen(p.string().c_str(), "wb");
        REQUIRE(fp != nullptr);
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        png_infop info = png_create_info_struct(png);
        REQUIRE(setjmp(png_jmpbuf(png)) == 0);
        png_init_io(png, fp);
        png_set_IHDR(png, info, 2, 1, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                     PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        unsigned char row[6] = {255, 0, 0, 0, 255, 0}; // red, green
        png_write_row(png, row);
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
    }
    const GrayImage img = load_image(p.string());
    REQUIRE(img.width == 2);
    REQUIRE(img.height == 1);
    REQUIRE(img.data[0] == 76);  // round(0.299 * 255)
    REQUIRE(img.data[1] == 150); // round(0.587 * 255)
}
