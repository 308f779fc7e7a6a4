#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <png.h>

#include "povmremap/error.hpp"
#include "povmremap/image.hpp"

namespace povmremap {

enum class ImageFormat { auto_detect, pgm_binary, pgm_ascii, png };

namespace detail {

// Skips whitespace and '#' comments between PGM header tokens.
inline int pgm_next_int(std::istream& in, const char* what) {
    for (;;) {
        int c = in.peek();
        if (c == EOF) throw FormatError(std::string("pgm: truncated header reading ") + what);
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) { in.get(); continue; }
        break;
    }
    long v;
    if (!(in >> v) || v < 0) throw FormatError(std::string("pgm: bad value for ") + what);
    return static_cast<int>(v);
}

inline GrayImage load_pgm(std::istream& in, const std::string& path) {
    char p, n;
    in.get(p);
    in.get(n);
    if (!in || p != 'P' || (n != '2' && n != '5'))
        throw FormatError(path + ": not a PGM (expected P2 or P5)");
    const bool binary = (n == '5');
    const int w = pgm_next_int(in, "width");
    const int h = pgm_next_int(in, "height");
    const int maxval = pgm_next_int(in, "maxval");
    if (w <= 0 || h <= 0) throw FormatError(path + ": bad dimensions");
    if (maxval != 255) throw FormatError(path + ": unsupported maxval (must be 255)");

    GrayImage img(w, h);
    if (binary) {
        in.get(); // single whitespace after maxval
        in.read(reinterpret_cast<char*>(img.data.data()),
                static_cast<std::streamsize>(img.size()));
        if (in.gcount() != static_cast<std::streamsize>(img.size()))
            throw FormatError(path + ": truncated pixel data");
    } else {
        for (std::size_t i = 0; i < img.size(); ++i) {
            int v;
            if (!(in >> v)) throw FormatError(path + ": truncated pixel data");
            if (v < 0 || v > 255) throw FormatError(path + ": pixel out of range");
            img.data[i] = static_cast<std::uint8_t>(v);
        }
    }
    return img;
}

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

inline GrayImage load_png(const std::string& path) {
    PngReadCloser c;
    c.fp = std::fopen(path.c_str(), "rb");
    if (!c.fp) throw IoError(path + ": cannot open");
    c.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!c.png) throw IoError("png: allocation failed");
    c.info = png_create_info_struct(c.png);
    if (!c.info) throw IoError("png: allocation failed");
    if (setjmp(png_jmpbuf(c.png))) throw FormatError(path + ": malformed PNG");

    png_init_io(c.png, c.fp);
    png_read_info(c.png, c.info);
    const int bit_depth = png_get_bit_depth(c.png, c.info);
    const int color_type = png_get_color_type(c.png, c.info);
    if (bit_depth == 16) throw FormatError(path + ": 16-bit PNG not supported");
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(c.png);
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(c.png);
    png_read_update_info(c.png, c.info);

    const int w = static_cast<int>(png_get_image_width(c.png, c.info));
    const int h = static_cast<int>(png_get_image_height(c.png, c.info));
    const int channels = png_get_channels(c.png, c.info);
    if (channels != 1 && channels != 2 && channels != 3 && channels != 4)
        throw FormatError(path + ": unsupported channel count");

    std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * channels);
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y) {
        png_read_row(c.png, row.data(), nullptr);
        for (int x = 0; x < w; ++x) {
            const std::uint8_t* px = &row[static_cast<std::size_t>(x) * channels];
            double v;
            if (channels <= 2) {
                v = px[0]; // gray or gray+alpha
            } else {
                // ITU-R BT.601 luma
                v = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
            }
            img.at(x, y) = static_cast<std::uint8_t>(std::llround(v));
        }
    }
    png_read_end(c.png, nullptr);
    return img;
}

} // namespace detail

inline GrayImage load_image(const std::string& path,
                            ImageFormat format = ImageFormat::auto_detect) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open");

    if (format == ImageFormat::auto_detect) {
        char magic[2] = {0, 0};
        in.read(magic, 2);
        in.seekg(0);
        if (magic[0] == 'P' && magic[1] == '5') format = ImageFormat::pgm_binary;
        else if (magic[0] == 'P' && magic[1] == '2') format = ImageFormat::pgm_ascii;
        else if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P')
            format = ImageFormat::png;
        else throw FormatError(path + ": unrecognized image format");
    }
    if (format == ImageFormat::png) {
        in.close();
        return detail::load_png(path);
    }
    GrayImage img = detail::load_pgm(in, path);
    const bool binary = (format == ImageFormat::pgm_binary);
    (void)binary;
    return img;
}

/// Writes a binary (P5) PGM; round-trips bit-exactly through load_image.
inline void save_image(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.size()));
    if (!out) throw IoError(path + ": write failed");
}

} // namespace povmremap
