#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>

#include "pano/error.hpp"

namespace pano {

// Single-channel 8-bit image, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h, uint8_t fill = 0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return data.size(); }

    bool operator==(const GrayImage& o) const {
        return width == o.width && height == o.height && data == o.data;
    }
};

// Per-pixel luma = round(0.299 r + 0.587 g + 0.114 b). Integer-exact rounding.
inline GrayImage to_grayscale(const std::vector<uint8_t>& r,
                              const std::vector<uint8_t>& g,
                              const std::vector<uint8_t>& b,
                              int width, int height) {
    const size_t n = static_cast<size_t>(width) * height;
    if (r.size() != n || g.size() != n || b.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "channel planes do not share dimensions");
    GrayImage out(width, height);
    for (size_t i = 0; i < n; ++i) {
        uint32_t luma = (299u * r[i] + 587u * g[i] + 114u * b[i] + 500u) / 1000u;
        out.data[i] = static_cast<uint8_t>(std::min(luma, 255u));
    }
    return out;
}

// ---------------------------------------------------------------------------
// PGM (binary P5, maxval 255). The bit-exact interchange format for tests.
// ---------------------------------------------------------------------------

namespace detail {

inline int pgm_next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c = in.get();
    // skip whitespace and '#' comments
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok.empty() ? EOF : 0;
}

}  // namespace detail

inline GrayImage read_pgm(std::istream& in, const std::string& name = "<stream>") {
    std::string tok;
    if (detail::pgm_next_token(in, tok) == EOF || tok != "P5")
        throw Error(ErrorCode::UnsupportedFormat, name + " is not a binary PGM (P5)");
    long vals[3];
    for (long& v : vals) {
        if (detail::pgm_next_token(in, tok) == EOF)
            throw Error(ErrorCode::CorruptImage, name + ": truncated PGM header");
        try {
            v = std::stol(tok);
        } catch (const std::exception&) {
            throw Error(ErrorCode::CorruptImage, name + ": bad PGM header token '" + tok + "'");
        }
    }
    long w = vals[0], h = vals[1], maxval = vals[2];
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        throw Error(ErrorCode::UnsupportedFormat, name + ": unsupported PGM geometry/maxval");
    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.size()));
    if (static_cast<size_t>(in.gcount()) != img.size())
        throw Error(ErrorCode::CorruptImage, name + ": truncated PGM pixel data");
    return img;
}

inline void write_pgm(const GrayImage& img, std::ostream& out) {
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.size()));
}

// ---------------------------------------------------------------------------
// PNG via libpng. Any color type is collapsed to 8-bit luma on read.
// ---------------------------------------------------------------------------

namespace detail {

struct PngReadCtx {
    std::istream* in;
};

inline void png_stream_read(png_structp png, png_bytep out, png_size_t len) {
    auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
    ctx->in->read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(len));
    if (static_cast<png_size_t>(ctx->in->gcount()) != len)
        png_error(png, "truncated PNG stream");
}

inline void png_stream_write(png_structp png, png_bytep buf, png_size_t len) {
    auto* out = static_cast<std::ostream*>(png_get_io_ptr(png));
    out->write(reinterpret_cast<const char*>(buf), static_cast<std::streamsize>(len));
}

inline void png_stream_flush(png_structp png) {
    static_cast<std::ostream*>(png_get_io_ptr(png))->flush();
}

}  // namespace detail

inline GrayImage read_png(std::istream& in, const std::string& name = "<stream>") {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(ErrorCode::IoError, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(ErrorCode::IoError, "png_create_info_struct failed");
    }

    std::vector<uint8_t> rgb;
    int width = 0, height = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCode::CorruptImage, name + ": libpng failed to decode");
    }

    detail::PngReadCtx ctx{&in};
    png_set_read_fn(png, &ctx, detail::png_stream_read);
    png_read_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));

    // Normalize every input variant to 8-bit RGB, then collapse to luma.
    png_set_expand(png);
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    png_set_strip_alpha(png);
    int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    rgb.resize(static_cast<size_t>(width) * height * 3);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = rgb.data() + static_cast<size_t>(y) * width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const size_t n = static_cast<size_t>(width) * height;
    std::vector<uint8_t> r(n), g(n), b(n);
    for (size_t i = 0; i < n; ++i) {
        r[i] = rgb[3 * i];
        g[i] = rgb[3 * i + 1];
        b[i] = rgb[3 * i + 2];
    }
    return to_grayscale(r, g, b, width, height);
}

inline void write_png(const GrayImage& img, std::ostream& out) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(ErrorCode::IoError, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(ErrorCode::IoError, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorCode::IoError, "libpng failed to encode");
    }
    png_set_write_fn(png, &out, detail::png_stream_write, detail::png_stream_flush);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_const_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = img.data.data() + static_cast<size_t>(y) * img.width;
    png_write_image(png, const_cast<png_bytepp>(const_cast<png_const_bytep*>(rows.data())));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// ---------------------------------------------------------------------------
// File-level helpers. Format is sniffed from magic bytes on read and picked
// by extension on write (.png -> PNG, everything else -> PGM).
// ---------------------------------------------------------------------------

inline GrayImage load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileNotFound, path);
    char magic[8] = {};
    in.read(magic, 8);
    const std::streamsize got = in.gcount();
    if (got < 2) throw Error(ErrorCode::CorruptImage, path + ": file too short");
    in.clear();
    in.seekg(0);
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (magic[0] == 'P' && magic[1] == '5') return read_pgm(in, path);
    if (got == 8 && std::memcmp(magic, png_sig, 8) == 0) return read_png(in, path);
    throw Error(ErrorCode::UnsupportedFormat, path + ": not a PGM (P5) or PNG file");
}

inline void save_image(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    bool png = path.size() >= 4 && path.compare(path.size() - 4, 4, ".png") == 0;
    if (png)
        write_png(img, out);
    else
        write_pgm(img, out);
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

}  // namespace pano
