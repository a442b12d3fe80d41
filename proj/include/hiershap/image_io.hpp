#pragma once

#include <cstdint>
#include <filesystem>

#include "hiershap/image.hpp"

namespace hiershap::io {

// Reads binary (P5) or ASCII (P2) PGM, binary PPM (P6), or 8-bit PNG
// (gray, gray+alpha, RGB, RGBA; alpha is dropped). Dispatches on the file
// signature, not the extension. Throws InvalidInput on malformed files.
Image read_image(const std::filesystem::path& path);

Image read_pgm(const std::filesystem::path& path);
Image read_png(const std::filesystem::path& path);

// Writes a P5 PGM; samples are rounded and clamped to [0, 255].
void write_pgm(const std::filesystem::path& path, const Grid<std::uint8_t>& gray);
void write_pgm(const std::filesystem::path& path, const GrayImage& gray);

// 8-bit PNG with 1 or 3 channels.
void write_png(const std::filesystem::path& path, const Image& image);

}  // namespace hiershap::io
