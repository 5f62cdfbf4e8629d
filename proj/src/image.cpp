#include "sizenet/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sizenet {

void write_pgm(const std::string& path, const GrayImage& img) {
  if (img.side < 1 ||
      img.pixels.size() != static_cast<std::size_t>(img.side) * img.side) {
    throw std::invalid_argument("write_pgm: inconsistent image dims");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P2\n" << img.side << " " << img.side << "\n255\n";
  for (int r = 0; r < img.side; ++r) {
    for (int c = 0; c < img.side; ++c) {
      const double v = std::clamp(img.at(r, c), 0.0, 1.0);
      const int q = static_cast<int>(std::lround(v * 255.0));
      out << q << (c + 1 == img.side ? "" : " ");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);

  // Token stream with # comments stripped, per the PGM grammar.
  auto next_token = [&in, &path]() -> std::string {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw std::runtime_error(path + ": truncated PGM");
  };

  if (next_token() != "P2") throw std::runtime_error(path + ": not an ASCII PGM");
  auto to_int = [&path](const std::string& t) {
    try {
      return std::stoi(t);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": bad PGM token '" + t + "'");
    }
  };
  const int width = to_int(next_token());
  const int height = to_int(next_token());
  const int maxval = to_int(next_token());
  if (width < 1 || height != width) {
    throw std::runtime_error(path + ": expected square PGM");
  }
  if (maxval < 1 || maxval > 65535) {
    throw std::runtime_error(path + ": bad PGM maxval");
  }

  GrayImage img;
  img.side = width;
  img.pixels.resize(static_cast<std::size_t>(width) * width);
  for (auto& px : img.pixels) {
    const int v = to_int(next_token());
    if (v < 0 || v > maxval) throw std::runtime_error(path + ": pixel out of range");
    px = static_cast<double>(v) / maxval;
  }
  return img;
}

}  // namespace sizenet
