#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sizenet/csv.hpp"
#include "sizenet/image.hpp"
#include "sizenet/rng.hpp"

using namespace sizenet;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path =
      std::filesystem::temp_directory_path() / ("sizenet_test_" + name);
  std::ofstream out(path);
  out << content;
  return path.string();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("sizenet_test_" + name))
      .string();
}

}  // namespace

TEST_CASE("read_lines keeps original numbering and skips blanks") {
  const auto path = temp_file("lines.txt", "one\n\n  \nfour\r\nfive");
  const auto lines = read_lines(path);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].number == 1);
  CHECK(lines[0].text == "one");
  CHECK(lines[1].number == 4);
  CHECK(lines[1].text == "four");  // carriage return stripped
  CHECK(lines[2].number == 5);
  CHECK(lines[2].text == "five");

  CHECK_THROWS_AS(read_lines(temp_path("no_such_file.txt")),
                  std::runtime_error);
}

TEST_CASE("split_fields keeps empty fields") {
  const auto fields = split_fields("a,,c,");
  REQUIRE(fields.size() == 4);
  CHECK(fields[0] == "a");
  CHECK(fields[1].empty());
  CHECK(fields[2] == "c");
  CHECK(fields[3].empty());
  CHECK(split_fields("solo").size() == 1);
}

TEST_CASE("strict parsers consume the whole field") {
  CHECK(parse_long("42", "t:1") == 42);
  CHECK(parse_long("-7", "t:1") == -7);
  CHECK(parse_double("2.5e-3", "t:1") == 2.5e-3);
  CHECK(parse_double("-0.5", "t:1") == -0.5);

  CHECK_THROWS_AS(parse_long("12x", "t:1"), std::runtime_error);
  CHECK_THROWS_AS(parse_long("", "t:1"), std::runtime_error);
  CHECK_THROWS_AS(parse_long("3.5", "t:1"), std::runtime_error);
  CHECK_THROWS_AS(parse_double("nanx", "t:1"), std::runtime_error);
  CHECK_THROWS_AS(parse_double("", "t:1"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_long("oops", "sales.csv:12"),
                       doctest::Contains("sales.csv:12"), std::runtime_error);
  CHECK_THROWS_AS(parse_long("99999999999999999999999", "t:1"),
                  std::runtime_error);
}

TEST_CASE("fmt_g9 round-trips through the strict parser") {
  for (double v : {0.0, 1.0, -2.5, 0.333333333, 1e-7, 12345.678}) {
    CHECK(parse_double(fmt_g9(v), "t:1") == doctest::Approx(v).epsilon(1e-9));
  }
}

TEST_CASE("text files round-trip") {
  const auto path = temp_path("roundtrip.txt");
  write_text_file(path, "hello\nworld\n");
  CHECK(read_text_file(path) == "hello\nworld\n");
}

TEST_CASE("pgm files quantize to 8 bits and round-trip") {
  GrayImage img;
  img.side = 5;
  img.pixels.resize(25);
  Rng rng(3);
  for (auto& v : img.pixels) v = rng.uniform01();
  img.pixels[0] = 0.0;
  img.pixels[1] = 1.0;
  img.pixels[2] = -0.5;  // clamped on write
  img.pixels[3] = 1.5;

  const auto path = temp_path("img.pgm");
  write_pgm(path, img);
  const auto back = read_pgm(path);
  REQUIRE(back.side == 5);
  CHECK(back.pixels[0] == 0.0);
  CHECK(back.pixels[1] == 1.0);
  CHECK(back.pixels[2] == 0.0);
  CHECK(back.pixels[3] == 1.0);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const double clamped = std::min(1.0, std::max(0.0, img.pixels[i]));
    CHECK(std::abs(back.pixels[i] - clamped) <= 0.5 / 255.0 + 1e-12);
  }

  const auto header = read_text_file(path);
  CHECK(header.substr(0, 3) == "P2\n");
}

TEST_CASE("read_pgm rejects malformed files") {
  CHECK_THROWS_AS(read_pgm(temp_file("bad1.pgm", "P5\n2 2\n255\n0 0 0 0\n")),
                  std::runtime_error);
  CHECK_THROWS_AS(read_pgm(temp_file("bad2.pgm", "P2\n2 3\n255\n0 0 0 0 0 0\n")),
                  std::runtime_error);
  CHECK_THROWS_AS(read_pgm(temp_file("bad3.pgm", "P2\n2 2\n255\n0 0 0\n")),
                  std::runtime_error);
  CHECK_THROWS_AS(read_pgm(temp_file("bad4.pgm", "P2\n2 2\n70000\n0 0 0 0\n")),
                  std::runtime_error);

  // comments and flexible whitespace are fine
  const auto ok = read_pgm(temp_file(
      "ok.pgm", "P2 # format\n# comment line\n2 2\n255\n0 128\n255 64\n"));
  CHECK(ok.side == 2);
  CHECK(ok.at(1, 0) == 1.0);
}
