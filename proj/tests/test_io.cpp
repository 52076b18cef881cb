#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsnn/config.hpp"
#include "spinsnn/csv.hpp"
#include "spinsnn/idx.hpp"
#include "spinsnn/parallel.hpp"
#include "spinsnn/rng.hpp"
#include "spinsnn/weights.hpp"

using namespace spinsnn;

namespace {
// Scratch directory for file round trips, unique per process.
std::filesystem::path scratch_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("spinsnn_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string scratch(const std::string& name) { return (scratch_dir() / name).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

bool message_contains(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}
}  // namespace

TEST_CASE("config parses sections, comments and typed values") {
  const std::string text =
      "# run setup\n"
      "[magnet]\n"
      "temperature_K = 300\n"
      "alpha = 1e-2\n"
      "  easy_axis = z   \n"
      "\n"
      "; alt comment style\n"
      "[protocol]\n"
      "pulse_width_s = 0.5e-9\n"
      "trials = 10000\n"
      "thermal_noise = true\n"
      "ideal = no\n";
  const Config cfg = Config::parse_string(text, "run.ini");

  REQUIRE(cfg.has_section("magnet"));
  REQUIRE(cfg.has("magnet", "alpha"));
  REQUIRE(!cfg.has("magnet", "volume_m3"));
  REQUIRE_THAT(cfg.get_double("magnet", "temperature_K"),
               Catch::Matchers::WithinRel(300.0, 1e-12));
  REQUIRE_THAT(cfg.get_double("protocol", "pulse_width_s"),
               Catch::Matchers::WithinRel(0.5e-9, 1e-12));
  REQUIRE(cfg.get_int("protocol", "trials") == 10000);
  REQUIRE(cfg.get_bool("protocol", "thermal_noise"));
  REQUIRE(!cfg.get_bool("protocol", "ideal"));
  REQUIRE(cfg.get_string("magnet", "easy_axis") == "z");

  // Defaults only fill in for absent keys.
  REQUIRE_THAT(cfg.get_double("magnet", "volume_m3", 1e-24),
               Catch::Matchers::WithinRel(1e-24, 1e-12));
  REQUIRE_THAT(cfg.get_double("magnet", "alpha", 0.5),
               Catch::Matchers::WithinRel(0.01, 1e-12));
  REQUIRE(cfg.get_string("magnet", "missing", "fallback") == "fallback");
  REQUIRE(cfg.get_int("protocol", "seed", 42) == 42);
  REQUIRE(cfg.get_bool("protocol", "verbose", false) == false);

  const auto names = cfg.section_names();
  REQUIRE(names == std::vector<std::string>{"magnet", "protocol"});
}

TEST_CASE("config rejects malformed input with file and line") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      Config::parse_string(text, "bad.ini");
      FAIL("expected ConfigError for: " + text);
    } catch (const ConfigError& e) {
      INFO(e.what());
      REQUIRE(message_contains(e, needle));
    }
  };

  expect_error("[magnet]\njust words\n", "bad.ini:2");
  expect_error("key = 1\n", "outside any [section]");
  expect_error("[magnet]\na = 1\na = 2\n", "duplicate key 'a'");
  expect_error("[magnet]\na = 1\na = 2\n", "line 2");
  expect_error("[bad\na = 1\n", "malformed section");
  expect_error("[]\n", "empty section");
  expect_error("[s]\n= 3\n", "empty key");

  const Config cfg = Config::parse_string("[m]\nx = abc\nflag = maybe\nn = 1.5\n", "t.ini");
  try {
    cfg.get_double("m", "x");
    FAIL("expected number error");
  } catch (const ConfigError& e) {
    REQUIRE(message_contains(e, "t.ini:2"));
    REQUIRE(message_contains(e, "not a number"));
  }
  REQUIRE_THROWS_AS(cfg.get_bool("m", "flag"), ConfigError);
  REQUIRE_THROWS_AS(cfg.get_int("m", "n"), ConfigError);
  REQUIRE_THROWS_AS(cfg.get_double("m", "absent"), ConfigError);
  REQUIRE_THROWS_AS(cfg.get_double("nosection", "x"), ConfigError);
}

TEST_CASE("config schema check pinpoints unknown keys") {
  const Config cfg =
      Config::parse_string("[magnet]\nalpha = 0.01\npulse_widht_s = 1e-9\n", "typo.ini");
  try {
    cfg.require_known({{"magnet", {"alpha", "pulse_width_s"}}});
    FAIL("expected unknown-key error");
  } catch (const ConfigError& e) {
    REQUIRE(message_contains(e, "typo.ini:3"));
    REQUIRE(message_contains(e, "pulse_widht_s"));
  }

  const Config extra = Config::parse_string("[rogue]\nx = 1\n", "extra.ini");
  try {
    extra.require_known({{"magnet", {"alpha"}}});
    FAIL("expected unknown-section error");
  } catch (const ConfigError& e) {
    REQUIRE(message_contains(e, "unknown section [rogue]"));
  }

  // A clean file passes.
  REQUIRE_NOTHROW(cfg.require_known({{"magnet", {"alpha", "pulse_widht_s"}}}));
}

TEST_CASE("idx image and label round trip") {
  IdxImages img;
  img.count = 3;
  img.rows = 2;
  img.cols = 4;
  for (int k = 0; k < 24; ++k) img.pixels.push_back(static_cast<std::uint8_t>(k * 7));
  const std::string ipath = scratch("imgs-idx3-ubyte");
  save_idx_images(ipath, img);

  const IdxImages back = load_idx_images(ipath);
  REQUIRE(back.count == 3);
  REQUIRE(back.rows == 2);
  REQUIRE(back.cols == 4);
  REQUIRE(back.pixels == img.pixels);
  REQUIRE(back.image(1)[0] == img.pixels[8]);
  REQUIRE(back.image_size() == 8);

  IdxLabels lab;
  lab.labels = {0, 1, 9};
  const std::string lpath = scratch("labs-idx1-ubyte");
  save_idx_labels(lpath, lab);
  REQUIRE(load_idx_labels(lpath).labels == lab.labels);
}

TEST_CASE("idx loader diagnoses malformed files by offset") {
  // A labels file read as images trips the magic check at offset 0.
  IdxLabels lab;
  lab.labels = {1, 2, 3};
  const std::string lpath = scratch("mislabeled");
  save_idx_labels(lpath, lab);
  try {
    load_idx_images(lpath);
    FAIL("expected magic error");
  } catch (const IdxError& e) {
    REQUIRE(message_contains(e, "offset 0"));
    REQUIRE(message_contains(e, "2051"));
  }
  try {
    load_idx_labels(scratch("imgs-idx3-ubyte"));
    FAIL("expected magic error");
  } catch (const IdxError& e) {
    REQUIRE(message_contains(e, "offset 0"));
    REQUIRE(message_contains(e, "2049"));
  }

  // Truncated header.
  const std::string tpath = scratch("truncated");
  {
    std::ofstream out(tpath, std::ios::binary);
    out.write("\x00\x00\x08\x03\x00\x00", 6);
  }
  try {
    load_idx_images(tpath);
    FAIL("expected truncation error");
  } catch (const IdxError& e) {
    REQUIRE(message_contains(e, "offset 4"));
    REQUIRE(message_contains(e, "truncated"));
  }

  // Payload shorter than the header promises.
  const std::string spath = scratch("short_payload");
  {
    IdxImages img;
    img.count = 2;
    img.rows = 2;
    img.cols = 2;
    img.pixels.assign(8, 42);
    save_idx_images(spath, img);
    // Chop off the last byte.
    std::filesystem::resize_file(spath, std::filesystem::file_size(spath) - 1);
  }
  try {
    load_idx_images(spath);
    FAIL("expected payload error");
  } catch (const IdxError& e) {
    REQUIRE(message_contains(e, "offset 16"));
    REQUIRE(message_contains(e, "7 bytes"));
  }

  REQUIRE_THROWS_AS(load_idx_images(scratch("no_such_file")), IdxError);
}

TEST_CASE("csv table emits stable nine-digit values") {
  CsvTable t({"current_A", "probability", "stderr"});
  t.add_row({71e-6, 0.5, 0.005});
  t.add_row({1.23456789012e-7, 1.0 / 3.0, 0.0});
  REQUIRE(t.row_count() == 2);

  const std::string text = t.str();
  REQUIRE(text ==
          "current_A,probability,stderr\n"
          "7.1e-05,0.5,0.005\n"
          "1.23456789e-07,0.333333333,0\n");

  const std::string path = scratch("table.csv");
  t.save(path);
  REQUIRE(slurp(path) == text);

  REQUIRE_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(CsvTable({}), std::invalid_argument);
}

TEST_CASE("weight matrix file round trip") {
  WeightMatrix m = WeightMatrix::zeros(3, 2);
  m.at(0, 0) = 0.5;
  m.at(0, 1) = -0.125;
  m.at(1, 0) = 1e-3;
  m.at(2, 1) = 42.0;

  const std::string path = scratch("weights.txt");
  save_weights(path, m);

  const std::string text = slurp(path);
  REQUIRE(text.rfind("spinsnn-weights v1 3 2\n", 0) == 0);

  const WeightMatrix back = load_weights(path);
  REQUIRE(back.rows == 3);
  REQUIRE(back.cols == 2);
  REQUIRE(back.w == m.w);  // all values are exactly representable in 9 digits

  REQUIRE_THROWS_AS(WeightMatrix::zeros(0, 2), WeightFileError);
}

TEST_CASE("weight matrix loader rejects malformed files") {
  auto write_and_expect = [](const std::string& name, const std::string& content,
                             const std::string& needle) {
    const std::string path = scratch(name);
    {
      std::ofstream out(path, std::ios::binary);
      out << content;
    }
    try {
      load_weights(path);
      FAIL("expected WeightFileError for " + name);
    } catch (const WeightFileError& e) {
      INFO(e.what());
      REQUIRE(message_contains(e, needle));
    }
  };

  write_and_expect("w_badtag.txt", "weights v1 2 2\n1 2\n3 4\n", "spinsnn-weights");
  write_and_expect("w_badver.txt", "spinsnn-weights v9 2 2\n1 2\n3 4\n", "version");
  write_and_expect("w_baddim.txt", "spinsnn-weights v1 0 2\n", "implausible");
  write_and_expect("w_trailhdr.txt", "spinsnn-weights v1 2 2 extra\n1 2\n3 4\n",
                   "trailing");
  write_and_expect("w_short.txt", "spinsnn-weights v1 2 2\n1 2\n3\n", ":3");
  write_and_expect("w_long.txt", "spinsnn-weights v1 2 2\n1 2 3\n4 5\n", "more than");
  write_and_expect("w_missing.txt", "spinsnn-weights v1 3 2\n1 2\n3 4\n", "missing row");
  write_and_expect("w_extra.txt", "spinsnn-weights v1 2 2\n1 2\n3 4\n5 6\n", "trailing");
  write_and_expect("w_nan.txt", "spinsnn-weights v1 1 2\n1 banana\n", "fewer than");

  REQUIRE_THROWS_AS(load_weights(scratch("w_nonexistent.txt")), WeightFileError);
}

TEST_CASE("parallel map is deterministic across thread counts") {
  const std::size_t n = 1000;

  // Per-index substreams: the classic use.
  auto fill = [&](int threads) {
    std::vector<double> out(n, 0.0);
    const RngStream root(4242, 17);
    parallel_for_indexed(n, threads, [&](std::size_t i) {
      RngStream r = root.substream(static_cast<std::uint64_t>(i));
      out[i] = r.normal();
    });
    return out;
  };
  const auto serial = fill(1);
  REQUIRE(fill(2) == serial);
  REQUIRE(fill(4) == serial);
  REQUIRE(fill(7) == serial);

  // Exceptions surface on the caller.
  REQUIRE_THROWS_AS(parallel_for_indexed(100, 4,
                                         [](std::size_t i) {
                                           if (i == 57) throw std::runtime_error("boom");
                                         }),
                    std::runtime_error);

  REQUIRE_THROWS_AS(parallel_for_indexed(10, 0, [](std::size_t) {}),
                    std::invalid_argument);
  REQUIRE_NOTHROW(parallel_for_indexed(0, 4, [](std::size_t) {
    throw std::runtime_error("never runs");
  }));
}
