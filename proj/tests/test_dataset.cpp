#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dcidc/dataset.hpp"
#include "dcidc/error.hpp"
#include "oracles.hpp"

using namespace dcidc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dcidc_test_dataset";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("csv") {
  const fs::path p = scratch("small.csv");
  write_text(p, "1,2\n3.5,-4\n5e-1, 6\n");
  const Dataset ds = load(p, Format::Csv);
  CHECK(ds.features == Matrix{{1, 2}, {3.5, -4}, {0.5, 6}});
  CHECK_FALSE(ds.labels.has_value());

  write_text(p, "1,2\n3\n");
  try {
    load(p, Format::Csv);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  write_text(p, "1,abc\n");
  CHECK_THROWS_AS(load(p, Format::Csv), ParseError);
  write_text(p, "1,nan\n");
  CHECK_THROWS_AS(load(p, Format::Csv), ParseError);
  CHECK_THROWS_AS(load(scratch("missing.csv"), Format::Csv), IoError);
}

TEST_CASE("dcmx") {
  SUBCASE("byte layout") {
    const std::string bytes = encode_dcmx(Matrix{{1.0, -2.0}});
    REQUIRE(bytes.size() == 13 + 8);
    CHECK(bytes.substr(0, 4) == "DCMX");
    CHECK(bytes[4] == '\x01');
    CHECK(bytes.substr(5, 4) == std::string("\x01\x00\x00\x00", 4));
    CHECK(bytes.substr(9, 4) == std::string("\x02\x00\x00\x00", 4));
    // 1.0f = 0x3f800000, -2.0f = 0xc0000000, little-endian
    CHECK(bytes.substr(13, 4) == std::string("\x00\x00\x80\x3f", 4));
    CHECK(bytes.substr(17, 4) == std::string("\x00\x00\x00\xc0", 4));
  }

  SUBCASE("save and load round-trip exactly") {
    Rng rng(3);
    Matrix m = oracle::random_matrix(7, 5, rng, -100, 100);
    // Representable in float32 so the round trip is exact.
    for (double& v : m.values()) v = static_cast<float>(v);
    const fs::path p = scratch("m.dcmx");
    write_dcmx(p, m);
    CHECK(read_dcmx(p) == m);
    CHECK(encode_dcmx(read_dcmx(p)) == encode_dcmx(m));
  }

  SUBCASE("truncated payload names both byte counts") {
    std::string bytes = encode_dcmx(Matrix(3, 2, 1.0));
    bytes.resize(bytes.size() - 3);
    try {
      decode_dcmx(bytes);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      const std::string what = e.what();
      CHECK(what.find("37") != std::string::npos);
      CHECK(what.find("34") != std::string::npos);
    }
  }

  SUBCASE("bad header") {
    CHECK_THROWS_AS(decode_dcmx("DCM"), ParseError);
    CHECK_THROWS_AS(decode_dcmx(std::string("XCMX\x01", 5) + std::string(8, '\0')), ParseError);
    CHECK_THROWS_AS(decode_dcmx(std::string("DCMX\x02", 5) + std::string(8, '\0')), ParseError);
    std::string inf = encode_dcmx(Matrix(1, 1));
    inf.replace(13, 4, std::string("\x00\x00\x80\x7f", 4));
    CHECK_THROWS_AS(decode_dcmx(inf), ParseError);
  }

  SUBCASE("companion labels") {
    const fs::path p = scratch("with_labels.dcmx");
    write_dcmx(p, Matrix(3, 2, 0.5));
    write_labels(companion_labels_path(p), {2, 0, 1});
    CHECK(companion_labels_path(p).filename() == "with_labels.labels.csv");
    const Dataset ds = load(p, Format::Dcmx);
    CHECK(*ds.labels == LabelVector{2, 0, 1});
    write_labels(companion_labels_path(p), {2, 0});
    CHECK_THROWS_AS(load(p, Format::Dcmx), ShapeError);
    fs::remove(companion_labels_path(p));
  }
}

TEST_CASE("normalize") {
  Dataset ds;
  ds.features = Matrix{{0, 7, 1}, {5, 7, 2}, {10, 7, 6}};
  const Dataset mm = normalize(ds, Normalization::MinMaxPerBand);
  CHECK(mm.features(0, 0) == 0.0);
  CHECK(mm.features(1, 0) == 0.5);
  CHECK(mm.features(2, 0) == 1.0);
  for (std::size_t r = 0; r < 3; ++r) CHECK(mm.features(r, 1) == 0.0);

  SUBCASE("zscore statistics") {
    Rng rng(8);
    Dataset big;
    big.features = oracle::random_matrix(200, 4, rng, -50, 300);
    const Dataset z = normalize(big, Normalization::ZScorePerBand);
    for (std::size_t c = 0; c < 4; ++c) {
      double mean = 0, var = 0;
      for (std::size_t r = 0; r < 200; ++r) mean += z.features(r, c);
      mean /= 200;
      for (std::size_t r = 0; r < 200; ++r) var += (z.features(r, c) - mean) * (z.features(r, c) - mean);
      var /= 200;
      CHECK(std::abs(mean) < 1e-10);
      CHECK(std::abs(var - 1.0) < 1e-9);
    }
  }

  SUBCASE("denormalize restores the features") {
    Rng rng(9);
    Dataset big;
    big.features = oracle::random_matrix(50, 3, rng, 100, 4000);
    for (Normalization mode : {Normalization::MinMaxPerBand, Normalization::ZScorePerBand}) {
      const Dataset n = normalize(big, mode);
      const Matrix back = denormalize(n.features, n.meta.normalization);
      for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(std::abs(back.values()[i] - big.features.values()[i]) <=
              1e-9 * std::abs(big.features.values()[i]));
      }
    }
  }
}

TEST_CASE("mask_unlabeled") {
  Dataset ds;
  ds.features = Matrix{{1, 1}, {2, 2}, {3, 3}, {4, 4}};
  ds.labels = LabelVector{0, 1, 0, 2};
  ds.meta.original_rows = 4;
  const Dataset m = mask_unlabeled(ds);
  CHECK(m.features == Matrix{{2, 2}, {4, 4}});
  CHECK(*m.labels == LabelVector{0, 1});
  CHECK(*m.mask == std::vector<std::size_t>{1, 3});

  SUBCASE("no background only relabels densely") {
    Dataset d2 = ds;
    d2.labels = LabelVector{3, 5, 3, 9};
    const Dataset m2 = mask_unlabeled(d2);
    CHECK(m2.features == ds.features);
    CHECK(*m2.labels == LabelVector{0, 1, 0, 2});
  }

  SUBCASE("scatter back to the full map") {
    const auto full = scatter_labels({5, 7}, *m.mask, 4);
    CHECK(full == std::vector<std::int64_t>{kMaskedPixel, 5, kMaskedPixel, 7});
    // gather
    for (std::size_t i = 0; i < m.mask->size(); ++i)
      CHECK(full[(*m.mask)[i]] == static_cast<std::int64_t>(LabelVector{5, 7}[i]));
  }

  Dataset empty = ds;
  empty.labels = LabelVector{0, 0, 0, 0};
  CHECK_THROWS_AS(mask_unlabeled(empty), ConfigError);
  Dataset unlabeled = ds;
  unlabeled.labels.reset();
  CHECK_THROWS_AS(mask_unlabeled(unlabeled), ConfigError);
}

TEST_CASE("synth_blobs") {
  SUBCASE("zero noise puts every point on its center") {
    const Dataset ds = synth_blobs(5, 3, 4, 2.0, 0.0, 1);
    const Matrix centers = synth_blob_centers(3, 4, 2.0, 1);
    for (std::size_t r = 0; r < 15; ++r)
      for (std::size_t d = 0; d < 4; ++d) CHECK(ds.features(r, d) == centers((*ds.labels)[r], d));
  }

  SUBCASE("deterministic") {
    const Dataset a = synth_blobs(20, 3, 10, 6, 1, 5);
    const Dataset b = synth_blobs(20, 3, 10, 6, 1, 5);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    CHECK_FALSE(synth_blobs(20, 3, 10, 6, 1, 6).features == a.features);
  }

  SUBCASE("centers respect the separation") {
    const Matrix c = synth_blob_centers(6, 3, 4.0, 2);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = i + 1; j < 6; ++j) {
        double d = 0;
        for (std::size_t x = 0; x < 3; ++x) d += (c(i, x) - c(j, x)) * (c(i, x) - c(j, x));
        CHECK(std::sqrt(d) >= 4.0);
      }
  }

  SUBCASE("separation ten noise widths is nearly perfectly separable") {
    const Dataset ds = synth_blobs(300, 4, 10, 10.0, 1.0, 3);
    const Matrix c = synth_blob_centers(4, 10, 10.0, 3);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < ds.features.rows(); ++r) {
      std::size_t best = 0;
      double best_d = 1e300;
      for (std::size_t k = 0; k < 4; ++k) {
        double d = 0;
        for (std::size_t x = 0; x < 10; ++x) d += std::pow(ds.features(r, x) - c(k, x), 2);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (best == (*ds.labels)[r]) ++hits;
    }
    CHECK(static_cast<double>(hits) / ds.features.rows() >= 0.999);
  }

  CHECK_THROWS_AS(synth_blobs(5, 1, 2, 1.0, 0.1, 1), ConfigError);
  CHECK_THROWS_AS(synth_blobs(5, 2, 2, 0.0, 0.1, 1), ConfigError);
}

TEST_CASE("labels and pgm") {
  const fs::path p = scratch("labels.csv");
  write_labels(p, {3, 0, 12});
  CHECK(read_labels(p) == LabelVector{3, 0, 12});
  write_text(p, "1\n-2\n");
  CHECK_THROWS_AS(read_labels(p), ParseError);

  const fs::path pgm = scratch("map.pgm");
  write_label_pgm(pgm, {0, 1, kMaskedPixel, 2, 0, 1}, 2, 3, 3);
  std::ifstream in(pgm, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), {});
  CHECK(bytes.substr(0, 11) == "P5\n3 2\n255\n");
  CHECK(bytes.size() == 11 + 6);
  CHECK(static_cast<unsigned char>(bytes[11 + 2]) == 0);
  CHECK(static_cast<unsigned char>(bytes[11 + 0]) == 85);
  CHECK_THROWS_AS(write_label_pgm(pgm, {0, 1}, 2, 3, 2), ShapeError);
}
