#include "flowmotion/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>

#include "flowmotion/error.hpp"

namespace flowmotion::io {
namespace {

namespace fs = std::filesystem;

const fs::path kData = FLOWMOTION_TEST_DATA;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("flowmotion_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

std::string bytes_of(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void put_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

TEST_F(IoTest, GoldenOneByOneFixture) {
  const auto f = read_flow(kData / "golden_1x1.flo");
  EXPECT_EQ(f.width(), 1);
  EXPECT_EQ(f.height(), 1);
  EXPECT_EQ(f.at(0, 0), (FlowVec{3.0, 4.0}));
  write_flow(f, dir_ / "copy.flo");
  EXPECT_EQ(bytes_of(dir_ / "copy.flo"), bytes_of(kData / "golden_1x1.flo"));
}

TEST_F(IoTest, ZeroTwoByTwoIsFortyFourBytes) {
  write_flow(FlowField(2, 2), dir_ / "z.flo");
  EXPECT_EQ(fs::file_size(dir_ / "z.flo"), 4u + 4u + 4u + 32u);
  EXPECT_EQ(bytes_of(dir_ / "z.flo"), bytes_of(kData / "golden_2x2_zero.flo"));
}

TEST_F(IoTest, RandomFieldRoundTripsByteIdentically) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<float> d(-100.f, 100.f);
  FlowField f(17, 13);
  for (auto& x : f.u()) x = d(rng);
  for (auto& x : f.v()) x = d(rng);
  write_flow(f, dir_ / "a.flo");
  const auto back = read_flow(dir_ / "a.flo");
  EXPECT_EQ(back, f);
  write_flow(back, dir_ / "b.flo");
  EXPECT_EQ(bytes_of(dir_ / "a.flo"), bytes_of(dir_ / "b.flo"));

  // Explicit layout: interleaved (u, v) after the 12-byte header.
  const auto bytes = bytes_of(dir_ / "a.flo");
  float v5 = 0.0f;
  std::memcpy(&v5, bytes.data() + 12 + 5 * 8 + 4, 4);
  EXPECT_EQ(v5, f.v()[5]);
}

TEST_F(IoTest, FlowErrors) {
  auto golden = bytes_of(kData / "golden_1x1.flo");

  auto bad_magic = golden;
  std::fill(bad_magic.begin(), bad_magic.begin() + 4, '\0');
  put_bytes(dir_ / "magic.flo", bad_magic);
  EXPECT_EQ(code_of([&] { read_flow(dir_ / "magic.flo"); }), ErrorCode::BadMagic);

  put_bytes(dir_ / "short.flo", golden.substr(0, 16));
  EXPECT_EQ(code_of([&] { read_flow(dir_ / "short.flo"); }), ErrorCode::TruncatedFile);
  put_bytes(dir_ / "header.flo", golden.substr(0, 8));
  EXPECT_EQ(code_of([&] { read_flow(dir_ / "header.flo"); }), ErrorCode::TruncatedFile);

  auto zero_dims = golden;
  std::fill(zero_dims.begin() + 4, zero_dims.begin() + 8, '\0');
  put_bytes(dir_ / "dims.flo", zero_dims);
  EXPECT_EQ(code_of([&] { read_flow(dir_ / "dims.flo"); }), ErrorCode::NonPositiveDims);

  auto nan = golden;
  const float q = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan.data() + 12, &q, 4);
  put_bytes(dir_ / "nan.flo", nan);
  EXPECT_EQ(code_of([&] { read_flow(dir_ / "nan.flo"); }), ErrorCode::NonFiniteValues);

  EXPECT_EQ(code_of([&] { read_flow(dir_ / "missing.flo"); }), ErrorCode::IoFailure);
  EXPECT_EQ(code_of([&] { write_flow(FlowField(1, 1), dir_ / "no" / "such" / "dir.flo"); }), ErrorCode::IoFailure);
}

TEST_F(IoTest, MaskRoundTrips) {
  const ForegroundMask zero(3, 3);
  write_mask(zero, dir_ / "zero.pgm");
  EXPECT_EQ(read_mask(dir_ / "zero.pgm"), zero);
  EXPECT_EQ(bytes_of(dir_ / "zero.pgm"), std::string("P5 3 3 255\n") + std::string(9, '\0'));

  ForegroundMask one(5, 4);
  one.set(4, 2, true);
  write_mask(one, dir_ / "one.pgm");
  EXPECT_EQ(read_mask(dir_ / "one.pgm"), one);

  const auto golden = read_mask(kData / "golden_mask_3x2.pgm");
  EXPECT_TRUE(golden.at(1, 0));
  EXPECT_TRUE(golden.at(2, 1));
  EXPECT_EQ(golden.count(), 2u);
  write_mask(golden, dir_ / "golden.pgm");
  EXPECT_EQ(bytes_of(dir_ / "golden.pgm"), bytes_of(kData / "golden_mask_3x2.pgm"));
}

TEST_F(IoTest, MaskErrors) {
  put_bytes(dir_ / "seven.pgm", std::string("P5 2 1 255\n") + '\0' + '\x07');
  EXPECT_EQ(code_of([&] { read_mask(dir_ / "seven.pgm"); }), ErrorCode::BadPixelValue);
  put_bytes(dir_ / "p2.pgm", std::string("P2 2 1 255\n") + std::string(2, '\0'));
  EXPECT_EQ(code_of([&] { read_mask(dir_ / "p2.pgm"); }), ErrorCode::BadHeader);
  put_bytes(dir_ / "max.pgm", std::string("P5 2 1 1\n") + std::string(2, '\0'));
  EXPECT_EQ(code_of([&] { read_mask(dir_ / "max.pgm"); }), ErrorCode::BadHeader);
  put_bytes(dir_ / "noeol.pgm", "P5 2 1 255");
  EXPECT_EQ(code_of([&] { read_mask(dir_ / "noeol.pgm"); }), ErrorCode::BadHeader);
  put_bytes(dir_ / "short.pgm", std::string("P5 4 4 255\n") + std::string(3, '\0'));
  EXPECT_EQ(code_of([&] { read_mask(dir_ / "short.pgm"); }), ErrorCode::TruncatedFile);
}

TEST_F(IoTest, MaskAndFlowRoundTripProperty) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dim(1, 40);
  std::bernoulli_distribution bit(0.3);
  std::normal_distribution<float> val(0.f, 50.f);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = dim(rng), h = dim(rng);
    ForegroundMask m(w, h);
    FlowField f(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        m.set(x, y, bit(rng));
        f.set(x, y, {val(rng), val(rng)});
      }
    }
    write_mask(m, dir_ / "m.pgm");
    write_flow(f, dir_ / "f.flo");
    const auto mb = bytes_of(dir_ / "m.pgm");
    const auto fb = bytes_of(dir_ / "f.flo");
    write_mask(read_mask(dir_ / "m.pgm"), dir_ / "m2.pgm");
    write_flow(read_flow(dir_ / "f.flo"), dir_ / "f2.flo");
    EXPECT_EQ(bytes_of(dir_ / "m2.pgm"), mb);
    EXPECT_EQ(bytes_of(dir_ / "f2.flo"), fb);
  }
}

class ManifestTest : public IoTest {
 protected:
  void SetUp() override {
    IoTest::SetUp();
    for (int i = 1; i <= 3; ++i) {
      write_flow(FlowField(4, 3), dir_ / ("f" + std::to_string(i) + ".flo"));
      write_mask(ForegroundMask(4, 3), dir_ / ("m" + std::to_string(i) + ".pgm"));
    }
    write_flow(FlowField(5, 3), dir_ / "wide.flo");
    write_mask(ForegroundMask(5, 3), dir_ / "wide.pgm");
  }

  fs::path manifest(const std::string& text) {
    put_bytes(dir_ / "manifest.txt", text);
    return dir_ / "manifest.txt";
  }
};

TEST_F(ManifestTest, ValidThreeLineManifest) {
  const auto m = load_manifest(manifest("# comment\n1 f1.flo m1.pgm\n2 f2.flo m2.pgm\n\n5 f3.flo m3.pgm\n"));
  ASSERT_EQ(m.entries.size(), 3u);
  EXPECT_EQ(m.width, 4);
  EXPECT_EQ(m.height, 3);
  EXPECT_EQ(m.entries[2].frame_index, 5);
  EXPECT_EQ(m.entries[0].flow_path, dir_ / "f1.flo");
  EXPECT_TRUE(m.has_ground_truth());

  const auto no_gt = load_manifest(manifest("1 f1.flo\n2 f2.flo\n"));
  EXPECT_FALSE(no_gt.has_ground_truth());
  EXPECT_FALSE(no_gt.entries[0].gt_mask_path.has_value());
}

TEST_F(ManifestTest, Errors) {
  EXPECT_EQ(code_of([&] { load_manifest(manifest("2 f1.flo\n1 f2.flo\n")); }), ErrorCode::NonMonotoneIndices);
  EXPECT_EQ(code_of([&] { load_manifest(manifest("1 f1.flo\n1 f2.flo\n")); }), ErrorCode::NonMonotoneIndices);
  EXPECT_EQ(code_of([&] { load_manifest(manifest("1 f1.flo\n2 nothere.flo\n")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { load_manifest(manifest("1 f1.flo nothere.pgm\n")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { load_manifest(manifest("x f1.flo\n")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { load_manifest(manifest("1\n")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { load_manifest(manifest("1 f1.flo m1.pgm extra\n")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { load_manifest(manifest("1 f1.flo\n2 wide.flo\n")); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] { load_manifest(manifest("1 f1.flo wide.pgm\n")); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] { load_manifest(dir_ / "absent.txt"); }), ErrorCode::ParseError);
}

TEST_F(ManifestTest, WriteThenLoad) {
  SequenceManifest m;
  m.entries.push_back({1, "f1.flo", fs::path("m1.pgm")});
  m.entries.push_back({2, "f2.flo", std::nullopt});
  write_manifest(m, dir_ / "written.txt");
  const auto back = load_manifest(dir_ / "written.txt");
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(back.entries[1].flow_path, dir_ / "f2.flo");
  EXPECT_FALSE(back.entries[1].gt_mask_path.has_value());
}

}  // namespace
}  // namespace flowmotion::io
