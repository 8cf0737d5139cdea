#include <gtest/gtest.h>

#include <filesystem>

#include "cae/cle.hpp"
#include "cae/error.hpp"
#include "cae/random.hpp"

using namespace cae;
using namespace cae::cle;

namespace {

corpus::Column col(std::vector<std::string> entries, std::string id = "t/c") {
  return corpus::Column{std::move(id), std::move(entries)};
}

std::vector<float> column_of(const ColumnMatrix& m, std::size_t pos) {
  std::vector<float> out;
  for (std::size_t b = 0; b < kBits; ++b) out.push_back(m.at(b, pos));
  return out;
}

std::vector<float> as_floats(const std::array<std::uint8_t, kBits>& bits) { return {bits.begin(), bits.end()}; }

std::string random_entry(Rng& rng, std::size_t max_len) {
  std::string s(rng.uniform_index(max_len + 1), '\0');
  for (auto& c : s) c = static_cast<char>(rng.uniform_index(256));
  return s;
}

}  // namespace

TEST(EncodeChar, Examples) {
  EXPECT_EQ(encode_char('a'), (std::array<std::uint8_t, 8>{0, 1, 1, 0, 0, 0, 0, 1}));
  EXPECT_EQ(encode_char(0), (std::array<std::uint8_t, 8>{}));
  EXPECT_EQ(encode_char(255), (std::array<std::uint8_t, 8>{1, 1, 1, 1, 1, 1, 1, 1}));
  EXPECT_THROW(encode_char(256), InvalidArgument);
}

TEST(EncodeChar, ExhaustiveBinaryExpansion) {
  for (unsigned c = 0; c < 256; ++c) {
    const auto bits = encode_char(c);
    unsigned back = 0;
    for (auto b : bits) back = back * 2 + b;
    EXPECT_EQ(back, c);
  }
}

TEST(EncodeEntry, PaddingAndTruncation) {
  const auto m = encode_entry("ab", 3);
  EXPECT_EQ(m.encoded_rows, 2u);
  for (std::size_t b = 0; b < kBits; ++b) {
    EXPECT_EQ(m.at(0, b), encode_char('a')[b]);
    EXPECT_EQ(m.at(1, b), encode_char('b')[b]);
    EXPECT_EQ(m.at(2, b), 0);
  }
  const auto empty = encode_entry("", 2);
  EXPECT_EQ(empty.encoded_rows, 0u);
  EXPECT_EQ(empty.bits, std::vector<std::uint8_t>(16, 0));
  EXPECT_EQ(encode_entry(std::string(300, 'x'), 250).encoded_rows, 250u);
}

TEST(Concatenated, Examples) {
  EncodingConfig cfg{4, Mode::Concatenated};
  const auto m = encode_column_concatenated(col({"ab", "cd"}), cfg);
  EXPECT_EQ(column_of(m, 0), as_floats(encode_char('a')));
  EXPECT_EQ(column_of(m, 3), as_floats(encode_char('d')));

  const auto t = encode_column_concatenated(col({"abcdef"}), cfg);
  EXPECT_EQ(column_of(t, 3), as_floats(encode_char('d')));

  const auto p = encode_column_concatenated(col({"a"}), {3, Mode::Concatenated});
  EXPECT_EQ(column_of(p, 0), as_floats(encode_char('a')));
  EXPECT_EQ(column_of(p, 1), std::vector<float>(8, 0.0f));
  EXPECT_EQ(column_of(p, 2), std::vector<float>(8, 0.0f));
}

TEST(Concatenated, RowOrderSensitive) {
  EncodingConfig cfg{4, Mode::Concatenated};
  EXPECT_NE(encode_column_concatenated(col({"ab", "cd"}), cfg).values,
            encode_column_concatenated(col({"cd", "ab"}), cfg).values);
}

TEST(Concatenated, DecodesBackToTruncatedStream) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> entries(1 + rng.uniform_index(10));
    for (auto& e : entries) e = random_entry(rng, 40);
    const std::size_t L = 1 + rng.uniform_index(120);
    const auto m = encode_column_concatenated(col(entries), {L, Mode::Concatenated});
    std::string stream;
    for (const auto& e : entries) stream += e;
    stream.resize(std::min(stream.size(), L));

    std::string decoded;
    for (std::size_t pos = 0; pos < L; ++pos) {
      unsigned c = 0;
      for (std::size_t b = 0; b < kBits; ++b) c = c * 2 + static_cast<unsigned>(m.at(b, pos));
      decoded.push_back(static_cast<char>(c));
    }
    EXPECT_EQ(decoded.substr(0, stream.size()), stream);
    EXPECT_EQ(decoded.substr(stream.size()), std::string(L - stream.size(), '\0'));
  }
}

TEST(Alternative, Examples) {
  EncodingConfig cfg{4, Mode::Alternative};
  const auto same = encode_column_alternative(col({"ab", "ab"}), cfg);
  const auto single = encode_column_alternative(col({"ab"}), cfg);
  EXPECT_EQ(same.values, single.values);
  const auto entry = encode_entry("ab", 4);
  for (std::size_t pos = 0; pos < 4; ++pos)
    for (std::size_t b = 0; b < kBits; ++b) EXPECT_EQ(single.at(b, pos), entry.at(pos, b));

  const auto ac = encode_column_alternative(col({"a", "c"}), {1, Mode::Alternative});
  EXPECT_EQ(ac.values, (std::vector<float>{0, 1, 1, 0, 0, 0, 0.5f, 1}));

  EXPECT_THROW(encode_column_alternative(col({}), cfg), InvalidArgument);
}

TEST(Alternative, RowPermutationInvariant) {
  Rng rng(17);
  for (int c = 0; c < 20; ++c) {
    std::vector<std::string> entries(1 + rng.uniform_index(60));
    for (auto& e : entries) e = random_entry(rng, 30);
    const EncodingConfig cfg{1 + rng.uniform_index(40), Mode::Alternative};
    const auto reference = encode_column_alternative(col(entries), cfg);
    for (int s = 0; s < 100; ++s) {
      rng.shuffle(entries);
      EXPECT_EQ(encode_column_alternative(col(entries), cfg).values, reference.values);
    }
  }
}

TEST(ColumnMatrix, ShapeAndRangeFuzz) {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> entries(1 + rng.uniform_index(30));
    for (auto& e : entries) e = random_entry(rng, 50);
    const EncodingConfig cfg{1 + rng.uniform_index(64), rng.bernoulli(0.5) ? Mode::Alternative : Mode::Concatenated};
    const auto m = encode_column(col(entries), cfg);
    ASSERT_EQ(m.values.size(), kBits * cfg.cutoff);
    for (float v : m.values) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, 1.0f);
      if (cfg.mode == Mode::Concatenated) {
        EXPECT_TRUE(v == 0.0f || v == 1.0f);
      }
    }
  }
}

TEST(EncodedCache, RoundTripAndErrors) {
  std::vector<ColumnMatrix> ms;
  ms.push_back(encode_column(col({"x1", "y22"}, "a/b"), {5, Mode::Alternative}));
  ms.push_back(encode_column(col({"hello"}, "c/d"), {3, Mode::Concatenated}));
  const auto bytes = serialize_encoded(ms);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "CLE1");
  const auto back = deserialize_encoded(bytes);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].column_id, "a/b");
  EXPECT_EQ(back[0].values, ms[0].values);
  EXPECT_EQ(back[1].config, ms[1].config);

  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(deserialize_encoded(truncated), FormatError);
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(deserialize_encoded(bad), FormatError);

  const auto path = std::filesystem::temp_directory_path() / "cae_test_cache.cle";
  write_encoded(path, ms);
  EXPECT_EQ(read_encoded(path)[1].values, ms[1].values);
}
