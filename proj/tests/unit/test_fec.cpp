#include <doctest.h>

#include <sstream>

#include "../support/oracles.hpp"
#include "ofdm/baseline/demapper.hpp"
#include "ofdm/errors.hpp"
#include "ofdm/fec/alist.hpp"
#include "ofdm/fec/bp_decoder.hpp"
#include "ofdm/fec/framing.hpp"
#include "ofdm/fec/peg.hpp"

using namespace ofdm;

namespace {

const LdpcCode& shipped() {
  static const LdpcCode code = load_alist(std::string(OFDM_DATA_DIR) + "/codes/peg_1024_r23.alist");
  return code;
}

Bits random_bits(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<int> b(0, 1);
  Bits out(n);
  for (auto& x : out) x = static_cast<std::uint8_t>(b(rng));
  return out;
}

// (7,4) Hamming code.
LdpcCode hamming() { return LdpcCode(7, {{0, 1, 2, 4}, {0, 1, 3, 5}, {0, 2, 3, 6}}); }

}  // namespace

TEST_CASE("shipped code dimensions and structure") {
  const auto& code = shipped();
  CHECK(code.n() == 1024);
  CHECK(code.k() == 683);
  CHECK(code.rank() == 341);
  CHECK(code.rate() == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
  CHECK(tanner_girth(code) >= 6);
  for (int i = 0; i < code.k(); ++i) REQUIRE(code.info_positions()[i] == i);

  // The committed fixture is what the generator produces.
  std::ostringstream a, b;
  write_alist(a, code);
  write_alist(b, make_peg_code({}));
  CHECK(a.str() == b.str());
}

TEST_CASE("encoder output satisfies every parity check") {
  Rng rng(21);
  const auto& code = shipped();
  const Bits zero = code.encode(Bits(683, 0));
  CHECK(std::all_of(zero.begin(), zero.end(), [](auto x) { return x == 0; }));
  for (int t = 0; t < 50; ++t) {
    const Bits info = random_bits(683, rng);
    const Bits cw = code.encode(info);
    REQUIRE(code.satisfies(cw));
    CHECK(code.extract_info(cw) == info);
  }
  CHECK_THROWS_AS(code.encode(Bits(682, 0)), ShapeError);

  // Exhaustive over a small code: codeword count = 2^k, all in the null space.
  const auto h = hamming();
  CHECK(h.k() == 4);
  for (int m = 0; m < 16; ++m) {
    Bits info{std::uint8_t(m >> 3 & 1), std::uint8_t(m >> 2 & 1), std::uint8_t(m >> 1 & 1), std::uint8_t(m & 1)};
    CHECK(h.satisfies(h.encode(info)));
  }
  // Redundant rows lower the rank, not the code.
  const LdpcCode redundant(7, {{0, 1, 2, 4}, {0, 1, 3, 5}, {0, 2, 3, 6}, {2, 3, 4, 5}});
  CHECK(redundant.rank() == 3);
  CHECK(redundant.k() == 4);
}

TEST_CASE("alist parser round trip and strict validation") {
  const auto h = hamming();
  std::ostringstream os;
  write_alist(os, h);
  std::istringstream is(os.str());
  const auto back = read_alist(is);
  CHECK(back.checks() == h.checks());

  // Zero padding on adjacency lines is accepted.
  std::istringstream padded("3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n");
  CHECK(read_alist(padded).n() == 3);

  auto bad = [](const std::string& text) {
    std::istringstream s(text);
    CHECK_THROWS_AS(read_alist(s, "bad"), ParseError);
  };
  bad("");
  bad("3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n1\n1 2\n2 3\n");           // disagreeing lists
  bad("3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n9\n1 2\n2 3\n");           // out of range
  bad("3 2\n2 2\n1 2 1\n2 2\n1\n1 x\n2\n1 2\n2 3\n");           // junk token
  bad("3 2\n3 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n2 3\n");           // wrong max degree
  bad("3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n");                // truncated
}

TEST_CASE("BP decoding: noiseless, strong, single flip") {
  Rng rng(22);
  const auto& code = shipped();
  const BpDecoder dec(code);
  const Bits info = random_bits(683, rng);
  const Bits cw = code.encode(info);

  std::vector<double> llr(1024);
  for (int i = 0; i < 1024; ++i) llr[i] = cw[i] ? 1e6 : -1e6;
  auto res = dec.decode(llr);
  CHECK(res.converged);
  CHECK(res.iterations <= 1);
  CHECK(code.extract_info(res.bits) == info);

  for (int trial = 0; trial < 20; ++trial) {
    for (int i = 0; i < 1024; ++i) llr[i] = cw[i] ? 8.0 : -8.0;
    const int flip = std::uniform_int_distribution<int>(0, 1023)(rng);
    llr[flip] = -llr[flip];
    res = dec.decode(llr);
    CHECK(res.converged);
    CHECK(res.iterations > 0);
    CHECK(res.bits == cw);
  }

  // Deterministic and length-checked.
  for (auto& v : llr) v = std::normal_distribution<>(0, 2)(rng);
  CHECK(dec.decode(llr).bits == dec.decode(llr).bits);
  CHECK_THROWS_AS(dec.decode(std::span<const double>(llr.data(), 1000)), ShapeError);
  llr[3] = std::nan("");
  CHECK_THROWS_AS(dec.decode(llr), NumericalError);
}

TEST_CASE("coded BER is below uncoded BER on BPSK-AWGN through the waterfall") {
  Rng rng(23);
  const auto& code = shipped();
  const BpDecoder dec(code);
  double prev_coded = 1.0;
  for (double ebn0_db : {2.0, 3.0, 4.0}) {
    const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    const double sigma = std::sqrt(1.0 / (2.0 * code.rate() * ebn0));  // real noise std for +-1 symbols
    long coded_err = 0, raw_err = 0, bits = 0;
    std::normal_distribution<> noise(0.0, sigma);
    for (int f = 0; f < 60; ++f) {
      const Bits info = random_bits(683, rng);
      const Bits cw = code.encode(info);
      std::vector<double> llr(1024);
      for (int i = 0; i < 1024; ++i) {
        const double y = (cw[i] ? 1.0 : -1.0) + noise(rng);
        llr[i] = 2.0 * y / (sigma * sigma);
        raw_err += (y > 0) != (cw[i] == 1);
      }
      const auto out = code.extract_info(dec.decode(llr).bits);
      for (int i = 0; i < 683; ++i) coded_err += out[i] != info[i];
      bits += 683;
    }
    const double coded = double(coded_err) / bits;
    const double uncoded = double(raw_err) / (60.0 * 1024);
    MESSAGE("Eb/N0 " << ebn0_db << " dB: uncoded " << uncoded << ", coded " << coded);
    CHECK(coded <= uncoded);
    CHECK(coded <= prev_coded);
    prev_coded = coded;
  }
  CHECK(prev_coded < 1e-3);
}

TEST_CASE("frame layout, packing and unpacking") {
  const auto gs = make_frame_layout(1008, 4);
  CHECK(gs.padding_bits() == 960);
  CHECK(make_frame_layout(1008 - 72, 4).padding_bits() == 3744 - 3072);
  CHECK_THROWS_AS(make_frame_layout(700, 4), ConfigError);

  std::vector<int> sorted = gs.permutation;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < gs.frame_bits(); ++i) REQUIRE(sorted[i] == i);

  Rng rng(24);
  std::vector<Bits> cws;
  for (int c = 0; c < 3; ++c) cws.push_back(random_bits(1024, rng));
  const Bits tx = frame_pack(cws, gs, rng);
  REQUIRE(static_cast<int>(tx.size()) == 4032);
  std::vector<double> llr(tx.size());
  for (std::size_t i = 0; i < tx.size(); ++i) llr[i] = tx[i] ? 5.0 : -5.0;
  const auto parts = frame_unpack(llr, gs);
  REQUIRE(parts.size() == 3);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 1024; ++i) REQUIRE((parts[c][i] > 0) == (cws[c][i] == 1));

  // Corrupting only padding positions leaves every codeword LLR untouched.
  std::vector<double> corrupted = llr;
  for (std::size_t i = 0; i < tx.size(); ++i)
    if (gs.permutation[i] >= gs.coded_bits()) corrupted[i] = -corrupted[i];
  const auto same = frame_unpack(corrupted, gs);
  for (int c = 0; c < 3; ++c) CHECK((same[c] == parts[c]).all());
}
