#include "sqglab/snapshot_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace sqglab {

namespace {

constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void bytes(const char* p, std::size_t n) { out_.append(p, n); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}
  void need(std::size_t n) const {
    if (pos_ + n > s_.size()) throw FormatError("snapshot truncated at byte " + std::to_string(pos_));
  }
  std::string magic() {
    need(4);
    auto m = s_.substr(pos_, 4);
    pos_ += 4;
    return m;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  bool done() const { return pos_ == s_.size(); }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

void write_grid(Writer& w, const Grid& g) {
  w.u32(static_cast<std::uint32_t>(g.dim()));
  for (auto d : g.dims()) w.u64(d);
  for (auto l : g.lengths()) w.f64(l);
}

Grid read_grid(Reader& r) {
  const auto n = r.u32();
  if (n < 1 || n > 3) throw FormatError("snapshot dimension " + std::to_string(n) + " unsupported");
  std::vector<std::size_t> dims(n);
  std::vector<double> lengths(n);
  for (auto& d : dims) {
    const auto v = r.u64();
    if (v > (std::uint64_t{1} << 24)) throw FormatError("snapshot dim too large");
    d = static_cast<std::size_t>(v);
  }
  for (auto& l : lengths) l = r.f64();
  try {
    return Grid(std::move(dims), std::move(lengths));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("snapshot grid invalid: ") + e.what());
  }
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void check_header(Reader& r, const char* magic) {
  if (r.magic() != magic) throw FormatError(std::string("bad magic, expected ") + magic);
  const auto v = r.u32();
  if (v != kVersion) throw FormatError("unsupported snapshot version " + std::to_string(v));
}

}  // namespace

std::string encode_sqgf(const PhysicalField& f) {
  Writer w;
  w.bytes("SQGF", 4);
  w.u32(kVersion);
  write_grid(w, f.grid);
  w.f64(f.time_tag.value_or(std::numeric_limits<double>::quiet_NaN()));
  for (double v : f.values) w.f64(v);
  return w.take();
}

PhysicalField decode_sqgf(const std::string& bytes) {
  Reader r(bytes);
  check_header(r, "SQGF");
  Grid g = read_grid(r);
  const double t = r.f64();
  std::vector<double> values(g.total());
  for (auto& v : values) v = r.f64();
  if (!r.done()) throw FormatError("trailing bytes after SQGF payload");
  for (double v : values) {
    if (!std::isfinite(v)) throw FormatError("SQGF payload contains non-finite values");
  }
  return PhysicalField(std::move(g), std::move(values), std::isnan(t) ? std::nullopt : std::optional<double>(t));
}

void write_sqgf(const std::filesystem::path& path, const PhysicalField& f) { spit(path, encode_sqgf(f)); }

PhysicalField read_sqgf(const std::filesystem::path& path) { return decode_sqgf(slurp(path)); }

void write_sqge(const std::filesystem::path& path, const ExtensionField& e) {
  Writer w;
  w.bytes("SQGE", 4);
  w.u32(kVersion);
  write_grid(w, e.grid);
  w.u64(e.levels());
  for (double z : e.z_levels) w.f64(z);
  for (double v : e.values) w.f64(v);
  spit(path, w.take());
}

ExtensionField read_sqge(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  Reader r(bytes);
  check_header(r, "SQGE");
  Grid g = read_grid(r);
  const auto nz = r.u64();
  if (nz == 0 || nz > 100000) throw FormatError("SQGE level count out of range");
  std::vector<double> z(nz);
  for (auto& v : z) v = r.f64();
  std::vector<double> values(g.total() * nz);
  for (auto& v : values) v = r.f64();
  if (!r.done()) throw FormatError("trailing bytes after SQGE payload");
  try {
    return ExtensionField(std::move(g), std::move(z), std::move(values));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("SQGE levels invalid: ") + e.what());
  }
}

}  // namespace sqglab
