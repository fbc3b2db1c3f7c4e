#include "field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mslab {

namespace {

static_assert(std::endian::native == std::endian::little,
              "field I/O assumes a little-endian host");

constexpr char kMagic[4] = {'M', 'S', 'L', 'F'};
constexpr std::uint16_t kVersion = 1;

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw Error(ErrorCode::kIo, "truncated field file");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

template <class T>
std::string encode(const Field<T>& f, std::uint8_t dtype) {
  std::string out(kMagic, 4);
  put<std::uint16_t>(out, kVersion);
  put<std::uint8_t>(out, dtype);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(f.grid().n));
  for (int a = 0; a < f.grid().n; ++a) put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().N));
  out.append(reinterpret_cast<const char*>(f.data()), f.size() * sizeof(T));
  return out;
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace

std::string encode_field(const RealField& f) { return encode(f, 0); }
std::string encode_field(const ComplexField& f) { return encode(f, 1); }

void write_field(const std::string& path, const RealField& f) {
  write_bytes(path, encode_field(f));
}

void write_field(const std::string& path, const ComplexField& f) {
  write_bytes(path, encode_field(f));
}

AnyField decode_field(const std::string& bytes, double L) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(ErrorCode::kIo, "not an MSLF field file");
  std::size_t pos = 4;
  const auto version = take<std::uint16_t>(bytes, pos);
  if (version != kVersion) throw Error(ErrorCode::kIo, "unsupported MSLF version");
  const auto dtype = take<std::uint8_t>(bytes, pos);
  const auto ndim = take<std::uint8_t>(bytes, pos);
  if (dtype > 1) throw Error(ErrorCode::kIo, "unknown MSLF dtype");
  std::uint32_t N = 0;
  for (int a = 0; a < ndim; ++a) {
    const auto d = take<std::uint32_t>(bytes, pos);
    if (a > 0 && d != N) throw Error(ErrorCode::kIo, "non-cubic grids are not supported");
    N = d;
  }
  const GridSpec grid = GridSpec::make(ndim, static_cast<int>(N), L);
  const std::size_t elem = dtype == 0 ? sizeof(double) : sizeof(complex);
  if (bytes.size() - pos != grid.size() * elem)
    throw Error(ErrorCode::kIo, "field payload size mismatch");
  if (dtype == 0) {
    RealField f(grid);
    std::memcpy(f.data(), bytes.data() + pos, grid.size() * elem);
    return f;
  }
  ComplexField f(grid);
  std::memcpy(f.data(), bytes.data() + pos, grid.size() * elem);
  return f;
}

AnyField read_field(const std::string& path, double L) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return decode_field(ss.str(), L);
}

}  // namespace mslab
