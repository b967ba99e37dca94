#include "dmn/dataset.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dmn/error.hpp"

namespace dmn {

static_assert(std::endian::native == std::endian::little, "dataset I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'D', 'M', 'N', 'D', 'S', 'E', 'T', '\0'};
constexpr std::size_t kRecordDoubles = 9 + 3 * 36 + 2;

template <typename T>
void put(std::string& out, const T& value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

void put_string(std::string& out, const std::string& s) {
  put(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

void put_matrix(std::string& out, const Stiffness& m) {
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) put(out, m(r, c));
  }
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  Stiffness get_matrix() {
    Stiffness m;
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) m(r, c) = get<double>();
    }
    return m;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw IoError("dataset: truncated file");
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

bool Dataset::labeled() const {
  if (samples.empty()) return false;
  for (const auto& s : samples) {
    if (!s.label) return false;
  }
  return true;
}

std::string encode_dataset(const Dataset& d) {
  const bool labeled = d.labeled();
  std::string out(kMagic, sizeof(kMagic));
  put(out, kDatasetFormatVersion);
  put(out, static_cast<std::uint32_t>(labeled ? 1 : 0));
  put(out, static_cast<std::uint64_t>(d.samples.size()));
  put(out, d.seed);
  put_string(out, d.discretization);
  put_string(out, d.provenance);
  out.reserve(out.size() + d.samples.size() * kRecordDoubles * sizeof(double));
  for (const auto& s : d.samples) {
    for (double p : s.params) put(out, p);
    put_matrix(out, s.c1);
    put_matrix(out, s.c2);
    put_matrix(out, labeled ? *s.label : Stiffness::Zero());
    put(out, s.point.l1);
    put(out, s.point.l2);
  }
  return out;
}

Dataset decode_dataset(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw IoError("dataset: not a dataset file (bad magic)");
  }
  Reader in(bytes);
  for (std::size_t k = 0; k < sizeof(kMagic); ++k) in.get<char>();
  const auto version = in.get<std::uint32_t>();
  if (version != kDatasetFormatVersion) {
    throw IoError("dataset: unsupported format version " + std::to_string(version));
  }
  const auto flags = in.get<std::uint32_t>();
  const auto count = in.get<std::uint64_t>();
  Dataset d;
  d.seed = in.get<std::uint64_t>();
  d.discretization = in.get_string();
  d.provenance = in.get_string();
  if (in.remaining() != count * kRecordDoubles * sizeof(double)) {
    throw IoError("dataset: payload size does not match the record count");
  }
  d.samples.resize(count);
  for (auto& s : d.samples) {
    for (double& p : s.params) p = in.get<double>();
    s.c1 = in.get_matrix();
    s.c2 = in.get_matrix();
    const Stiffness label = in.get_matrix();
    if (flags & 1u) s.label = label;
    s.point.l1 = in.get<double>();
    s.point.l2 = in.get<double>();
  }
  return d;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw IoError("error while reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!f) throw IoError("error while writing '" + path + "'");
}

void save_dataset(const Dataset& d, const std::string& path) { write_file(path, encode_dataset(d)); }

Dataset load_dataset(const std::string& path) { return decode_dataset(read_file(path)); }

std::string dataset_to_csv(const Dataset& d) {
  static const char* kParams[9] = {"K1", "G1", "K2", "G2", "a", "beta", "theta", "psi", "phi"};
  std::ostringstream os;
  os.precision(17);
  os << "index";
  for (const char* p : kParams) os << ',' << p;
  os << ",lambda1,lambda2";
  for (const char* m : {"C1", "C2", "Cbar"}) {
    for (int r = 1; r <= 6; ++r) {
      for (int c = 1; c <= 6; ++c) os << ',' << m << '_' << r << c;
    }
  }
  os << '\n';
  for (std::size_t k = 0; k < d.samples.size(); ++k) {
    const auto& s = d.samples[k];
    os << k;
    for (double p : s.params) os << ',' << p;
    os << ',' << s.point.l1 << ',' << s.point.l2;
    for (const Stiffness* m : {&s.c1, &s.c2}) {
      for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) os << ',' << (*m)(r, c) / (mandel_factor(r) * mandel_factor(c));
      }
    }
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) {
        os << ',';
        if (s.label) os << (*s.label)(r, c) / (mandel_factor(r) * mandel_factor(c));
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace dmn
