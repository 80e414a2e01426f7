#include "qam/cache.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "qam/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "cache layout assumes a little-endian host");

namespace qam {

namespace {

constexpr char kMagic[4] = {'Q', 'A', 'M', 'C'};
constexpr std::uint32_t kVersion = 1;

struct Header {
  char magic[4];
  std::uint32_t version;
  std::uint32_t kind;
  std::uint32_t key_len;
  std::uint64_t key_hash;
  std::uint64_t payload_size;
  std::uint64_t payload_checksum;
};

}  // namespace

Cache::Cache(std::string dir) : dir_(std::move(dir)), enabled_(true) {
  std::filesystem::create_directories(dir_);
}

std::uint64_t Cache::hash64(std::string_view s) {
  // FNV-1a
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string Cache::hash_hex(std::string_view s) {
  char out[17];
  std::snprintf(out, sizeof out, "%016llx",
                static_cast<unsigned long long>(hash64(s)));
  return out;
}

std::string Cache::path_for(const std::string& key) const {
  return dir_ + "/" + hash_hex(key) + ".qamc";
}

std::optional<std::vector<char>> Cache::load(const std::string& key,
                                             std::uint32_t kind) const {
  if (!enabled_) return std::nullopt;
  std::ifstream f(path_for(key), std::ios::binary);
  if (!f) return std::nullopt;
  Header h{};
  f.read(reinterpret_cast<char*>(&h), sizeof h);
  if (!f || std::memcmp(h.magic, kMagic, 4) != 0 || h.version != kVersion ||
      h.kind != kind || h.key_hash != hash64(key))
    return std::nullopt;
  std::string stored_key(h.key_len, '\0');
  f.read(stored_key.data(), h.key_len);
  if (!f || stored_key != key) return std::nullopt;
  std::vector<char> payload(h.payload_size);
  f.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!f) return std::nullopt;
  if (hash64({payload.data(), payload.size()}) != h.payload_checksum)
    return std::nullopt;  // corrupted entry: caller recomputes
  return payload;
}

void Cache::store(const std::string& key, std::uint32_t kind,
                  const std::vector<char>& payload) const {
  if (!enabled_) return;
  Header h{};
  std::memcpy(h.magic, kMagic, 4);
  h.version = kVersion;
  h.kind = kind;
  h.key_len = static_cast<std::uint32_t>(key.size());
  h.key_hash = hash64(key);
  h.payload_size = payload.size();
  h.payload_checksum = hash64({payload.data(), payload.size()});

  const std::string final_path = path_for(key);
  const std::string tmp_path = final_path + ".tmp";
  {
    std::ofstream f(tmp_path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cache: cannot open " + tmp_path);
    f.write(reinterpret_cast<const char*>(&h), sizeof h);
    f.write(key.data(), static_cast<std::streamsize>(key.size()));
    f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!f) throw Error("cache: short write to " + tmp_path);
  }
  std::filesystem::rename(tmp_path, final_path);
}

void ByteWriter::put_string(const std::string& s) {
  put<std::uint64_t>(s.size());
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteWriter::put_matrix(const Eigen::MatrixXcd& m) {
  put<std::int64_t>(m.rows());
  put<std::int64_t>(m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put<double>(m(r, c).real());
      put<double>(m(r, c).imag());
    }
}

void ByteWriter::put_vector(const Eigen::VectorXcd& v) {
  put<std::int64_t>(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    put<double>(v[i].real());
    put<double>(v[i].imag());
  }
}

void ByteWriter::put_vector(const Eigen::VectorXd& v) {
  put<std::int64_t>(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) put<double>(v[i]);
}

void ByteReader::need(std::size_t n) const {
  if (pos_ + n > buf_.size()) throw Error("cache payload truncated");
}

std::string ByteReader::get_string() {
  const auto n = get<std::uint64_t>();
  need(n);
  std::string s(buf_.data() + pos_, n);
  pos_ += n;
  return s;
}

Eigen::MatrixXcd ByteReader::get_matrix() {
  const auto rows = get<std::int64_t>();
  const auto cols = get<std::int64_t>();
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double re = get<double>();
      const double im = get<double>();
      m(r, c) = {re, im};
    }
  return m;
}

Eigen::VectorXcd ByteReader::get_cvector() {
  const auto n = get<std::int64_t>();
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = get<double>();
    const double im = get<double>();
    v[i] = {re, im};
  }
  return v;
}

Eigen::VectorXd ByteReader::get_rvector() {
  const auto n = get<std::int64_t>();
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = get<double>();
  return v;
}

}  // namespace qam
