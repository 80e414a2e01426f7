#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qam {

/// Content-addressed binary store. Records are keyed by the hash of a
/// canonical parameter string; payloads carry a checksum so corrupted
/// entries read as misses and get recomputed.
class Cache {
 public:
  Cache() = default;  // disabled
  explicit Cache(std::string dir);

  bool enabled() const { return enabled_; }
  const std::string& dir() const { return dir_; }

  static std::uint64_t hash64(std::string_view s);
  static std::string hash_hex(std::string_view s);

  std::optional<std::vector<char>> load(const std::string& key,
                                        std::uint32_t kind) const;
  /// Atomic (write-temp-rename).
  void store(const std::string& key, std::uint32_t kind,
             const std::vector<char>& payload) const;

 private:
  std::string path_for(const std::string& key) const;

  std::string dir_;
  bool enabled_ = false;
};

// Payload packing. Matrices go row-major as little-endian complex doubles.
class ByteWriter {
 public:
  template <class T>
  void put(const T& v) {
    const char* b = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), b, b + sizeof(T));
  }
  void put_string(const std::string& s);
  void put_matrix(const Eigen::MatrixXcd& m);
  void put_vector(const Eigen::VectorXcd& v);
  void put_vector(const Eigen::VectorXd& v);
  std::vector<char> take() { return std::move(buf_); }

 private:
  std::vector<char> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<char>& buf) : buf_(buf) {}
  template <class T>
  T get() {
    T v;
    need(sizeof(T));
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string();
  Eigen::MatrixXcd get_matrix();
  Eigen::VectorXcd get_cvector();
  Eigen::VectorXd get_rvector();

 private:
  void need(std::size_t n) const;
  const std::vector<char>& buf_;
  std::size_t pos_ = 0;
};

}  // namespace qam
