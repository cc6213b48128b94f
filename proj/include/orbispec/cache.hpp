#pragma once

#include "orbispec/operator.hpp"
#include "orbispec/sparse.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace orbispec {

/// What a cached matrix is: the full operator ("full") or one reduction unit.
struct CacheKey {
  MetricFamily family = MetricFamily::almost_inner;
  double param = 0;
  int n = 0;
  int version = Scheme::version;
  std::string unit = "full";

  std::string file_name() const
  {
    char buf[160];
    std::snprintf(buf, sizeof buf, "op-v%d-%s-%016llx-N%d-%s.bin", version, to_string(family).c_str(),
                  static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(param)), n, unit.c_str());
    return buf;
  }
};

/**
 * Binary store for assembled real CSR matrices. Files carry their own key
 * and are rebuilt when it does not match; writes go through a temporary
 * file and a rename so concurrent runs never see partial data.
 */
class OperatorCache {
public:
  explicit OperatorCache(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  const std::filesystem::path& dir() const { return dir_; }

  std::optional<CsrMatrix<double>> load(const CacheKey& key) const
  {
    std::ifstream in(dir_ / key.file_name(), std::ios::binary);
    if (!in)
      return std::nullopt;
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != kMagic)
      return std::nullopt;
    std::int32_t version = 0, family = 0, n = 0;
    double param = 0;
    std::uint64_t unit_len = 0;
    read(in, version);
    read(in, family);
    read(in, n);
    read(in, param);
    read(in, unit_len);
    if (!in || unit_len > 256)
      return std::nullopt;
    std::string unit(unit_len, '\0');
    in.read(unit.data(), static_cast<std::streamsize>(unit_len));
    if (!in || version != key.version || family != static_cast<std::int32_t>(key.family) || n != key.n ||
        std::bit_cast<std::uint64_t>(param) != std::bit_cast<std::uint64_t>(key.param) || unit != key.unit)
      return std::nullopt;
    std::uint64_t rows = 0, nnz = 0;
    read(in, rows);
    read(in, nnz);
    if (!in)
      return std::nullopt;
    CsrMatrix<double> a;
    a.n = rows;
    a.rowptr.resize(rows + 1);
    a.col.resize(nnz);
    a.val.resize(nnz);
    in.read(reinterpret_cast<char*>(a.rowptr.data()), static_cast<std::streamsize>((rows + 1) * sizeof(std::size_t)));
    in.read(reinterpret_cast<char*>(a.col.data()), static_cast<std::streamsize>(nnz * sizeof(std::uint32_t)));
    in.read(reinterpret_cast<char*>(a.val.data()), static_cast<std::streamsize>(nnz * sizeof(double)));
    if (!in || a.rowptr.back() != nnz)
      return std::nullopt;
    return a;
  }

  void store(const CacheKey& key, const CsrMatrix<double>& a) const
  {
    const std::filesystem::path final_path = dir_ / key.file_name();
    std::filesystem::path tmp = final_path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out)
        throw std::runtime_error("cannot write cache file " + tmp.string());
      out.write(kMagic, 8);
      write(out, static_cast<std::int32_t>(key.version));
      write(out, static_cast<std::int32_t>(key.family));
      write(out, static_cast<std::int32_t>(key.n));
      write(out, key.param);
      write(out, static_cast<std::uint64_t>(key.unit.size()));
      out.write(key.unit.data(), static_cast<std::streamsize>(key.unit.size()));
      write(out, static_cast<std::uint64_t>(a.n));
      write(out, static_cast<std::uint64_t>(a.nnz()));
      out.write(reinterpret_cast<const char*>(a.rowptr.data()),
                static_cast<std::streamsize>(a.rowptr.size() * sizeof(std::size_t)));
      out.write(reinterpret_cast<const char*>(a.col.data()), static_cast<std::streamsize>(a.col.size() * sizeof(std::uint32_t)));
      out.write(reinterpret_cast<const char*>(a.val.data()), static_cast<std::streamsize>(a.val.size() * sizeof(double)));
      if (!out)
        throw std::runtime_error("short write to cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path);
  }

  CsrMatrix<double> load_or_build(const CacheKey& key, const std::function<CsrMatrix<double>()>& build) const
  {
    if (auto hit = load(key)) {
      ++hits_;
      return std::move(*hit);
    }
    ++misses_;
    CsrMatrix<double> a = build();
    store(key, a);
    return a;
  }

  long hits() const { return hits_; }
  long misses() const { return misses_; }

private:
  static constexpr const char* kMagic = "ORBSPC01";

  template <class T>
  static void read(std::istream& in, T& v)
  {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
  }
  template <class T>
  static void write(std::ostream& out, const T& v)
  {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  }

  std::filesystem::path dir_;
  mutable long hits_ = 0;
  mutable long misses_ = 0;
};

} // namespace orbispec
