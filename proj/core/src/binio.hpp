#pragma once

// Little-endian binary readers/writers for model files. Host is assumed
// little-endian (x86-64/aarch64 Linux).

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "citerec/errors.hpp"

namespace citerec::binio {

template <typename T>
void write_pod(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    static_assert(std::is_trivially_copyable_v<T>);
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw ConfigError("truncated model file");
    return value;
}

inline void write_string(std::ostream& out, const std::string& s) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
    const auto len = read_pod<std::uint32_t>(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw ConfigError("truncated model file");
    return s;
}

inline void write_doubles(std::ostream& out, const std::vector<double>& values) {
    write_pod<std::uint64_t>(out, values.size());
    if (values.empty()) return;
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
}

inline std::vector<double> read_doubles(std::istream& in) {
    const auto count = read_pod<std::uint64_t>(in);
    std::vector<double> values(count);
    if (count == 0) return values;
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw ConfigError("truncated model file");
    return values;
}

}  // namespace citerec::binio
