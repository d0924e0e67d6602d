#ifndef FENE_IO_HPP
#define FENE_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

namespace fene::io {

// All on-disk formats are little-endian; see README for layouts.

void write_u32(std::ostream& s, std::uint32_t v);
std::uint32_t read_u32(std::istream& s);

void write_f64(std::ostream& s, double v);
double read_f64(std::istream& s);

void write_f64_array(std::ostream& s, const double* v, std::size_t count);
void read_f64_array(std::istream& s, double* v, std::size_t count);
inline void write_f64_array(std::ostream& s, std::span<const double> v) {
  write_f64_array(s, v.data(), v.size());
}
inline void read_f64_array(std::istream& s, std::span<double> v) {
  read_f64_array(s, v.data(), v.size());
}

/// Output directory for reports and snapshots: the FENE_OUT environment
/// variable when set, "." otherwise. Created if missing.
std::string output_dir();

/// path join that tolerates a trailing slash in dir.
std::string join_path(const std::string& dir, const std::string& name);

void write_text_file(const std::string& path, const std::string& body);

}  // namespace fene::io

#endif
