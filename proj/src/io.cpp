#include "fene/io.hpp"

#include <bit>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace fene::io {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

void write_u32(std::ostream& s, std::uint32_t v) {
  s.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& s) {
  std::uint32_t v = 0;
  s.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_f64(std::ostream& s, double v) {
  s.write(reinterpret_cast<const char*>(&v), sizeof v);
}

double read_f64(std::istream& s) {
  double v = 0.0;
  s.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_f64_array(std::ostream& s, const double* v, std::size_t count) {
  s.write(reinterpret_cast<const char*>(v),
          static_cast<std::streamsize>(count * sizeof(double)));
}

void read_f64_array(std::istream& s, double* v, std::size_t count) {
  s.read(reinterpret_cast<char*>(v),
         static_cast<std::streamsize>(count * sizeof(double)));
}

std::string output_dir() {
  const char* env = std::getenv("FENE_OUT");
  std::string dir = env && *env ? env : ".";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  return dir;
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  if (dir.back() == '/') return dir + name;
  return dir + "/" + name;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << body;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace fene::io
