#include "qphase/io.hpp"

#include <charconv>
#include <fstream>

namespace qphase {

std::string format_g17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string grid_csv(const QuasiProbGrid& grid) {
  std::string out;
  out.reserve(static_cast<std::size_t>(grid.grid.n_re) * grid.grid.n_im * 60 + 16);
  out += "e1,e2,W\n";
  for (int j = 0; j < grid.grid.n_im; ++j) {
    for (int i = 0; i < grid.grid.n_re; ++i) {
      out += format_g17(grid.grid.x(i));
      out += ',';
      out += format_g17(grid.grid.y(j));
      out += ',';
      out += format_g17(grid.value(i, j));
      out += '\n';
    }
  }
  return out;
}

bool write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) return false;
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.flush();
  return static_cast<bool>(f);
}

}  // namespace qphase
