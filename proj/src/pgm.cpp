#include "c2fb/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

namespace c2fb {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::string& b) : b_(b) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::parse, "pgm: " + msg + " at byte " + std::to_string(pos_));
  }

  // Whitespace and '#' comments running to end of line.
  void skip_separators() {
    while (pos_ < b_.size()) {
      const unsigned char ch = static_cast<unsigned char>(b_[pos_]);
      if (ch == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n' && b_[pos_] != '\r') ++pos_;
      } else if (std::isspace(ch)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t number(const char* what) {
    skip_separators();
    if (pos_ >= b_.size()) fail(std::string("truncated header, expected ") + what);
    if (!std::isdigit(static_cast<unsigned char>(b_[pos_]))) fail(std::string("expected ") + what);
    std::size_t v = 0;
    while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
      v = v * 10 + static_cast<std::size_t>(b_[pos_] - '0');
      if (v > (1u << 24)) fail(std::string(what) + " too large");
      ++pos_;
    }
    return v;
  }

  void magic() {
    if (b_.size() < 2 || b_[0] != 'P' || b_[1] != '5') fail("wrong magic, expected P5");
    pos_ = 2;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void raster_separator() {
    if (pos_ >= b_.size()) fail("truncated header");
    if (!std::isspace(static_cast<unsigned char>(b_[pos_]))) fail("expected whitespace before raster");
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  const std::string& b_;
  std::size_t pos_ = 0;
};

}  // namespace

Vector parse_pgm(const std::string& bytes) {
  HeaderReader r(bytes);
  r.magic();
  const std::size_t cols = r.number("width");
  const std::size_t rows = r.number("height");
  const std::size_t start_of_maxval = r.pos();
  const std::size_t maxval = r.number("maxval");
  if (cols == 0 || rows == 0) r.fail("zero image extent");
  if (maxval != 255) {
    throw Error(ErrorCode::parse, "pgm: maxval must be 255 at byte " + std::to_string(start_of_maxval));
  }
  r.raster_separator();
  const std::size_t n = rows * cols;
  if (bytes.size() - r.pos() < n) {
    throw Error(ErrorCode::parse, "pgm: truncated raster at byte " + std::to_string(bytes.size()) + ", expected " +
                                      std::to_string(n) + " pixels");
  }
  Vector img(Shape::image(rows, cols));
  for (std::size_t i = 0; i < n; ++i) img[i] = static_cast<unsigned char>(bytes[r.pos() + i]);
  return img;
}

Vector load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_pgm(bytes);
}

std::string encode_pgm(const Vector& image) {
  const Shape s = image.shape();
  if (s.size() == 0) throw Error(ErrorCode::invalid_argument, "pgm: empty image");
  std::string out = "P5\n" + std::to_string(s.cols) + " " + std::to_string(s.rows) + "\n255\n";
  out.reserve(out.size() + s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double v = image[i];
    if (std::isnan(v)) v = 0.0;
    v = std::clamp(v, 0.0, 255.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v))));
  }
  return out;
}

void save_pgm(const std::string& path, const Vector& image) {
  const std::string bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io, "write failed for " + path);
}

}  // namespace c2fb
