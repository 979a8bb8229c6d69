#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lilypad/environment.hpp"

namespace lilypad {

// shortest decimal form that round-trips a double (printf %.17g, trimmed)
std::string g17(double v);

// one row per site in enumeration order: micro coordinates, then one value per
// named column; '#' header lines carry the environment metadata
void write_field_table(std::ostream& os, const Environment& env,
                       const std::vector<std::string>& names,
                       const std::vector<const std::vector<double>*>& columns);

struct PgmImage {
    int width = 0;
    int height = 0;
    std::vector<int> pixels;  // row-major, 0..255
};

// linear map of per-site values onto grey levels 1..255 over [lo, hi]; pixels
// inside the bounding box but outside the window render as 0. d must be 1 or 2;
// for d = 1 the image is a single row.
PgmImage render_frame(const Environment& env, const std::vector<double>& values, double lo,
                      double hi);

void write_pgm(std::ostream& os, const PgmImage& img,
               const std::vector<std::string>& comments);

// flat key = value run summary, written in insertion order
class Manifest {
  public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, const char* value) { add(key, std::string(value)); }
    void add(const std::string& key, double value) { add(key, g17(value)); }
    void add(const std::string& key, std::int64_t value);
    void add(const std::string& key, std::uint64_t value);
    void add(const std::string& key, int value) { add(key, static_cast<std::int64_t>(value)); }
    void add(const std::string& key, bool value) { add(key, std::string(value ? "1" : "0")); }
    void write(std::ostream& os) const;

  private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace lilypad
