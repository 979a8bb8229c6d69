#include "lilypad/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace lilypad {

std::string g17(double v) {
    std::string best;
    for (int prec = 1; prec <= 17; ++prec) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v && (best.empty() || std::string(buf).size() < best.size())) best = buf;
    }
    if (best.empty()) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        best = buf;
    }
    return best;
}

void write_field_table(std::ostream& os, const Environment& env,
                       const std::vector<std::string>& names,
                       const std::vector<const std::vector<double>*>& columns) {
    if (names.size() != columns.size())
        throw std::invalid_argument("write_field_table: names/columns length mismatch");
    const Window& w = env.window();
    for (const auto* col : columns)
        if (static_cast<std::int32_t>(col->size()) != w.size())
            throw std::invalid_argument("write_field_table: column length mismatch");

    const auto& sc = env.scaling();
    os << "# lilypad-field 1\n";
    os << "# d=" << sc.d << " alpha=" << g17(sc.alpha) << " T=" << g17(sc.T)
       << " R=" << g17(env.window_radius()) << " seed=" << env.seed() << " sites=" << w.size()
       << "\n";
    os << "# columns:";
    for (int k = 0; k < w.dim(); ++k) os << " x" << k;
    for (const auto& n : names) os << ' ' << n;
    os << "\n";
    for (std::int32_t z = 0; z < w.size(); ++z) {
        const std::int64_t* c = w.coords(z);
        for (int k = 0; k < w.dim(); ++k) {
            if (k) os << ' ';
            os << c[k];
        }
        for (const auto* col : columns) os << ' ' << g17((*col)[z]);
        os << '\n';
    }
}

PgmImage render_frame(const Environment& env, const std::vector<double>& values, double lo,
                      double hi) {
    const Window& w = env.window();
    if (w.dim() > 2) throw std::invalid_argument("render_frame: only d=1 and d=2 supported");
    if (static_cast<std::int32_t>(values.size()) != w.size())
        throw std::invalid_argument("render_frame: value length mismatch");
    if (!(hi > lo)) throw std::invalid_argument("render_frame: need hi > lo");

    const std::int64_t M = w.half_extent();
    const std::int64_t side = 2 * M + 1;
    PgmImage img;
    img.height = w.dim() == 2 ? static_cast<int>(side) : 1;
    img.width = static_cast<int>(side);
    img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, 0);

    std::int64_t coord[2] = {0, 0};
    for (int row = 0; row < img.height; ++row) {
        for (int col = 0; col < img.width; ++col) {
            if (w.dim() == 2) {
                coord[0] = row - M;
                coord[1] = col - M;
            } else {
                coord[0] = col - M;
            }
            const std::int32_t z = w.site_at(coord);
            if (z < 0) continue;
            const double f = std::clamp((values[z] - lo) / (hi - lo), 0.0, 1.0);
            img.pixels[static_cast<std::size_t>(row) * img.width + col] =
                1 + static_cast<int>(std::lround(254.0 * f));
        }
    }
    return img;
}

void write_pgm(std::ostream& os, const PgmImage& img,
               const std::vector<std::string>& comments) {
    os << "P2\n";
    for (const auto& c : comments) os << "# " << c << '\n';
    os << "# grey 0 marks pixels outside the window; data maps to 1..255\n";
    os << img.width << ' ' << img.height << "\n255\n";
    for (int row = 0; row < img.height; ++row) {
        for (int col = 0; col < img.width; ++col) {
            if (col) os << ' ';
            os << img.pixels[static_cast<std::size_t>(row) * img.width + col];
        }
        os << '\n';
    }
}

void Manifest::add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}

void Manifest::add(const std::string& key, std::int64_t value) {
    add(key, std::to_string(value));
}

void Manifest::add(const std::string& key, std::uint64_t value) {
    add(key, std::to_string(value));
}

void Manifest::write(std::ostream& os) const {
    os << "lilypad-manifest 1\n";
    for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
}

}  // namespace lilypad
