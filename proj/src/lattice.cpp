#include "lilypad/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lilypad {

namespace {

// Largest integer strictly below `radius` (half-extent of the open ball),
// -1 when the ball is empty.
std::int64_t strict_floor(double radius) {
    if (!(radius > 0.0)) return -1;
    std::int64_t m = static_cast<std::int64_t>(std::floor(radius));
    if (static_cast<double>(m) >= radius) --m;
    return m;
}

}  // namespace

Window::Window(int d, double radius_micro) : d_(d), radius_(radius_micro) {
    if (d < 1) throw std::invalid_argument("Window: dimension must be >= 1");
    M_ = strict_floor(radius_micro);
    if (M_ < 0) {
        M_ = -1;
        return;  // empty window
    }

    const std::int64_t side = 2 * M_ + 1;
    double cells_d = 1.0;
    for (int k = 0; k < d; ++k) cells_d *= static_cast<double>(side);
    if (cells_d > 2.0e9)
        throw std::invalid_argument("Window: bounding box has " + std::to_string(cells_d) +
                                    " cells; reduce R or T");
    const std::int64_t cells = static_cast<std::int64_t>(cells_d + 0.5);

    strides_.assign(d, 1);
    for (int k = d - 2; k >= 0; --k) strides_[k] = strides_[k + 1] * side;

    cell_site_.assign(static_cast<std::size_t>(cells), -1);
    std::vector<std::int64_t> c(d, -M_);
    for (std::int64_t idx = 0; idx < cells; ++idx) {
        std::int64_t l1 = 0;
        for (int k = 0; k < d; ++k) l1 += c[k] >= 0 ? c[k] : -c[k];
        if (static_cast<double>(l1) < radius_micro) {
            cell_site_[idx] = size();
            coords_.insert(coords_.end(), c.begin(), c.end());
            l1_.push_back(l1);
        }
        // odometer, last axis fastest: matches lexicographic order on coords
        for (int k = d - 1; k >= 0; --k) {
            if (++c[k] <= M_) break;
            c[k] = -M_;
        }
    }

    std::vector<std::int64_t> zero(d, 0);
    origin_ = site_at(zero.data());
}

std::int64_t Window::cell_index(const std::int64_t* c) const {
    std::int64_t idx = 0;
    for (int k = 0; k < d_; ++k) idx += (c[k] + M_) * strides_[k];
    return idx;
}

std::int32_t Window::site_at(const std::int64_t* c) const {
    if (M_ < 0) return -1;
    for (int k = 0; k < d_; ++k)
        if (c[k] < -M_ || c[k] > M_) return -1;
    return cell_site_[static_cast<std::size_t>(cell_index(c))];
}

std::int32_t Window::neighbor(std::int32_t site, int axis, int dir) const {
    const std::int64_t ck = coord(site, axis);
    const std::int64_t nk = ck + (dir > 0 ? 1 : -1);
    if (nk < -M_ || nk > M_) return -1;
    const std::int64_t idx = cell_index(coords(site)) + (dir > 0 ? strides_[axis] : -strides_[axis]);
    return cell_site_[static_cast<std::size_t>(idx)];
}

int Window::missing_neighbors(std::int32_t site) const {
    int missing = 0;
    for (int k = 0; k < d_; ++k) {
        if (neighbor(site, k, +1) < 0) ++missing;
        if (neighbor(site, k, -1) < 0) ++missing;
    }
    return missing;
}

}  // namespace lilypad
