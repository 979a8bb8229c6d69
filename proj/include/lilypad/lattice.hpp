#pragma once

#include <cstdint>
#include <vector>

// Finite window of the rescaled lattice L_T = { z : r(T) z in Z^d }. Sites are
// stored by their integer micro coordinates; macro coordinates are micro / r(T)
// and every distance below is the l1 norm. The window is the *open* l1 ball
// B(0, radius) in micro units: |x|_1 < radius. Storage is a dense bounding box
// with an in-window mask so neighbor lookup is O(1); site ids run in
// lexicographic micro-coordinate order, which is also the deterministic
// enumeration order used for sampling and for every tie-break.

namespace lilypad {

class Window {
  public:
    Window() = default;
    Window(int d, double radius_micro);

    int dim() const { return d_; }
    std::int32_t size() const { return static_cast<std::int32_t>(l1_.size()); }
    double radius_micro() const { return radius_; }
    std::int64_t half_extent() const { return M_; }
    std::int32_t origin() const { return origin_; }

    const std::int64_t* coords(std::int32_t site) const { return &coords_[static_cast<std::size_t>(site) * d_]; }
    std::int64_t coord(std::int32_t site, int axis) const { return coords_[static_cast<std::size_t>(site) * d_ + axis]; }
    std::int64_t l1_micro(std::int32_t site) const { return l1_[site]; }

    std::int64_t l1_micro(std::int32_t a, std::int32_t b) const {
        const std::int64_t* ca = coords(a);
        const std::int64_t* cb = coords(b);
        std::int64_t s = 0;
        for (int k = 0; k < d_; ++k) s += ca[k] >= cb[k] ? ca[k] - cb[k] : cb[k] - ca[k];
        return s;
    }

    // Site id at the given micro coordinates, -1 if outside the window.
    std::int32_t site_at(const std::int64_t* c) const;

    // Nearest neighbor one step along `axis` in direction `dir` (+1/-1);
    // -1 if the neighbor lies outside the window.
    std::int32_t neighbor(std::int32_t site, int axis, int dir) const;

    // Number of lattice neighbors outside the window (absorbing boundary ring
    // exposure; 0 for interior sites).
    int missing_neighbors(std::int32_t site) const;

  private:
    std::int64_t cell_index(const std::int64_t* c) const;

    int d_ = 0;
    double radius_ = 0.0;
    std::int64_t M_ = -1;
    std::int32_t origin_ = -1;
    std::vector<std::int64_t> strides_;
    std::vector<std::int32_t> cell_site_;
    std::vector<std::int64_t> coords_;
    std::vector<std::int64_t> l1_;
};

}  // namespace lilypad
