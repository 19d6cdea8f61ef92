#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace voxguide {

/// Error for malformed or inconsistent data (files, payloads, masks).
/// Contract violations (bad arguments) throw std::invalid_argument instead.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Dims = std::array<int, 3>;       // (nx, ny, nz)
using Spacing = std::array<float, 3>;  // millimeters per voxel

inline std::int64_t voxel_count(const Dims& d) {
    return static_cast<std::int64_t>(d[0]) * d[1] * d[2];
}

// x-fastest linear order: index = x + nx*(y + ny*z)
inline std::int64_t linear_index(const Dims& d, int x, int y, int z) {
    return x + static_cast<std::int64_t>(d[0]) * (y + static_cast<std::int64_t>(d[1]) * z);
}

inline std::array<int, 3> unravel_index(const Dims& d, std::int64_t idx) {
    const int x = static_cast<int>(idx % d[0]);
    idx /= d[0];
    const int y = static_cast<int>(idx % d[1]);
    const int z = static_cast<int>(idx / d[1]);
    return {x, y, z};
}

inline bool in_bounds(const Dims& d, int x, int y, int z) {
    return x >= 0 && x < d[0] && y >= 0 && y < d[1] && z >= 0 && z < d[2];
}

inline void check_dims(const Dims& d) {
    if (d[0] <= 0 || d[1] <= 0 || d[2] <= 0)
        throw std::invalid_argument("dims must be positive");
}

inline void check_spacing(const Spacing& s) {
    if (!(s[0] > 0.0f) || !(s[1] > 0.0f) || !(s[2] > 0.0f))
        throw std::invalid_argument("spacing components must be > 0");
}

/// Dense 3D scalar grid with physical voxel spacing. Values are f32,
/// stored x-fastest.
struct Volume {
    Dims dims{0, 0, 0};
    Spacing spacing{1.0f, 1.0f, 1.0f};
    std::vector<float> data;

    float& at(int x, int y, int z) { return data[linear_index(dims, x, y, z)]; }
    float at(int x, int y, int z) const { return data[linear_index(dims, x, y, z)]; }
    std::int64_t size() const { return voxel_count(dims); }
};

inline Volume make_volume(const Dims& dims, const Spacing& spacing, float fill = 0.0f) {
    check_dims(dims);
    check_spacing(spacing);
    Volume v;
    v.dims = dims;
    v.spacing = spacing;
    v.data.assign(static_cast<std::size_t>(voxel_count(dims)), fill);
    return v;
}

inline void validate_volume(const Volume& v) {
    check_dims(v.dims);
    check_spacing(v.spacing);
    if (static_cast<std::int64_t>(v.data.size()) != voxel_count(v.dims))
        throw DataError("volume payload length does not match dims");
    for (float f : v.data)
        if (!std::isfinite(f)) throw DataError("volume contains non-finite values");
}

/// Binary 3D grid; values are exactly 0 or 1.
struct Mask {
    Dims dims{0, 0, 0};
    Spacing spacing{1.0f, 1.0f, 1.0f};
    std::vector<std::uint8_t> data;

    std::uint8_t& at(int x, int y, int z) { return data[linear_index(dims, x, y, z)]; }
    std::uint8_t at(int x, int y, int z) const { return data[linear_index(dims, x, y, z)]; }
    std::int64_t size() const { return voxel_count(dims); }

    std::int64_t count_ones() const {
        std::int64_t n = 0;
        for (std::uint8_t b : data) n += b;
        return n;
    }
};

inline Mask make_mask(const Dims& dims, const Spacing& spacing = {1.0f, 1.0f, 1.0f}) {
    check_dims(dims);
    Mask m;
    m.dims = dims;
    m.spacing = spacing;
    m.data.assign(static_cast<std::size_t>(voxel_count(dims)), 0);
    return m;
}

inline void validate_mask(const Mask& m) {
    check_dims(m.dims);
    if (static_cast<std::int64_t>(m.data.size()) != voxel_count(m.dims))
        throw DataError("mask payload length does not match dims");
    for (std::uint8_t b : m.data)
        if (b > 1) throw DataError("mask contains values other than 0/1");
}

inline bool operator==(const Mask& a, const Mask& b) {
    return a.dims == b.dims && a.data == b.data;
}

enum class Polarity { Foreground, Background };

inline const char* polarity_name(Polarity p) {
    return p == Polarity::Foreground ? "fg" : "bg";
}

inline Polarity polarity_from_name(const std::string& s) {
    if (s == "fg" || s == "foreground") return Polarity::Foreground;
    if (s == "bg" || s == "background") return Polarity::Background;
    throw DataError("unknown polarity: " + s);
}

/// One user interaction: a voxel plus whether it marks object or background.
struct Click {
    std::array<int, 3> pos{0, 0, 0};
    Polarity polarity = Polarity::Foreground;
};

inline bool operator==(const Click& a, const Click& b) {
    return a.pos == b.pos && a.polarity == b.polarity;
}

/// Ordered set of clicks. Insertion order is interaction order. A voxel
/// carries at most one click, regardless of polarity.
class ClickSet {
  public:
    ClickSet() = default;

    bool try_insert(const Click& c) {
        for (const Click& k : clicks_)
            if (k.pos == c.pos) return false;
        clicks_.push_back(c);
        return true;
    }

    void insert(const Click& c) {
        if (!try_insert(c)) throw std::invalid_argument("duplicate click voxel");
    }

    ClickSet filtered(Polarity p) const {
        ClickSet out;
        for (const Click& k : clicks_)
            if (k.polarity == p) out.clicks_.push_back(k);
        return out;
    }

    std::size_t count(Polarity p) const {
        std::size_t n = 0;
        for (const Click& k : clicks_)
            if (k.polarity == p) ++n;
        return n;
    }

    bool empty() const { return clicks_.empty(); }
    std::size_t size() const { return clicks_.size(); }
    const Click& operator[](std::size_t i) const { return clicks_[i]; }
    const std::vector<Click>& items() const { return clicks_; }
    auto begin() const { return clicks_.begin(); }
    auto end() const { return clicks_.end(); }

  private:
    std::vector<Click> clicks_;
};

inline void check_click_bounds(const Click& c, const Dims& d) {
    if (!in_bounds(d, c.pos[0], c.pos[1], c.pos[2]))
        throw std::invalid_argument("click position out of volume bounds");
}

enum class Connectivity { Faces6 = 6, All26 = 26 };

inline const std::vector<std::array<int, 3>>& neighbor_offsets(Connectivity c) {
    static const std::vector<std::array<int, 3>> six = {
        {{-1, 0, 0}}, {{1, 0, 0}}, {{0, -1, 0}}, {{0, 1, 0}}, {{0, 0, -1}}, {{0, 0, 1}}};
    static const std::vector<std::array<int, 3>> twentysix = [] {
        std::vector<std::array<int, 3>> v;
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (dx || dy || dz) v.push_back({dx, dy, dz});
        return v;
    }();
    return c == Connectivity::Faces6 ? six : twentysix;
}

}  // namespace voxguide
