#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxguide/core.hpp"

namespace voxguide {

static_assert(std::endian::native == std::endian::little,
              "volume payloads are little-endian; big-endian hosts are unsupported");

namespace detail {

inline std::vector<char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    in.seekg(0, std::ios::end);
    const auto len = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<char> bytes(static_cast<std::size_t>(len));
    if (len > 0) in.read(bytes.data(), len);
    if (!in) throw DataError("short read: " + path);
    return bytes;
}

inline void write_file_bytes(const std::string& path, const void* data, std::size_t len) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open file for writing: " + path);
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    if (!out) throw DataError("write failed: " + path);
}

inline nlohmann::json load_sidecar(const std::string& payload_path) {
    const std::string sidecar = payload_path + ".json";
    if (!std::filesystem::exists(sidecar))
        throw DataError("missing sidecar: " + sidecar);
    nlohmann::json j;
    try {
        std::ifstream in(sidecar);
        in >> j;
    } catch (const std::exception& e) {
        throw DataError("corrupt sidecar " + sidecar + ": " + e.what());
    }
    if (!j.contains("dims") || !j.contains("spacing") || !j.contains("dtype"))
        throw DataError("sidecar missing dims/spacing/dtype: " + sidecar);
    return j;
}

inline void save_sidecar(const std::string& payload_path, nlohmann::json j) {
    std::ofstream out(payload_path + ".json", std::ios::trunc);
    if (!out) throw DataError("cannot write sidecar for: " + payload_path);
    out << j.dump(2) << '\n';
}

inline nlohmann::json grid_sidecar(const Dims& dims, const Spacing& spacing, const char* dtype) {
    nlohmann::json j;
    j["dims"] = {dims[0], dims[1], dims[2]};
    j["spacing"] = {spacing[0], spacing[1], spacing[2]};
    j["dtype"] = dtype;
    return j;
}

inline void parse_grid_sidecar(const nlohmann::json& j, const std::string& path,
                               const char* want_dtype, Dims& dims, Spacing& spacing) {
    try {
        const auto& jd = j.at("dims");
        const auto& js = j.at("spacing");
        if (jd.size() != 3 || js.size() != 3) throw DataError("dims/spacing must have 3 entries");
        for (int i = 0; i < 3; ++i) {
            dims[i] = jd[i].get<int>();
            spacing[i] = js[i].get<float>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt sidecar for " + path + ": " + e.what());
    }
    if (j.at("dtype").get<std::string>() != want_dtype)
        throw DataError("unexpected dtype in sidecar for " + path + " (want " +
                        std::string(want_dtype) + ")");
    check_dims(dims);
}

}  // namespace detail

/// Raw little-endian f32 payload at `path` (conventionally "<name>.vol")
/// plus a "<path>.json" sidecar holding dims, spacing and dtype.
inline void save_volume(const Volume& v, const std::string& path) {
    validate_volume(v);
    detail::write_file_bytes(path, v.data.data(), v.data.size() * sizeof(float));
    detail::save_sidecar(path, detail::grid_sidecar(v.dims, v.spacing, "f32"));
}

inline Volume load_volume(const std::string& path) {
    const nlohmann::json j = detail::load_sidecar(path);
    Volume v;
    detail::parse_grid_sidecar(j, path, "f32", v.dims, v.spacing);
    check_spacing(v.spacing);
    const std::vector<char> bytes = detail::read_file_bytes(path);
    const std::int64_t expect = voxel_count(v.dims) * static_cast<std::int64_t>(sizeof(float));
    if (static_cast<std::int64_t>(bytes.size()) != expect)
        throw DataError("payload length mismatch for " + path + ": got " +
                        std::to_string(bytes.size()) + " bytes, expected " +
                        std::to_string(expect));
    v.data.resize(static_cast<std::size_t>(voxel_count(v.dims)));
    std::memcpy(v.data.data(), bytes.data(), bytes.size());
    validate_volume(v);
    return v;
}

/// Mask payload: raw {0,1} bytes, sidecar dtype "u8".
inline void save_mask(const Mask& m, const std::string& path) {
    validate_mask(m);
    detail::write_file_bytes(path, m.data.data(), m.data.size());
    detail::save_sidecar(path, detail::grid_sidecar(m.dims, m.spacing, "u8"));
}

inline Mask load_mask(const std::string& path) {
    const nlohmann::json j = detail::load_sidecar(path);
    Mask m;
    detail::parse_grid_sidecar(j, path, "u8", m.dims, m.spacing);
    const std::vector<char> bytes = detail::read_file_bytes(path);
    if (static_cast<std::int64_t>(bytes.size()) != voxel_count(m.dims))
        throw DataError("payload length mismatch for " + path);
    m.data.assign(bytes.begin(), bytes.end());
    validate_mask(m);
    return m;
}

// Clicks persist as a JSON list of {"pos":[x,y,z],"polarity":"fg"|"bg"}.

inline nlohmann::json clicks_to_json(const ClickSet& clicks) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Click& c : clicks) {
        nlohmann::json jc;
        jc["pos"] = {c.pos[0], c.pos[1], c.pos[2]};
        jc["polarity"] = polarity_name(c.polarity);
        arr.push_back(std::move(jc));
    }
    return arr;
}

inline ClickSet clicks_from_json(const nlohmann::json& arr) {
    if (!arr.is_array()) throw DataError("clicks JSON must be an array");
    ClickSet out;
    for (const auto& jc : arr) {
        Click c;
        try {
            const auto& p = jc.at("pos");
            if (p.size() != 3) throw DataError("click pos must have 3 entries");
            c.pos = {p[0].get<int>(), p[1].get<int>(), p[2].get<int>()};
            c.polarity = polarity_from_name(jc.at("polarity").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("malformed click entry: ") + e.what());
        }
        if (!out.try_insert(c)) throw DataError("duplicate click voxel in clicks JSON");
    }
    return out;
}

inline void save_clicks(const ClickSet& clicks, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write clicks file: " + path);
    out << clicks_to_json(clicks).dump(2) << '\n';
}

inline ClickSet load_clicks(const std::string& path) {
    nlohmann::json j;
    try {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open clicks file: " + path);
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt clicks JSON " + path + ": " + e.what());
    }
    return clicks_from_json(j);
}

}  // namespace voxguide
