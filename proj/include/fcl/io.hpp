#pragma once

// Model documents (JSON), CSV output with fixed number formatting, atomic
// file writes and debug dumps.

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "fcl/error.hpp"
#include "fcl/grid_geometry.hpp"
#include "fcl/ifs_core.hpp"

namespace fcl::io {

/// 12 significant digits (printf "%.12g").
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 12);
    return std::string(buf.data(), res.ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row_strings(header); }

    CsvWriter& row_strings(const std::vector<std::string>& cells) {
        require(cells.size() == columns_, ErrorKind::domain, "CSV row has the wrong number of cells");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
        return *this;
    }

    std::string str() const { return out_.str(); }

private:
    std::size_t columns_;
    std::ostringstream out_;
};

/// Writes to a sibling temporary file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(f), ErrorKind::config, "cannot open " + tmp.string() + " for writing");
        f << contents;
        f.flush();
        require(static_cast<bool>(f), ErrorKind::config, "failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        fail(ErrorKind::config, "cannot move output into " + path.string() + ": " + ec.message());
    }
}

/// Plain PBM (P1), top row = largest y.
inline std::string to_pbm(const BitMask& m) {
    std::ostringstream o;
    o << "P1\n" << m.width << ' ' << m.height << '\n';
    for (int j = m.height - 1; j >= 0; --j) {
        for (int i = 0; i < m.width; ++i) o << (m(i, j) ? '1' : '0') << (i + 1 < m.width ? " " : "");
        o << '\n';
    }
    return o.str();
}

inline std::string field_csv(const DistanceField& f, const GridSpec& g) {
    CsvWriter w({"x", "y", "distance"});
    for (int j = 0; j < f.height; ++j)
        for (int i = 0; i < f.width; ++i) {
            const Vec2 c = g.center(i, j);
            w.row_strings({format_number(c.x), format_number(c.y), format_number(f.value(i, j))});
        }
    return w.str();
}

// ---------------------------------------------------------------------------
// Model documents

namespace detail {

inline double number(const nlohmann::json& j, const std::string& where) {
    require(j.is_number(), ErrorKind::config, where + " must be a number");
    return j.get<double>();
}

inline Vec2 point(const nlohmann::json& j, const std::string& where) {
    require(j.is_array() && j.size() == 2, ErrorKind::config, where + " must be [x, y]");
    return {number(j[0], where), number(j[1], where)};
}

inline void only_keys(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        require(ok, ErrorKind::config, where + ": unknown key \"" + it.key() + "\"");
    }
}

}  // namespace detail

inline ModelPtr model_from_json(const nlohmann::json& doc) {
    const nlohmann::json& m = doc.is_object() && doc.contains("model") ? doc.at("model") : doc;
    require(m.is_object(), ErrorKind::config, "model must be a JSON object");
    detail::only_keys(m, {"atoms", "open_set", "big_R"}, "model");
    require(m.contains("atoms") && m["atoms"].is_array() && !m["atoms"].empty(), ErrorKind::config,
            "model.atoms must be a nonempty array");
    require(m.contains("open_set") && m["open_set"].is_array(), ErrorKind::config, "model.open_set must be an array");

    std::vector<WeightedAtom> atoms;
    for (std::size_t a = 0; a < m["atoms"].size(); ++a) {
        const auto& ja = m["atoms"][a];
        const std::string where = "atoms[" + std::to_string(a) + "]";
        require(ja.is_object(), ErrorKind::config, where + " must be an object");
        detail::only_keys(ja, {"prob", "maps"}, where);
        require(ja.contains("prob") && ja.contains("maps") && ja["maps"].is_array(), ErrorKind::config,
                where + " needs prob and maps");
        WeightedAtom wa;
        wa.prob = detail::number(ja["prob"], where + ".prob");
        for (std::size_t i = 0; i < ja["maps"].size(); ++i) {
            const auto& jm = ja["maps"][i];
            const std::string mw = where + ".maps[" + std::to_string(i) + "]";
            require(jm.is_object(), ErrorKind::config, mw + " must be an object");
            detail::only_keys(jm, {"scale", "rotation_deg", "reflect", "translate"}, mw);
            require(jm.contains("scale"), ErrorKind::config, mw + " needs a scale");
            Similarity s;
            s.scale = detail::number(jm["scale"], mw + ".scale");
            if (jm.contains("rotation_deg"))
                s.rotation = detail::number(jm["rotation_deg"], mw + ".rotation_deg") * std::numbers::pi / 180.0;
            if (jm.contains("reflect")) {
                require(jm["reflect"].is_boolean(), ErrorKind::config, mw + ".reflect must be a boolean");
                s.reflect = jm["reflect"].get<bool>();
            }
            if (jm.contains("translate")) s.translation = detail::point(jm["translate"], mw + ".translate");
            wa.atom.maps.push_back(s);
        }
        atoms.push_back(std::move(wa));
    }
    Polygon open_set;
    for (std::size_t i = 0; i < m["open_set"].size(); ++i)
        open_set.push_back(detail::point(m["open_set"][i], "open_set[" + std::to_string(i) + "]"));
    std::optional<double> big_R;
    if (m.contains("big_R") && !m["big_R"].is_null()) big_R = detail::number(m["big_R"], "big_R");
    return std::make_shared<const RandomIfsModel>(std::move(atoms), std::move(open_set), big_R);
}

inline ModelPtr parse_model(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::config, std::string("invalid JSON: ") + e.what());
    }
    return model_from_json(doc);
}

inline ModelPtr load_model(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    require(static_cast<bool>(f), ErrorKind::config, "cannot open model file " + path.string());
    std::ostringstream s;
    s << f.rdbuf();
    return parse_model(s.str());
}

inline nlohmann::json model_to_json(const RandomIfsModel& model) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& wa : model.atoms()) {
        nlohmann::json maps = nlohmann::json::array();
        for (const auto& s : wa.atom.maps)
            maps.push_back({{"scale", s.scale},
                            {"rotation_deg", s.rotation * 180.0 / std::numbers::pi},
                            {"reflect", s.reflect},
                            {"translate", {s.translation.x, s.translation.y}}});
        atoms.push_back({{"prob", wa.prob}, {"maps", maps}});
    }
    nlohmann::json open_set = nlohmann::json::array();
    for (Vec2 v : model.open_set()) open_set.push_back({v.x, v.y});
    return {{"atoms", atoms}, {"open_set", open_set}, {"big_R", model.big_R()}};
}

}  // namespace fcl::io
