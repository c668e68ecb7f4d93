#include "glpm/snapshot.hpp"

#include <bit>
#include <filesystem>
#include <fstream>

namespace glpm {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "snapshot payloads are little-endian");

void save_snapshot(const Field& u, const std::string& prefix, const nlohmann::json& extra) {
    const fs::path bin_path = prefix + ".f64";
    const fs::path json_path = prefix + ".json";
    if (bin_path.has_parent_path()) fs::create_directories(bin_path.parent_path());

    std::ofstream bin(bin_path, std::ios::binary);
    if (!bin) throw validation_error("save_snapshot: cannot write " + bin_path.string());
    bin.write(reinterpret_cast<const char*>(u.values.data()),
              static_cast<std::streamsize>(u.values.size() * sizeof(double)));
    if (!bin) throw validation_error("save_snapshot: short write to " + bin_path.string());

    nlohmann::json header;
    header["dtype"] = "<f8";
    header["order"] = "axis0-fastest";
    header["dim"] = u.grid.n;
    header["shape"] = std::vector<int>(u.grid.shape.begin(), u.grid.shape.begin() + u.grid.n);
    header["h"] = u.grid.h;
    header["origin"] =
        std::vector<double>(u.grid.origin.begin(), u.grid.origin.begin() + u.grid.n);
    header["data"] = bin_path.filename().string();
    if (!extra.empty()) header["params"] = extra;

    std::ofstream js(json_path);
    if (!js) throw validation_error("save_snapshot: cannot write " + json_path.string());
    js << header.dump(2) << "\n";
}

std::pair<Field, nlohmann::json> load_snapshot(const std::string& prefix_or_json) {
    fs::path json_path = prefix_or_json;
    if (json_path.extension() != ".json") json_path += ".json";
    std::ifstream js(json_path);
    if (!js) throw validation_error("load_snapshot: cannot open " + json_path.string());
    nlohmann::json header;
    js >> header;

    Grid g;
    g.n = header.at("dim").get<int>();
    const auto shape = header.at("shape").get<std::vector<int>>();
    const auto origin = header.at("origin").get<std::vector<double>>();
    if (static_cast<int>(shape.size()) != g.n || static_cast<int>(origin.size()) != g.n)
        throw validation_error("load_snapshot: header shape/origin mismatch");
    g.h = header.at("h").get<double>();
    for (int a = 0; a < 3; ++a) {
        g.shape[a] = a < g.n ? shape[a] : 1;
        g.origin[a] = a < g.n ? origin[a] : 0.0;
    }

    const fs::path bin_path = json_path.parent_path() / header.at("data").get<std::string>();
    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw validation_error("load_snapshot: cannot open " + bin_path.string());
    Field u;
    u.grid = g;
    u.values.resize(g.size());
    bin.read(reinterpret_cast<char*>(u.values.data()),
             static_cast<std::streamsize>(u.values.size() * sizeof(double)));
    if (bin.gcount() != static_cast<std::streamsize>(u.values.size() * sizeof(double)))
        throw validation_error("load_snapshot: payload shorter than the header shape");
    u.clamp_range();
    return {std::move(u), std::move(header)};
}

void export_field_csv(const Field& u, const std::string& path) {
    const fs::path p = path;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw validation_error("export_field_csv: cannot write " + path);
    out.precision(17);
    const Grid& g = u.grid;
    if (g.n == 1) {
        out << "x,u\n";
        for (std::size_t i = 0; i < g.size(); ++i)
            out << g.coord(i)[0] << "," << u.values[i] << "\n";
        return;
    }
    const int kz = g.n == 3 ? g.shape[2] / 2 : 0;
    out << "x,y,u\n";
    for (int j = 0; j < g.shape[1]; ++j) {
        for (int i = 0; i < g.shape[0]; ++i) {
            const std::size_t idx = g.ravel({i, j, kz});
            const auto x = g.coord(idx);
            out << x[0] << "," << x[1] << "," << u.values[idx] << "\n";
        }
        out << "\n"; // gnuplot block separator per scanline
    }
}

} // namespace glpm
