#include "fluxq/flux_map.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fluxq {

void Axis::validate() const {
    if (count < 2) throw std::invalid_argument("Axis '" + name + "': count must be >= 2");
    if (!std::isfinite(start) || !std::isfinite(stop))
        throw std::invalid_argument("Axis '" + name + "': bounds must be finite");
}

Axis Axis::parse(const std::string& name, const std::string& text) {
    Axis ax;
    ax.name = name;
    char colon1 = 0, colon2 = 0;
    std::istringstream ss(text);
    if (!(ss >> ax.start >> colon1 >> ax.stop >> colon2 >> ax.count) || colon1 != ':' ||
        colon2 != ':' || !ss.eof())
        throw std::invalid_argument("axis '" + name + "': expected start:stop:count, got '" +
                                    text + "'");
    ax.validate();
    return ax;
}

std::size_t FluxMap::nan_count() const {
    std::size_t n = 0;
    for (double v : values)
        if (std::isnan(v)) ++n;
    return n;
}

namespace {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string FluxMap::to_csv() const {
    std::ostringstream out;
    out << "# axis_x," << x.name << "," << fmt_double(x.start) << "," << fmt_double(x.stop)
        << "," << x.count << "\n";
    out << "# axis_y," << y.name << "," << fmt_double(y.start) << "," << fmt_double(y.stop)
        << "," << y.count << "\n";
    for (const auto& [k, v] : metadata) out << "# meta," << k << "," << v << "\n";
    out << x.name << "," << y.name << ",value\n";
    for (int iy = 0; iy < y.count; ++iy)
        for (int ix = 0; ix < x.count; ++ix)
            out << fmt_double(x.at(ix)) << "," << fmt_double(y.at(iy)) << ","
                << fmt_double(at(ix, iy)) << "\n";
    return out.str();
}

FluxMap FluxMap::from_csv(const std::string& text) {
    FluxMap m;
    std::istringstream in(text);
    std::string line;
    bool have_x = false, have_y = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string tag;
            std::getline(ls, tag, ',');
            tag.erase(0, tag.find_first_not_of(' '));
            if (tag == "axis_x" || tag == "axis_y") {
                Axis ax;
                std::string s;
                std::getline(ls, ax.name, ',');
                std::getline(ls, s, ',');
                ax.start = std::stod(s);
                std::getline(ls, s, ',');
                ax.stop = std::stod(s);
                std::getline(ls, s, ',');
                ax.count = std::stoi(s);
                ax.validate();
                if (tag == "axis_x") { m.x = ax; have_x = true; }
                else { m.y = ax; have_y = true; }
            } else if (tag == "meta") {
                std::string k, v;
                std::getline(ls, k, ',');
                std::getline(ls, v);
                m.metadata[k] = v;
            }
            continue;
        }
        // header or data row; data rows start with a number
        std::istringstream ls(line);
        std::string a, b, c;
        std::getline(ls, a, ',');
        std::getline(ls, b, ',');
        std::getline(ls, c, ',');
        try {
            (void)std::stod(a);
        } catch (...) {
            continue;  // column header
        }
        m.values.push_back(c == "nan" ? std::numeric_limits<double>::quiet_NaN()
                                      : std::stod(c));
    }
    if (!have_x || !have_y)
        throw std::runtime_error("FluxMap::from_csv: missing axis header comments");
    if (m.values.size() != std::size_t(m.x.count) * m.y.count)
        throw std::runtime_error("FluxMap::from_csv: value count does not match axes");
    return m;
}

std::string FluxMap::to_json() const {
    nlohmann::json j;
    j["axes"] = {
        {{"name", x.name}, {"start", x.start}, {"stop", x.stop}, {"count", x.count}},
        {{"name", y.name}, {"start", y.start}, {"stop", y.stop}, {"count", y.count}},
    };
    nlohmann::json vals = nlohmann::json::array();
    for (double v : values) {
        if (std::isnan(v)) vals.push_back(nullptr);
        else vals.push_back(v);
    }
    j["values"] = std::move(vals);
    j["metadata"] = metadata;
    return j.dump(2);
}

FluxMap FluxMap::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    FluxMap m;
    auto read_axis = [](const nlohmann::json& a) {
        Axis ax;
        ax.name = a.at("name").get<std::string>();
        ax.start = a.at("start").get<double>();
        ax.stop = a.at("stop").get<double>();
        ax.count = a.at("count").get<int>();
        ax.validate();
        return ax;
    };
    m.x = read_axis(j.at("axes").at(0));
    m.y = read_axis(j.at("axes").at(1));
    for (const auto& v : j.at("values")) {
        m.values.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                       : v.get<double>());
    }
    if (j.contains("metadata"))
        for (auto it = j["metadata"].begin(); it != j["metadata"].end(); ++it)
            m.metadata[it.key()] = it.value().get<std::string>();
    if (m.values.size() != std::size_t(m.x.count) * m.y.count)
        throw std::runtime_error("FluxMap::from_json: value count does not match axes");
    return m;
}

std::string FluxMap::to_svg(bool log_scale, bool invert_gray) const {
    const int cell = std::max(1, 600 / std::max(x.count, y.count));
    const int w = x.count * cell, hgt = y.count * cell;

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    auto transform = [&](double v) {
        if (log_scale) return std::log10(std::max(v, 1e-300));
        return v;
    };
    for (double v : values) {
        if (std::isnan(v)) continue;
        const double t = transform(v);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (!(hi > lo)) { lo = 0.0; hi = 1.0; }

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
        << hgt << "\" viewBox=\"0 0 " << w << " " << hgt << "\">\n";
    out << "<!-- " << x.name << " in [" << x.start << "," << x.stop << "], " << y.name
        << " in [" << y.start << "," << y.stop << "] -->\n";
    for (int iy = 0; iy < y.count; ++iy) {
        for (int ix = 0; ix < x.count; ++ix) {
            const double v = at(ix, iy);
            int gray;
            if (std::isnan(v)) {
                gray = -1;
            } else {
                double t = (transform(v) - lo) / (hi - lo);
                if (invert_gray) t = 1.0 - t;
                gray = int(std::lround(255.0 * t));
            }
            out << "<rect x=\"" << ix * cell << "\" y=\"" << (y.count - 1 - iy) * cell
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"";
            if (gray < 0) out << "rgb(255,0,255)";
            else out << "rgb(" << gray << "," << gray << "," << gray << ")";
            out << "\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool ends_with(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

}  // namespace

FluxMap FluxMap::load(const std::string& path) {
    const std::string text = read_file(path);
    if (ends_with(path, ".json")) return from_json(text);
    return from_csv(text);
}

void FluxMap::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    if (ends_with(path, ".json")) out << to_json();
    else if (ends_with(path, ".svg")) out << to_svg();
    else out << to_csv();
}

}  // namespace fluxq
