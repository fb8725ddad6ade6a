#ifndef FLUXQ_FLUX_MAP_HPP
#define FLUXQ_FLUX_MAP_HPP

#include <map>
#include <string>
#include <vector>

namespace fluxq {

/// One linear grid axis: count points from start to stop inclusive.
struct Axis {
    std::string name;
    double start = 0.0;
    double stop = 0.0;
    int count = 0;

    void validate() const;
    double at(int i) const { return start + (stop - start) * i / (count - 1); }
    double step() const { return count > 1 ? (stop - start) / (count - 1) : 0.0; }

    /// Parse "start:stop:count".
    static Axis parse(const std::string& name, const std::string& text);
};

/// Row-major rectangular grid of scalars over two axes. Rows follow the
/// y-axis (second axis), columns the x-axis (first axis):
/// value(ix, iy) = values[iy * x.count + ix].
struct FluxMap {
    Axis x;
    Axis y;
    std::vector<double> values;                  // NaN marks sentinel cells
    std::map<std::string, std::string> metadata;

    double& at(int ix, int iy) { return values[std::size_t(iy) * x.count + ix]; }
    double at(int ix, int iy) const { return values[std::size_t(iy) * x.count + ix]; }

    std::size_t nan_count() const;

    /// CSV: '#' comment header carrying axes and metadata, then one
    /// "x,y,value" row per cell in row-major order.
    std::string to_csv() const;
    static FluxMap from_csv(const std::string& text);

    /// JSON envelope {axes, values, metadata}.
    std::string to_json() const;
    static FluxMap from_json(const std::string& text);

    /// Self-contained SVG heatmap; log_scale applies log10 to positive values.
    /// invert_gray renders low values dark on a light background.
    std::string to_svg(bool log_scale = false, bool invert_gray = false) const;

    static FluxMap load(const std::string& path);   // dispatch on extension
    void save(const std::string& path) const;
};

}  // namespace fluxq

#endif
