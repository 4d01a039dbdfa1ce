#include "detector/model.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "core/serialize.hpp"
#include "features/gradient.hpp"

namespace selflearn {

ScalePrior fit_scale_prior(const std::vector<double>& heights) {
    if (heights.empty()) throw SlfError("scale prior needs at least one height");
    double mean = 0.0;
    for (const double h : heights) mean += h;
    mean /= double(heights.size());
    double var = 0.0;
    for (const double h : heights) var += (h - mean) * (h - mean);
    var /= double(heights.size()); // population convention
    return ScalePrior{mean, std::sqrt(var)};
}

DetectorModel DetectorModel::make_empty(const DetectorConfig& cfg) {
    DetectorModel m;
    m.cell_size = cfg.cell_size;
    m.root_cells_w = cfg.root_cells_w;
    m.root_cells_h = cfg.root_cells_h;
    m.displacement = cfg.displacement;
    m.deformation_quadratic = float(cfg.deformation_quadratic);
    m.deformation_linear = float(cfg.deformation_linear);

    const int root_dim = window_descriptor_dim(cfg.root_cells_w, cfg.root_cells_h);

    // Parts tile the doubled-resolution root on a 2-column grid.
    const int k = cfg.parts;
    const int grid_x = k > 1 ? 2 : 1;
    const int grid_y = k > 0 ? (k + grid_x - 1) / grid_x : 0;
    const int double_w = 2 * cfg.root_cells_w;
    const int double_h = 2 * cfg.root_cells_h;

    for (int c = 0; c < cfg.components; ++c) {
        ComponentModel comp;
        comp.root_filter.assign(std::size_t(root_dim), 0.0f);
        for (int p = 0; p < k; ++p) {
            PartModel part;
            const int gx = p % grid_x;
            const int gy = p / grid_x;
            part.cells_w = double_w / grid_x;
            part.cells_h = double_h / grid_y;
            part.anchor_x = gx * part.cells_w;
            part.anchor_y = gy * part.cells_h;
            part.filter.assign(std::size_t(window_descriptor_dim(part.cells_w, part.cells_h)), 0.0f);
            comp.parts.push_back(std::move(part));
        }
        comp.bias = 0.0f;
        m.components.push_back(std::move(comp));
    }
    return m;
}

namespace {
constexpr std::uint32_t kDetectorMagic = 0x534c4644; // "SLFD"
constexpr std::uint32_t kDetectorVersion = 1;
} // namespace

void DetectorModel::save(std::ostream& os) const {
    write_u32(os, kDetectorMagic);
    write_u32(os, kDetectorVersion);
    write_i32(os, cell_size);
    write_i32(os, root_cells_w);
    write_i32(os, root_cells_h);
    write_i32(os, displacement);
    write_f32(os, deformation_quadratic);
    write_f32(os, deformation_linear);
    write_f64(os, prior.mean);
    write_f64(os, prior.stddev);
    write_u32(os, std::uint32_t(components.size()));
    for (const auto& c : components) {
        write_f32_vec(os, c.root_filter);
        write_f32(os, c.bias);
        write_u32(os, std::uint32_t(c.parts.size()));
        for (const auto& p : c.parts) {
            write_i32(os, p.cells_w);
            write_i32(os, p.cells_h);
            write_i32(os, p.anchor_x);
            write_i32(os, p.anchor_y);
            write_f32_vec(os, p.filter);
        }
    }
}

DetectorModel DetectorModel::load(std::istream& is) {
    if (read_u32(is) != kDetectorMagic) throw SlfError("not a detector model stream");
    const std::uint32_t version = read_u32(is);
    if (version != kDetectorVersion)
        throw SlfError("detector model version mismatch: have " + std::to_string(version) +
                       ", expected " + std::to_string(kDetectorVersion));
    DetectorModel m;
    m.cell_size = read_i32(is);
    m.root_cells_w = read_i32(is);
    m.root_cells_h = read_i32(is);
    m.displacement = read_i32(is);
    m.deformation_quadratic = read_f32(is);
    m.deformation_linear = read_f32(is);
    m.prior.mean = read_f64(is);
    m.prior.stddev = read_f64(is);
    const std::uint32_t n_comp = read_u32(is);
    for (std::uint32_t i = 0; i < n_comp; ++i) {
        ComponentModel c;
        c.root_filter = read_f32_vec(is);
        c.bias = read_f32(is);
        const std::uint32_t n_parts = read_u32(is);
        for (std::uint32_t p = 0; p < n_parts; ++p) {
            PartModel part;
            part.cells_w = read_i32(is);
            part.cells_h = read_i32(is);
            part.anchor_x = read_i32(is);
            part.anchor_y = read_i32(is);
            part.filter = read_f32_vec(is);
            c.parts.push_back(std::move(part));
        }
        m.components.push_back(std::move(c));
    }
    return m;
}

} // namespace selflearn
