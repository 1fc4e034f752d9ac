#include "shrinklab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace shrinklab {

GridSpec GridSpec::make(int dim, double half_width, int nodes_per_axis) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("grid dim must be 1, 2 or 3");
    if (!(half_width > 0.0))
        throw std::invalid_argument("grid half_width must be positive");
    if (nodes_per_axis < 5)
        throw std::invalid_argument("grid needs at least 5 nodes per axis");
    if (nodes_per_axis % 2 == 0)
        throw std::invalid_argument("nodes_per_axis must be odd so the origin is a node");
    GridSpec spec;
    spec.dim = dim;
    spec.half_width = half_width;
    spec.nodes_per_axis = nodes_per_axis;
    spec.spacing = 2.0 * half_width / (nodes_per_axis - 1);
    return spec;
}

std::size_t GridSpec::node_count() const {
    std::size_t n = 1;
    for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(nodes_per_axis);
    return n;
}

std::size_t GridSpec::flatten(const Index& idx) const {
    std::size_t node = 0;
    for (int d = 0; d < dim; ++d)
        node = node * static_cast<std::size_t>(nodes_per_axis) + static_cast<std::size_t>(idx[d]);
    return node;
}

Index GridSpec::unflatten(std::size_t node) const {
    Index idx{0, 0, 0};
    for (int d = dim - 1; d >= 0; --d) {
        idx[d] = static_cast<int>(node % static_cast<std::size_t>(nodes_per_axis));
        node /= static_cast<std::size_t>(nodes_per_axis);
    }
    return idx;
}

std::array<double, 3> GridSpec::point(const Index& idx) const {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) x[d] = coord(idx[d]);
    return x;
}

ScalarField ScalarField::zeros(const GridSpec& spec) {
    return ScalarField{spec, std::vector<double>(spec.node_count(), 0.0)};
}

VectorField VectorField::zeros(const GridSpec& spec, int arity) {
    return VectorField{spec, arity, std::vector<double>(spec.node_count() * arity, 0.0)};
}

Profile Profile::plane(std::vector<double> a) {
    return Profile(
        [a](std::span<const double> x) {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size() && i < x.size(); ++i) s += a[i] * x[i];
            return s;
        },
        "plane");
}

Profile Profile::sphere_cap(int dim) {
    const double r2 = 2.0 * dim;
    return Profile(
        [r2](std::span<const double> x) {
            double s = 0.0;
            for (double xi : x) s += xi * xi;
            return std::sqrt(r2 - s);
        },
        "sphere_cap", std::sqrt(r2));
}

Profile Profile::paraboloid(double c) {
    return Profile(
        [c](std::span<const double> x) {
            double s = 0.0;
            for (double xi : x) s += xi * xi;
            return c * s;
        },
        "paraboloid");
}

Profile Profile::sinusoid(double a, double b, double k) {
    return Profile(
        [a, b, k](std::span<const double> x) { return a * x[0] + b * std::sin(k * x[0]); },
        "sinusoid");
}

Profile Profile::tabulated(std::function<double(std::span<const double>)> fn, std::string name) {
    return Profile(std::move(fn), std::move(name));
}

void Profile::check_domain(const GridSpec& spec) const {
    if (domain_radius_ < 0.0) return;
    // The box corner is the farthest node from the origin.
    const double corner = spec.half_width * std::sqrt(static_cast<double>(spec.dim));
    if (corner >= domain_radius_)
        throw std::invalid_argument(name_ + " profile undefined on the grid box (half_width too large)");
}

ScalarField discretize(const Profile& profile, const GridSpec& spec) {
    profile.check_domain(spec);
    ScalarField out = ScalarField::zeros(spec);
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        const auto p = spec.point(idx);
        out.values[node] = profile(std::span<const double>(p.data(), static_cast<std::size_t>(spec.dim)));
    });
    return out;
}

namespace {

// Up to four (offset, weight) pairs of a 1D derivative stencil at index k.
struct Stencil {
    int count = 0;
    int offset[4] = {};
    double weight[4] = {};
};

Stencil first_derivative_stencil(int k, int m, double h) {
    Stencil s;
    if (k == 0) {
        s.count = 3;
        s.offset[0] = 0; s.offset[1] = 1; s.offset[2] = 2;
        s.weight[0] = -1.5 / h; s.weight[1] = 2.0 / h; s.weight[2] = -0.5 / h;
    } else if (k == m - 1) {
        s.count = 3;
        s.offset[0] = 0; s.offset[1] = -1; s.offset[2] = -2;
        s.weight[0] = 1.5 / h; s.weight[1] = -2.0 / h; s.weight[2] = 0.5 / h;
    } else {
        s.count = 2;
        s.offset[0] = -1; s.offset[1] = 1;
        s.weight[0] = -0.5 / h; s.weight[1] = 0.5 / h;
    }
    return s;
}

Stencil second_derivative_stencil(int k, int m, double h) {
    const double h2 = h * h;
    Stencil s;
    if (k == 0) {
        s.count = 4;
        s.offset[0] = 0; s.offset[1] = 1; s.offset[2] = 2; s.offset[3] = 3;
        s.weight[0] = 2.0 / h2; s.weight[1] = -5.0 / h2; s.weight[2] = 4.0 / h2; s.weight[3] = -1.0 / h2;
    } else if (k == m - 1) {
        s.count = 4;
        s.offset[0] = 0; s.offset[1] = -1; s.offset[2] = -2; s.offset[3] = -3;
        s.weight[0] = 2.0 / h2; s.weight[1] = -5.0 / h2; s.weight[2] = 4.0 / h2; s.weight[3] = -1.0 / h2;
    } else {
        s.count = 3;
        s.offset[0] = -1; s.offset[1] = 0; s.offset[2] = 1;
        s.weight[0] = 1.0 / h2; s.weight[1] = -2.0 / h2; s.weight[2] = 1.0 / h2;
    }
    return s;
}

double apply_axis_stencil(const ScalarField& f, Index idx, int axis, const Stencil& s) {
    double acc = 0.0;
    const int k = idx[axis];
    for (int t = 0; t < s.count; ++t) {
        idx[axis] = k + s.offset[t];
        acc += s.weight[t] * f.at(idx);
    }
    return acc;
}

ScalarField derive_axis(const ScalarField& f, int axis) {
    ScalarField out = ScalarField::zeros(f.spec);
    const int m = f.spec.nodes_per_axis;
    const double h = f.spec.spacing;
    for_each_node(f.spec, [&](std::size_t node, const Index& idx) {
        out.values[node] = apply_axis_stencil(f, idx, axis, first_derivative_stencil(idx[axis], m, h));
    });
    return out;
}

}  // namespace

VectorField gradient_fd(const ScalarField& field) {
    const GridSpec& spec = field.spec;
    VectorField out = VectorField::zeros(spec, spec.dim);
    const int m = spec.nodes_per_axis;
    const double h = spec.spacing;
    for (int d = 0; d < spec.dim; ++d) {
        for_each_node(spec, [&](std::size_t node, const Index& idx) {
            out.at(node, d) = apply_axis_stencil(field, idx, d, first_derivative_stencil(idx[d], m, h));
        });
    }
    return out;
}

HessianField hessian_fd(const ScalarField& field) {
    const GridSpec& spec = field.spec;
    HessianField out{spec, std::vector<double>(spec.node_count() * spec.dim * spec.dim, 0.0)};
    const int m = spec.nodes_per_axis;
    const double h = spec.spacing;
    for (int i = 0; i < spec.dim; ++i) {
        for_each_node(spec, [&](std::size_t node, const Index& idx) {
            out.at(node, i, i) = apply_axis_stencil(field, idx, i, second_derivative_stencil(idx[i], m, h));
        });
        for (int j = i + 1; j < spec.dim; ++j) {
            ScalarField dj = derive_axis(field, j);
            for_each_node(spec, [&](std::size_t node, const Index& idx) {
                const double mixed =
                    apply_axis_stencil(dj, idx, i, first_derivative_stencil(idx[i], m, h));
                out.at(node, i, j) = mixed;
                out.at(node, j, i) = mixed;
            });
        }
    }
    return out;
}

bool is_interior(const GridSpec& spec, const Index& idx, int margin_nodes) {
    for (int d = 0; d < spec.dim; ++d)
        if (idx[d] < margin_nodes || idx[d] > spec.nodes_per_axis - 1 - margin_nodes) return false;
    return true;
}

std::vector<bool> interior_mask(const GridSpec& spec, int margin_nodes) {
    if (margin_nodes < 0 || margin_nodes >= (spec.nodes_per_axis - 1) / 2)
        throw std::invalid_argument("interior_mask: margin too large for this grid");
    std::vector<bool> mask(spec.node_count(), false);
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        mask[node] = is_interior(spec, idx, margin_nodes);
    });
    return mask;
}

void for_each_node(const GridSpec& spec, const std::function<void(std::size_t, const Index&)>& fn) {
    const std::size_t count = spec.node_count();
    Index idx{0, 0, 0};
    for (std::size_t node = 0; node < count; ++node) {
        fn(node, idx);
        for (int d = spec.dim - 1; d >= 0; --d) {
            if (++idx[d] < spec.nodes_per_axis) break;
            idx[d] = 0;
        }
    }
}

void write_field_csv(std::ostream& os, const ScalarField& field) {
    const GridSpec& spec = field.spec;
    for (int d = 0; d < spec.dim; ++d) os << "x" << (d + 1) << ",";
    os << "value\n";
    char buf[64];
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        for (int d = 0; d < spec.dim; ++d) {
            std::snprintf(buf, sizeof(buf), "%.17g", spec.coord(idx[d]));
            os << buf << ",";
        }
        std::snprintf(buf, sizeof(buf), "%.17g", field.values[node]);
        os << buf << "\n";
    });
}

}  // namespace shrinklab
