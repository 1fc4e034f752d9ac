#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace shrinklab {

// Multi-index into a grid; unused trailing axes are zero.
using Index = std::array<int, 3>;

/// Uniform Cartesian grid over the box [-L, L]^dim with an odd number of
/// nodes per axis, so the origin is always a node.
struct GridSpec {
    int dim = 0;
    double half_width = 0.0;
    int nodes_per_axis = 0;
    double spacing = 0.0;

    /// Validates and builds a spec. Throws std::invalid_argument on
    /// dim outside {1,2,3}, non-positive half width, even m, or m < 5.
    static GridSpec make(int dim, double half_width, int nodes_per_axis);

    std::size_t node_count() const;
    double coord(int k) const { return -half_width + k * spacing; }

    // Row-major storage: axis 0 slowest, last axis fastest.
    std::size_t flatten(const Index& idx) const;
    Index unflatten(std::size_t node) const;
    std::array<double, 3> point(const Index& idx) const;

    bool operator==(const GridSpec&) const = default;
};

/// One real value per grid node.
struct ScalarField {
    GridSpec spec;
    std::vector<double> values;

    double& at(const Index& idx) { return values[spec.flatten(idx)]; }
    double at(const Index& idx) const { return values[spec.flatten(idx)]; }

    static ScalarField zeros(const GridSpec& spec);
};

/// One real tuple of fixed arity per grid node (arity n or n+1 by context).
struct VectorField {
    GridSpec spec;
    int arity = 0;
    std::vector<double> values;

    double& at(std::size_t node, int comp) { return values[node * arity + comp]; }
    double at(std::size_t node, int comp) const { return values[node * arity + comp]; }

    static VectorField zeros(const GridSpec& spec, int arity);
};

/// Symmetric second-derivative matrix per node, stored as the full
/// dim*dim entries (the mixed stencils are symmetric by construction).
struct HessianField {
    GridSpec spec;
    std::vector<double> values;  // node-major, then i*dim+j

    double at(std::size_t node, int i, int j) const {
        return values[(node * spec.dim + i) * spec.dim + j];
    }
    double& at(std::size_t node, int i, int j) {
        return values[(node * spec.dim + i) * spec.dim + j];
    }
};

/// Analytic height profiles used throughout: planes u = a.x, the upper
/// sphere cap u = sqrt(2n - |x|^2) of the radius-sqrt(2n) sphere,
/// paraboloids u = c|x|^2, and u = a x1 + b sin(k x1).
class Profile {
public:
    static Profile plane(std::vector<double> a);
    static Profile sphere_cap(int dim);
    static Profile paraboloid(double c);
    static Profile sinusoid(double a, double b, double k);
    static Profile tabulated(std::function<double(std::span<const double>)> fn,
                             std::string name = "tabulated");

    double operator()(std::span<const double> x) const { return fn_(x); }
    const std::string& name() const { return name_; }

    /// Throws if the profile is undefined somewhere on the grid box
    /// (sphere_cap when the box corner leaves the open disk of radius sqrt(2n)).
    void check_domain(const GridSpec& spec) const;

private:
    Profile(std::function<double(std::span<const double>)> fn, std::string name,
            double domain_radius = -1.0)
        : fn_(std::move(fn)), name_(std::move(name)), domain_radius_(domain_radius) {}

    std::function<double(std::span<const double>)> fn_;
    std::string name_;
    double domain_radius_;  // < 0 means entire
};

/// Exact pointwise sampling of a profile at every node.
ScalarField discretize(const Profile& profile, const GridSpec& spec);

/// Second-order first derivatives: centered at interior nodes, one-sided
/// three-point stencils on the faces. Exact on quadratics at interior nodes.
VectorField gradient_fd(const ScalarField& field);

/// Second-order second derivatives. Diagonal entries use the three-point
/// centered stencil (four-point one-sided at faces); mixed entries are the
/// composition of the two first-derivative operators, hence symmetric.
HessianField hessian_fd(const ScalarField& field);

/// Predicate mask: true for nodes at least margin_nodes layers from every face.
std::vector<bool> interior_mask(const GridSpec& spec, int margin_nodes);

bool is_interior(const GridSpec& spec, const Index& idx, int margin_nodes);

/// Applies fn to every node index (single-threaded, deterministic order).
void for_each_node(const GridSpec& spec, const std::function<void(std::size_t, const Index&)>& fn);

/// CSV dump: header x1,...,xn,value; one node per row in storage order;
/// 17 significant digits.
void write_field_csv(std::ostream& os, const ScalarField& field);

}  // namespace shrinklab
