#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace wander {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

struct TooCloseToCurve : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidRegion : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Box {
    double x0, x1, y0, y1;
};

// Immutable planar region. Translates and unions share their parts.
class Region {
public:
    enum class Kind { disk, annular_sector, translate, polygonal_hull, finite_union };

    static Region disk(cplx center, double radius);
    // {r_in < |z| < r_out, |arg z| < half_angle}, centred at the origin.
    static Region annular_sector(double r_in, double r_out, double half_angle);
    static Region polygonal_hull(std::vector<cplx> vertices);
    static Region finite_union(std::vector<Region> parts);
    Region translated(cplx offset) const;

    Kind kind() const { return kind_; }

    // Positive inside, negative outside, magnitude = distance to the boundary.
    double signed_distance(cplx z) const;
    bool contains(cplx z, double tol = 0.0) const { return signed_distance(z) >= -tol; }

    double perimeter() const;
    Box bbox() const;
    cplx centroid() const;
    // Largest inscribed radius, estimated on a grid.
    double inradius(int grid = 96) const;
    double diameter() const;

    // Closed curves, one per connected piece, sampled by arc length.
    std::vector<std::vector<cplx>> boundary_curves(int count) const;
    // Interior points of an n-by-n grid over the bounding box.
    std::vector<cplx> interior_grid(int n) const;

    const std::vector<Region>& parts() const { return parts_; }
    cplx center() const { return center_; }
    double radius() const { return radius_; }
    double inner_radius() const { return r_in_; }
    double outer_radius() const { return r_out_; }
    double half_angle() const { return half_angle_; }
    const std::vector<cplx>& vertices() const { return *vertices_; }
    cplx offset() const { return offset_; }
    const Region& base() const { return *base_; }

private:
    Region() = default;

    Kind kind_ = Kind::disk;
    cplx center_{};
    double radius_ = 0, r_in_ = 0, r_out_ = 0, half_angle_ = 0;
    std::shared_ptr<const std::vector<cplx>> vertices_;
    std::shared_ptr<const Region> base_;
    cplx offset_{};
    std::vector<Region> parts_;
};

struct PointCloud {
    std::vector<cplx> points;
    double spacing = 0.0;
};

int winding_number(const std::vector<cplx>& curve, cplx w);

double max_gap(const std::vector<cplx>& curve);
double distance_to_polyline(const std::vector<cplx>& closed_curve, cplx w);

bool compactly_contained(const Region& inner, const Region& outer, double margin);

// Smallest signed distance to outer over inner's boundary samples, refined by doubling.
double containment_margin(const Region& inner, const Region& outer, int count = 1024);

PointCloud sample_boundary(const Region& r, int count);
PointCloud dense_boundary_subset(const Region& r, double delta);

double region_distance(const Region& a, const Region& b, int count = 1024);

struct Constants {
    double r1 = 0.108;
    double r2 = 5.0 / 27.0;
    double r3 = 7.0 / 27.0;
    double eps = 0.08;
    double half_angle = pi / 4.0;
    double a_radius = 1.0 / 18.0;

    Region D() const { return Region::disk(0.0, r1); }
    Region B0() const { return Region::annular_sector(r2, r3, half_angle); }
    Region A() const { return Region::disk(-0.25, a_radius); }
    Region PhiD() const { return Region::disk(0.0, 3.0 * r1); }
};

struct NamedCheck {
    std::string name;
    bool pass = false;
    double margin = 0.0;
};

// Ordering constraints of the constants plus the set-level requirements on D, B0 and A.
std::vector<NamedCheck> check_constants(const Constants& c, int translates = 4);

nlohmann::json to_json(const Region& r);
Region region_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PointCloud& pc);

}  // namespace wander
