#include "wander/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "wander/hexfloat.hpp"

namespace wander {

namespace {

double seg_distance(cplx p, cplx a, cplx b) {
    cplx d = b - a;
    double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

// Distance from p to the arc {r e^{i phi} : |phi| <= theta}.
double arc_distance(cplx p, double r, double theta) {
    double ang = std::arg(p);
    if (std::abs(ang) <= theta) return std::abs(std::abs(p) - r);
    cplx e1 = std::polar(r, theta), e2 = std::polar(r, -theta);
    return std::min(std::abs(p - e1), std::abs(p - e2));
}

bool polygon_inside(const std::vector<cplx>& v, cplx p) {
    bool in = false;
    std::size_t n = v.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        double yi = v[i].imag(), yj = v[j].imag();
        if ((yi > p.imag()) != (yj > p.imag())) {
            double x = v[j].real() + (p.imag() - yj) / (yi - yj) * (v[i].real() - v[j].real());
            if (p.real() < x) in = !in;
        }
    }
    return in;
}

double polygon_area_signed(const std::vector<cplx>& v) {
    double a = 0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const cplx& p = v[i];
        const cplx& q = v[(i + 1) % n];
        a += p.real() * q.imag() - q.real() * p.imag();
    }
    return 0.5 * a;
}

double area_of(const Region& r) {
    switch (r.kind()) {
    case Region::Kind::disk: return pi * r.radius() * r.radius();
    case Region::Kind::annular_sector:
        return r.half_angle() * (r.outer_radius() * r.outer_radius() - r.inner_radius() * r.inner_radius());
    case Region::Kind::translate: return area_of(r.base());
    case Region::Kind::polygonal_hull: return std::abs(polygon_area_signed(r.vertices()));
    case Region::Kind::finite_union: {
        double a = 0;
        for (const auto& p : r.parts()) a += area_of(p);
        return a;
    }
    }
    return 0;
}

// Walks a closed polyline by arc length; samples count points starting at v[0].
std::vector<cplx> resample_closed(const std::vector<cplx>& v, int count) {
    std::size_t n = v.size();
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + std::abs(v[(i + 1) % n] - v[i]);
    double total = cum[n];
    std::vector<cplx> out;
    out.reserve(count);
    std::size_t seg = 0;
    for (int k = 0; k < count; ++k) {
        double s = total * k / count;
        while (seg + 1 < n && cum[seg + 1] <= s) ++seg;
        double len = cum[seg + 1] - cum[seg];
        double t = len > 0 ? (s - cum[seg]) / len : 0.0;
        out.push_back(v[seg] + t * (v[(seg + 1) % n] - v[seg]));
    }
    return out;
}

std::vector<cplx> sector_curve(double r_in, double r_out, double th, int count) {
    double lo = 2 * th * r_out, li = 2 * th * r_in, le = r_out - r_in;
    double total = lo + li + 2 * le;
    std::vector<cplx> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        double s = total * k / count;
        if (s < lo) {
            out.push_back(std::polar(r_out, -th + s / r_out));
        } else if ((s -= lo) < le) {
            out.push_back(std::polar(r_out - s, th));
        } else if ((s -= le) < li) {
            out.push_back(std::polar(r_in, th - s / r_in));
        } else {
            s -= li;
            out.push_back(std::polar(r_in + s, -th));
        }
    }
    return out;
}

}  // namespace

Region Region::disk(cplx center, double radius) {
    if (!(radius > 0) || !std::isfinite(radius)) throw InvalidRegion("disk radius must be positive");
    Region r;
    r.kind_ = Kind::disk;
    r.center_ = center;
    r.radius_ = radius;
    return r;
}

Region Region::annular_sector(double r_in, double r_out, double half_angle) {
    if (!(r_in > 0) || !(r_out > r_in)) throw InvalidRegion("sector radii must satisfy 0 < inner < outer");
    if (!(half_angle > 0) || half_angle > pi) throw InvalidRegion("sector half-angle must lie in (0, pi]");
    Region r;
    r.kind_ = Kind::annular_sector;
    r.r_in_ = r_in;
    r.r_out_ = r_out;
    r.half_angle_ = half_angle;
    return r;
}

Region Region::polygonal_hull(std::vector<cplx> vertices) {
    if (vertices.size() < 3) throw InvalidRegion("polygon needs at least three vertices");
    for (auto v : vertices)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidRegion("non-finite vertex");
    if (polygon_area_signed(vertices) < 0) std::reverse(vertices.begin(), vertices.end());
    Region r;
    r.kind_ = Kind::polygonal_hull;
    r.vertices_ = std::make_shared<const std::vector<cplx>>(std::move(vertices));
    return r;
}

Region Region::finite_union(std::vector<Region> parts) {
    if (parts.empty()) throw InvalidRegion("empty union");
    if (parts.size() == 1) return parts.front();
    Region r;
    r.kind_ = Kind::finite_union;
    r.parts_ = std::move(parts);
    return r;
}

Region Region::translated(cplx offset) const {
    if (kind_ == Kind::disk) return disk(center_ + offset, radius_);
    if (kind_ == Kind::translate) return base_->translated(offset_ + offset);
    Region r;
    r.kind_ = Kind::translate;
    r.base_ = std::make_shared<const Region>(*this);
    r.offset_ = offset;
    return r;
}

double Region::signed_distance(cplx z) const {
    switch (kind_) {
    case Kind::disk: return radius_ - std::abs(z - center_);
    case Kind::annular_sector: {
        double m = std::abs(z);
        double d = std::min({arc_distance(z, r_out_, half_angle_), arc_distance(z, r_in_, half_angle_),
                             seg_distance(z, std::polar(r_in_, half_angle_), std::polar(r_out_, half_angle_)),
                             seg_distance(z, std::polar(r_in_, -half_angle_), std::polar(r_out_, -half_angle_))});
        bool in = m > r_in_ && m < r_out_ && std::abs(std::arg(z)) < half_angle_;
        return in ? d : -d;
    }
    case Kind::translate: return base_->signed_distance(z - offset_);
    case Kind::polygonal_hull: {
        const auto& v = *vertices_;
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0, n = v.size(); i < n; ++i) d = std::min(d, seg_distance(z, v[i], v[(i + 1) % n]));
        return polygon_inside(v, z) ? d : -d;
    }
    case Kind::finite_union: {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& p : parts_) best = std::max(best, p.signed_distance(z));
        return best;
    }
    }
    return 0;
}

double Region::perimeter() const {
    switch (kind_) {
    case Kind::disk: return 2 * pi * radius_;
    case Kind::annular_sector: return 2 * half_angle_ * (r_in_ + r_out_) + 2 * (r_out_ - r_in_);
    case Kind::translate: return base_->perimeter();
    case Kind::polygonal_hull: {
        const auto& v = *vertices_;
        double s = 0;
        for (std::size_t i = 0, n = v.size(); i < n; ++i) s += std::abs(v[(i + 1) % n] - v[i]);
        return s;
    }
    case Kind::finite_union: {
        double s = 0;
        for (const auto& p : parts_) s += p.perimeter();
        return s;
    }
    }
    return 0;
}

Box Region::bbox() const {
    switch (kind_) {
    case Kind::disk:
        return {center_.real() - radius_, center_.real() + radius_, center_.imag() - radius_,
                center_.imag() + radius_};
    case Kind::annular_sector: {
        auto pts = sector_curve(r_in_, r_out_, half_angle_, 256);
        Box b{1e300, -1e300, 1e300, -1e300};
        for (auto p : pts) {
            b.x0 = std::min(b.x0, p.real());
            b.x1 = std::max(b.x1, p.real());
            b.y0 = std::min(b.y0, p.imag());
            b.y1 = std::max(b.y1, p.imag());
        }
        if (half_angle_ > pi / 2) b.x0 = std::min(b.x0, -r_out_ * std::min(1.0, -std::cos(half_angle_)));
        if (half_angle_ >= pi / 2) {
            b.y0 = -r_out_;
            b.y1 = r_out_;
        }
        if (half_angle_ > pi * 0.999) b.x0 = -r_out_;
        return b;
    }
    case Kind::translate: {
        Box b = base_->bbox();
        return {b.x0 + offset_.real(), b.x1 + offset_.real(), b.y0 + offset_.imag(), b.y1 + offset_.imag()};
    }
    case Kind::polygonal_hull: {
        Box b{1e300, -1e300, 1e300, -1e300};
        for (auto p : *vertices_) {
            b.x0 = std::min(b.x0, p.real());
            b.x1 = std::max(b.x1, p.real());
            b.y0 = std::min(b.y0, p.imag());
            b.y1 = std::max(b.y1, p.imag());
        }
        return b;
    }
    case Kind::finite_union: {
        Box b{1e300, -1e300, 1e300, -1e300};
        for (const auto& p : parts_) {
            Box q = p.bbox();
            b.x0 = std::min(b.x0, q.x0);
            b.x1 = std::max(b.x1, q.x1);
            b.y0 = std::min(b.y0, q.y0);
            b.y1 = std::max(b.y1, q.y1);
        }
        return b;
    }
    }
    return {};
}

cplx Region::centroid() const {
    switch (kind_) {
    case Kind::disk: return center_;
    case Kind::annular_sector: {
        double a = r_out_, b = r_in_, t = half_angle_;
        return 2 * std::sin(t) / (3 * t) * (a * a * a - b * b * b) / (a * a - b * b);
    }
    case Kind::translate: return base_->centroid() + offset_;
    case Kind::polygonal_hull: {
        const auto& v = *vertices_;
        double A = 0;
        cplx c = 0;
        for (std::size_t i = 0, n = v.size(); i < n; ++i) {
            const cplx& p = v[i];
            const cplx& q = v[(i + 1) % n];
            double cr = p.real() * q.imag() - q.real() * p.imag();
            A += cr;
            c += (p + q) * cr;
        }
        return A != 0 ? c / (3.0 * A) : v.front();
    }
    case Kind::finite_union: {
        double w = 0;
        cplx c = 0;
        for (const auto& p : parts_) {
            double a = area_of(p);
            c += a * p.centroid();
            w += a;
        }
        return c / w;
    }
    }
    return 0;
}

double Region::inradius(int grid) const {
    if (kind_ == Kind::disk) return radius_;
    if (kind_ == Kind::translate) return base_->inradius(grid);
    if (kind_ == Kind::annular_sector) {
        if (half_angle_ >= pi / 2) return 0.5 * (r_out_ - r_in_);
        // The widest inscribed disk sits on the bisector.
        double best = 0;
        for (int i = 0; i <= 400; ++i) {
            double x = r_in_ + (r_out_ - r_in_) * i / 400.0;
            best = std::max(best, signed_distance(cplx(x, 0)));
        }
        return best;
    }
    double best = 0;
    for (auto p : interior_grid(grid)) best = std::max(best, signed_distance(p));
    return best;
}

double Region::diameter() const {
    auto pts = boundary_curves(512);
    double d = 0;
    std::vector<cplx> all;
    for (auto& c : pts) all.insert(all.end(), c.begin(), c.end());
    for (std::size_t i = 0; i < all.size(); i += 2)
        for (std::size_t j = i + 1; j < all.size(); j += 2) d = std::max(d, std::abs(all[i] - all[j]));
    return d;
}

std::vector<std::vector<cplx>> Region::boundary_curves(int count) const {
    count = std::max(count, 1);
    switch (kind_) {
    case Kind::disk: {
        std::vector<cplx> c(count);
        for (int k = 0; k < count; ++k) {
            // Exact quarter turns keep small symmetric samples clean.
            int q = (4 * k) % count == 0 ? (4 * k) / count : -1;
            if (q >= 0) {
                static const cplx units[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
                c[k] = center_ + radius_ * units[q % 4];
            } else {
                c[k] = center_ + std::polar(radius_, 2 * pi * k / count);
            }
        }
        return {c};
    }
    case Kind::annular_sector: return {sector_curve(r_in_, r_out_, half_angle_, count)};
    case Kind::translate: {
        auto cs = base_->boundary_curves(count);
        for (auto& c : cs)
            for (auto& p : c) p += offset_;
        return cs;
    }
    case Kind::polygonal_hull: return {resample_closed(*vertices_, count)};
    case Kind::finite_union: {
        double total = perimeter();
        std::vector<std::vector<cplx>> out;
        for (const auto& p : parts_) {
            int c = std::max(16, static_cast<int>(std::ceil(count * p.perimeter() / total)));
            auto cs = p.boundary_curves(c);
            out.insert(out.end(), cs.begin(), cs.end());
        }
        return out;
    }
    }
    return {};
}

std::vector<cplx> Region::interior_grid(int n) const {
    Box b = bbox();
    std::vector<cplx> out;
    double hx = (b.x1 - b.x0) / n, hy = (b.y1 - b.y0) / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx z(b.x0 + (i + 0.5) * hx, b.y0 + (j + 0.5) * hy);
            if (signed_distance(z) > 0) out.push_back(z);
        }
    return out;
}

double max_gap(const std::vector<cplx>& curve) {
    double g = 0;
    for (std::size_t i = 0, n = curve.size(); i < n; ++i) g = std::max(g, std::abs(curve[(i + 1) % n] - curve[i]));
    return g;
}

double distance_to_polyline(const std::vector<cplx>& c, cplx w) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, n = c.size(); i < n; ++i) d = std::min(d, seg_distance(w, c[i], c[(i + 1) % n]));
    return d;
}

int winding_number(const std::vector<cplx>& curve, cplx w) {
    if (curve.size() < 2) throw TooCloseToCurve("curve has fewer than two samples");
    double gap = max_gap(curve);
    double dist = distance_to_polyline(curve, w);
    if (!(dist > 2 * gap)) throw TooCloseToCurve("probe within twice the sample gap of the curve");
    double total = 0;
    for (std::size_t i = 0, n = curve.size(); i < n; ++i) total += std::arg((curve[(i + 1) % n] - w) / (curve[i] - w));
    return static_cast<int>(std::lround(total / (2 * pi)));
}

double containment_margin(const Region& inner, const Region& outer, int count) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : inner.boundary_curves(count))
        for (auto p : c) m = std::min(m, outer.signed_distance(p));
    return m;
}

bool compactly_contained(const Region& inner, const Region& outer, double margin) {
    int count = 1024;
    bool prev = containment_margin(inner, outer, count) >= margin;
    for (int round = 0; round < 3; ++round) {
        count *= 2;
        bool now = containment_margin(inner, outer, count) >= margin;
        if (now == prev) return now;
        prev = now;
    }
    return prev;
}

PointCloud sample_boundary(const Region& r, int count) {
    PointCloud pc;
    for (auto& c : r.boundary_curves(count)) {
        pc.spacing = std::max(pc.spacing, max_gap(c));
        pc.points.insert(pc.points.end(), c.begin(), c.end());
    }
    return pc;
}

PointCloud dense_boundary_subset(const Region& r, double delta) {
    if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
    PointCloud pc;
    pc.spacing = delta;
    auto add = [&](const Region& piece) {
        int count = std::max(1, static_cast<int>(std::ceil(piece.perimeter() / delta - 1e-12)));
        auto cs = piece.boundary_curves(count);
        for (auto& c : cs) pc.points.insert(pc.points.end(), c.begin(), c.end());
    };
    if (r.kind() == Region::Kind::finite_union)
        for (const auto& p : r.parts()) add(p);
    else
        add(r);
    return pc;
}

double region_distance(const Region& a, const Region& b, int count) {
    double d = std::numeric_limits<double>::infinity();
    for (auto& c : a.boundary_curves(count))
        for (auto p : c) d = std::min(d, -b.signed_distance(p));
    for (auto& c : b.boundary_curves(count))
        for (auto p : c) d = std::min(d, -a.signed_distance(p));
    return d;
}

std::vector<NamedCheck> check_constants(const Constants& c, int translates) {
    std::vector<NamedCheck> out;
    out.push_back({"0 < r1 < 1/9 < r2 < r3 < 1/3", 0 < c.r1 && c.r1 < 1.0 / 9 && 1.0 / 9 < c.r2 && c.r2 < c.r3 && c.r3 < 1.0 / 3,
                   std::min({c.r1, 1.0 / 9 - c.r1, c.r2 - 1.0 / 9, c.r3 - c.r2, 1.0 / 3 - c.r3})});
    out.push_back({"eps < r2/2", c.eps > 0 && c.eps < c.r2 / 2, c.r2 / 2 - c.eps});
    out.push_back({"r3 < 3 r1", c.r3 < 3 * c.r1, 3 * c.r1 - c.r3});
    Region DB = Region::finite_union({c.D(), c.B0()});
    double m = containment_margin(DB, c.PhiD(), 2048);
    out.push_back({"(D u B0) compactly inside Phi(D), margin 0.01", compactly_contained(DB, c.PhiD(), 0.01), m});
    double dDB = region_distance(c.D(), c.B0());
    out.push_back({"D and B0 disjoint", dDB > 0, dDB});
    double dA = region_distance(c.A(), c.D());
    for (int k = 0; k < translates; ++k) dA = std::min(dA, region_distance(c.A(), c.B0().translated(double(k))));
    out.push_back({"A disjoint from D and B0 translates", dA > 0, dA});
    return out;
}

nlohmann::json to_json(const Region& r) {
    using nlohmann::json;
    switch (r.kind()) {
    case Region::Kind::disk: return {{"kind", "disk"}, {"center", hex_pair(r.center())}, {"radius", hex_double(r.radius())}};
    case Region::Kind::annular_sector:
        return {{"kind", "annular_sector"},
                {"inner", hex_double(r.inner_radius())},
                {"outer", hex_double(r.outer_radius())},
                {"half_angle", hex_double(r.half_angle())}};
    case Region::Kind::translate:
        return {{"kind", "translate"}, {"offset", hex_pair(r.offset())}, {"base", to_json(r.base())}};
    case Region::Kind::polygonal_hull: return {{"kind", "polygonal_hull"}, {"vertices", hex_array(r.vertices())}};
    case Region::Kind::finite_union: {
        json parts = json::array();
        for (const auto& p : r.parts()) parts.push_back(to_json(p));
        return {{"kind", "finite_union"}, {"parts", parts}};
    }
    }
    return {};
}

Region region_from_json(const nlohmann::json& j) {
    std::string k = j.at("kind").get<std::string>();
    if (k == "disk") return Region::disk(parse_hex_pair(j.at("center")), parse_hex_double(j.at("radius")));
    if (k == "annular_sector")
        return Region::annular_sector(parse_hex_double(j.at("inner")), parse_hex_double(j.at("outer")),
                                      parse_hex_double(j.at("half_angle")));
    if (k == "translate") return region_from_json(j.at("base")).translated(parse_hex_pair(j.at("offset")));
    if (k == "polygonal_hull") return Region::polygonal_hull(parse_hex_array(j.at("vertices")));
    if (k == "finite_union") {
        std::vector<Region> parts;
        for (const auto& p : j.at("parts")) parts.push_back(region_from_json(p));
        return Region::finite_union(std::move(parts));
    }
    throw InvalidRegion("unknown region kind: " + k);
}

nlohmann::json to_json(const PointCloud& pc) {
    nlohmann::json pts = nlohmann::json::array();
    for (auto p : pc.points) pts.push_back({p.real(), p.imag()});
    return pts;
}

std::string hex_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::hex);
    std::string s(buf, res.ptr);
    if (!std::isfinite(x)) return s;
    if (s[0] == '-') return "-0x" + s.substr(1);
    return "0x" + s;
}

double parse_hex_double(const std::string& s) {
    std::string_view v = s;
    bool neg = false;
    if (!v.empty() && (v[0] == '-' || v[0] == '+')) {
        neg = v[0] == '-';
        v.remove_prefix(1);
    }
    if (v.size() > 1 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) v.remove_prefix(2);
    double x = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), x, std::chars_format::hex);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw std::invalid_argument("bad hex float: " + s);
    return neg ? -x : x;
}

nlohmann::json hex_pair(cplx z) { return nlohmann::json::array({hex_double(z.real()), hex_double(z.imag())}); }

cplx parse_hex_pair(const nlohmann::json& j) {
    return {parse_hex_double(j.at(0).get<std::string>()), parse_hex_double(j.at(1).get<std::string>())};
}

nlohmann::json hex_array(const std::vector<cplx>& zs) {
    nlohmann::json a = nlohmann::json::array();
    for (auto z : zs) a.push_back(hex_pair(z));
    return a;
}

std::vector<cplx> parse_hex_array(const nlohmann::json& j) {
    std::vector<cplx> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(parse_hex_pair(e));
    return out;
}

}  // namespace wander
