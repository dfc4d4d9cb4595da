#include "ampere/linking.hpp"

#include <cmath>
#include <sstream>

#include "ampere/error.hpp"
#include "ampere/parallel.hpp"

namespace ampere {

Vector3 polygon_area_vector(const std::vector<Vector3>& loop) {
    Vector3 area;
    for (std::size_t i = 0; i < loop.size(); ++i) area += cross(loop[i], loop[(i + 1) % loop.size()]);
    return 0.5 * area;
}

double LinkScene::scale() const {
    BoundingBox box = curve_c.bounds();
    box.expand(curve_l.bounds());
    if (spanning_mesh) box.expand(spanning_mesh->source().bounds());
    return box.diagonal();
}

void LinkScene::validate(double guard) const {
    if (!curve_c.closed() || !curve_l.closed()) throw Error(ErrorKind::SceneError, "both curves of a link scene must be closed");
    const double gap = min_distance(curve_c, curve_l);
    if (gap <= guard) {
        std::ostringstream msg;
        msg << "curves are " << gap << " apart (guard " << guard << ")";
        throw Error(ErrorKind::CurvesTooClose, msg.str());
    }
    if (!spanning_mesh) return;

    const double tol = 1e-6 * scale();
    const Curve boundary = mesh_boundary(*spanning_mesh);
    const auto& verts = boundary.as_polyline()->vertices;
    for (const auto& v : verts) {
        if (curve_l.distance_to(v) > tol)
            throw Error(ErrorKind::SceneError, "spanning mesh boundary leaves curve_l");
    }
    // Circulation sense: compare the projected areas of the two loops.
    const auto sampled = curve_l.sample(spanning_mesh->min_edge_length());
    if (sampled.size() != 1) throw Error(ErrorKind::SceneError, "curve_l must be a single loop to carry a spanning mesh");
    const Vector3 a_mesh = polygon_area_vector(verts);
    const Vector3 a_curve = polygon_area_vector(sampled.front().vertices);
    if (!(dot(a_mesh, a_curve) > 0.0))
        throw Error(ErrorKind::SceneError, "spanning mesh boundary runs against curve_l");
}

namespace {

struct PieceSum {
    double value = 0.0;
    double error = 0.0;
    PieceSum& operator+=(const PieceSum& o) {
        value += o.value;
        error += o.error;
        return *this;
    }
};

}  // namespace

LinkingValue gauss_integral(const Curve& curve_c, const Curve& curve_l, const FieldConstants& consts,
                            const QuadratureSpec& spec) {
    consts.validate();
    spec.validate();
    const double gap = min_distance(curve_c, curve_l);
    if (gap <= spec.min_distance_guard) {
        std::ostringstream msg;
        msg << "curves are " << gap << " apart (guard " << spec.min_distance_guard << ")";
        throw Error(ErrorKind::CurvesTooClose, msg.str());
    }

    const auto pc = curve_c.pieces();
    const auto pl = curve_l.pieces();
    const std::size_t pairs = pc.size() * pl.size();
    const bool outer = pairs > 1 && spec.exec == Exec::parallel;
    QuadratureSpec inner = spec;
    if (outer) inner.exec = Exec::serial;

    auto integrand = [&](double t, double s) {
        const CurvePoint m = curve_c.eval(t);
        const CurvePoint l = curve_l.eval(s);
        const Vector3 r = l.position - m.position;
        const double d = norm(r);
        return dot(cross(m.tangent, r), l.tangent) / (d * d * d);
    };
    const PieceSum total = ordered_sum(pairs, outer ? Exec::parallel : Exec::serial, PieceSum{}, [&](std::size_t k) {
        const Rect rect{pc[k / pl.size()].interval, pl[k % pl.size()].interval};
        const auto res = integrate_2d<double>(integrand, rect, inner);
        return PieceSum{res.value, res.error_estimate};
    });
    return {consts.k_B * total.value, std::abs(consts.k_B) * total.error};
}

LinkingValue gauss_linking(const LinkScene& scene, const FieldConstants& consts, const QuadratureSpec& spec) {
    scene.validate(spec.min_distance_guard);
    return gauss_integral(scene.curve_c, scene.curve_l, consts, spec);
}

int combinatorial_lk(const Curve& curve_c, const SurfaceMesh& mesh, double transversality_tol, Exec exec) {
    if (!curve_c.closed()) throw Error(ErrorKind::InvalidArgument, "combinatorial_lk needs a closed curve");
    const auto loops = curve_c.sample(0.25 * mesh.min_edge_length());

    std::vector<std::pair<Vector3, Vector3>> segments;
    for (const auto& loop : loops)
        for (std::size_t i = 0; i < loop.segment_count(); ++i) segments.push_back(loop.segment(i));

    std::vector<std::array<Vector3, 4>> cells;
    std::vector<BoundingBox> boxes;
    for (int i = 0; i < mesh.m(); ++i) {
        for (int j = 0; j < mesh.n(); ++j) {
            cells.push_back(mesh.cell(i, j));
            BoundingBox b;
            for (const auto& p : cells.back()) b.expand(p);
            boxes.push_back(b);
        }
    }
    const double pad = 1e-9 * mesh.source().diameter();

    return ordered_sum(segments.size(), exec, 0, [&](std::size_t k) {
        const auto& [a, b] = segments[k];
        BoundingBox sb;
        sb.expand(a);
        sb.expand(b);
        int sum = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto& cb = boxes[c];
            if (sb.lo.x > cb.hi.x + pad || sb.hi.x < cb.lo.x - pad || sb.lo.y > cb.hi.y + pad ||
                sb.hi.y < cb.lo.y - pad || sb.lo.z > cb.hi.z + pad || sb.hi.z < cb.lo.z - pad)
                continue;
            if (const auto hit = segment_cell_intersection(a, b, cells[c], transversality_tol)) sum += hit->sign;
        }
        return sum;
    });
}

}  // namespace ampere
