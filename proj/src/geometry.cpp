#include "hpbem/geometry.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace hpbem {

std::string to_string(BoundaryPart p) {
    switch (p) {
        case BoundaryPart::Dirichlet: return "D";
        case BoundaryPart::Neumann: return "N";
        case BoundaryPart::Contact: return "C";
    }
    return "?";
}

double PolygonalBoundary::total_length() const {
    double s = 0.0;
    for (const auto& p : pieces) s += p.length();
    return s;
}

double PolygonalBoundary::part_length(BoundaryPart part) const {
    double s = 0.0;
    for (const auto& p : pieces)
        if (p.part == part) s += p.length();
    return s;
}

bool PolygonalBoundary::has_dirichlet() const {
    for (const auto& p : pieces)
        if (p.part == BoundaryPart::Dirichlet) return true;
    return false;
}

void PolygonalBoundary::validate() const {
    if (pieces.empty()) throw std::invalid_argument("boundary: no pieces");
    const double tol = 1e-13;
    double area2 = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& cur = pieces[i];
        const auto& nxt = pieces[(i + 1) % pieces.size()];
        if ((cur.b - nxt.a).norm() > tol)
            throw std::invalid_argument("boundary: pieces do not form a closed loop");
        area2 += cur.a.x() * cur.b.y() - cur.b.x() * cur.a.y();
    }
    if (area2 <= 0.0)
        throw std::invalid_argument("boundary: orientation must be counterclockwise");
    // closure(Gamma_D) and closure(Gamma_C) must not touch
    for (const auto& pd : pieces) {
        if (pd.part != BoundaryPart::Dirichlet) continue;
        for (const auto& pc : pieces) {
            if (pc.part != BoundaryPart::Contact) continue;
            for (const Vec2& x : {pd.a, pd.b})
                for (const Vec2& y : {pc.a, pc.b})
                    if ((x - y).norm() < tol)
                        throw std::invalid_argument(
                            "boundary: Dirichlet and contact closures intersect");
        }
    }
}

PolygonalBoundary build_square_boundary(double side, SquarePreset preset) {
    if (!(side > 0.0)) throw std::invalid_argument("build_square_boundary: side > 0");
    const double s = side / 2.0;
    PolygonalBoundary bd;
    auto piece = [&](Vec2 a, Vec2 b, BoundaryPart part) {
        bd.pieces.push_back({a, b, part});
    };
    const Vec2 bl(-s, -s), br(s, -s), tr(s, s), tl(-s, s);
    switch (preset) {
        case SquarePreset::TrescaMixed: {
            const Vec2 d0(side / 4.0, s);   // Dirichlet piece start (right end on top)
            const Vec2 m0(-side / 4.0, s);  // end of the loaded top piece
            bd.vertices = {bl, br, tr, d0, m0, tl};
            piece(bl, br, BoundaryPart::Contact);
            piece(br, tr, BoundaryPart::Neumann);
            piece(tr, d0, BoundaryPart::Dirichlet);
            piece(d0, m0, BoundaryPart::Neumann);
            piece(m0, tl, BoundaryPart::Neumann);
            piece(tl, bl, BoundaryPart::Neumann);
            break;
        }
        case SquarePreset::CoulombNeumann: {
            bd.vertices = {bl, br, tr, tl};
            piece(bl, br, BoundaryPart::Contact);
            piece(br, tr, BoundaryPart::Neumann);
            piece(tr, tl, BoundaryPart::Neumann);
            piece(tl, bl, BoundaryPart::Neumann);
            break;
        }
    }
    bd.validate();
    return bd;
}

SquarePreset parse_square_preset(const std::string& name) {
    if (name == "tresca_mixed") return SquarePreset::TrescaMixed;
    if (name == "coulomb_neumann") return SquarePreset::CoulombNeumann;
    throw std::invalid_argument("unknown boundary preset: " + name);
}

ElementFrame element_frame(const Element& e) {
    return {e.midpoint(), e.tangent(), e.normal(), e.length()};
}

std::vector<std::size_t> Mesh::contact_elements() const {
    return part_elements(BoundaryPart::Contact);
}

std::vector<std::size_t> Mesh::part_elements(BoundaryPart p) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i].part == p) out.push_back(i);
    return out;
}

double Mesh::part_length(BoundaryPart p) const {
    double s = 0.0;
    for (const auto& e : elements)
        if (e.part == p) s += e.length();
    return s;
}

int Mesh::max_degree() const {
    int p = 1;
    for (const auto& e : elements) p = std::max(p, e.p);
    return p;
}

const Element* Mesh::find(long id) const {
    for (const auto& e : elements)
        if (e.id == id) return &e;
    return nullptr;
}

void Mesh::check_conforming() const {
    const double tol = 1e-13;
    for (std::size_t i = 0; i + 1 < elements.size(); ++i)
        if ((elements[i].b - elements[i + 1].a).norm() > tol)
            throw std::logic_error("mesh: elements not chained conformingly");
    if (closed_curve() && !elements.empty()) {
        if ((elements.back().b - elements.front().a).norm() > tol)
            throw std::logic_error("mesh: closed curve not closed");
    }
    for (const auto& e : elements)
        if (!(e.length() > 0.0) || e.p < 1)
            throw std::logic_error("mesh: degenerate element");
}

bool Mesh::operator==(const Mesh& o) const {
    if (elements.size() != o.elements.size()) return false;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const auto& x = elements[i];
        const auto& y = o.elements[i];
        if (x.id != y.id || x.p != y.p || x.level != y.level || x.part != y.part)
            return false;
        if ((x.a - y.a).norm() > 0.0 || (x.b - y.b).norm() > 0.0) return false;
    }
    return true;
}

Mesh initial_mesh(std::shared_ptr<const PolygonalBoundary> boundary,
                  int n_per_unit, int p0) {
    if (n_per_unit < 1) throw std::invalid_argument("initial_mesh: n_per_unit >= 1");
    if (p0 < 1) throw std::invalid_argument("initial_mesh: p0 >= 1");
    boundary->validate();
    Mesh mesh;
    mesh.boundary = boundary;
    for (std::size_t pi = 0; pi < boundary->pieces.size(); ++pi) {
        const auto& piece = boundary->pieces[pi];
        if (piece.part == BoundaryPart::Dirichlet) continue; // mesh covers Gamma_Sigma only
        const int n = std::max(1, (int)std::llround(piece.length() * n_per_unit));
        for (int k = 0; k < n; ++k) {
            Element e;
            e.a = piece.a + (double(k) / n) * (piece.b - piece.a);
            e.b = piece.a + (double(k + 1) / n) * (piece.b - piece.a);
            e.part = piece.part;
            e.p = p0;
            e.level = 0;
            e.id = mesh.next_id++;
            e.piece = static_cast<int>(pi);
            mesh.elements.push_back(e);
        }
    }
    // rotate so the element list starts right after the Dirichlet part, keeping
    // the open curve contiguous in storage order
    if (boundary->has_dirichlet()) {
        // find the break: consecutive stored elements whose endpoints do not chain
        std::size_t brk = 0;
        for (std::size_t i = 0; i < mesh.elements.size(); ++i) {
            const auto& cur = mesh.elements[i];
            const auto& nxt = mesh.elements[(i + 1) % mesh.elements.size()];
            if ((cur.b - nxt.a).norm() > 1e-13) {
                brk = (i + 1) % mesh.elements.size();
                break;
            }
        }
        std::rotate(mesh.elements.begin(), mesh.elements.begin() + brk, mesh.elements.end());
    }
    mesh.check_conforming();
    return mesh;
}

Mesh apply_marks(const Mesh& mesh, const std::vector<RefinementMark>& marks) {
    std::set<long> split_ids, raise_ids;
    for (const auto& m : marks) {
        if (!mesh.find(m.element_id))
            throw std::invalid_argument("apply_marks: unknown element id");
        if (m.action == RefinementMark::Action::SplitH)
            split_ids.insert(m.element_id);
        else
            raise_ids.insert(m.element_id);
    }
    Mesh out;
    out.boundary = mesh.boundary;
    out.next_id = mesh.next_id;
    out.generation = mesh.generation + 1;
    for (const auto& e : mesh.elements) {
        if (split_ids.count(e.id)) {
            Element c1 = e, c2 = e;
            const Vec2 mid = e.midpoint();
            c1.b = mid;
            c2.a = mid;
            c1.level = c2.level = e.level + 1;
            c1.parent_id = c2.parent_id = e.id;
            c1.id = out.next_id++;
            c2.id = out.next_id++;
            out.elements.push_back(c1);
            out.elements.push_back(c2);
        } else if (raise_ids.count(e.id)) {
            Element r = e;
            r.p = e.p + 1;
            out.elements.push_back(r);
        } else {
            out.elements.push_back(e);
        }
    }
    out.check_conforming();
    return out;
}

std::string mesh_to_json(const Mesh& mesh) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : mesh.elements) {
        arr.push_back({{"a", {e.a.x(), e.a.y()}},
                       {"b", {e.b.x(), e.b.y()}},
                       {"part", to_string(e.part)},
                       {"p", e.p},
                       {"level", e.level}});
    }
    return arr.dump();
}

} // namespace hpbem
