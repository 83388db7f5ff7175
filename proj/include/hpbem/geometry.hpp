#pragma once

#include "hpbem/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hpbem {

enum class BoundaryPart { Dirichlet, Neumann, Contact };

std::string to_string(BoundaryPart p);

/// Closed polygonal boundary, counterclockwise, decomposed into tagged pieces.
struct PolygonalBoundary {
    struct Piece {
        Vec2 a, b;
        BoundaryPart part;
        double length() const { return (b - a).norm(); }
    };
    std::vector<Vec2> vertices;
    std::vector<Piece> pieces; // ordered CCW, closed loop

    double total_length() const;
    double part_length(BoundaryPart p) const;
    bool has_dirichlet() const;
    void validate() const; // closed loop, CCW, cl(Gamma_D) disjoint from cl(Gamma_C)
};

enum class SquarePreset { TrescaMixed, CoulombNeumann };

/// Unit-square boundary presets. TrescaMixed: contact bottom, Dirichlet
/// [1/4,1/2]x{1/2}, Neumann elsewhere (with an extra vertex at (-1/4,1/2)
/// delimiting the loaded top piece). CoulombNeumann: contact bottom, Neumann
/// elsewhere, no Dirichlet part.
PolygonalBoundary build_square_boundary(double side, SquarePreset preset);
SquarePreset parse_square_preset(const std::string& name);

/// Straight mesh segment on Gamma_N or Gamma_C.
struct Element {
    Vec2 a, b;
    BoundaryPart part = BoundaryPart::Neumann;
    int p = 1;       // primal polynomial degree (multiplier degree equals p on Gamma_C)
    int level = 0;   // refinement level
    long id = -1;
    long parent_id = -1;
    int piece = -1;  // index of the originating boundary piece

    double length() const { return (b - a).norm(); }
    Vec2 midpoint() const { return 0.5 * (a + b); }
    Vec2 tangent() const { return (b - a).normalized(); }
    /// outward normal for a CCW-oriented loop: tangent rotated by -90 degrees
    Vec2 normal() const {
        Vec2 t = tangent();
        return Vec2(t.y(), -t.x());
    }
    Vec2 point(double tau) const { return a + tau * (b - a); }
};

struct ElementFrame {
    Vec2 midpoint, tangent, normal;
    double h;
};
ElementFrame element_frame(const Element& e);

struct RefinementMark {
    long element_id;
    enum class Action { SplitH, RaiseP } action;
};

/// hp mesh of Gamma_Sigma = Gamma_N cup Gamma_C, stored in curve order.
/// Immutable after construction; refinement returns a new mesh.
struct Mesh {
    std::vector<Element> elements;
    std::shared_ptr<const PolygonalBoundary> boundary;
    long next_id = 0;
    int generation = 0;

    std::size_t size() const { return elements.size(); }
    bool closed_curve() const { return boundary && !boundary->has_dirichlet(); }

    std::vector<std::size_t> contact_elements() const;
    std::vector<std::size_t> part_elements(BoundaryPart p) const;
    double part_length(BoundaryPart p) const;
    int max_degree() const;

    const Element* find(long id) const;
    void check_conforming() const;

    bool operator==(const Mesh& o) const;
};

Mesh initial_mesh(std::shared_ptr<const PolygonalBoundary> boundary,
                  int n_per_unit, int p0);

Mesh apply_marks(const Mesh& mesh, const std::vector<RefinementMark>& marks);

/// JSON dump: array of {a, b, part, p, level}.
std::string mesh_to_json(const Mesh& mesh);

} // namespace hpbem
