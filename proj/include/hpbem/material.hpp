#pragma once

#include <stdexcept>

namespace hpbem {

/// Isotropic material under plane strain. The Lame constants are derived
/// from (E, nu) with the plane-strain conversion.
struct Material {
    double youngs_modulus = 1.0;
    double poisson_ratio = 0.3;

    Material() = default;
    Material(double E, double nu) : youngs_modulus(E), poisson_ratio(nu) {
        if (!(E > 0.0))
            throw std::invalid_argument("Material: E must be positive");
        if (!(nu > 0.0 && nu < 0.5))
            throw std::invalid_argument("Material: nu must lie in (0, 1/2)");
    }

    double mu() const { return youngs_modulus / (2.0 * (1.0 + poisson_ratio)); }
    double lambda() const {
        return youngs_modulus * poisson_ratio /
               ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
    }
};

} // namespace hpbem
