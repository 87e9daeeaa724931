"""
Catalogue of model operators, one per supported geometry.
"""
from normal_family.model import FibreSpec, ModelOperator


def strip_laplacian(length: float = 1.0) -> ModelOperator:
    """−Δ for g = dx²/x⁴ + dz²: (x²D_x)² + D_z² on an interval fibre."""
    coefficients = {
        (2, (), (0,)): {(0, 0): 1.0},
        (0, (), (2,)): {(0, 0): 1.0},
    }
    return ModelOperator(2, 1, 0, FibreSpec("interval", length), coefficients, "StripHyperbolic")


def cusp_domain(length: float = 2.0, weight_c: int = 2) -> ModelOperator:
    """
    Laplacian of a cusp {0 < z < L x^c} after the x^{−2c} weight is split off:
    (x²D_x)² + D_z² plus a first-order term vanishing at x = 0.
    """
    coefficients = {
        (2, (), (0,)): {(0, 0): 1.0},
        (0, (), (2,)): {(0, 0): 1.0},
        (1, (), (0,)): {(1, 0): 1j * weight_c},
    }
    return ModelOperator(2, 1, 0, FibreSpec("interval", length), coefficients, "CuspDomain", weight_c)


def half_line_toy(q: float = 1.0) -> ModelOperator:
    """(x²D_x)² + q on the half-line, point fibre."""
    coefficients = {(2, (), ()): {(0, 0): 1.0}}
    if q:
        coefficients[(0, (), ())] = {(0, 0): q}
    return ModelOperator(2, 1, 0, FibreSpec("point", 0.0), coefficients, "HalfLineToy")


def exterior_toy(shift: float = 1.0) -> ModelOperator:
    """
    Exterior region with circle base and point fibre:
    (x²D_x)² + (xD_y)² + shift, i.e. −Δ + shift in the scattering picture.
    """
    coefficients = {
        (2, (0,), ()): {(0, 0): 1.0},
        (0, (2,), ()): {(0, 0): 1.0},
    }
    if shift:
        coefficients[(0, (0,), ())] = {(0, 0): shift}
    return ModelOperator(2, 1, 1, FibreSpec("point", 0.0), coefficients, "ExteriorToy")


CATALOGUE = {
    "StripHyperbolic": strip_laplacian,
    "CuspDomain": cusp_domain,
    "HalfLineToy": half_line_toy,
    "ExteriorToy": exterior_toy,
}
