from symbol_calculus.calderon import (
    calderon_symbol,
    complementary_symbol,
    dn_symbol,
    orthogonalize,
    sign_projector,
    single_root_eigenvalue,
    symbol_gap,
)
from symbol_calculus.companion import companion_matrix, homogeneity_scaling
from symbol_calculus.ellipticity import EllipticityReport, ellipticity_check
from symbol_calculus.random_symbols import random_elliptic_symbol, random_symbol, random_tangential
from symbol_calculus.root_finder import polynomial_roots, projector_from_roots
from symbol_calculus.symbols import Covector, PolyMatrixSymbol, laplacian_symbol
