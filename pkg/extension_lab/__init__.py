from extension_lab.bvp import (
    AbstractBVP,
    augment,
    augmented_bvp,
    boundary_space,
    calderon_from_augmented,
    restrict_check,
    restrict_plus,
)
from extension_lab.invertibility import (
    InvertibleExtension,
    ShadowModification,
    complement_in_minus,
    make_invertible,
    modify_shadow,
    perturb_imag,
    perturb_real,
    shadow_space,
)
from extension_lab.suites import run_lab
