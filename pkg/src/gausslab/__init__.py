"""gausslab: a desk-scale laboratory for coordinate-restricted Gaussian-prime
sums and the machinery around them (quadratic-congruence roots, Euler-product
constants, congruence sums with exact Poisson expansions, a multiplicative
model sequence, and a large-sieve stress bench)."""

__version__ = "0.1.0"

from .arith import (
    FactorTable,
    FactoredInt,
    beta_apt,
    chi4,
    euler_phi,
    is_prime,
    mangoldt,
    mangoldt_r,
    moebius,
    sieve_spf,
)
from .constants import (
    EulerProductResult,
    H_constant,
    V_d_sum,
    V_sum,
    a2_identity_check,
    c_constant,
    g_density,
    kappa,
)
from .errors import GuardError, InternalCheckError
from .gaussint import (
    GaussInt,
    OmegaClass,
    delta,
    dform_diag,
    dform_sum,
    gauss_gcd,
    quad_form_n,
    solve_omega,
)
from .roots import RootSet, rho, roots_mod, weyl_sum
from .weights import CropFunction, GammaWeights, LambdaWeights, crop_build, crop_w_build
