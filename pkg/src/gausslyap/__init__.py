"""Lyapunov exponents of products of i.i.d. Gaussian random matrices.

Exact evaluation for any covariance spectrum and Dyson index beta in
{1, 2, 4} via adaptive quadrature of the integral formula, a catalog of
closed forms, large-dimension asymptotics (spike and free-probability
limits), and an independent Monte Carlo simulator for cross-validation.
"""

from .asymptotics import (
    SpikeAsymptotics,
    f_d_series,
    free_limit,
    free_limit_error,
    spike_asymptotics,
    spike_complex_asymptotic,
    spike_exact_complex,
    spike_real_asymptotic,
)
from .closed_forms import (
    EllipticReduction,
    complex_iso_exponents,
    forrester_kth_complex,
    mannion_2x2,
    newman_exponents,
    partial_fraction_sum,
    quaternion_iso_exponents,
    quaternion_largest,
    real_3x3_elliptic,
    real_paired_spectrum,
)
from .errors import (
    ConvergenceError,
    DegenerateSpectrumError,
    DomainError,
    EllipticPoleError,
    InvalidSpectrumError,
    RankCollapseError,
)
from .quadrature import (
    ExponentEstimate,
    QuadConfig,
    adaptive_quadrature,
    integrand,
    largest_exponent,
    sum_all_exponents,
)
from .simulate import (
    Quaternion,
    QuaternionMatrix,
    SimConfig,
    logdet_oracle,
    mc_largest,
    mc_top_k,
    qdet,
    qmat_phi,
    sample_matrix,
)
from .specfn import (
    EULER_GAMMA,
    EllipticParams,
    carlson_rc,
    carlson_rf,
    carlson_rj,
    digamma,
    expint_ei_neg,
    legendre_f,
    legendre_pi,
)
from .spectrum import (
    Beta,
    SpikeModel,
    Spectrum,
    make_spectrum,
    min_gap,
    spectrum_from_json,
    spectrum_to_json,
    spike_spectrum,
)

__version__ = "0.1.0"
