"""
Integrable Lab

Numerical laboratory for quantum integrable models: Bethe equations and
their integral-equation limits, form factors, Fredholm and Toeplitz
determinants, thermal NLIEs, Toda quantization and sinh-gas partition
functions, each checked against a brute-force reference.
"""

__version__ = '1.0.0'

from .errors import (
    IntlabError,
    ConfigError,
    DomainError,
    ConvergenceError,
    SingularityError,
    ToleranceError,
)
from .config import (
    setup_logging,
    load_config,
    validate_config,
    config_digest,
    default_workers,
    as_complex,
    EXPERIMENT_PARAMS,
    TOLERANCE_DEFAULTS,
)
from .special import (
    Quadrature,
    ContourDescriptor,
    gauss_legendre,
    composite_gauss,
    contour_quadrature,
    ln_gamma,
    gamma,
    ln_barnes_g,
    barnes_g,
    cauchy_transform,
    derivative,
)
from .linint import (
    DressedData,
    solve_fredholm2,
    dressed_functions,
    fermi_boundary,
    field_for_density,
    shift_function,
    fermi_boundary_values,
)
from .bethe import (
    BetheState,
    ExcitationSpec,
    solve_bethe,
    counting_function,
    background_root,
    excitation_from_integers,
    excitation_ep,
    finite_size_shift,
    yang_yang_action,
)
from .formfactor import (
    FormFactorResult,
    gaudin_norm,
    ff_conjugated_field,
    smooth_discrete_parts,
    discrete_asymptotics,
    smooth_limit_Gn,
    critical_class_amplitude_R,
    ell_class_exponent,
    ell_class_scaling_check,
    product_lemma_check,
    singular_product_check,
    form_factor_analysis,
)
from .sumid import SumParams, s_ell_bruteforce, s_ell_closed
from .fredholm import (
    KernelSpec,
    LacunarySpec,
    nystrom_det,
    sine_kernel_det,
    gsk_kernel,
    gsk_leading,
    cshift_factorization,
    lacunary_toeplitz,
    bessel_symbol,
    bessel_coefficients,
    bessel_lacunary_limit,
    szego_trend,
)
from .thermo_nls import (
    ThermalSolution,
    yang_yang_solve,
    free_energy_nls,
    density_from_free_energy,
)
from .qtm_xxz import (
    QtmSolution,
    qtm_dominant,
    qtm_excited,
    free_energy_xxz,
    magnetization,
    correlation_length,
    amplitude_sigma_z,
    boundary_magnetization,
)
from .toda import (
    TodaSector,
    TbaSolution,
    tba_solve,
    q_functions,
    wronskian_residual,
    transfer_polynomial,
    quantize,
)
from .sinhpf import (
    SinhModel,
    gaussian_partition_exact,
    gaussian_partition_asymptotic,
    gaussian_partition_direct,
    equilibrium_density,
    leading_free_energy,
    metropolis_sample,
)
from .oracles import EdResult, ed_xxz, toda2_relative_spectrum, nls_overlap_quadrature
from .experiments import EXPERIMENTS, ExperimentResult, run_experiment
from .runner import run, sweep

__all__ = [
    'IntlabError',
    'ConfigError',
    'DomainError',
    'ConvergenceError',
    'SingularityError',
    'ToleranceError',
    'setup_logging',
    'load_config',
    'validate_config',
    'config_digest',
    'default_workers',
    'as_complex',
    'EXPERIMENT_PARAMS',
    'TOLERANCE_DEFAULTS',
    'Quadrature',
    'ContourDescriptor',
    'gauss_legendre',
    'composite_gauss',
    'contour_quadrature',
    'ln_gamma',
    'gamma',
    'ln_barnes_g',
    'barnes_g',
    'cauchy_transform',
    'derivative',
    'DressedData',
    'solve_fredholm2',
    'dressed_functions',
    'fermi_boundary',
    'field_for_density',
    'shift_function',
    'fermi_boundary_values',
    'BetheState',
    'ExcitationSpec',
    'solve_bethe',
    'counting_function',
    'background_root',
    'excitation_from_integers',
    'excitation_ep',
    'finite_size_shift',
    'yang_yang_action',
    'FormFactorResult',
    'gaudin_norm',
    'ff_conjugated_field',
    'smooth_discrete_parts',
    'discrete_asymptotics',
    'smooth_limit_Gn',
    'critical_class_amplitude_R',
    'ell_class_exponent',
    'ell_class_scaling_check',
    'product_lemma_check',
    'singular_product_check',
    'form_factor_analysis',
    'SumParams',
    's_ell_bruteforce',
    's_ell_closed',
    'KernelSpec',
    'LacunarySpec',
    'nystrom_det',
    'sine_kernel_det',
    'gsk_kernel',
    'gsk_leading',
    'cshift_factorization',
    'lacunary_toeplitz',
    'bessel_symbol',
    'bessel_coefficients',
    'bessel_lacunary_limit',
    'szego_trend',
    'ThermalSolution',
    'yang_yang_solve',
    'free_energy_nls',
    'density_from_free_energy',
    'QtmSolution',
    'qtm_dominant',
    'qtm_excited',
    'free_energy_xxz',
    'magnetization',
    'correlation_length',
    'amplitude_sigma_z',
    'boundary_magnetization',
    'TodaSector',
    'TbaSolution',
    'tba_solve',
    'q_functions',
    'wronskian_residual',
    'transfer_polynomial',
    'quantize',
    'SinhModel',
    'gaussian_partition_exact',
    'gaussian_partition_asymptotic',
    'gaussian_partition_direct',
    'equilibrium_density',
    'leading_free_energy',
    'metropolis_sample',
    'EdResult',
    'ed_xxz',
    'toda2_relative_spectrum',
    'nls_overlap_quadrature',
    'EXPERIMENTS',
    'ExperimentResult',
    'run_experiment',
    'run',
    'sweep',
]
