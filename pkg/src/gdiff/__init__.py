"""Exact Wasserstein error analysis of diffusion samplers for Gaussian data."""
from .adsn import (AdsnSpectrum, FrequencyBasis, Texton, adsn_sample, adsn_spectrum, empirical_eigenvalues,
                   empirical_w2_adsn, frequency_basis, texton_from_image)
from .errors import DegenerateScore, DomainError, GdiffError, IngestError, NumericError
from .exact import (EXACT_PT, STANDARD_NORMAL, InitLaw, generative_marginals, ode_marginal_eigen,
                    sde_marginal_eigen)
from .montecarlo import ValidationReport, validate_continuous, validate_scheme
from .schedule import NoiseSchedule
from .schemes import SamplerConfig, SchemeKind, eigen_recursion, recursion_values, sample_paths, simulate
from .spectrum import (CovarianceSpectrum, empirical_spectrum, forward_eigen, forward_spectrum,
                       load_spectrum_csv, synthetic_spectrum)
from .wasserstein import ablation_table, eigen_contribution, error_curve, final_error, w2_diag

__version__ = "0.1.0"
