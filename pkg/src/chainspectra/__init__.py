"""Exact chain-complex calculus with stabilization and tangent structure."""

from .complexes import (ChainComplex, ChainMap, HomologyGroup, cone,
                        direct_sum, homology, homology_table, is_quasi_iso,
                        moore, shift, sphere, tensor, zero_complex)
from .rings import CONNECTIVE, UNBOUNDED, Backend, Fp, Q, Z
from .serialize import dumps, loads
from .spectra import (Bispectrum, BispectrumMap, is_stable_equivalence,
                      omega_replace, prespectrum_replace, shift_diagram,
                      sigma_infty, spectrum_report, stable_pi,
                      suspension_replace)
from .tangent import (ParamBispectrum, ParamBispectrumMap, RetractiveObject,
                      base_change_pull, base_change_push, cotangent_complex,
                      latching_object, make_retractive, param_omega_replace,
                      param_prespectrum_replace, quillen_cohomology,
                      reduced_diagram, trivial_family)

__version__ = "0.1.0"
