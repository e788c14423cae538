"""Python front end for the yledge exact-diagonalization library."""

import os


def _avx2():
    try:
        with open("/proc/cpuinfo") as f:
            return " avx2" in f.read()
    except OSError:
        return False


# Some OpenBLAS builds pick a kernel whose nonsymmetric eigensolver is broken
# on newer CPUs; the Haswell kernels are correct on any AVX2 host. This has to
# happen before the shared library loads.
if "OPENBLAS_CORETYPE" not in os.environ and _avx2():
    os.environ["OPENBLAS_CORETYPE"] = "Haswell"

from ._core import (  # noqa: E402
    ExceptionalPointError,
    InvalidInput,
    NumericalError,
    UnsupportedRegime,
    basis,
    classify_phase,
    echo,
    eigensolver,
    fidelity_susceptibility,
    fit_scaling,
    ground_entropy,
    hamiltonian,
    spectrum,
)

__all__ = [
    "ExceptionalPointError",
    "InvalidInput",
    "NumericalError",
    "UnsupportedRegime",
    "basis",
    "classify_phase",
    "echo",
    "eigensolver",
    "fidelity_susceptibility",
    "fit_scaling",
    "ground_entropy",
    "hamiltonian",
    "spectrum",
]
__version__ = "1.0.0"
