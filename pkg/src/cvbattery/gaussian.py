"""Single-mode Gaussian-state bookkeeping for the battery mode.

Converts ladder-operator moments into quadrature variances, the covariance
matrix determinant, purity, passive energy and ergotropy.  All functions are
pure and operate on plain numbers, so they can be mapped over trajectories.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InconsistencyError, InvalidInputError, UnphysicalStateError

# Covariance determinants in [1 - DET_GUARD, 1) are clamped to 1; anything
# lower is treated as unphysical rather than as round-off.
DET_GUARD = 1e-9

# Allowed imaginary residue when assembling the (real) coherence.
XI_IMAG_TOL = 1e-10


@dataclass(frozen=True)
class MomentState:
    """First and second ladder-operator moments of both modes at one instant.

    ``a_*`` refers to the charger mode, ``b_*`` to the battery mode.
    ``a_num``/``b_num`` are mean occupations, ``a_sq``/``b_sq`` the
    anomalous moments <aa> and <bb>.
    """

    a_mean: complex = 0.0
    a_num: float = 0.0
    a_sq: complex = 0.0
    b_mean: complex = 0.0
    b_num: float = 0.0
    b_sq: complex = 0.0
    time: float = 0.0


@dataclass(frozen=True)
class QuadratureStats:
    """Battery-mode quadrature variances, coherence and determinant."""

    var_x: float
    var_p: float
    coherence: float
    det: float


def _check_finite(*values):
    for v in values:
        if not np.all(np.isfinite([np.real(v), np.imag(v)])):
            raise InvalidInputError(f"non-finite moment value: {v!r}")


def quadrature_stats(m: MomentState) -> QuadratureStats:
    """Battery-mode quadrature statistics from ladder-operator moments.

    Returns (sigma_x^2, sigma_p^2, xi, D).  The coherence xi is assembled
    from the same complex combination that appears in the variances; its
    imaginary part must vanish identically and a residue above
    ``XI_IMAG_TOL`` raises :class:`InconsistencyError`.
    """
    _check_finite(m.b_mean, m.b_num, m.b_sq)
    beta = complex(m.b_mean)
    n = float(m.b_num)
    c = complex(m.b_sq) - beta * beta  # <bb> - <b>^2
    centered = n - abs(beta) ** 2

    two_xi = 1j * (np.conj(c) - c)
    if abs(two_xi.imag) > XI_IMAG_TOL:
        raise InconsistencyError(
            f"coherence picked up imaginary residue {two_xi.imag:.3e}"
        )
    var_x = 0.5 * (1.0 + 2.0 * centered + 2.0 * c.real)
    var_p = 0.5 * (1.0 + 2.0 * centered - 2.0 * c.real)
    xi = 0.5 * two_xi.real
    det = (1.0 + 2.0 * centered) ** 2 - 4.0 * abs(c) ** 2
    return QuadratureStats(var_x=var_x, var_p=var_p, coherence=xi, det=det)


def covariance_determinant(m: MomentState) -> float:
    """Covariance matrix determinant D of the battery mode.

    D = (1 + 2<b'b> - 2<b'><b>)^2 - 4|<bb> - <b>^2|^2.  For states with
    vanishing first moments this reduces to (1 + 2<b'b>)^2 - 4|<bb>|^2.
    """
    _check_finite(m.b_mean, m.b_num, m.b_sq)
    beta = complex(m.b_mean)
    c = complex(m.b_sq) - beta * beta
    return (1.0 + 2.0 * (float(m.b_num) - abs(beta) ** 2)) ** 2 - 4.0 * abs(c) ** 2


def _clamped_det(det: float) -> float:
    if not np.isfinite(det):
        raise InvalidInputError(f"non-finite determinant: {det!r}")
    if det < 1.0 - DET_GUARD:
        raise UnphysicalStateError(
            f"covariance determinant {det} below the Heisenberg bound"
        )
    return max(det, 1.0)


def passive_energy(omega_b: float, det: float) -> float:
    """Passive-state energy omega_b (sqrt(D) - 1)/2 of a Gaussian state."""
    det = _clamped_det(det)
    return omega_b * (np.sqrt(det) - 1.0) / 2.0


def ergotropy_gaussian(energy: float, passive: float) -> float:
    """Extractable work E - E_passive; may be tiny-negative from round-off."""
    _check_finite(energy, passive)
    return energy - passive


def purity(det: float) -> float:
    """Purity 1/sqrt(D) of a single-mode Gaussian state."""
    det = _clamped_det(det)
    return 1.0 / np.sqrt(det)
