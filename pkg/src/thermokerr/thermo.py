"""Ergotropy, passive states, and entropy of single-mode states.

Work capacity is measured in quanta (hbar*omega = 1): W = E(rho) - E(passive),
where the passive counterpart carries the eigenvalues of rho sorted in
non-increasing order against the ascending number-state ladder.  For states
diagonal in the number basis this reduces to sorting the photon pmf.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

PASSIVITY_TOL = 1e-9

_PSD_TOL = -1e-10
_TRACE_TOL = 1e-8


@dataclass(frozen=True)
class ErgotropyReport:
    ergotropy: float
    passive_energy: float
    mean_energy: float
    entropy: float
    photon_pmf: np.ndarray
    passive_pmf: np.ndarray

    def to_json(self) -> str:
        return json.dumps({
            "ergotropy": self.ergotropy,
            "passive_energy": self.passive_energy,
            "mean_energy": self.mean_energy,
            "entropy": self.entropy,
            "photon_pmf": self.photon_pmf.tolist(),
            "passive_pmf": self.passive_pmf.tolist(),
        })


def _validated_spectrum(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    if np.linalg.norm(rho - rho.conj().T, ord="fro") > 1e-8 * max(1.0, np.linalg.norm(rho)):
        raise ValueError("matrix is not Hermitian")
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < _PSD_TOL:
        raise ValueError(f"matrix is not PSD: min eigenvalue {lam.min():.3e}")
    tr = lam.sum()
    if abs(tr - 1.0) > _TRACE_TOL:
        raise ValueError(f"trace {tr} deviates from 1")
    return np.clip(lam, 0.0, None)


def passive_counterpart(rho: np.ndarray) -> np.ndarray:
    """Eigenvalues of rho sorted non-increasing: the pmf of the unique passive
    state on the nondegenerate number ladder."""
    return np.sort(_validated_spectrum(rho))[::-1]


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-sum lam ln lam in nats, with 0 ln 0 = 0."""
    lam = _validated_spectrum(rho)
    lam = lam[lam > 0]
    return float(-(lam @ np.log(lam)))


def ergotropy(rho: np.ndarray) -> ErgotropyReport:
    """Work capacity of a single-mode state against the number ladder."""
    rho = np.asarray(rho, dtype=complex)
    passive = passive_counterpart(rho)
    n = np.arange(rho.shape[0])
    pmf = np.clip(np.diag(rho).real, 0.0, None)
    mean_energy = float(n @ pmf)
    passive_energy = float(n @ passive)
    work = mean_energy - passive_energy
    if work < -1e-10:
        raise ArithmeticError(f"negative ergotropy {work:.3e} (numerical failure)")
    lam = passive[passive > 0]
    entropy = float(-(lam @ np.log(lam)))
    return ErgotropyReport(
        ergotropy=max(work, 0.0),
        passive_energy=passive_energy,
        mean_energy=mean_energy,
        entropy=entropy,
        photon_pmf=pmf,
        passive_pmf=passive,
    )


def ergotropy_of_pmf(pmf: np.ndarray) -> float:
    """Sorting shortcut for number-diagonal states (same result as ergotropy)."""
    pmf = np.asarray(pmf, dtype=float)
    n = np.arange(pmf.size)
    return float(n @ pmf - n @ np.sort(pmf)[::-1])


def is_passive(rho: np.ndarray, tol: float = PASSIVITY_TOL) -> bool:
    return ergotropy(rho).ergotropy < tol


def thermal_entropy(nbar: float) -> float:
    """(nbar+1) ln(nbar+1) - nbar ln(nbar), the closed form for thermal light."""
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    if nbar == 0:
        return 0.0
    return float((nbar + 1) * np.log(nbar + 1) - nbar * np.log(nbar))
