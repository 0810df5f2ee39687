"""Truncated Fock-space states of 1-4 bosonic modes and the circuit elements
(beam splitters, phase shifts, cross-Kerr couplers, k-photon exchangers) from
which the interferometers in this package are assembled.

States are stored as mixtures of pure branches, rho = sum_j w_j |psi_j><psi_j|,
which is exact for thermal-diagonal inputs evolved unitarily and keeps memory
at O(branches * dim) instead of O(dim^2).  Every element here conserves total
photon number, so two-mode unitaries are built and applied block-by-block on
total-photon sectors; the blocks come from Hermitian eigendecomposition of the
truncated generator, which keeps them exactly unitary.

Conventions (fixed once, used everywhere):
    beam splitter    U = exp(+i theta (a^dag b + a b^dag)),  s = cos(theta)
                     (50:50 means theta = pi/4; reflected amplitude carries +i)
    phase shift      U = exp(+i phi n_a)
    cross-Kerr       U = exp(-i chi_t (n_a n_b)^s); pass chi_t < 0 for the
                     opposite-sign coupler
    k-photon swap    U = exp(-i g_t (a^dag^k b^k + a^k b^dag^k))
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

DEFAULT_TAIL_EPS = 1e-10

#: branch norms / weight sums are validated to these tolerances
_WEIGHT_TOL = 1e-12
_NORM_TOL = 1e-10
_UNITARITY_TOL = 1e-8


class CutoffError(ValueError):
    """Raised when a requested state does not fit inside its Fock cutoff."""


def choose_cutoff(nbar: float, epsilon: float, kind: str = "thermal") -> int:
    """Smallest per-mode dimension d whose photon-number tail mass is < epsilon.

    kind="thermal": geometric tail  sum_{n>=d} nbar^n/(1+nbar)^(n+1) < epsilon.
    kind="coherent": Poisson tail for |alpha|^2 = nbar.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    if nbar == 0:
        return 1
    if kind == "thermal":
        # tail(d) = (nbar/(1+nbar))^d, closed form
        d = int(np.ceil(np.log(epsilon) / np.log(nbar / (1.0 + nbar))))
        return max(d, 1)
    if kind == "coherent":
        # walk the Poisson pmf until the remaining mass drops below epsilon
        term = math.exp(-nbar)
        cum = term
        d = 1
        while 1.0 - cum >= epsilon:
            term *= nbar / d
            cum += term
            d += 1
            if d > 100_000:
                raise ValueError("coherent cutoff search did not converge")
        return d
    raise ValueError(f"unknown cutoff kind {kind!r}")


# ---------------------------------------------------------------------------
# circuit elements

@dataclass(frozen=True)
class BeamSplitter:
    """exp(i theta (a^dag b + a b^dag)) with s = cos(theta), c = sin(theta)."""
    s: float
    c: float
    modes: tuple[int, int] = (0, 1)

    def __post_init__(self):
        if abs(self.s**2 + self.c**2 - 1.0) > 1e-12:
            raise ValueError(f"s^2 + c^2 = {self.s**2 + self.c**2} != 1")

    @property
    def theta(self) -> float:
        return math.atan2(self.c, self.s)


def bs5050(modes=(0, 1)) -> BeamSplitter:
    r = math.sqrt(0.5)
    return BeamSplitter(s=r, c=r, modes=modes)


@dataclass(frozen=True)
class PhaseShift:
    """exp(i phi n) on one mode."""
    phi: float
    mode: int = 0


@dataclass(frozen=True)
class CrossKerr:
    """exp(-i chi_t (n_a^s n_b^s)); order s=1 is the plain cross-Kerr coupler."""
    chi_t: float
    order: int = 1
    modes: tuple[int, int] = (0, 1)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")


@dataclass(frozen=True)
class KPhotonExchange:
    """exp(-i g_t (a^dag^k b^k + a^k b^dag^k))."""
    g_t: float
    k: int = 1
    modes: tuple[int, int] = (0, 1)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class SelfKerr:
    """exp(+i chi n^2 / 2) on one mode (single-arm dispersive phase)."""
    chi: float
    mode: int = 0


CircuitElement = BeamSplitter | PhaseShift | CrossKerr | KPhotonExchange | SelfKerr


@dataclass(frozen=True)
class Circuit:
    elements: tuple[CircuitElement, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    def inverse(self) -> "Circuit":
        return Circuit(tuple(_invert_element(e) for e in reversed(self.elements)))


def _invert_element(e: CircuitElement) -> CircuitElement:
    if isinstance(e, BeamSplitter):
        return BeamSplitter(s=e.s, c=-e.c, modes=e.modes)
    if isinstance(e, PhaseShift):
        return PhaseShift(phi=-e.phi, mode=e.mode)
    if isinstance(e, CrossKerr):
        return CrossKerr(chi_t=-e.chi_t, order=e.order, modes=e.modes)
    if isinstance(e, KPhotonExchange):
        return KPhotonExchange(g_t=-e.g_t, k=e.k, modes=e.modes)
    if isinstance(e, SelfKerr):
        return SelfKerr(chi=-e.chi, mode=e.mode)
    raise TypeError(f"unknown element {e!r}")


# ---------------------------------------------------------------------------
# states

class MultiModeState:
    """Mixture of pure branches over a truncated multimode Fock grid.

    amplitudes are flat C-ordered vectors of length prod(mode_dims); mode 0 is
    the slowest axis.  Instances are treated as immutable: all operations
    return new states and the stored arrays are write-protected.
    """

    def __init__(self, mode_dims, branches, validate: bool = True):
        self.mode_dims = tuple(int(d) for d in mode_dims)
        if any(d < 1 for d in self.mode_dims):
            raise ValueError(f"mode dims must be >= 1, got {self.mode_dims}")
        dim = int(np.prod(self.mode_dims))
        fixed = []
        for w, amps in branches:
            a = np.asarray(amps, dtype=complex).reshape(-1)
            if a.size != dim:
                raise ValueError(f"branch length {a.size} != {dim}")
            a = a.copy()
            a.setflags(write=False)
            fixed.append((float(w), a))
        self.branches = tuple(fixed)
        if validate:
            self._validate()

    def _validate(self):
        ws = np.array([w for w, _ in self.branches])
        if ws.size == 0:
            raise ValueError("state needs at least one branch")
        if np.any(ws < -_WEIGHT_TOL):
            raise ValueError("negative branch weight")
        if abs(ws.sum() - 1.0) > max(_WEIGHT_TOL, 1e-12 * ws.size):
            raise ValueError(f"branch weights sum to {ws.sum()}, not 1")
        for _, a in self.branches:
            nrm = np.linalg.norm(a)
            if abs(nrm - 1.0) > _NORM_TOL:
                raise ValueError(f"branch norm {nrm} deviates from 1")

    @property
    def n_modes(self) -> int:
        return len(self.mode_dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.mode_dims))

    def density_matrix(self) -> np.ndarray:
        """Assemble rho = sum_j w_j |psi_j><psi_j| (use sparingly: O(dim^2))."""
        rho = np.zeros((self.dim, self.dim), dtype=complex)
        for w, a in self.branches:
            rho += w * np.outer(a, a.conj())
        return rho

    def to_json(self) -> str:
        payload = {
            "mode_dims": list(self.mode_dims),
            "branches": [
                {"weight": w,
                 "amplitudes": np.column_stack([a.real, a.imag]).reshape(-1).tolist()}
                for w, a in self.branches
            ],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "MultiModeState":
        payload = json.loads(text)
        branches = []
        for b in payload["branches"]:
            flat = np.asarray(b["amplitudes"], dtype=float).reshape(-1, 2)
            branches.append((b["weight"], flat[:, 0] + 1j * flat[:, 1]))
        return cls(payload["mode_dims"], branches)


def make_number(n: int, cutoff: int) -> MultiModeState:
    """Fock state |n> in a single mode."""
    if not 0 <= n < cutoff:
        raise CutoffError(f"n={n} does not fit in cutoff d={cutoff}")
    a = np.zeros(cutoff, dtype=complex)
    a[n] = 1.0
    return MultiModeState((cutoff,), [(1.0, a)])


def make_thermal(nbar: float, cutoff: int) -> MultiModeState:
    """Thermal state of mean photon number nbar as a mixture of Fock branches.

    The truncated geometric pmf is renormalized over 0..cutoff-1.
    """
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    if nbar == 0:
        return make_number(0, cutoff)
    n = np.arange(cutoff)
    p = (nbar / (1.0 + nbar)) ** n / (1.0 + nbar)
    p = p / p.sum()
    branches = []
    for k in range(cutoff):
        a = np.zeros(cutoff, dtype=complex)
        a[k] = 1.0
        branches.append((p[k], a))
    return MultiModeState((cutoff,), branches)


def make_coherent(alpha: complex, cutoff: int,
                  tail_eps: float = DEFAULT_TAIL_EPS) -> MultiModeState:
    """Coherent state |alpha> as a single renormalized pure branch.

    Raises CutoffError when the Poisson tail beyond the cutoff exceeds tail_eps.
    """
    alpha = complex(alpha)
    nbar = abs(alpha) ** 2
    if nbar > 0 and choose_cutoff(nbar, tail_eps, kind="coherent") > cutoff:
        raise CutoffError(
            f"cutoff d={cutoff} too small for |alpha|^2={nbar:.4g} at tail {tail_eps:g}")
    n = np.arange(cutoff)
    log_fact = np.array([math.lgamma(k + 1) for k in range(cutoff)])
    if nbar == 0:
        return make_number(0, cutoff)
    log_mag = -nbar / 2.0 + n * math.log(abs(alpha)) - log_fact / 2.0
    a = np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))
    a = a / np.linalg.norm(a)
    return MultiModeState((cutoff,), [(1.0, a)])


def tensor(states: list[MultiModeState]) -> MultiModeState:
    """Tensor product; mode order follows the argument order, weights multiply."""
    if not states:
        raise ValueError("need at least one state")
    dims = tuple(d for s in states for d in s.mode_dims)
    dim = int(np.prod(dims))
    if dim > 50_000_000:
        raise MemoryError(f"tensor dimension {dim} exceeds memory budget")
    out = [(1.0, np.ones(1, dtype=complex))]
    for s in states:
        out = [(w1 * w2, np.kron(a1, a2)) for w1, a1 in out for w2, a2 in s.branches]
    return MultiModeState(dims, out)


# ---------------------------------------------------------------------------
# sector blocks for the photon-conserving two-mode generators

@lru_cache(maxsize=128)
def _sector_indices(di: int, dj: int):
    """For each total photon number m, flat indices (row-major na*dj+nb) of the
    basis states with na+nb = m, ordered by increasing na."""
    out = []
    for m in range(di + dj - 1):
        na = np.arange(max(0, m - dj + 1), min(di - 1, m) + 1)
        out.append(na * dj + (m - na))
    return tuple(out)


@lru_cache(maxsize=64)
def _bs_eigensystems(di: int, dj: int):
    """Per-sector eigensystems of the beam-splitter generator a^dag b + a b^dag.

    The generator is angle-independent, so one decomposition serves every
    theta; exp(i theta G) is applied as V (e^{i theta w} . (V^T psi))."""
    systems = []
    for idx in _sector_indices(di, dj):
        L = len(idx)
        na0 = idx[0] // dj
        G = np.zeros((L, L))
        for r in range(L - 1):
            na, nb = na0 + r, (idx[r] % dj)
            # <na+1, nb-1| a^dag b |na, nb>
            G[r + 1, r] = G[r, r + 1] = math.sqrt((na + 1) * nb)
        systems.append(np.linalg.eigh(G))
    return systems


@lru_cache(maxsize=64)
def _kpe_eigensystems(k: int, di: int, dj: int):
    """Per-sector eigensystems of a^dag^k b^k + a^k b^dag^k."""
    systems = []
    for idx in _sector_indices(di, dj):
        L = len(idx)
        na0 = idx[0] // dj
        H = np.zeros((L, L))
        for r in range(L - k):
            na, nb = na0 + r, (idx[r] % dj)
            amp = 1.0
            for j in range(1, k + 1):
                amp *= (na + j) * (nb - j + 1)
            H[r + k, r] = H[r, r + k] = math.sqrt(amp)
        systems.append(np.linalg.eigh(H))
    return systems


def _apply_sector_generator(state: MultiModeState, modes, systems,
                            angle: float) -> MultiModeState:
    """Apply exp(i angle G) sector-by-sector on a mode pair, touching only the
    sectors a branch populates (exact: all generators conserve total photons,
    so zero sectors stay zero)."""
    i, j = modes
    dims = state.mode_dims
    di, dj = dims[i], dims[j]
    sectors = _sector_indices(di, dj)
    rest = [ax for ax in range(len(dims)) if ax not in (i, j)]
    perm = [i, j] + rest
    inv = np.argsort(perm)
    trivial = perm == sorted(perm)
    new_branches = []
    for w, a in state.branches:
        if trivial:
            t = a.reshape(di * dj, -1)
        else:
            t = a.reshape(dims).transpose(perm).reshape(di * dj, -1)
        out = t.copy()
        rows = np.flatnonzero((np.abs(t) ** 2).sum(axis=1))
        active = np.unique(rows // dj + rows % dj)
        for m in active:
            idx = sectors[m]
            ev, V = systems[m]
            sub = t[idx, :]
            out[idx, :] = V @ (np.exp(1j * angle * ev)[:, None] * (V.T @ sub))
        if trivial:
            b = out.reshape(-1)
        else:
            shp = [di, dj] + [dims[ax] for ax in rest]
            b = out.reshape(shp).transpose(inv).reshape(-1)
        new_branches.append((w, b))
    return MultiModeState(dims, new_branches, validate=False)


def _check_modes(state: MultiModeState, modes):
    for m in modes:
        if not 0 <= m < state.n_modes:
            raise ValueError(f"mode {m} out of range for {state.n_modes}-mode state")
    if len(set(modes)) != len(modes):
        raise ValueError(f"element modes must be distinct, got {modes}")


def _mode_number_grid(dims, mode) -> np.ndarray:
    """n_mode evaluated on the flat product basis."""
    n = np.arange(dims[mode])
    shape = [1] * len(dims)
    shape[mode] = dims[mode]
    return np.broadcast_to(n.reshape(shape), dims).reshape(-1)


def apply(state: MultiModeState, element: CircuitElement) -> MultiModeState:
    """Evolve every branch by the element's unitary; returns a new state."""
    dims = state.mode_dims
    if isinstance(element, PhaseShift):
        _check_modes(state, (element.mode,))
        phase = np.exp(1j * element.phi * _mode_number_grid(dims, element.mode))
        out = MultiModeState(
            dims, [(w, a * phase) for w, a in state.branches], validate=False)
    elif isinstance(element, SelfKerr):
        _check_modes(state, (element.mode,))
        n = _mode_number_grid(dims, element.mode)
        phase = np.exp(1j * element.chi * n.astype(float) ** 2 / 2.0)
        out = MultiModeState(
            dims, [(w, a * phase) for w, a in state.branches], validate=False)
    elif isinstance(element, CrossKerr):
        _check_modes(state, element.modes)
        ni = _mode_number_grid(dims, element.modes[0]).astype(float)
        nj = _mode_number_grid(dims, element.modes[1]).astype(float)
        phase = np.exp(-1j * element.chi_t * (ni ** element.order) * (nj ** element.order))
        out = MultiModeState(
            dims, [(w, a * phase) for w, a in state.branches], validate=False)
    elif isinstance(element, BeamSplitter):
        _check_modes(state, element.modes)
        i, j = element.modes
        systems = _bs_eigensystems(dims[i], dims[j])
        out = _apply_sector_generator(state, element.modes, systems, element.theta)
    elif isinstance(element, KPhotonExchange):
        _check_modes(state, element.modes)
        i, j = element.modes
        systems = _kpe_eigensystems(element.k, dims[i], dims[j])
        out = _apply_sector_generator(state, element.modes, systems, -element.g_t)
    else:
        raise TypeError(f"unknown circuit element {element!r}")
    for w, a in out.branches:
        err = abs(np.linalg.norm(a) - 1.0)
        if err > _UNITARITY_TOL:
            raise ArithmeticError(
                f"element {element!r} broke unitarity by {err:.2e}")
    return out


def apply_circuit(state: MultiModeState, circuit: Circuit) -> MultiModeState:
    """Left-to-right application of circuit.elements."""
    for e in circuit.elements:
        state = apply(state, e)
    return state


def element_matrix(element: CircuitElement, mode_dims) -> np.ndarray:
    """Dense unitary of one element on the full product grid (small dims only;
    used by the unitarity checks and the mixture-consistency oracles)."""
    dims = tuple(mode_dims)
    dim = int(np.prod(dims))
    if dim > 4096:
        raise MemoryError(f"dense element matrix of dim {dim} refused")
    U = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        a = np.zeros(dim, dtype=complex)
        a[col] = 1.0
        st = MultiModeState(dims, [(1.0, a)], validate=False)
        U[:, col] = apply(st, element).branches[0][1]
    return U


# ---------------------------------------------------------------------------
# observables

def reduced_density(state: MultiModeState, mode: int) -> np.ndarray:
    """Partial trace onto one mode; Hermitian with unit trace."""
    _check_modes(state, (mode,))
    dims = state.mode_dims
    d = dims[mode]
    perm = [mode] + [ax for ax in range(len(dims)) if ax != mode]
    rho = np.zeros((d, d), dtype=complex)
    for w, a in state.branches:
        M = a.reshape(dims).transpose(perm).reshape(d, -1)
        rho += w * (M @ M.conj().T)
    return 0.5 * (rho + rho.conj().T)


def mean_photon(state: MultiModeState, mode: int) -> float:
    """sum_j w_j <psi_j| n_mode |psi_j>."""
    _check_modes(state, (mode,))
    n = _mode_number_grid(state.mode_dims, mode)
    return float(sum(w * float(n @ (np.abs(a) ** 2)) for w, a in state.branches))


def total_mean_photon(state: MultiModeState) -> float:
    return sum(mean_photon(state, m) for m in range(state.n_modes))


def fidelity_pure(a: MultiModeState, b: MultiModeState) -> float:
    """|<psi_a|psi_b>|^2 for single-branch states (test helper)."""
    if len(a.branches) != 1 or len(b.branches) != 1:
        raise ValueError("fidelity_pure needs pure (single-branch) states")
    return float(abs(np.vdot(a.branches[0][1], b.branches[0][1])) ** 2)
