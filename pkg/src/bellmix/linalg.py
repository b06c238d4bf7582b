"""Dense Hermitian kernel for the 2x2 and 4x4 operators used by every other module.

Eigendecomposition is delegated to LAPACK through numpy.linalg.eigh; at these
sizes accuracy is the only concern and LAPACK's symmetric solvers deliver it.
All functions are pure and never mutate their inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DataParse, InvalidState, NonHermitianInput, NotNormalized, ZeroTrace

HERMITIAN_TOL = 1e-10

# Eigenvalues in [-EIG_REJECT, 0) are treated as rounding noise and clipped to
# zero; anything more negative signals a bug in the caller, not rounding.
EIG_REJECT = 1e-6

_EPS = float(np.finfo(float).eps)


def hermitize(m: np.ndarray) -> np.ndarray:
    """(m + m^dagger)/2."""
    return 0.5 * (m + m.conj().T)


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.abs(m - m.conj().T).max())


def require_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NonHermitianInput(
            f"matrix deviates from Hermitian symmetry by {defect:.3e} (tolerance {tol:.1e})"
        )


def zero_clip(eigenvalues: np.ndarray) -> np.ndarray:
    """Clip negatives to zero and flush eigenvalues at rounding scale to exact zero.

    Flushing matters for downstream square roots: sqrt turns O(eps) noise on an
    exactly-zero eigenvalue into O(sqrt(eps)) error, which would dominate the
    error budget of concurrence and fidelity.
    """
    w = np.clip(eigenvalues, 0.0, None)
    cut = 16.0 * _EPS * max(float(w.max(initial=0.0)), 0.0)
    w[w < cut] = 0.0
    return w


def hermitian_eigen(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvector columns of a Hermitian matrix.

    Raises NonHermitianInput if the symmetry defect exceeds the tolerance.
    """
    m = np.asarray(m, dtype=complex)
    require_hermitian(m)
    w, v = np.linalg.eigh(hermitize(m))
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def matrix_sqrt(m: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root of a Hermitian PSD matrix.

    Negative eigenvalues above -EIG_REJECT are clipped to zero; anything below
    raises InvalidState.
    """
    w, v = hermitian_eigen(m)
    if w[-1] < -EIG_REJECT:
        raise InvalidState(
            f"matrix has eigenvalue {w[-1]:.3e}; too negative to be a rounded PSD matrix"
        )
    root = (v * np.sqrt(zero_clip(w))) @ v.conj().T
    return hermitize(root)


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 Hermitian, unit-trace, positive-semidefinite operator in the HV(x)HV basis.

    The constructor validates and never repairs; use nearest_physical to
    sanitize an approximately physical matrix first.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise InvalidState(f"density matrix must be 4x4, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidState("density matrix contains non-finite entries")
        require_hermitian(m, tol=1e-12)
        trace = complex(m.trace())
        if abs(trace - 1.0) > 1e-12:
            raise InvalidState(f"density matrix trace {trace} is not 1 within 1e-12")
        smallest = float(np.linalg.eigvalsh(hermitize(m)).min())
        if smallest < -1e-10:
            if smallest < -EIG_REJECT:
                raise InvalidState(
                    f"eigenvalue {smallest:.3e} is far below zero; upstream bug, not rounding"
                )
            raise InvalidState(
                f"eigenvalue {smallest:.3e} below -1e-10; pass through nearest_physical first"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class PureState:
    """Two-photon pure state; amplitudes ordered (HH, HV, VH, VV)."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.amplitudes, dtype=complex)
        if a.shape != (4,):
            raise InvalidState(f"pure state needs 4 amplitudes, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidState("pure state contains non-finite amplitudes")
        norm_sq = float(np.sum(np.abs(a) ** 2))
        if abs(norm_sq - 1.0) > 1e-12:
            raise NotNormalized(f"amplitude norm^2 is {norm_sq!r}, not 1 within 1e-12")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    def density(self) -> DensityMatrix:
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()))


def nearest_physical(m: np.ndarray) -> DensityMatrix:
    """Project an approximately Hermitian matrix onto the density-matrix cone.

    Symmetrizes, clips negative eigenvalues at zero, and renormalizes the
    trace. This is the sanitizer for rounded or reconstructed matrices, so it
    accepts arbitrarily negative eigenvalues; it raises ZeroTrace only when
    nothing positive survives the clip.
    """
    m = hermitize(np.asarray(m, dtype=complex))
    if not np.all(np.isfinite(m)):
        raise InvalidState("matrix contains non-finite entries")
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    total = float(w.sum())
    if total <= 0.0:
        raise ZeroTrace("all eigenvalues clipped to zero")
    w /= total
    out = (v * w) @ v.conj().T
    out = hermitize(out)
    # Pin the trace exactly; eigh reconstruction leaves ~1e-16 drift.
    out[out.shape[0] - 1, out.shape[0] - 1] += 1.0 - out.trace().real
    return DensityMatrix(out)


def matrix_to_json_dict(m: np.ndarray) -> dict:
    """{"dim": n, "re": [[...]], "im": [[...]]}, row-major."""
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    return {
        "dim": int(n),
        "re": [[float(x) for x in row] for row in m.real],
        "im": [[float(x) for x in row] for row in m.imag],
    }


def matrix_from_json_dict(data: dict) -> np.ndarray:
    try:
        dim = int(data["dim"])
        re = np.array(data["re"], dtype=float)
        im = np.array(data["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataParse(f"malformed matrix JSON: {exc}") from exc
    if dim not in (2, 4) or re.shape != (dim, dim) or im.shape != (dim, dim):
        raise DataParse(
            f"matrix JSON shape mismatch: dim={dim}, re{re.shape}, im{im.shape}"
        )
    m = re + 1j * im
    if not np.all(np.isfinite(m)):
        raise DataParse("matrix JSON contains non-finite entries")
    return m


def write_state_json(path, rho: DensityMatrix) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_json_dict(rho.matrix), fh, indent=2)
        fh.write("\n")


def read_state_json(path) -> DensityMatrix:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataParse(f"cannot read state file {path}: {exc}") from exc
    return DensityMatrix(matrix_from_json_dict(data))
