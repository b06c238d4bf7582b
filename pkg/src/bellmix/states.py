"""State factory for the duty-cycled two-photon source.

The source emits beta|HH> - e^{i phi} gamma|VV> while the pump rotator sits at
low voltage and the sign-flipped state at high voltage. Averaging over the
square waveform mixes the two with weights set by the duty cycle alpha
(alpha = 0: pure low-voltage state, alpha = 1: pure high-voltage state). A
second rotator in the signal arm swaps H and V on that photon for a fraction
signal_dc of the time, which turns Phi-type states into Psi-type states.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigParse, InvalidConfig, NotNormalized, OutOfRange
from .linalg import DensityMatrix, PureState, hermitize

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# X on the signal photon, identity on the idler: swaps HH<->VH and HV<->VV.
_SIGNAL_FLIP = np.kron(np.array([[0.0, 1.0], [1.0, 0.0]]), np.eye(2)).astype(complex)
_SIGNAL_Z = np.kron(np.diag([1.0, -1.0]), np.eye(2)).astype(complex)

_BELL_AMPLITUDES = {
    "phi+": (_INV_SQRT2, 0.0, 0.0, _INV_SQRT2),
    "phi-": (_INV_SQRT2, 0.0, 0.0, -_INV_SQRT2),
    "psi+": (0.0, _INV_SQRT2, _INV_SQRT2, 0.0),
    "psi-": (0.0, _INV_SQRT2, -_INV_SQRT2, 0.0),
}


@dataclass(frozen=True)
class NoiseParams:
    """Two-parameter noise model: signal-arm H/V dephasing plus uniform depolarizing."""

    dephasing: float = 0.0
    depolarizing: float = 0.0

    def __post_init__(self) -> None:
        for name in ("dephasing", "depolarizing"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise OutOfRange(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class SourceConfig:
    """Pump and rotator parameters defining one generated state."""

    alpha: float = 0.0
    phi: float = 0.0
    beta: complex = _INV_SQRT2
    gamma: complex = _INV_SQRT2
    signal_dc: float = 0.0
    noise: NoiseParams = field(default_factory=NoiseParams)

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise OutOfRange(f"alpha must lie in [0, 1], got {self.alpha!r}")
        if not 0.0 <= self.signal_dc <= 1.0:
            raise OutOfRange(f"signal_dc must lie in [0, 1], got {self.signal_dc!r}")
        _check_pump_norm(self.beta, self.gamma)

    @classmethod
    def from_json_dict(cls, data: dict) -> "SourceConfig":
        if not isinstance(data, dict):
            raise InvalidConfig(f"source config must be a JSON object, got {type(data).__name__}")
        known = {
            "alpha", "phi", "beta_re", "beta_im", "gamma_re", "gamma_im",
            "signal_dc", "dephasing", "depolarizing",
        }
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown config fields: {sorted(unknown)}")

        def num(key, default):
            value = data.get(key, default)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise InvalidConfig(f"field {key!r} must be a number, got {value!r}")
            return float(value)

        beta = complex(num("beta_re", _INV_SQRT2), num("beta_im", 0.0))
        gamma = complex(num("gamma_re", _INV_SQRT2), num("gamma_im", 0.0))
        try:
            return cls(
                alpha=num("alpha", 0.0),
                phi=num("phi", 0.0),
                beta=beta,
                gamma=gamma,
                signal_dc=num("signal_dc", 0.0),
                noise=NoiseParams(
                    dephasing=num("dephasing", 0.0),
                    depolarizing=num("depolarizing", 0.0),
                ),
            )
        except (OutOfRange, NotNormalized) as exc:
            raise InvalidConfig(str(exc)) from exc

    @classmethod
    def from_file(cls, path) -> "SourceConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigParse(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigParse(f"config {path} is not valid JSON: line {exc.lineno}: {exc.msg}") from exc
        return cls.from_json_dict(data)


def _check_pump_norm(beta: complex, gamma: complex) -> None:
    total = abs(beta) ** 2 + abs(gamma) ** 2
    if abs(total - 1.0) > 1e-12:
        raise NotNormalized(f"|beta|^2 + |gamma|^2 = {total!r}, not 1 within 1e-12")


def bell_state(kind: str) -> PureState:
    """One of the four maximally entangled states: 'phi+', 'phi-', 'psi+', 'psi-'."""
    try:
        amps = _BELL_AMPLITUDES[kind.lower()]
    except KeyError:
        raise OutOfRange(f"unknown Bell state {kind!r}; expected one of {sorted(_BELL_AMPLITUDES)}")
    return PureState(np.array(amps, dtype=complex))


def _pump_amplitudes(phi: float, beta: complex, gamma: complex, flip: bool) -> np.ndarray:
    # exp(1j*0.0) is exactly 1, so the default phase introduces no rounding.
    vv = (1.0 if flip else -1.0) * np.exp(1j * phi) * gamma
    amps = np.array([beta, 0.0, 0.0, vv], dtype=complex)
    return amps / np.sqrt(np.sum(np.abs(amps) ** 2))


def pump_state(phi: float, beta: complex, gamma: complex) -> PureState:
    """Pump-defined two-photon state beta|HH> - e^{i phi} gamma|VV>, normalized."""
    _check_pump_norm(beta, gamma)
    return PureState(_pump_amplitudes(phi, beta, gamma, flip=False))


def mix_duty_cycle(alpha: float) -> DensityMatrix:
    """Duty-cycle mixture of the two Phi Bell states.

    alpha = 0 gives phi-, alpha = 1 gives phi+; the HH/VV coherence is
    alpha - 1/2 and the diagonal stays (1/2, 0, 0, 1/2) throughout.
    """
    if not 0.0 <= alpha <= 1.0:
        raise OutOfRange(f"alpha must lie in [0, 1], got {alpha!r}")
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = 0.5
    m[0, 3] = m[3, 0] = alpha - 0.5
    return DensityMatrix(m)


def apply_signal_rotator(state: DensityMatrix, half_wave: bool) -> DensityMatrix:
    """Swap H and V on the signal photon when the rotator is at half-wave retardance."""
    if not half_wave:
        return state
    rotated = _SIGNAL_FLIP @ state.matrix @ _SIGNAL_FLIP.conj().T
    return DensityMatrix(hermitize(rotated))


def completely_mixed() -> DensityMatrix:
    """The four-dimensional completely mixed state, identity over 4."""
    return DensityMatrix(np.eye(4, dtype=complex) / 4.0)


def generate(config: SourceConfig) -> DensityMatrix:
    """Time-averaged state of the source for one configuration.

    The pump and signal rotators run on independent waveforms, so the average
    is a convex mixture over the four on/off branches:

        (1-alpha)(1-dc)  pump low,  signal off   (Phi-minus type)
        alpha(1-dc)      pump high, signal off   (Phi-plus type)
        (1-alpha) dc     pump low,  signal on    (Psi-minus type)
        alpha dc         pump high, signal on    (Psi-plus type)

    Dephasing then damps the signal-photon H/V coherences by (1 - dephasing)
    and depolarizing admixes the completely mixed state.
    """
    ket_low = _pump_amplitudes(config.phi, config.beta, config.gamma, flip=False)
    ket_high = _pump_amplitudes(config.phi, config.beta, config.gamma, flip=True)
    alpha, dc = config.alpha, config.signal_dc
    branches = (
        ((1.0 - alpha) * (1.0 - dc), ket_low),
        (alpha * (1.0 - dc), ket_high),
        ((1.0 - alpha) * dc, _SIGNAL_FLIP @ ket_low),
        (alpha * dc, _SIGNAL_FLIP @ ket_high),
    )
    rho = np.zeros((4, 4), dtype=complex)
    for weight, ket in branches:
        if weight > 0.0:
            rho += weight * np.outer(ket, ket.conj())

    d = config.noise.dephasing
    if d > 0.0:
        # Phase-flip channel on the signal photon: off-diagonal blocks shrink by (1-d).
        rho = (1.0 - 0.5 * d) * rho + 0.5 * d * (_SIGNAL_Z @ rho @ _SIGNAL_Z)
    p = config.noise.depolarizing
    if p > 0.0:
        rho = (1.0 - p) * rho + p * np.eye(4, dtype=complex) / 4.0

    return DensityMatrix(hermitize(rho))
