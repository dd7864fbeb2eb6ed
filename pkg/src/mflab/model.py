"""Chain parameters, gate-angle bookkeeping, and exact Pauli-string algebra.

Conventions used throughout the package:

* sites are numbered 1..N and Majorana indices 1..2N;
* the single-qubit Z angle is ``z_angle``, the XX bond angle is
  ``xx_angle`` and the ZZ interaction angle is ``zz_angle`` (the three
  symbols are kept apart deliberately, since the usual Greek letters
  collide);
* Pauli phases live in the four-element group {1, i, -1, -i} and are
  tracked exactly as a power of i, never as a float.

Two Jordan-Wigner encodings of the Majorana operators are provided, one
anchored at the left edge and one at the right edge:

    gamma^L(2k-1) = (-Z_1)...(-Z_{k-1}) X_k
    gamma^L(2k)   = (-Z_1)...(-Z_{k-1}) Y_k
    gamma^R(2k-1) = (-Z_{k+1})...(-Z_N) Y_k
    gamma^R(2k)   = -(-Z_{k+1})...(-Z_N) X_k

Both encodings obey {gamma_mu, gamma_nu} = 2 delta_{mu,nu} and evolve with
the same single-particle matrix under the driven-chain dynamics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

Rep = Literal["L", "R"]

_LETTERS = ("I", "X", "Y", "Z")

# Single-site products: _MUL[(a, b)] = (k, c) with a.b = i**k c.
_MUL = {
    ("I", "I"): (0, "I"), ("I", "X"): (0, "X"), ("I", "Y"): (0, "Y"), ("I", "Z"): (0, "Z"),
    ("X", "I"): (0, "X"), ("X", "X"): (0, "I"), ("X", "Y"): (1, "Z"), ("X", "Z"): (3, "Y"),
    ("Y", "I"): (0, "Y"), ("Y", "X"): (3, "Z"), ("Y", "Y"): (0, "I"), ("Y", "Z"): (1, "X"),
    ("Z", "I"): (0, "Z"), ("Z", "X"): (1, "Y"), ("Z", "Y"): (3, "X"), ("Z", "Z"): (0, "I"),
}

_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)
_PHASE_REPR = ("+", "+i", "-", "-i")


@dataclass(frozen=True)
class PauliString:
    """A phase-exact Pauli operator: i**phase_power times one letter per site."""

    phase_power: int
    letters: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "phase_power", self.phase_power % 4)
        object.__setattr__(self, "letters", tuple(self.letters))
        for c in self.letters:
            if c not in _LETTERS:
                raise ValueError(f"unknown Pauli letter {c!r}")

    @property
    def n_sites(self) -> int:
        return len(self.letters)

    @property
    def phase(self) -> complex:
        return _PHASES[self.phase_power]

    @property
    def is_hermitian(self) -> bool:
        return self.phase_power in (0, 2)

    @property
    def is_identity(self) -> bool:
        return self.phase_power == 0 and all(c == "I" for c in self.letters)

    def __neg__(self) -> "PauliString":
        return PauliString(self.phase_power + 2, self.letters)

    def dagger(self) -> "PauliString":
        return PauliString(-self.phase_power, self.letters)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_product(self, other)

    def __repr__(self) -> str:
        return f"{_PHASE_REPR[self.phase_power]}{''.join(self.letters)}"


def identity_string(n_sites: int) -> PauliString:
    return PauliString(0, ("I",) * n_sites)


def single_site(letter: str, site: int, n_sites: int) -> PauliString:
    """Pauli ``letter`` acting on 1-based ``site``, identity elsewhere."""
    if not 1 <= site <= n_sites:
        raise ValueError(f"site {site} outside 1..{n_sites}")
    letters = ["I"] * n_sites
    letters[site - 1] = letter
    return PauliString(0, tuple(letters))


def pauli_product(a: PauliString, b: PauliString) -> PauliString:
    """Associative, phase-exact product of two equal-length Pauli strings."""
    if a.n_sites != b.n_sites:
        raise ValueError(f"length mismatch: {a.n_sites} vs {b.n_sites}")
    power = a.phase_power + b.phase_power
    letters = []
    for x, y in zip(a.letters, b.letters):
        k, c = _MUL[(x, y)]
        power += k
        letters.append(c)
    return PauliString(power, tuple(letters))


@dataclass(frozen=True)
class MajoranaLabel:
    """1-based Majorana index together with the boundary its string anchors to."""

    mu: int
    rep: Rep

    def __post_init__(self):
        if self.rep not in ("L", "R"):
            raise ValueError(f"rep must be 'L' or 'R', got {self.rep!r}")
        if self.mu < 1:
            raise ValueError(f"Majorana index must be >= 1, got {self.mu}")


def majorana_to_pauli(label: MajoranaLabel, n_sites: int) -> PauliString:
    """Exact Pauli string of a Majorana operator in the L or R encoding."""
    mu = label.mu
    if not 1 <= mu <= 2 * n_sites:
        raise ValueError(f"Majorana index {mu} outside 1..{2 * n_sites}")
    k = (mu + 1) // 2
    odd = mu % 2 == 1  # mu = 2k-1
    letters = ["I"] * n_sites
    if label.rep == "L":
        for i in range(k - 1):
            letters[i] = "Z"
        letters[k - 1] = "X" if odd else "Y"
        power = 2 * (k - 1)
    else:
        for i in range(k, n_sites):
            letters[i] = "Z"
        letters[k - 1] = "Y" if odd else "X"
        power = 2 * (n_sites - k) if odd else 2 * (n_sites - k + 1)
    return PauliString(power, tuple(letters))


def majorana_probe(label: MajoranaLabel, n_sites: int) -> PauliString:
    """Observable measured in the spectroscopy pipeline for a Majorana index.

    Identical to :func:`majorana_to_pauli` for the L encoding.  R-encoding
    probes carry an extra global minus sign so that the all-|+> product
    state has expectation +1 on the right edge probe (index 2N), which
    keeps the spectral denominators used for wavefunction reconstruction
    positive.  The flip is an overall sign of every R operator, so it
    leaves the anticommutation algebra and the single-particle dynamics
    untouched.
    """
    p = majorana_to_pauli(label, n_sites)
    return -p if label.rep == "R" else p


def majorana_pair_string(mu: int, nu: int, n_sites: int, rep: Rep = "L") -> PauliString:
    """Pauli string of gamma_mu gamma_nu (same encoding on both factors).

    Products of two same-encoding Majorana operators are encoding
    independent, so the ``rep`` argument only affects intermediate
    bookkeeping.
    """
    a = majorana_to_pauli(MajoranaLabel(mu, rep), n_sites)
    b = majorana_to_pauli(MajoranaLabel(nu, rep), n_sites)
    return pauli_product(a, b)


def _as_angle_tuple(value, length: int, name: str):
    if isinstance(value, (int, float)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite")
        return float(value)
    vals = tuple(float(v) for v in value)
    if len(vals) != length:
        raise ValueError(f"{name} must have length {length}, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise ValueError(f"{name} entries must be finite")
    return vals


@dataclass(frozen=True)
class ChainSpec:
    """Chain length plus the three gate angles, uniform or per-site/per-bond.

    Angles are stored unreduced; they are only interpreted modulo 2*pi at
    the gate level.  ``z_angle`` accepts a scalar or N values, the two
    bond angles a scalar or N-1 values.
    """

    n_sites: int
    z_angle: float | tuple[float, ...] = 0.0
    xx_angle: float | tuple[float, ...] = 0.0
    zz_angle: float | tuple[float, ...] = 0.0

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")
        object.__setattr__(self, "z_angle", _as_angle_tuple(self.z_angle, self.n_sites, "z_angle"))
        object.__setattr__(self, "xx_angle", _as_angle_tuple(self.xx_angle, self.n_sites - 1, "xx_angle"))
        object.__setattr__(self, "zz_angle", _as_angle_tuple(self.zz_angle, self.n_sites - 1, "zz_angle"))

    def z_angles(self) -> np.ndarray:
        return self._expand(self.z_angle, self.n_sites)

    def xx_angles(self) -> np.ndarray:
        return self._expand(self.xx_angle, self.n_sites - 1)

    def zz_angles(self) -> np.ndarray:
        return self._expand(self.zz_angle, self.n_sites - 1)

    @staticmethod
    def _expand(value, length: int) -> np.ndarray:
        if isinstance(value, float):
            return np.full(length, value)
        return np.array(value, dtype=float)

    @property
    def is_free(self) -> bool:
        return bool(np.all(self.zz_angles() == 0.0))

    @property
    def is_uniform(self) -> bool:
        return all(isinstance(v, float) for v in (self.z_angle, self.xx_angle, self.zz_angle))

    def to_json(self) -> str:
        def plain(v):
            return list(v) if isinstance(v, tuple) else v

        return json.dumps(
            {"n": self.n_sites, "z_angle": plain(self.z_angle),
             "xx_angle": plain(self.xx_angle), "zz_angle": plain(self.zz_angle)}
        )

    @classmethod
    def from_json(cls, text: str) -> "ChainSpec":
        data = json.loads(text)
        extra = set(data) - {"n", "z_angle", "xx_angle", "zz_angle"}
        if extra:
            raise ValueError(f"unknown ChainSpec keys: {sorted(extra)}")
        return cls(
            n_sites=int(data["n"]),
            z_angle=data.get("z_angle", 0.0),
            xx_angle=data.get("xx_angle", 0.0),
            zz_angle=data.get("zz_angle", 0.0),
        )


@dataclass(frozen=True)
class ProtocolSchedule:
    """Three-segment drive: Z field until tau1, XX coupling until tau2, ZZ after.

    Units use hbar = 1, so products of a rate and a duration are angles.
    """

    period: float
    tau1: float
    tau2: float
    J: float
    h: float
    lam: float

    def __post_init__(self):
        if not (0.0 < self.tau1 < self.tau2 < self.period):
            raise ValueError(
                f"schedule must satisfy 0 < tau1 < tau2 < period, "
                f"got tau1={self.tau1}, tau2={self.tau2}, period={self.period}"
            )


def angles_from_schedule(sched: ProtocolSchedule, n_sites: int) -> ChainSpec:
    """Uniform-angle spec equivalent to one drive period of the schedule."""
    return ChainSpec(
        n_sites=n_sites,
        z_angle=sched.h * sched.tau1,
        xx_angle=sched.J * (sched.tau2 - sched.tau1),
        zz_angle=sched.lam * (sched.period - sched.tau2),
    )


def build_trivial_testbed(n_sites: int, bulk_xx: float, bulk_z: float) -> ChainSpec:
    """Chain with decoupled edge qubits: the first/last XX bond and first/last
    Z angle are zero, the bulk carries the given uniform angles.

    The four edge Majorana operators gamma_1, gamma_2, gamma_{2N-1} and
    gamma_{2N} are then exactly conserved, which makes the chain a clean
    source of zero-frequency boundary modes that are *not* topological.
    """
    if n_sites < 4:
        raise ValueError(f"testbed needs n_sites >= 4, got {n_sites}")
    xx = [0.0] + [bulk_xx] * (n_sites - 3) + [0.0]
    z = [0.0] + [bulk_z] * (n_sites - 2) + [0.0]
    return ChainSpec(n_sites=n_sites, z_angle=tuple(z), xx_angle=tuple(xx), zz_angle=0.0)
