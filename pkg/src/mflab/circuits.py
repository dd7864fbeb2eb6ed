"""Compilation of the hardware protocol into a portable gate list.

Gates are listed in application order (first listed acts first).  Every
rotation gate R**(P) with angle a means exp(-i a P) on its qubits, so the
string-unwinding primitives are

    RYX(bond j, +pi/4) = exp(-i pi/4 Y_j X_{j+1})
    RXY(bond j, -pi/4) = exp(+i pi/4 X_j Y_{j+1})

and their inverses carry the opposite angle; RYX/RXY admit only +-pi/4.
``G`` is the single-qubit basis change H S^dagger.  A measurement circuit
ends in exactly one MEASURE and carries a metadata ``sign`` such that

    sign * <measured basis operator>  =  <target observable>.

All compiled fragments are verified against the dense statevector engine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
import numpy as np

from . import svsim
from .model import ChainSpec, MajoranaLabel, single_site

_ONE_QUBIT = {"RZ", "G"}
_TWO_QUBIT = {"RXX", "RZZ", "RYX", "RXY", "RYY"}
_FIXED_ANGLE = {"RYX", "RXY"}
_ROTATION_LETTERS = {"RZ": ("Z",), "RXX": ("X", "X"), "RZZ": ("Z", "Z"),
                     "RYX": ("Y", "X"), "RXY": ("X", "Y"), "RYY": ("Y", "Y")}
_BASES = ("X", "Y", "Z")


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.name in _ONE_QUBIT:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.name} takes one qubit")
        elif self.name in _TWO_QUBIT:
            if len(self.qubits) != 2 or self.qubits[1] != self.qubits[0] + 1:
                raise ValueError(f"{self.name} acts on one nearest-neighbour bond")
        else:
            raise ValueError(f"unknown gate {self.name!r}")
        if self.name == "G":
            if self.angle is not None:
                raise ValueError("G carries no angle")
        elif self.angle is None:
            raise ValueError(f"{self.name} needs an angle")
        elif self.name in _FIXED_ANGLE and abs(abs(self.angle) - np.pi / 4) > 1e-12:
            raise ValueError(f"{self.name} angle must be +-pi/4")


@dataclass(frozen=True)
class Circuit:
    n_sites: int
    gates: tuple[Gate, ...]
    measure: tuple[int, str] | None = None
    sign: int = 1
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            if any(not 1 <= q <= self.n_sites for q in gate.qubits):
                raise ValueError(f"gate {gate} outside 1..{self.n_sites}")
        if self.measure is not None:
            site, basis = self.measure
            if not 1 <= site <= self.n_sites:
                raise ValueError(f"measurement site {site} out of range")
            if basis not in _BASES:
                raise ValueError(f"measurement basis must be one of {_BASES}")
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +-1")


def compile_evolution(spec: ChainSpec, cycles: int) -> Circuit:
    """Gate layers for the given number of drive periods.

    Per cycle: N single-qubit Z rotations, N-1 XX rotations, then the ZZ
    rotations; zero-angle ZZ gates are omitted.
    """
    if cycles < 0:
        raise ValueError("cycles must be >= 0")
    gates: list[Gate] = []
    for _ in range(cycles):
        for j, phi in enumerate(spec.z_angles(), start=1):
            gates.append(Gate("RZ", (j,), float(phi)))
        for j, theta in enumerate(spec.xx_angles(), start=1):
            gates.append(Gate("RXX", (j, j + 1), float(theta)))
        for j, phz in enumerate(spec.zz_angles(), start=1):
            if phz != 0.0:
                gates.append(Gate("RZZ", (j, j + 1), float(phz)))
    return Circuit(spec.n_sites, tuple(gates), label=f"evolution[{cycles}]")


def compile_majorana_measurement(label: MajoranaLabel, n_sites: int) -> Circuit:
    """Single-measurement gadget for one Majorana string.

    Left-anchored strings unwind towards site 1 and measure it; right
    ones mirror towards site N with the inverse two-qubit rotations.
    """
    mu = label.mu
    if not 1 <= mu <= 2 * n_sites:
        raise ValueError(f"Majorana index {mu} outside 1..{2 * n_sites}")
    k = (mu + 1) // 2
    odd = mu % 2 == 1
    gates: list[Gate] = []
    if label.rep == "L":
        name = "RYX" if odd else "RXY"
        angle = np.pi / 4 if odd else -np.pi / 4
        for j in range(k - 1, 0, -1):
            gates.append(Gate(name, (j, j + 1), angle))
        measure = (1, "X" if odd else "Y")
        sign = (-1) ** (k - 1)
    else:
        name = "RYX" if odd else "RXY"
        angle = -np.pi / 4 if odd else np.pi / 4  # inverses of the L-side gates
        for b in range(k, n_sites):
            gates.append(Gate(name, (b, b + 1), angle))
        measure = (n_sites, "Y" if odd else "X")
        sign = (-1) ** (n_sites - k) if odd else (-1) ** (n_sites - k + 1)
    return Circuit(n_sites, tuple(gates), measure=measure, sign=sign,
                   label=f"gamma_{label.rep}_{mu}")


def compile_pair_measurement(k: int, n_sites: int) -> Circuit:
    """Gadget for the edge pair observable i gamma_1 gamma_2k.

    Basis change G on site 1, the XY unwinding chain, and a Y measurement
    of site 1; the metadata sign (fixed by exact string algebra) relates
    the measured value to <i gamma_1 gamma_2k>.
    """
    if not 2 <= k <= n_sites:
        raise ValueError(f"pair index k={k} outside 2..{n_sites}")
    gates: list[Gate] = [Gate("G", (1,))]
    for j in range(k - 1, 0, -1):
        gates.append(Gate("RXY", (j, j + 1), -np.pi / 4))
    return Circuit(n_sites, tuple(gates), measure=(1, "Y"), sign=(-1) ** (k - 1),
                   label=f"i_gamma_1_gamma_{2 * k}")


def compile_braid_unitary(alpha: float, n_sites: int) -> Circuit:
    """Circuit form of exp(-alpha gamma_1 gamma_2N).

    An XY chain walks the pair operator down to the first bond, a YY
    rotation applies the angle there, and the inverse chain walks back.
    The YY angle carries a parity factor (-1)**N so the compiled action
    matches the edge-pair exponential for every chain length.
    """
    gates: list[Gate] = []
    for b in range(n_sites - 1, 1, -1):
        gates.append(Gate("RXY", (b, b + 1), -np.pi / 4))
    gates.append(Gate("RYY", (1, 2), float((-1) ** n_sites * alpha)))
    for b in range(2, n_sites):
        gates.append(Gate("RXY", (b, b + 1), np.pi / 4))
    return Circuit(n_sites, tuple(gates), label=f"braid[{alpha:.6f}]")


# ---------------------------------------------------------------------------
# simulation against the dense engine

_G_MATRIX = np.array([[1.0, -1.0j], [1.0, 1.0j]]) / np.sqrt(2.0)


def simulate(circuit: Circuit, psi: svsim.StateVector) -> svsim.StateVector:
    """Apply the circuit's gate list (ignoring any MEASURE) to a state."""
    if psi.n_sites != circuit.n_sites:
        raise ValueError("state and circuit sizes differ")
    amps = psi.amps.copy()
    for gate in circuit.gates:
        if gate.name == "G":
            svsim._apply_1q_inplace(amps, circuit.n_sites, gate.qubits[0], _G_MATRIX)
        else:
            letters = list(zip(gate.qubits, _ROTATION_LETTERS[gate.name]))
            svsim._apply_pauli_rotation_inplace(amps, circuit.n_sites, gate.angle, letters)
    return svsim.StateVector(amps, circuit.n_sites)


def simulate_expectation(circuit: Circuit, psi: svsim.StateVector) -> float:
    """sign * <measured operator> after running the circuit on psi."""
    if circuit.measure is None:
        raise ValueError("circuit has no measurement")
    evolved = simulate(circuit, psi)
    site, basis = circuit.measure
    value = svsim.pauli_expectation(evolved, single_site(basis, site, circuit.n_sites))
    return circuit.sign * value


# ---------------------------------------------------------------------------
# serialization

def emit(circuit: Circuit, format: str = "json") -> str:
    """Deterministic text form; json round-trips, qasm_like is write-only."""
    if format == "json":
        payload = {
            "n": circuit.n_sites,
            "gates": [
                {"g": g.name, "q": list(g.qubits),
                 **({"angle": g.angle} if g.angle is not None else {})}
                for g in circuit.gates
            ],
            "measure": (None if circuit.measure is None
                        else {"q": circuit.measure[0], "basis": circuit.measure[1]}),
            "sign": circuit.sign,
            "label": circuit.label,
        }
        return json.dumps(payload, indent=1)
    if format == "qasm_like":
        return _emit_qasm_like(circuit)
    raise ValueError(f"unknown format {format!r}")


def parse_circuit(text: str) -> Circuit:
    data = json.loads(text)
    extra = set(data) - {"n", "gates", "measure", "sign", "label"}
    if extra:
        raise ValueError(f"unknown circuit keys {sorted(extra)}")
    gates = tuple(
        Gate(g["g"], tuple(g["q"]), g.get("angle")) for g in data.get("gates", ())
    )
    meas = data.get("measure")
    measure = None if meas is None else (int(meas["q"]), str(meas["basis"]))
    return Circuit(int(data["n"]), gates, measure=measure,
                   sign=int(data.get("sign", 1)), label=str(data.get("label", "")))


def _emit_qasm_like(circuit: Circuit) -> str:
    """Rotation-level program: rz/rxx/rzz/ryy native, the fixed-angle
    two-qubit primitives via s-conjugated rxx, qubits 0-based."""
    lines = [f"// label: {circuit.label}", f"// sign: {circuit.sign:+d}",
             f"qreg q[{circuit.n_sites}];"]
    for g in circuit.gates:
        q = [i - 1 for i in g.qubits]
        if g.name == "RZ":
            lines.append(f"rz({g.angle!r}) q[{q[0]}];")
        elif g.name in ("RXX", "RZZ", "RYY"):
            lines.append(f"{g.name.lower()}({g.angle!r}) q[{q[0]}],q[{q[1]}];")
        elif g.name == "RYX":
            lines += [f"sdg q[{q[0]}];", f"rxx({g.angle!r}) q[{q[0]}],q[{q[1]}];",
                      f"s q[{q[0]}];"]
        elif g.name == "RXY":
            lines += [f"sdg q[{q[1]}];", f"rxx({g.angle!r}) q[{q[0]}],q[{q[1]}];",
                      f"s q[{q[1]}];"]
        elif g.name == "G":
            lines += [f"sdg q[{q[0]}];", f"h q[{q[0]}];"]
    if circuit.measure is not None:
        site, basis = circuit.measure
        q = site - 1
        if basis == "X":
            lines.append(f"h q[{q}];")
        elif basis == "Y":
            lines += [f"sdg q[{q}];", f"h q[{q}];"]
        lines.append(f"measure q[{q}];")
    return "\n".join(lines) + "\n"
