"""Figure kinds for the simulation CLI's CSV contracts.

Six kinds are supported; each validates the column names it needs and
fails with the missing name rather than drawing something half-empty.
Theory/fit columns are overlaid as lines whenever present.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class MissingColumnError(KeyError):
    """A required CSV column is absent."""


# required columns per figure kind (optional overlays noted in the renderers)
KINDS = {
    "spectrum_heatmap": ("phi", "omega", "absF"),
    "wavefunction_bars": ("mu", "psi_L", "psi_R"),
    "density_map": ("x", "omega", "g"),
    "discriminator_profile": ("x", "mean_absT", "std_absT"),
    "braid_comparison": ("mu", "psi_L", "psi_R", "psi_tilde_L", "psi_tilde_R"),
    "alpha_costcurve": ("alpha", "cost"),
}


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    title: str | None = None
    dpi: int = 150
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {sorted(KINDS)}")
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def load_table(path: str, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    """CSV columns as float arrays; non-numeric columns come back as strings."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for name in required:
            if name not in header:
                raise MissingColumnError(
                    f"{path}: missing required column {name!r} (found {header})")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    table = {}
    for name in header:
        values = [row[name] for row in rows]
        try:
            table[name] = np.array([float(v) for v in values])
        except ValueError:
            table[name] = np.array(values)
    return table


def _pivot(a: np.ndarray, b: np.ndarray, values: np.ndarray):
    """Long-format (a, b, value) triples onto a rectangular grid."""
    a_vals = np.unique(a)
    b_vals = np.unique(b)
    grid = np.full((len(a_vals), len(b_vals)), np.nan)
    ai = np.searchsorted(a_vals, a)
    bi = np.searchsorted(b_vals, b)
    grid[ai, bi] = values
    return a_vals, b_vals, grid


def _render_spectrum_heatmap(spec: PlotSpec, ax):
    table = load_table(spec.inputs[0], KINDS["spectrum_heatmap"])
    phi, omega, grid = _pivot(table["phi"], table["omega"], table["absF"])
    mesh = ax.pcolormesh(phi / np.pi, omega, grid.T, shading="nearest", cmap="magma")
    ax.set_xlabel(r"$\phi/\pi$")
    ax.set_ylabel(r"$\omega$")
    ax.figure.colorbar(mesh, ax=ax, label=r"$|F_1(\omega)|$")


def _render_wavefunction_bars(spec: PlotSpec, ax):
    table = load_table(spec.inputs[0], KINDS["wavefunction_bars"])
    mu = table["mu"]
    ax.bar(mu - 0.2, np.abs(table["psi_L"]), width=0.4, label=r"$|\psi^L|$")
    ax.bar(mu + 0.2, np.abs(table["psi_R"]), width=0.4, label=r"$|\psi^R|$")
    for col, style in (("psi_theory_L", "k-"), ("psi_theory_R", "k--")):
        if col in table and not np.all(np.isnan(table[col])):
            ax.plot(mu, np.abs(table[col]), style, lw=1,
                    label=col.replace("psi_theory_", "theory "))
    ax.set_xlabel(r"Majorana index $\mu$")
    ax.set_ylabel("amplitude")
    ax.legend(fontsize=8)


def _render_density_map(spec: PlotSpec, ax):
    table = load_table(spec.inputs[0], KINDS["density_map"])
    x, omega, grid = _pivot(table["x"], table["omega"], table["g"])
    mesh = ax.pcolormesh(omega, x, grid, shading="nearest", cmap="viridis")
    ax.set_xlabel(r"$\omega$")
    ax.set_ylabel("site $x$")
    ax.figure.colorbar(mesh, ax=ax, label=r"$g(x,\omega)$")


def _render_discriminator_profile(spec: PlotSpec, ax):
    for path in spec.inputs:
        table = load_table(path, KINDS["discriminator_profile"])
        label = Path(path).stem
        ax.errorbar(table["x"], table["mean_absT"], yerr=table["std_absT"],
                    marker="o", capsize=3, label=label)
    ax.set_xlabel("$x$")
    ax.set_ylabel(r"$|T_{1,2x}|$")
    ax.legend(fontsize=8)


def _render_braid_comparison(spec: PlotSpec, fig):
    table = load_table(spec.inputs[0], KINDS["braid_comparison"])
    mu = table["mu"]
    panels = [("psi_L", "theory_L", r"$|\psi^L|$"),
              ("psi_R", "theory_R", r"$|\psi^R|$"),
              ("psi_tilde_L", "theory_tilde_L", r"$|\tilde\psi^L|$"),
              ("psi_tilde_R", "theory_tilde_R", r"$|\tilde\psi^R|$")]
    axes = fig.subplots(2, 2)
    for ax, (col, theory, label) in zip(axes.ravel(), panels):
        err = table.get(f"{col}_std")
        ax.errorbar(mu, np.abs(table[col]), yerr=err, fmt="o", ms=3, capsize=2)
        if theory in table and not np.all(np.isnan(table[theory])):
            ax.plot(mu, np.abs(table[theory]), "-", lw=1)
        ax.set_title(label, fontsize=9)
        ax.set_xlabel(r"$\mu$", fontsize=8)
    fig.tight_layout()


def _render_alpha_costcurve(spec: PlotSpec, ax):
    table = load_table(spec.inputs[0], KINDS["alpha_costcurve"])
    err = table.get("cost_std")
    ax.errorbar(table["alpha"] / np.pi, table["cost"], yerr=err, fmt="o", capsize=3,
                label="measured")
    if "fit" in table:
        order = np.argsort(table["alpha"])
        ax.plot(table["alpha"][order] / np.pi, table["fit"][order], "-", label="fit")
    ax.set_xlabel(r"$\alpha/\pi$")
    ax.set_ylabel("cost")
    ax.legend(fontsize=8)


def render(plot_spec: PlotSpec) -> Path:
    """Draw one figure kind from its CSV input(s) and write the image."""
    fig = plt.figure(figsize=(6.0, 4.5))
    try:
        if plot_spec.kind == "braid_comparison":
            _render_braid_comparison(plot_spec, fig)
        else:
            ax = fig.add_subplot(111)
            {
                "spectrum_heatmap": _render_spectrum_heatmap,
                "wavefunction_bars": _render_wavefunction_bars,
                "density_map": _render_density_map,
                "discriminator_profile": _render_discriminator_profile,
                "alpha_costcurve": _render_alpha_costcurve,
            }[plot_spec.kind](plot_spec, ax)
        if plot_spec.title:
            fig.suptitle(plot_spec.title)
        out = Path(plot_spec.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, dpi=plot_spec.dpi, metadata={"Software": "mflab-plots"})
        return out
    finally:
        plt.close(fig)
