"""Render one figure recipe to SVG and PNG."""

from __future__ import annotations

import os

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .recipes import FigureRecipe  # noqa: E402


class RenderError(ValueError):
    """Raised for missing/empty inputs or schema mismatches."""


def _load_csv(path: str, required: tuple[str, ...]) -> np.ndarray:
    if not os.path.exists(path):
        raise RenderError(f"input CSV not found: {path}")
    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.dtype.names is None:
        raise RenderError(f"{path} has no header row")
    missing = [c for c in required if c not in data.dtype.names]
    if missing:
        raise RenderError(f"{path} is missing columns {missing}")
    if data.size == 0:
        raise RenderError(f"{path} contains no data rows")
    return np.atleast_1d(data)


def _plot_band_panel(ax, data, bands, magnification):
    for s in bands:
        sel = data["s"] == s
        if not np.any(sel):
            raise RenderError(f"band {s} absent from the bands CSV")
        q = data["q"][sel] / np.pi
        order = np.argsort(q)
        q = q[order]
        e_re = data["E_re"][sel][order]
        e_im = np.abs(data["E_im"][sel][order])
        shade = magnification * e_im
        ax.fill_between(q, e_re - shade, e_re + shade, color="crimson",
                        alpha=0.45, linewidth=0)
        ax.plot(q, e_re, color="black", lw=1.2)
    ax.set_xlabel(r"$qa/\pi$")
    ax.set_ylabel(r"$E'_{q,s}\;(E_R)$")


def _render_bands(recipe, only_band1=False):
    data = _load_csv(recipe.inputs["bands"],
                     ("q", "s", "E_re", "E_im"))
    bands = [1] if only_band1 else sorted({int(s) for s in data["s"]})
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    _plot_band_panel(ax, data, bands, recipe.resolved_magnification())
    ax.set_title(f"{recipe.figure}: dispersion, linewidths x"
                 f"{recipe.resolved_magnification():g}")
    return fig


def _render_bands_compare(recipe):
    full = _load_csv(recipe.inputs["bands"], ("q", "s", "E_re", "E_im"))
    dark = _load_csv(recipe.inputs["bands_dark"], ("q", "s", "E_re"))
    bands = sorted({int(s) for s in full["s"]})
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    _plot_band_panel(ax, full, bands, recipe.resolved_magnification())
    for s in bands:
        sel = dark["s"] == s
        order = np.argsort(dark["q"][sel])
        ax.plot(dark["q"][sel][order] / np.pi, dark["E_re"][sel][order],
                ls=":", color="tab:blue", lw=1.0)
    ax.set_title("full (solid) vs adiabatic (dotted)")
    return fig


def _render_potentials(recipe):
    data = _load_csv(recipe.inputs["potentials"],
                     ("x", "omega1", "omega2", "omega3", "c1", "c2", "a_y"))
    fig, axes = plt.subplots(3, 1, figsize=(5.0, 7.0), sharex=True)
    for name in ("omega1", "omega2", "omega3"):
        axes[0].plot(data["x"], np.abs(data[name]), label=rf"$|\{name}|$")
    axes[0].set_ylabel(r"$|\Omega_j|\;(E_R)$")
    axes[0].legend(fontsize=8)
    axes[1].plot(data["x"], data["c1"], label=r"$c_1$")
    axes[1].plot(data["x"], data["c2"], label=r"$c_2$")
    axes[1].set_ylabel(r"$c_{1,2}\;(1/a)$")
    axes[1].legend(fontsize=8)
    axes[2].plot(data["x"], data["a_y"], color="tab:green")
    axes[2].set_ylabel(r"$\phi'\cos\theta\;(1/a)$")
    axes[2].set_xlabel(r"$x/a$")
    return fig


def _render_wannier(recipe):
    data = _load_csv(recipe.inputs["wannier"],
                     ("x", "ReW_D1", "ReW_D2", "ReW_B", "ReW_0"))
    fig, axes = plt.subplots(1, 2, figsize=(7.6, 3.2))
    x = data["x"]
    window = np.abs(x) <= float(recipe.options.get("xmax", 1.5))
    axes[0].plot(x[window], data["ReW_D1"][window], label=r"$W_{D_1}$")
    axes[0].plot(x[window], data["ReW_D2"][window], label=r"$W_{D_2}$")
    axes[1].plot(x[window], data["ReW_B"][window], label=r"$W_B$")
    axes[1].plot(x[window], data["ReW_0"][window], label=r"$W_0$")
    for ax in axes:
        ax.set_xlabel(r"$x/a$")
        ax.legend(fontsize=8)
    axes[0].set_ylabel(r"$W_Y(x)$")
    return fig


def _signed_runs(values):
    """Contiguous index runs of constant sign (zero counts as positive)."""
    neg = values < 0
    runs = []
    start = 0
    for i in range(1, len(values)):
        if neg[i] != neg[start]:
            runs.append((start, i, bool(neg[start])))
            start = i
    runs.append((start, len(values), bool(neg[start])))
    return runs


def _render_tb_sweep(recipe):
    data = _load_csv(recipe.inputs["tb"], ("param", "s", "v", "J_re"))
    vs = sorted({int(v) for v in data["v"] if v >= 1})
    vs = [v for v in vs if v <= int(recipe.options.get("vmax", 4))]
    if not vs:
        raise RenderError("tb CSV has no hopping orders v >= 1")
    params = np.unique(data["param"])
    # alpha sweeps are plotted in degrees, detuning sweeps in E_R
    is_alpha = params.max() <= 0.5 * np.pi + 1e-9
    xvals = np.degrees(params) if is_alpha else params
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    floor = 1e-12
    for k, v in enumerate(vs):
        j_re = np.array([
            data["J_re"][(data["param"] == p_) & (data["v"] == v)][0]
            for p_ in params])
        # dashed iff every sample of the segment is negative
        for lo, hi, is_neg in _signed_runs(j_re):
            seg = slice(lo, hi)
            ax.semilogy(xvals[seg], np.maximum(np.abs(j_re[seg]), floor),
                        ls="--" if is_neg else "-", color=colors[k % 10],
                        label=rf"$|J'_{v}|$" if lo == 0 else None)
    ax.set_xlabel(r"$\alpha$ (deg)" if is_alpha else r"$\Delta\;(E_R)$")
    ax.set_ylabel(r"$|J'_v|\;(E_R)$")
    ax.legend(fontsize=8)
    ax.set_title("dashed segments: negative values")
    return fig


_RENDERERS = {
    "bands": lambda r: _render_bands(r),
    "band1": lambda r: _render_bands(r, only_band1=True),
    "bands_compare": _render_bands_compare,
    "potentials": _render_potentials,
    "wannier": _render_wannier,
    "tb_sweep": _render_tb_sweep,
}


def render(recipe: FigureRecipe) -> list[str]:
    """Render the recipe; returns the written image paths (SVG + PNG)."""
    fig = _RENDERERS[recipe.kind](recipe)
    base, ext = os.path.splitext(recipe.out)
    if ext.lower() not in ("", ".svg", ".png"):
        raise RenderError(f"unsupported output extension {ext!r}")
    out_dir = os.path.dirname(os.path.abspath(recipe.out)) or "."
    os.makedirs(out_dir, exist_ok=True)
    written = []
    fig.tight_layout()
    for suffix in (".svg", ".png"):
        path = base + suffix
        fig.savefig(path, dpi=160)
        written.append(path)
    plt.close(fig)
    return written
