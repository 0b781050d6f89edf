"""Report bundles: delimited grids plus rendered figures.

Writes, under an output directory: a summary JSON, the sphere grids of
extreme states for the requested inverse temperatures, the
zero-temperature limit grid, and matplotlib renderings of both.  Figures
are rendered straight to files (Agg backend); nothing interactive.
"""

from __future__ import annotations

import os

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .cones import build_fan
from .groups import GroupSpec
from .limits import HMapCache, n_infinity_sample
from .output import csv_lines, dumps
from .solvers import PartitionData, critical_beta
from .states import DihedralHarmonic, sample_q_beta


def _write(path: str, text: str) -> str:
    with open(path, "w") as fh:
        fh.write(text)
    return path


def write_report(spec: GroupSpec, out_dir: str, betas=None, grid: int = 180,
                 config: SolverConfig = DEFAULT_CONFIG) -> list:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    written = []
    data = PartitionData.from_spec(spec)
    beta0 = critical_beta(data, config)
    if betas is None:
        betas = [beta0 + 0.5, beta0 + 1.0]

    summary = {"group": spec.name, "rank": spec.rank,
               "generators": list(spec.generators), "beta0": beta0,
               "betas": list(map(float, betas)), "grid": grid}
    written.append(_write(os.path.join(out_dir, "summary.json"),
                          dumps(summary) + "\n"))

    if spec.rank >= 1:
        written += _qbeta_section(spec, beta0, betas, grid, out_dir, config, plt)
        written += _ninf_section(spec, grid, out_dir, config, plt)
    if spec.oracle is not None and spec.oracle.kind == "dihedral_infinite":
        written += _dihedral_section(spec, beta0, out_dir, plt)
    return written


def _qbeta_section(spec, beta0, betas, grid, out_dir, config, plt):
    written = []
    header = ["beta"] + [f"u{i+1}" for i in range(spec.rank)] + \
             [f"p_{s}" for s in spec.generators]
    rows = []
    curves = {}
    for beta in betas:
        pts = sample_q_beta(spec, float(beta), grid, config, beta0=beta0)
        curves[float(beta)] = pts
        for pt in pts:
            rows.append([float(beta)] + pt.u.tolist()
                        + pt.probability_vector().tolist())
    written.append(_write(os.path.join(out_dir, "qbeta_grid.csv"),
                          "\n".join(csv_lines(header, rows)) + "\n"))

    fig, ax = plt.subplots(figsize=(5, 5))
    for beta, pts in curves.items():
        if spec.rank >= 2:
            u = np.array([pt.u for pt in pts])
            if len(u):
                closed = np.vstack([u, u[:1]])
                ax.plot(closed[:, 0], closed[:, 1], label=f"beta={beta:.3f}")
            ax.set_xlabel("u1")
            ax.set_ylabel("u2")
        else:
            for pt in pts:
                ax.scatter([beta], pt.u, color="tab:blue")
            ax.set_xlabel("beta")
            ax.set_ylabel("u")
    ax.set_title(f"{spec.name}: extreme-state sphere above beta0={beta0:.4f}")
    ax.legend(loc="best", fontsize=8)
    path = os.path.join(out_dir, "qbeta.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written


def _ninf_section(spec, grid, out_dir, config, plt):
    written = []
    fan = build_fan(spec, config)
    samples = n_infinity_sample(fan, grid, HMapCache(), config)
    header = [f"v{i+1}" for i in range(spec.rank)] + \
             [f"p_{s}" for s in spec.generators]
    rows = [list(map(float, v)) + list(map(float, pt.p)) for v, pt in samples]
    written.append(_write(os.path.join(out_dir, "ninf_grid.csv"),
                          "\n".join(csv_lines(header, rows)) + "\n"))

    fig, ax = plt.subplots(figsize=(6, 4))
    if spec.rank >= 2:
        angles = [float(np.arctan2(v[1], v[0])) for v, _ in samples]
        order = np.argsort(angles)
        for j, s in enumerate(spec.generators):
            ax.plot([angles[i] for i in order],
                    [samples[i][1].p[j] for i in order], label=s)
        ax.set_xlabel("direction angle")
    else:
        for j, s in enumerate(spec.generators):
            ax.plot([0, 1], [samples[0][1].p[j], samples[1][1].p[j]],
                    marker="o", label=s)
        ax.set_xlabel("direction index")
    ax.set_ylabel("limit weight")
    ax.set_title(f"{spec.name}: zero-temperature limit profile")
    ax.legend(loc="best", fontsize=8)
    path = os.path.join(out_dir, "ninf_profile.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written


def _dihedral_section(spec, beta0, out_dir, plt):
    written = []
    beta = float(np.log(2.5))
    ns = list(range(-6, 7))
    fig, ax = plt.subplots(figsize=(6, 4))
    for t in (0.0, 0.25, 0.5, 1.0):
        psi = DihedralHarmonic(spec, beta, t)
        ax.semilogy(ns, [psi.psi_element((n, 0)) for n in ns],
                    marker=".", label=f"t={t}")
    ax.set_xlabel("n")
    ax.set_ylabel("value at a^n")
    ax.set_title(f"{spec.name}: harmonic family at beta=log(5/2)")
    ax.legend(loc="best", fontsize=8)
    path = os.path.join(out_dir, "dihedral_family.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written
