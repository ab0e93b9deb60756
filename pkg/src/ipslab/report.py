"""Delimited output, run manifests, and figure rendering.

Every CSV has a header row and ends with a comment line referencing the
manifest; files are written atomically (temp + rename).  Figures are
rendered next to the CSV with the same stem.
"""

import hashlib
import json
import os
import tempfile
import time

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import __version__


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp_", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def write_csv(path, header, rows, manifest_name):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    lines.append(f"# manifest: {manifest_name}")
    _atomic_write(path, "\n".join(lines) + "\n")


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_manifest(path, config, seed, t_start):
    payload = {
        "config": config,
        "config_hash": hashlib.sha256(
            json.dumps(config, sort_keys=True).encode()).hexdigest(),
        "seed": seed,
        "version": __version__,
        "wall_time_s": round(time.time() - t_start, 3),
    }
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


# -- figures -------------------------------------------------------------------

def _save(fig, path):
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_theta_curve(rows, path, lam_c=None):
    fig, ax = plt.subplots(figsize=(6, 4))
    lam = [r.lam for r in rows]
    th = [r.theta_hat for r in rows]
    lo = [r.ci_lo for r in rows]
    hi = [r.ci_hi for r in rows]
    ax.fill_between(lam, lo, hi, alpha=0.25, label="95% CI")
    ax.plot(lam, th, "o-", ms=3)
    if lam_c is not None:
        ax.axvline(lam_c, ls="--", color="gray", lw=1)
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(r"$\hat\theta(\lambda)$")
    ax.set_title("Survival probability (finite-box proxy)")
    _save(fig, path)


def plot_density(curve, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.fill_between(curve.t, curve.mean - curve.ci, curve.mean + curve.ci, alpha=0.25)
    ax.plot(curve.t, curve.mean)
    ax.set_xlabel("t")
    ax.set_ylabel("occupied fraction")
    _save(fig, path)


def plot_bifurcation(rows, path, xlabel="parameter"):
    fig, ax = plt.subplots(figsize=(6, 4))
    for stab, marker, color in (("stable", "o", "C0"), ("unstable", "x", "C3"),
                                ("semistable", "s", "C1")):
        xs = [r[0] for r in rows if r[2] == stab]
        ys = [r[1] for r in rows if r[2] == stab]
        if xs:
            ax.plot(xs, ys, marker, ms=3, color=color, ls="none", label=stab)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("fixed point")
    ax.legend()
    _save(fig, path)


def plot_ode(ts, xs, path, chains=None):
    fig, ax = plt.subplots(figsize=(6, 4))
    if chains:
        for grid, path_vals in chains:
            ax.plot(grid, path_vals, lw=0.7, alpha=0.6)
    ax.plot(ts, xs, "k", lw=2, label="limit flow")
    ax.set_xlabel("t")
    ax.set_ylabel("density / magnetization")
    ax.legend()
    _save(fig, path)


def plot_magnetization(rows, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    betas = [r["beta"] for r in rows]
    ax.errorbar(betas, [r["m_hat"] for r in rows],
                yerr=[r["ci"] for r in rows], fmt="o", label="estimate")
    ax.plot(betas, [r["onsager"] for r in rows], "k--", label="closed form")
    ax.set_xlabel(r"$\beta$")
    ax.set_ylabel("center-spin magnetization")
    ax.legend()
    _save(fig, path)


def plot_percolation(rows, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ps = [r["p"] for r in rows]
    ax.errorbar(ps, [r["survived_fraction"] for r in rows],
                yerr=[[r["survived_fraction"] - r["ci_low"] for r in rows],
                      [r["ci_high"] - r["survived_fraction"] for r in rows]],
                fmt="o-")
    ax.set_xlabel("p")
    ax.set_ylabel(f"P[reach level n]")
    _save(fig, path)


def plot_clusters(stats, path):
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    axes[0].plot([s.t for s in stats], [s.disagreement for s in stats], "o-")
    axes[0].set_xlabel("t")
    axes[0].set_ylabel("neighbor disagreement")
    last = stats[-1]
    if last.cluster_sizes is not None and len(last.cluster_sizes):
        axes[1].hist(last.cluster_sizes, bins=30)
        axes[1].set_xlabel(f"cluster size at t={last.t:g}")
        axes[1].set_ylabel("count")
    _save(fig, path)


def plot_kdep(result, path):
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    axes[0].hist(result.conditionals, bins=40)
    axes[0].axvline(result.p_tilde, color="C3", ls="--", label=r"$\tilde p$")
    axes[0].set_xlabel("conditional probability")
    axes[0].legend()
    n = min(300, len(result.chi))
    img = np.stack([result.chi[:n], result.chi_prime[:n], result.chi_tilde[:n]])
    axes[1].imshow(img, aspect="auto", interpolation="nearest", cmap="Greys")
    axes[1].set_yticks([0, 1, 2], ["chi", "chi'", "chi~"])
    axes[1].set_xlabel("index")
    _save(fig, path)


def plot_couple(xa, xb, path, labels=("X", "Y")):
    fig, ax = plt.subplots(figsize=(7, 2.2))
    n = min(len(xa), len(xb))
    img = np.stack([np.asarray(xa[:n]), np.asarray(xb[:n])])
    ax.imshow(img, aspect="auto", interpolation="nearest", cmap="Greys")
    ax.set_yticks([0, 1], labels)
    ax.set_xlabel("site")
    ax.set_title("final coupled configurations (last seed)")
    _save(fig, path)


def plot_compare(field, path):
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    axes[0].bar(["empirical", "formula"], [field.empirical_p(), field.p_theory])
    axes[0].set_ylabel("open-bond probability")
    both = np.concatenate([field.chi_plus, field.chi_minus], axis=1)
    axes[1].imshow(both[:min(60, field.levels)], aspect="auto",
                   interpolation="nearest", cmap="Greys")
    axes[1].set_xlabel("block (plus | minus)")
    axes[1].set_ylabel("level")
    _save(fig, path)
