"""Output-distribution analytics: XEB, Porter-Thomas, post-selection.

The linear cross-entropy benchmark of L sampled bitstrings with known
circuit probabilities p_i is (2^n / L) * sum(p_i) - 1: it is 0 for
uniform sampling and 1 in expectation for samples whose probabilities
follow the Porter-Thomas density 2^n * exp(-p * 2^n).  All functions
take plain probability arrays so they stay decoupled from the engine;
the CLI wires amplitude tables into them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyInput,
    IncompleteEnumeration,
    NotSorted,
    ZeroMarginal,
)


@dataclass
class XebReport:
    L: int
    n: int
    f_xeb: float
    p_min: float
    p_max: float
    notes: str = ""

    def doc(self) -> dict:
        return {
            "L": self.L,
            "n": self.n,
            "f_xeb": self.f_xeb,
            "p_min": self.p_min,
            "p_max": self.p_max,
            "notes": self.notes,
        }


def xeb(probs, n: int, notes: str = "") -> XebReport:
    probs = np.asarray(probs, dtype=float)
    if probs.size == 0:
        raise EmptyInput("xeb needs at least one probability")
    f = (2.0**n / probs.size) * float(probs.sum()) - 1.0
    return XebReport(
        L=int(probs.size),
        n=n,
        f_xeb=f,
        p_min=float(probs.min()),
        p_max=float(probs.max()),
        notes=notes,
    )


def porter_thomas_density(p: float, n: int) -> float:
    return 2.0**n * math.exp(-p * 2.0**n)


def porter_thomas_sample(n: int, size: int, rng) -> np.ndarray:
    """Probabilities drawn from the Porter-Thomas density."""
    return rng.exponential(scale=2.0**-n, size=size)


def ks_to_porter_thomas(probs, n: int) -> float:
    """Kolmogorov-Smirnov distance of 2^n * p against Exp(1)."""
    x = np.sort(np.asarray(probs, dtype=float)) * 2.0**n
    if x.size == 0:
        raise EmptyInput("no probabilities")
    cdf = 1.0 - np.exp(-x)
    grid = np.arange(1, x.size + 1) / x.size
    return float(
        max(np.max(np.abs(grid - cdf)), np.max(np.abs(grid - 1.0 / x.size - cdf)))
    )


@dataclass
class HistogramRow:
    bin_lo: float
    bin_hi: float
    density: float
    pt_density: float


def histogram(probs, n: int, bins: int = 50, scale: str = "linear_Np"):
    """Normalized density of x = 2^n * p with the Porter-Thomas overlay.

    The overlay value per bin is the exact Porter-Thomas mass of the
    bin divided by its width, i.e. the curve a perfectly
    Porter-Thomas-distributed sample would trace.
    """
    probs = np.asarray(probs, dtype=float)
    if probs.size == 0:
        raise EmptyInput("no probabilities")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    x = probs * 2.0**n
    hi = float(x.max())
    if scale == "linear_Np":
        edges = np.linspace(0.0, hi if hi > 0 else 1.0, bins + 1)
    elif scale == "log":
        lo = float(x[x > 0].min()) if np.any(x > 0) else 1e-12
        hi = hi if hi > lo else lo * 10
        edges = np.logspace(math.log10(lo), math.log10(hi), bins + 1)
    else:
        raise ValueError(f"unknown scale {scale!r}")
    counts, edges = np.histogram(x, bins=edges)
    widths = np.diff(edges)
    density = counts / (probs.size * np.where(widths > 0, widths, 1.0))
    pt_mass = np.exp(-edges[:-1]) - np.exp(-edges[1:])
    pt_density = pt_mass / np.where(widths > 0, widths, 1.0)
    return [
        HistogramRow(float(edges[i]), float(edges[i + 1]), float(density[i]),
                     float(pt_density[i]))
        for i in range(len(counts))
    ]


def postselect_curve(probs_desc, n: int, points: int = 100):
    """XEB of the top fraction of bitstrings, for a grid of fractions.

    Input probabilities must be sorted descending (the caller sorts);
    the curve is monotone non-increasing in the kept fraction and its
    last point equals the XEB of the full set.
    """
    probs = np.asarray(probs_desc, dtype=float)
    if probs.size == 0:
        raise EmptyInput("no probabilities")
    if np.any(np.diff(probs) > 0):
        raise NotSorted("probabilities must be sorted descending")
    L = probs.size
    ks = sorted({1, L} | {max(1, math.ceil(L * i / points)) for i in range(1, points + 1)})
    csum = np.cumsum(probs)
    out = []
    for k in ks:
        f = (2.0**n / k) * float(csum[k - 1]) - 1.0
        out.append((k / L, f))
    return out


def mixed_xeb(known_probs, n: int, num_random: int) -> float:
    """Expected XEB after mixing known-probability bitstrings with
    uniform-random ones (whose expected 2^n * p is 1)."""
    known_probs = np.asarray(known_probs, dtype=float)
    k = known_probs.size
    if k == 0 and num_random == 0:
        raise EmptyInput("nothing to mix")
    if k == 0:
        return 0.0
    f_known = xeb(known_probs, n).f_xeb
    return k * f_known / (k + num_random)


def marginal_and_conditional(table):
    """Marginal P(s1), the conditional distribution over s2, and its XEB.

    The conditional probabilities are exact and fully enumerated, so
    their XEB (with n replaced by the open-qubit count) is zero up to
    floating-point summation error.
    """
    probs = np.asarray(table.probabilities, dtype=float)
    n2 = len(table.open_qubits)
    if probs.size != 1 << n2:
        raise IncompleteEnumeration(
            f"{probs.size} rows but 2^{n2} assignments expected"
        )
    marginal = float(probs.sum())
    if marginal == 0.0:
        raise ZeroMarginal("P(s1) = 0; conditional undefined")
    conditional = probs / marginal
    f = xeb(conditional, n2).f_xeb
    return marginal, conditional, f
