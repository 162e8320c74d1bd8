"""Figure rendering for benchmark and certification reports.

Figures are written straight to files (Agg backend); they accompany the
delimited/JSON output of the CLI rather than opening windows.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .gapbench import GapRecord
from .ptas import CertifyReport


def gap_convergence_figure(records: Sequence[GapRecord], path) -> None:
    """Measured cost ratio per t against the limiting ratio (2t+1)/(t+1)."""
    ts = [r.t for r in records]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ts, [r.ratio for r in records], "o-", label="measured ratio")
    ax.plot(ts, [r.limit for r in records], "s--", label="limit (2t+1)/(t+1)")
    ax.axhline(2.0, color="gray", lw=0.8, ls=":", label="gap bound 2")
    ax.set_xlabel("t (paid pairs)")
    ax.set_ylabel("non-adaptive / adaptive expected cost")
    m = records[0].m if records else 0
    eps = records[0].eps if records else 0.0
    ax.set_title(f"Adaptivity gap benchmark (m={m}, eps={eps:g})")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def certify_tails_figure(report: CertifyReport, path) -> None:
    """Rebuilt-policy tails against the dilated reference tails over the window."""
    ells = [pair[0] for pair in report.pairs]
    lhs = [pair[1] for pair in report.pairs]
    rhs = [pair[2] for pair in report.pairs]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.step(ells, lhs, where="post", label="Pr[cost(policy) >= l]")
    ax.step(
        ells,
        rhs,
        where="post",
        ls="--",
        label="Pr[dilated reference cost >= l]",
    )
    ax.set_xlabel("threshold l")
    ax.set_ylabel("probability")
    verdict = "holds" if report.passed else "VIOLATED"
    ax.set_title(
        f"Window [{report.a}, {report.a_prime}], eps={report.eps}: bound {verdict}"
    )
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
