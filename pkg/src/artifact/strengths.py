"""Strength calculus for quasi-independent error/flag distributions.

A family of bit positions is quasi-independent with strength
``{f, delta_f, delta_nf}`` when, for any disjoint position sets J
(unflagged positions with errors), K (flagged positions) and L ⊆ K
(flagged positions with errors), the joint probability is at most
``delta_nf^|J| * delta_f^|L| * f^(|K|-|L|)``.

`decode_strengths` maps the strength triple of a C4 group's four inputs to
the strength triple of the decoded output bit; `verify_quasi_independence`
checks the defining bound exhaustively for small explicit distributions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, Tuple


@dataclass(frozen=True)
class StrengthTriple:
    """Upper bounds: f on flagging, delta_f on error given flagged,
    delta_nf on error given unflagged.  Independent bounds — delta_f ≤ f
    is not required."""

    f: float
    delta_f: float
    delta_nf: float

    def __post_init__(self) -> None:
        for name in ("f", "delta_f", "delta_nf"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0,1], got {v}")


@dataclass(frozen=True)
class JointPattern:
    """Explicit joint distribution over (error-vector, flag-vector) pairs
    for n ≤ 6 positions.  Keys are tuples of two n-bit tuples."""

    n: int
    probabilities: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], float]

    def __post_init__(self) -> None:
        if self.n > 6:
            raise ValueError("n must be <= 6 for exhaustive verification")
        total = 0.0
        for (u, v), p in self.probabilities.items():
            if len(u) != self.n or len(v) != self.n:
                raise ValueError("pattern vectors must have length n")
            if p < 0:
                raise ValueError("probabilities must be nonnegative")
            total += p
        if not math.isclose(total, 1.0, abs_tol=1e-12):
            raise ValueError(f"probabilities must sum to 1, got {total}")


def decode_strengths(inp: StrengthTriple) -> StrengthTriple:
    """Strength triple of a decoded C4 group given the per-input triple.

    The output flagging strength collects the unlocated-error and
    double-flag events; the flagged-error strength collects the cases
    where a flagged block still decodes incorrectly; the unflagged-error
    strength requires two unflagged errors or a flag conspiring with an
    unflagged error.
    """
    f, df, dnf = inp.f, inp.delta_f, inp.delta_nf
    f_out = 4.0 * dnf + 4.0 * f * f
    df_out = 2.0 * dnf + 4.0 * f * df + 4.0 * f * f * (2.0 * dnf + 3.0 * df)
    dnf_out = 4.0 * dnf * dnf + 8.0 * f * dnf
    return StrengthTriple(
        f=min(f_out, 1.0), delta_f=min(df_out, 1.0), delta_nf=min(dnf_out, 1.0)
    )


def verify_quasi_independence(dist: JointPattern, strengths: StrengthTriple) -> bool:
    """Exhaustively check the quasi-independence bound.

    For every disjoint choice of position sets J, K and every L ⊆ K, sum
    the probability of all (error, flag) patterns with errors on all of J
    (J unflagged), flags on all of K, and errors on all of L; compare
    against delta_nf^|J| * delta_f^|L| * f^(|K|-|L|).
    """
    n = dist.n
    positions = range(n)
    # Marginal-style sums: patterns are *consistent* with (J, K, L) when
    # every J position has an error and no flag, every K position has a
    # flag, and every L position has an error.
    for jk in itertools.product((0, 1, 2), repeat=n):
        # 0: unconstrained, 1: in J, 2: in K
        J = [p for p in positions if jk[p] == 1]
        K = [p for p in positions if jk[p] == 2]
        for l_mask in itertools.product((0, 1), repeat=len(K)):
            L = [k for k, m in zip(K, l_mask) if m]
            bound = (
                strengths.delta_nf ** len(J)
                * strengths.delta_f ** len(L)
                * strengths.f ** (len(K) - len(L))
            )
            total = 0.0
            for (u, v), p in dist.probabilities.items():
                if any(not u[j] or v[j] for j in J):
                    continue
                if any(not v[k] for k in K):
                    continue
                if any(not u[l] for l in L):
                    continue
                total += p
            if total > bound + 1e-12:
                return False
    return True
