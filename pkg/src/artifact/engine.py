"""Analytic level-reduction pipeline.

Computes conditional noise profiles of recursively prepared encoded Bell
pairs (j-BPs), the effective noise strength of the teleportation-protected
transversal CNOT gadget, threshold scans over the fundamental noise
strength, ancilla-decoding bounds, and resource-overhead formulas.

Conventions:

- A level-j profile stores, per error type m ∈ {x, z}, the conditional
  strengths ε_σm(i, j | j) for i = 0..j (index i = list position).
- All bounds are clamped at 1.  When the acceptance lower bound for a
  preparation step is ≤ 0, the recursion has diverged: the step returns a
  vacuous all-ones profile, zero acceptance, and a trace marked diverged.
- Under independent depolarizing noise the per-type strength is
  ε₁ = (8/15)·ε; the engine substitutes ε₁ for ε throughout, so the two
  noise models share every code path and their thresholds differ by
  exactly the factor 15/8.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .strengths import StrengthTriple, decode_strengths

TYPES = ("x", "z")

# Worst-case counts of faulty locations that can feed a single output qubit
# (c1) or a single measured qubit (c2) of a level-1 Bell-pair preparation,
# per error type, for the standard circuit orientation.
C1 = {"x": 1.0, "z": 2.0}
C2 = {"x": 4.0, "z": 3.0}
# Gadget counterparts, per (output role, error type): control-x and
# target-z errors copy forward through the transversal CNOT.
C3 = {("c", "x"): 2.0, ("t", "z"): 2.0, ("c", "z"): 3.0, ("t", "x"): 3.0}

# Operation count of the level-1 Bell-pair preparation circuit: 12 base
# Bell pairs (3 ops each) + 20 CNOTs + 16 measurements.
BP1_OPS = 72

PHI = (1.0 + math.sqrt(5.0)) / 2.0

# Effective-noise certificate: a level-10 effective strength at or below
# this previously established threshold value certifies being below
# threshold (the concatenation can be completed by a scheme proven to
# converge from this strength).
CERTIFICATE_EPS = 1.26e-4
CERTIFICATE_LEVEL = 10


class NoiseModel(enum.Enum):
    LocalStochastic = "local-stochastic"
    IndependentDepolarizing = "depolarizing"


class Orientation(enum.Enum):
    Standard = "standard"
    Reversed = "reversed"


@dataclass(frozen=True)
class NoiseParams:
    epsilon: float
    model: NoiseModel = NoiseModel.LocalStochastic

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0,1], got {self.epsilon}")

    @property
    def effective(self) -> float:
        """Per-type strength fed to the recursion (ε, or 8/15·ε for
        depolarizing noise)."""
        if self.model is NoiseModel.IndependentDepolarizing:
            return (8.0 / 15.0) * self.epsilon
        return self.epsilon


@dataclass(frozen=True)
class CnotCoefficients:
    c1: Dict[str, float] = field(default_factory=lambda: dict(C1))
    c2: Dict[str, float] = field(default_factory=lambda: dict(C2))
    c3: Dict[Tuple[str, str], float] = field(default_factory=lambda: dict(C3))
    orientation: Orientation = Orientation.Standard

    def effective_c1(self, m: str) -> float:
        return self.c1[_swap(m)] if self.orientation is Orientation.Reversed else self.c1[m]

    def effective_c2(self, m: str) -> float:
        return self.c2[_swap(m)] if self.orientation is Orientation.Reversed else self.c2[m]


def _swap(m: str) -> str:
    return "z" if m == "x" else "x"


@dataclass
class NoiseProfile:
    """Conditional strengths ε_σm(i, j | j), i = 0..level_j, per type."""

    level_j: int
    strengths: Dict[str, List[float]]

    def __post_init__(self) -> None:
        for m in TYPES:
            if len(self.strengths[m]) != self.level_j + 1:
                raise ValueError(
                    f"profile at level {self.level_j} needs {self.level_j + 1} "
                    f"entries per type"
                )

    def top(self, m: str) -> float:
        return self.strengths[m][-1]


@dataclass
class RecursionTrace:
    """Per-level intermediate quantities of one recursion step, flattened
    to (level, type, quantity-name, value) rows for CSV emission."""

    rows: List[Tuple[int, str, str, float]] = field(default_factory=list)
    acceptance: float = 1.0
    diverged: bool = False

    def add(self, level: int, qtype: str, name: str, value: float) -> None:
        self.rows.append((level, qtype, name, value))

    def csv_lines(self) -> List[str]:
        out = ["level,type,quantity-name,value"]
        for level, qtype, name, value in self.rows:
            out.append(f"{level},{qtype},{name},{value:.5e}")
        return out


@dataclass
class ThresholdResult:
    """Bisection output of `threshold_scan`.

    `lo`/`hi` bracket the certified threshold: the largest ε for which the
    recursion stays well defined through `j_max` levels and the level-10
    effective strength falls at or below the certificate value
    ``CERTIFICATE_EPS``.  `strict_lo`/`strict_hi` bracket the (smaller)
    largest ε for which ε_css(j) is strictly decreasing over j = 1..j_max.
    """

    lo: float
    hi: float
    strict_lo: float
    strict_hi: float
    model: NoiseModel
    j_max: int

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def strict_midpoint(self) -> float:
        return 0.5 * (self.strict_lo + self.strict_hi)


class EngineError(Exception):
    """Raised for domain violations in the analytic pipeline."""


def _clamp(v: float) -> float:
    return min(v, 1.0)


def bp0_profile(params: NoiseParams) -> NoiseProfile:
    """Level-0 Bell-pair profile.

    A base Bell pair is two preparations and one CNOT; conditioning on
    the pair's stabilizers makes same-type errors on the two halves
    equivalent, so the per-half strength is bounded by the single largest
    contribution ε rather than the naive 2ε.
    """
    e = params.effective
    return NoiseProfile(level_j=0, strengths={m: [_clamp(e)] for m in TYPES})


def bp1_profile(params: NoiseParams) -> Tuple[NoiseProfile, float]:
    """Level-1 Bell-pair profile and its acceptance lower bound.

    Level-0 noise on the outputs: each output qubit sees its own location
    plus c₁ propagated locations; the c₁ coefficient is improved by noting
    that the leading propagation terms cancel against the postselection
    unless a second fault occurs, leaving c₁' = 16·ε(0,0) + 16ε for type-x
    and 1 + that for type-z.

    Level-1 noise comes from decoding the two transversal Bell
    measurements: each measured qubit sees 4 locations of its own plus c₂
    propagated, giving the pre-decoding strength b(0,1); one application
    of the strength map yields the unflagged block-level error, and the
    flagged branch is removed by postselection.  Acceptance is bounded by
    all 72 operations being fault-free; all conditional strengths are
    divided by it.
    """
    e = params.effective
    eps00 = bp0_profile(params).strengths
    p1 = (1.0 - e) ** BP1_OPS
    strengths: Dict[str, List[float]] = {}
    for m in TYPES:
        b01 = _clamp(4.0 * e + C2[m] * eps00[m][0])
        dec = decode_strengths(StrengthTriple(0.0, 0.0, b01))
        c1_improved = 16.0 * eps00[m][0] + 16.0 * e
        if m == "z":
            c1_improved += 1.0
        eps01 = _clamp(e + c1_improved * eps00[m][0])
        if p1 <= 0.0:
            strengths[m] = [1.0, 1.0]
        else:
            strengths[m] = [_clamp(eps01 / p1), _clamp(dec.delta_nf / p1)]
    return NoiseProfile(level_j=1, strengths=strengths), max(p1, 0.0)


def _chain(
    start_nf: float,
    additives: List[float],
    final_bare_decode: bool,
) -> Tuple[StrengthTriple, List[StrengthTriple]]:
    """Iterate the strength map from {0, 0, start_nf}.

    Each listed additive a_i is applied after the i-th decoding step, to
    both the flagged and unflagged error branches (propagated lower-level
    noise lands on the measured qubits regardless of flag state).  When
    `final_bare_decode`, one more decoding step follows with no additive.
    Returns the final triple and the per-step triples (post-additive).
    """
    cur = StrengthTriple(0.0, 0.0, _clamp(start_nf))
    steps: List[StrengthTriple] = []
    for a in additives:
        dec = decode_strengths(cur)
        cur = StrengthTriple(
            f=dec.f,
            delta_f=_clamp(dec.delta_f + a),
            delta_nf=_clamp(dec.delta_nf + a),
        )
        steps.append(cur)
    if final_bare_decode:
        cur = decode_strengths(cur)
        steps.append(cur)
    return cur, steps


def bpj_step(
    prev: NoiseProfile,
    params: NoiseParams,
    orientation: CnotCoefficients,
    include_subblock_teleport: bool,
) -> Tuple[NoiseProfile, float, RecursionTrace]:
    """One level of the Bell-pair recursion: build a j-BP from (j−1)-BPs.

    Per error type m:

    - Block teleportation: the measured qubits start at
      b(0) ≤ 4ε + c₂m·ε(0, j−1); each decoding level adds the propagated
      input-Bell-pair noise c₂m·ε(i+1, j−1); the final decoding has no
      additive and its unflagged branch is the new top-level strength
      (the flagged branch is removed by postselection).
    - Subblock teleportation (j ≥ 3): same shape with start
      3ε + (1+c₁m)·ε(0, j−1) and additives (1+c₁m)·ε(i+1, j−1); the level
      j−1 strength combines the decode chain's unflagged output with the
      unmeasured partner's inherited ε(j−1, j−1).
    - j = 2 (no subblock teleportation): the output subblocks keep their
      inherited noise refreshed only by the final transversal CNOT, so
      level 0 carries ε + c₁m·ε(0,1) and level 1 carries c₁m·ε(1,1) —
      the level-1 analogues of the output-qubit propagation count.
    - Acceptance: p(j|j−1) ≥ 1 − Σ_m (2·f^b_m + 8·f^s_m); every level of
      the profile is divided by it.
    """
    j = prev.level_j + 1
    if j < 2:
        raise EngineError("bpj_step requires a previous profile at level >= 1")
    e = params.effective
    trace = RecursionTrace()
    new_levels: Dict[str, List[float]] = {}
    fb: Dict[str, float] = {}
    fs: Dict[str, float] = {}
    raw: Dict[str, List[float]] = {}
    for m in TYPES:
        ep = prev.strengths[m]
        c1m = orientation.effective_c1(m)
        c2m = orientation.effective_c2(m)

        b_start = 4.0 * e + c2m * ep[0]
        b_add = [c2m * ep[i + 1] for i in range(j - 1)]
        b_final, b_steps = _chain(b_start, b_add, final_bare_decode=True)
        fb[m] = b_final.f
        top = b_final.delta_nf
        trace.add(0, m, "b_nf", _clamp(b_start))
        for i, st in enumerate(b_steps):
            trace.add(i + 1, m, "b_f", st.f)
            trace.add(i + 1, m, "b_and_f", st.delta_f)
            trace.add(i + 1, m, "b_and_nf", st.delta_nf)

        if include_subblock_teleport:
            s_start = 3.0 * e + (1.0 + c1m) * ep[0]
            s_add = [(1.0 + c1m) * ep[i + 1] for i in range(j - 1)]
            s_final, s_steps = _chain(s_start, s_add, final_bare_decode=False)
            fs[m] = s_final.f
            e_jm1 = _clamp(s_final.delta_nf + ep[j - 1])
            lower = list(ep[: j - 1])
            trace.add(0, m, "s_nf", _clamp(s_start))
            for i, st in enumerate(s_steps):
                trace.add(i + 1, m, "s_f", st.f)
                trace.add(i + 1, m, "s_and_f", st.delta_f)
                trace.add(i + 1, m, "s_and_nf", st.delta_nf)
        else:
            if j != 2:
                raise EngineError(
                    "subblock teleportation may be omitted only at level 2"
                )
            fs[m] = 0.0
            e_jm1 = _clamp(c1m * ep[1])
            lower = [_clamp(e + c1m * ep[0])]

        raw[m] = lower + [e_jm1, _clamp(top)]

    p = 1.0 - sum(2.0 * fb[m] + 8.0 * fs[m] for m in TYPES)
    trace.acceptance = max(p, 0.0)
    for m in TYPES:
        trace.add(j, m, "f_block", fb[m])
        trace.add(j, m, "f_subblock", fs[m])
    if p <= 0.0:
        trace.diverged = True
        new_levels = {m: [1.0] * (j + 1) for m in TYPES}
        return NoiseProfile(level_j=j, strengths=new_levels), 0.0, trace
    for m in TYPES:
        new_levels[m] = [_clamp(v / p) for v in raw[m]]
    return NoiseProfile(level_j=j, strengths=new_levels), p, trace


def build_profile(
    params: NoiseParams, j_max: int
) -> List[Tuple[NoiseProfile, float]]:
    """Chain the recursion from level 0 through `j_max`.

    Orientation alternates with level parity (the level-j preparation
    circuit is mirrored, swapping x and z propagation counts, at even j);
    subblock teleportations are included from level 3 on.  A diverged
    level yields vacuous all-ones profiles from that level up.
    """
    if not 0 <= j_max <= 16:
        raise EngineError("j_max must lie in 0..16")
    out: List[Tuple[NoiseProfile, float]] = [(bp0_profile(params), 1.0)]
    if j_max == 0:
        return out
    out.append(bp1_profile(params))
    prof = out[-1][0]
    for j in range(2, j_max + 1):
        orientation = CnotCoefficients(
            orientation=Orientation.Reversed if j % 2 == 0 else Orientation.Standard
        )
        prof, p, _ = bpj_step(
            prof, params, orientation, include_subblock_teleport=(j >= 3)
        )
        out.append((prof, p))
    return out


def gadget_noise(
    profile: NoiseProfile, params: NoiseParams
) -> Tuple[float, RecursionTrace]:
    """Effective noise strength of the level-j transversal-CNOT gadget.

    Per output role (control/target) and error type: the measured qubits
    of the output teleportations see at most 3 locations of their own
    (two gadget-level CNOTs and the measurement) plus c₃ propagated input
    Bell-pair locations; the decode chain runs with additive c₃·ε(i+1)
    at each level, including the top.  Gadget measurements are accepted
    whether or not a flag is raised, so the top-level strength is the sum
    of the flagged and unflagged branches.  ε_css sums the four
    (role, type) contributions.
    """
    e = params.effective
    j = profile.level_j
    trace = RecursionTrace()
    eps_css = 0.0
    for role in ("c", "t"):
        for m in TYPES:
            ep = profile.strengths[m]
            c3 = C3[(role, m)]
            start = 3.0 * e + c3 * ep[0]
            adds = [c3 * ep[i + 1] for i in range(j)]
            final, steps = _chain(start, adds, final_bare_decode=False)
            r_top = _clamp(final.delta_f + final.delta_nf)
            eps_css += r_top
            qt = f"{role}{m}"
            trace.add(0, qt, "r_nf", _clamp(start))
            for i, st in enumerate(steps):
                trace.add(i + 1, qt, "r_f", st.f)
                trace.add(i + 1, qt, "r_and_f", st.delta_f)
                trace.add(i + 1, qt, "r_and_nf", st.delta_nf)
            trace.add(j, qt, "r_top", r_top)
    eps_css = _clamp(eps_css)
    trace.add(j, "xz", "eps_css", eps_css)
    return eps_css, trace


def measurement_error_bound(profile: NoiseProfile) -> Dict[str, float]:
    """Logical-error bound for a noiseless transversal measurement of a
    block carrying the given conditional noise profile.

    Chains the strength map over the block's levels, adding each level's
    strength after the decoding step that surfaces it; no postselection
    is applied, so the bound sums the flagged and unflagged branches.
    """
    out: Dict[str, float] = {}
    for m in TYPES:
        ep = profile.strengths[m]
        cur = StrengthTriple(0.0, 0.0, _clamp(ep[0]))
        for i in range(1, profile.level_j + 1):
            dec = decode_strengths(cur)
            cur = StrengthTriple(
                f=dec.f,
                delta_f=_clamp(dec.delta_f + ep[i]),
                delta_nf=_clamp(dec.delta_nf + ep[i]),
            )
        out[m] = _clamp(cur.delta_f + cur.delta_nf)
    return out


def css_curve(params: NoiseParams, j_max: int) -> List[Tuple[int, float, float]]:
    """(j, ε_css(j), acceptance p(j|j−1)) for j = 1..j_max."""
    prof = build_profile(params, j_max)
    out = []
    for j in range(1, j_max + 1):
        profile, p = prof[j]
        eps_css, _ = gadget_noise(profile, params)
        out.append((j, eps_css, p))
    return out


def _certified_ok(eps: float, model: NoiseModel, j_max: int) -> bool:
    params = NoiseParams(epsilon=eps, model=model)
    level = min(j_max, CERTIFICATE_LEVEL) if j_max >= CERTIFICATE_LEVEL else j_max
    prof = build_profile(params, j_max)
    if any(p <= 0.0 for _, p in prof[1:]):
        return False
    eps_css, _ = gadget_noise(prof[level][0], params)
    return eps_css <= CERTIFICATE_EPS


def _strict_ok(eps: float, model: NoiseModel, j_max: int) -> bool:
    params = NoiseParams(epsilon=eps, model=model)
    curve = css_curve(params, j_max)
    if any(p <= 0.0 for _, _, p in curve):
        return False
    return all(curve[k][1] < curve[k - 1][1] for k in range(1, len(curve)))


def _bisect(pred, lo: float, hi: float, tolerance: float) -> Tuple[float, float]:
    if not pred(lo):
        raise EngineError("non-bracketing: predicate fails at the lower bound")
    if pred(hi):
        raise EngineError("non-bracketing: predicate holds at the upper bound")
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def threshold_scan(
    model: NoiseModel, j_max: int = 10, tolerance: float = 1e-5
) -> ThresholdResult:
    """Bisect for the threshold noise strength.

    Two operational criteria are scanned and reported:

    - certified: the recursion stays well defined through `j_max` levels
      and ε_css(10) falls at or below the previously established
      threshold value 1.26×10⁻⁴, certifying convergence.
    - strict: ε_css(j) is strictly decreasing over j = 1..j_max.  This is
      more conservative; near the certified threshold a transient bump at
      small j can precede a steep decrease.
    """
    if j_max < 5:
        raise EngineError("j_max must be >= 5 for a meaningful scan")
    # The engine depends on ε only through the effective per-type strength,
    # so bisect in effective units and rescale; the depolarizing threshold
    # is then exactly 15/8 times the local-stochastic one by construction.
    scale = 15.0 / 8.0 if model is NoiseModel.IndependentDepolarizing else 1.0
    lo0, hi0 = 1e-6, 5e-3
    # One shared effective-unit grid for both models keeps the reported
    # thresholds in the exact ratio 15/8 while honoring the width bound.
    eff_tol = tolerance * 8.0 / 15.0
    local = NoiseModel.LocalStochastic
    lo, hi = _bisect(lambda x: _certified_ok(x, local, j_max), lo0, hi0, eff_tol)
    slo, shi = _bisect(lambda x: _strict_ok(x, local, j_max), lo0, hi0, eff_tol)
    return ThresholdResult(
        lo=lo * scale,
        hi=hi * scale,
        strict_lo=slo * scale,
        strict_hi=shi * scale,
        model=model,
        j_max=j_max,
    )


def ancilla_bounds(params: NoiseParams, j: int) -> Tuple[float, float, float]:
    """Bounds on decoding a level-j encoded state down to an ancilla qubit.

    The decoding circuit teleports subblocks down one level at a time;
    summing the gadget-style flag and unflagged-error strengths over the
    levels below j and over both roles and types gives

        f_dec(j) ≤ 3·Σ_{role,m} Σ_{i=1}^{j−1} f^r_σm(i, i | i)
        ε_dec(j) ≤ 3·Σ_{role,m} Σ_{i=1}^{j−1} r_σm(i, i ∧ ¬f | i) + 3ε
        ε_anc(j) ≤ 4ε + ε_dec / (1 − f_dec)

    The explicit 3ε and 4ε terms count bare physical locations, so they
    use the full ε for either noise model.
    """
    if j < 1:
        raise EngineError("j must be >= 1")
    e_bare = params.epsilon
    profiles = build_profile(params, max(j - 1, 1))
    f_dec = 0.0
    r_sum = 0.0
    for i in range(1, j):
        profile, _ = profiles[i]
        _, trace = gadget_noise(profile, params)
        for level, qt, name, value in trace.rows:
            if level == i and name == "r_f":
                f_dec += 3.0 * value
            if level == i and name == "r_and_nf":
                r_sum += 3.0 * value
    eps_dec = _clamp(r_sum + 3.0 * e_bare)
    if f_dec >= 1.0:
        raise EngineError("flag bound f_dec >= 1: decoding bound is vacuous")
    eps_anc = _clamp(4.0 * e_bare + eps_dec / (1.0 - f_dec))
    return f_dec, eps_dec, eps_anc


def fibonacci(j: int) -> int:
    """The distance-growth sequence: F(1) = 1, F(2) = 2,
    F(j+1) = F(j) + F(j−1)."""
    if j < 1:
        raise EngineError("fibonacci requires j >= 1")
    a, b = 1, 2
    for _ in range(j - 1):
        a, b = b, a + b
    return a


def fibonacci_asymptote(j: int) -> float:
    """Asymptotic estimate φ^(j+2) / (φ + 2) of fibonacci(j)."""
    return PHI ** (j + 2) / (PHI + 2.0)


@dataclass(frozen=True)
class OverheadParams:
    r_count: int = 20
    s_count: int = 28
    t_count: int = 32
    n: int = 4
    ell: float = 2.0

    def __post_init__(self) -> None:
        if self.r_count == self.n:
            raise ValueError("r_count = n makes the closed forms singular")


def overhead(
    params: OverheadParams,
    j: int,
    L: Optional[float] = None,
    epsilon: Optional[float] = None,
    eps0: float = 0.67e-3,
) -> Tuple[int, int, int, Optional[float]]:
    """Resource counts of a level-j Bell-pair preparation.

    B(j) Bell-pair inputs, C(j) logical CNOTs, M(j) logical measurements,
    evaluated both by recursion and closed form (they must agree):

        B(j) = r^(j−1)
        C(j) = s·(r^(j−1) − n^(j−1)) / (r − n)
        M(j) = t·(r^(j−1) − n^(j−1)) / (r − n)

    When a circuit size L and noise strength ε are given, also returns the
    polylog overhead-factor estimate
    (log(L·ε₀) / log(ε₀/ε))^(log ℓ / log φ).
    """
    if j < 1:
        raise EngineError("overhead requires j >= 1")
    r, s, t, n = params.r_count, params.s_count, params.t_count, params.n
    B, C, M = 1, 0, 0
    for k in range(2, j + 1):
        B, C, M = r * B, r * C + s * n ** (k - 2), r * M + t * n ** (k - 2)
    geo = (r ** (j - 1) - n ** (j - 1)) // (r - n)
    closed = (r ** (j - 1), s * geo, t * geo)
    if (B, C, M) != closed:
        raise EngineError(
            f"recursion/closed-form disagreement at j={j}: {(B, C, M)} vs {closed}"
        )
    factor: Optional[float] = None
    if L is not None and epsilon is not None:
        if not 0 < epsilon < eps0:
            raise EngineError("overhead factor requires 0 < epsilon < eps0")
        factor = (math.log(L * eps0) / math.log(eps0 / epsilon)) ** (
            math.log(params.ell) / math.log(PHI)
        )
    return B, C, M, factor


def parallel_multipliers() -> Tuple[float, float]:
    """Space multipliers for pipelined preparation: consecutive-level
    Bell-pair counts grow by φ per step, so preparing the next batch in
    parallel costs φ (one level ahead) and φ² (two levels ahead)."""
    return PHI, PHI * PHI
