"""Vectorised Pauli-frame Monte Carlo simulator.

Simulates the recursive Bell-pair preparation circuits, the
teleportation-protected transversal CNOT gadget, and the measurement-noise
purification circuit under independent depolarizing noise, tracking only
classical error frames (sufficient for Clifford circuits with Pauli
noise).

Frame conventions:

- Physical faults accumulate in per-qubit x/z bit arrays; a CNOT
  propagates x bits control→target and z bits target→control, and its own
  fault (one of the 15 two-qubit Paulis, probability ε/15 each) is applied
  after the gate.
- Preparation and measurement faults are flips of the applicable type
  with probability (8/15)·ε (the rate a purified preparation achieves).
- Teleportation corrections are never applied as gates.  When a decoded
  Bell-measurement outcome differs from the zero-noise reference, the
  miscorrection is recorded as a logical-operator pattern in a separate
  injection layer keyed by the teleportation's level.  Injection layers
  propagate through gates exactly like the physical frame and are summed
  into measured bits, but are kept apart so that per-level logical error
  rates can be read off directly.

Trial semantics: one trial is one attempt of the circuit's own scope with
*accepted* inputs — rejected sub-preparations are resampled, mirroring
physical restart, so the reported acceptance and error rates are exactly
the conditional quantities the analytic recursion bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .c4 import MeasurementBasis
from .engine import NoiseParams

# 0-based positions, within a block of 4, of the base Bell pairs making up
# the two logical preparation states: |0⟩ pairs (1,3),(2,4); |+⟩ pairs
# (1,2),(3,4).
ZERO_PAIRS = ((0, 2), (1, 3))
PLUS_PAIRS = ((0, 1), (2, 3))

PREP_MEAS_FACTOR = 8.0 / 15.0


class Mode:
    PostselectBP = "postselect-bp"
    GadgetAccept = "gadget-accept"


@dataclass
class Teleport:
    """Bookkeeping for one logical teleportation's Bell measurement."""

    x_block: List[int]  # measured in the x basis; decode errors inject Z
    z_block: List[int]  # measured in the z basis; decode errors inject X
    target: List[int]
    level: int
    role: str = "bp"


@dataclass
class SubPrep:
    """A postselected sub-circuit whose output blocks feed parent qubits."""

    circuit: "Circuit"
    targets: List[List[int]]  # parent ids per sub output block


@dataclass
class Circuit:
    name: str
    j: int
    kind: str  # 'bp' | 'gadget' | 'purify'
    n_qubits: int
    ops: List[Tuple]  # ('prep_plus'|'prep_zero', q) | ('cnot', c, t)
    #                 | ('measure_x'|'measure_z', q) | ('decode', k)
    teleports: List[Teleport] = field(default_factory=list)
    sub_preps: List[SubPrep] = field(default_factory=list)
    out_blocks: List[List[int]] = field(default_factory=list)

    @property
    def op_count(self) -> int:
        own = sum(1 for op in self.ops if op[0] != "decode")
        return own + sum(sp.circuit.op_count for sp in self.sub_preps)


@dataclass
class SimStats:
    circuit: str
    j: int
    epsilon: float
    trials: int
    accepted: int
    rates: Dict[str, Tuple[float, float]]  # name -> (rate, 95% halfwidth)

    @property
    def acceptance_rate(self) -> float:
        return self.rates["acceptance"][0]

    def csv_lines(self) -> List[str]:
        out = ["circuit,j,epsilon,trials,accepted,rate-name,rate,halfwidth"]
        for name, (rate, hw) in self.rates.items():
            out.append(
                f"{self.circuit},{self.j},{self.epsilon:.5e},{self.trials},"
                f"{self.accepted},{name},{rate:.5e},{hw:.5e}"
            )
        return out


# ---------------------------------------------------------------------------
# Circuit builders


def _bp0_ops(a: int, b: int, dual: bool) -> List[Tuple]:
    if dual:
        return [("prep_zero", a), ("prep_plus", b), ("cnot", b, a)]
    return [("prep_plus", a), ("prep_zero", b), ("cnot", a, b)]


def build_bp_circuit(j: int, orientation: Optional[str] = None) -> Circuit:
    """Level-j Bell-pair preparation circuit.

    j=0 is a bare Bell pair; j=1 teleports an inner encoded Bell pair
    through two auxiliary encoded pairs; j≥2 repeats the same shape one
    level up with (j−1)-BP inputs, adding a final teleportation of every
    level-(j−1) subblock at j=3.  `orientation` 'standard'/'reversed'
    selects the circuit or its x↔z mirror; default follows level parity
    (reversed at even j).
    """
    if j not in (0, 1, 2, 3):
        raise ValueError(f"unsupported level {j}")
    dual = (j % 2 == 0 and j > 0) if orientation is None else orientation == "reversed"
    if j == 0:
        ops = _bp0_ops(0, 1, dual)
        return Circuit(
            name="bp", j=0, kind="bp", n_qubits=2, ops=ops, out_blocks=[[0], [1]]
        )
    return _build_bp_level(j, dual)


def _prep_pairs(dual: bool, plus_role: bool) -> Tuple[Tuple[int, int], ...]:
    if plus_role != dual:
        return PLUS_PAIRS
    return ZERO_PAIRS


def _build_bp_level(L: int, dual: bool) -> Circuit:
    size = 4 ** L
    blocks = {name: list(range(i * size, (i + 1) * size)) for i, name in
              enumerate(("I1", "I2", "A1", "A2", "B1", "B2"))}
    n_qubits = 6 * size
    ops: List[Tuple] = []
    teleports: List[Teleport] = []
    sub_preps: List[SubPrep] = []

    def prep_block(block: List[int], plus_role: bool) -> None:
        pairs = _prep_pairs(dual, plus_role)
        if L == 1:
            for a, b in pairs:
                ops.extend(_bp0_ops(block[a], block[b], dual))
        else:
            sub = build_bp_circuit(L - 1)
            sub_size = 4 ** (L - 1)
            subblocks = [block[s * sub_size : (s + 1) * sub_size] for s in range(4)]
            for a, b in pairs:
                sub_preps.append(
                    SubPrep(circuit=sub, targets=[subblocks[a], subblocks[b]])
                )

    def enc_pair(P: List[int], Q: List[int]) -> None:
        # P carries the |+⟩-role state and acts as the encoding CNOT's
        # control (all swapped when dual), joining the halves into an
        # encoded Bell pair.  For the auxiliary pairs P is the *output*
        # half: errors on the measured half then propagate outward to the
        # measurement or onto the output, never the other way, which is
        # what keeps the measured-qubit propagation counts at c₂.
        prep_block(P, plus_role=True)
        prep_block(Q, plus_role=False)
        if dual:
            ops.extend(("cnot", Q[i], P[i]) for i in range(len(P)))
        else:
            ops.extend(("cnot", P[i], Q[i]) for i in range(len(P)))

    def bell(P: List[int], Q: List[int], target: List[int], level: int,
             role: str = "bp") -> None:
        if dual:
            ops.extend(("cnot", Q[i], P[i]) for i in range(len(P)))
            ops.extend(("measure_z", q) for q in P)
            ops.extend(("measure_x", q) for q in Q)
            tele = Teleport(x_block=Q, z_block=P, target=target, level=level,
                            role=role)
        else:
            ops.extend(("cnot", P[i], Q[i]) for i in range(len(P)))
            ops.extend(("measure_x", q) for q in P)
            ops.extend(("measure_z", q) for q in Q)
            tele = Teleport(x_block=P, z_block=Q, target=target, level=level,
                            role=role)
        teleports.append(tele)
        ops.append(("decode", len(teleports) - 1))

    enc_pair(blocks["I1"], blocks["I2"])
    enc_pair(blocks["A2"], blocks["A1"])
    enc_pair(blocks["B2"], blocks["B1"])
    bell(blocks["I1"], blocks["A1"], blocks["A2"], level=L)
    bell(blocks["I2"], blocks["B1"], blocks["B2"], level=L)

    out_blocks = [blocks["A2"], blocks["B2"]]
    if L >= 3:
        # Final teleportation of each level-(L−1) subblock of both outputs.
        sub = build_bp_circuit(L - 1)
        sub_size = 4 ** (L - 1)
        new_out: List[List[int]] = []
        next_id = n_qubits
        for block in out_blocks:
            fresh: List[int] = []
            for s in range(4):
                h1 = list(range(next_id, next_id + sub_size))
                h2 = list(range(next_id + sub_size, next_id + 2 * sub_size))
                next_id += 2 * sub_size
                sub_preps.append(SubPrep(circuit=sub, targets=[h1, h2]))
                bell(block[s * sub_size : (s + 1) * sub_size], h1, h2,
                     level=L - 1, role="subblock")
                fresh.extend(h2)
            new_out.append(fresh)
        n_qubits = next_id
        out_blocks = new_out

    return Circuit(
        name="bp", j=L, kind="bp", n_qubits=n_qubits, ops=ops,
        teleports=teleports, sub_preps=sub_preps, out_blocks=out_blocks,
    )


def build_cnot_gadget(j: int) -> Circuit:
    """Level-j transversal CNOT with teleportation-based error correction
    on both inputs and both outputs, consuming four j-BPs.

    The data blocks enter noiseless (their noise belongs to the preceding
    gadget), so the recorded failure rates isolate gadget-internal noise.
    """
    if j not in (1, 2):
        raise ValueError(f"unsupported level {j}")
    size = 4 ** j
    ids = iter(range(100000))

    def fresh_block() -> List[int]:
        return [next(ids) for _ in range(size)]

    Dc, Dt = fresh_block(), fresh_block()
    sub = build_bp_circuit(j)
    ops: List[Tuple] = []
    teleports: List[Teleport] = []
    sub_preps: List[SubPrep] = []

    def teleport_through(data: List[int], role: str) -> List[int]:
        h1, h2 = fresh_block(), fresh_block()
        sub_preps.append(SubPrep(circuit=sub, targets=[h1, h2]))
        ops.extend(("cnot", data[i], h1[i]) for i in range(size))
        ops.extend(("measure_x", q) for q in data)
        ops.extend(("measure_z", q) for q in h1)
        teleports.append(
            Teleport(x_block=data, z_block=h1, target=h2, level=j, role=role)
        )
        ops.append(("decode", len(teleports) - 1))
        return h2

    c1 = teleport_through(Dc, "lead_c")
    t1 = teleport_through(Dt, "lead_t")
    ops.extend(("cnot", c1[i], t1[i]) for i in range(size))
    c2 = teleport_through(c1, "trail_c")
    t2 = teleport_through(t1, "trail_t")

    used = sorted({q for op in ops if op[0] != "decode" for q in op[1:]}
                  | {q for b in (c2, t2) for q in b})
    remap = {q: i for i, q in enumerate(used)}

    def rm(seq: Sequence[int]) -> List[int]:
        return [remap[q] for q in seq]

    ops = [(op[0], *map(remap.get, op[1:])) if op[0] != "decode" else op
           for op in ops]
    for t in teleports:
        t.x_block, t.z_block, t.target = rm(t.x_block), rm(t.z_block), rm(t.target)
    for sp in sub_preps:
        sp.targets = [rm(b) for b in sp.targets]

    return Circuit(
        name="cnot-gadget", j=j, kind="gadget", n_qubits=len(used), ops=ops,
        teleports=teleports, sub_preps=sub_preps,
        out_blocks=[rm(c2), rm(t2)],
    )


def build_purification_circuit() -> Circuit:
    """Preparation-noise purification: two |0⟩ preparations, a CNOT, and a
    z measurement of the second qubit; accept on the untriggered outcome."""
    ops = [("prep_zero", 0), ("prep_zero", 1), ("cnot", 0, 1), ("measure_z", 1)]
    return Circuit(name="purify", j=0, kind="purify", n_qubits=2, ops=ops,
                   out_blocks=[[0]])


# ---------------------------------------------------------------------------
# Vectorised decoding


_BENIGN = {
    MeasurementBasis.ZBasis: (
        np.array([True, False, True, False]),
        np.array([False, True, False, True]),
    ),
    MeasurementBasis.XBasis: (
        np.array([True, True, False, False]),
        np.array([False, False, True, True]),
    ),
}
_EYE4 = np.eye(4, dtype=bool)


def _decode_c4_vec(bits: np.ndarray, flags: np.ndarray,
                   basis: MeasurementBasis) -> Tuple[np.ndarray, np.ndarray]:
    s = np.logical_xor.reduce(bits, axis=-1)
    fc = flags.sum(axis=-1)
    corrected = bits.copy()
    corrected[..., 0] ^= (fc == 0) & s
    corrected ^= (((fc == 1) & s)[..., None]) & flags
    lowest = _EYE4[np.argmax(flags, axis=-1)]
    corrected ^= (((fc >= 2) & s)[..., None]) & lowest
    p1, p2 = _BENIGN[basis]
    benign = np.all(flags == p1, axis=-1) | np.all(flags == p2, axis=-1)
    flag_out = ((fc == 0) & s) | ((fc >= 2) & ~benign)
    if basis is MeasurementBasis.ZBasis:
        value = corrected[..., 0] ^ corrected[..., 2]
    else:
        value = corrected[..., 0] ^ corrected[..., 1]
    return value, flag_out


def decode_vec(bits: np.ndarray, basis: MeasurementBasis) -> Tuple[np.ndarray, np.ndarray]:
    """Recursively decode (n, 4^L) outcome-error bits; returns per-row
    top-level (value, flag)."""
    n, width = bits.shape
    cur = bits.reshape(n, width // 4, 4).astype(bool)
    flags = np.zeros_like(cur)
    while True:
        values, fl = _decode_c4_vec(cur, flags, basis)
        if values.shape[1] == 1:
            return values[:, 0], fl[:, 0]
        m = values.shape[1]
        cur = values.reshape(n, m // 4, 4)
        flags = fl.reshape(n, m // 4, 4)


def _pauli_support(level: int, kind: str) -> np.ndarray:
    """Positions (within a 4^level block) of the canonical logical X
    (base-4 digits in {0,1}) or logical Z (digits in {0,2})."""
    allowed = {0, 1} if kind == "x" else {0, 2}
    out = []
    for p in range(4 ** level):
        q, ok = p, True
        for _ in range(level):
            if q % 4 not in allowed:
                ok = False
                break
            q //= 4
        if ok:
            out.append(p)
    return np.array(out, dtype=int)


# ---------------------------------------------------------------------------
# Execution


@dataclass
class _ScopeResult:
    accept: np.ndarray
    xf: np.ndarray
    zf: np.ndarray
    inj: Dict[int, Tuple[np.ndarray, np.ndarray]]
    tele: List[Dict[str, np.ndarray]]
    outcome: Optional[np.ndarray] = None  # purification measurement bit


def _run_scope(circuit: Circuit, eps: float, rng: np.random.Generator,
               n: int, mode: str) -> _ScopeResult:
    nq = circuit.n_qubits
    xf = np.zeros((n, nq), dtype=bool)
    zf = np.zeros((n, nq), dtype=bool)
    inj: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}

    def layer(level: int) -> Tuple[np.ndarray, np.ndarray]:
        if level not in inj:
            inj[level] = (np.zeros((n, nq), dtype=bool),
                          np.zeros((n, nq), dtype=bool))
        return inj[level]

    for sp in circuit.sub_preps:
        sub_out, sub_inj, _ = _sample_accepted(sp.circuit, eps, rng, n)
        cols = [q for block in sp.targets for q in block]
        xf[:, cols] = sub_out[0]
        zf[:, cols] = sub_out[1]
        for level, (sx, sz) in sub_inj.items():
            lx, lz = layer(level)
            lx[:, cols] = sx
            lz[:, cols] = sz

    p_pm = PREP_MEAS_FACTOR * eps
    mbits = np.zeros((n, nq), dtype=bool)
    accept = np.ones(n, dtype=bool)
    outcome = None
    tele_stats: List[Dict[str, np.ndarray]] = []

    for op in circuit.ops:
        kind = op[0]
        if kind == "cnot":
            _, c, t = op
            xf[:, t] ^= xf[:, c]
            zf[:, c] ^= zf[:, t]
            for lx, lz in inj.values():
                lx[:, t] ^= lx[:, c]
                lz[:, c] ^= lz[:, t]
            if eps > 0.0:
                u = rng.random(n)
                fault = u < eps
                # Conditioned on u < eps, u/eps is uniform; reuse it to
                # pick one of the 15 nontrivial two-qubit Paulis.
                k = np.minimum((u * (15.0 / eps)).astype(np.int64), 14) + 1
                xf[:, c] ^= fault & ((k & 1) != 0)
                zf[:, c] ^= fault & ((k & 2) != 0)
                xf[:, t] ^= fault & ((k & 4) != 0)
                zf[:, t] ^= fault & ((k & 8) != 0)
        elif kind in ("prep_zero", "prep_plus"):
            q = op[1]
            xf[:, q] = False
            zf[:, q] = False
            if eps > 0.0:
                if kind == "prep_zero":
                    xf[:, q] ^= rng.random(n) < p_pm
                else:
                    zf[:, q] ^= rng.random(n) < p_pm
        elif kind in ("measure_z", "measure_x"):
            q = op[1]
            frame = xf if kind == "measure_z" else zf
            bit = frame[:, q].copy()
            for lx, lz in inj.values():
                bit ^= (lx if kind == "measure_z" else lz)[:, q]
            if eps > 0.0:
                bit ^= rng.random(n) < p_pm
            mbits[:, q] = bit
            if circuit.kind == "purify":
                outcome = bit
                accept = ~bit
        elif kind == "decode":
            t = circuit.teleports[op[1]]
            vx, fx = decode_vec(mbits[:, t.x_block], MeasurementBasis.XBasis)
            vz, fz = decode_vec(mbits[:, t.z_block], MeasurementBasis.ZBasis)
            lx, lz = layer(t.level)
            tgt = np.asarray(t.target)
            if vz.any():
                lx[np.ix_(vz, tgt[_pauli_support(t.level, "x")])] ^= True
            if vx.any():
                lz[np.ix_(vx, tgt[_pauli_support(t.level, "z")])] ^= True
            tele_stats.append({"vx": vx, "fx": fx, "vz": vz, "fz": fz,
                               "role": t.role, "level": t.level})
            if mode == Mode.PostselectBP:
                accept &= ~fx & ~fz
        else:
            raise ValueError(f"unknown op {kind}")

    return _ScopeResult(accept=accept, xf=xf, zf=zf, inj=inj,
                        tele=tele_stats, outcome=outcome)


def _out_columns(circuit: Circuit) -> List[int]:
    return [q for block in circuit.out_blocks for q in block]


def _sample_accepted(
    circuit: Circuit, eps: float, rng: np.random.Generator, n: int
) -> Tuple[Tuple[np.ndarray, np.ndarray], Dict[int, Tuple[np.ndarray, np.ndarray]], int]:
    """Collect exactly n accepted runs; returns output-restricted physical
    frames, output-restricted injection layers, and the attempt count."""
    cols = _out_columns(circuit)
    got_x: List[np.ndarray] = []
    got_z: List[np.ndarray] = []
    got_inj: Dict[int, Tuple[List[np.ndarray], List[np.ndarray]]] = {}
    collected = 0
    attempts = 0
    p_est = 0.5
    while collected < n:
        batch = int(min(max((n - collected) / max(p_est, 0.02) * 1.1, 1024),
                        400_000))
        res = _run_scope(circuit, eps, rng, batch, Mode.PostselectBP)
        attempts += batch
        acc = res.accept
        p_est = max(acc.mean(), 1e-3)
        got_x.append(res.xf[np.ix_(acc, cols)])
        got_z.append(res.zf[np.ix_(acc, cols)])
        for level, (lx, lz) in res.inj.items():
            store = got_inj.setdefault(level, ([], []))
            store[0].append(lx[np.ix_(acc, cols)])
            store[1].append(lz[np.ix_(acc, cols)])
        collected += int(acc.sum())
    out_x = np.concatenate(got_x)[:n]
    out_z = np.concatenate(got_z)[:n]
    inj = {
        level: (np.concatenate(xs)[:n], np.concatenate(zs)[:n])
        for level, (xs, zs) in got_inj.items()
    }
    return (out_x, out_z), inj, attempts


def _halfwidth(p: float, n: int) -> float:
    if n <= 0:
        return 0.0
    return 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / n)


def run_trials(circuit: Circuit, params: NoiseParams, trials: int, seed: int,
               mode: str = Mode.PostselectBP) -> SimStats:
    """Monte Carlo over `trials` attempts of the circuit's own scope.

    The sampled channel is always the independent depolarizing one
    (`params.epsilon` is the per-CNOT strength); acceptance and error
    rates are conditional on all sub-preparations having been accepted.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    eps = params.epsilon
    rng = np.random.default_rng(seed)
    cols = _out_columns(circuit)

    done = 0
    max_chunk = 200_000 if not circuit.sub_preps or circuit.j < 2 else 50_000
    acc_parts: List[np.ndarray] = []
    tele_parts: Optional[List[Dict[str, List[np.ndarray]]]] = None
    outx_parts: List[np.ndarray] = []
    outz_parts: List[np.ndarray] = []
    inj_parts: Dict[int, Tuple[List[np.ndarray], List[np.ndarray]]] = {}
    while done < trials:
        nb = min(trials - done, max_chunk)
        res = _run_scope(circuit, eps, rng, nb, mode)
        done += nb
        acc_parts.append(res.accept)
        if tele_parts is None:
            tele_parts = [{"vx": [], "fx": [], "vz": [], "fz": [],
                           "role": t["role"], "level": t["level"]}
                          for t in res.tele]
        for agg, t in zip(tele_parts, res.tele):
            for key in ("vx", "fx", "vz", "fz"):
                agg[key].append(t[key])
        outx = res.xf[:, cols].copy()
        outz = res.zf[:, cols].copy()
        for level, (lx, lz) in res.inj.items():
            store = inj_parts.setdefault(level, ([], []))
            store[0].append(lx[:, cols])
            store[1].append(lz[:, cols])
            outx ^= lx[:, cols]
            outz ^= lz[:, cols]
        outx_parts.append(outx)
        outz_parts.append(outz)

    accept = np.concatenate(acc_parts)
    n_acc = int(accept.sum())
    rates: Dict[str, Tuple[float, float]] = {}
    p_acc = accept.mean()
    rates["acceptance"] = (p_acc, _halfwidth(p_acc, trials))
    if n_acc == 0:
        return SimStats(circuit.name, circuit.j, eps, trials, 0, rates)

    def add_rate(name: str, mask: np.ndarray) -> None:
        p = float(mask.mean())
        rates[name] = (p, _halfwidth(p, mask.size))

    tele = [
        {k: (np.concatenate(v)[accept] if isinstance(v, list) else v)
         for k, v in t.items()}
        for t in (tele_parts or [])
    ]
    if circuit.kind == "purify":
        total_x = np.concatenate(outx_parts)[accept]
        add_rate("cond_x_rate", total_x[:, 0])
    elif circuit.kind == "gadget":
        fail = np.zeros(n_acc, dtype=bool)
        for t in tele:
            add_rate(f"{t['role']}_x", t["vz"])
            add_rate(f"{t['role']}_z", t["vx"])
            if t["role"].startswith("trail"):
                fail |= t["vx"] | t["vz"]
        add_rate("gadget_fail", fail)
    elif circuit.j == 0:
        total_x = np.concatenate(outx_parts)[accept]
        total_z = np.concatenate(outz_parts)[accept]
        add_rate("bell_err_x", total_x[:, 0] ^ total_x[:, 1])
        add_rate("bell_err_z", total_z[:, 0] ^ total_z[:, 1])
    else:
        # A Bell pair's logical content is a *correlation*: an error class
        # acting identically on both halves is a stabilizer of the ideal
        # pair and harmless (e.g. a fault equal to a base Bell pair's XX
        # stabilizer flips both teleportation decodes at once).  All
        # block-level statistics are therefore parities across the two
        # output halves, bounded by the sum of the per-half analytic
        # bounds.
        total_x = np.concatenate(outx_parts)[accept]
        total_z = np.concatenate(outz_parts)[accept]
        top = [t for t in tele if t["level"] == circuit.j]
        add_rate("top_parity_x", top[0]["vz"] ^ top[1]["vz"])
        add_rate("top_parity_z", top[0]["vx"] ^ top[1]["vx"])

        lower_x = total_x.copy()
        lower_z = total_z.copy()
        if circuit.j in inj_parts:
            lxs, lzs = inj_parts[circuit.j]
            lower_x ^= np.concatenate(lxs)[accept]
            lower_z ^= np.concatenate(lzs)[accept]

        size = 4 ** circuit.j

        def block_decode(frames: np.ndarray, b: int,
                         basis: MeasurementBasis) -> np.ndarray:
            v, _ = decode_vec(frames[:, b * size : (b + 1) * size], basis)
            return v

        errs_x = [block_decode(total_x, b, MeasurementBasis.ZBasis) for b in (0, 1)]
        errs_z = [block_decode(total_z, b, MeasurementBasis.XBasis) for b in (0, 1)]
        add_rate("bell_err_x", errs_x[0] ^ errs_x[1])
        add_rate("bell_err_z", errs_z[0] ^ errs_z[1])
        low_x = [block_decode(lower_x, b, MeasurementBasis.ZBasis) for b in (0, 1)]
        low_z = [block_decode(lower_z, b, MeasurementBasis.XBasis) for b in (0, 1)]
        add_rate("lower_err_x", low_x[0] ^ low_x[1])
        add_rate("lower_err_z", low_z[0] ^ low_z[1])
        # Quasi-independence probe: an error carried by one output block
        # together with a decode failure of the *other* block's
        # teleportation requires two independent faults.
        add_rate("joint_x", low_x[0] & top[1]["vz"])
        add_rate("joint_z", low_z[0] & top[1]["vx"])

    return SimStats(circuit.name, circuit.j, eps, trials, n_acc, rates)


def propagate_faults(circuit: Circuit, faults: Sequence[Tuple[int, str, int]]
                     ) -> Tuple[np.ndarray, np.ndarray]:
    """Noiselessly propagate explicitly injected faults.

    Each fault is (op_index, 'x'|'z', operand_slot); it is applied after
    the indexed operation executes.  Returns the final (x, z) frames over
    all qubits (measured qubits keep their frame at measurement time).
    Decoding and postselection are skipped — this is the raw propagation
    layer, used to validate conjugation rules and frame linearity.
    """
    nq = circuit.n_qubits
    xf = np.zeros(nq, dtype=bool)
    zf = np.zeros(nq, dtype=bool)
    by_op: Dict[int, List[Tuple[str, int]]] = {}
    for op_idx, typ, slot in faults:
        by_op.setdefault(op_idx, []).append((typ, slot))
    for idx, op in enumerate(circuit.ops):
        if op[0] == "cnot":
            _, c, t = op
            xf[t] ^= xf[c]
            zf[c] ^= zf[t]
        elif op[0] in ("prep_zero", "prep_plus"):
            xf[op[1]] = False
            zf[op[1]] = False
        for typ, slot in by_op.get(idx, ()):
            q = op[1 + slot]
            if typ == "x":
                xf[q] ^= True
            else:
                zf[q] ^= True
    return xf, zf
