"""Conditional-probability interpretation of g2 at real arguments.

The sample space carries independent events ``O_k`` (probability
``q^k / (1 + q^k)``) for ``k >= 1`` and ``N_{kd}`` (probability ``q^{kd}``).
``W`` asks that from every residue block onwards the gap constraints hold and
``X`` asks the same from block 1 onwards.  ``Prob(W_k)`` is computed two ways:

* a backward recurrence over blocks, started from ``Prob(W_K) = 1`` far out;
* the renormalised overpartition generating function ``h(q^{kd})``, built from
  the exact integer series and evaluated at the real q.

Both are checked against g2 summed directly in floating point, and a seeded
Monte Carlo simulation of the truncated event space gives a third, noisy view.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .mocktheta import f_recurrence
from .partitions import FamilyParams
from .qseries import Monomial, eval_real


class HorizonExceeded(ValueError):
    """An event references an index beyond the sampled horizon."""


class ZeroConditioningEvent(ArithmeticError):
    """No Monte Carlo sample landed in the conditioning event."""


class ToleranceNotReached(RuntimeError):
    """Adaptive series evaluation hit its order cap before converging."""


@dataclass(frozen=True)
class MCConfig:
    samples: int = 100_000
    seed: int = 42
    horizon: int | None = None  # chosen from the tail bound when None
    chunk: int = 1 << 16
    workers: int | None = None


@dataclass(frozen=True)
class ProbabilityParams:
    d: int
    r: int
    q: float
    cutoff: int | None = None
    series_tolerance: float = 1e-12
    identity_tolerance: float = 1e-8
    max_order: int = 8192
    mc: MCConfig = field(default_factory=MCConfig)

    def __post_init__(self) -> None:
        FamilyParams(self.d, self.r)
        if not 0 < self.q < 1:
            raise ValueError(f"q must lie in (0, 1), got {self.q}")
        if self.mc.samples < 1:
            raise ValueError("samples must be >= 1")

    @property
    def family(self) -> FamilyParams:
        return FamilyParams(self.d, self.r)

    def o(self, k: int) -> float:
        t = self.q ** k
        return t / (1 + t)

    def obar(self, k: int) -> float:
        return 1 / (1 + self.q ** k)

    def nbar(self, k: int) -> float:
        """``1 - Prob(N_k)`` for an index k that is a multiple of d."""
        return 1 - self.q ** k

    @property
    def recurrence_cutoff(self) -> int:
        """Block index K with ``q^{Kd}`` below the series tolerance."""
        if self.cutoff is not None:
            return self.cutoff
        k = math.ceil(math.log(self.series_tolerance) / (self.d * math.log(self.q)))
        return max(k, 2)


@dataclass
class ProbReport:
    d: int
    r: int
    q: float
    method: str
    prob_w: float
    prob_x: float
    cond_w_given_x: float
    cond_part2: float
    g2: float
    abs_err_part1: float
    abs_err_part2: float
    mc_stderr: float | None = None
    tail_bound: float | None = None
    passed: bool = True
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out


# ---------------------------------------------------------------------------
# events

@dataclass
class EventSample:
    """One draw of the event space up to index ``horizon``.

    ``O[k]`` for ``1 <= k <= horizon`` (index 0 unused) and ``N[k]`` standing
    for ``N_{kd}`` with ``kd <= horizon``.
    """

    O: np.ndarray
    N: np.ndarray

    @property
    def horizon(self) -> int:
        return self.O.shape[-1] - 1


def _e_j(O, N, j: int, d: int, r: int):
    # works on a single sample (1-d arrays) or a batch (rows are samples)
    n, res = divmod(j, d)
    if res == r:
        return ~O[..., j] | (~O[..., j + d - 2 * r] & ~O[..., (n + 1) * d])
    if res == d - r:
        return ~O[..., j] | ~O[..., (n + 1) * d]
    if res == 0:
        m = n  # j = m d
        return ~O[..., j] | (~O[..., j + r] & ~O[..., j + d - r] & ~O[..., j + d] & ~N[..., m])
    return None


def e_j_holds(s: EventSample, j: int, p: ProbabilityParams) -> bool:
    """Whether the auxiliary constraint indexed by j is satisfied by the sample."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if j + p.d > s.horizon:
        raise HorizonExceeded(f"constraint {j} needs indices up to {j + p.d} > {s.horizon}")
    val = _e_j(s.O, s.N, j, p.d, p.r)
    return True if val is None else bool(val)


# ---------------------------------------------------------------------------
# exact pipelines

def _prob_W_table(p: ProbabilityParams, K: int) -> list[float]:
    d, r = p.d, p.r
    P = [1.0] * (K + 3)
    for k in range(K - 1, -1, -1):
        kd = k * d
        single = (p.o(kd + r) * p.obar(kd + d - r) * p.obar(kd + d)
                  + p.obar(kd + r) * p.o(kd + d - r) * p.obar(kd + d))
        double = (p.nbar(kd + d) * p.obar(kd + r) * p.obar(kd + d - r)
                  * p.obar(kd + d + r) * p.obar(kd + 2 * d - r) * p.obar(kd + 2 * d))
        P[k] = single * P[k + 1] + double * P[k + 2]
    return P


def prob_W_recurrence(k: int, p: ProbabilityParams) -> float:
    """``Prob(W_k)`` from the backward block recurrence."""
    K = max(p.recurrence_cutoff, k)
    if k < 0:
        raise ValueError("k must be >= 0")
    return _prob_W_table(p, K)[k]


def prob_W_literal(k: int, p: ProbabilityParams) -> float:
    """Exact probability that every auxiliary constraint beyond block k holds.

    Splitting on block k: one of ``O_{kd+r}``, ``O_{kd+d-r}`` with no
    ``O_{(k+1)d}``, or none of the three, continue from block k+1;
    ``O_{(k+1)d}`` alone forces the next block empty and continues from k+2.
    This differs from the block recurrence used for ``Prob(W_k)`` above.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    d, r = p.d, p.r
    K = max(p.recurrence_cutoff, k)
    P = [1.0] * (K + 3)
    for b in range(K - 1, -1, -1):
        bd = b * d
        stay = (p.o(bd + r) * p.obar(bd + d - r) + p.obar(bd + r) * p.o(bd + d - r)
                + p.obar(bd + r) * p.obar(bd + d - r)) * p.obar(bd + d)
        jump = (p.obar(bd + r) * p.obar(bd + d - r) * p.o(bd + d) * p.nbar(bd + d)
                * p.obar(bd + d + r) * p.obar(bd + 2 * d - r) * p.obar(bd + 2 * d))
        P[b] = stay * P[b + 1] + jump * P[b + 2]
    return P[k]


def _real_poch(start: float, ratio: float, sign: float, tol: float) -> float:
    """``prod_{j>=0} (1 - sign * start * ratio^j)`` until factors are within tol of 1."""
    out, t = 1.0, start
    while t >= tol:
        out *= 1 - sign * t
        t *= ratio
    return out


def h_prefactor(x: float, p: ProbabilityParams) -> float:
    """``(x q^d; q^d)_inf / (-x q^r, -x q^{d-r}, -x q^d; q^d)_inf`` at real x."""
    q, d, r = p.q, p.d, p.r
    qd = q ** d
    tol = p.series_tolerance * (1 - qd) * 0.01
    num = _real_poch(x * qd, qd, 1.0, tol)
    den = (_real_poch(x * q ** r, qd, -1.0, tol) * _real_poch(x * q ** (d - r), qd, -1.0, tol)
           * _real_poch(x * qd, qd, -1.0, tol))
    return num / den


def f_real(k: int, p: ProbabilityParams) -> float:
    """The overpartition generating function at ``x = q^{kd}`` and real q, from the exact series."""
    tol = p.series_tolerance
    order = 64
    prev = None
    while order <= p.max_order:
        value, last = eval_real(f_recurrence(Monomial(1, k * p.d), p.family, order), p.q)
        scale = max(1.0, abs(value))
        if prev is not None and abs(value - prev) <= tol * scale and last <= tol * scale:
            return value
        prev = value
        order *= 2
    raise ToleranceNotReached(f"series for q={p.q} did not settle below order {p.max_order}")


def prob_W_series(k: int, p: ProbabilityParams) -> float:
    """``Prob(W_k) = h(q^{kd})`` via the renormalised generating function."""
    if k < 0:
        raise ValueError("k must be >= 0")
    x = p.q ** (k * p.d)
    if x < p.series_tolerance:
        return 1.0
    return h_prefactor(x, p) * f_real(k, p)


def g2_real(p: ProbabilityParams) -> float:
    """``g2(-q^r; q^d)`` summed in floating point until terms drop below tolerance."""
    q, d, r = p.q, p.d, p.r
    qd = q ** d
    a, b = q ** r, q ** (d - r)
    term = 1 / ((1 + a) * (1 + b))
    terms = [term]
    n = 1
    while term >= p.series_tolerance * 1e-3:
        qdn = qd ** n
        term *= (1 + qdn) * qdn / ((1 + a * qdn) * (1 + b * qdn))
        terms.append(term)
        n += 1
    return math.fsum(terms)


def check_theorem31_part1(p: ProbabilityParams) -> ProbReport:
    """``Prob(W | X)`` against ``1 / ((1+q^r)(1+q^{d-r})(1+q^d) g2)``."""
    return _exact_report(p)


def check_theorem31_part2(p: ProbabilityParams) -> ProbReport:
    """``Prob(no O_r, O_{d-r}, O_d | W)`` against g2."""
    return _exact_report(p)


def _exact_report(p: ProbabilityParams) -> ProbReport:
    q, d, r = p.q, p.d, p.r
    P = _prob_W_table(p, p.recurrence_cutoff)
    w, x = P[0], P[1]
    g2 = g2_real(p)
    part1 = w / x
    part2 = p.obar(r) * p.obar(d - r) * p.obar(d) * x / w
    rhs1 = 1 / ((1 + q ** r) * (1 + q ** (d - r)) * (1 + q ** d) * g2)
    w_series, x_series = prob_W_series(0, p), prob_W_series(1, p)
    err1, err2 = abs(part1 - rhs1), abs(part2 - g2)
    gap = max(abs(w - w_series), abs(x - x_series))
    ok = err1 < p.identity_tolerance and err2 < p.identity_tolerance and gap < p.identity_tolerance
    return ProbReport(
        d, r, q, "exact", w, x, part1, part2, g2, err1, err2,
        passed=ok,
        extra={"prob_w_series": w_series, "prob_x_series": x_series,
               "pipeline_gap": gap, "cutoff": p.recurrence_cutoff},
    )


# ---------------------------------------------------------------------------
# Monte Carlo

def tail_bound(p: ProbabilityParams, last_checked: int) -> float:
    """Union bound on any constraint beyond ``last_checked`` failing.

    A constraint indexed j can only fail when ``O_j`` occurs, so the bias is at
    most ``sum_{j>L} (o_j + [d | j] q^j) <= 2 q^{L+1} / (1 - q)``.
    """
    q = p.q
    return 2 * q ** (last_checked + 1) / (1 - q)


def choose_horizon(p: ProbabilityParams) -> int:
    """Smallest horizon whose dropped-constraint bound is below a tenth of the tolerance."""
    target = 0.1 * p.series_tolerance
    J = 4 * p.d
    while tail_bound(p, J - 2 * p.d) >= target:
        J += 1
    return J


def _worker_count(cfg: MCConfig) -> int:
    if cfg.workers:
        return cfg.workers
    env = os.environ.get("QMOCK_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _simulate_chunk(p: ProbabilityParams, J: int, index: int, size: int) -> np.ndarray:
    d, r = p.d, p.r
    # each chunk owns its own Philox stream, so results do not depend on scheduling
    rng = np.random.Generator(np.random.Philox(key=p.mc.seed).jumped(index))
    ks = np.arange(J + 1)
    o = np.where(ks > 0, p.q ** ks / (1 + p.q ** ks), 0.0)
    O = rng.random((size, J + 1)) < o
    O[:, 0] = False
    mult = np.arange(J // d + 1)
    nprob = np.where(mult > 0, p.q ** (mult * d), 0.0)
    N = rng.random((size, J // d + 1)) < nprob
    last = J - 2 * d
    W = np.ones(size, dtype=bool)
    X = np.ones(size, dtype=bool)
    for j in range(1, last + 1):
        e = _e_j(O, N, j, d, r)
        if e is None:
            continue
        if j > d:
            X &= e
        else:
            W &= e
    W &= X
    F = ~O[:, r] & ~O[:, d - r] & ~O[:, d]
    BW = block_parse(O, N, 0, d, r, J)
    BX = block_parse(O, N, 1, d, r, J)
    return np.array([W.sum(), X.sum(), (F & W).sum(), F.sum(), (F & X).sum(), BW.sum(), BX.sum()],
                    dtype=np.int64)


def block_parse(O, N, start: int, d: int, r: int, horizon: int) -> np.ndarray:
    """Block-parse event from block ``start`` for a batch of samples.

    At block b: both ``O_{bd+r}`` and ``O_{bd+d-r}`` fails; exactly one needs
    no ``O_{(b+1)d}`` and moves to b+1; neither needs no ``N_{(b+1)d}``,
    ``O_{(b+1)d+r}``, ``O_{(b+1)d+d-r}``, ``O_{(b+2)d}`` and moves to b+2.
    Its probability obeys the block recurrence exactly.  Blocks reaching past
    the horizon are treated as satisfied.
    """
    O = np.atleast_2d(O)
    N = np.atleast_2d(N)
    size = O.shape[0]
    alive = np.ones(size, dtype=bool)
    pos = np.full(size, start)
    b = start
    while (b + 2) * d <= horizon:
        here = alive & (pos == b)
        if here.any():
            bd = b * d
            a, c = O[:, bd + r], O[:, bd + d - r]
            one = a ^ c
            none = ~a & ~c
            ok_one = one & ~O[:, bd + d]
            ok_none = (none & ~N[:, b + 1] & ~O[:, bd + d + r] & ~O[:, bd + 2 * d - r]
                       & ~O[:, bd + 2 * d])
            alive &= ~here | ok_one | ok_none
            pos = np.where(here & ok_one, b + 1, pos)
            pos = np.where(here & ok_none, b + 2, pos)
        b += 1
    return alive


def simulate_counts(p: ProbabilityParams, horizon: int | None = None) -> tuple[np.ndarray, int]:
    """Counts of (W, X, F&W, F, F&X, W', X') over all samples.

    F is the event that none of ``O_r``, ``O_{d-r}``, ``O_d`` occur; W' and X'
    are the block-parse events from blocks 0 and 1.
    """
    J = horizon or p.mc.horizon or choose_horizon(p)
    if J < 4 * p.d:
        raise HorizonExceeded(f"horizon {J} is below the minimum {4 * p.d}")
    total, chunk = p.mc.samples, p.mc.chunk
    jobs = [(i, min(chunk, total - i * chunk)) for i in range((total + chunk - 1) // chunk)]
    workers = _worker_count(p.mc)
    if workers == 1 or len(jobs) == 1:
        parts = [_simulate_chunk(p, J, i, n) for i, n in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _simulate_chunk(p, J, *job), jobs))
    return np.sum(parts, axis=0), J


def mc_estimate(p: ProbabilityParams) -> ProbReport:
    counts, J = simulate_counts(p)
    nW, nX, nFW, nF, nFX, nBW, nBX = (int(c) for c in counts)
    n = p.mc.samples
    if nW == 0 or nX == 0:
        raise ZeroConditioningEvent("no sample satisfied the conditioning event")
    d, r, q = p.d, p.r, p.q
    part1 = nW / nX
    part2 = nFW / nW
    se1 = math.sqrt(part1 * (1 - part1) / nX)
    se2 = math.sqrt(part2 * (1 - part2) / nW)
    g2 = g2_real(p)
    rhs1 = 1 / ((1 + q ** r) * (1 + q ** (d - r)) * (1 + q ** d) * g2)
    err1, err2 = abs(part1 - rhs1), abs(part2 - g2)
    # allow 5 standard errors; a zero error estimate only happens for degenerate q
    ok = all(err <= 5 * se + 1e-12 for err, se in ((err1, se1), (err2, se2)))
    factor = p.obar(r) * p.obar(d - r) * p.obar(d)
    bw, bx = nBW / n, nBX / n
    return ProbReport(
        d, r, q, "mc", nW / n, nX / n, part1, part2, g2, err1, err2,
        mc_stderr=se2, tail_bound=tail_bound(p, J - 2 * d), passed=ok,
        extra={"samples": n, "seed": p.mc.seed, "horizon": J, "stderr_part1": se1,
               "counts": {"W": nW, "X": nX, "F_and_W": nFW, "F": nF, "F_and_X": nFX},
               "factorization_residual": nFW / n - factor * nX / n,
               "literal_exact": {"prob_w": prob_W_literal(0, p), "prob_x": prob_W_literal(1, p)},
               "block_parse": {
                   "prob_w": bw, "prob_x": bx,
                   "stderr_w": math.sqrt(bw * (1 - bw) / n), "stderr_x": math.sqrt(bx * (1 - bx) / n),
                   "g2_ratio_estimate": factor * bx / bw if bw else None,
               }},
    )
