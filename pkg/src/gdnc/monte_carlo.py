"""Seeded Monte Carlo simulation of GDNC and two-user baselines.

Random numbers
--------------
Every SNR point owns a Philox4x64-10 stream keyed by
``seed + 2**64 * point_index``.  Trial ``t`` of a point consumes the
uniform doubles ``t*D .. t*D + D - 1`` of that stream, where ``D`` is the
number of channel gains per trial.  Blocks of trials seek straight to
their first word, so counts do not depend on block size or worker count.

Per-trial draw order: inter-user gains in (slot, source, decoder) order,
then uplink gains in (user, slot) order with slots 1..k1 for the broadcast
phase and k1+1..k1+k2 for the parities.  Gains are ``-ln(1 - u)``.

The two-user baselines use six gains per trial: user 1 -> BS, 1 -> 2,
2 -> BS, 2 -> 1 in the broadcast slot, then user 1 -> BS and user 2 -> BS
in the second slot.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .block_code import SystematicCode
from .errors import BadArguments, InsufficientErrors, ShapeMismatch, UnknownScheme
from .fault_model import FaultPattern, GdncParams, all_events, apply_faults
from .gf_matrix import _eliminate, fingerprint

BLOCK = 1 << 18
MIN_ERRORS = 10
_Z95 = 1.959963984540054


class Scheme(str, enum.Enum):
    GDNC = "gdnc"
    DNC = "dnc"
    BNC2 = "bnc2"
    DAF2 = "daf2"


class ErrorUnit(str, enum.Enum):
    PER_MESSAGE = "per-message"
    PER_FRAME = "per-frame"


class ChannelMode(str, enum.Enum):
    RAYLEIGH = "rayleigh"
    ERASURE = "erasure"


BASELINES = (Scheme.BNC2, Scheme.DAF2)


@dataclass(frozen=True)
class ChannelRealization:
    """Squared fading gains for one frame.

    ``inter_user[e]`` belongs to ``all_events(params)[e]``; ``uplink`` has
    shape (M, k1 + k2).
    """

    inter_user: np.ndarray
    uplink: np.ndarray


@dataclass(frozen=True)
class DecodeOutcome:
    recoverable: tuple[bool, ...]
    full_rank: bool


@dataclass(frozen=True)
class SimConfig:
    snr_db_grid: tuple[float, ...]
    params: GdncParams | None = None
    code: SystematicCode | None = None
    rate: float = 0.5
    trials: int = 10_000
    seed: int = 0
    scheme: Scheme = Scheme.GDNC
    error_unit: ErrorUnit = ErrorUnit.PER_MESSAGE
    channel_mode: ChannelMode = ChannelMode.RAYLEIGH
    slope_window: tuple[int, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "snr_db_grid", tuple(float(s) for s in self.snr_db_grid))
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "error_unit", ErrorUnit(self.error_unit))
        object.__setattr__(self, "channel_mode", ChannelMode(self.channel_mode))
        if self.trials < 1:
            raise BadArguments(f"trials must be >= 1, got {self.trials}")
        if not self.rate > 0:
            raise BadArguments(f"rate must be positive, got {self.rate}")
        grid = self.snr_db_grid
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise BadArguments("SNR grid must be non-empty and strictly increasing")
        if not 0 <= self.seed < 1 << 64:
            raise BadArguments("seed must fit in 64 bits")
        if self.scheme in BASELINES:
            if self.channel_mode is not ChannelMode.RAYLEIGH:
                raise BadArguments("baselines combine copies by MRC and need the Rayleigh channel")
        else:
            if self.params is None or self.code is None:
                raise BadArguments("GDNC schemes need params and code")
            self.params.check_code(self.code)
            if self.scheme is Scheme.DNC and (self.params.k1 != 1 or self.params.k2 != self.params.M - 1):
                raise ShapeMismatch("DNC is GDNC with k1 = 1 and k2 = M - 1")


@dataclass(frozen=True)
class PointResult:
    snr_db: float
    pe: float
    g: float
    trials: int
    frame_errors: int
    message_errors: int
    messages_per_trial: int
    per_message_errors: tuple[int, ...] = ()

    @property
    def fer(self) -> float:
        return self.frame_errors / self.trials

    @property
    def fer_ci(self) -> tuple[float, float]:
        return wilson_interval(self.frame_errors, self.trials)

    @property
    def message_error_rate(self) -> float:
        return self.message_errors / (self.trials * self.messages_per_trial)

    @property
    def message_ci(self) -> tuple[float, float]:
        return wilson_interval(self.message_errors, self.trials * self.messages_per_trial)

    def errors(self, unit: ErrorUnit) -> int:
        return self.frame_errors if ErrorUnit(unit) is ErrorUnit.PER_FRAME else self.message_errors

    def rate(self, unit: ErrorUnit) -> float:
        return self.fer if ErrorUnit(unit) is ErrorUnit.PER_FRAME else self.message_error_rate


@dataclass(frozen=True)
class SimResult:
    scheme: Scheme
    M: int
    k1: int
    k2: int
    q: int
    rate: float
    seed: int
    channel_mode: ChannelMode
    error_unit: ErrorUnit
    points: tuple[PointResult, ...]
    code_fingerprint: str = ""
    notes: tuple[str, ...] = ()
    slope: float | None = None

    def to_csv(self) -> str:
        return format_csv(self)


def wilson_interval(errors: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    p = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if errors == 0 else max(0.0, centre - half)
    hi = 1.0 if errors == trials else min(1.0, centre + half)
    return lo, hi


# -- channel model -----------------------------------------------------------

def _uplink_columns(params: GdncParams) -> np.ndarray:
    """Column of G carried by each uplink slot, in (user, slot) order."""
    cols = []
    for j in range(1, params.M + 1):
        for s in range(1, params.k1 + params.k2 + 1):
            if s <= params.k1:
                cols.append(params.message_row(j, s))
            else:
                cols.append(params.k + (j - 1) * params.k2 + (s - params.k1 - 1))
    return np.array(cols, dtype=np.int64)


def draws_per_trial(params: GdncParams) -> int:
    return params.num_events + params.M * (params.k1 + params.k2)


def draw_realization(rng: np.random.Generator, params: GdncParams) -> ChannelRealization:
    u = rng.random(draws_per_trial(params))
    gains = -np.log1p(-u)
    f = params.num_events
    return ChannelRealization(gains[:f], gains[f:].reshape(params.M, params.k1 + params.k2))


def realize_faulty_code(
    code: SystematicCode, params: GdncParams, realization: ChannelRealization, g: float
) -> tuple[SystematicCode, frozenset[int]]:
    """Faulty code and erased columns produced by one channel realization."""
    params.check_code(code)
    events = all_events(params)
    pattern = FaultPattern(e for e, h in zip(events, realization.inter_user) if h < g)
    cols = _uplink_columns(params)
    erased = frozenset(int(c) for c, h in zip(cols, realization.uplink.reshape(-1)) if h < g)
    return apply_faults(code, params, pattern), erased


def decode_check(code: SystematicCode, erased: Sequence[int] | frozenset[int]) -> DecodeOutcome:
    """Which messages the BS can recover from the non-erased columns.

    Message m is recoverable iff the unit vector e_m lies in the column
    space of the surviving columns of G.  That space is computed once as
    the RREF of the transposed submatrix: e_m belongs to it iff m is a
    pivot whose basis row equals e_m.
    """
    erased = set(erased)
    kept = [c for c in range(code.n) if c not in erased]
    k = code.k
    if not kept:
        return DecodeOutcome((False,) * k, False)
    GS_T = code.G.data[:, kept].T.copy()
    basis, pivots = _eliminate(code.field, GS_T)
    rec = [False] * k
    for i, c in enumerate(pivots):
        rec[c] = int(np.count_nonzero(basis[i])) == 1
    return DecodeOutcome(tuple(rec), len(pivots) == k)


class _OutcomeTable:
    """Memoised decode outcome per outage-indicator bitmask."""

    def __init__(self, code: SystematicCode, params: GdncParams):
        self.code = code
        self.params = params
        self.f = params.num_events
        self.D = draws_per_trial(params)
        if self.D > 63:
            raise BadArguments(f"{self.D} channel gains per trial exceed the 63-bit mask")
        self.events = all_events(params)
        self.cols = _uplink_columns(params)
        self.cache: dict[int, tuple[np.ndarray, bool]] = {}

    def outcome(self, mask: int) -> tuple[np.ndarray, bool]:
        hit = self.cache.get(mask)
        if hit is None:
            pattern = FaultPattern(e for b, e in enumerate(self.events) if mask >> b & 1)
            erased = {int(c) for b, c in enumerate(self.cols) if mask >> (self.f + b) & 1}
            out = decode_check(apply_faults(self.code, self.params, pattern), erased)
            assert not out.full_rank or all(out.recoverable)
            hit = (~np.array(out.recoverable), not out.full_rank)
            self.cache[mask] = hit
        return hit

    def tally(self, masks: np.ndarray) -> tuple[int, np.ndarray]:
        uniq, counts = np.unique(masks, return_counts=True)
        frame = 0
        per_msg = np.zeros(self.params.k, dtype=np.int64)
        for m, c in zip(uniq.tolist(), counts.tolist()):
            failed, frame_err = self.outcome(m)
            if frame_err:
                frame += c
                per_msg += c * failed
        return frame, per_msg


def exact_error_rates(code: SystematicCode, params: GdncParams, pe: float) -> tuple[float, np.ndarray]:
    """Exact frame and per-message error probability of the GDNC scheme.

    Enumerates every outage-indicator pattern, each link failing
    independently with probability ``pe``.  Feasible for up to ~16 links.
    """
    table = _OutcomeTable(code, params)
    D = table.D
    if D > 20:
        raise BadArguments(f"exhaustive enumeration over 2^{D} patterns is too large")
    frame = 0.0
    per_msg = np.zeros(params.k)
    for mask in range(1 << D):
        w = bin(mask).count("1")
        prob = pe**w * (1 - pe) ** (D - w)
        failed, frame_err = table.outcome(mask)
        if frame_err:
            frame += prob
            per_msg += prob * failed
    return frame, per_msg


# -- random streams ------------------------------------------------------------

def trial_uniforms(seed: int, point: int, start: int, count: int, D: int) -> np.ndarray:
    """Uniforms of trials ``start .. start+count-1`` as a (count, D) array."""
    word = start * D
    bitgen = np.random.Philox(key=seed + (point << 64), counter=word // 4)
    gen = np.random.Generator(bitgen)
    skip = word % 4
    if skip:
        gen.random(skip)
    return gen.random((count, D))


def _blocks(trials: int) -> list[tuple[int, int]]:
    return [(s, min(BLOCK, trials - s)) for s in range(0, trials, BLOCK)]


_WORKER_TABLES: dict = {}


def _gdnc_block(job):
    code, params, mode, seed, point, g, pe, start, count = job
    key = (code.field, code.P.shape, code.P.data.tobytes(), params)
    table = _WORKER_TABLES.get(key)
    if table is None:
        table = _WORKER_TABLES[key] = _OutcomeTable(code, params)
    u = trial_uniforms(seed, point, start, count, table.D)
    if mode is ChannelMode.RAYLEIGH:
        out = -np.log1p(-u) < g
    else:
        out = u < pe
    weights = np.left_shift(np.int64(1), np.arange(table.D, dtype=np.int64))
    masks = out.astype(np.int64) @ weights
    return table.tally(masks)


def _baseline_block(job):
    scheme, seed, point, g, start, count = job
    u = trial_uniforms(seed, point, start, count, 6)
    h = -np.log1p(-u)
    h10, h12, h20, h21, a1, a2 = h.T
    ok1, ok2 = _baseline_decode(scheme, g, h10, h12, h20, h21, a1, a2)
    fail1, fail2 = ~ok1, ~ok2
    frame = int(np.count_nonzero(fail1 | fail2))
    return frame, np.array([np.count_nonzero(fail1), np.count_nonzero(fail2)], dtype=np.int64)


def _baseline_decode(scheme, g, h10, h12, h20, h21, a1, a2):
    """Per-user success flags at the BS for the two-user protocols.

    ``c1``: user 1 decoded I2; ``c2``: user 2 decoded I1.  A user that
    failed retransmits its own packet and the BS combines both copies.
    """
    c1, c2 = h21 >= g, h12 >= g
    if scheme is Scheme.DAF2:
        # copies of I1: direct, user 2's relay, user 1's own retransmission
        s1 = h10 + np.where(c2, a2, 0.0) + np.where(c1, 0.0, a1)
        s2 = h20 + np.where(c1, a1, 0.0) + np.where(c2, 0.0, a2)
        return s1 >= g, s2 >= g
    if scheme is not Scheme.BNC2:
        raise UnknownScheme(f"{scheme} is not a two-user baseline")

    def user_ok(hd, hp, ao, ap, own_coop, partner_coop):
        # hd/ao: own direct and own second-slot gain; hp/ap: partner's.
        both = (hd >= g) | ((ao + ap >= g) & (hp >= g))
        own_only = (hd >= g) | ((ao >= g) & (hp + ap >= g))
        partner_only = (hd + ao >= g) | ((ap >= g) & (hp >= g))
        neither = hd + ao >= g
        return np.select(
            [own_coop & partner_coop, own_coop & ~partner_coop, ~own_coop & partner_coop],
            [both, own_only, partner_only],
            neither,
        )

    return user_ok(h10, h20, a1, a2, c1, c2), user_ok(h20, h10, a2, a1, c2, c1)


def _run_jobs(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _point_channel(snr_db: float, rate: float) -> tuple[float, float]:
    g = (2.0**rate - 1.0) / 10.0 ** (snr_db / 10.0)
    return g, -math.expm1(-g)


def run_sim(config: SimConfig, workers: int = 1) -> SimResult:
    """Simulate every SNR point of ``config``; dispatches baselines too."""
    if config.scheme in BASELINES:
        return run_baseline_2user(
            config.scheme, config.snr_db_grid, config.rate, config.trials, config.seed,
            workers=workers, error_unit=config.error_unit, slope_window=config.slope_window,
        )
    params, code = config.params, config.code
    points = []
    for idx, snr_db in enumerate(config.snr_db_grid):
        g, pe = _point_channel(snr_db, config.rate)
        jobs = [
            (code, params, config.channel_mode, config.seed, idx, g, pe, s, c)
            for s, c in _blocks(config.trials)
        ]
        frame, per_msg = 0, np.zeros(params.k, dtype=np.int64)
        for f_err, m_err in _run_jobs(_gdnc_block, jobs, workers):
            frame += f_err
            per_msg += m_err
        points.append(
            PointResult(snr_db, pe, g, config.trials, frame, int(per_msg.sum()), params.k,
                        tuple(int(v) for v in per_msg))
        )
    notes = ()
    if config.scheme is Scheme.DNC:
        notes = ("DNC simulated as GDNC(k1=1, k2=M-1) with zero substitution on inter-user failure",)
    result = SimResult(
        config.scheme, params.M, params.k1, params.k2, code.field.q, config.rate, config.seed,
        config.channel_mode, config.error_unit, tuple(points), fingerprint(code.P), notes,
    )
    return _with_slope(result, config.slope_window)


def run_baseline_2user(
    scheme,
    snr_db_grid: Sequence[float],
    rate: float = 0.5,
    trials: int = 10_000,
    seed: int = 0,
    workers: int = 1,
    error_unit: ErrorUnit = ErrorUnit.PER_MESSAGE,
    slope_window: tuple[int, int] | None = None,
) -> SimResult:
    """Two-user BNC or DAF with non-reciprocal inter-user links and MRC."""
    try:
        scheme = Scheme(scheme)
    except ValueError:
        raise UnknownScheme(f"unknown scheme {scheme!r}") from None
    if scheme not in BASELINES:
        raise UnknownScheme(f"{scheme.value} is not a two-user baseline")
    if isinstance(snr_db_grid, (int, float)):
        snr_db_grid = [snr_db_grid]
    SimConfig(tuple(snr_db_grid), trials=trials, seed=seed, rate=rate, scheme=scheme)
    points = []
    for idx, snr_db in enumerate(snr_db_grid):
        g, pe = _point_channel(snr_db, rate)
        jobs = [(scheme, seed, idx, g, s, c) for s, c in _blocks(trials)]
        frame, per_msg = 0, np.zeros(2, dtype=np.int64)
        for f_err, m_err in _run_jobs(_baseline_block, jobs, workers):
            frame += f_err
            per_msg += m_err
        points.append(PointResult(float(snr_db), pe, g, trials, frame, int(per_msg.sum()), 2,
                                  tuple(int(v) for v in per_msg)))
    result = SimResult(scheme, 2, 1, 1, 2, rate, seed, ChannelMode.RAYLEIGH, ErrorUnit(error_unit),
                       tuple(points))
    return _with_slope(result, slope_window)


def _with_slope(result: SimResult, window) -> SimResult:
    try:
        slope = estimate_diversity(result, window)
    except InsufficientErrors:
        slope = None
    return SimResult(**{**result.__dict__, "slope": slope})


def estimate_diversity(
    result: SimResult,
    window: tuple[int, int] | None = None,
    against: str = "snr",
    unit: ErrorUnit | None = None,
    min_errors: int = MIN_ERRORS,
) -> float:
    """Least-squares slope of the error-rate curve on log-log axes.

    ``against="snr"`` returns ``-d log(rate) / d log(SNR)``; ``against="pe"``
    returns ``d log(rate) / d log(pe)``.  ``window`` is a half-open index
    range into ``result.points``.  Points with fewer than ``min_errors``
    errors are left out.
    """
    unit = ErrorUnit(unit or result.error_unit)
    lo, hi = window if window is not None else (0, len(result.points))
    chosen = list(range(lo, hi))
    good = [i for i in chosen if result.points[i].errors(unit) >= min_errors]
    if len(good) < 2:
        failed = [i for i in chosen if i not in good]
        raise InsufficientErrors(
            f"need 2 points with >= {min_errors} errors, got {len(good)}; failing points {failed}",
            failed,
        )
    y = np.log10([result.points[i].rate(unit) for i in good])
    if against == "snr":
        x = np.array([result.points[i].snr_db / 10.0 for i in good])
        sign = -1.0
    elif against == "pe":
        x = np.log10([result.points[i].pe for i in good])
        sign = 1.0
    else:
        raise BadArguments(f"against must be 'snr' or 'pe', got {against!r}")
    slope = np.polyfit(x, y, 1)[0]
    return float(sign * slope)


CSV_COLUMNS = (
    "scheme", "M", "k1", "k2", "q", "snr_db", "pe", "r", "trials", "frame_errors",
    "fer", "fer_ci_lo", "fer_ci_hi", "msg_errors", "msg_error_rate",
)


def _fmt(x: float) -> str:
    return format(x, ".10g")


def format_csv(result: SimResult) -> str:
    lines = [
        f"# seed={result.seed}",
        f"# code_fingerprint={result.code_fingerprint or 'none'}",
        f"# channel_mode={result.channel_mode.value}",
        f"# error_unit={result.error_unit.value}",
        "# rng=philox4x64-10 key=seed+2^64*point word=trial*draws",
    ]
    lines += [f"# note={n}" for n in result.notes]
    lines.append(",".join(CSV_COLUMNS))
    for p in result.points:
        lo, hi = p.fer_ci
        lines.append(",".join([
            result.scheme.value, str(result.M), str(result.k1), str(result.k2), str(result.q),
            _fmt(p.snr_db), _fmt(p.pe), _fmt(result.rate), str(p.trials), str(p.frame_errors),
            _fmt(p.fer), _fmt(lo), _fmt(hi), str(p.message_errors), _fmt(p.message_error_rate),
        ]))
    slope = "none" if result.slope is None else _fmt(result.slope)
    lines.append(f"# slope={slope} unit={result.error_unit.value}")
    return "\n".join(lines) + "\n"
