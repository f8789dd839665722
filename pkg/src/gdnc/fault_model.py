"""Faulty transfer matrices for GDNC and their composite distance.

Layout shared by every module: row ``(j-1)*k1 + (t-1)`` of P carries the
message of user j from broadcast slot t, and parity columns
``(i-1)*k2 .. (i-1)*k2 + k2 - 1`` are the k2 parities sent by user i.
Users and slots are numbered from 1.

When user i fails to decode the slot-t packet of user j it substitutes an
all-zero packet, which zeroes the k2 entries of row (j, t) inside user i's
parity block.  The composite distance of a code is the minimum over all
combinations of such faults of ``d_min(faulty code) + number of faults``;
it is the diversity order the transfer matrix guarantees.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .block_code import SystematicCode, min_distance, min_weight, DEFAULT_BUDGET
from .errors import BadArguments, BudgetExceeded, ShapeMismatch

DEFAULT_MAX_PATTERNS = 1 << 16


@dataclass(frozen=True)
class GdncParams:
    """GDNC shape: M users, k1 broadcast packets and k2 parities per user."""

    M: int
    k1: int
    k2: int

    def __post_init__(self):
        if self.M < 2 or self.k1 < 1 or self.k2 < 1:
            raise BadArguments(f"need M >= 2, k1 >= 1, k2 >= 1; got {self}")

    @property
    def n(self) -> int:
        return self.M * (self.k1 + self.k2)

    @property
    def k(self) -> int:
        return self.M * self.k1

    @property
    def rate(self) -> float:
        return self.k1 / (self.k1 + self.k2)

    @property
    def num_events(self) -> int:
        """Number of possible inter-user fault events, k1 * M * (M - 1)."""
        return self.k1 * self.M * (self.M - 1)

    @property
    def max_diversity(self) -> int:
        return self.M + self.k2

    def message_row(self, user: int, slot: int) -> int:
        return (user - 1) * self.k1 + (slot - 1)

    def parity_cols(self, user: int) -> range:
        """Columns of P holding the parities of ``user``."""
        return range((user - 1) * self.k2, user * self.k2)

    def check_code(self, code: SystematicCode) -> None:
        if code.n != self.n or code.k != self.k:
            raise ShapeMismatch(
                f"code is ({code.n}, {code.k}) but M={self.M}, k1={self.k1}, k2={self.k2} "
                f"needs ({self.n}, {self.k})"
            )


@dataclass(frozen=True, order=True)
class FaultEvent:
    """Link ``source -> decoder`` in broadcast slot ``slot`` is in outage."""

    source: int
    decoder: int
    slot: int

    def validate(self, params: GdncParams) -> None:
        if not (1 <= self.source <= params.M and 1 <= self.decoder <= params.M):
            raise BadArguments(f"{self} names a user outside 1..{params.M}")
        if self.source == self.decoder:
            raise BadArguments(f"{self} is a self-link")
        if not 1 <= self.slot <= params.k1:
            raise BadArguments(f"{self} names a slot outside 1..{params.k1}")

    def entries(self, params: GdncParams) -> list[tuple[int, int]]:
        """The k2 entries of P zeroed by this event."""
        row = params.message_row(self.source, self.slot)
        return [(row, c) for c in params.parity_cols(self.decoder)]

    def __str__(self):
        return f"({self.source}->{self.decoder}, t={self.slot})"


def all_events(params: GdncParams) -> list[FaultEvent]:
    """Every possible event, ordered by (slot, source, decoder)."""
    return [
        FaultEvent(j, i, t)
        for t in range(1, params.k1 + 1)
        for j in range(1, params.M + 1)
        for i in range(1, params.M + 1)
        if i != j
    ]


@dataclass(frozen=True, init=False)
class FaultPattern:
    """A set of simultaneous fault events."""

    events: frozenset[FaultEvent]

    def __init__(self, events: Iterable[FaultEvent] = ()):
        object.__setattr__(self, "events", frozenset(events))

    @classmethod
    def from_indicator(cls, params: GdncParams, chi: Sequence[int]) -> "FaultPattern":
        events = all_events(params)
        if len(chi) != len(events):
            raise BadArguments(f"indicator has {len(chi)} bits, expected {len(events)}")
        return cls(e for e, bit in zip(events, chi) if bit)

    def indicator(self, params: GdncParams) -> list[int]:
        return [int(e in self.events) for e in all_events(params)]

    @property
    def count(self) -> int:
        return len(self.events)

    def entries(self, params: GdncParams) -> list[tuple[int, int]]:
        out = []
        for e in sorted(self.events):
            e.validate(params)
            out.extend(e.entries(params))
        return out

    def __iter__(self) -> Iterator[FaultEvent]:
        return iter(sorted(self.events))

    def __len__(self):
        return len(self.events)

    def __str__(self):
        return "{" + ", ".join(str(e) for e in self) + "}"


def immune_mask(params: GdncParams) -> np.ndarray:
    """Boolean k x (n-k) mask of the entries of P no fault can touch."""
    mask = np.zeros((params.k, params.n - params.k), dtype=bool)
    for i in range(1, params.M + 1):
        rows = slice((i - 1) * params.k1, i * params.k1)
        cols = slice((i - 1) * params.k2, i * params.k2)
        mask[rows, cols] = True
    return mask


def apply_faults(code: SystematicCode, params: GdncParams, pattern: FaultPattern) -> SystematicCode:
    params.check_code(code)
    if not pattern.events:
        return code
    return code.with_zeroed(pattern.entries(params))


@dataclass(frozen=True)
class CompositeDistance:
    value: int
    witness: FaultPattern
    faulty_distance: int
    patterns_evaluated: int
    exact: bool = True

    def __iter__(self):
        # allows ``value, witness = composite_distance(...)``
        return iter((self.value, self.witness))


def composite_distance(
    code: SystematicCode,
    params: GdncParams,
    max_patterns: int | None = DEFAULT_MAX_PATTERNS,
    budget: int | None = DEFAULT_BUDGET,
    partial: bool = False,
) -> CompositeDistance:
    """Exact minimum over fault patterns of ``d_min(faulty) + fault count``.

    Patterns are visited in order of increasing fault count.  Two bounds
    prune the search without affecting exactness:

    * a pattern with c faults can only improve the current best ``b`` if
      ``1 + c < b``, so the scan stops at ``c = b - 1``;
    * the faulty codeword ``uG'`` differs from ``uG`` only inside the
      parity blocks of the decoders involved, so
      ``d_min(faulty) >= d_min - k2 * (#distinct decoders)``; patterns whose
      bound cannot beat ``b`` are skipped.

    ``max_patterns`` caps the number of faulty codes whose distance is
    actually computed.  Exceeding it raises :class:`BudgetExceeded` carrying
    the best value seen so far as ``upper_bound``; with ``partial=True`` that
    upper bound is returned instead, with ``exact=False``.
    """
    params.check_code(code)
    if budget is not None and code.field.q**code.k > budget:
        raise BudgetExceeded(f"q^k = {code.field.q}^{code.k} exceeds the budget {budget}")
    events = all_events(params)
    entries = [np.array(e.entries(params)) for e in events]
    base = code.P.data
    d0 = min_distance(code, budget=None)
    best, best_d, witness = d0, d0, FaultPattern()
    evaluated = 1
    for count in range(1, len(events) + 1):
        if 1 + count >= best:
            break
        for combo in itertools.combinations(range(len(events)), count):
            decoders = {events[i].decoder for i in combo}
            lower = max(1, d0 - params.k2 * len(decoders))
            if lower + count >= best:
                continue
            evaluated += 1
            if max_patterns is not None and evaluated > max_patterns:
                if partial:
                    return CompositeDistance(best, witness, best_d, evaluated - 1, exact=False)
                raise BudgetExceeded(
                    f"more than {max_patterns} fault patterns need evaluation",
                    upper_bound=best,
                    witness=witness,
                )
            P = base.copy()
            for i in combo:
                P[entries[i][:, 0], entries[i][:, 1]] = 0
            d, _ = min_weight(code.field, P, stop_at=lower)
            if d + count < best:
                best, best_d = d + count, d
                witness = FaultPattern(events[i] for i in combo)
    return CompositeDistance(best, witness, best_d, evaluated)


def guaranteed_diversity(code: SystematicCode, params: GdncParams, **kwargs) -> int:
    """Diversity order the transfer matrix guarantees under link failures."""
    return composite_distance(code, params, **kwargs).value
