"""Analytical outage probabilities and diversity bounds.

Single links follow Rayleigh block fading: a link with average SNR ``snr``
and rate ``r`` is in outage when ``|h|^2 < g = (2^r - 1) / snr``, which
happens with probability ``pe = 1 - exp(-g)``.

The GDNC expressions are the worst-case (upper-bound) forms: they assume a
message can only be protected by the parities of users that decoded it.
They are meant to be compared with simulation on slope, not on absolute
level.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

from .errors import BadArguments, UnknownScheme


@dataclass(frozen=True)
class ChannelParams:
    """Average link SNR (linear) and rate r in bits per channel use.

    With ``approximate=True`` the single-link outage is taken as ``g``
    instead of ``1 - exp(-g)``.
    """

    snr: float
    rate: float = 0.5
    approximate: bool = False

    def __post_init__(self):
        if not self.snr > 0 or not self.rate > 0:
            raise BadArguments(f"snr and rate must be positive, got {self.snr}, {self.rate}")

    @classmethod
    def from_db(cls, snr_db: float, rate: float = 0.5, approximate: bool = False) -> "ChannelParams":
        return cls(10.0 ** (snr_db / 10.0), rate, approximate)

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.snr)

    @property
    def g(self) -> float:
        return (2.0**self.rate - 1.0) / self.snr

    @property
    def pe(self) -> float:
        return self.g if self.approximate else -math.expm1(-self.g)


def single_link_outage(params: ChannelParams) -> float:
    return -math.expm1(-params.g)


def snr_for_pe(pe: float, rate: float = 0.5) -> float:
    """Linear SNR at which the single-link outage equals ``pe``."""
    if not 0 < pe < 1:
        raise BadArguments(f"pe must lie in (0, 1), got {pe}")
    return (2.0**rate - 1.0) / -math.log1p(-pe)


def snr_db_for_pe(pe: float, rate: float = 0.5) -> float:
    return 10.0 * math.log10(snr_for_pe(pe, rate))


class Baseline(str, enum.Enum):
    BNC = "bnc"
    DAF = "daf"
    DNC2_RECIPROCAL = "dnc2-reciprocal"
    DNC2_NONRECIPROCAL = "dnc2-nonreciprocal"


# (coefficient, exponent) of the leading-order outage of User 1.
_BASELINES = {
    Baseline.BNC: (1.0, 2),
    Baseline.DAF: (1.5, 2),
    Baseline.DNC2_RECIPROCAL: (3.5, 3),
    Baseline.DNC2_NONRECIPROCAL: (4.0, 3),
}


def baseline_coefficients(scheme) -> tuple[float, int]:
    try:
        return _BASELINES[Baseline(scheme)]
    except ValueError:
        raise UnknownScheme(f"unknown baseline scheme {scheme!r}") from None


def baseline_outage(scheme, pe: float) -> float:
    """Leading-order two-user outage: pe^2, 1.5 pe^2, 3.5 pe^3 or 4 pe^3."""
    if not 0 < pe < 1:
        raise BadArguments(f"pe must lie in (0, 1), got {pe}")
    coef, exponent = baseline_coefficients(scheme)
    return _flag_leading(coef * pe**exponent)


def _flag_leading(value: float) -> float:
    if value > 1.0:
        warnings.warn(f"leading-order outage {value:.3g} exceeds 1; pe is outside its range of validity",
                      RuntimeWarning, stacklevel=3)
    return value


def gamma_multiplicity(dI: int, d: int, k2: int) -> int:
    """Number of outage patterns C(dI + d*k2 - 1, d*k2).

    ``dI`` is the number of messages known to the users that decoded the
    message under study and ``d`` the number of those users.
    """
    if dI < 1 or d < 1 or k2 < 1:
        raise BadArguments(f"need dI, d, k2 >= 1; got {dI}, {d}, {k2}")
    return math.comb(dI + d * k2 - 1, d * k2)


def _logsumexp(values: list[float]) -> float:
    top = max(values)
    if top == -math.inf:
        return top
    return top + math.log(sum(math.exp(v - top) for v in values))


def _log_binom_tail(N: int, lo: int, pe: float) -> float:
    """log P[Binomial(N, pe) >= lo]."""
    if lo <= 0:
        return 0.0
    if lo > N:
        return -math.inf
    lp, lq = math.log(pe), math.log1p(-pe)
    return _logsumexp([math.log(math.comb(N, l)) + l * lp + (N - l) * lq for l in range(lo, N + 1)])


def _check_pe(pe: float) -> None:
    if not 0 < pe < 1:
        raise BadArguments(f"pe must lie in (0, 1), got {pe}")


def gdnc_conditional_outage(pe: float, dbar: int, dI: int, M: int, k2: int, mode: str = "exact") -> float:
    """Outage of one message given that ``dbar`` partners failed to decode it.

    ``exact`` is the full binomial tail: the direct packet fails and at
    least ``d*k2`` of the other ``dI + d*k2 - 1`` packets fail, where
    ``d = M - dbar``.  ``leading`` keeps the dominant term
    ``gamma * pe^(d*k2 + 1)``.
    """
    _check_pe(pe)
    if not 0 <= dbar <= M - 1 or dI < 1 or k2 < 1:
        raise BadArguments(f"bad arguments dbar={dbar}, dI={dI}, M={M}, k2={k2}")
    d = M - dbar
    if mode == "leading":
        return _flag_leading(gamma_multiplicity(dI, d, k2) * pe ** (d * k2 + 1))
    if mode != "exact":
        raise BadArguments(f"mode must be 'exact' or 'leading', got {mode!r}")
    return math.exp(math.log(pe) + _log_binom_tail(dI + d * k2 - 1, d * k2, pe))


def gdnc_overall_outage(pe: float, M: int, k1: int, k2: int, mode: str = "exact", bound: str = "upper") -> float:
    """Outage of one GDNC message averaged over the partners' decoding.

    ``bound`` selects the number of messages known by the helping users:
    ``"upper"`` uses the worst case M*k1, ``"lower"`` uses k1.  The
    ``leading`` mode returns ``gamma * pe^(M + k2)`` with gamma taken at the
    same number of messages.
    """
    _check_pe(pe)
    if M < 2 or k1 < 1 or k2 < 1:
        raise BadArguments(f"need M >= 2, k1 >= 1, k2 >= 1; got {M}, {k1}, {k2}")
    if bound not in ("upper", "lower"):
        raise BadArguments(f"bound must be 'upper' or 'lower', got {bound!r}")
    dI = M * k1 if bound == "upper" else k1
    if mode == "leading":
        return _flag_leading(gamma_multiplicity(dI, 1, k2) * pe ** (M + k2))
    if mode != "exact":
        raise BadArguments(f"mode must be 'exact' or 'leading', got {mode!r}")
    lp, lq = math.log(pe), math.log1p(-pe)
    terms = []
    for dbar in range(M):
        weight = math.log(math.comb(M - 1, dbar)) + dbar * lp + (M - 1 - dbar) * lq
        cond = gdnc_conditional_outage(pe, dbar, dI, M, k2, "exact")
        terms.append(weight + math.log(cond))
    return math.exp(_logsumexp(terms))


@dataclass(frozen=True)
class DiversityBounds:
    M: int
    k1: int
    k2: int

    @property
    def achieved(self) -> int:
        return self.M + self.k2

    @property
    def singleton_ub(self) -> int:
        return self.k2 * self.M + 1

    @property
    def dnc_reference(self) -> int:
        return 2 * self.M - 1

    def alpha_ub(self, alpha: int) -> int:
        """Singleton bound of a rate-1/M code spanning alpha*M broadcast slots."""
        return alpha * (self.M**2 - self.M) + 1

    @property
    def dnc_field_bound(self) -> int:
        return math.comb(self.M**2 - 1, self.M - 1)

    @property
    def gdnc_field_bound(self) -> int:
        return self.M * (self.k1 + self.k2)

    @property
    def rate(self) -> float:
        return self.k1 / (self.k1 + self.k2)


def diversity_bounds(M: int, k1: int, k2: int) -> DiversityBounds:
    if M < 2 or k1 < 1 or k2 < 1:
        raise BadArguments(f"need M >= 2, k1 >= 1, k2 >= 1; got {M}, {k1}, {k2}")
    return DiversityBounds(M, k1, k2)
