"""Trinomial outcome model for chess games.

A game ends in one of three ways (white wins, black wins, draw), so the
outcome of a single game is a draw from a probability vector
``[p_w, p_b, p_d]``.  Under a neutral opening played by two equal engines
the vector decomposes into a first-move advantage (FMA) and a
move-imperfection rate (IMP)::

    p_w = FMA + IMP / 2
    p_b = IMP / 2
    p_d = 1 - FMA - IMP
"""

from __future__ import annotations

from dataclasses import dataclass

TOLERANCE = 1e-12


class DomainError(ValueError):
    """An argument lies outside the domain of the model."""


def _check_probability(name: str, value: float) -> None:
    if not (-TOLERANCE <= value <= 1.0 + TOLERANCE):
        raise DomainError(f"{name}={value!r} is not a probability in [0, 1]")


@dataclass(frozen=True)
class ProbabilityVector:
    """Generator of game outcomes (or its estimate from observed counts)."""

    p_w: float
    p_b: float
    p_d: float

    def __post_init__(self) -> None:
        for name in ("p_w", "p_b", "p_d"):
            _check_probability(name, getattr(self, name))
        total = self.p_w + self.p_b + self.p_d
        if abs(total - 1.0) > TOLERANCE:
            raise DomainError(f"components sum to {total!r}, expected 1")

    @property
    def decisive(self) -> float:
        return self.p_w + self.p_b

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_w, self.p_b, self.p_d)


@dataclass(frozen=True)
class OutcomeCounts:
    """Tallies of one match: white wins, black wins, draws and games played."""

    white: int
    black: int
    draws: int
    total: int

    def __post_init__(self) -> None:
        for name in ("white", "black", "draws", "total"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise DomainError(f"{name}={value!r} is not an integer count")
            if value < 0:
                raise DomainError(f"{name}={value!r} is negative")
        if self.white + self.black + self.draws != self.total:
            raise DomainError(
                f"white + black + draws = {self.white + self.black + self.draws}"
                f" does not equal total = {self.total}"
            )

    @classmethod
    def of(cls, white: int, black: int, draws: int) -> OutcomeCounts:
        return cls(white, black, draws, white + black + draws)

    @property
    def point(self) -> tuple[int, int]:
        """The ``(white wins, black wins)`` coordinates of this match."""
        return (self.white, self.black)


@dataclass(frozen=True)
class FmaImp:
    """First-move advantage and move-imperfection rate."""

    fma: float
    imp: float

    def __post_init__(self) -> None:
        if self.fma < -TOLERANCE:
            raise DomainError(f"fma={self.fma!r} is negative")
        if self.imp < -TOLERANCE:
            raise DomainError(f"imp={self.imp!r} is negative")
        if self.fma + self.imp > 1.0 + TOLERANCE:
            raise DomainError(f"fma + imp = {self.fma + self.imp!r} exceeds 1")


def make_vector(p_w: float, p_b: float) -> ProbabilityVector:
    """Build ``[p_w, p_b, 1 - p_w - p_b]``.

    Raises DomainError naming the offending component when either
    probability is negative or their sum exceeds one.
    """
    if p_w < 0:
        raise DomainError(f"p_w={p_w!r} is negative")
    if p_b < 0:
        raise DomainError(f"p_b={p_b!r} is negative")
    if p_w + p_b > 1.0 + TOLERANCE:
        raise DomainError(f"p_w + p_b = {p_w + p_b!r} exceeds 1, leaving p_d negative")
    return ProbabilityVector(p_w, p_b, max(0.0, 1.0 - p_w - p_b))


def neutral_vector(params: FmaImp) -> ProbabilityVector:
    """Outcome vector of a neutral opening between equal, imperfect players."""
    p_w = params.fma + params.imp / 2
    p_b = params.imp / 2
    p_d = 1.0 - params.fma - params.imp
    if p_d < 0:
        if p_d < -TOLERANCE:
            raise DomainError(f"fma + imp exceeds 1 (p_d = {p_d!r})")
        p_d = 0.0
    return ProbabilityVector(p_w, p_b, p_d)


def estimate_vector(counts: OutcomeCounts) -> ProbabilityVector:
    """Unbiased estimate ``[w/n, b/n, d/n]`` of the generating vector."""
    if counts.total == 0:
        raise DomainError("cannot estimate a probability vector from zero games")
    n = counts.total
    return ProbabilityVector(counts.white / n, counts.black / n, counts.draws / n)


def estimate_fma_imp(counts: OutcomeCounts) -> FmaImp:
    """Invert the neutral model: ``imp = 2b/n`` and ``fma = (w - b)/n``.

    Only meaningful for openings presumed neutral, where white wins at least
    as often as black; otherwise DomainError is raised.
    """
    if counts.total == 0:
        raise DomainError("cannot estimate FMA/IMP from zero games")
    if counts.black > counts.white:
        raise DomainError(
            f"black wins ({counts.black}) exceed white wins ({counts.white});"
            " the neutral model does not apply"
        )
    n = counts.total
    return FmaImp(fma=(counts.white - counts.black) / n, imp=2 * counts.black / n)
