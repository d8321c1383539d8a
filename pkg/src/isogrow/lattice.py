"""Staggered half-step lattice over the cut square Omega(r, h).

Index convention: an index (m, n) sits at x = m*eps/2, y = n*eps/2, hence
xi = (m - n)*eps/4 and eta = (m + n)*eps/4.  The four slot roles are the
parity classes of (m mod 2, n mod 2):

    (0, 0) vertex        surface samples F
    (1, 1) quad_center   v, w, v~, w~ and the quad normal
    (1, 0) x_edge        delta_x F, u_hat, tangent a, curvature l
    (0, 1) y_edge        delta_y F, u_check, tangent b, curvature k

Shifts act on indices as T_x: (m+1, n), T_y: (m, n+1), T_xi: (m+1, n-1),
T_eta: (m+1, n+1); all four preserve the staggered structure.

Domain membership (|xi| + |eta| <= r, -h < eta <= h) is decided once per
DomainSpec through integer thresholds, so boundary slots never flicker
with floating-point noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfDomain, WrongParity

VERTEX = "vertex"
QUAD_CENTER = "quad_center"
X_EDGE = "x_edge"
Y_EDGE = "y_edge"

_SLOT_BY_PARITY = {(0, 0): VERTEX, (1, 1): QUAD_CENTER, (1, 0): X_EDGE, (0, 1): Y_EDGE}

LatticeIndex = tuple  # (m, n) integers


def slot_of(idx: LatticeIndex) -> str:
    m, n = idx
    return _SLOT_BY_PARITY[(m & 1, n & 1)]


def shift(idx: LatticeIndex, direction: str, sign: int = 1) -> LatticeIndex:
    """One half-step shift of an index; direction in {x, y, xi, eta}."""
    m, n = idx
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if direction == "x":
        return (m + sign, n)
    if direction == "y":
        return (m, n + sign)
    if direction == "xi":
        return (m + sign, n - sign)
    if direction == "eta":
        return (m + sign, n + sign)
    raise ValueError(f"unknown direction {direction!r}")


def _int_threshold(t: float) -> int:
    """Largest integer <= t, robust against t being a float hair below an integer."""
    guard = 1e-9 * max(1.0, abs(t))
    return int(np.floor(t + guard))


@dataclass(frozen=True)
class DomainSpec:
    """Omega(r, h) sampled at mesh width eps.

    Vertices live on even-even indices; eta obeys the half-open cut
    -h < eta <= h. h may be as small as eps/2 (the initial strip).
    """

    r: float
    h: float
    eps: float
    m_max: int = field(init=False)
    s_max: int = field(init=False)
    s_min: int = field(init=False)

    def __post_init__(self):
        if not (self.r > 0 and self.h > 0 and self.eps > 0):
            raise ValueError("r, h, eps must be positive")
        if self.h > self.r:
            raise ValueError("h must not exceed r")
        if self.h < self.eps / 2 * (1 - 1e-12):
            raise ValueError("h must be at least eps/2")
        object.__setattr__(self, "m_max", _int_threshold(2 * self.r / self.eps))
        t = 4 * self.h / self.eps
        s_max = _int_threshold(t)
        # strict lower cut: s > -t
        guard = 1e-9 * max(1.0, t)
        s_min = -s_max + 1 if abs(t - round(t)) < guard else -s_max
        object.__setattr__(self, "s_max", s_max)
        object.__setattr__(self, "s_min", s_min)

    def contains(self, idx: LatticeIndex) -> bool:
        m, n = idx
        return (abs(m) <= self.m_max and abs(n) <= self.m_max
                and self.s_min <= m + n <= self.s_max)

    def xi_eta(self, idx: LatticeIndex) -> tuple[float, float]:
        m, n = idx
        return ((m - n) * self.eps / 4.0, (m + n) * self.eps / 4.0)

    def xy(self, idx: LatticeIndex) -> tuple[float, float]:
        m, n = idx
        return (m * self.eps / 2.0, n * self.eps / 2.0)


class StaggeredField:
    """Dense (masked) storage for one staggered slot family.

    Values are float scalars or 3-vectors indexed by (m, n) over the
    bounding box |m|, |n| <= spec.m_max.  Slots are write-once during
    construction and immutable afterwards by convention.
    """

    def __init__(self, spec: DomainSpec, slot_kind: str, vector: bool = False):
        if slot_kind not in (VERTEX, QUAD_CENTER, X_EDGE, Y_EDGE):
            raise ValueError(f"unknown slot kind {slot_kind!r}")
        self.spec = spec
        self.slot_kind = slot_kind
        self.offset = spec.m_max
        size = 2 * spec.m_max + 1
        shape = (size, size, 3) if vector else (size, size)
        self.data = np.full(shape, np.nan)
        self.mask = np.zeros((size, size), dtype=bool)

    def _pos(self, idx: LatticeIndex) -> tuple[int, int]:
        m, n = idx
        return (m + self.offset, n + self.offset)

    def check_slot(self, idx: LatticeIndex):
        if slot_of(idx) != self.slot_kind:
            raise WrongParity(f"index {idx} is a {slot_of(idx)} slot, not {self.slot_kind}")

    def has(self, idx: LatticeIndex) -> bool:
        m, n = idx
        if abs(m) > self.offset or abs(n) > self.offset:
            return False
        return bool(self.mask[self._pos(idx)])

    def get(self, idx: LatticeIndex):
        if not self.has(idx):
            raise OutOfDomain(f"no value stored at {idx}")
        return self.data[self._pos(idx)]

    def set(self, idx: LatticeIndex, value):
        self.check_slot(idx)
        if not self.spec.contains(idx):
            raise OutOfDomain(f"index {idx} outside {self.spec}")
        i, j = self._pos(idx)
        self.data[i, j] = value
        self.mask[i, j] = True

    def indices(self) -> list[LatticeIndex]:
        """Stored indices in deterministic (n, m) row-major order."""
        js, is_ = np.nonzero(self.mask.T)
        return [(int(i - self.offset), int(j - self.offset)) for j, i in zip(js, is_)]


def diff(fld: StaggeredField, direction: str, at: LatticeIndex):
    """Central difference quotient (T f - T^-1 f)/eps; lives on the complementary slot."""
    fwd = shift(at, direction, +1)
    bwd = shift(at, direction, -1)
    return (fld.get(fwd) - fld.get(bwd)) / fld.spec.eps


def elementary_square(center: LatticeIndex) -> tuple[LatticeIndex, ...]:
    """Corner indices (p1, p2, p3, p4) of the quad around a quad-center slot.

    Ordering follows the eta-increasing cyclic convention
    p1 = T_eta^-1, p2 = T_xi, p3 = T_eta, p4 = T_xi^-1.
    """
    if slot_of(center) != QUAD_CENTER:
        raise WrongParity(f"{center} is a {slot_of(center)} slot, not a quad center")
    return (shift(center, "eta", -1), shift(center, "xi", +1),
            shift(center, "eta", +1), shift(center, "xi", -1))


@dataclass
class DiscreteSurface:
    """Vertex positions of an eps-discrete surface over a DomainSpec."""

    spec: DomainSpec
    positions: StaggeredField

    @property
    def eps(self) -> float:
        return self.spec.eps

    @classmethod
    def empty(cls, spec: DomainSpec) -> "DiscreteSurface":
        return cls(spec=spec, positions=StaggeredField(spec, VERTEX, vector=True))

    def complete_quad_centers(self) -> list[LatticeIndex]:
        """Quad centers whose four corners all carry positions, row-major."""
        out = []
        M = self.spec.m_max
        for n in range(-M, M + 1):
            if n & 1 == 0:
                continue
            for m in range(-M, M + 1):
                if m & 1 == 0:
                    continue
                c = (m, n)
                if all(self.positions.has(p) for p in elementary_square(c)):
                    out.append(c)
        return out

    def corner_points(self, center: LatticeIndex):
        return tuple(self.positions.get(p) for p in elementary_square(center))
