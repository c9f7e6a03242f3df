"""The algebras B_s = R + R kappa_s with kappa_s^2 = -sign(s) s^2.

s > 0 gives a copy of C, s = 0 the dual numbers (kappa_0 = sigma), s < 0 the
split-complex numbers.  Elements are immutable and carry their tag so that
values over different s cannot be combined by accident.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, InvalidRescale, NoIdempotents, ZeroDivisor

ZERO_TOL = 1e-12


@dataclass(frozen=True)
class AlgebraTag:
    s: float

    def __post_init__(self):
        object.__setattr__(self, "s", float(self.s))
        if not np.isfinite(self.s):
            raise ContractError("algebra parameter must be finite")

    @property
    def kappa_sq(self):
        return -np.sign(self.s) * self.s * self.s

    @property
    def sign(self):
        return int(np.sign(self.s))

    def to_json(self):
        return {"s": self.s}

    @classmethod
    def from_json(cls, obj):
        return cls(float(obj["s"]))


def _check(z, w):
    if z.tag != w.tag:
        raise ContractError(f"algebra tags differ: s={z.tag.s} vs s={w.tag.s}")


@dataclass(frozen=True)
class BElem:
    re: float
    im: float
    tag: AlgebraTag

    def __post_init__(self):
        object.__setattr__(self, "re", float(self.re))
        object.__setattr__(self, "im", float(self.im))

    @classmethod
    def real(cls, x, tag):
        return cls(x, 0.0, tag)

    @classmethod
    def unit(cls, tag):
        """kappa_s itself."""
        return cls(0.0, 1.0, tag)

    def _lift(self, w):
        if isinstance(w, BElem):
            _check(self, w)
            return w
        return BElem(float(w), 0.0, self.tag)

    def __add__(self, w):
        w = self._lift(w)
        return BElem(self.re + w.re, self.im + w.im, self.tag)

    __radd__ = __add__

    def __neg__(self):
        return BElem(-self.re, -self.im, self.tag)

    def __sub__(self, w):
        return self + (-self._lift(w))

    def __rsub__(self, w):
        return self._lift(w) - self

    def __mul__(self, w):
        return mul(self, self._lift(w))

    __rmul__ = __mul__

    def __truediv__(self, w):
        return mul(self, invert(self._lift(w)))

    def __rtruediv__(self, w):
        return mul(self._lift(w), invert(self))

    def to_json(self):
        return [self.re, self.im]

    @classmethod
    def from_json(cls, pair, tag):
        re, im = pair
        return cls(float(re), float(im), tag)

    def close_to(self, w, tol=1e-12):
        w = self._lift(w)
        return abs(self.re - w.re) <= tol and abs(self.im - w.im) <= tol


def mul(z, w):
    _check(z, w)
    k2 = z.tag.kappa_sq
    return BElem(z.re * w.re + z.im * w.im * k2, z.re * w.im + z.im * w.re, z.tag)


def conj(z):
    return BElem(z.re, -z.im, z.tag)


def sqnorm(z):
    """a^2 - b^2 kappa_s^2, the real number z * conj(z)."""
    return z.re * z.re - z.im * z.im * z.tag.kappa_sq


def is_zero_divisor(z):
    scale = max(abs(z.re), abs(z.im) * max(abs(z.tag.s), 1.0))
    return abs(sqnorm(z)) <= ZERO_TOL * max(scale * scale, 1e-300)


def invert(z):
    if is_zero_divisor(z):
        raise ZeroDivisor(f"{z.re} + {z.im} kappa has zero square norm over s={z.tag.s}")
    n = sqnorm(z)
    return BElem(z.re / n, -z.im / n, z.tag)


def rescale_algebra(z, s):
    """Map a + b*unit in B_{sign s} to a + (b/|s|) kappa_s in B_s."""
    s = float(s)
    if s == 0.0:
        raise InvalidRescale("rescaling to s = 0 is a limit, not a map")
    if z.tag.s != np.sign(s):
        raise InvalidRescale(f"source algebra must be B_{int(np.sign(s))}, got s={z.tag.s}")
    return BElem(z.re, z.im / abs(s), AlgebraTag(s))


def unrescale_algebra(z):
    """Inverse of rescale_algebra: B_s -> B_{sign s}."""
    s = z.tag.s
    if s == 0.0:
        raise InvalidRescale("B_0 is not isomorphic to B_1 or B_-1")
    return BElem(z.re, z.im * abs(s), AlgebraTag(np.sign(s)))


def idempotents(tag):
    """e+ = (1 + kappa/|s|)/2 and e- = (1 - kappa/|s|)/2 for s < 0."""
    if tag.s >= 0:
        raise NoIdempotents(f"B_s has no nontrivial idempotents for s={tag.s}")
    h = 0.5 / abs(tag.s)
    return BElem(0.5, h, tag), BElem(0.5, -h, tag)


def split(z):
    """Idempotent coordinates (z+, z-) with z = z+ e+ + z- e- (s < 0)."""
    if z.tag.s >= 0:
        raise NoIdempotents(f"no idempotent splitting for s={z.tag.s}")
    a = abs(z.tag.s)
    return z.re + a * z.im, z.re - a * z.im


def unsplit(zp, zm, tag):
    a = abs(tag.s)
    return BElem(0.5 * (zp + zm), 0.5 * (zp - zm) / a, tag)
