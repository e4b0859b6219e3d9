"""Unitary representations of rotations and cyclic translations.

Generators are dimensionless; the physical observable is the generator
times a scale ``hbar``.  Spin matrices use the basis ``m = j, j-1, ..., -j``
(largest ``m`` first), the natural order of the ladder construction.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .contexts import Context, context_from_observable, standard_context
from .exceptions import BadAxis, BadDimension, NotHalfInteger, TooLarge

MAX_SPIN = 25
AXIS_TOL = 1e-10


def parse_spin(j):
    """Return ``j`` as a Fraction with ``2j`` a nonnegative integer.

    Accepts ints, floats, Fractions and strings such as ``"3/2"`` or ``"1.5"``.
    """
    try:
        if isinstance(j, str):
            value = Fraction(j.strip())
        elif isinstance(j, float):
            value = Fraction(j).limit_denominator(1000)
            if abs(float(value) - j) > 1e-12:
                raise NotHalfInteger(f"j = {j!r} is not a half-integer")
        else:
            value = Fraction(j)
    except (ValueError, ZeroDivisionError) as exc:
        raise NotHalfInteger(f"cannot read spin {j!r}") from exc
    if value < 0 or (2 * value).denominator != 1:
        raise NotHalfInteger(f"j = {j!r} is not a nonnegative half-integer")
    if value > MAX_SPIN:
        raise TooLarge(f"j = {value} exceeds {MAX_SPIN}")
    return value


@dataclass(frozen=True)
class SpinRepresentation:
    j: Fraction
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    @property
    def dim(self):
        return int(2 * self.j + 1)

    @property
    def generators(self):
        return self.jx, self.jy, self.jz

    def m_values(self):
        j = float(self.j)
        return j - np.arange(self.dim)

    def commutator_residuals(self):
        """``||[j_a, j_b] - i j_c||_F`` for the three cyclic pairs."""
        x, y, z = self.generators
        return (
            float(np.linalg.norm(x @ y - y @ x - 1j * z)),
            float(np.linalg.norm(y @ z - z @ y - 1j * x)),
            float(np.linalg.norm(z @ x - x @ z - 1j * y)),
        )

    def casimir_residual(self):
        x, y, z = self.generators
        j = float(self.j)
        return float(np.linalg.norm(x @ x + y @ y + z @ z - j * (j + 1) * np.eye(self.dim)))


def spin_matrices(j):
    """Dimensionless angular momentum matrices from the ladder operators."""
    j = parse_spin(j)
    jf = float(j)
    n = int(2 * j + 1)
    m = jf - np.arange(n)
    jz = np.diag(m).astype(np.complex128)
    # <m+1| j+ |m> sits just above the diagonal because m decreases down the rows
    up = np.sqrt(jf * (jf + 1) - m[1:] * (m[1:] + 1))
    jplus = np.diag(up, k=1).astype(np.complex128)
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2
    jy = (jplus - jminus) / 2j
    return SpinRepresentation(j, jx, jy, jz)


@dataclass(frozen=True)
class PhysicalScale:
    hbar: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise ValueError(f"hbar must be positive, got {self.hbar!r}")


def as_rotation_vector(u):
    u = np.asarray(u, dtype=float).ravel()
    if u.size != 3 or not np.all(np.isfinite(u)):
        raise ValueError(f"rotation vector must be 3 finite reals, got {u!r}")
    return u


def rotation_generator(rep, u):
    u = as_rotation_vector(u)
    return u[0] * rep.jx + u[1] * rep.jy + u[2] * rep.jz


def rotation_unitary(rep, u):
    """``exp(-i u . j)``."""
    return linalg.unitary_from_generator(rotation_generator(rep, u), 1.0)


def _quaternion(u):
    angle = float(np.linalg.norm(u))
    if angle == 0.0:
        return np.array([1.0, 0.0, 0.0, 0.0])
    return np.concatenate([[math.cos(angle / 2)], math.sin(angle / 2) * u / angle])


def _qmul(a, b):
    w1, v1 = a[0], a[1:]
    w2, v2 = b[0], b[1:]
    return np.concatenate([[w1 * w2 - v1 @ v2], w1 * v2 + w2 * v1 + np.cross(v1, v2)])


def canonical_rotation(q):
    """Axis-angle vector of a unit quaternion, angle in [0, pi].

    At angle pi the axis is oriented so its first nonzero component is positive.
    """
    q = np.asarray(q, dtype=float)
    q = q / np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    w, v = min(q[0], 1.0), q[1:]
    s = np.linalg.norm(v)
    if s < 1e-15:
        return np.zeros(3)
    angle = 2.0 * math.atan2(s, w)
    axis = v / s
    if abs(angle - math.pi) < 1e-12:
        nz = np.flatnonzero(np.abs(axis) > 1e-12)
        if nz.size and axis[nz[0]] < 0:
            axis = -axis
    return angle * axis


def rotation_compose(u1, u2):
    """Axis-angle vector of ``R(u1) R(u2)``."""
    q = _qmul(_quaternion(as_rotation_vector(u1)), _quaternion(as_rotation_vector(u2)))
    return canonical_rotation(q)


def projective_phase(rep, u1, u2):
    """``arg Tr(U(u1 u2)^dagger U(u1) U(u2))``, the phase best aligning the two sides."""
    lhs = rotation_unitary(rep, u1) @ rotation_unitary(rep, u2)
    comp = rotation_unitary(rep, rotation_compose(u1, u2))
    return float(np.angle(np.trace(comp.conj().T @ lhs)))


def representation_defect(rep, u1, u2):
    """``min_phi ||U(u1) U(u2) - e^{i phi} U(u1 * u2)||_F``."""
    lhs = rotation_unitary(rep, u1) @ rotation_unitary(rep, u2)
    comp = rotation_unitary(rep, rotation_compose(u1, u2))
    phi = np.angle(np.trace(comp.conj().T @ lhs))
    return float(np.linalg.norm(lhs - np.exp(1j * phi) * comp))


def physical_observable(rep, axis, scale=None):
    """``hbar * (axis . j)`` for a unit ``axis``."""
    scale = scale or PhysicalScale()
    axis = np.asarray(axis, dtype=float).ravel()
    if axis.size != 3 or not np.all(np.isfinite(axis)):
        raise BadAxis("axis must be 3 finite reals")
    if abs(np.linalg.norm(axis) - 1.0) > AXIS_TOL:
        raise BadAxis(f"axis must be a unit vector, norm is {np.linalg.norm(axis)!r}")
    return scale.hbar * rotation_generator(rep, axis)


def spin_context(rep, axis, id, scale=None):
    """Context of the spin component along ``axis``.

    Outcomes follow the ascending-eigenvalue order of contexts built from
    observables, i.e. ``m = -j`` first, reversed from the spin matrices.
    """
    ctx, _ = context_from_observable(physical_observable(rep, axis, scale), id)
    return ctx


def global_phase(U, tol=1e-9):
    """The scalar ``c`` if ``U`` is within ``tol`` of ``c I``, else None."""
    U = np.asarray(U)
    c = np.trace(U) / U.shape[0]
    if np.linalg.norm(U - c * np.eye(U.shape[0])) <= tol:
        return complex(c)
    return None


@dataclass(frozen=True)
class CyclicTranslationRep:
    n: int
    position_context: Context
    momentum_context: Context
    p_dimensionless: np.ndarray

    def translation(self, a=1.0):
        """``exp(-i a p)``; integer ``a`` shifts position states by ``a`` sites."""
        return linalg.unitary_from_generator(self.p_dimensionless, a)

    def physical_momentum(self, scale=None):
        scale = scale or PhysicalScale()
        return scale.hbar * self.p_dimensionless


def cyclic_translation_rep(n):
    """Translations of the ring Z_n.

    Momentum eigenvectors are discrete Fourier vectors
    ``f_k(x) = exp(2 pi i k x / n) / sqrt(n)`` with eigenvalue ``2 pi k / n``.
    """
    if n < 2:
        raise BadDimension(f"n must be >= 2, got {n}")
    x = np.arange(n)
    F = np.exp(2j * np.pi * np.outer(x, x) / n) / math.sqrt(n)
    k_values = 2 * np.pi * x / n
    p = (F * k_values) @ F.conj().T
    p = (p + p.conj().T) / 2
    position = standard_context(n, id=f"position-{n}")
    momentum = Context(f"momentum-{n}", F, [f"k={k}" for k in range(n)])
    return CyclicTranslationRep(n, position, momentum, p)


def spin_to_json(rep):
    return {
        "j": f"{rep.j.numerator}/{rep.j.denominator}",
        "dim": rep.dim,
        "jx": linalg.matrix_to_json(rep.jx),
        "jy": linalg.matrix_to_json(rep.jy),
        "jz": linalg.matrix_to_json(rep.jz),
    }


def spin_from_json(obj):
    j = parse_spin(obj["j"])
    rep = SpinRepresentation(
        j,
        linalg.matrix_from_json(obj["jx"]),
        linalg.matrix_from_json(obj["jy"]),
        linalg.matrix_from_json(obj["jz"]),
    )
    if rep.dim != int(obj["dim"]) or rep.jz.shape != (rep.dim, rep.dim):
        raise BadDimension("dimension does not match j")
    return rep
