"""Nodal discontinuous Galerkin discretization of the 1D Burgers equation.

Strong form on Legendre-Gauss-Lobatto collocation points with a lumped mass
matrix.  Each element is one integrator set: its derivative splits into a
volume part (flux divergence plus any physical boundary face) and one
coupling term per shared face, carrying the HLL flux correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


class OutOfDomain(ValueError):
    pass


class MissingTrace(KeyError):
    pass


def lgl_nodes_weights(p: int, tol: float = 1e-15, maxiter: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """``p`` Legendre-Gauss-Lobatto nodes and weights on ``[-1, 1]``."""
    if p < 2:
        raise ValueError("need at least two nodes")
    n = p - 1
    # Chebyshev-Gauss-Lobatto initial guess, ascending
    x = -np.cos(np.pi * np.arange(p) / n)
    P = np.zeros((p, p))
    for _ in range(maxiter):
        P[:, 0] = 1.0
        P[:, 1] = x
        for j in range(2, p):
            P[:, j] = ((2 * j - 1) * x * P[:, j - 1] - (j - 1) * P[:, j - 2]) / j
        x_old = x
        x = x_old - (x * P[:, n] - P[:, n - 1]) / (p * P[:, n])
        if np.max(np.abs(x - x_old)) < tol:
            break
    P[:, 0] = 1.0
    P[:, 1] = x
    for j in range(2, p):
        P[:, j] = ((2 * j - 1) * x * P[:, j - 1] - (j - 1) * P[:, j - 2]) / j
    w = 2.0 / (n * p * P[:, n] ** 2)
    # enforce exact endpoints and symmetry
    x = 0.5 * (x - x[::-1])
    x[0], x[-1] = -1.0, 1.0
    w = 0.5 * (w + w[::-1])
    return x, w


def diff_matrix(nodes) -> np.ndarray:
    """Nodal differentiation matrix, ``D[i, j] = l_j'(x_i)``."""
    x = np.asarray(nodes, dtype=float)
    if len(np.unique(x)) != len(x):
        from .coefficients import DuplicateNodes

        raise DuplicateNodes("differentiation nodes not distinct")
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / np.prod(diff, axis=1)
    D = (bary[None, :] / bary[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@dataclass(frozen=True)
class DgMesh:
    boundaries: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    D: np.ndarray
    jacobians: np.ndarray
    periodic: bool

    @classmethod
    def uniform(cls, left: float, right: float, n_elements: int, p: int = 10, periodic: bool = False) -> DgMesh:
        b = np.linspace(left, right, n_elements + 1)
        x, w = lgl_nodes_weights(p)
        return cls(b, x, w, diff_matrix(x), 0.5 * np.diff(b), periodic)

    @property
    def n_elements(self) -> int:
        return len(self.boundaries) - 1

    @property
    def p(self) -> int:
        return len(self.nodes)

    @property
    def length(self) -> float:
        return float(self.boundaries[-1] - self.boundaries[0])

    def coordinates(self) -> np.ndarray:
        """Physical node coordinates, shape ``(n_elements, p)``."""
        mid = 0.5 * (self.boundaries[:-1] + self.boundaries[1:])
        return mid[:, None] + self.jacobians[:, None] * self.nodes[None, :]

    def project(self, f: Callable) -> list[np.ndarray]:
        return [np.asarray(f(x), dtype=float) for x in self.coordinates()]


def flux(u):
    return 0.5 * u * u


def hll_flux(uL: float, uR: float) -> float:
    sL, sR = min(uL, uR), max(uL, uR)
    fL, fR = 0.5 * uL * uL, 0.5 * uR * uR
    if sL >= 0:
        return fL
    if sR <= 0:
        return fR
    return (sR * fL - sL * fR + sL * sR * (uR - uL)) / (sR - sL)


def volume_rhs(u, D, jacobian: float) -> np.ndarray:
    """Strong-form flux divergence ``-(1/J) D (u^2 / 2)``."""
    u = np.asarray(u, dtype=float)
    return -(D @ (0.5 * u * u)) / jacobian


def left_face_term(u_own: float, u_outside: float) -> float:
    # numerical minus interior flux at the left face; enters with a + sign
    return hll_flux(u_outside, u_own) - 0.5 * u_own * u_own


def right_face_term(u_own: float, u_outside: float) -> float:
    # enters with a - sign
    return hll_flux(u_own, u_outside) - 0.5 * u_own * u_own


def boundary_coupling(u, uL: float, uR: float, weights, jacobian: float) -> np.ndarray:
    """Lifted face corrections for one element given outside traces at both faces."""
    if uL is None or uR is None:
        raise MissingTrace("outside trace missing")
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    out[0] += left_face_term(u[0], uL) / (jacobian * weights[0])
    out[-1] -= right_face_term(u[-1], uR) / (jacobian * weights[-1])
    return out


def conserved_integral(states, mesh: DgMesh) -> float:
    return float(sum(J * np.dot(mesh.weights, u) for J, u in zip(mesh.jacobians, states)))


def bump_solution(t, x):
    """Smooth exact Burgers solution, equal to ``1 - x^2`` at ``t = 0``."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    radicand = 1.0 - 4.0 * t * (x - t)
    if np.any(radicand < 0):
        raise OutOfDomain("no regular solution there (negative radicand)")
    r = np.sqrt(radicand)
    out = 2.0 * (r + 1.0 - 2.0 * x * (x - t)) / (r + 1.0) ** 2
    return out if out.ndim else float(out)


def wave_initial(x):
    return np.exp(np.sin(8 * np.pi * np.asarray(x, dtype=float) / 5)) / math.e


def shock_time() -> float:
    g = (math.sqrt(5) - 1) / 2
    return 5 * math.e / (8 * math.pi) / (math.exp(g) * math.sqrt(g))


class BurgersSystem:
    """Element-wise split DG Burgers operator in the integrator's system interface.

    For non-periodic meshes ``exterior(t, x)`` supplies the outside trace at
    the two physical boundaries; those faces are folded into the volume part
    of the end elements since they couple to no other set.
    """

    def __init__(self, mesh: DgMesh, exterior: Optional[Callable] = None, cfl_threshold: float = 2.0 ** -12):
        if not mesh.periodic and exterior is None:
            raise ValueError("non-periodic mesh needs exterior boundary data")
        self.mesh = mesh
        self.exterior = exterior
        self.cfl_threshold = cfl_threshold
        n = mesh.n_elements
        self._lift_left = 1.0 / (mesh.jacobians * mesh.weights[0])
        self._lift_right = -1.0 / (mesh.jacobians * mesh.weights[-1])
        self._couplings = []
        for e in range(n):
            c = []
            if mesh.periodic and n > 1:
                c = [((e - 1) % n, "L"), ((e + 1) % n, "R")]
            elif n > 1:
                if e > 0:
                    c.append((e - 1, "L"))
                if e < n - 1:
                    c.append((e + 1, "R"))
            self._couplings.append(c)

    @property
    def n_sets(self) -> int:
        return self.mesh.n_elements

    def couplings(self, e: int):
        return self._couplings[e]

    def volume(self, e: int, u, t: float) -> np.ndarray:
        m = self.mesh
        out = volume_rhs(u, m.D, m.jacobians[e])
        n = m.n_elements
        if m.periodic and n == 1:
            out[0] += left_face_term(u[0], u[-1]) * self._lift_left[e]
            out[-1] += right_face_term(u[-1], u[0]) * self._lift_right[e]
        elif not m.periodic:
            if e == 0:
                out[0] += left_face_term(u[0], float(self.exterior(t, m.boundaries[0]))) * self._lift_left[e]
            if e == n - 1:
                out[-1] += right_face_term(u[-1], float(self.exterior(t, m.boundaries[-1]))) * self._lift_right[e]
        return out

    def trace(self, e: int, u):
        return (float(u[0]), float(u[-1]))

    def coupling(self, e: int, key: str, own, other) -> float:
        if key == "L":
            return left_face_term(own[0], other[1])
        return right_face_term(own[1], other[0])

    def lift(self, e: int, key: str, value: float) -> np.ndarray:
        out = np.zeros(self.mesh.p)
        if key == "L":
            out[0] = value * self._lift_left[e]
        else:
            out[-1] = value * self._lift_right[e]
        return out

    def derivative(self, states, t: float = 0.0) -> list[np.ndarray]:
        """Full semi-discrete derivative of every element."""
        traces = [self.trace(e, u) for e, u in enumerate(states)]
        out = []
        for e, u in enumerate(states):
            d = self.volume(e, u, t)
            for other, key in self.couplings(e):
                d = d + self.lift(e, key, self.coupling(e, key, traces[e], traces[other]))
            out.append(d)
        return out

    def cfl_bound(self, e: int, u) -> float:
        speed = float(np.max(np.abs(u)))
        return math.inf if speed == 0 else self.cfl_threshold / speed

    def conserved(self, states) -> float:
        return conserved_integral(states, self.mesh)
