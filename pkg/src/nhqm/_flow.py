"""Internal fixed-step RK4 trajectories with cubic-Hermite interpolation.

A :class:`CachedFlow` integrates an ODE on a uniform grid anchored at ``t0``,
caching node values and derivatives.  Queries between nodes use cubic Hermite
interpolation with the exact endpoint derivatives (matching the integrator's
fourth-order accuracy); queries beyond the cached range extend the
integration, forward or backward.
"""

from __future__ import annotations

import math
import threading
from typing import Callable

import numpy as np

from .errors import NonFinite

Rhs = Callable[[float, np.ndarray], np.ndarray]

# Grid hits within this fraction of a step are returned as cached nodes.
_GRID_SNAP = 1e-9


class CachedFlow:
    """Lazy two-sided RK4 trajectory for a matrix- or vector-valued ODE."""

    def __init__(
        self,
        rhs: Rhs,
        t0: float,
        x0: np.ndarray,
        step: float,
        post_step: Callable[[np.ndarray], np.ndarray] | None = None,
        on_sample: Callable[[float, np.ndarray], None] | None = None,
    ):
        if step <= 0.0:
            raise ValueError("step must be positive")
        self._rhs = rhs
        self.t0 = float(t0)
        self.step = float(step)
        self._post = post_step
        self._hook = on_sample
        x0 = np.asarray(x0, dtype=complex)
        if self._hook is not None:
            self._hook(self.t0, x0)
        self._fwd_x: list[np.ndarray] = [x0]
        self._fwd_d: list[np.ndarray] = [np.asarray(rhs(self.t0, x0), dtype=complex)]
        self._bwd_x: list[np.ndarray] = []
        self._bwd_d: list[np.ndarray] = []
        self._lock = threading.Lock()

    # -- grid bookkeeping ---------------------------------------------------

    def _node_time(self, i: int) -> float:
        return self.t0 + i * self.step

    def _node(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        if i >= 0:
            return self._fwd_x[i], self._fwd_d[i]
        return self._bwd_x[-i - 1], self._bwd_d[-i - 1]

    def _have(self, i: int) -> bool:
        return len(self._fwd_x) > i if i >= 0 else len(self._bwd_x) >= -i

    def _advance(self, direction: int) -> None:
        """Append one node in the given direction (+1 forward, -1 backward)."""
        if direction > 0:
            i = len(self._fwd_x) - 1
            x, d = self._fwd_x[i], self._fwd_d[i]
            t, h = self._node_time(i), self.step
        else:
            n = len(self._bwd_x)
            x, d = (self._bwd_x[n - 1], self._bwd_d[n - 1]) if n else (self._fwd_x[0], self._fwd_d[0])
            t, h = self._node_time(-n), -self.step
        k2 = self._rhs(t + 0.5 * h, x + (0.5 * h) * d)
        k3 = self._rhs(t + 0.5 * h, x + (0.5 * h) * k2)
        k4 = self._rhs(t + h, x + h * k3)
        xn = x + (h / 6.0) * (d + 2.0 * k2 + 2.0 * k3 + k4)
        if self._post is not None:
            xn = self._post(xn)
        if not np.all(np.isfinite(xn.view(float))):
            raise NonFinite(f"trajectory integration produced NaN/Inf near t={t + h!r}")
        tn = t + h
        if self._hook is not None:
            self._hook(tn, xn)
        dn = np.asarray(self._rhs(tn, xn), dtype=complex)
        if direction > 0:
            self._fwd_x.append(xn)
            self._fwd_d.append(dn)
        else:
            self._bwd_x.append(xn)
            self._bwd_d.append(dn)

    def ensure(self, t: float) -> None:
        """Extend the cache so that ``t`` lies inside the covered grid."""
        idx = (t - self.t0) / self.step
        lo, hi = math.floor(idx), math.ceil(idx)
        if self._have(lo) and self._have(hi):
            return
        with self._lock:
            while not self._have(hi):
                self._advance(+1)
            while not self._have(lo):
                self._advance(-1)

    # -- queries --------------------------------------------------------------

    @property
    def covered(self) -> tuple[float, float]:
        """Time interval currently held in the cache."""
        return self._node_time(-len(self._bwd_x)), self._node_time(len(self._fwd_x) - 1)

    def node_index_range(self) -> tuple[int, int]:
        return -len(self._bwd_x), len(self._fwd_x) - 1

    def node_samples(self) -> tuple[np.ndarray, list[np.ndarray]]:
        """All cached (times, values) in increasing time order."""
        lo, hi = self.node_index_range()
        ts = np.array([self._node_time(i) for i in range(lo, hi + 1)])
        xs = [self._node(i)[0] for i in range(lo, hi + 1)]
        return ts, xs

    def at(self, t: float) -> np.ndarray:
        """Value at time ``t``; integrates further if outside the cached range."""
        self.ensure(t)
        idx = (t - self.t0) / self.step
        near = round(idx)
        if abs(idx - near) < _GRID_SNAP:
            return self._node(int(near))[0].copy()
        k = math.floor(idx)
        x0, d0 = self._node(k)
        x1, d1 = self._node(k + 1)
        th = idx - k
        h = self.step
        h00 = (1.0 + 2.0 * th) * (1.0 - th) ** 2
        h10 = th * (1.0 - th) ** 2
        h01 = th * th * (3.0 - 2.0 * th)
        h11 = th * th * (th - 1.0)
        return h00 * x0 + (h10 * h) * d0 + h01 * x1 + (h11 * h) * d1
