"""Uniform 2-D grids and the bundled per-neuron / network state containers.

A field samples one scalar quantity at cell centers of a uniform rectangular
grid: cell (i, j) sits at ((i + 1/2) dx, (j + 1/2) dx), so an nx-by-ny grid
covers the domain [0, nx dx] x [0, ny dx] with area nx dx * ny dx.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class FieldGrid:
    """One scalar field on a uniform 2-D grid.

    ``values`` is stored as a C-contiguous (row-major) float64 array of shape
    (nx, ny); entry [i, j] is cell (i, j). Grids reject non-finite content on
    construction, and require nx, ny >= 3 and dx > 0.
    """

    nx: int
    ny: int
    dx: float
    values: np.ndarray

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"grid must be at least 3x3, got {self.nx}x{self.ny}")
        if not (self.dx > 0):
            raise ValueError(f"dx must be positive, got {self.dx}")
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        if arr.size != self.nx * self.ny:
            raise ValueError(
                f"values has {arr.size} entries, expected {self.nx * self.ny}"
            )
        arr = arr.reshape(self.nx, self.ny)
        if not np.isfinite(arr).all():
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise ValueError(f"non-finite value at cell ({bad[0]}, {bad[1]})")
        self.values = arr

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def area(self) -> float:
        """Domain area nx dx * ny dx."""
        return self.nx * self.dx * self.ny * self.dx

    def like(self, values: np.ndarray) -> "FieldGrid":
        """New field on the same grid holding ``values``."""
        return FieldGrid(self.nx, self.ny, self.dx, values)

    @classmethod
    def constant(cls, nx: int, ny: int, dx: float, value: float = 0.0) -> "FieldGrid":
        return cls(nx, ny, dx, np.full((nx, ny), float(value)))

    def copy(self) -> "FieldGrid":
        return FieldGrid(self.nx, self.ny, self.dx, self.values.copy())


@dataclass
class NeuronFields:
    """Field bundle for one neuron: potential u, ionic components z, memductance rho."""

    u: FieldGrid
    z: list[FieldGrid]
    rho: FieldGrid

    def __post_init__(self):
        if len(self.z) < 1:
            raise ValueError("z must have at least one component")
        ref = (self.u.nx, self.u.ny, self.u.dx)
        for g in [*self.z, self.rho]:
            if (g.nx, g.ny, g.dx) != ref:
                raise ValueError("all member grids must share (nx, ny, dx)")

    @property
    def ell(self) -> int:
        return len(self.z)

    def copy(self) -> "NeuronFields":
        return NeuronFields(self.u.copy(), [g.copy() for g in self.z], self.rho.copy())


@dataclass
class NetworkState:
    """The m-neuron ensemble plus the simulation clock."""

    neurons: list[NeuronFields]
    t: float = 0.0

    def __post_init__(self):
        if len(self.neurons) < 2:
            raise ValueError(f"need at least 2 neurons, got {len(self.neurons)}")
        if self.t < 0:
            raise ValueError(f"t must be nonnegative, got {self.t}")
        ref = self.neurons[0]
        for n in self.neurons[1:]:
            if n.ell != ref.ell or n.u.shape != ref.u.shape or n.u.dx != ref.u.dx:
                raise ValueError("all neurons must share grid shape and ell")

    @property
    def m(self) -> int:
        return len(self.neurons)

    @property
    def ell(self) -> int:
        return self.neurons[0].ell

    @property
    def grid_shape(self) -> tuple[int, int]:
        return self.neurons[0].u.shape

    @property
    def dx(self) -> float:
        return self.neurons[0].u.dx

    def copy(self) -> "NetworkState":
        return NetworkState([n.copy() for n in self.neurons], self.t)


def init_random(
    nx: int,
    ny: int,
    dx: float,
    m: int,
    ell: int,
    amplitude: float = 0.1,
    seed: int = 0,
) -> NetworkState:
    """Random initial state with every entry uniform in [0, amplitude].

    Fields are drawn in a fixed order (per neuron: u, z[0..ell-1], rho) from a
    seeded PCG64 generator, so identical (seed, shape, m, ell, amplitude)
    always reproduce the state bit for bit, independent of thread count.
    """
    if amplitude < 0:
        raise ValueError(f"amplitude must be nonnegative, got {amplitude}")
    rng = np.random.default_rng(seed)

    def draw() -> FieldGrid:
        vals = rng.uniform(0.0, amplitude, size=(nx, ny)) if amplitude > 0 else np.zeros((nx, ny))
        return FieldGrid(nx, ny, dx, vals)

    neurons = [
        NeuronFields(draw(), [draw() for _ in range(ell)], draw()) for _ in range(m)
    ]
    return NetworkState(neurons, t=0.0)
