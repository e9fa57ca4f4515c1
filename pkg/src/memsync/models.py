"""Reaction models, coupling parameters, and the abstract-constant maps.

The network couples m neurons through a bounded sigmoid of the membrane
potential, so the interaction stays weak no matter how far potentials drift.
Each neuron's local dynamics are supplied by a pluggable :class:`ReactionModel`
holding the potential nonlinearity f, the ionic drive h, and the linear ionic
relaxation Lambda. Two concrete models ship with the package: Hindmarsh-Rose
(ell = 2 ionic components) and FitzHugh-Nagumo (ell = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError


def gamma(s, r: float, V: float):
    """Sigmoidal coupling activation 1 / (1 + exp(-r (s - V))).

    Accepts a scalar or ndarray ``s`` and evaluates elementwise. Strictly
    increasing in s with range (0, 1); equals 0.5 exactly at s = V. Uses the
    two-branch stable form and returns the correctly rounded float64 value,
    which saturates to exactly 1.0 once r (s - V) exceeds about 37 (the true
    value is then within half an ulp of 1) and to exactly 0.0 below about
    -745 (exp underflow); strict openness and monotonicity hold everywhere
    in between.
    """
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    s = np.asarray(s, dtype=np.float64)
    if not np.isfinite(s).all():
        raise ValueError("non-finite input to gamma")
    x = r * (s - V)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CouplingParams:
    """Synaptic coupling: strength P, sigmoid sharpness r, bursting threshold V.

    A reversal potential ``u_e`` switches the coupling drive from -P u_i S(x)
    to -P (u_i - u_e) S(x); leave it None for the plain model.
    """

    P: float
    r: float = 0.1
    V: float = 0.5
    u_e: float | None = None

    def __post_init__(self):
        if self.P < 0:
            raise ConfigurationError(f"coupling strength P must be >= 0, got {self.P}")
        if self.r <= 0:
            raise ConfigurationError(f"sigmoid sharpness r must be > 0, got {self.r}")


@dataclass(frozen=True)
class GeneralParams:
    """The eight abstract positive constants bounding f, h and Lambda.

    alpha, lambda_, J, beta bound the potential nonlinearity f (quartic decay
    of f(s, sigma) s and its partial derivatives); gamma, q, L, xi bound the
    ionic relaxation Lambda and drive h.
    """

    alpha: float
    lambda_: float
    J: float
    beta: float
    gamma: float
    q: float
    L: float
    xi: float

    def __post_init__(self):
        for name in ("alpha", "lambda_", "J", "beta", "gamma", "q", "L", "xi"):
            if not (getattr(self, name) > 0):
                raise ConfigurationError(
                    f"GeneralParams.{name} must be > 0, got {getattr(self, name)}"
                )


@dataclass(frozen=True)
class ReactionModel:
    """Pluggable local dynamics of one neuron.

    ``f(s, sigma)`` and ``h(s, sigma)`` take the potential ``s`` (scalar or
    ndarray) and the ionic vector ``sigma`` (array of shape (ell, ...)
    broadcastable against s); f returns an array like s, h an array of shape
    (ell, ...). ``lambda_apply(sigma)`` applies the constant ell-by-ell
    relaxation matrix. All three must be deterministic, total on finite
    inputs, and elementwise (numpy broadcasting).

    eta is the potential diffusivity, k the memristor gain on -k tanh(rho) u,
    and (a, b) drive the memductance drho/dt = a u - b rho.
    """

    ell: int
    f: Callable
    h: Callable
    lambda_apply: Callable
    eta: float
    k: float
    a: float
    b: float
    name: str = "custom"

    def __post_init__(self):
        if self.ell < 1:
            raise ConfigurationError(f"ell must be >= 1, got {self.ell}")
        for pname in ("eta", "k", "a", "b"):
            if not (getattr(self, pname) > 0):
                raise ConfigurationError(
                    f"model parameter {pname} must be > 0, got {getattr(self, pname)}"
                )


def _require_positive(**params):
    for pname, val in params.items():
        if not (val > 0):
            raise ConfigurationError(f"parameter {pname} must be > 0, got {val}")


# Defaults below are the reference parameter sets the built-in models are
# calibrated and regression-tested with.
HR_DEFAULTS = dict(
    a1=1.0, b1=2.0, alpha1=0.4, beta1=0.06, q1=0.2, r1=4.0,
    c1=1.0, delta1=7.0, eta1=5.0, k1=0.3,
)
FHN_DEFAULTS = dict(
    alpha2=0.5, beta2=0.1, gamma2=0.05, a2=0.3, b2=3.0, c2=1.0,
    q2=0.2, r2=10.0, eta2=10.0, k2=0.1,
)


def hr_model(
    a1=1.0, b1=2.0, alpha1=0.4, beta1=0.06, q1=0.2, r1=4.0,
    c1=1.0, delta1=7.0, eta1=5.0, k1=0.3,
) -> ReactionModel:
    """Hindmarsh-Rose neuron with two ionic components (spiking v, bursting w).

    f(s, (v, w)) = a1 s^2 - b1 s^3 + v - w
    h(s, .)      = (alpha1 - beta1 s^2, q1 s)
    Lambda sigma = (-v, -r1 w)
    with diffusivity eta1, memristor gain k1, memductance drive/decay (c1, delta1).
    """
    _require_positive(
        a1=a1, b1=b1, alpha1=alpha1, beta1=beta1, q1=q1, r1=r1,
        c1=c1, delta1=delta1, eta1=eta1, k1=k1,
    )

    def f(s, sigma):
        return a1 * s**2 - b1 * s**3 + sigma[0] - sigma[1]

    def h(s, sigma):
        s = np.asarray(s, dtype=np.float64)
        return np.stack([alpha1 - beta1 * s**2, q1 * s])

    def lambda_apply(sigma):
        sigma = np.asarray(sigma, dtype=np.float64)
        return np.stack([-sigma[0], -r1 * sigma[1]])

    return ReactionModel(2, f, h, lambda_apply, eta1, k1, c1, delta1, name="hindmarsh_rose")


def fhn_model(
    alpha2=0.5, beta2=0.1, gamma2=0.05, a2=0.3, b2=3.0, c2=1.0,
    q2=0.2, r2=10.0, eta2=10.0, k2=0.1,
) -> ReactionModel:
    """FitzHugh-Nagumo neuron with one recovery component.

    f(s, w)      = alpha2 s (s - beta2)(1 - s) - gamma2 w
    h(s, .)      = a2 s + c2
    Lambda sigma = -b2 sigma
    with diffusivity eta2, memristor gain k2, memductance drive/decay (q2, r2).
    """
    _require_positive(
        alpha2=alpha2, beta2=beta2, gamma2=gamma2, a2=a2, b2=b2, c2=c2,
        q2=q2, r2=r2, eta2=eta2, k2=k2,
    )

    def f(s, sigma):
        return alpha2 * s * (s - beta2) * (1.0 - s) - gamma2 * sigma[0]

    def h(s, sigma):
        s = np.asarray(s, dtype=np.float64)
        return np.stack([a2 * s + c2])

    def lambda_apply(sigma):
        sigma = np.asarray(sigma, dtype=np.float64)
        return -b2 * sigma

    return ReactionModel(1, f, h, lambda_apply, eta2, k2, q2, r2, name="fitzhugh_nagumo")


def hr_general_params(a1=1.0, b1=2.0, alpha1=0.4, beta1=0.06, q1=0.2, r1=4.0) -> GeneralParams:
    """Hindmarsh-Rose abstract constants used by the threshold calculator.

    alpha = b1^4/4 and gamma = max{1, r1} here are the values the reference
    constant chain (C1 = 0.25, mu = 4.0, K = 3630.45, ...) is calibrated
    against; they overstate what the cubic nonlinearity and the relaxation
    matrix actually satisfy pointwise, so this map fails the growth and
    dissipation inequalities of :func:`memsync.assumptions.verify_assumptions`
    at moderate |s|. Use :func:`hr_assumption_params` for bounds that hold for
    all (s, sigma).
    """
    _require_positive(a1=a1, b1=b1, alpha1=alpha1, beta1=beta1, q1=q1, r1=r1)
    return GeneralParams(
        alpha=b1**4 / 4.0,
        lambda_=math.sqrt(2.0),
        J=a1**4 / (4.0 * b1**3),
        beta=max(a1**2 / (2.0 * b1), math.sqrt(2.0)),
        gamma=max(1.0, r1),
        q=beta1 + q1,
        L=alpha1 + q1,
        xi=max(2.0 * beta1, q1),
    )


def hr_assumption_params(a1=1.0, b1=2.0, alpha1=0.4, beta1=0.06, q1=0.2, r1=4.0) -> GeneralParams:
    """Hindmarsh-Rose abstract constants that hold for every (s, sigma).

    Identical to :func:`hr_general_params` except alpha = b1/4 (the quartic
    decay coefficient the cubic term actually yields under Young's inequality)
    and gamma = min{1, r1} (the true dissipation rate of diag(-1, -r1)). This
    is the map :func:`memsync.assumptions.verify_assumptions` is expected to
    pass with.
    """
    printed = hr_general_params(a1, b1, alpha1, beta1, q1, r1)
    return GeneralParams(
        alpha=b1 / 4.0,
        lambda_=printed.lambda_,
        J=printed.J,
        beta=printed.beta,
        gamma=min(1.0, r1),
        q=printed.q,
        L=printed.L,
        xi=printed.xi,
    )


def fhn_general_params(alpha2=0.5, beta2=0.1, gamma2=0.05, a2=0.3, b2=3.0, c2=1.0) -> GeneralParams:
    """FitzHugh-Nagumo abstract constants.

    This single map both feeds the threshold calculator and satisfies all the
    verified inequalities pointwise (equality is attained on the dissipation
    bound and at isolated points of the drive bound).
    """
    _require_positive(alpha2=alpha2, beta2=beta2, gamma2=gamma2, a2=a2, b2=b2, c2=c2)
    return GeneralParams(
        alpha=alpha2 / 4.0,
        lambda_=gamma2,
        J=alpha2 * (1.0 + beta2) ** 4 / 4.0,
        beta=max((1.0 + beta2) ** 2, gamma2),
        gamma=b2,
        q=a2 / 4.0,
        L=a2 + c2,
        xi=a2,
    )
