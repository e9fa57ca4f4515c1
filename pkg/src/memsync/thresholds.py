"""Derived synchronization constants and coupling-strength thresholds.

The chain runs C1 -> C2 -> mu -> K (absorbing-set radius squared) ->
Q (ultimate L4 bound) -> G (pointwise potential bound) -> kappa ->
P_threshold, and optionally the decay rate delta once a coupling strength P
is chosen. Every stage is a pure function of its inputs, exposed separately
so each constant can be recomputed and cross-checked in isolation.

``REFERENCE_CONSTANTS`` holds the published reference values for the two
built-in parameter sets. Two of those entries (Q and P) are known to be
inconsistent with the formula chain itself; reports therefore always show
the computed value and the reference side by side instead of trusting either
silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .models import GeneralParams


def compute_C1(gp: GeneralParams) -> float:
    """Scaling constant of the energy estimate: (1/alpha)(1 + q^2/(4 gamma))."""
    return (1.0 / gp.alpha) * (1.0 + gp.q**2 / (4.0 * gp.gamma))


def compute_C2(gp: GeneralParams, k: float, a: float, b: float) -> float:
    """Source constant of the energy estimate.

    C2 = C1 J + L^2/gamma + (1/4)(C1 k + C1^2 lambda^2/gamma + a^2/(2b) + 1)^2.
    """
    C1 = compute_C1(gp)
    inner = C1 * k + C1**2 * gp.lambda_**2 / gp.gamma + a**2 / (2.0 * b) + 1.0
    return C1 * gp.J + gp.L**2 / gp.gamma + 0.25 * inner**2


def compute_mu(C1: float, gamma: float, b: float) -> float:
    """Uniform decay rate of the energy estimate: min{2/C1, gamma, b}."""
    return min(2.0 / C1, gamma, b)


def compute_K(C1: float, C2: float, mu: float, m: int, area: float) -> float:
    """Absorbing-set radius squared: 1 + 2 C2 m |Omega| / (mu min{C1, 1})."""
    return 1.0 + 2.0 * C2 * m * area / (mu * min(C1, 1.0))


def compute_Q(gp: GeneralParams, k: float, K: float, m: int, area: float) -> float:
    """Ultimate bound on sum_i ||u_i||_L4^4.

    Q = 1 + 4 lambda^2 K / alpha^2 + m (1 + 4 J^2/alpha^2 + 10 k^3/alpha^3) |Omega|.
    """
    return (
        1.0
        + 4.0 * gp.lambda_**2 * K / gp.alpha**2
        + m * (1.0 + 4.0 * gp.J**2 / gp.alpha**2 + 10.0 * k**3 / gp.alpha**3) * area
    )


def compute_G(C1: float, C2: float, mu: float, m: int) -> float:
    """Pointwise ultimate bound on sum_i |u_i(t, x)|; no area factor.

    G = sqrt(1 + 2 C2 m / (mu min{C1, 1})).
    """
    return math.sqrt(1.0 + 2.0 * C2 * m / (mu * min(C1, 1.0)))


def compute_kappa(
    gp: GeneralParams, k: float, a: float, b: float, eta: float, Q: float, C_star: float
) -> float:
    """Contraction offset entering the coupling threshold.

    kappa = beta + (beta^2 + xi^2)/gamma + k + a^2/b
            + 2 sqrt(2Q) C* (k^2/b + 2 xi^2/gamma)
            + (64 Q^2 C*^4 / eta^3) (k^2/b + 2 xi^2/gamma)^4.
    """
    base = k**2 / b + 2.0 * gp.xi**2 / gp.gamma
    return (
        gp.beta
        + (gp.beta**2 + gp.xi**2) / gp.gamma
        + k
        + a**2 / b
        + 2.0 * math.sqrt(2.0 * Q) * C_star * base
        + 64.0 * Q**2 * C_star**4 / eta**3 * base**4
    )


def compute_P_threshold(kappa: float, G: float, r: float, V: float, m: int) -> float:
    """Coupling strength above which exponential synchronization is guaranteed.

    P_threshold = (1 + exp(r (G + |V|))) / m * kappa.
    """
    return (1.0 + math.exp(r * (G + abs(V)))) / m * kappa


def compute_delta(
    P: float, kappa: float, G: float, r: float, V: float, m: int, b: float, gamma: float
) -> float:
    """Guaranteed exponential decay rate for a chosen coupling strength P.

    delta = min{b, gamma, 2 (m P / (1 + exp(r (G + |V|))) - kappa)}; the third
    entry goes nonpositive when P sits below the threshold (reported as is,
    not an error).
    """
    gap = 2.0 * (m * P / (1.0 + math.exp(r * (G + abs(V)))) - kappa)
    return min(b, gamma, gap)


@dataclass(frozen=True)
class DerivedConstants:
    """Full constant chain plus an echo of the inputs that produced it."""

    C1: float
    C2: float
    mu: float
    K: float
    Q: float
    G: float
    kappa: float
    P_threshold: float
    delta: float | None
    # inputs echo
    gp: GeneralParams
    k: float
    a: float
    b: float
    eta: float
    m: int
    area: float
    C_star: float
    r: float
    V: float
    P: float | None

    def as_dict(self) -> dict:
        d = {
            "C1": self.C1, "C2": self.C2, "mu": self.mu, "K": self.K,
            "Q": self.Q, "G": self.G, "kappa": self.kappa,
            "P_threshold": self.P_threshold,
        }
        if self.delta is not None:
            d["delta"] = self.delta
        return d


def compute_all(
    gp: GeneralParams,
    k: float,
    a: float,
    b: float,
    eta: float,
    r: float,
    V: float,
    m: int,
    area: float,
    C_star: float = 0.4,
    P: float | None = None,
) -> DerivedConstants:
    """Evaluate the whole chain C1 -> C2 -> mu -> K -> Q -> G -> kappa -> P_threshold.

    Composes the individual compute_* operations in order, so recomputing any
    field from the echoed inputs reproduces it exactly. ``delta`` is filled in
    only when a coupling strength ``P`` is given.
    """
    C1 = compute_C1(gp)
    C2 = compute_C2(gp, k, a, b)
    mu = compute_mu(C1, gp.gamma, b)
    K = compute_K(C1, C2, mu, m, area)
    Q = compute_Q(gp, k, K, m, area)
    G = compute_G(C1, C2, mu, m)
    kappa = compute_kappa(gp, k, a, b, eta, Q, C_star)
    P_threshold = compute_P_threshold(kappa, G, r, V, m)
    delta = None if P is None else compute_delta(P, kappa, G, r, V, m, b, gp.gamma)
    return DerivedConstants(
        C1=C1, C2=C2, mu=mu, K=K, Q=Q, G=G, kappa=kappa,
        P_threshold=P_threshold, delta=delta,
        gp=gp, k=k, a=a, b=b, eta=eta, m=m, area=area,
        C_star=C_star, r=r, V=V, P=P,
    )


@dataclass(frozen=True)
class ReversalConstants:
    """Constant chain of the reversal-potential coupling variant."""

    C3: float
    C4: float
    mu_tilde: float
    K_star: float
    Q_star: float
    G_star: float
    psi: float


def compute_psi(
    tilde_gp: GeneralParams,
    k: float,
    a: float,
    b: float,
    eta: float,
    m: int,
    area: float,
    u_e: float,
    r: float,
    V: float,
    C_star: float = 0.4,
) -> ReversalConstants:
    """Threshold constant Psi for the reversal-potential coupling variant.

    ``tilde_gp`` carries the shifted-system bounds (its gamma entry is the
    unshifted dissipation rate, which the variable change leaves untouched).
    The sigmoid argument uses the shifted bursting threshold V - u_e:

      C3  = (1/alpha~)(1 + q~^2/(4 gamma))
      C4  = C3 J~ + L~^2/gamma + a^2 u_e / b + (1/4)(C3^2 lambda~^2/gamma + a^2/(2b) + 1)^2
      mu~ = min{2/C3, gamma, b}
      K*  = 1 + 2 C4 m |Omega| / (mu~ min{C3, 1})
      Q*  = 1 + 4 lambda~^2 K* / alpha~ + m (alpha~ + 4 J~^2/alpha~) |Omega|
      G*  = sqrt(1 + 2 C4 m / (mu~ min{C3, 1}))
      Psi = (1 + exp(r (G* + |V - u_e|))) / m *
            [beta~ + (beta~^2 + xi~^2)/gamma + k + a^2/b
             + 2 sqrt(2 Q*) C* (k^2/b + 2 xi~^2/gamma)
             + (64 Q*^2 C*^4 / eta^3)(k^2/b + 2 xi~^2/gamma)^4]

    Note C4 omits the C3 k term that C2 carries inside its square, and adds
    the a^2 u_e / b offset, which vanishes at u_e = 0.
    """
    gp = tilde_gp
    C3 = (1.0 / gp.alpha) * (1.0 + gp.q**2 / (4.0 * gp.gamma))
    inner = C3**2 * gp.lambda_**2 / gp.gamma + a**2 / (2.0 * b) + 1.0
    C4 = C3 * gp.J + gp.L**2 / gp.gamma + a**2 * u_e / b + 0.25 * inner**2
    mu_tilde = min(2.0 / C3, gp.gamma, b)
    K_star = 1.0 + 2.0 * C4 * m * area / (mu_tilde * min(C3, 1.0))
    Q_star = (
        1.0
        + 4.0 * gp.lambda_**2 * K_star / gp.alpha
        + m * (gp.alpha + 4.0 * gp.J**2 / gp.alpha) * area
    )
    G_star = math.sqrt(1.0 + 2.0 * C4 * m / (mu_tilde * min(C3, 1.0)))
    base = k**2 / b + 2.0 * gp.xi**2 / gp.gamma
    bracket = (
        gp.beta
        + (gp.beta**2 + gp.xi**2) / gp.gamma
        + k
        + a**2 / b
        + 2.0 * math.sqrt(2.0 * Q_star) * C_star * base
        + 64.0 * Q_star**2 * C_star**4 / eta**3 * base**4
    )
    v_shift = V - u_e
    psi = (1.0 + math.exp(r * (G_star + abs(v_shift)))) / m * bracket
    return ReversalConstants(C3, C4, mu_tilde, K_star, Q_star, G_star, psi)


# Published reference constants for the two built-in parameter sets, used by
# the regression tests and printed next to computed values in reports. The Q
# and P entries are known NOT to satisfy the formula chain above; reports
# flag the mismatch rather than reproduce it.
REFERENCE_CONSTANTS: dict[str, dict[str, float]] = {
    "hindmarsh_rose": {
        "C1": 0.25, "C2": 0.44, "mu": 4.0, "K": 3630.45, "Q": 23719.02,
        "G": 2.12, "kappa": 16.69, "P_threshold": 19.60, "delta": 4.0,
    },
    "fitzhugh_nagumo": {
        "C1": 8.01, "C2": 2.89, "mu": 0.25, "K": 94714.73, "Q": 15101.69,
        "G": 9.67, "kappa": 15.49, "P_threshold": 19.58, "delta": 3.0,
    },
}
