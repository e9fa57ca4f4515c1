"""Numerical verification of the structural growth/dissipation assumptions.

The synchronization analysis rests on six inequality families tying a
:class:`~memsync.models.ReactionModel` to its :class:`~memsync.models.GeneralParams`:

1. f_growth:            f(s, sigma) s <= -alpha |s|^4 + lambda |s| |sigma| + J
2. f_derivatives:       max{df/ds, |df/dsigma|} <= beta        (df/ds one-sided)
3. lambda_dissipation:  <Lambda sigma, sigma> <= -gamma |sigma|^2
4. h_growth:            <h(s, sigma), sigma> <= q |s|^2 |sigma| + L |sigma|
5. h_s_derivative:      |dh/ds| <= xi (|s| + 1)
6. h_sigma_derivative:  dh/dsigma = 0

Closed forms are only known for the built-in models, so the verifier samples a
lattice over (s, sigma) and takes derivatives by central finite differences
with relative step 1e-6. A sampling check cannot prove an inequality, but it
reliably catches a wrong parameter map and reports where and by how much it
fails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .models import GeneralParams, ReactionModel

# Equality is attained on several of the bounds (e.g. the FitzHugh-Nagumo
# dissipation check holds with equality everywhere), so margins are accepted
# down to a small scale-relative slack. Derivative checks additionally absorb
# the cancellation noise of central differences (about |f| eps / step), which
# exceeds this slack wherever |f| is large and the bound is tight.
_SLACK = 1e-8
_EPS = float(np.finfo(np.float64).eps)
# Finite-difference Jacobian entries of a sigma-independent h are exactly zero;
# anything above this is treated as genuine sigma dependence.
_ZERO_TOL = 1e-7


@dataclass(frozen=True)
class InequalityCheck:
    """Outcome of one inequality family on the sampling lattice."""

    name: str
    passed: bool
    worst_margin: float
    worst_s: float | None
    worst_sigma: tuple[float, ...] | None
    detail: str = ""

    def describe(self) -> str:
        loc = ""
        if self.worst_s is not None or self.worst_sigma is not None:
            s_txt = "-" if self.worst_s is None else f"{self.worst_s:.6g}"
            sig_txt = "-" if self.worst_sigma is None else (
                "(" + ", ".join(f"{v:.6g}" for v in self.worst_sigma) + ")"
            )
            loc = f" at s={s_txt}, sigma={sig_txt}"
        status = "pass" if self.passed else "FAIL"
        txt = f"{self.name:22s} {status}  worst margin {self.worst_margin: .6e}{loc}"
        if self.detail:
            txt += f"  [{self.detail}]"
        return txt


@dataclass(frozen=True)
class AssumptionReport:
    """All six inequality checks for one (model, params) pair."""

    model_name: str
    n_samples: int
    s_range: tuple[float, float]
    sigma_range: tuple[float, float]
    checks: tuple[InequalityCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def describe(self) -> str:
        head = (
            f"assumption checks for {self.model_name}: "
            f"s in [{self.s_range[0]:g}, {self.s_range[1]:g}], "
            f"sigma in [{self.sigma_range[0]:g}, {self.sigma_range[1]:g}], "
            f"{self.n_samples} samples per axis"
        )
        return "\n".join([head] + ["  " + c.describe() for c in self.checks])


def _worst(margin, lhs, rhs, s_axis, sig_pts, noise=None):
    """Locate the minimum margin and decide pass/fail with relative slack.

    ``noise`` is an optional pointwise bound on numerical error in the margin
    (finite-difference cancellation); it widens the acceptance, never the
    reported margin.
    """
    if noise is None:
        noise = np.zeros(())
    margin_b, lhs_b, rhs_b, noise_b = np.broadcast_arrays(margin, lhs, rhs, noise)
    effective = margin_b + noise_b
    flat = int(np.argmin(effective))
    idx = np.unravel_index(flat, margin_b.shape)
    worst = float(margin_b[idx])
    scale = max(1.0, abs(float(lhs_b[idx])), abs(float(rhs_b[idx])))
    passed = float(effective[idx]) >= -_SLACK * scale
    if s_axis is None:
        worst_s = None
        worst_sig = tuple(float(v) for v in sig_pts[:, idx[0]])
    else:
        worst_s = float(s_axis[idx[0]])
        worst_sig = tuple(float(v) for v in sig_pts[:, idx[1]])
    return passed, worst, worst_s, worst_sig


def _finite_or_fail(name, *arrays):
    for arr in arrays:
        if not np.isfinite(arr).all():
            return InequalityCheck(
                name, False, float("-inf"), None, None,
                detail="non-finite model output on the lattice",
            )
    return None


def verify_assumptions(
    model: ReactionModel,
    gp: GeneralParams,
    s_range: tuple[float, float] = (-5.0, 5.0),
    sigma_range: tuple[float, float] = (-5.0, 5.0),
    n_samples: int = 50,
) -> AssumptionReport:
    """Check all six inequality families on an (s, sigma) lattice.

    The lattice is ``n_samples`` points per axis: s over ``s_range`` and each
    of the ell sigma components over ``sigma_range`` (full product over
    components). Derivatives use central differences with step
    1e-6 * max(1, |x|). Returns a report with the worst-violating sample point
    and margin for every family; a family passes when its minimum margin is
    above a small scale-relative slack (equality cases are expected).
    """
    if n_samples < 1:
        raise ConfigurationError(f"n_samples must be >= 1, got {n_samples}")
    for lo, hi, label in [(s_range[0], s_range[1], "s_range"), (sigma_range[0], sigma_range[1], "sigma_range")]:
        if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
            raise ConfigurationError(f"{label} must be a finite interval, got ({lo}, {hi})")
    ell = model.ell
    n_points = n_samples ** ell
    if n_samples * n_points > 2e7:
        raise ConfigurationError(
            f"lattice of {n_samples} x {n_samples}^{ell} points is too large; reduce n_samples"
        )

    s_axis = np.linspace(s_range[0], s_range[1], n_samples)
    comp_axis = np.linspace(sigma_range[0], sigma_range[1], n_samples)
    mesh = np.meshgrid(*([comp_axis] * ell), indexing="ij")
    sig_pts = np.stack([mm.ravel() for mm in mesh])      # (ell, n_points)

    S = s_axis[:, None]                                   # (n, 1)
    SIG = sig_pts[:, None, :]                             # (ell, 1, n_points)
    sig_norm = np.sqrt((SIG**2).sum(axis=0))              # (1, n_points)

    checks = []

    # 1. growth of f(s, sigma) s
    F = np.asarray(model.f(S, SIG), dtype=np.float64)
    bad = _finite_or_fail("f_growth", F)
    if bad:
        checks.append(bad)
    else:
        lhs = F * S
        rhs = -gp.alpha * np.abs(S) ** 4 + gp.lambda_ * np.abs(S) * sig_norm + gp.J
        checks.append(InequalityCheck("f_growth", *_worst(rhs - lhs, lhs, rhs, s_axis, sig_pts)))

    # 2. derivative bounds of f (df/ds one-sided, |df/dsigma| in norm)
    hs = 1e-6 * np.maximum(1.0, np.abs(S))
    Fp = np.asarray(model.f(S + hs, SIG), dtype=np.float64)
    Fm = np.asarray(model.f(S - hs, SIG), dtype=np.float64)
    dfds = (Fp - Fm) / (2 * hs)
    noise = 4.0 * _EPS * (np.abs(Fp) + np.abs(Fm)) / (2 * hs)
    dfdsig_sq = np.zeros_like(dfds)
    for c in range(ell):
        hc = 1e-6 * np.maximum(1.0, np.abs(SIG[c]))
        up, dn = SIG.copy(), SIG.copy()
        up[c] = up[c] + hc
        dn[c] = dn[c] - hc
        Fpc = np.asarray(model.f(S, up), dtype=np.float64)
        Fmc = np.asarray(model.f(S, dn), dtype=np.float64)
        dfdsig_sq = dfdsig_sq + ((Fpc - Fmc) / (2 * hc)) ** 2
        noise = noise + 4.0 * _EPS * (np.abs(Fpc) + np.abs(Fmc)) / (2 * hc)
    bad = _finite_or_fail("f_derivatives", dfds, dfdsig_sq)
    if bad:
        checks.append(bad)
    else:
        val = np.maximum(dfds, np.sqrt(dfdsig_sq))
        beta_arr = np.full_like(val, gp.beta)
        checks.append(InequalityCheck(
            "f_derivatives", *_worst(beta_arr - val, val, beta_arr, s_axis, sig_pts, noise)
        ))

    # 3. dissipation of Lambda (independent of s)
    lam = np.asarray(model.lambda_apply(sig_pts), dtype=np.float64)
    bad = _finite_or_fail("lambda_dissipation", lam)
    if bad:
        checks.append(bad)
    else:
        lhs = (lam * sig_pts).sum(axis=0)
        rhs = -gp.gamma * (sig_pts**2).sum(axis=0)
        checks.append(InequalityCheck("lambda_dissipation", *_worst(rhs - lhs, lhs, rhs, None, sig_pts)))

    # 4. growth of <h, sigma>
    H = np.asarray(model.h(S, SIG), dtype=np.float64)
    bad = _finite_or_fail("h_growth", H)
    if bad:
        checks.append(bad)
    else:
        lhs = sum(H[c] * SIG[c] for c in range(ell))
        rhs = gp.q * S**2 * sig_norm + gp.L * sig_norm
        checks.append(InequalityCheck("h_growth", *_worst(rhs - lhs, lhs, rhs, s_axis, sig_pts)))

    # 5. |dh/ds| <= xi (|s| + 1)
    Hp = np.asarray(model.h(S + hs, SIG), dtype=np.float64)
    Hm = np.asarray(model.h(S - hs, SIG), dtype=np.float64)
    dhds = (Hp - Hm) / (2 * hs)
    bad = _finite_or_fail("h_s_derivative", dhds)
    if bad:
        checks.append(bad)
    else:
        val = np.sqrt((dhds**2).sum(axis=0))
        rhs = gp.xi * (np.abs(S) + 1.0)
        noise = 4.0 * _EPS * ((np.abs(Hp) + np.abs(Hm)) / (2 * hs)).sum(axis=0)
        checks.append(InequalityCheck(
            "h_s_derivative", *_worst(rhs - val, val, rhs, s_axis, sig_pts, noise)
        ))

    # 6. dh/dsigma = 0 (largest finite-difference Jacobian entry)
    max_entry = np.zeros((n_samples, n_points))
    noise = np.zeros((n_samples, n_points))
    finite = True
    for d in range(ell):
        hd = 1e-6 * np.maximum(1.0, np.abs(SIG[d]))
        up, dn = SIG.copy(), SIG.copy()
        up[d] = up[d] + hd
        dn[d] = dn[d] - hd
        Hpd = np.asarray(model.h(S, up), dtype=np.float64)
        Hmd = np.asarray(model.h(S, dn), dtype=np.float64)
        if not (np.isfinite(Hpd).all() and np.isfinite(Hmd).all()):
            finite = False
            break
        jac_d = (Hpd - Hmd) / (2 * hd)
        max_entry = np.maximum(max_entry, np.abs(jac_d).max(axis=0))
        noise = np.maximum(
            noise, 4.0 * _EPS * ((np.abs(Hpd) + np.abs(Hmd)) / (2 * hd)).max(axis=0)
        )
    if not finite:
        checks.append(InequalityCheck(
            "h_sigma_derivative", False, float("-inf"), None, None,
            detail="non-finite model output on the lattice",
        ))
    else:
        tol_arr = np.full_like(max_entry, _ZERO_TOL)
        passed, worst, ws, wsig = _worst(
            tol_arr - max_entry, max_entry, tol_arr, s_axis, sig_pts, noise
        )
        checks.append(InequalityCheck(
            "h_sigma_derivative", passed, worst, ws, wsig,
            detail=f"max |dh/dsigma| = {float(max_entry.max()):.3e}",
        ))

    return AssumptionReport(
        model_name=model.name,
        n_samples=n_samples,
        s_range=(float(s_range[0]), float(s_range[1])),
        sigma_range=(float(sigma_range[0]), float(sigma_range[1])),
        checks=tuple(checks),
    )
