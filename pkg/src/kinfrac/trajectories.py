"""Critical kinetic trajectories driven by r^beta sin(log r), r^beta cos(log r).

All 2x2 matrices act blockwise on (x_i, v_i), so every routine below is written
for one velocity component and broadcast over the d components.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import PhasePoint


@dataclass(frozen=True)
class TrajectoryParams:
    alpha: float
    beta: float
    m0: float
    m1: np.ndarray = field(default_factory=lambda: np.zeros(1))
    m2: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        if not (0 < self.alpha < self.beta):
            raise ValueError(f"need 0 < alpha < beta, got alpha={self.alpha}, beta={self.beta}")
        if self.m0 == 0:
            raise ValueError("m0 must be nonzero")
        m1 = np.atleast_1d(np.asarray(self.m1, dtype=float))
        m2 = np.atleast_1d(np.asarray(self.m2, dtype=float))
        if m1.shape != m2.shape:
            raise ValueError("m1 and m2 must have the same dimension")
        object.__setattr__(self, "m1", m1)
        object.__setattr__(self, "m2", m2)

    @property
    def d(self) -> int:
        return len(self.m1)


def _check_r(r, allow_zero=False):
    r = np.asarray(r, dtype=float)
    bad = (r < 0) if allow_zero else (r <= 0)
    if np.any(bad):
        raise ValueError("r must be positive" if not allow_zero else "r must be nonnegative")
    return r


def forcing(r, beta):
    """(g1, g2) = r^beta (sin log r, cos log r)."""
    r = _check_r(r)
    th = np.log(r)
    rb = r ** beta
    return rb * np.sin(th), rb * np.cos(th)


def forcing_rate(r, beta):
    r = _check_r(r)
    th = np.log(r)
    rb = r ** (beta - 1)
    return rb * (beta * np.sin(th) + np.cos(th)), rb * (beta * np.cos(th) - np.sin(th))


def angular_coeffs(theta, alpha, beta):
    """a1, a2 with d g_i / (alpha r^{alpha-1}) = r^{beta-alpha} a_i(log r)."""
    s, c = np.sin(theta), np.cos(theta)
    return (beta * s + c) / alpha, (beta * c - s) / alpha


def frak_c(alpha: float, d: int) -> float:
    """Jacobian prefactor (-1/alpha)^d of the parameter-to-endpoint map."""
    return (-1.0 / alpha) ** d


def W_matrix(r, alpha, beta):
    r = _check_r(r)
    g1, g2 = forcing(r, beta)
    a1, a2 = angular_coeffs(np.log(r), alpha, beta)
    rr = r ** (beta - alpha)
    W = np.empty(np.shape(r) + (2, 2))
    W[..., 0, 0], W[..., 0, 1] = g1, g2
    W[..., 1, 0], W[..., 1, 1] = rr * a1, rr * a2
    return W


def D_matrix(delta):
    return np.array([[delta, 0.0], [0.0, 1.0]])


def E_matrix(r, delta, alpha):
    r = _check_r(r, allow_zero=True)
    E = np.zeros(np.shape(r) + (2, 2))
    E[..., 0, 0] = 1.0
    E[..., 1, 1] = 1.0
    E[..., 0, 1] = delta * r ** alpha
    return E


def A_matrix(r, m0, alpha, beta):
    """A_{m0}(r) = D W D^{-1}. ``m0`` may be an array broadcasting against r."""
    r = _check_r(r)
    m0 = np.asarray(m0, dtype=float)
    shape = np.broadcast_shapes(np.shape(r), np.shape(m0))
    W = np.broadcast_to(W_matrix(r, alpha, beta), shape + (2, 2))
    m0 = np.broadcast_to(m0, shape)
    A = np.empty(shape + (2, 2))
    A[..., 0, 0] = W[..., 0, 0]
    A[..., 0, 1] = m0 * W[..., 0, 1]
    A[..., 1, 0] = W[..., 1, 0] / m0
    A[..., 1, 1] = W[..., 1, 1]
    return A


def A_inverse(r, m0, alpha, beta):
    """Closed-form inverse using det = -r^{2 beta - alpha}/alpha."""
    A = A_matrix(r, m0, alpha, beta)
    det = block_det(A)
    inv = np.empty_like(A)
    inv[..., 0, 0] = A[..., 1, 1] / det
    inv[..., 1, 1] = A[..., 0, 0] / det
    inv[..., 0, 1] = -A[..., 0, 1] / det
    inv[..., 1, 0] = -A[..., 1, 0] / det
    return inv


def block_det(M):
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


def full_A_matrix(r: float, m0: float, alpha, beta, d: int) -> np.ndarray:
    """The 2d x 2d matrix acting on (x_1..x_d, v_1..v_d)."""
    return np.kron(A_matrix(r, m0, alpha, beta), np.eye(d))


def F_row(r, m0, alpha, beta):
    """Forcing row F_{m0}(r); gamma_v' = F (m1, m2)^T componentwise."""
    r = _check_r(r)
    th = np.log(r)
    a1, a2 = angular_coeffs(th, alpha, beta)
    # d a1/d theta = a2 and d a2/d theta = -a1
    pre = r ** (beta - alpha - 1)
    m0 = np.asarray(m0, dtype=float)
    f1 = pre * ((beta - alpha) * a1 + a2) / m0
    f2 = pre * ((beta - alpha) * a2 - a1)
    return f1, f2


def trajectory_eval(params: TrajectoryParams, r, base: PhasePoint):
    """gamma^m(r; base) for scalar or array r >= 0.

    Returns (t, x, v) with x, v of shape r.shape + (d,).
    """
    r = _check_r(r, allow_zero=True)
    if base.d != params.d:
        raise ValueError("dimension mismatch between base point and parameters")
    a, b, m0 = params.alpha, params.beta, params.m0
    pos = r > 0
    rs = np.where(pos, r, 1.0)
    A = A_matrix(rs, m0, a, b)
    A = np.where(pos[..., None, None], A, 0.0)  # limit r -> 0, valid as beta > alpha
    ra = r ** a
    t = base.t + m0 * ra
    m1, m2 = params.m1, params.m2
    x = base.x + (m0 * ra)[..., None] * base.v + A[..., 0, 0, None] * m1 + A[..., 0, 1, None] * m2
    v = base.v + A[..., 1, 0, None] * m1 + A[..., 1, 1, None] * m2
    return t, x, v


def trajectory_velocity_rate(params: TrajectoryParams, r, base: PhasePoint | None = None):
    f1, f2 = F_row(r, params.m0, params.alpha, params.beta)
    return np.asarray(f1)[..., None] * params.m1 + np.asarray(f2)[..., None] * params.m2


def central_diff(func, r, h):
    h = np.asarray(h, float)
    num = np.asarray(func(r + h) - func(r - h))
    # vector-valued samples carry trailing component axes
    return num / (2 * h.reshape(h.shape + (1,) * (num.ndim - h.ndim)))


def fd_step(r):
    # relative step: the log r oscillation makes third derivatives grow like r^{-2} near 0
    return 1e-4 * np.asarray(r, float)


def fit_loglog(r, values):
    lr, lv = np.log(np.asarray(r, float)), np.log(np.asarray(values, float))
    slope, intercept = np.polyfit(lr, lv, 1)
    return float(slope), float(intercept)


def dyadic_grid(lo_exp=-6, hi_exp=6):
    return 2.0 ** np.arange(lo_exp, hi_exp + 1, dtype=float)


def check_M_properties(params: TrajectoryParams, r_grid, base: PhasePoint | None = None) -> dict:
    """Endpoint-derivative and determinant residuals, plus fitted slopes of the matrix envelopes.

    Bounds hold uniformly in the direction of m, so slopes are fitted on the
    worst case over that direction (operator norms). A single fixed m gives
    samples that can pass through zero where log-log fitting is meaningless.
    """
    r = np.asarray(r_grid, dtype=float)
    a, b, m0, d = params.alpha, params.beta, params.m0, params.d
    if base is None:
        base = PhasePoint(0.3, np.full(d, -0.2), np.full(d, 0.7))
    h = fd_step(r)

    # endpoint derivatives against the closed forms
    gt = lambda s: trajectory_eval(params, s, base)[0]
    gx = lambda s: trajectory_eval(params, s, base)[1]
    dt_fd = central_diff(gt, r, h)
    dx_fd = central_diff(gx, r, h)
    _, _, gv = trajectory_eval(params, r, base)
    dt_exact = a * m0 * r ** (a - 1)
    res_t = np.abs(dt_fd - dt_exact) / (1 + np.abs(dt_exact))
    rhs = dt_exact[:, None] * gv
    res_x = np.max(np.abs(dx_fd - rhs) / (1 + np.abs(rhs)), axis=-1)
    gv_fd = central_diff(lambda s: trajectory_eval(params, s, base)[2], r, h)
    gv_rate = trajectory_velocity_rate(params, r)
    res_v = np.max(np.abs(gv_fd - gv_rate) / (1 + np.abs(gv_rate)), axis=-1)

    # determinant
    dets = np.array([np.linalg.det(full_A_matrix(ri, m0, a, b, d)) for ri in r])
    target = frak_c(a, d) * r ** ((2 * b - a) * d)
    res_det = np.abs(dets - target) / np.abs(dets)

    # entries of the inverse, envelope over the row index
    inv = A_inverse(r, m0, a, b)
    col1 = np.max(np.abs(inv[:, :, 0]), axis=1)
    col2 = np.max(np.abs(inv[:, :, 1]), axis=1)
    s_col1, _ = fit_loglog(r, col1)
    s_col2, _ = fit_loglog(r, col2)
    c_col1 = float(np.max(col1 * r ** b / (1 + 1 / abs(m0))))
    c_col2 = float(np.max(col2 * r ** (b - a) / (1 + abs(m0))))

    # velocity rate and derivative envelopes: operator norms w.r.t. the weights in each bound
    f1, f2 = F_row(r, m0, a, b)
    env_rate = np.maximum(np.abs(f1) * abs(m0), np.abs(f2))
    A = A_matrix(r, m0, a, b)
    env_dv = np.maximum(np.abs(A[:, 1, 0]) * abs(m0), np.abs(A[:, 1, 1]))
    env_dx = np.maximum(np.abs(A[:, 0, 0]), np.abs(A[:, 0, 1]) / abs(m0))
    s_rate, _ = fit_loglog(r, env_rate)
    s_dv, _ = fit_loglog(r, env_dv)
    s_dx, _ = fit_loglog(r, env_dx)

    # constants for the actual draw
    w_v = np.abs(params.m1) / abs(m0) + np.abs(params.m2)
    w_x = np.abs(params.m1) + abs(m0) * np.abs(params.m2)
    _, gx_r, gv_r = trajectory_eval(params, r, base)
    with np.errstate(divide="ignore", invalid="ignore"):
        c_rate = np.nanmax(np.abs(gv_rate) / (w_v * r[:, None] ** (b - a - 1)))
        c_dv = np.nanmax(np.abs(gv_r - base.v) / (w_v * r[:, None] ** (b - a)))
        c_dx = np.nanmax(np.abs(gx_r - base.x - m0 * r[:, None] ** a * base.v) / (w_x * r[:, None] ** b))

    return {
        "M1_residual": float(max(res_t.max(), res_x.max())),
        "M1_velocity_rate_residual": float(res_v.max()),
        "M2_residual": float(res_det.max()),
        "M3_slope_col1": s_col1, "M3_expected_col1": -b,
        "M3_slope_col2": s_col2, "M3_expected_col2": a - b,
        "M3_const_col1": c_col1, "M3_const_col2": c_col2,
        "M4_slope_rate": s_rate, "M4_expected_rate": b - a - 1,
        "M4_slope_dv": s_dv, "M4_expected_dv": b - a,
        "M4_slope_dx": s_dx, "M4_expected_dx": b,
        "M4_const_rate": float(c_rate), "M4_const_dv": float(c_dv), "M4_const_dx": float(c_dx),
    }


def script_A(theta, lam, alpha, beta):
    """Angular factor of A_lam(r) = diag(r^beta, r^{beta-alpha}) scriptA_lam(log r)."""
    theta = np.asarray(theta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    a1, a2 = angular_coeffs(theta, alpha, beta)
    shape = np.broadcast_shapes(theta.shape, lam.shape)
    M = np.empty(shape + (2, 2))
    M[..., 0, 0] = np.sin(theta)
    M[..., 0, 1] = lam * np.cos(theta)
    M[..., 1, 0] = a1 / lam
    M[..., 1, 1] = a2
    return M


def script_A_inverse(theta, lam, alpha, beta):
    M = script_A(theta, lam, alpha, beta)
    det = -1.0 / alpha
    inv = np.empty_like(M)
    inv[..., 0, 0] = M[..., 1, 1] / det
    inv[..., 1, 1] = M[..., 0, 0] / det
    inv[..., 0, 1] = -M[..., 0, 1] / det
    inv[..., 1, 0] = -M[..., 1, 0] / det
    return inv


def script_F(theta, lam, alpha, beta):
    """Angular factor of F_lam(r) = r^{beta-alpha-1} scriptF_lam(log r)."""
    a1, a2 = angular_coeffs(theta, alpha, beta)
    return ((beta - alpha) * a1 + a2) / lam, (beta - alpha) * a2 - a1


def rescaled_profile(params: TrajectoryParams, lam: float, ybar: float, r_grid, eta=None, psi=None) -> dict:
    """Profiles Phi and Psi of the rescaled kernels along dyadic r (d=1).

    Phi(eta) = psi(lam, scriptA^{-1}(ybar, eta)), Psi = d/d eta [Phi * b] with
    b = scriptF . scriptA^{-1}(ybar, eta); Psi equals r^{1+Q} L_r up to |c|^{-1}.
    """
    from .kernels import Mollifier

    if psi is None:
        psi = Mollifier()
    lo, hi = psi.t_support
    if not (lo < lam < hi):
        raise ValueError(f"lambda={lam} outside the time support ({lo}, {hi}) of psi")
    a, b = params.alpha, params.beta
    if eta is None:
        eta = np.linspace(-8, 8, 4001)
    deta = eta[1] - eta[0]
    out = {"r": [], "phi_c0": [], "phi_c1": [], "psi_c0": [], "psi_integral": [], "psi_scale": [],
           "support_radius": []}
    for r in np.asarray(r_grid, float):
        th = np.log(r)
        inv = script_A_inverse(th, lam, a, b)
        m1 = inv[0, 0] * ybar + inv[0, 1] * eta
        m2 = inv[1, 0] * ybar + inv[1, 1] * eta
        phi = psi(np.full_like(eta, lam), m1, m2)
        phi_d = psi.grad_m(np.full_like(eta, lam), m1, m2)
        # d/d eta through the linear map
        dphi = phi_d[1] * inv[0, 1] + phi_d[2] * inv[1, 1]
        f1, f2 = script_F(th, lam, a, b)
        bb = f1 * m1 + f2 * m2
        db = f1 * inv[0, 1] + f2 * inv[1, 1]
        Psi = dphi * bb + phi * db
        nz = np.abs(phi) > 0
        out["r"].append(float(r))
        out["phi_c0"].append(float(np.abs(phi).max()))
        out["phi_c1"].append(float(np.abs(phi).max() + np.abs(dphi).max()))
        out["psi_c0"].append(float(np.abs(Psi).max()))
        out["psi_integral"].append(float(np.sum(Psi) * deta))
        out["psi_scale"].append(float(np.abs(Psi).max() * (eta[-1] - eta[0])))
        out["support_radius"].append(float(np.abs(eta[nz]).max()) if nz.any() else 0.0)
    out = {k: np.array(v) for k, v in out.items()}
    c1 = out["phi_c1"][out["phi_c1"] > 0]
    out["phi_c1_ratio"] = float(c1.max() / c1.min()) if len(c1) else np.inf
    return out
