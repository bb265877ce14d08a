"""Per-UAV convex subproblems for the alternating placement steps.

Each call linearizes the rate model once around the current iterate
(the expansion point) and solves the resulting convex program with the
in-repo barrier solver:

* horizontal step: variables (q, v_i, z_i, mu), the rate and the
  elevation sine replaced by their global concave/affine lower bounds in
  ||q - w||^2 and exp(-(k3 + k4 v));
* vertical step: variables (H, v_i, z_i, mu), the sine constraint kept
  exact (it is jointly convex in (v, H)) and the rate lower-bounded
  affinely in H^2.

The z variables are scaled by the expansion rates internally so the
barrier Hessian is well conditioned; all public values are in bits/s.

A descent safeguard re-evaluates the true completion time at the
returned position and rejects any step that would increase it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channel
from .barrier import ConstraintBlock, ConvexProgram, solve_convex
from .lp import Status

V_FLOOR = 1e-6          # lower box for elevation-sine variables
Z_FLOOR = 1.0           # bits/s; keeps 1/z away from the pole
MU_CAP = 1e9


@dataclass(frozen=True)
class ExpansionPoint:
    """Geometry and rates of one UAV's served UEs at the current iterate."""

    q_hat: np.ndarray          # (2,)
    h_hat: float
    ue_pos: np.ndarray         # (S, 2)
    horiz_sq_hat: np.ndarray   # (S,)
    d_sq_hat: np.ndarray       # (S,)
    v_hat: np.ndarray          # (S,)
    r_hat: np.ndarray          # (S,) bits/s
    gamma: np.ndarray          # (S,)

    @classmethod
    def at(cls, q, h, ue_pos, tx_powers, params, model="rician"):
        q = np.asarray(q, dtype=float)
        ue_pos = np.atleast_2d(np.asarray(ue_pos, dtype=float))
        horiz_sq = np.sum((q[None, :] - ue_pos) ** 2, axis=-1)
        d_sq = horiz_sq + h ** 2
        v = h / np.sqrt(d_sq)
        if model == "rician":
            r = channel.outage_rate(horiz_sq, h, v, tx_powers, params)
        else:
            r = channel.los_rate(horiz_sq, h, tx_powers, params)
        return cls(q_hat=q, h_hat=float(h), ue_pos=ue_pos,
                   horiz_sq_hat=horiz_sq, d_sq_hat=d_sq, v_hat=v, r_hat=r,
                   gamma=np.asarray(params.gamma(tx_powers), dtype=float)
                   * np.ones_like(v))


@dataclass(frozen=True)
class SubproblemSolution:
    position: np.ndarray       # new q (2,) or new H ()
    v: np.ndarray              # (S,) elevation-sine variables at the optimum
    z: np.ndarray              # (S,) rate variables, bits/s
    mu: float
    status: Status
    accepted: bool             # False if the descent safeguard kept the old point


def _exp_term(v, params):
    return np.exp(-(params.k3 + params.k4 * np.asarray(v, dtype=float)))


def taylor_coefficients(v_hat, d_sq_hat, gamma, params):
    """Magnitudes of the rate partials in the (exp-term, squared-distance)
    parametrization at the expansion point.

    Returns (coef_exp, coef_quad), both > 0: the rate lower bound is
    r_hat - coef_exp * (E(v) - E(v_hat)) - coef_quad * (s - s_hat) where
    E(v) = exp(-(k3 + k4 v)) and s is the linearized squared distance
    (horizontal in the horizontal step, H^2 in the vertical step).
    """
    e_hat = _exp_term(v_hat, params)
    x_cap = 1.0 + e_hat
    y_cap = np.asarray(d_sq_hat, dtype=float)
    a0 = params.pathloss_exp
    b = params.bandwidth_hz
    den = gamma * (params.k1 * x_cap + params.k2) + x_cap * y_cap ** (a0 / 2.0)
    ln2 = np.log(2.0)
    coef_exp = gamma * params.k2 * b / (ln2 * x_cap * den)
    coef_quad = (gamma * a0 * b * (params.k1 * x_cap + params.k2)
                 / (2.0 * ln2 * y_cap * den))
    return coef_exp, coef_quad


def los_coefficient(d_sq_hat, gamma, params):
    """Squared-distance coefficient of the pure-LoS rate bound."""
    y_cap = np.asarray(d_sq_hat, dtype=float)
    a0 = params.pathloss_exp
    den = gamma + y_cap ** (a0 / 2.0)
    return gamma * a0 * params.bandwidth_hz / (2.0 * np.log(2.0) * y_cap * den)


def psi_coefficients(exp_point: ExpansionPoint, params):
    """Horizontal-step bound coefficients (per served UE)."""
    return taylor_coefficients(exp_point.v_hat, exp_point.d_sq_hat,
                               exp_point.gamma, params)


def phi_coefficients(exp_point: ExpansionPoint, params):
    """Vertical-step bound coefficients (per served UE)."""
    return taylor_coefficients(exp_point.v_hat, exp_point.d_sq_hat,
                               exp_point.gamma, params)


def r_lb_horizontal(horiz_sq, v, exp_point: ExpansionPoint, coeffs, params):
    """Rate lower bound at horizontal squared distance(s) and sine(s) v."""
    coef_exp, coef_quad = coeffs
    return (exp_point.r_hat
            - coef_exp * (_exp_term(v, params) - _exp_term(exp_point.v_hat, params))
            - coef_quad * (np.asarray(horiz_sq, dtype=float)
                           - exp_point.horiz_sq_hat))


def v_lb(horiz_sq, exp_point: ExpansionPoint):
    """Elevation-sine lower bound, affine in the horizontal squared distance."""
    slope = exp_point.h_hat / (2.0 * exp_point.d_sq_hat ** 1.5)
    return exp_point.v_hat - slope * (np.asarray(horiz_sq, dtype=float)
                                      - exp_point.horiz_sq_hat)


def r_lb_vertical(h, v, exp_point: ExpansionPoint, coeffs, params):
    """Rate lower bound at altitude h and sine(s) v (q fixed)."""
    coef_exp, coef_quad = coeffs
    h = np.asarray(h, dtype=float)
    return (exp_point.r_hat
            - coef_exp * (_exp_term(v, params) - _exp_term(exp_point.v_hat, params))
            - coef_quad * (h ** 2 - exp_point.h_hat ** 2))


def true_uav_time(q, h, ue_pos, data_bits, cycles, tx_powers, cpu_hz, params,
                  model="rician"):
    """Exact completion time of one UAV serving the given UEs at (q, h)."""
    ue_pos = np.atleast_2d(ue_pos)
    horiz_sq = np.sum((np.asarray(q, dtype=float)[None, :] - ue_pos) ** 2,
                      axis=-1)
    if model == "rician":
        v = h / np.sqrt(horiz_sq + h ** 2)
        r = channel.outage_rate(horiz_sq, h, v, tx_powers, params)
    else:
        r = channel.los_rate(horiz_sq, h, tx_powers, params)
    return float(np.sum(data_bits / r + cycles / cpu_hz))


# ---------------------------------------------------------------------------
# constraint blocks
# ---------------------------------------------------------------------------

class _TimeBlock(ConstraintBlock):
    """sum_i a_i / zeta_i + c_fix - mu <= 0 (single constraint)."""

    def __init__(self, a, c_fix, n, z_sl, mu_ix):
        self.a = a
        self.c_fix = c_fix
        self.n = n
        self.z_sl = z_sl
        self.mu_ix = mu_ix

    def value(self, x):
        return np.array([np.sum(self.a / x[self.z_sl]) + self.c_fix - x[self.mu_ix]])

    def jacobian(self, x):
        jac = np.zeros((1, self.n))
        jac[0, self.z_sl] = -self.a / x[self.z_sl] ** 2
        jac[0, self.mu_ix] = -1.0
        return jac

    def hessian(self, x, w):
        h = np.zeros((self.n, self.n))
        zi = np.arange(*self.z_sl.indices(self.n))
        h[zi, zi] = w[0] * 2.0 * self.a / x[self.z_sl] ** 3
        return h


class _QuadExpBlock(ConstraintBlock):
    """zeta_i + ce_i * E(v_i) + cq_i * ||q - w_i||^2 <= rhs_i (per UE).

    With ce = 0 and no v variables this degenerates to the LoS bound.
    """

    def __init__(self, ce, cq, rhs, w_pos, params, n, q_sl, v_sl, z_sl):
        self.ce = ce
        self.cq = cq
        self.rhs = rhs
        self.w_pos = w_pos
        self.params = params
        self.n = n
        self.q_sl = q_sl
        self.v_sl = v_sl      # None for the LoS variant
        self.z_sl = z_sl

    def value(self, x):
        q = x[self.q_sl]
        sq = np.sum((q[None, :] - self.w_pos) ** 2, axis=-1)
        out = x[self.z_sl] + self.cq * sq - self.rhs
        if self.v_sl is not None:
            out = out + self.ce * _exp_term(x[self.v_sl], self.params)
        return out

    def jacobian(self, x):
        q = x[self.q_sl]
        s = q[None, :] - self.w_pos
        m = len(self.cq)
        jac = np.zeros((m, self.n))
        jac[:, self.q_sl] = 2.0 * self.cq[:, None] * s
        zi = np.arange(*self.z_sl.indices(self.n))
        jac[np.arange(m), zi] = 1.0
        if self.v_sl is not None:
            vi = np.arange(*self.v_sl.indices(self.n))
            jac[np.arange(m), vi] = (-self.params.k4 * self.ce
                                     * _exp_term(x[self.v_sl], self.params))
        return jac

    def hessian(self, x, w):
        h = np.zeros((self.n, self.n))
        qi = np.arange(*self.q_sl.indices(self.n))
        h[qi, qi] += 2.0 * np.sum(w * self.cq)
        if self.v_sl is not None:
            vi = np.arange(*self.v_sl.indices(self.n))
            h[vi, vi] += (w * self.params.k4 ** 2 * self.ce
                          * _exp_term(x[self.v_sl], self.params))
        return h


class _VBoundBlock(ConstraintBlock):
    """v_i + c_i * ||q - w_i||^2 <= rhs_i (horizontal sine bound)."""

    def __init__(self, coef, rhs, w_pos, n, q_sl, v_sl):
        self.coef = coef
        self.rhs = rhs
        self.w_pos = w_pos
        self.n = n
        self.q_sl = q_sl
        self.v_sl = v_sl

    def value(self, x):
        q = x[self.q_sl]
        sq = np.sum((q[None, :] - self.w_pos) ** 2, axis=-1)
        return x[self.v_sl] + self.coef * sq - self.rhs

    def jacobian(self, x):
        q = x[self.q_sl]
        s = q[None, :] - self.w_pos
        m = len(self.coef)
        jac = np.zeros((m, self.n))
        jac[:, self.q_sl] = 2.0 * self.coef[:, None] * s
        vi = np.arange(*self.v_sl.indices(self.n))
        jac[np.arange(m), vi] = 1.0
        return jac

    def hessian(self, x, w):
        h = np.zeros((self.n, self.n))
        qi = np.arange(*self.q_sl.indices(self.n))
        h[qi, qi] += 2.0 * np.sum(w * self.coef)
        return h


class _SineBlock(ConstraintBlock):
    """v_i - H / sqrt(a3_i + H^2) <= 0 (exact, convex for H > 0)."""

    def __init__(self, a3, n, h_ix, v_sl):
        self.a3 = a3
        self.n = n
        self.h_ix = h_ix
        self.v_sl = v_sl

    def value(self, x):
        h = x[self.h_ix]
        return x[self.v_sl] - h / np.sqrt(self.a3 + h ** 2)

    def jacobian(self, x):
        h = x[self.h_ix]
        m = len(self.a3)
        jac = np.zeros((m, self.n))
        jac[:, self.h_ix] = -self.a3 / (self.a3 + h ** 2) ** 1.5
        vi = np.arange(*self.v_sl.indices(self.n))
        jac[np.arange(m), vi] = 1.0
        return jac

    def hessian(self, x, w):
        h = x[self.h_ix]
        out = np.zeros((self.n, self.n))
        out[self.h_ix, self.h_ix] = np.sum(
            w * 3.0 * self.a3 * h / (self.a3 + h ** 2) ** 2.5)
        return out


class _VertRateBlock(ConstraintBlock):
    """zeta_i + ce_i * E(v_i) + cq_i * H^2 <= rhs_i (vertical rate bound)."""

    def __init__(self, ce, cq, rhs, params, n, h_ix, v_sl, z_sl):
        self.ce = ce
        self.cq = cq
        self.rhs = rhs
        self.params = params
        self.n = n
        self.h_ix = h_ix
        self.v_sl = v_sl      # None for the LoS variant
        self.z_sl = z_sl

    def value(self, x):
        h = x[self.h_ix]
        out = x[self.z_sl] + self.cq * h ** 2 - self.rhs
        if self.v_sl is not None:
            out = out + self.ce * _exp_term(x[self.v_sl], self.params)
        return out

    def jacobian(self, x):
        h = x[self.h_ix]
        m = len(self.cq)
        jac = np.zeros((m, self.n))
        jac[:, self.h_ix] = 2.0 * self.cq * h
        zi = np.arange(*self.z_sl.indices(self.n))
        jac[np.arange(m), zi] = 1.0
        if self.v_sl is not None:
            vi = np.arange(*self.v_sl.indices(self.n))
            jac[np.arange(m), vi] = (-self.params.k4 * self.ce
                                     * _exp_term(x[self.v_sl], self.params))
        return jac

    def hessian(self, x, w):
        h = x[self.h_ix]
        out = np.zeros((self.n, self.n))
        out[self.h_ix, self.h_ix] = 2.0 * np.sum(w * self.cq)
        if self.v_sl is not None:
            vi = np.arange(*self.v_sl.indices(self.n))
            out[vi, vi] += (w * self.params.k4 ** 2 * self.ce
                            * _exp_term(x[self.v_sl], self.params))
        return out


# ---------------------------------------------------------------------------
# subproblem solves
# ---------------------------------------------------------------------------

def _interior_q(q, box):
    mx = 1e-7 * (box.x_max - box.x_min)
    my = 1e-7 * (box.y_max - box.y_min)
    return np.array([np.clip(q[0], box.x_min + mx, box.x_max - mx),
                     np.clip(q[1], box.y_min + my, box.y_max - my)])


def solve_horizontal(exp_point: ExpansionPoint, ue_data, box, params,
                     tol=1e-8, max_newton=4000, model="rician"):
    """One SCA step on a UAV's horizontal position at fixed altitude.

    ue_data is (data_bits, cycles, tx_powers, cpu_hz) for the served UEs.
    """
    data_bits, cycles, tx_powers, cpu_hz = ue_data
    s = len(exp_point.r_hat)
    h_fix = exp_point.h_hat
    use_v = model == "rician"
    if use_v:
        coef_exp, coef_quad = psi_coefficients(exp_point, params)
    else:
        coef_exp = np.zeros(s)
        coef_quad = los_coefficient(exp_point.d_sq_hat, exp_point.gamma, params)

    q_sl = slice(0, 2)
    if use_v:
        v_sl = slice(2, 2 + s)
        z_sl = slice(2 + s, 2 + 2 * s)
        n = 3 + 2 * s
    else:
        v_sl = None
        z_sl = slice(2, 2 + s)
        n = 3 + s
    mu_ix = n - 1

    a = data_bits / exp_point.r_hat
    c_fix = float(np.sum(cycles / cpu_hz))
    ce = coef_exp / exp_point.r_hat
    cq = coef_quad / exp_point.r_hat
    e_hat = _exp_term(exp_point.v_hat, params)
    rhs = 1.0 + cq * exp_point.horiz_sq_hat
    if use_v:
        rhs = rhs + ce * e_hat

    blocks = [_TimeBlock(a, c_fix, n, z_sl, mu_ix),
              _QuadExpBlock(ce, cq, rhs, exp_point.ue_pos, params, n,
                            q_sl, v_sl, z_sl)]
    if use_v:
        slope = exp_point.h_hat / (2.0 * exp_point.d_sq_hat ** 1.5)
        v_rhs = exp_point.v_hat + slope * exp_point.horiz_sq_hat
        blocks.append(_VBoundBlock(slope, v_rhs, exp_point.ue_pos, n,
                                   q_sl, v_sl))

    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    lo[q_sl] = [box.x_min, box.y_min]
    hi[q_sl] = [box.x_max, box.y_max]
    if use_v:
        lo[v_sl] = V_FLOOR
        hi[v_sl] = 1.0
    lo[z_sl] = Z_FLOOR / exp_point.r_hat
    lo[mu_ix] = 0.0
    hi[mu_ix] = MU_CAP

    prog = ConvexProgram(n=n, c=np.eye(n)[mu_ix], blocks=blocks, lo=lo, hi=hi)

    x0 = np.zeros(n)
    x0[q_sl] = _interior_q(exp_point.q_hat, box)
    sq0 = np.sum((x0[q_sl][None, :] - exp_point.ue_pos) ** 2, axis=-1)
    if use_v:
        v0 = np.clip(np.minimum(exp_point.v_hat,
                                v_rhs - slope * sq0) * (1 - 1e-6),
                     2 * V_FLOOR, 1.0 - 1e-9)
        x0[v_sl] = v0
        slack = rhs - ce * _exp_term(v0, params) - cq * sq0
    else:
        slack = rhs - cq * sq0
    x0[z_sl] = np.maximum(slack * (1 - 1e-6), 2 * Z_FLOOR / exp_point.r_hat)
    x0[mu_ix] = min(float(np.sum(a / x0[z_sl])) + c_fix + 1e-6, MU_CAP) * (1 + 1e-6)

    res = solve_convex(prog, x0, tol=tol, max_newton=max_newton)
    if res.x is None or res.status in (Status.INFEASIBLE,
                                       Status.NUMERICAL_FAILURE):
        t_old = true_uav_time(exp_point.q_hat, h_fix, exp_point.ue_pos,
                              data_bits, cycles, tx_powers, cpu_hz, params,
                              model)
        return SubproblemSolution(position=exp_point.q_hat.copy(),
                                  v=exp_point.v_hat.copy(),
                                  z=exp_point.r_hat.copy(), mu=t_old,
                                  status=res.status, accepted=False)

    q_new = res.x[q_sl].copy()
    t_old = true_uav_time(exp_point.q_hat, h_fix, exp_point.ue_pos, data_bits,
                          cycles, tx_powers, cpu_hz, params, model)
    t_new = true_uav_time(q_new, h_fix, exp_point.ue_pos, data_bits, cycles,
                          tx_powers, cpu_hz, params, model)
    if t_new > t_old + 1e-9:
        return SubproblemSolution(position=exp_point.q_hat.copy(),
                                  v=exp_point.v_hat.copy(),
                                  z=exp_point.r_hat.copy(), mu=t_old,
                                  status=res.status, accepted=False)
    v_out = res.x[v_sl].copy() if use_v else exp_point.v_hat.copy()
    return SubproblemSolution(position=q_new, v=v_out,
                              z=res.x[z_sl] * exp_point.r_hat,
                              mu=float(res.x[mu_ix]), status=res.status,
                              accepted=True)


def solve_vertical(exp_point: ExpansionPoint, ue_data, box, params,
                   tol=1e-8, max_newton=4000, model="rician"):
    """One SCA step on a UAV's altitude at fixed horizontal position."""
    data_bits, cycles, tx_powers, cpu_hz = ue_data
    s = len(exp_point.r_hat)
    use_v = model == "rician"
    if use_v:
        coef_exp, coef_quad = phi_coefficients(exp_point, params)
    else:
        coef_exp = np.zeros(s)
        coef_quad = los_coefficient(exp_point.d_sq_hat, exp_point.gamma, params)

    h_ix = 0
    if use_v:
        v_sl = slice(1, 1 + s)
        z_sl = slice(1 + s, 1 + 2 * s)
        n = 2 + 2 * s
    else:
        v_sl = None
        z_sl = slice(1, 1 + s)
        n = 2 + s
    mu_ix = n - 1

    a = data_bits / exp_point.r_hat
    c_fix = float(np.sum(cycles / cpu_hz))
    ce = coef_exp / exp_point.r_hat
    cq = coef_quad / exp_point.r_hat
    e_hat = _exp_term(exp_point.v_hat, params)
    rhs = 1.0 + cq * exp_point.h_hat ** 2
    if use_v:
        rhs = rhs + ce * e_hat

    blocks = [_TimeBlock(a, c_fix, n, z_sl, mu_ix),
              _VertRateBlock(ce, cq, rhs, params, n, h_ix, v_sl, z_sl)]
    if use_v:
        blocks.append(_SineBlock(exp_point.horiz_sq_hat, n, h_ix, v_sl))

    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    lo[h_ix] = box.h_min
    hi[h_ix] = box.h_max
    if use_v:
        lo[v_sl] = V_FLOOR
        hi[v_sl] = 1.0
    lo[z_sl] = Z_FLOOR / exp_point.r_hat
    lo[mu_ix] = 0.0
    hi[mu_ix] = MU_CAP

    prog = ConvexProgram(n=n, c=np.eye(n)[mu_ix], blocks=blocks, lo=lo, hi=hi)

    x0 = np.zeros(n)
    margin = max(1e-7 * (box.h_max - box.h_min), 1e-9)
    h0 = float(np.clip(exp_point.h_hat, box.h_min + margin,
                       box.h_max - margin))
    x0[h_ix] = h0
    if use_v:
        v_true0 = h0 / np.sqrt(exp_point.horiz_sq_hat + h0 ** 2)
        v0 = np.clip(v_true0 * (1 - 1e-6), 2 * V_FLOOR, 1.0 - 1e-12)
        x0[v_sl] = v0
        slack = rhs - ce * _exp_term(v0, params) - cq * h0 ** 2
    else:
        slack = rhs - cq * h0 ** 2
    x0[z_sl] = np.maximum(slack * (1 - 1e-6), 2 * Z_FLOOR / exp_point.r_hat)
    x0[mu_ix] = min(float(np.sum(a / x0[z_sl])) + c_fix + 1e-6, MU_CAP) * (1 + 1e-6)

    res = solve_convex(prog, x0, tol=tol, max_newton=max_newton)
    if res.x is None or res.status in (Status.INFEASIBLE,
                                       Status.NUMERICAL_FAILURE):
        t_old = true_uav_time(exp_point.q_hat, exp_point.h_hat,
                              exp_point.ue_pos, data_bits, cycles, tx_powers,
                              cpu_hz, params, model)
        return SubproblemSolution(position=np.float64(exp_point.h_hat),
                                  v=exp_point.v_hat.copy(),
                                  z=exp_point.r_hat.copy(), mu=t_old,
                                  status=res.status, accepted=False)

    h_new = float(res.x[h_ix])
    t_old = true_uav_time(exp_point.q_hat, exp_point.h_hat, exp_point.ue_pos,
                          data_bits, cycles, tx_powers, cpu_hz, params, model)
    t_new = true_uav_time(exp_point.q_hat, h_new, exp_point.ue_pos, data_bits,
                          cycles, tx_powers, cpu_hz, params, model)
    if t_new > t_old + 1e-9:
        return SubproblemSolution(position=np.float64(exp_point.h_hat),
                                  v=exp_point.v_hat.copy(),
                                  z=exp_point.r_hat.copy(), mu=t_old,
                                  status=res.status, accepted=False)
    v_out = res.x[v_sl].copy() if use_v else exp_point.v_hat.copy()
    return SubproblemSolution(position=np.float64(h_new), v=v_out,
                              z=res.x[z_sl] * exp_point.r_hat,
                              mu=float(res.x[mu_ix]), status=res.status,
                              accepted=True)
