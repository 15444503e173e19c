"""Second-order cone programming by a primal-dual interior-point method.

Problem form:

    minimize    c'x
    subject to  A x = b                      (equality rows)
                G x + s = h,   s in K        (cone rows)

where K is an ordered product of nonnegative-orthant blocks and second-order
cone blocks partitioning the slack vector s.  The solver runs Nesterov-Todd
scaled predictor-corrector steps on the homogeneous self-dual embedding, so
primal/dual infeasibility is certified rather than inferred from stalling.

Data is Ruiz-equilibrated before solving; all reported residuals and the
duality gap refer to the normalized problem, while objective values are
translated back to the caller's units.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

__all__ = ["ConicProblem", "SolveReport", "SolverError", "solve"]

PRESOLVE_TOL = 1e-10   # dependent equality rows dropped below this
STEP_BACKOFF = 0.99
REG = 1e-9             # static KKT regularization (undone by refinement)
STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_MAXITER = "max_iterations"


class SolverError(ValueError):
    """Malformed problem data (dimension or cone bookkeeping mismatch)."""


@dataclass(frozen=True)
class ConicProblem:
    """Conic program data plus the variable map used for extraction.

    ``cones`` lists ("nonneg", dim) and ("soc", dim) blocks in row order;
    their dims must sum to the number of cone rows.  ``var_index`` maps a
    variable name to (offset, length, kind) with kind "real" or "complex"
    (complex vectors are stored as real parts then imaginary parts).
    """

    c: np.ndarray
    cone_lhs: np.ndarray   # G, (m, n)
    cone_rhs: np.ndarray   # h, (m,)
    eq_lhs: np.ndarray     # A, (p, n)
    eq_rhs: np.ndarray     # b, (p,)
    cones: tuple[tuple[str, int], ...]
    var_index: dict = field(default_factory=dict)
    obj_const: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.c.shape[0]
        m, p = self.cone_lhs.shape[0], self.eq_lhs.shape[0]
        if self.cone_lhs.shape != (m, n) or self.cone_rhs.shape != (m,):
            raise SolverError("cone system shape mismatch")
        if self.eq_lhs.shape != (p, n) or self.eq_rhs.shape != (p,):
            raise SolverError("equality system shape mismatch")
        if sum(d for _, d in self.cones) != m:
            raise SolverError("cone dims must sum to the slack dimension")
        for kind, d in self.cones:
            if kind not in ("nonneg", "soc") or d < 1:
                raise SolverError(f"bad cone block ({kind}, {d})")
        if m == 0:
            raise SolverError("need at least one cone row")

    @property
    def num_vars(self) -> int:
        return self.c.shape[0]

    def extract(self, x: np.ndarray, name: str):
        off, length, kind = self.var_index[name]
        chunk = x[off:off + length]
        if kind == "complex":
            k = length // 2
            return chunk[:k] + 1j * chunk[k:]
        return chunk.copy()

    def to_text(self) -> str:
        """Plain-text interchange dump (JSON of objective, triplets, cones)."""
        def triplets(mat):
            r, cidx = np.nonzero(mat)
            return [[int(i), int(j), float(mat[i, j])] for i, j in zip(r, cidx)]
        doc = {
            "n": self.num_vars,
            "c": self.c.tolist(),
            "obj_const": self.obj_const,
            "eq": {"rows": int(self.eq_lhs.shape[0]),
                   "triplets": triplets(self.eq_lhs), "rhs": self.eq_rhs.tolist()},
            "cone": {"rows": int(self.cone_lhs.shape[0]),
                     "triplets": triplets(self.cone_lhs), "rhs": self.cone_rhs.tolist()},
            "cones": [[kind, int(d)] for kind, d in self.cones],
        }
        return json.dumps(doc)

    @staticmethod
    def from_text(text: str) -> "ConicProblem":
        doc = json.loads(text)
        n = doc["n"]

        def dense(block):
            mat = np.zeros((block["rows"], n))
            for i, j, v in block["triplets"]:
                mat[i, j] = v
            return mat

        return ConicProblem(
            c=np.asarray(doc["c"], dtype=float),
            cone_lhs=dense(doc["cone"]),
            cone_rhs=np.asarray(doc["cone"]["rhs"], dtype=float),
            eq_lhs=dense(doc["eq"]),
            eq_rhs=np.asarray(doc["eq"]["rhs"], dtype=float),
            cones=tuple((k, d) for k, d in doc["cones"]),
            obj_const=doc.get("obj_const", 0.0),
        )


@dataclass
class SolveReport:
    status: str
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    s: np.ndarray
    primal_objective: float
    dual_objective: float
    duality_gap: float
    primal_residual: float
    dual_residual: float
    iterations: int
    message: str = ""
    trace: list = field(default_factory=list)
    primal_vars: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == STATUS_OPTIMAL


# ---------------------------------------------------------------------------
# Cone algebra.  Blocks are handled through index slices into the slack dim.


def _cone_slices(cones):
    out, off = [], 0
    for kind, d in cones:
        out.append((kind, slice(off, off + d)))
        off += d
    return out


def _cone_degree(cones):
    return sum(d if kind == "nonneg" else 1 for kind, d in cones)


def _identity_element(cones, m):
    e = np.zeros(m)
    for kind, sl in _cone_slices(cones):
        if kind == "nonneg":
            e[sl] = 1.0
        else:
            e[sl.start] = 1.0
    return e


def _cone_margin(v, cones):
    """Smallest interior margin; > 0 iff strictly inside every block."""
    worst = np.inf
    for kind, sl in _cone_slices(cones):
        blk = v[sl]
        if kind == "nonneg":
            worst = min(worst, blk.min() if blk.size else np.inf)
        else:
            worst = min(worst, blk[0] - np.linalg.norm(blk[1:]))
    return worst


def _max_step(v, dv, cones):
    """Largest t with v + t*dv still in the cone (np.inf if unbounded)."""
    t_max = np.inf
    for kind, sl in _cone_slices(cones):
        u, d = v[sl], dv[sl]
        if kind == "nonneg":
            neg = d < 0
            if np.any(neg):
                t_max = min(t_max, np.min(-u[neg] / d[neg]))
        else:
            a = d[0] ** 2 - d[1:] @ d[1:]
            b = 2.0 * (u[0] * d[0] - u[1:] @ d[1:])
            cc = u[0] ** 2 - u[1:] @ u[1:]
            # First positive root of a t^2 + b t + c = 0 (c > 0 inside).
            if abs(a) < 1e-300:
                if b < 0:
                    t_max = min(t_max, -cc / b)
            else:
                disc = b * b - 4.0 * a * cc
                if disc >= 0:
                    sq = np.sqrt(disc)
                    roots = sorted(r for r in ((-b - sq) / (2 * a), (-b + sq) / (2 * a))
                                   if r > 0)
                    if roots:
                        t_max = min(t_max, roots[0])
    return t_max


def _jordan_mul(u, v, cones):
    out = np.empty_like(u)
    for kind, sl in _cone_slices(cones):
        a, bb = u[sl], v[sl]
        if kind == "nonneg":
            out[sl] = a * bb
        else:
            out[sl.start] = a @ bb
            out[sl.start + 1:sl.stop] = a[0] * bb[1:] + bb[0] * a[1:]
    return out


def _jordan_solve(lam, d, cones):
    """x with lam o x = d, blockwise."""
    out = np.empty_like(d)
    for kind, sl in _cone_slices(cones):
        l, rhs = lam[sl], d[sl]
        if kind == "nonneg":
            out[sl] = rhs / l
        else:
            l0, l1 = l[0], l[1:]
            det = l0 * l0 - l1 @ l1
            x0 = (l0 * rhs[0] - l1 @ rhs[1:]) / det
            out[sl.start] = x0
            out[sl.start + 1:sl.stop] = (rhs[1:] - x0 * l1) / l0
    return out


class _Scaling:
    """Nesterov-Todd scaling W per cone block: W z = W^{-1} s = lambda."""

    def __init__(self, s, z, cones, identity=False):
        self.cones = cones
        self.blocks = []
        for kind, sl in _cone_slices(cones):
            if identity:
                if kind == "nonneg":
                    self.blocks.append((kind, sl, np.ones(sl.stop - sl.start)))
                else:
                    wb = np.zeros(sl.stop - sl.start)
                    wb[0] = 1.0
                    self.blocks.append((kind, sl, (1.0, wb)))
                continue
            sb_, zb_ = s[sl], z[sl]
            if kind == "nonneg":
                self.blocks.append((kind, sl, np.sqrt(sb_ / zb_)))
            else:
                rs = np.sqrt(max(sb_[0] ** 2 - sb_[1:] @ sb_[1:], 1e-300))
                rz = np.sqrt(max(zb_[0] ** 2 - zb_[1:] @ zb_[1:], 1e-300))
                sn, zn = sb_ / rs, zb_ / rz
                gamma = np.sqrt(max((1.0 + sn @ zn) / 2.0, 1e-300))
                wb = sn.copy()
                wb[0] += zn[0]
                wb[1:] -= zn[1:]
                wb /= 2.0 * gamma
                self.blocks.append((kind, sl, (np.sqrt(rs / rz), wb)))

    @staticmethod
    def _t_mul(wb, v, inverse=False):
        """Multiply by T(wb) = [[w0, w1'], [w1, I + w1 w1'/(1+w0)]] (or inverse)."""
        w0, w1 = wb[0], wb[1:].copy()
        if inverse:
            w1 = -w1  # T(wb)^{-1} = J T(wb) J
        out = np.empty_like(v)
        out[0] = w0 * v[0] + w1 @ v[1:]
        out[1:] = v[0] * w1 + v[1:] + (w1 @ v[1:]) / (1.0 + w0) * w1
        return out

    def mul_w(self, v):
        out = np.empty_like(v)
        for kind, sl, data in self.blocks:
            if kind == "nonneg":
                out[sl] = data * v[sl]
            else:
                scale, wb = data
                out[sl] = scale * self._t_mul(wb, v[sl])
        return out

    def mul_winv(self, v):
        out = np.empty_like(v)
        for kind, sl, data in self.blocks:
            if kind == "nonneg":
                out[sl] = v[sl] / data
            else:
                scale, wb = data
                out[sl] = self._t_mul(wb, v[sl], inverse=True) / scale
        return out

    def mul_w2(self, v):
        out = np.empty_like(v)
        for kind, sl, data in self.blocks:
            if kind == "nonneg":
                out[sl] = data * data * v[sl]
            else:
                scale, wb = data
                out[sl] = scale ** 2 * self._t_mul(wb, self._t_mul(wb, v[sl]))
        return out

    def w2_blocks(self):
        """Dense W^2 blocks (for KKT assembly), in cone order."""
        out = []
        for kind, sl, data in self.blocks:
            if kind == "nonneg":
                out.append(("diag", data * data))
            else:
                scale, wb = data
                d = wb.shape[0]
                jw = np.eye(d)
                jw[1:, 1:] *= -1.0
                out.append(("dense", scale ** 2 * (2.0 * np.outer(wb, wb) - jw)))
        return out


# ---------------------------------------------------------------------------
# Equilibration and presolve.


def _ruiz_equilibrate(c, G, h, A, b, cones, iters=8):
    """Row/column scaling; SOC row blocks share one scale to keep cone shape."""
    p, n = A.shape
    m = G.shape[0]
    dr_a = np.ones(p)
    dr_g = np.ones(m)
    dc = np.ones(n)
    As, Gs = A.copy(), G.copy()
    slices = _cone_slices(cones)
    for _ in range(iters):
        ra = np.maximum(np.sqrt(np.abs(As).max(axis=1)), 1e-8) if p else np.ones(0)
        rg = np.sqrt(np.maximum(np.abs(Gs).max(axis=1), 1e-16))
        for kind, sl in slices:
            if kind == "soc":
                rg[sl] = rg[sl].max()
        rg = np.maximum(rg, 1e-8)
        if p:
            As /= ra[:, None]
            dr_a /= ra
        Gs /= rg[:, None]
        dr_g /= rg
        stacked = np.vstack([As, Gs]) if p else Gs
        cnorm = np.sqrt(np.maximum(np.abs(stacked).max(axis=0), 1e-16))
        cnorm = np.maximum(cnorm, 1e-8)
        As /= cnorm[None, :] if p else 1.0
        Gs /= cnorm[None, :]
        dc /= cnorm
    cs = c * dc
    cost_scale = max(1.0, np.abs(cs).max()) if cs.size else 1.0
    return (cs / cost_scale, Gs, h * dr_g, As, b * dr_a,
            dc, dr_a, dr_g, cost_scale)


def _presolve_equalities(A, b):
    """Drop numerically dependent equality rows; flag inconsistency."""
    p = A.shape[0]
    if p == 0:
        return A, b, [], False
    q, r, piv = scipy.linalg.qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    scale = diag.max() if diag.size and diag.max() > 0 else 1.0
    rank = int(np.sum(diag > PRESOLVE_TOL * scale))
    if rank == p:
        return A, b, [], False
    keep = sorted(piv[:rank])
    x_ls, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = A @ x_ls - b
    inconsistent = bool(np.max(np.abs(resid)) > 1e-8 * max(1.0, np.abs(b).max()))
    dropped = sorted(set(range(p)) - set(keep))
    return A[keep], b[keep], dropped, inconsistent


# ---------------------------------------------------------------------------
# KKT assembly and solution.


class _KktSolver:
    """Factor [[0 A' G'], [A 0 0], [G 0 -W^2]] with static regularization."""

    def __init__(self, A, G, cones):
        self.A = sp.csr_matrix(A)
        self.G = sp.csr_matrix(G)
        self.cones = cones
        self.n = A.shape[1]
        self.p = A.shape[0]
        self.m = G.shape[0]

    def factor(self, scaling: _Scaling):
        n, p, m = self.n, self.p, self.m
        blocks = []
        for kind, blk in scaling.w2_blocks():
            blocks.append(sp.diags(blk) if kind == "diag" else sp.csc_matrix(blk))
        w2 = sp.block_diag(blocks, format="csc")
        reg_x = REG * sp.identity(n)
        neg_w2 = -(w2 + REG * sp.identity(m))
        if p:
            k = sp.bmat([
                [reg_x, self.A.T, self.G.T],
                [self.A, -REG * sp.identity(p), None],
                [self.G, None, neg_w2],
            ], format="csc")
        else:
            k = sp.bmat([[reg_x, self.G.T], [self.G, neg_w2]], format="csc")
        self._lu = spla.splu(k)
        self._scaling = scaling

    def _apply_unreg(self, u):
        n, p, m = self.n, self.p, self.m
        x, y, z = u[:n], u[n:n + p], u[n + p:]
        top = (self.A.T @ y if p else 0) + self.G.T @ z
        mid = self.A @ x if p else np.zeros(0)
        bot = self.G @ x - self._scaling.mul_w2(z)
        return np.concatenate([top, mid, bot])

    def solve(self, rx, ry, rz, refine=4):
        rhs = np.concatenate([rx, ry, rz])
        u = self._lu.solve(rhs)
        for _ in range(refine):
            resid = rhs - self._apply_unreg(u)
            if np.max(np.abs(resid)) < 1e-14 * max(1.0, np.max(np.abs(rhs))):
                break
            u += self._lu.solve(resid)
        n, p = self.n, self.p
        return u[:n], u[n:n + p], u[n + p:]


def solve(problem: ConicProblem, gap_tol: float = 1e-8, feas_tol: float = 1e-8,
          max_iter: int = 100) -> SolveReport:
    """Run the interior-point method; see module docstring for the form."""
    with np.errstate(all="ignore"):
        return _solve_impl(problem, gap_tol, feas_tol, max_iter)


def _solve_impl(problem: ConicProblem, gap_tol: float, feas_tol: float,
                max_iter: int) -> SolveReport:
    cones = problem.cones
    c0, G0, h0 = problem.c, problem.cone_lhs, problem.cone_rhs
    A0, b0 = problem.eq_lhs, problem.eq_rhs

    A0, b0, dropped, inconsistent = _presolve_equalities(A0, b0)
    if inconsistent:
        return _report(problem, STATUS_INFEASIBLE, None,
                       message="equality system inconsistent at presolve tolerance",
                       iterations=0)

    c, G, h, A, b, dc, dra, drg, cost_scale = _ruiz_equilibrate(
        c0, G0, h0, A0, b0, cones)
    n, p, m = c.shape[0], A.shape[0], G.shape[0]
    e = _identity_element(cones, m)
    deg = _cone_degree(cones)
    norm_b = max(1.0, np.linalg.norm(b)) if p else 1.0
    norm_h = max(1.0, np.linalg.norm(h))
    norm_c = max(1.0, np.linalg.norm(c))

    kkt = _KktSolver(A, G, cones)

    # Initial point: least-squares style starts shifted into the cone.
    kkt.factor(_Scaling(None, None, cones, identity=True))
    x, _, z_init = kkt.solve(np.zeros(n), b.copy(), h.copy())
    s = -z_init
    margin = _cone_margin(s, cones)
    if margin <= 0:
        s = s + (1.0 - margin) * e
    _, y, z = kkt.solve(-c, np.zeros(p), np.zeros(m))
    margin = _cone_margin(z, cones)
    if margin <= 0:
        z = z + (1.0 - margin) * e
    tau, kappa = 1.0, 1.0

    trace = []
    status, message = STATUS_MAXITER, "iteration limit reached"
    it = 0
    best = None
    best_merit = np.inf
    for it in range(1, max_iter + 1):
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(z))
                and np.isfinite(tau) and tau > 0 and np.isfinite(kappa)):
            status, message = STATUS_MAXITER, "numerical breakdown (non-finite iterate)"
            break
        rx = A.T @ y + G.T @ z + c * tau if p else G.T @ z + c * tau
        ry = A @ x - b * tau
        rz = G @ x + s - h * tau
        rt = kappa + c @ x + (b @ y if p else 0.0) + h @ z
        mu = (s @ z + tau * kappa) / (deg + 1)

        pcost = c @ x / tau
        dcost = -((b @ y if p else 0.0) + h @ z) / tau
        # Normalized duality gap: absolute complementarity on the equilibrated
        # problem, relative once the objective exceeds unit scale.
        gap = (s @ z / tau ** 2) / max(1.0, abs(pcost))
        pres = max(np.linalg.norm(ry) / norm_b, np.linalg.norm(rz) / norm_h) / tau
        dres = np.linalg.norm(rx) / norm_c / tau
        trace.append({"pcost": pcost, "dcost": dcost, "gap": gap,
                      "pres": pres, "dres": dres, "mu": mu})

        merit = max(pres / feas_tol, dres / feas_tol, gap / gap_tol)
        if np.isfinite(merit) and merit < best_merit:
            best_merit = merit
            best = (x.copy(), y.copy(), z.copy(), s.copy(), tau, kappa,
                    gap, pres, dres)

        if pres <= feas_tol and dres <= feas_tol and gap <= gap_tol:
            status, message = STATUS_OPTIMAL, ""
            break

        by_hz = (b @ y if p else 0.0) + h @ z
        if by_hz < -1e-12:
            cert = np.linalg.norm(A.T @ y + G.T @ z if p else G.T @ z) / norm_c
            if cert / (-by_hz) <= feas_tol and _cone_margin(z, cones) > -feas_tol:
                scale_cert = -by_hz
                y, z = y / scale_cert, z / scale_cert
                status, message = STATUS_INFEASIBLE, "primal infeasibility certified"
                break
        cx = c @ x
        if cx < -1e-12:
            resid = max(np.linalg.norm(A @ x) / norm_b if p else 0.0,
                        np.linalg.norm(G @ x + s) / norm_h)
            if resid / (-cx) <= feas_tol and _cone_margin(s, cones) > -feas_tol:
                x, s = x / (-cx), s / (-cx)
                status, message = STATUS_UNBOUNDED, "dual infeasibility certified"
                break

        scaling = _Scaling(s, z, cones)
        lam = scaling.mul_w(z)
        try:
            kkt.factor(scaling)
        except (RuntimeError, ValueError):
            status, message = STATUS_MAXITER, "KKT factorization failed"
            break
        x1, y1, z1 = kkt.solve(-c, b.copy(), h.copy())
        # c'x1 + b'y1 + h'z1 equals -||W z1||^2 at the exact KKT solution; the
        # identity form keeps den strictly negative under round-off.
        den = -(np.sum(scaling.mul_w(z1) ** 2) + kappa / tau)
        if not np.isfinite(den) or den >= 0:
            status, message = STATUS_MAXITER, "numerical breakdown (degenerate step)"
            break

        def direction(eta, d_s, d_kappa):
            wl = scaling.mul_w(_jordan_solve(lam, d_s, cones))
            bz = -eta * rz + wl
            x2, y2, z2 = kkt.solve(-eta * rx, -eta * ry, bz)
            num = -eta * rt + d_kappa / tau - (c @ x2 + (b @ y2 if p else 0.0) + h @ z2)
            dtau = num / den
            dx = x2 + dtau * x1
            dy = y2 + dtau * y1
            dz = z2 + dtau * z1
            ds = -(wl + scaling.mul_w2(dz))
            dkappa = -(d_kappa + kappa * dtau) / tau
            return dx, dy, dz, ds, dtau, dkappa

        # Predictor.
        d_s_aff = _jordan_mul(lam, lam, cones)
        dxa, dya, dza, dsa, dta, dka = direction(1.0, d_s_aff, tau * kappa)
        alpha_aff = min(1.0, _max_step(s, dsa, cones), _max_step(z, dza, cones))
        if dta < 0:
            alpha_aff = min(alpha_aff, -tau / dta)
        if dka < 0:
            alpha_aff = min(alpha_aff, -kappa / dka)
        mu_aff = ((s + alpha_aff * dsa) @ (z + alpha_aff * dza)
                  + (tau + alpha_aff * dta) * (kappa + alpha_aff * dka)) / (deg + 1)
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3))

        # Corrector.
        corr = _jordan_mul(scaling.mul_winv(dsa), scaling.mul_w(dza), cones)
        d_s = d_s_aff + corr - sigma * mu * e
        d_kappa = tau * kappa + dta * dka - sigma * mu
        dx, dy, dz, ds, dtau, dkappa = direction(1.0 - sigma, d_s, d_kappa)

        alpha = min(_max_step(s, ds, cones), _max_step(z, dz, cones))
        if dtau < 0:
            alpha = min(alpha, -tau / dtau)
        if dkappa < 0:
            alpha = min(alpha, -kappa / dkappa)
        alpha = min(1.0, STEP_BACKOFF * alpha)
        if not np.isfinite(alpha) or alpha <= 1e-12:
            status, message = STATUS_MAXITER, "step length collapsed"
            break

        x += alpha * dx
        y += alpha * dy
        z += alpha * dz
        s += alpha * ds
        tau += alpha * dtau
        kappa += alpha * dkappa

    gap_rep = pres_rep = dres_rep = np.nan
    if trace:
        gap_rep, pres_rep, dres_rep = (trace[-1]["gap"], trace[-1]["pres"],
                                       trace[-1]["dres"])
    if status == STATUS_MAXITER and best is not None:
        # Fall back to the best iterate seen; grade it against the tolerances.
        x, y, z, s, tau, kappa, gap_rep, pres_rep, dres_rep = best
        if pres_rep <= feas_tol and dres_rep <= feas_tol and gap_rep <= gap_tol:
            status = STATUS_OPTIMAL
            message = "converged at best stored iterate"

    if status in (STATUS_INFEASIBLE, STATUS_UNBOUNDED):
        xs, ys, zs, ss = x, y, z, s
    else:
        t = tau if tau > 1e-300 else 1.0
        xs, ys, zs, ss = x / t, y / t, z / t, s / t

    # Undo equilibration.
    x_orig = dc * xs
    y_orig = cost_scale * dra * ys
    z_orig = cost_scale * drg * zs
    s_orig = ss / drg

    pcost = float(c @ xs) * cost_scale
    dcost = float(-((b @ ys if p else 0.0) + h @ zs)) * cost_scale
    report = SolveReport(
        status=status,
        x=x_orig, y=y_orig, z=z_orig, s=s_orig,
        primal_objective=pcost + problem.obj_const,
        dual_objective=dcost + problem.obj_const,
        duality_gap=float(gap_rep),
        primal_residual=float(pres_rep),
        dual_residual=float(dres_rep),
        iterations=it,
        message=message,
        trace=trace,
    )
    if dropped:
        report.message = (report.message + f" (presolve dropped rows {dropped})").strip()
    report.primal_vars = {name: problem.extract(x_orig, name)
                          for name in problem.var_index}
    return report


def _report(problem, status, x, message, iterations):
    n = problem.num_vars
    m = problem.cone_lhs.shape[0]
    p = problem.eq_lhs.shape[0]
    return SolveReport(
        status=status,
        x=np.zeros(n) if x is None else x,
        y=np.zeros(p), z=np.zeros(m), s=np.zeros(m),
        primal_objective=np.nan, dual_objective=np.nan,
        duality_gap=np.nan, primal_residual=np.nan, dual_residual=np.nan,
        iterations=iterations, message=message,
    )
