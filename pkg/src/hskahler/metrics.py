"""Frame metrics, Chern torsion, metric classes, and the HS decision.

The frame metric is the Hermitian matrix ``g[i, j] = <e_i, conj(e_j)>``
of a compatible real metric in a (1,0) frame; the pairing is the
bilinear extension of the real inner product, so ``<e_i, e_j> = 0``
automatically.  The fundamental form is

    omega = i * sum g[i, j] phi_i ^ conj(phi_j).

``hs_decide`` answers, for fixed (C, D, g), whether a closed form
``Omega = omega + alpha + conj(alpha)`` with invariant (2,0) part
``alpha = sum S_{ik} phi_i ^ phi_k`` exists.  That is a linear system in
the skew matrix S:

  (a)  sum_r ( S_{ri} C^r_{jk} + S_{rj} C^r_{ki} + S_{rk} C^r_{ij} ) = 0
  (b)  sum_r ( S_{rk} conj(D^i_{rj}) - S_{ri} conj(D^k_{rj}) )
           = -(i/2) sum_r T^r_{ik} g[r, j]

over all index triples, with T the Chern torsion.  Feasibility is read
off the least-squares residual.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .algebra import CheckResult, StructureConstants
from .config import Config, DEFAULT_CONFIG
from .errors import DimensionError, RankError, StructureError
from .forms import InvariantForm, del_and_delbar


def _cfg(cfg: Config | None) -> Config:
    return DEFAULT_CONFIG if cfg is None else cfg


def _max_abs(a: np.ndarray) -> float:
    return 0.0 if a.size == 0 else float(np.max(np.abs(a)))


class FrameMetric:
    """Hermitian positive definite metric matrix in a fixed frame."""

    def __init__(self, g, *, cfg: Config | None = None):
        cfg = _cfg(cfg)
        g = np.asarray(g, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionError(f"frame metric must be square, got {g.shape}")
        scale = max(1.0, _max_abs(g))
        herm = _max_abs(g - g.conj().T)
        if herm > cfg.tol_alg * scale:
            raise StructureError(f"frame metric is not Hermitian, residual {herm:.3e}")
        g = (g + g.conj().T) / 2.0
        eigmin = float(np.min(np.linalg.eigvalsh(g)))
        if eigmin <= 0.0:
            raise RankError(f"frame metric is not positive definite, min eigenvalue {eigmin:.3e}")
        self.g = g
        self.n = g.shape[0]
        self.min_eig = eigmin

    @property
    def ginv(self) -> np.ndarray:
        return np.linalg.inv(self.g)

    def __repr__(self) -> str:  # pragma: no cover
        return f"FrameMetric(n={self.n})"


def _as_g(g) -> np.ndarray:
    return g.g if isinstance(g, FrameMetric) else np.asarray(g, dtype=complex)


def frame_metric_from_real(G, frame, *, cfg: Config | None = None) -> FrameMetric:
    """g[i, j] = E[:, i]^T G conj(E[:, j]) for a real metric G.

    Also requires the bilinear products <e_i, e_j> to vanish, which is
    the frame-level form of J-compatibility; a violation raises
    :class:`StructureError`.
    """
    cfg = _cfg(cfg)
    G = G.G if hasattr(G, "G") else np.asarray(G, dtype=float)
    E = frame.E
    g = np.einsum("ai,ab,bj->ij", E, G, np.conj(E))
    hol = np.einsum("ai,ab,bj->ij", E, G.astype(complex), E)
    scale = max(1.0, _max_abs(g))
    res = _max_abs(hol)
    if res > cfg.tol_alg * scale:
        raise StructureError(f"metric is not compatible with J: <e_i, e_j> residual {res:.3e}")
    return FrameMetric(g, cfg=cfg)


def chern_torsion(sc: StructureConstants, g) -> np.ndarray:
    """Torsion components T[j, i, k] = T^j_{ik} of the Chern connection:

    T^j_{ik} = -C^j_{ik} - sum_{a,b} D^b_{ak} g^{bar b, j} g[i, a]
                        + sum_{a,b} D^b_{ai} g^{bar b, j} g[k, a]

    with ``g^{bar b, j}`` the (b, j) entry of the inverse metric matrix.
    Antisymmetry in (i, k) is restored exactly after the contraction.
    A numerically singular g raises :class:`RankError`.
    """
    g = _as_g(g)
    sv = np.linalg.svd(g, compute_uv=False)
    if sv.size and sv[-1] <= 1e-13 * sv[0]:
        raise RankError("metric matrix is numerically singular")
    ginv = np.linalg.inv(g)
    t2 = np.einsum("bak,bj,ia->jik", sc.D, ginv, g)
    T = -sc.C - t2 + t2.swapaxes(1, 2)
    return (T - T.swapaxes(1, 2)) / 2.0


def chern_torsion_unitary(sc: StructureConstants) -> np.ndarray:
    """Closed form T^j_{ik} = D^j_{ki} - D^j_{ik} - C^j_{ik}, valid in a
    unitary frame (g = Identity)."""
    return sc.D.swapaxes(1, 2) - sc.D - sc.C


def kahler_form(g, n: int | None = None) -> InvariantForm:
    """omega = i * sum g[i, j] phi_i ^ conj(phi_j)."""
    g = _as_g(g)
    n = g.shape[0] if n is None else n
    terms = {}
    for i in range(n):
        for j in range(n):
            if g[i, j] != 0:
                terms[((i + 1,), (j + 1,))] = 1j * g[i, j]
    return InvariantForm(n, terms)


def kahler_check(sc: StructureConstants, g, *, cfg: Config | None = None) -> CheckResult:
    """d omega = 0; residual is the raw sup norm over form coefficients."""
    cfg = _cfg(cfg)
    g = _as_g(g)
    res = kahler_form(g).d(sc).sup()
    return CheckResult(res <= cfg.tol_alg, res)


def pluriclosed_check(sc: StructureConstants, g, *, cfg: Config | None = None) -> CheckResult:
    """del delbar omega = 0, raw sup norm."""
    cfg = _cfg(cfg)
    g = _as_g(g)
    omega = kahler_form(g)
    _, dbar_omega = del_and_delbar(sc, omega)
    ddbar, _ = del_and_delbar(sc, dbar_omega)
    res = ddbar.sup()
    return CheckResult(res <= cfg.tol_alg, res)


def balanced_check(sc: StructureConstants, g, *, cfg: Config | None = None) -> CheckResult:
    """d (omega^(n-1)) = 0; the (n-1)! factor the power picks up from
    repeated wedging is divided back out of the residual."""
    cfg = _cfg(cfg)
    g = _as_g(g)
    n = g.shape[0]
    omega = kahler_form(g)
    power = InvariantForm.scalar(n, 1.0)
    for _ in range(max(n - 1, 0)):
        power = power.wedge(omega)
    res = power.d(sc).sup() / float(math.factorial(max(n - 1, 1)))
    return CheckResult(res <= cfg.tol_alg, res)


# --------------------------------------------------------------------- HS ---


class HSSolution(NamedTuple):
    """Outcome of the linear feasibility problem for the (2,0) part."""

    feasible: bool
    S: np.ndarray | None
    residual: float        # ||A s - b||_2 at the least-squares optimum
    b_norm: float
    normalized: float      # residual / max(1, ||b||_2)


def _skew_basis(n: int) -> list[np.ndarray]:
    out = []
    for p in range(n):
        for q in range(p + 1, n):
            S = np.zeros((n, n), dtype=complex)
            S[p, q] = 1.0
            S[q, p] = -1.0
            out.append(S)
    return out


def _hs_rows(sc: StructureConstants, g: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Left-hand sides of both HS equation families for a given S, flattened."""
    C, D = sc.C, sc.D
    Dc = np.conj(D)
    fam_a = (
        np.einsum("ri,rjk->ijk", S, C)
        + np.einsum("rj,rki->ijk", S, C)
        + np.einsum("rk,rij->ijk", S, C)
    )
    fam_b = np.einsum("rk,irj->ikj", S, Dc) - np.einsum("ri,krj->ikj", S, Dc)
    return np.concatenate([fam_a.ravel(), fam_b.ravel()])


def _hs_rhs(sc: StructureConstants, g: np.ndarray) -> np.ndarray:
    T = chern_torsion(sc, g)
    rhs_b = -0.5j * np.einsum("rik,rj->ikj", T, g)
    return np.concatenate([np.zeros(sc.n**3, dtype=complex), rhs_b.ravel()])


def hs_decide(sc: StructureConstants, g, *, cfg: Config | None = None) -> HSSolution:
    """Decide existence of an invariant closed completion of omega.

    Solves the least-squares problem over skew matrices S and declares
    feasibility when the optimal residual is at most
    ``cfg.tol_feas * max(1, ||b||_2)``.  On feasible instances the
    minimum-norm S is returned (exactly skew); in particular b = 0, as
    for any Kahler pair, yields S = 0.  Infeasibility is a result, not
    an error.

    The pseudo-inverse cut is floored at the natural scale of the
    system (the largest structure constant), never taken relative to
    the matrix alone: when S drops out of the equations entirely the
    whole matrix is roundoff noise, and a relative cut would invert
    that noise instead of returning the plain distance to b.
    """
    cfg = _cfg(cfg)
    g = _as_g(g)
    n = sc.n
    basis = _skew_basis(n)
    b = _hs_rhs(sc, g)
    if not basis:
        b_norm = float(np.linalg.norm(b))
        normalized = b_norm / max(1.0, b_norm)
        feasible = normalized <= cfg.tol_feas
        return HSSolution(feasible, np.zeros((n, n), dtype=complex) if feasible else None, b_norm, b_norm, normalized)
    A = np.stack([_hs_rows(sc, g, Sb) for Sb in basis], axis=1)
    u, s, vh = np.linalg.svd(A, full_matrices=False)
    floor = max(float(s[0]) if s.size else 0.0, 1.0, sc.magnitude())
    keep = s > cfg.tol_rank * floor
    sol = vh.conj().T[:, keep] @ ((u[:, keep].conj().T @ b) / s[keep])
    res = float(np.linalg.norm(A @ sol - b))
    b_norm = float(np.linalg.norm(b))
    normalized = res / max(1.0, b_norm)
    feasible = normalized <= cfg.tol_feas
    S = None
    if feasible:
        S = np.zeros((n, n), dtype=complex)
        m = 0
        for p in range(n):
            for q in range(p + 1, n):
                S[p, q] = sol[m]
                S[q, p] = -sol[m]
                m += 1
    return HSSolution(feasible, S, res, b_norm, normalized)


def hs_residual_of(sc: StructureConstants, g, S) -> float:
    """Sup-norm defect of both HS equation families at a candidate S."""
    g = _as_g(g)
    S = np.asarray(S, dtype=complex)
    lhs = _hs_rows(sc, g, S)
    rhs = _hs_rhs(sc, g)
    return _max_abs(lhs - rhs)


def hs_form(S, n: int | None = None) -> InvariantForm:
    """alpha = sum_{i,k} S_{ik} phi_i ^ phi_k (both orders, so the
    canonical coefficient of phi_i ^ phi_k with i < k is 2 S_{ik})."""
    S = np.asarray(S, dtype=complex)
    n = S.shape[0] if n is None else n
    terms = {}
    for i in range(n):
        for k in range(i + 1, n):
            c = S[i, k] - S[k, i]
            if c != 0:
                terms[((i + 1, k + 1), ())] = c
    return InvariantForm(n, terms)


class HSSearchResult(NamedTuple):
    found: bool
    best_g: np.ndarray
    S: np.ndarray | None
    best_residual: float
    evals: int


def hs_metric_search(
    sc: StructureConstants,
    *,
    restarts: int = 6,
    budget: int = 500,
    seed: int = 0,
    cfg: Config | None = None,
) -> HSSearchResult:
    """Search over frame metrics for one admitting a closed completion.

    The metric is parametrized as g = L L^* (L a free complex matrix)
    and trace-normalized to tr g = n, which removes the overall-scale
    flat direction of the objective.  Candidates with an eigenvalue
    below 1e-3 of the mean are rejected: near the degenerate boundary
    the right-hand side of the feasibility system shrinks to zero and
    the normalized residual would certify a metric that is not honestly
    positive.  Coordinate descent with a multiplicatively adapted step
    runs for at most ``budget`` objective evaluations per restart;
    restart 0 starts exactly at L = Identity.  The objective is the
    normalized least-squares residual from :func:`hs_decide`, so a hit
    means feasibility at a well-conditioned g; a miss proves nothing.
    """
    cfg = _cfg(cfg)
    n = sc.n
    m = 2 * n * n

    def unpack(x: np.ndarray) -> np.ndarray:
        L = x[: n * n].reshape(n, n) + 1j * x[n * n :].reshape(n, n)
        g = L @ L.conj().T
        tr = float(np.trace(g).real)
        if tr <= 1e-12:
            return None
        g = g * (n / tr)
        if float(np.min(np.linalg.eigvalsh(g))) < 1e-3:
            return None
        return g

    def objective(x: np.ndarray) -> tuple[float, HSSolution | None]:
        g = unpack(x)
        if g is None:
            return float("inf"), None
        dec = hs_decide(sc, g, cfg=cfg)
        return dec.normalized, dec

    best = HSSearchResult(False, np.eye(n, dtype=complex), None, float("inf"), 0)
    total = 0
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        x = np.zeros(m)
        x[: n * n] = np.eye(n).ravel()
        if r > 0:
            x += 0.35 * rng.standard_normal(m)
        f, dec = objective(x)
        total += 1
        step = 0.25
        used = 1
        while used < budget and step > 1e-7:
            improved = False
            for i in range(m):
                if used >= budget:
                    break
                for s in (step, -step):
                    xt = x.copy()
                    xt[i] += s * max(1.0, abs(x[i]))
                    ft, dect = objective(xt)
                    used += 1
                    total += 1
                    if ft < f - 1e-15:
                        x, f, dec = xt, ft, dect
                        improved = True
                        break
                    if used >= budget:
                        break
                if f <= cfg.tol_feas:
                    break
            if f <= cfg.tol_feas:
                break
            if not improved:
                step *= 0.5
        if f < best.best_residual:
            g = unpack(x)
            S = dec.S if dec is not None else None
            best = HSSearchResult(f <= cfg.tol_feas, g if g is not None else best.best_g, S, f, total)
        if best.found:
            break
    return best._replace(evals=total)
