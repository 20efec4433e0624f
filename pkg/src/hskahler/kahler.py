"""Joint diagonalization, structural claims, and the constructive step.

On a 2-step solvable algebra in an admissible frame, a closed
completion S of the fundamental form forces a rigid block structure:
the Z and w blocks vanish, C_x = -D_x, the D_x form a commuting family
of normal matrices, and the v vectors lie in their ranges.  After a
joint unitary diagonalization of the D_x the whole geometry is
described by eigenvalue tuples

    lam[x, i] = (U^* D_x U)[i, i]

and a single vector p of coupling constants with
xi_x[i] = conj(p_i) conj(lam[x, i]).  The corrected coframe

    psi_i = phi_i + p_i * sigma_i,     sigma_i = sum_x lam[x, i] phi_x

then closes the form

    omega~ = i sum psi_i ^ conj(psi_i)
           + i sum g[a, b] phi_a ^ conj(phi_b)     (middle block)
           + i sum phi_c ^ conj(phi_c)             (outer block)

term by term, giving an explicit invariant positive closed (1,1) form.
Everything here is verified numerically and reported as residuals; a
failed construction raises :class:`CertificationError` rather than
returning a silently wrong certificate.

``generate_family`` runs the dictionary backwards: from (lam, p) it
emits structure constants that realize exactly this model, which makes
it a strong round-trip oracle for the whole pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .algebra import CheckResult, StructureConstants, change_frame, realify
from .config import Config, DEFAULT_CONFIG
from .errors import (
    CertificationError,
    ClaimViolation,
    ParameterError,
    PreconditionError,
    StructureError,
)
from .forms import InvariantForm, hermitian_coefficients
from .metrics import hs_decide
from .solvable import AdmissibleDecomposition, extract_blocks


def _cfg(cfg: Config | None) -> Config:
    return DEFAULT_CONFIG if cfg is None else cfg


def _max_abs(a) -> float:
    a = np.asarray(a)
    return 0.0 if a.size == 0 else float(np.max(np.abs(a)))


# ------------------------------------------------------ joint diagonalization


def simultaneous_diagonalize(mats, *, cfg: Config | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Joint unitary diagonalization of commuting normal matrices.

    Returns ``(U, lam)`` with ``U`` unitary, ``lam[k, i]`` the i-th
    diagonal entry of ``U^* mats[k] U``, columns in a canonical order
    (lexicographic in the eigenvalue tuples, phases fixed so the
    largest-magnitude entry of each column is real positive).  Inputs
    that fail commutativity or normality raise
    :class:`PreconditionError`.

    The algorithm refines an eigenblock partition through the Hermitian
    and skew parts of every matrix; within a block all previously
    processed parts are scalar, so later rotations never break earlier
    diagonalizations.  No randomness is involved, which makes the
    output reproducible without any seed bookkeeping.
    """
    cfg = _cfg(cfg)
    mats = [np.asarray(M, dtype=complex) for M in mats]
    if not mats:
        return np.eye(0, dtype=complex), np.zeros((0, 0), dtype=complex)
    r = mats[0].shape[0]
    if r == 0:
        return np.eye(0, dtype=complex), np.zeros((len(mats), 0), dtype=complex)
    scale = max(1.0, max(_max_abs(M) for M in mats))
    for M in mats:
        if M.shape != (r, r):
            raise PreconditionError("matrices must share a square shape")
        if _max_abs(M @ M.conj().T - M.conj().T @ M) > cfg.tol_diag * scale**2:
            raise PreconditionError("matrix family contains a non-normal matrix")
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            if _max_abs(mats[a] @ mats[b] - mats[b] @ mats[a]) > cfg.tol_diag * scale**2:
                raise PreconditionError("matrix family does not commute")

    U = np.eye(r, dtype=complex)
    blocks: list[list[int]] = [list(range(r))]
    parts: list[np.ndarray] = []
    for M in mats:
        parts.append((M + M.conj().T) / 2.0)
        parts.append((M - M.conj().T) / 2j)
    for H in parts:
        W = U.conj().T @ H @ U
        refined: list[list[int]] = []
        for blk in blocks:
            if len(blk) == 1:
                refined.append(blk)
                continue
            sub = W[np.ix_(blk, blk)]
            sub = (sub + sub.conj().T) / 2.0
            w, v = np.linalg.eigh(sub)
            U[:, blk] = U[:, blk] @ v
            diam = float(w[-1] - w[0])
            thr = max(1e-6 * diam, 1e-10 * scale)
            start = 0
            for t in range(1, len(blk)):
                if w[t] - w[t - 1] > thr:
                    refined.append([blk[q] for q in range(start, t)])
                    start = t
            refined.append([blk[q] for q in range(start, len(blk))])
        blocks = refined

    lam = np.stack([np.diagonal(U.conj().T @ M @ U) for M in mats])
    keys = []
    for k in range(len(mats) - 1, -1, -1):
        keys.append(lam[k].imag)
        keys.append(lam[k].real)
    order = np.lexsort(keys)
    U = U[:, order]
    for i in range(r):
        j = int(np.argmax(np.abs(U[:, i])))
        ph = U[j, i]
        if abs(ph) > 0:
            U[:, i] = U[:, i] * (np.conj(ph) / abs(ph))
    lam = np.stack([np.diagonal(U.conj().T @ M @ U) for M in mats])
    off = 0.0
    for M in mats:
        d = U.conj().T @ M @ U
        off = max(off, _max_abs(d - np.diag(np.diagonal(d))))
    if off > cfg.tol_diag * scale:
        raise PreconditionError(f"joint diagonalization failed: off-diagonal residue {off:.3e}")
    return U, lam


# ------------------------------------------------------------------- claims


@dataclass(frozen=True)
class ClaimsRecord:
    """Everything the structural claims force out of a closed
    completion: the vanishing checks, the diagonalizing rotation, and
    the recovered (lam, xi, p) data.

    Residuals are scaled by max(1, magnitude^2) of the block data.
    """

    n: int
    r: int
    s: int
    Z_check: CheckResult            # claim 1a: Z_a = 0
    w_check: CheckResult            # claim 1b: w_{xy} = 0
    opposition: CheckResult         # claim 2: C_x + D_x = 0
    commutation: CheckResult        # claim 3: [D_x, S'^* S'] = [D_x^*, S'^* S'] = 0
    range_membership: CheckResult   # claim 4: v^x_y in im(D_x) and im(D_y)
    common_preimage: CheckResult    # claim 5: v^x_y = D_y xi_x
    U: np.ndarray = field(repr=False)
    rotation: np.ndarray = field(repr=False)
    sc_rotated: StructureConstants = field(repr=False)
    S_rotated: np.ndarray = field(repr=False)
    lam: np.ndarray = field(repr=False)   # (n - r, r)
    xi: np.ndarray = field(repr=False)    # (n - r, r)
    p: np.ndarray = field(repr=False)     # (r,)
    p_residual: float                     # tau_i parallel to conj(t_i)
    t_ratio: float                        # smallest relative singular value of [t_1..t_r]
    t_independent: bool

    def worst(self) -> float:
        checks = (self.Z_check, self.w_check, self.opposition,
                  self.commutation, self.range_membership, self.common_preimage)
        return max(c.residual for c in checks)


def _sigma_solve(diag: np.ndarray, b: np.ndarray, rel_tol: float = 1e-8) -> np.ndarray:
    """Apply the sigma-inverse of a diagonal matrix: entries above the
    relative threshold are inverted, the rest map to zero."""
    top = _max_abs(diag)
    if top == 0.0:
        return np.zeros_like(b)
    keep = np.abs(diag) > rel_tol * top
    out = np.zeros_like(b)
    out[keep] = b[keep] / diag[keep]
    return out


def claims_pipeline(
    dec: AdmissibleDecomposition,
    sc: StructureConstants,
    S,
    *,
    cfg: Config | None = None,
) -> ClaimsRecord:
    """Assert the vanishing claims, diagonalize, and recover (lam, xi, p).

    The input constants must live in the admissible frame of ``dec``
    and carry a closed-completion solution S.  Claims 1 and 2 are hard
    gates: a residual above tol_alg raises :class:`ClaimViolation`,
    since everything after them silently assumes the vanishings.  A
    zero eigenvalue tuple t_i raises :class:`StructureError`.  The
    remaining claims are measured and reported.
    """
    cfg = _cfg(cfg)
    if S is None:
        raise PreconditionError("the claims need a closed-completion solution S")
    S = np.asarray(S, dtype=complex)
    S = (S - S.T) / 2.0
    bd = extract_blocks(dec, sc, S)
    n, r, s = dec.n, dec.r, dec.s
    xs = list(bd.xs())
    scale = max(1.0, bd.magnitude() ** 2)

    rz = rw = ro = 0.0
    for x in xs:
        rz = max(rz, _max_abs(bd._zslice(x)))
        ro = max(ro, _max_abs(bd.Cmat(x) + bd.Dmat(x)))
        for y in xs:
            rw = max(rw, _max_abs(bd.w(x, y)))
    mk = lambda v: CheckResult(v / scale <= cfg.tol_alg, v / scale)
    Z_check, w_check, opposition = mk(rz), mk(rw), mk(ro)
    if not (Z_check.passed and w_check.passed and opposition.passed):
        worst = max(rz, rw, ro) / scale
        err = ClaimViolation(
            "the input does not satisfy the forced vanishings "
            f"(Z: {Z_check.residual:.3e}, w: {w_check.residual:.3e}, "
            f"C+D: {opposition.residual:.3e}); it cannot carry a closed "
            "completion in this frame"
        )
        err.residuals = {"Z": Z_check.residual, "w": w_check.residual,
                         "opposition": opposition.residual, "worst": worst}
        raise err

    U, _ = simultaneous_diagonalize([bd.Dmat(x) for x in xs], cfg=cfg)
    A = np.eye(n, dtype=complex)
    A[:r, :r] = U
    sc_rot = change_frame(sc, A, cfg=cfg)
    Ainv = np.linalg.inv(A)
    S_rot = Ainv.T @ S @ Ainv
    bdr = extract_blocks(dec, sc_rot, S_rot)

    lam = np.zeros((n - r, r), dtype=complex)
    for x in xs:
        lam[x - r - 1] = np.diagonal(bdr.Dmat(x))
    mag = _max_abs(lam)
    t_norms = np.linalg.norm(lam, axis=0)
    if r and np.any(t_norms <= 1e-12 * max(1.0, mag)):
        bad = int(np.argmin(t_norms)) + 1
        raise StructureError(
            f"eigenvalue tuple t_{bad} vanishes; the core direction e_{bad} never appears in a bracket"
        )
    if r == 0:
        t_ratio = 1.0
    elif lam.shape[0] < r:
        t_ratio = 0.0
    else:
        sv = np.linalg.svd(lam, compute_uv=False)
        t_ratio = float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0
    t_independent = t_ratio > 1e-8

    # claim 3 on the rotated blocks (unitary-invariant, cheaper to read here)
    Hs = S_rot[:r, :r].conj().T @ S_rot[:r, :r]
    r3 = 0.0
    for x in xs:
        Dx = bdr.Dmat(x)
        r3 = max(r3, _max_abs(Dx @ Hs - Hs @ Dx), _max_abs(Dx.conj().T @ Hs - Hs @ Dx.conj().T))

    xi = np.zeros((n - r, r), dtype=complex)
    for x in xs:
        xi[x - r - 1] = _sigma_solve(np.diagonal(bdr.Dmat(x)), bdr.v(x, x))

    r4 = r5 = 0.0
    for x in xs:
        dx = np.diagonal(bdr.Dmat(x))
        for y in xs:
            vxy = bdr.v(x, y)
            dy = np.diagonal(bdr.Dmat(y))
            dead = (np.abs(dx) <= 1e-8 * max(_max_abs(dx), 1e-300)) | (
                np.abs(dy) <= 1e-8 * max(_max_abs(dy), 1e-300)
            )
            if np.any(dead):
                r4 = max(r4, _max_abs(vxy[dead]))
            r5 = max(r5, _max_abs(vxy - dy * xi[x - r - 1]))

    p = np.zeros(r, dtype=complex)
    for i in range(r):
        denom = float(np.sum(np.abs(lam[:, i]) ** 2))
        p[i] = np.conj(np.sum(lam[:, i] * xi[:, i]) / denom)
    p_res = 0.0
    for i in range(r):
        p_res = max(
            p_res,
            _max_abs(xi[:, i] - np.conj(p[i]) * np.conj(lam[:, i])) / max(1.0, float(t_norms[i])),
        )

    return ClaimsRecord(
        n=n, r=r, s=s,
        Z_check=Z_check, w_check=w_check, opposition=opposition,
        commutation=mk(r3), range_membership=mk(r4), common_preimage=mk(r5),
        U=U, rotation=A, sc_rotated=sc_rot, S_rotated=S_rot,
        lam=lam, xi=xi, p=p,
        p_residual=p_res, t_ratio=t_ratio, t_independent=t_independent,
    )


# -------------------------------------------------------------- certificate


@dataclass
class KahlerCertificate:
    """A verified invariant closed positive (1,1) form, in the rotated
    admissible frame ``phi~ = A^T phi`` recorded in ``rotation``.

    ``psi_coeffs[k]`` holds the coefficients of psi_{k+1} in the
    rotated coframe; ``residuals`` maps check names to sup-norm values
    (``t_i_independence`` stores a conditioning ratio instead: the
    smallest relative singular value of the eigenvalue tuples, large
    when they are safely independent).
    """

    n: int
    r: int
    s: int
    U: np.ndarray
    rotation: np.ndarray
    lam: np.ndarray                 # (n - r, r): lam[x - r - 1, i - 1]
    p: np.ndarray                   # (r,)
    xi: np.ndarray                  # (n - r, r)
    psi_coeffs: np.ndarray          # (n, n)
    psi: list[InvariantForm]
    omega_tilde: InvariantForm
    sc_rotated: StructureConstants
    residuals: dict[str, float]
    termwise_residuals: tuple[float, ...]
    positive: bool
    min_eig: float
    claims: ClaimsRecord

    def summary(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "s": self.s,
            "positive": self.positive,
            "min_eig": self.min_eig,
            "t_independent": self.claims.t_independent,
            **{k: v for k, v in self.residuals.items()},
        }


def kahlerize(
    dec: AdmissibleDecomposition,
    sc: StructureConstants,
    S=None,
    *,
    cfg: Config | None = None,
    strict: bool = True,
) -> KahlerCertificate:
    """Construct and verify a closed positive completion of the metric.

    ``sc`` must be expressed in the admissible frame of ``dec``; S is a
    closed-completion solution for the block metric (computed via
    :func:`hs_decide` when omitted, with infeasibility raised as
    :class:`PreconditionError`).  The claims pipeline runs first and
    its gates apply.

    With ``strict=True`` a certificate whose closure residual exceeds
    ``cfg.tol_cert`` (scaled by the constants' magnitude) or that fails
    positivity raises :class:`CertificationError` naming the offending
    term; pass ``strict=False`` to inspect the failed certificate.
    """
    cfg = _cfg(cfg)
    n, r, s = dec.n, dec.r, dec.s
    if sc.n != n:
        raise PreconditionError(f"constants have n={sc.n} but the splitting has n={n}")
    if S is None:
        sol = hs_decide(sc, dec.metric, cfg=cfg)
        if not sol.feasible:
            raise PreconditionError(
                f"no closed completion exists at this metric (normalized residual {sol.normalized:.3e})"
            )
        S = sol.S

    rec = claims_pipeline(dec, sc, S, cfg=cfg)
    sc_rot = rec.sc_rotated
    lam, p = rec.lam, rec.p
    xs = list(range(r + 1, n + 1))
    g_mid = dec.g_mid  # untouched by the rotation, which lives in the first block

    psi_coeffs = np.eye(n, dtype=complex)
    for i in range(r):
        psi_coeffs[i, r:] = p[i] * lam[:, i]
    psi: list[InvariantForm] = []
    for k in range(n):
        f = InvariantForm.zero(n)
        for j in range(n):
            if psi_coeffs[k, j] != 0:
                f = f + psi_coeffs[k, j] * InvariantForm.phi(n, j + 1)
        psi.append(f)

    omega = InvariantForm.zero(n)
    termwise = []
    term_names = []
    for i in range(r):
        term = 1j * psi[i].wedge(psi[i].conj())
        omega = omega + term
        termwise.append(term.d(sc_rot).sup())
        term_names.append(f"psi_{i + 1} ^ conj(psi_{i + 1})")
    rest = InvariantForm.zero(n)
    for a in range(r + 1, s + 1):
        for b in range(r + 1, s + 1):
            if g_mid[a - r - 1, b - r - 1] != 0:
                rest = rest + 1j * g_mid[a - r - 1, b - r - 1] * InvariantForm.phi(n, a).wedge(
                    InvariantForm.phibar(n, b)
                )
    for c in range(s + 1, n + 1):
        rest = rest + 1j * InvariantForm.phi(n, c).wedge(InvariantForm.phibar(n, c))
    if n > r:
        omega = omega + rest
        termwise.append(rest.d(sc_rot).sup())
        term_names.append("the metric block part")

    d_res = omega.d(sc_rot).sup()
    reality = 0.0
    if s > r:
        reality = max(_max_abs(lam[: s - r].imag), _max_abs(p.imag))
    residuals = {
        "d_omega_tilde": d_res,
        "claims_1_5": rec.worst(),
        "t_i_independence": rec.t_ratio,
        "p_proportionality": rec.p_residual,
        "reality": reality,
    }

    h = hermitian_coefficients(omega)
    eigs = np.linalg.eigvalsh(h)
    min_eig = float(eigs[0]) if eigs.size else 1.0
    positive = bool(min_eig > 0.0)

    cert = KahlerCertificate(
        n=n, r=r, s=s,
        U=rec.U, rotation=rec.rotation,
        lam=lam, p=p, xi=rec.xi,
        psi_coeffs=psi_coeffs, psi=psi,
        omega_tilde=omega, sc_rotated=sc_rot,
        residuals=residuals,
        termwise_residuals=tuple(termwise),
        positive=positive, min_eig=min_eig,
        claims=rec,
    )
    if strict:
        gate = cfg.tol_cert * max(1.0, sc_rot.magnitude())
        if d_res > gate:
            msg = f"constructed form is not closed: residual {d_res:.3e} exceeds {gate:.1e}"
            if termwise:
                msg += f" (worst term: {term_names[int(np.argmax(termwise))]})"
            raise CertificationError(msg)
        if not positive:
            raise CertificationError(
                f"constructed form is not positive: min eigenvalue {min_eig:.3e}"
            )
    return cert


# ------------------------------------------------------------------- family


class FamilyInstance(NamedTuple):
    """An explicit model instance: the real algebra with its Hermitian
    data, the admissible-frame structure constants, the closed
    completion, and the generating parameters."""

    alg: object
    J: np.ndarray
    G: np.ndarray
    frame: object
    sc: StructureConstants
    S: np.ndarray
    g: np.ndarray
    r: int
    s: int
    n: int
    lam: np.ndarray
    p: np.ndarray


def _draw_family_data(r: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Random (n - r) x r eigenvalue data with safely independent
    columns; standard complex Gaussian entries, redrawn in the
    (measure-zero, numerically still possible) ill-conditioned case."""
    for _ in range(64):
        lam = (rng.standard_normal((n - r, r)) + 1j * rng.standard_normal((n - r, r))) / np.sqrt(2.0)
        sv = np.linalg.svd(lam, compute_uv=False)
        if sv.size == 0 or sv[-1] > 1e-3 * sv[0]:
            return lam
    raise ParameterError("could not draw well-conditioned eigenvalue data")


def generate_family(
    r: int,
    n: int,
    lam=None,
    p=None,
    *,
    seed: int | None = None,
    cfg: Config | None = None,
) -> FamilyInstance:
    """The model family realizing dphi_i = phi_i (sigma_i - conj(sigma_i))
    - p_i sigma_i conj(sigma_i) and dphi_x = 0.

    ``lam`` has shape (n - r, r) holding lam[x, i] for x = r+1..n, and
    ``p`` has shape (r,); omitted data is drawn from a seeded generator
    (``seed`` defaults to the config seed).  The nonzero constants are

        C^i_{ix} = -lam[x, i]
        D^i_{ix} =  lam[x, i]
        D^x_{iy} =  conj(p_i) lam[y, i] conj(lam[x, i])

    and the closed completion is S_{ix} = (i/2) conj(p_i) lam[x, i],
    with the identity frame metric (so s = r: no middle block).  Every
    output satisfies the first-Bianchi identities and is unimodular; a
    direct sum of instances is again an instance (block-diagonal lam,
    concatenated p), which makes this generator a convenient oracle.

    The columns of lam, with the matching entries of p, are put into
    the canonical order of :func:`simultaneous_diagonalize` before the
    constants are built.  Reordering columns only relabels the core
    directions, so the instance is unchanged up to isomorphism, and a
    later certificate recovers lam and p verbatim instead of up to a
    column permutation.

    Bad parameters raise :class:`ParameterError`: r outside 1..n-1,
    shape mismatches, a zero eigenvalue tuple t_i = lam[:, i], or
    linearly dependent tuples (impossible to avoid when n - r < r).
    """
    cfg = _cfg(cfg)
    if not 1 <= r < n:
        raise ParameterError(f"need 1 <= r < n, got r={r}, n={n}")
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    if lam is None:
        if n - r < r:
            raise ParameterError(
                f"cannot draw {r} independent eigenvalue tuples of length {n - r}"
            )
        lam = _draw_family_data(r, n, rng)
    lam = np.asarray(lam, dtype=complex)
    if lam.shape != (n - r, r):
        raise ParameterError(f"lam must have shape {(n - r, r)}, got {lam.shape}")
    if p is None:
        p = (rng.standard_normal(r) + 1j * rng.standard_normal(r)) / np.sqrt(2.0)
    p = np.asarray(p, dtype=complex)
    if p.shape != (r,):
        raise ParameterError(f"p must have shape ({r},), got {p.shape}")
    if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(p))):
        raise ParameterError("family data must be finite")
    norms = np.linalg.norm(lam, axis=0)
    if np.any(norms <= 1e-12 * max(1.0, _max_abs(lam))):
        bad = int(np.argmin(norms)) + 1
        raise ParameterError(f"eigenvalue tuple t_{bad} is zero")
    sv = np.linalg.svd(lam, compute_uv=False)
    if lam.shape[0] < r or sv[-1] <= 1e-8 * sv[0]:
        raise ParameterError("eigenvalue tuples are linearly dependent")
    keys = []
    for a in range(lam.shape[0] - 1, -1, -1):
        keys.append(lam[a].imag)
        keys.append(lam[a].real)
    order = np.lexsort(keys)
    lam = lam[:, order]
    p = p[order]

    C = np.zeros((n, n, n), dtype=complex)
    D = np.zeros((n, n, n), dtype=complex)
    S = np.zeros((n, n), dtype=complex)
    for i in range(r):
        for x0 in range(n - r):
            x = r + x0
            C[i, i, x] = -lam[x0, i]
            C[i, x, i] = lam[x0, i]
            D[i, i, x] = lam[x0, i]
            S[i, x] = 0.5j * np.conj(p[i]) * lam[x0, i]
            S[x, i] = -S[i, x]
            for y0 in range(n - r):
                y = r + y0
                D[x, i, y] = np.conj(p[i]) * lam[y0, i] * np.conj(lam[x0, i])
    sc = StructureConstants(C, D, cfg=cfg)
    g = np.eye(n, dtype=complex)
    alg, J, G, frame = realify(C, D, g, cfg=cfg)
    return FamilyInstance(
        alg=alg, J=J, G=G, frame=frame,
        sc=sc, S=S, g=g, r=r, s=r, n=n, lam=lam, p=p,
    )
