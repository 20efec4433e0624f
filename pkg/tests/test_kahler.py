"""Joint diagonalization, claims extraction, and the certificate step."""

import numpy as np
import pytest

from conftest import FAMILY_GRID, abelian_sc, aff_sc, kt_real, random_unitary

from hskahler.algebra import (
    RealLieAlgebra,
    StructureConstants,
    realify,
    unimodularity_check,
)
from hskahler.errors import (
    CertificationError,
    ClaimViolation,
    ParameterError,
    PreconditionError,
    StructureError,
)
from hskahler.forms import InvariantForm
from hskahler.kahler import (
    claims_pipeline,
    generate_family,
    kahlerize,
    simultaneous_diagonalize,
)
from hskahler.solvable import admissible_from_frame, build_admissible_frame


# ------------------------------------------------- joint diagonalization


def test_diagonal_input_comes_back_sorted():
    U, lam = simultaneous_diagonalize([np.diag([2.0, 1.0])])
    assert lam == pytest.approx(np.array([[1.0, 2.0]]))
    assert np.abs(U) == pytest.approx(np.array([[0.0, 1.0], [1.0, 0.0]]))


def test_joint_recovery_of_commuting_family(rng):
    lam_true = np.array([[1.0, 2.0, 3.0], [3.0 + 1.0j, 4.0, 5.0 - 2.0j]])
    Q = random_unitary(rng, 3)
    mats = [Q @ np.diag(row) @ Q.conj().T for row in lam_true]
    U, lam = simultaneous_diagonalize(mats)
    assert lam == pytest.approx(lam_true, abs=1e-10)
    assert U.conj().T @ U == pytest.approx(np.eye(3), abs=1e-12)
    for M, row in zip(mats, lam):
        assert U.conj().T @ M @ U == pytest.approx(np.diag(row), abs=1e-10)


def test_degenerate_block_needs_the_second_matrix(rng):
    # the first matrix alone cannot split the (1, 1) eigenspace; the
    # reconstructed degenerate values carry 1e-16 noise, so the order
    # within the tied pair is checked up to permutation
    from conftest import align_columns

    lam_true = np.array([[1.0, 1.0, 2.0], [4.0, 3.0, 5.0]])
    Q = random_unitary(rng, 3)
    mats = [Q @ np.diag(row) @ Q.conj().T for row in lam_true]
    U, lam = simultaneous_diagonalize(mats)
    assert align_columns(lam, lam_true) <= 1e-10
    for M, row in zip(mats, lam):
        assert U.conj().T @ M @ U == pytest.approx(np.diag(row), abs=1e-10)


def test_exact_ties_break_on_the_later_matrix():
    # exactly diagonal input keeps the sort keys exact, so the
    # canonical order itself is observable
    _, lam = simultaneous_diagonalize([np.diag([1.0, 1.0, 2.0]), np.diag([4.0, 3.0, 5.0])])
    assert np.array_equal(lam, np.array([[1.0, 1.0, 2.0], [3.0, 4.0, 5.0]], dtype=complex))


def test_column_phases_are_canonical(rng):
    Q = random_unitary(rng, 4)
    M = Q @ np.diag([1.0, 2.0, 3.0, 4.0]) @ Q.conj().T
    U, _ = simultaneous_diagonalize([M])
    for k in range(4):
        j = int(np.argmax(np.abs(U[:, k])))
        assert U[j, k].imag == pytest.approx(0.0, abs=1e-14)
        assert U[j, k].real > 0


def test_diagonalization_is_bit_deterministic(rng):
    Q = random_unitary(rng, 3)
    mats = [Q @ np.diag([1.0, 1.0, 2.0]) @ Q.conj().T, Q @ np.diag([3.0, 4.0, 4.0]) @ Q.conj().T]
    U1, lam1 = simultaneous_diagonalize(mats)
    U2, lam2 = simultaneous_diagonalize(mats)
    assert np.array_equal(U1, U2)
    assert np.array_equal(lam1, lam2)


def test_non_normal_matrix_is_rejected():
    with pytest.raises(PreconditionError):
        simultaneous_diagonalize([np.array([[0.0, 1.0], [0.0, 0.0]])])


def test_non_commuting_family_is_rejected():
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    sz = np.diag([1.0, -1.0])
    with pytest.raises(PreconditionError):
        simultaneous_diagonalize([sx, sz])


def test_empty_and_zero_size_inputs():
    U, lam = simultaneous_diagonalize([])
    assert U.shape == (0, 0) and lam.shape == (0, 0)
    U, lam = simultaneous_diagonalize([np.zeros((0, 0))])
    assert U.shape == (0, 0) and lam.shape == (1, 0)


# ------------------------------------------------------------------ claims


def _family_dec(fam):
    return admissible_from_frame(fam.alg, fam.J, fam.G, fam.frame)


def test_claims_recover_family_data_verbatim():
    fam = generate_family(2, 5, seed=21)
    rec = claims_pipeline(_family_dec(fam), fam.sc, fam.S)
    assert rec.worst() <= 1e-12
    assert rec.lam == pytest.approx(fam.lam, abs=1e-12)
    assert rec.p == pytest.approx(fam.p, abs=1e-12)
    assert rec.t_independent
    assert rec.p_residual <= 1e-12


def test_claims_gate_on_a_nonvanishing_z_block():
    fam = generate_family(1, 3, seed=22)
    D = fam.sc.D.copy()
    D[2, 0, 0] = 0.1  # plant a Z entry that a closed completion forbids
    broken = StructureConstants(fam.sc.C, D, validate=False)
    with pytest.raises(ClaimViolation) as err:
        claims_pipeline(_family_dec(fam), broken, fam.S)
    assert err.value.residuals["Z"] > 0.0
    assert err.value.residuals["worst"] >= err.value.residuals["Z"]


def test_claims_gate_on_an_opposition_failure():
    fam = generate_family(1, 3, seed=23)
    C = fam.sc.C.copy()
    C[0, 0, 1], C[0, 1, 0] = C[0, 0, 1] + 0.2, C[0, 1, 0] - 0.2
    broken = StructureConstants(C, fam.sc.D, validate=False)
    with pytest.raises(ClaimViolation) as err:
        claims_pipeline(_family_dec(fam), broken, fam.S)
    assert err.value.residuals["opposition"] > 0.0


def test_claims_need_a_solution():
    fam = generate_family(1, 3, seed=24)
    with pytest.raises(PreconditionError):
        claims_pipeline(_family_dec(fam), fam.sc, None)


def test_vanishing_eigenvalue_tuple_is_structural():
    # abelian constants in a splitting that insists on a core direction:
    # the core never appears in any bracket, so t_1 = 0
    sc = aff_sc()
    alg, J, G, _ = realify(sc.C, sc.D)
    dec = build_admissible_frame(alg, J, G)
    assert dec.r == 1
    with pytest.raises(StructureError):
        claims_pipeline(dec, abelian_sc(2), np.zeros((2, 2)))


# ----------------------------------------------------------- family oracle


def _sigma(fam, i: int) -> InvariantForm:
    out = InvariantForm.zero(fam.n)
    for x0 in range(fam.n - fam.r):
        out = out + fam.lam[x0, i] * InvariantForm.phi(fam.n, fam.r + x0 + 1)
    return out


@pytest.mark.parametrize("r,n", [(1, 2), (1, 4), (2, 4), (2, 6), (3, 6)])
def test_family_satisfies_the_model_structure_equation(r, n):
    fam = generate_family(r, n, seed=100 + 10 * r + n)
    for i in range(r):
        phi_i = InvariantForm.phi(n, i + 1)
        sig = _sigma(fam, i)
        want = phi_i.wedge(sig - sig.conj()) - fam.p[i] * sig.wedge(sig.conj())
        got = phi_i.d(fam.sc)
        assert (got - want).sup() <= 1e-12
    for x in range(r + 1, n + 1):
        assert InvariantForm.phi(n, x).d(fam.sc).sup() == 0.0


@pytest.mark.parametrize("r,n", [(1, 3), (2, 5), (3, 6)])
def test_family_fundamental_form_derivative_matches_the_model(r, n):
    fam = generate_family(r, n, seed=200 + 10 * r + n)
    omega = InvariantForm.zero(n)
    for k in range(1, n + 1):
        omega = omega + 1j * InvariantForm.phi(n, k).wedge(InvariantForm.phibar(n, k))
    want = InvariantForm.zero(n)
    for i in range(r):
        sig = _sigma(fam, i)
        line = np.conj(fam.p[i]) * InvariantForm.phi(n, i + 1) + fam.p[i] * InvariantForm.phibar(n, i + 1)
        want = want + (-1j) * line.wedge(sig.wedge(sig.conj()))
    assert (omega.d(fam.sc) - want).sup() <= 1e-12


# ------------------------------------------------------------- certificate


@pytest.mark.parametrize("r,n", FAMILY_GRID)
def test_certificate_closes_and_recovers_parameters(r, n):
    fam = generate_family(r, n, seed=300 + 10 * r + n)
    cert = kahlerize(_family_dec(fam), fam.sc, fam.S)
    assert cert.residuals["d_omega_tilde"] <= 1e-10
    assert max(cert.termwise_residuals) <= 1e-10
    assert cert.positive and cert.min_eig > 0.0
    assert cert.lam == pytest.approx(fam.lam, abs=1e-9)
    assert cert.p == pytest.approx(fam.p, abs=1e-9)
    # psi_i = phi_i + p_i sigma_i, identity on the residual block
    want = np.eye(n, dtype=complex)
    for i in range(r):
        want[i, r:] = fam.p[i] * fam.lam[:, i]
    assert cert.psi_coeffs == pytest.approx(want, abs=1e-12)


def test_certificate_without_explicit_solution_uses_the_decision():
    fam = generate_family(1, 3, seed=31)
    cert = kahlerize(_family_dec(fam), fam.sc)
    assert cert.residuals["d_omega_tilde"] <= 1e-10
    assert cert.p == pytest.approx(fam.p, abs=1e-9)


def test_uncoupled_family_is_already_closed():
    lam = np.array([[1.0 + 0.5j], [0.3 - 0.2j]])
    fam = generate_family(1, 3, lam, np.zeros(1))
    cert = kahlerize(_family_dec(fam), fam.sc, fam.S)
    assert np.array_equal(cert.psi_coeffs, np.eye(3, dtype=complex))
    assert cert.residuals["d_omega_tilde"] <= 1e-14
    omega = InvariantForm.zero(3)
    for k in range(1, 4):
        omega = omega + 1j * InvariantForm.phi(3, k).wedge(InvariantForm.phibar(3, k))
    assert omega.d(fam.sc).sup() <= 1e-14


def test_rescaled_coupling_is_just_another_instance():
    # the v vectors are the only place p enters the constants, so
    # scaling them all is the valid instance with p' = 1.3 p
    fam = generate_family(1, 3, seed=32)
    D = fam.sc.D.copy()
    D[1:, :1, 1:] *= 1.3
    scaled = StructureConstants(D=D, C=fam.sc.C)
    cert = kahlerize(_family_dec(fam), scaled, fam.S)
    assert cert.residuals["d_omega_tilde"] <= 1e-10
    assert cert.p == pytest.approx(1.3 * fam.p, abs=1e-9)


def test_tampered_coupling_fails_certification():
    fam = generate_family(1, 3, seed=32)
    D = fam.sc.D.copy()
    D[1, 0, 1] *= 1.3  # one v entry off the rank-one pattern
    broken = StructureConstants(fam.sc.C, D, validate=False)
    with pytest.raises(CertificationError):
        kahlerize(_family_dec(fam), broken, fam.S)
    cert = kahlerize(_family_dec(fam), broken, fam.S, strict=False)
    assert cert.residuals["d_omega_tilde"] > 1e-2
    assert cert.claims.common_preimage.residual > 1e-2


def test_infeasible_input_is_a_precondition_failure():
    f, J, G = kt_real()
    alg = RealLieAlgebra(f)
    dec = build_admissible_frame(alg, J, G)
    from hskahler.algebra import complexify_and_extract

    sc = complexify_and_extract(alg, J, dec.frame)
    with pytest.raises(PreconditionError):
        kahlerize(dec, sc)


def test_certificate_dimension_guard():
    fam = generate_family(1, 3, seed=33)
    with pytest.raises(PreconditionError):
        kahlerize(_family_dec(fam), abelian_sc(2))


# ------------------------------------------------------------ family input


def test_family_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        generate_family(0, 3)
    with pytest.raises(ParameterError):
        generate_family(3, 3)
    with pytest.raises(ParameterError):
        generate_family(2, 3)  # cannot draw independent tuples of length 1
    with pytest.raises(ParameterError):
        generate_family(1, 3, np.ones((1, 1)))  # lam shape mismatch
    with pytest.raises(ParameterError):
        generate_family(1, 3, np.ones((2, 1)), np.ones(2))  # p shape mismatch
    with pytest.raises(ParameterError):
        generate_family(2, 4, np.array([[1.0, 0.0], [2.0, 0.0]]))  # zero tuple
    with pytest.raises(ParameterError):
        generate_family(2, 4, np.array([[1.0, 2.0], [2.0, 4.0]]))  # dependent
    with pytest.raises(ParameterError):
        generate_family(1, 2, np.array([[np.nan]]))


def test_family_column_order_is_a_gauge_choice():
    rng = np.random.default_rng(7)
    lam = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    p = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    a = generate_family(2, 5, lam, p)
    b = generate_family(2, 5, lam[:, ::-1], p[::-1])
    assert np.array_equal(a.sc.C, b.sc.C)
    assert np.array_equal(a.sc.D, b.sc.D)
    assert np.array_equal(a.S, b.S)
    assert np.array_equal(a.lam, b.lam) and np.array_equal(a.p, b.p)


def test_family_is_seeded_and_unimodular():
    a = generate_family(2, 5, seed=9)
    b = generate_family(2, 5, seed=9)
    assert np.array_equal(a.lam, b.lam) and np.array_equal(a.p, b.p)
    assert unimodularity_check(a.sc).passed
    assert a.sc.bianchi_residual() <= 1e-12
    assert a.s == a.r and a.g == pytest.approx(np.eye(5))
