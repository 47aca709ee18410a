import json

import numpy as np
import pytest

from instances import dephasing_code_instance, make_instance, random_commuting_channel, randomized_suite
from privmap.channels import (
    Channel,
    apply,
    compose,
    depolarizing,
    full_dephasing,
    identity_channel,
    phase_damping,
    random_channel,
    tensor,
)
from privmap.codes import SubsystemCode, n_qubit_private_code, subspace_code
from privmap.linalg import (
    DimensionError,
    dagger,
    gell_mann_basis,
    haar_isometry,
    haar_unitary,
    random_density,
    trace_norm,
)
from privmap.privacy import (
    DefectReport,
    NotPrivate,
    PrivacyCertificate,
    certify_theorem2,
    heisenberg_private_check,
    is_operator_private,
    is_private,
    privacy_defect,
    search_private_subspace,
)

ONE = np.ones((1, 1))


def full_space(d):
    return subspace_code(np.eye(d))


def rotated_defect(phi, code, sigma_a, rng):
    """Defect over a randomly rotated traceless Hermitian basis (independent loop)."""
    u = haar_unitary(code.dim_b, rng)
    total = 0.0
    for g in gell_mann_basis(code.dim_b):
        rho = code.embedding @ np.kron(sigma_a, u @ g @ dagger(u)) @ dagger(code.embedding)
        total += trace_norm(sum(v @ rho @ dagger(v) for v in phi.kraus))
    return total


class TestDefect:
    def test_dephasing_code(self, dephasing2, dephasing_code):
        code, _, sigma_a = dephasing_code
        assert privacy_defect(dephasing2, code, sigma_a).defect <= 1e-9

    def test_depolarizing_subspace(self, rng):
        code = subspace_code(haar_isometry(4, 2, rng))
        assert privacy_defect(depolarizing(4), code, ONE).defect <= 1e-12

    def test_single_qubit_dephasing(self):
        rep = privacy_defect(phase_damping(1, 1), full_space(2), ONE)
        # X, Y annihilated; Z preserved with trace norm 2
        np.testing.assert_allclose(rep.contributions, [0, 0, 2], atol=1e-12)
        assert rep.defect == pytest.approx(2)
        np.testing.assert_array_equal(rep.worst_input, np.diag([1, -1]))

    def test_rho_0(self, dephasing2, dephasing_code):
        code, _, sigma_a = dephasing_code
        np.testing.assert_allclose(privacy_defect(dephasing2, code, sigma_a).rho_0, np.eye(4) / 4, atol=1e-15)

    def test_trivial_b(self):
        code = subspace_code([np.array([1, 0])])
        assert privacy_defect(identity_channel(2), code, ONE).defect == 0

    def test_dimension_checks(self, dephasing_code):
        with pytest.raises(DimensionError):
            privacy_defect(depolarizing(3), dephasing_code[0], dephasing_code[2])
        with pytest.raises(DimensionError):
            privacy_defect(full_dephasing(2), dephasing_code[0], np.eye(3) / 3)

    def test_basis_independent_verdict(self, rng):
        for inst in randomized_suite(11, 12, dim_a=2):
            ours = privacy_defect(inst.channel, inst.code, inst.sigma_a).defect
            other = rotated_defect(inst.channel, inst.code, inst.sigma_a, rng)
            assert (ours <= 1e-9) == (other <= 1e-9)
            if ours > 1e-9:
                # both are norms of the same linear map on a (d^2-1)-dim space
                assert other / ours < 10 * inst.code.dim_b and ours / other < 10 * inst.code.dim_b

    def test_report_json(self, dephasing2, dephasing_code):
        rep = privacy_defect(dephasing2, dephasing_code[0], np.diag([1.0, 0]))
        back = DefectReport.from_json(json.loads(json.dumps(rep.to_json())))
        assert back.defect == rep.defect
        np.testing.assert_array_equal(back.rho_0, rep.rho_0)


class TestIsPrivate:
    def test_dephasing_code(self, dephasing2, dephasing_code):
        code, _, sigma_a = dephasing_code
        ok, rho_0 = is_private(dephasing2, code, sigma_a)
        assert ok
        np.testing.assert_allclose(rho_0, np.eye(4) / 4, atol=1e-15)

    def test_dephasing_code_other_sigma_a(self, dephasing2, dephasing_code):
        assert not is_private(dephasing2, dephasing_code[0], np.diag([1.0, 0]))[0]

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_identity(self, d, rng):
        code = subspace_code(haar_isometry(d, 2, rng))
        assert not is_private(identity_channel(d), code, ONE)[0]

    def test_three_qubits(self):
        code, sigma_a = n_qubit_private_code(3)
        ok, rho_0 = is_private(full_dephasing(3), code, sigma_a)
        assert ok
        np.testing.assert_allclose(rho_0, np.eye(8) / 8, atol=1e-12)

    def test_suite_matches_construction(self):
        for dim_a in (1, 2):
            for inst in randomized_suite(5, 16, dim_a):
                assert is_private(inst.channel, inst.code, inst.sigma_a)[0] == inst.built_private

    def test_private_for_any_sigma_a(self, rng):
        inst = make_instance(rng, dim_a=2, dim_b=2, dim_c=1)
        for _ in range(5):
            assert is_private(inst.channel, inst.code, random_density(2, rng))[0]


class TestOperatorPrivacy:
    def test_dephasing_code(self, dephasing2, dephasing_code):
        res = is_operator_private(dephasing2, dephasing_code[0])
        assert not res and not res.per_state and not res.state_independent

    def test_depolarizing(self, dephasing_code):
        res = is_operator_private(depolarizing(4), dephasing_code[0])
        assert res.per_state and res.state_independent

    def test_b_factor_erased(self, rng):
        phi = tensor(random_channel(2, rng, num_kraus=3), depolarizing(2))
        code = SubsystemCode(2, 2, np.eye(4))
        res = is_operator_private(phi, code)
        assert res.per_state
        # output still depends on sigma_A unless phi is itself constant
        assert not res.state_independent
        assert res.a_dependence > 1e-3

    def test_state_independent_when_a_erased_too(self):
        phi = depolarizing(4)
        code = SubsystemCode(2, 2, np.eye(4))
        assert is_operator_private(phi, code).state_independent


class TestCertificate:
    def test_dephasing_unitary(self, dephasing2, dephasing_code):
        code, _, sigma_a = dephasing_code
        cert = certify_theorem2(dephasing2, code, sigma_a)
        assert cert.lam.shape == (8, 8)
        assert cert.unitary_flag
        assert cert.isometry_residual <= 1e-9 and cert.unitarity_residual <= 1e-9
        assert cert.reconstruction_residual <= 1e-8
        np.testing.assert_allclose(cert.p, [0.5, 0.5])
        np.testing.assert_allclose(cert.q, [0.25] * 4)

    def test_reconstruction_explicit(self, dephasing2, dephasing_code):
        # sqrt(p_k) V_j |psi_A,k> = sum_{i,l} lam[(j,k),(i,l)] sqrt(q_l) |phi_l><i|
        code, _, sigma_a = dephasing_code
        cert = certify_theorem2(dephasing2, code, sigma_a)
        K, L = len(cert.p), len(cert.q)
        for j, v in enumerate(dephasing2.kraus):
            for k in range(K):
                lhs = np.sqrt(cert.p[k]) * v @ code.embedding @ np.kron(cert.psi_a[:, [k]], np.eye(2))
                rhs = sum(
                    cert.lam[j * K + k, i * L + l] * np.sqrt(cert.q[l]) * np.outer(cert.phi[:, l], np.eye(2)[i])
                    for i in range(2)
                    for l in range(L)
                )
                np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_depolarizing_full_space(self, n):
        cert = certify_theorem2(depolarizing(n), full_space(n), ONE)
        assert cert.lam.shape == (n * n, n * n)
        assert cert.unitary_flag
        # sqrt(N) V_j = sum lam[j, (i1 i2)] |i1><i2| with V_j = |a><b|/sqrt(N) -> lam = permutation
        np.testing.assert_allclose(np.abs(cert.lam) ** 2 @ np.ones(n * n), np.ones(n * n), atol=1e-12)

    def test_single_qubit_dephasing(self):
        with pytest.raises(NotPrivate):
            certify_theorem2(phase_damping(1, 1), full_space(2), ONE)

    def test_non_private_sigma(self, dephasing2, dephasing_code):
        with pytest.raises(NotPrivate):
            certify_theorem2(dephasing2, dephasing_code[0], np.diag([0.8, 0.2]))

    def test_pure_sigma_drops_zero_weight(self, rng):
        inst = make_instance(rng, dim_a=2, dim_b=2, dim_c=1)
        cert = certify_theorem2(inst.channel, inst.code, np.diag([1.0, 0]))
        assert len(cert.p) == 1
        assert cert.lam.shape[0] == inst.channel.num_kraus
        assert cert.isometry_residual <= 1e-9

    def test_suite(self):
        for inst in randomized_suite(3, 10, dim_a=2) + [dephasing_code_instance(np.random.default_rng(1), p) for p in (True, False)]:
            ok = is_private(inst.channel, inst.code, inst.sigma_a)[0]
            try:
                cert = certify_theorem2(inst.channel, inst.code, inst.sigma_a)
            except NotPrivate:
                assert not ok
            else:
                assert ok
                assert cert.reconstruction_residual <= 1e-8 and cert.isometry_residual <= 1e-8

    def test_json(self, dephasing2, dephasing_code):
        cert = certify_theorem2(dephasing2, dephasing_code[0], dephasing_code[2])
        back = PrivacyCertificate.from_json(json.loads(json.dumps(cert.to_json())))
        np.testing.assert_array_equal(back.lam, cert.lam)
        assert back.unitary_flag == cert.unitary_flag


class TestHeisenberg:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_depolarizing(self, n):
        assert heisenberg_private_check(depolarizing(n), full_space(n), np.eye(n) / n)

    def test_wrong_rho_0(self):
        assert not heisenberg_private_check(depolarizing(2), full_space(2), np.diag([1.0, 0]))

    def test_dephasing_random_subspaces(self, dephasing2, rng):
        for _ in range(20):
            code = subspace_code(haar_isometry(4, 2, rng))
            rho_0 = apply(dephasing2, code.projector / 2)
            assert not heisenberg_private_check(dephasing2, code, rho_0)

    def test_covariance(self, rng):
        for inst in randomized_suite(8, 6, dim_a=1):
            u = haar_unitary(inst.code.dim_s, rng)
            phi = compose(inst.channel, Channel([dagger(u)]))
            code = SubsystemCode(1, inst.code.dim_b, u @ inst.code.embedding)
            ok, rho_0 = is_private(phi, code, ONE)
            assert heisenberg_private_check(phi, code, rho_0) == ok == inst.built_private

    def test_requires_subspace(self, dephasing2, dephasing_code):
        with pytest.raises(ValueError):
            heisenberg_private_check(dephasing2, dephasing_code[0], np.eye(4) / 4)


class TestSearch:
    def test_depolarizing_first_trial(self):
        code, rep = search_private_subspace(depolarizing(4), 2, trials=1, seed=0, polish_iters=0)
        assert rep.defect <= 1e-12 and rep.trial == 0
        assert code.dim_b == 2 and code.is_subspace

    def test_dephasing_floor(self, dephasing2):
        _, rep = search_private_subspace(dephasing2, 2, trials=500, seed=3)
        assert rep.defect > 1e-3

    def test_commuting(self, rng):
        _, rep = search_private_subspace(random_commuting_channel(2, rng), 2, trials=300, seed=1)
        assert rep.defect > 1e-3

    def test_deterministic(self, dephasing2):
        a = search_private_subspace(dephasing2, 2, trials=700, seed=9, polish_iters=30)
        b = search_private_subspace(dephasing2, 2, trials=700, seed=9, polish_iters=30)
        assert a[1].defect == b[1].defect and a[1].trial == b[1].trial
        np.testing.assert_array_equal(a[0].embedding, b[0].embedding)

    def test_workers_agree(self, dephasing2):
        a = search_private_subspace(dephasing2, 2, trials=1100, seed=4, polish_iters=20)
        b = search_private_subspace(dephasing2, 2, trials=1100, seed=4, polish_iters=20, workers=3)
        assert a[1].defect == b[1].defect
        np.testing.assert_array_equal(a[0].embedding, b[0].embedding)

    def test_polish_does_not_worsen(self, dephasing2):
        raw = search_private_subspace(dephasing2, 2, trials=200, seed=2, polish_iters=0)
        pol = search_private_subspace(dephasing2, 2, trials=200, seed=2)
        assert pol[1].defect <= raw[1].defect + 1e-12

    @pytest.mark.parametrize("kwargs", [{"dim": 1, "trials": 5}, {"dim": 2, "trials": 0}])
    def test_bad_args(self, dephasing2, kwargs):
        with pytest.raises(ValueError):
            search_private_subspace(dephasing2, seed=0, **kwargs)

    def test_dim_too_large(self):
        with pytest.raises(DimensionError):
            search_private_subspace(depolarizing(2), 3, trials=2, seed=0)
