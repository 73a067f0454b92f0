import numpy as np
import pytest

from assignlab.assignments import (
    LinearAssignment,
    OrthogonalProjectorSet,
    ZeroDiscordAssignment,
    orthogonal_flag_assignment,
    product_assignment,
    random_zero_discord_assignment,
)
from assignlab.dynamics import (
    EXPECTED_CONDITIONS,
    assignment_condition_table,
    choi_matrix,
    classical_cp_sweep,
    cp_certificate,
    find_noncp_unitary,
    induced_map,
    replay_unitary,
)
from assignlab.operators import (
    canonical_basis,
    hermiticity_defect,
    partial_trace,
    random_density,
    random_unitary,
    tensor,
    trace_norm,
)

I2 = np.eye(2, dtype=complex)
BASIS = canonical_basis(2)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


class TestInducedMap:
    def test_product_with_identity_is_identity(self):
        rng = np.random.default_rng(0)
        a = product_assignment(BASIS, random_density(2, rng))
        m = induced_map(a, np.eye(4))
        assert np.max(np.abs(m.mat - np.eye(4))) < 1e-12

    def test_product_with_swap_is_constant(self):
        rng = np.random.default_rng(1)
        t = random_density(2, rng)
        a = product_assignment(BASIS, t)
        m = induced_map(a, SWAP)
        for _ in range(10):
            eta = random_density(2, rng)
            assert np.max(np.abs(m.apply(eta) - t)) < 1e-12

    def test_composition_consistency(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            a = LinearAssignment(BASIS, np.stack([random_density(2, rng) for _ in range(4)]))
            u = random_unitary(4, rng)
            m = induced_map(a, u)
            eta = random_density(2, rng)
            direct = partial_trace(u @ a.apply(eta) @ u.conj().T, 2, 2, "E")
            assert np.max(np.abs(m.apply(eta) - direct)) < 1e-9

    def test_trace_and_hermiticity_preserved(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            z = random_zero_discord_assignment(2, 3, rng)
            u = random_unitary(6, rng)
            m = induced_map(z, u)
            eta = random_density(2, rng)
            out = m.apply(eta)
            assert abs(np.trace(out).real - 1.0) < 1e-9
            assert hermiticity_defect(out) < 1e-9

    def test_linearity_of_superoperator(self):
        rng = np.random.default_rng(4)
        a = product_assignment(BASIS, random_density(2, rng))
        m = induced_map(a, random_unitary(4, rng))
        r1, r2 = random_density(2, rng), random_density(2, rng)
        mixed = m.apply(0.3 * r1 + 0.7 * r2)
        assert np.max(np.abs(mixed - 0.3 * m.apply(r1) - 0.7 * m.apply(r2))) < 1e-10

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(5)
        a = product_assignment(BASIS, random_density(2, rng))
        with pytest.raises(ValueError):
            induced_map(a, np.eye(6))


class TestChoi:
    def test_identity_channel(self):
        rng = np.random.default_rng(6)
        a = product_assignment(BASIS, random_density(2, rng))
        choi = choi_matrix(induced_map(a, np.eye(4)))
        v = np.zeros(4, dtype=complex)
        v[0] = v[3] = 1.0
        bell2 = np.outer(v, v.conj())  # 2 * maximally entangled projector
        assert np.max(np.abs(choi.mat - bell2)) < 1e-12
        assert np.allclose(choi.spectrum, [0, 0, 0, 2], atol=1e-12)

    def test_constant_channel(self):
        rng = np.random.default_rng(7)
        a = product_assignment(BASIS, I2 / 2)
        choi = choi_matrix(induced_map(a, SWAP))
        assert np.max(np.abs(choi.mat - np.eye(4) / 2)) < 1e-12
        assert np.allclose(choi.spectrum, [0.5] * 4, atol=1e-12)

    def test_dephasing_channel(self):
        rng = np.random.default_rng(8)
        z = ZeroDiscordAssignment(
            OrthogonalProjectorSet.computational(2),
            np.stack([random_density(2, rng) for _ in range(2)]),
        )
        choi = choi_matrix(induced_map(z, np.eye(4)))
        assert np.max(np.abs(choi.mat - np.diag([1.0, 0, 0, 1.0]))) < 1e-12
        assert np.allclose(choi.spectrum, [0, 0, 1, 1], atol=1e-12)

    def test_trace_equals_dim(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            z = random_zero_discord_assignment(2, 2, rng)
            choi = choi_matrix(induced_map(z, random_unitary(4, rng)))
            assert abs(np.trace(choi.mat).real - 2.0) < 1e-8


class TestCPCertificate:
    def test_identity_is_cptp(self):
        rng = np.random.default_rng(10)
        a = product_assignment(BASIS, random_density(2, rng))
        report = cp_certificate(induced_map(a, np.eye(4)))
        assert report.is_cp and report.is_tp

    def test_classical_always_cp(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            z = random_zero_discord_assignment(2, 2, rng)
            u = random_unitary(4, rng)
            report = cp_certificate(induced_map(z, u))
            assert report.is_cp and report.is_tp

    def test_flag_assignment_breaks_cp(self):
        a = orthogonal_flag_assignment(BASIS)
        search = find_noncp_unitary(a, attempts=50, seed=7)
        assert search.found
        assert search.first_lambda < -1e-6
        # witness replay reproduces the certificate
        u = replay_unitary(search.seed, search.first_index, 8)
        lam = cp_certificate(induced_map(a, u)).lambda_min_choi
        assert lam == search.first_lambda

    def test_search_deterministic(self):
        a = orthogonal_flag_assignment(BASIS)
        s1 = find_noncp_unitary(a, attempts=20, seed=3)
        s2 = find_noncp_unitary(a, attempts=20, seed=3)
        assert s1 == s2


class TestClassicalSweep:
    def test_small_sweep_all_cp(self):
        sweep = classical_cp_sweep(
            n_assignments=20, unitaries_per_assignment=5, dim_s=2, dim_e=2, seed=13
        )
        assert sweep.maps_checked == 100
        assert sweep.all_cp
        assert sweep.min_lambda >= -1e-9


class TestConditionTable:
    def test_matches_expected_pattern(self):
        table = assignment_condition_table(seed=1)
        assert table.matches_expected
        by_family = {row.family: row for row in table.rows}
        assert by_family["none"].conditions == (True, True, True)
        assert by_family["classical"].conditions == (True, False, True)
        assert by_family["quantum"].conditions == (True, True, False)

    def test_recorded_defects(self):
        table = assignment_condition_table(seed=2)
        by_family = {row.family: row for row in table.rows}
        # classical family: consistency fails by the dephasing distance on some probe
        assert by_family["classical"].max_consistency_defect > 0.1
        # quantum family: positivity witness reaches -1
        assert by_family["quantum"].min_output_eigenvalue == pytest.approx(-1.0, abs=1e-9)

    def test_deterministic(self):
        t1 = assignment_condition_table(seed=5)
        t2 = assignment_condition_table(seed=5)
        for r1, r2 in zip(t1.rows, t2.rows):
            assert r1.family == r2.family
            assert r1.conditions == r2.conditions
            assert r1.max_linearity_defect == r2.max_linearity_defect

    def test_expected_table_shape(self):
        assert set(EXPECTED_CONDITIONS) == {"none", "classical", "quantum"}
