import math

import numpy as np
import pytest

from adpaad import qprimitives as qp
from adpaad import statevector as sv


class TestGroverOperator:
    @pytest.mark.parametrize("theta", [0.1, 0.4, math.pi / 4, 1.2])
    @pytest.mark.parametrize("ell", [0, 1, 3, 7])
    def test_rotation_law(self, theta, ell):
        op = qp.GroverOperator(theta, ell)
        v = np.linalg.matrix_power(op.matrix(), ell) @ op.initial()
        assert abs(v[0]) ** 2 == pytest.approx(op.good_amplitude() ** 2, abs=1e-10)

    def test_eigenphases(self):
        theta = 0.3
        assert np.allclose(qp.GroverOperator(theta).eigenphases(), [-2 * theta, 2 * theta])


def _branch_state(fracs, n=8):
    """One branch per entry; ``fracs[b]`` of the ``n`` j-values are good."""
    B = len(fracs)
    s = sv.init(sv.RegisterLayout.from_dims({"b": B, "j": n, "g": 2}))
    sv.hadamard_uniform(s, "b", B)
    sv.hadamard_uniform(s, "j", n)
    good = np.zeros((s.amps.shape[0], n), dtype=bool)
    for b, k in enumerate(fracs):
        good[b, :k] = True
    sv.apply_basis_map(s, flips={"g": lambda st: good[:, :, None]})
    return s


class TestAmplify:
    def test_identity(self):
        s = _branch_state([2, 3])
        ref = s.amps.copy()
        qp.amplitude_amplify(s, lambda st: st.index("g") == 1, 0, ("b",))
        assert np.array_equal(ref, s.amps)

    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_per_branch_rotation(self, ell):
        counts = [1, 2, 3, 4]
        s = _branch_state(counts)
        qp.amplitude_amplify(s, lambda st: st.index("g") == 1, ell, ("b",))
        p = sv.conditional_probability(s, lambda st: st.index("g") == 1, ("b",))
        for b, k in enumerate(counts):
            theta = math.asin(math.sqrt(k / 8))
            assert p[b] == pytest.approx(math.sin((2 * ell + 1) * theta) ** 2, abs=1e-10)
        assert abs(s.norm() - 1) < 1e-12

    def test_half_branch(self):
        s = _branch_state([2], n=4)
        qp.amplitude_amplify(s, lambda st: st.index("g") == 1, 1, ("b",))
        assert sv.probability_of(s, lambda st: st.index("g") == 1) == pytest.approx(0.5)


class TestEstimate:
    def test_rounding_example(self):
        est = qp.amplitude_estimate(0.25, 8)
        assert est.theta_hat / math.pi == pytest.approx(43 / 256)
        assert abs(est.theta_hat - est.theta) == pytest.approx(0.0041, abs=1e-4)
        assert abs(est.theta_hat - est.theta) <= est.epsilon1

    def test_extremes(self):
        assert qp.amplitude_estimate(0.0, 5).theta_hat == 0.0
        assert qp.amplitude_estimate(1.0, 1).theta_hat == math.pi / 2

    def test_distribution_normalised_and_symmetric(self):
        p = qp.ae_distribution(0.37, 6)
        assert p.sum() == pytest.approx(1)
        assert np.allclose(p[1:], p[1:][::-1])

    def test_closed_form_matches_circuit(self):
        for theta in (0.2, 0.55, 1.1):
            op = qp.GroverOperator(theta)
            circuit = qp.phase_estimation_circuit(op.matrix(), op.initial(), 6)
            assert np.allclose(circuit, qp.ae_distribution(theta, 6), atol=1e-12)

    def test_sampled_is_seeded(self):
        a = qp.estimate_angles(np.full(5, 0.3), 6, qp.SAMPLED, rng=3)[1]
        b = qp.estimate_angles(np.full(5, 0.3), 6, qp.SAMPLED, rng=3)[1]
        assert np.array_equal(a, b)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            qp.estimate_angles(0.3, 4, "guess")

    def test_readout_branches_fold(self):
        y = np.array([3, 61])
        assert np.array_equal(qp.fold_readout(y, 6), [3 / 64, 3 / 64])


class TestInnerProduct:
    def test_identical(self):
        v = np.ones(4) / 2
        assert qp.inner_product_estimate(v, v, 8) == pytest.approx(1, abs=2 ** -8)

    def test_orthogonal(self):
        a, b = np.array([1, 0]), np.array([0, 1])
        assert abs(qp.inner_product_estimate(a, b, 8)) <= math.pi / 2 ** 8

    def test_w6_row_mean(self):
        # |phi_1> carries S_bar(X1, X_k) on flag |0>, |rho> is uniform on flag |0>
        sbar = np.array([0, 1 / 12, 2 / 12])
        phi = np.zeros((3, 2))
        phi[:, 0] = sbar
        phi[:, 1] = np.sqrt(1 - sbar ** 2)
        phi /= math.sqrt(3)
        rho = np.zeros((3, 2))
        rho[:, 0] = 1 / math.sqrt(3)
        est = qp.inner_product_estimate(phi, rho, 12)
        assert est == pytest.approx(1 / 12, abs=math.pi / 2 ** 12)

    def test_error_bound_random(self):
        rng = np.random.default_rng(0)
        for m in (4, 7, 10):
            for _ in range(50):
                a = rng.normal(size=6)
                b = rng.normal(size=6)
                a /= np.linalg.norm(a)
                b /= np.linalg.norm(b)
                assert abs(qp.inner_product_estimate(a, b, m) - a @ b) <= math.pi / 2 ** m

    def test_callable_and_state(self):
        s = sv.hadamard_uniform(sv.init(sv.RegisterLayout.from_dims({"i": 4})), "i")
        assert qp.inner_product_estimate(lambda: s, s, 6) == pytest.approx(1, abs=2 ** -6)

    def test_unnormalised(self):
        with pytest.raises(ValueError):
            qp.inner_product_estimate(np.ones(2), np.ones(2), 4)


class TestGrover:
    def test_w6(self):
        h = [1.125, 0.75, 1.125]
        for strat in (qp.KNOWN_T, qp.UNKNOWN_T):
            res = qp.grover_search(lambda i: h[i - 1] >= 1.0, 3, strat, rng=1)
            assert res.found == (1, 3)

    def test_none_marked(self):
        for strat in (qp.KNOWN_T, qp.UNKNOWN_T):
            res = qp.grover_search([False] * 6, 6, strat, rng=0)
            assert res.found == ()
        assert qp.grover_search([False] * 6, 6, qp.UNKNOWN_T, rng=0).rounds > 0

    def test_all_marked(self):
        for strat in (qp.KNOWN_T, qp.UNKNOWN_T):
            assert qp.grover_search([True] * 5, 5, strat, rng=0).found == (1, 2, 3, 4, 5)

    def test_random_instances(self):
        rng = np.random.default_rng(11)
        for trial in range(200):
            K = int(rng.integers(1, 17))
            mask = rng.random(K) < rng.random()
            truth = tuple(int(i) + 1 for i in np.flatnonzero(mask))
            for strat in (qp.KNOWN_T, qp.UNKNOWN_T):
                assert qp.grover_search(mask, K, strat, rng=trial).found == truth

    def test_bad_strategy(self):
        with pytest.raises(ValueError):
            qp.grover_search([True], 1, "psychic")
