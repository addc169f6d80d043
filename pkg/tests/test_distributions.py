import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_leaf_function, random_measured_tree, random_table_symbol
from ultrawave.distributions import (
    GeneralizedFunction,
    LizorkinSeries,
    apply_operator,
    eval_extended,
    eval_on_char,
    eval_on_char_nd,
    eval_on_test,
    extended_leaf_values,
    lizorkin_pair,
)
from ultrawave.errors import AnchorError, DomainError
from ultrawave.operators import TableSymbol, apply_dense, spectrum
from ultrawave.trees import BallTree, build_padic_tree
from ultrawave.wavelets import (
    TestFunction,
    WaveletExpansion,
    analyze,
    evaluate,
    synthesize,
    tree_wavelets,
    wavelet_basis,
)


def brute_indicator_integral(tree, wavelet, ball):
    """Oracle: integrate a wavelet over a ball by enumerating leaves."""
    return sum(evaluate(tree, wavelet, x) * tree.measure[x] for x in tree.leaves_under(ball))


def naive_eval_on_char(u, ball, members=None):
    """Oracle: full series summation over every wavelet of the tree.

    ``members`` optionally truncates the sum to coefficients at balls of a
    regular subtree (the filtration view of the series).
    """
    tree = u.factors[0]
    anchor = u.anchor[0]
    total = u.anchor_value * tree.measure[ball]
    for w in tree_wavelets(tree):
        if members is not None and w.ball not in members:
            continue
        c = u.coefficient((w.ball,), (w.j,))
        if c == 0:
            continue
        total += c * (
            brute_indicator_integral(tree, w, ball)
            - tree.measure[ball] / tree.measure[anchor] * brute_indicator_integral(tree, w, anchor)
        )
    return total


def naive_eval_on_char_nd(u, vertex):
    """Oracle: summation over every extended index of the finite product."""
    total = 0.0 + 0.0j
    index_sets = []
    for tree, a0 in zip(u.factors, u.anchor):
        entries = []
        for b in range(tree.n_vertices):
            if b == a0:
                entries.append((b, 0))
            if not tree.is_leaf(b):
                try:
                    basis = wavelet_basis(tree, b)
                except Exception:
                    continue
                entries.extend((b, w.j) for w in basis)
        index_sets.append(entries)
    for combo in itertools.product(*index_sets):
        key_vertex = tuple(b for b, _ in combo)
        key_j = tuple(j for _, j in combo)
        c = u.coefficient(key_vertex, key_j)
        if c == 0:
            continue
        term = c
        for i, (b, j) in enumerate(combo):
            tree = u.factors[i]
            if j == 0:
                term *= tree.measure[vertex[i]]
                continue
            w = wavelet_basis(tree, b)[j - 1]
            term *= brute_indicator_integral(tree, w, vertex[i]) - (
                tree.measure[vertex[i]] / tree.measure[u.anchor[i]]
            ) * brute_indicator_integral(tree, w, u.anchor[i])
        total += term
    return total


class TestEvalOnChar:
    def test_constant_generalized_function(self):
        t = build_padic_tree(2, 2)
        u = GeneralizedFunction.one_dim(t, 1, anchor_value=2.5 - 1.0j)
        for b in range(t.n_vertices):
            assert abs(eval_on_char(u, b) - (2.5 - 1.0j) * t.measure[b]) < 1e-15

    def test_anchor_ball_exact(self):
        t = build_padic_tree(2, 2)
        u = GeneralizedFunction.one_dim(
            t, 1, anchor_value=0.3, coeffs={(0, 1): 2.0 + 1.0j, (1, 1): -0.7j, (2, 1): 5.0}
        )
        assert eval_on_char(u, 1) == 0.3 * t.measure[1]  # cancellation is exact here

    def test_single_coefficient_vs_naive(self):
        t = build_padic_tree(2, 3)
        u = GeneralizedFunction.one_dim(t, 7, anchor_value=1.1, coeffs={(1, 1): 2.0 - 0.5j})
        for b in range(t.n_vertices):
            assert abs(eval_on_char(u, b) - naive_eval_on_char(u, b)) < 1e-12

    def test_zero_measure_anchor_rejected(self):
        t = BallTree([None, 0, 0], [1.0, 1.0, 0.0], [1.0, 0.5, 0.5])
        with pytest.raises(AnchorError):
            GeneralizedFunction.one_dim(t, 2, anchor_value=1.0)


class TestPairings:
    def test_biorthogonality(self):
        t = build_padic_tree(3, 2)
        phi = LizorkinSeries.one_dim({(1, 2): 1.0})
        (target,) = [w for w in tree_wavelets(t) if (w.ball, w.j) == (1, 2)]
        f = TestFunction(t, {x: evaluate(t, target, x) for x in t.leaves})
        assert abs(lizorkin_pair(phi, analyze(t, f)) - 1.0) < 1e-13

    def test_zero_function(self):
        phi = LizorkinSeries.one_dim({(0, 1): 3.0})
        assert lizorkin_pair(phi, WaveletExpansion(0.0, {})) == 0

    def test_non_mean_zero_rejected(self):
        phi = LizorkinSeries.one_dim({(0, 1): 1.0})
        with pytest.raises(DomainError):
            lizorkin_pair(phi, WaveletExpansion(1.0, {(0, 1): 1.0}))

    def test_random_pairing_equals_dense_dot(self):
        rng = np.random.default_rng(17)
        t = build_padic_tree(2, 3)
        f = random_leaf_function(rng, t)
        e = analyze(t, f)
        e0 = WaveletExpansion(0.0, e.coeffs)  # drop the mean part
        keys = sorted(e.coeffs)
        phi_coeffs = {
            k: complex(rng.standard_normal(), rng.standard_normal())
            for k in rng.choice(len(keys), size=5, replace=False).tolist()
            for k in [keys[k]]
        }
        phi = LizorkinSeries.one_dim(phi_coeffs)
        dense = sum(phi_coeffs.get(k, 0.0) * e.coeffs[k] for k in keys)
        assert abs(lizorkin_pair(phi, e0) - dense) < 1e-13

    def test_wavelet_index_validation(self):
        with pytest.raises(DomainError):
            LizorkinSeries.one_dim({(0, 0): 1.0})


class TestEvalNd:
    def test_pure_anchor_term(self):
        t1, t2 = build_padic_tree(2, 2), build_padic_tree(3, 1)
        u = GeneralizedFunction([t1, t2], (1, 0), anchor_value=0.8 + 0.1j)
        for v1 in range(t1.n_vertices):
            for v2 in range(t2.n_vertices):
                expected = (0.8 + 0.1j) * t1.measure[v1] * t2.measure[v2]
                assert abs(eval_on_char_nd(u, (v1, v2)) - expected) < 1e-14

    def test_anchor_vertex_exact(self):
        t1, t2 = build_padic_tree(2, 2), build_padic_tree(2, 2)
        u = GeneralizedFunction(
            [t1, t2],
            (3, 1),
            coeffs={((0, 1), (1, 1)): 2.0, ((1, 1), (1, 0)): -1.0j},
            anchor_value=4.0,
        )
        expected = 4.0 * t1.measure[3] * t2.measure[1]
        assert eval_on_char_nd(u, (3, 1)) == expected

    def test_single_mixed_coefficient_vs_naive(self):
        t1, t2 = build_padic_tree(2, 2), build_padic_tree(3, 1)
        u = GeneralizedFunction(
            [t1, t2],
            (3, 1),
            coeffs={((1, 0), (1, 2)): 1.5 - 2.0j, ((0, 1), (1, 0)): 0.5j},
            anchor_value=-0.2,
        )
        for v in itertools.product(range(t1.n_vertices), range(t2.n_vertices)):
            closed = eval_on_char_nd(u, v)
            naive = naive_eval_on_char_nd(u, v)
            assert abs(closed - naive) < 1e-12

    def test_invalid_extended_key_rejected(self):
        t1, t2 = build_padic_tree(2, 1), build_padic_tree(2, 1)
        with pytest.raises(DomainError):
            # j = 0 away from the anchor component
            GeneralizedFunction([t1, t2], (0, 0), coeffs={((1, 0), (0, 1)): 1.0})


class TestApplyOperator:
    def test_constant_gives_zero_series(self):
        t = build_padic_tree(2, 2)
        u = GeneralizedFunction.one_dim(t, 0, anchor_value=3.0)
        sym = TableSymbol({b: 1.0 for b in t.non_leaf_balls()})
        out = apply_operator(u, spectrum(t, sym))
        assert out.coeffs == {}

    def test_delta_scaling(self):
        t = build_padic_tree(2, 2)
        u = GeneralizedFunction.one_dim(t, 0, coeffs={(1, 1): 1.0})
        sym = TableSymbol({0: 0.0, 1: 3.0, 2: 0.0})
        out = apply_operator(u, spectrum(t, sym))
        assert abs(out.coefficient((1,), (1,)) - 3.0 * 0.5) < 1e-15  # lambda_1 = 3*nu(1)

    def test_pairing_against_dense_oracle(self):
        rng = np.random.default_rng(23)
        t = build_padic_tree(2, 2)
        sym = random_table_symbol(rng, t)
        g = random_leaf_function(rng, t)
        gc = analyze(t, g).coeffs
        u = GeneralizedFunction.one_dim(t, 0, anchor_value=1.3, coeffs=gc)
        f = random_leaf_function(rng, t)
        f_coeffs = analyze(t, f).coeffs
        f0 = synthesize(t, WaveletExpansion(0.0, f_coeffs))
        lhs = lizorkin_pair(apply_operator(u, spectrum(t, sym)), WaveletExpansion(0.0, f_coeffs))
        # dense route: never touches the eigenvalue formula
        tf = apply_dense(t, sym, f0)
        dense = sum(gc[k] * c for k, c in analyze(t, tf).coeffs.items())
        assert abs(lhs - dense) < 1e-12 * max(1.0, abs(dense))


class TestInvariants:
    def test_constant_shift_invariance(self):
        rng = np.random.default_rng(31)
        t = random_measured_tree(rng, max_depth=3)
        coeffs = {}
        for w in itertools.islice(tree_wavelets(t), 4):
            coeffs[(w.ball, w.j)] = complex(rng.standard_normal(), rng.standard_normal())
        anchor = int(t.leaves[0])
        u1 = GeneralizedFunction.one_dim(t, anchor, anchor_value=0.4, coeffs=coeffs)
        u2 = GeneralizedFunction.one_dim(t, anchor, anchor_value=0.4 + 9.3j, coeffs=coeffs)
        f = random_leaf_function(rng, t)
        e = analyze(t, f)
        f0 = synthesize(t, WaveletExpansion(0.0, e.coeffs))
        v1, v2 = eval_on_test(u1, f0), eval_on_test(u2, f0)
        assert abs(v1 - v2) < 1e-12 * max(1.0, abs(v1))

    def test_anchor_reconstruction(self):
        rng = np.random.default_rng(5)
        t = random_measured_tree(rng, max_depth=3)
        coeffs = {}
        for w in tree_wavelets(t):
            coeffs[(w.ball, w.j)] = complex(rng.standard_normal(), rng.standard_normal())
        anchor = int(t.leaves[1])
        u0 = 1.7 - 0.6j
        u = GeneralizedFunction.one_dim(t, anchor, anchor_value=u0, coeffs=coeffs)
        assert abs(eval_on_char(u, anchor) - u0 * t.measure[anchor]) < 1e-12
        scale = max(abs(c) for c in coeffs.values())
        for (b, j), c in coeffs.items():
            got = eval_extended(u, (b,), (j,))
            assert abs(got - c) < 1e-12 * max(1.0, scale)

    def test_additivity_over_sibling_balls(self):
        rng = np.random.default_rng(8)
        t = random_measured_tree(rng, max_depth=3)
        coeffs = {}
        for w in itertools.islice(tree_wavelets(t), 5):
            coeffs[(w.ball, w.j)] = complex(rng.standard_normal(), rng.standard_normal())
        u = GeneralizedFunction.one_dim(t, t.root, anchor_value=0.9, coeffs=coeffs)
        for ball in t.non_leaf_balls():
            whole = eval_on_char(u, ball)
            parts = sum(eval_on_char(u, c) for c in t.children[ball])
            assert abs(whole - parts) < 1e-12 * max(1.0, abs(whole))

    def test_extended_family_full_rank(self):
        t1, t2 = build_padic_tree(2, 2), build_padic_tree(3, 1)
        anchor = (3, 1)
        families = []
        for tree, a0 in zip((t1, t2), anchor):
            fam = [extended_leaf_values(tree, a0, a0, 0)]
            for w in tree_wavelets(tree):
                fam.append(extended_leaf_values(tree, a0, w.ball, w.j))
            families.append(fam)
        rows = []
        for f1, f2 in itertools.product(*families):
            rows.append(
                [
                    f1.get(x1, 0.0) * f2.get(x2, 0.0)
                    for x1 in t1.leaves
                    for x2 in t2.leaves
                ]
            )
        M = np.array(rows, dtype=complex)
        dim = len(t1.leaves) * len(t2.leaves)
        assert M.shape == (dim, dim)
        assert np.linalg.matrix_rank(M) == dim

    def test_filtration_independence(self):
        # the truncated series stabilizes once the subtree holds sup and support
        t = build_padic_tree(2, 3)
        u = GeneralizedFunction.one_dim(t, 8, anchor_value=0.7, coeffs={(1, 1): 2.0 + 1.0j})
        target = 11  # leaf under the other root child
        closed = eval_on_char(u, target)
        for members in ({0, 1, 2}, {0, 1, 2, 3, 4}, set(range(t.n_vertices))):
            assert abs(naive_eval_on_char(u, target, members=members) - closed) < 1e-12


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_random_sparse_closed_vs_naive_1d(seed):
    rng = np.random.default_rng(seed)
    t = random_measured_tree(rng, max_depth=3)
    wavelets = list(tree_wavelets(t))
    coeffs = {}
    for w in rng.choice(len(wavelets), size=min(4, len(wavelets)), replace=False):
        w = wavelets[int(w)]
        coeffs[(w.ball, w.j)] = complex(rng.standard_normal(), rng.standard_normal())
    anchor = int(rng.choice([b for b in range(t.n_vertices) if t.measure[b] > 0]))
    u = GeneralizedFunction.one_dim(
        t, anchor, anchor_value=complex(rng.standard_normal()), coeffs=coeffs
    )
    for ball in rng.choice(t.n_vertices, size=6):
        ball = int(ball)
        closed = eval_on_char(u, ball)
        naive = naive_eval_on_char(u, ball)
        assert abs(closed - naive) < 1e-12 * max(1.0, abs(naive))
