import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_leaf_function, random_measured_tree, random_table_symbol
from ultrawave.errors import DivergenceError, ParameterError, UnsupportedTailError
from ultrawave.operators import (
    HomogeneousSymbol,
    TableSymbol,
    apply_dense,
    check_convergence,
    eigenvalue,
    operator_matrix,
    spectrum,
)
from ultrawave.trees import build_padic_tree
from ultrawave.wavelets import TestFunction, evaluate, tree_wavelets


def wavelet_vector(tree, w):
    return np.array([evaluate(tree, w, x) for x in tree.leaves])


def tail_partial_sums(p, beta, c, terms):
    """Independent oracle: partial sums of the upward extension series."""
    out = []
    total = 0.0
    for k in range(1, terms + 1):
        total += c * float(p) ** (-k * beta) * (float(p) ** k - float(p) ** (k - 1))
        out.append(total)
    return out


class TestEigenvalue:
    def test_root_of_depth_one(self):
        t = build_padic_tree(2, 1)
        c = 0.3 - 1.7j
        sym = TableSymbol({t.root: c})
        assert eigenvalue(t, sym, t.root) == c  # empty ancestor sum

    @pytest.mark.parametrize("beta", [-1.0, 0.5, 2.0])
    def test_depth_two_homogeneous_vs_dense(self, beta):
        t = build_padic_tree(2, 2)
        sym = HomogeneousSymbol(beta=beta)
        lam = eigenvalue(t, sym, 1)
        assert abs(lam - (2.0 ** (beta - 1) + 0.5)) < 1e-12
        ws = [w for w in tree_wavelets(t) if w.ball == 1]
        for w in ws:
            f = TestFunction(t, dict(zip(t.leaves, wavelet_vector(t, w))))
            g = apply_dense(t, sym, f)
            ratio_err = np.abs(g.leaf_vector() - lam * f.leaf_vector()).max()
            assert ratio_err < 1e-12 * abs(lam)

    def test_leaf_rejected(self):
        t = build_padic_tree(2, 1)
        with pytest.raises(ParameterError):
            eigenvalue(t, HomogeneousSymbol(beta=1.0), 1)


class TestApplyDense:
    def test_constant_killed(self):
        t = build_padic_tree(3, 2)
        sym = TableSymbol({b: 2.0 + 1.0j for b in t.non_leaf_balls()})
        f = TestFunction(t, {x: 1.0 + 0.0j for x in t.leaves})
        out = apply_dense(t, sym, f)
        assert np.abs(out.leaf_vector()).max() <= 1e-12 * 2.5

    def test_depth_one_wavelet(self):
        # two leaves of measure 1/2: T(root)*(psi(x1)-psi(x2))*(1/2) = c*psi(x1)
        t = build_padic_tree(2, 1)
        c = 1.5 + 0.25j
        sym = TableSymbol({t.root: c})
        (w,) = list(tree_wavelets(t))
        f = TestFunction(t, {x: evaluate(t, w, x) for x in t.leaves})
        out = apply_dense(t, sym, f)
        expected = c * f.leaf_vector()
        assert np.abs(out.leaf_vector() - expected).max() < 1e-14 * abs(c)

    def test_vladimirov_type_on_ternary_tree(self):
        t = build_padic_tree(3, 3)
        sym = HomogeneousSymbol(beta=0.8)
        for w in tree_wavelets(t):
            lam = eigenvalue(t, sym, w.ball)
            f = TestFunction(t, dict(zip(t.leaves, wavelet_vector(t, w))))
            out = apply_dense(t, sym, f)
            err = np.abs(out.leaf_vector() - lam * f.leaf_vector()).max()
            assert err <= 1e-10 * abs(lam) * np.abs(f.leaf_vector()).max()


class TestSpectrum:
    def test_two_level_table(self):
        t = build_padic_tree(2, 2)
        sym = TableSymbol({0: 1.0, 1: 0.0, 2: 0.0})
        spec = spectrum(t, sym)
        assert abs(spec[0] - 1.0) < 1e-15
        assert abs(spec[1] - 0.5) < 1e-15
        assert abs(spec[2] - 0.5) < 1e-15
        # cross-check against the dense kernel application
        for w in tree_wavelets(t):
            f = TestFunction(t, dict(zip(t.leaves, wavelet_vector(t, w))))
            out = apply_dense(t, sym, f)
            err = np.abs(out.leaf_vector() - spec[w.ball] * f.leaf_vector()).max()
            assert err < 1e-12

    def test_zero_symbol(self):
        t = build_padic_tree(2, 3)
        spec = spectrum(t, TableSymbol({b: 0.0 for b in t.non_leaf_balls()}))
        assert all(v == 0 for _, v in spec.items())

    def test_level_symmetry(self):
        t = build_padic_tree(3, 2)
        spec = spectrum(t, HomogeneousSymbol(beta=0.4))
        kids = t.children[t.root]
        assert abs(spec[kids[0]] - spec[kids[1]]) < 1e-15
        assert abs(spec[kids[0]] - spec[kids[2]]) < 1e-15


class TestConvergence:
    def test_finite_tree_always_converges(self):
        t = build_padic_tree(2, 2)
        assert check_convergence(t, TableSymbol({b: 9.0 for b in t.non_leaf_balls()}))

    @pytest.mark.parametrize("beta", [0.5, 2.0])
    def test_tail_direction_matches_partial_sums(self, beta):
        # oracle first: the partial sums decide which tails converge
        sums = tail_partial_sums(2, beta, 1.0, 60)
        increments = [abs(b - a) for a, b in zip(sums, sums[1:])]
        oracle_converges = increments[-1] < 1e-9 and increments[-1] < increments[0]
        report = check_convergence(build_padic_tree(2, 3), HomogeneousSymbol(beta=beta, tail=True))
        assert report.converges == oracle_converges
        assert report.converges == (beta > 1)

    def test_tail_value_matches_partial_sums(self):
        t = build_padic_tree(2, 2)
        sym = HomogeneousSymbol(beta=2.0, tail=True)
        lam_plain = eigenvalue(t, sym, t.root, tail=False)
        lam_tail = eigenvalue(t, sym, t.root, tail=True)
        limit = tail_partial_sums(2, 2.0, 1.0, 200)[-1]
        assert abs((lam_tail - lam_plain) - limit) < 1e-12

    def test_divergent_tail_raises(self):
        t = build_padic_tree(2, 2)
        with pytest.raises(DivergenceError):
            eigenvalue(t, HomogeneousSymbol(beta=0.5, tail=True), t.root)

    def test_tail_for_table_symbol_rejected(self):
        t = build_padic_tree(2, 2)
        sym = TableSymbol({b: 1.0 for b in t.non_leaf_balls()})
        with pytest.raises(UnsupportedTailError):
            eigenvalue(t, sym, t.root, tail=True)

    def test_tail_needs_padic_tree(self):
        rng = np.random.default_rng(5)
        t = random_measured_tree(rng, max_depth=2)
        with pytest.raises(UnsupportedTailError):
            eigenvalue(t, HomogeneousSymbol(beta=2.0, tail=True), t.root)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_eigenfunction_property_random(seed):
    rng = np.random.default_rng(seed)
    t = random_measured_tree(rng)
    sym = random_table_symbol(rng, t)
    M = operator_matrix(t, sym)
    scale = max(abs(v) for v in sym.entries.values()) * t.total_measure
    for w in tree_wavelets(t):
        vec = wavelet_vector(t, w)
        lam = eigenvalue(t, sym, w.ball)
        err = np.abs(M @ vec - lam * vec).max()
        assert err <= 1e-10 * max(abs(lam), scale) * np.abs(vec).max()


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_apply_dense_linearity(seed):
    rng = np.random.default_rng(seed)
    t = random_measured_tree(rng, max_depth=3)
    sym = random_table_symbol(rng, t)
    f = random_leaf_function(rng, t)
    g = random_leaf_function(rng, t)
    a = complex(rng.standard_normal(), rng.standard_normal())
    combo = TestFunction(t, {x: a * f.values[x] + g.values[x] for x in t.leaves})
    lhs = apply_dense(t, sym, combo).leaf_vector()
    rhs = a * apply_dense(t, sym, f).leaf_vector() + apply_dense(t, sym, g).leaf_vector()
    scale = max(np.abs(lhs).max(), np.abs(rhs).max(), 1.0)
    assert np.abs(lhs - rhs).max() < 1e-12 * scale


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_parent_recursion(seed):
    # lambda_I = lambda_P + T(I) nu(I) - T(P) nu(I), an algebraic consequence
    rng = np.random.default_rng(seed)
    t = random_measured_tree(rng)
    sym = random_table_symbol(rng, t)
    scale = max(abs(eigenvalue(t, sym, b)) for b in t.non_leaf_balls())
    for b in t.non_leaf_balls():
        p = t.parent[b]
        if p is None:
            continue
        lam = eigenvalue(t, sym, b)
        rec = (
            eigenvalue(t, sym, p)
            + sym.value(t, b) * t.measure[b]
            - sym.value(t, p) * t.measure[b]
        )
        assert abs(lam - rec) <= 1e-12 * max(scale, 1.0)
