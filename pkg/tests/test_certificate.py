import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from soslab.certificate import (
    BINARY_ONE,
    SIGN_POSITIVE,
    build_certificate,
    certificate_objective,
    expansivity_table,
    frac_str,
    positivity_graph,
    report_to_json_dict,
    verify_certificate,
    with_objective,
)
from soslab.errors import CertificateUndefined, InvalidParams, NotBinary, TooLarge
from soslab.matrix import NoisyMatrix, n_pairs
from soslab.models import ModelParams, Noise, gen_sbm, gen_submatrix
from soslab.seeds import generator
from soslab.sos import PseudoExpectation

PATH_3 = NoisyMatrix(d=3, entries=np.array([1.0, -1.0, 1.0]))  # edges 1-2, 2-3


def complete_graph(d):
    return positivity_graph(NoisyMatrix(d=d, entries=np.ones(n_pairs(d))), BINARY_ONE)


def random_graph(rng, d, p):
    entries = (rng.random(n_pairs(d)) < p).astype(float)
    return positivity_graph(NoisyMatrix(d=d, entries=entries), BINARY_ONE)


def expansion_identity_violations(table, d):
    """Exact check of: sum_{i not in S} eta(S+{i}) = (2l - |S|) eta(S)."""
    worst = 0
    for k in range(2 * table.ell):
        for S in combinations(range(1, d + 1), k):
            lhs = sum(table.get(S + (i,)) for i in range(1, d + 1) if i not in S)
            rhs = (2 * table.ell - k) * table.get(S)
            worst = max(worst, abs(lhs - rhs))
    return worst


def test_positivity_graph_sign_mode():
    g = positivity_graph(PATH_3, SIGN_POSITIVE)
    assert g.edges == frozenset({(1, 2), (2, 3)})


def test_positivity_graph_complete():
    g = complete_graph(5)
    assert len(g.edges) == 10


def test_positivity_graph_zero_matrix_has_no_edges():
    g = positivity_graph(NoisyMatrix(d=4, entries=np.zeros(6)), SIGN_POSITIVE)
    assert g.edges == frozenset()


def test_positivity_graph_binary_rejects_nonbinary():
    with pytest.raises(NotBinary):
        positivity_graph(PATH_3, BINARY_ONE)
    with pytest.raises(InvalidParams):
        positivity_graph(PATH_3, "positive-ish")


def test_expansivity_k4():
    table = expansivity_table(complete_graph(4), 1)
    assert table.clique_count == 6
    for i in range(1, 5):
        assert table.get((i,)) == 3
    for pair in combinations(range(1, 5), 2):
        assert table.get(pair) == 1


def test_expansivity_path():
    table = expansivity_table(positivity_graph(PATH_3, SIGN_POSITIVE), 1)
    assert table.clique_count == 2
    assert [table.get((i,)) for i in (1, 2, 3)] == [1, 2, 1]
    assert table.get((1, 2)) == 1
    assert table.get((2, 3)) == 1
    assert table.get((1, 3)) == 0


def test_expansivity_empty_graph():
    g = positivity_graph(NoisyMatrix(d=4, entries=np.zeros(6)), SIGN_POSITIVE)
    assert expansivity_table(g, 1).clique_count == 0


def test_expansivity_budget():
    with pytest.raises(TooLarge):
        expansivity_table(complete_graph(30), 2, max_combos=100)


def test_expansivity_identity_random_graphs():
    rng = generator(500)
    for trial in range(12):
        d = int(rng.integers(5, 13))
        ell = 1 + trial % 2
        table = expansivity_table(random_graph(rng, d, 0.5), ell)
        assert expansion_identity_violations(table, d) == 0


def test_expansivity_monotone_and_clique_supported():
    rng = generator(501)
    g = random_graph(rng, 8, 0.6)
    table = expansivity_table(g, 2)
    for S, count in table.counts.items():
        for v in S:
            smaller = tuple(x for x in S if x != v)
            assert table.get(smaller) >= count
        if len(S) >= 2 and count > 0:
            assert all(
                tuple(sorted(p)) in g.edges for p in combinations(S, 2)
            )


def test_certificate_k4_values():
    pe = build_certificate(expansivity_table(complete_graph(4), 1), 2, 1)
    assert pe.get(()) == 1
    for i in range(1, 5):
        assert pe.get((i,)) == Fraction(1, 2)
    for pair in combinations(range(1, 5), 2):
        assert pe.get(pair) == Fraction(1, 6)


def test_certificate_complete_graph_closed_form():
    # on K_d the value at |S| = k is the ratio of falling factorials
    # perm(s*, k) / perm(d, k); oracle computed directly from the formula
    for d, s_star, ell in ((5, 3, 1), (6, 2, 2), (7, 4, 2)):
        pe = build_certificate(expansivity_table(complete_graph(d), ell), s_star, ell)
        for k in range(2 * ell + 1):
            expected = Fraction(math.perm(s_star, k), math.perm(d, k))
            for S in combinations(range(1, d + 1), k):
                assert pe.get(S) == expected


def test_certificate_path_values():
    pe = build_certificate(
        expansivity_table(positivity_graph(PATH_3, SIGN_POSITIVE), 1), 2, 1
    )
    assert pe.get((1,)) == Fraction(1, 2)
    assert pe.get((2,)) == 1
    assert pe.get((3,)) == Fraction(1, 2)
    assert pe.get((1, 2)) == Fraction(1, 2)
    assert pe.get((2, 3)) == Fraction(1, 2)
    assert pe.get((1, 3)) == 0


def test_certificate_undefined_on_empty_graph():
    g = positivity_graph(NoisyMatrix(d=4, entries=np.zeros(6)), SIGN_POSITIVE)
    with pytest.raises(CertificateUndefined):
        build_certificate(expansivity_table(g, 1), 2, 1)


def test_verify_k4():
    pe = build_certificate(expansivity_table(complete_graph(4), 1), 2, 1)
    report = verify_certificate(pe, 4, 2, 1)
    assert report.normalization_ok
    assert report.rowsum_max_violation == 0
    assert abs(report.min_eigenvalue) <= 1e-12  # flat direction, eigenvalue 0
    assert report.psd
    assert report.eta_empty == 6


def test_verify_path_is_genuine_moment():
    pe = build_certificate(
        expansivity_table(positivity_graph(PATH_3, SIGN_POSITIVE), 1), 2, 1
    )
    report = verify_certificate(pe, 3, 2, 1)
    assert report.rowsum_max_violation == 0
    assert report.psd
    assert report.min_eigenvalue >= -1e-12


def test_verify_detects_exact_perturbation():
    pe = build_certificate(expansivity_table(complete_graph(4), 1), 2, 1)
    values = dict(pe.values)
    values[(1, 2)] = values[(1, 2)] + Fraction(1, 100)
    bent = PseudoExpectation(d=4, ell=1, s_star=2, values=values, eta_empty=pe.eta_empty)
    report = verify_certificate(bent, 4, 2, 1)
    assert report.rowsum_max_violation == Fraction(1, 100)


def test_certificate_row_sums():
    rng = generator(321)
    g = random_graph(rng, 9, 0.8)
    for s_star, ell in ((3, 1), (4, 2)):
        table = expansivity_table(g, ell)
        assert table.clique_count > 0
        pe = build_certificate(table, s_star, ell)
        assert sum(pe.get((i,)) for i in range(1, 10)) == s_star
        ordered = sum(
            pe.get((i, j)) if i != j else pe.get((i,))
            for i in range(1, 10)
            for j in range(1, 10)
        )
        assert ordered == s_star * s_star


def test_genuine_moment_regime_psd():
    # s* <= 2l: the construction is a true two-stage sampling law
    rng = generator(777)
    checked = 0
    for _ in range(12):
        d = int(rng.integers(6, 11))
        ell = int(rng.integers(1, 3))
        g = random_graph(rng, d, 0.7)
        table = expansivity_table(g, ell)
        if table.clique_count == 0:
            continue
        for s_star in range(2, 2 * ell + 1):
            pe = build_certificate(table, s_star, ell)
            report = verify_certificate(pe, d, s_star, ell)
            assert report.rowsum_max_violation == 0
            assert report.min_eigenvalue >= -1e-10
            checked += 1
    assert checked > 5


def test_objective_rademacher_equals_nu():
    for nu in (1.0, 2.5):
        params = ModelParams(
            kind="submatrix", d=14, s_star=3, beta_star=0.0,
            noise=Noise("rademacher", nu), seed=61,
        )
        inst = gen_submatrix(params)
        g = positivity_graph(inst.matrix, SIGN_POSITIVE)
        pe = build_certificate(expansivity_table(g, 1), 3, 1)
        assert certificate_objective(inst.matrix, pe, 3) == Fraction(nu)


def test_objective_sbm_equals_one():
    params = ModelParams(
        kind="sbm", d=16, s_star=4, beta_star=0.5, beta_tilde=0.5, seed=62
    )
    inst = gen_sbm(params)
    g = positivity_graph(inst.matrix, BINARY_ONE)
    for ell in (1, 2):
        pe = build_certificate(expansivity_table(g, ell), 4, ell)
        assert certificate_objective(inst.matrix, pe, 4) == 1


def test_objective_integral_indicator_is_scan_average():
    rng = generator(63)
    X = NoisyMatrix(d=6, entries=rng.standard_normal(15))
    ind = PseudoExpectation.indicator((2, 4, 5), d=6, ell=2)
    expected = sum(X.value(i, j) for i in (2, 4, 5) for j in (2, 4, 5) if i != j) / 6
    got = certificate_objective(X, ind, 3)
    assert float(got) == pytest.approx(expected, abs=1e-12)


def test_report_json_schema():
    pe = build_certificate(expansivity_table(complete_graph(4), 1), 2, 1)
    report = verify_certificate(pe, 4, 2, 1)
    report = with_objective(report, Fraction(1))
    doc = report_to_json_dict(report)
    assert doc["eta_empty"] == 6
    assert doc["normalization_ok"] is True
    assert doc["rowsum_max_violation"] == "0/1"
    assert doc["objective"] == "1/1"
    assert doc["objective_float"] == 1.0
    assert isinstance(doc["min_eigenvalue"], float)
    assert doc["psd"] is True
    assert frac_str(Fraction(-3, 7)) == "-3/7"
