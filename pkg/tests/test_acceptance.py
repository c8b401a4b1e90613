"""Acceptance criteria.

Each test covers one numbered criterion, runs it at its stated tolerance,
and prints a single pass/fail line (run with ``pytest -s`` to see them).
Sample counts and time budgets follow the criteria exactly.
"""

import random
import time
from fractions import Fraction

import numpy as np
import pytest

from provergames import cli, files, quantum, rounding
from provergames.catalog import chsh, magic_square_game, tiny_1in3
from provergames.games import eval_two_prover
from provergames.rounding import (
    FLOAT_CLAIM_TOL,
    InequalityReport,
    InequalityRow,
    com_decompose,
    hybrid_family,
    normalize_answer_shape,
    ns_decompose,
    round_com,
    round_no_signaling,
    verify_claim_selection,
    verify_com_claims,
    verify_lemma_distance,
    verify_ns_claims,
)
from provergames.sampling import (
    random_multi_round_game,
    random_ns_strategy,
    random_pcp_game,
    random_product_strategy,
    random_two_prover_game,
)
from provergames.transforms import (
    oracularize_multi_round,
    oracularize_pcp,
    oracularize_pcp_dummy,
    parallel_repeat,
)
from provergames.values import (
    classical_value,
    entangled_lower_bound,
    multi_round_value,
    no_signaling_value,
    pcp_value,
)


def _report(criterion, ok, detail, elapsed, budget):
    status = "PASS" if ok and elapsed < budget else "FAIL"
    print(f"criterion {criterion} {status}: {detail} "
          f"[{elapsed:.1f}s of {budget:.0f}s budget]")
    assert ok, detail
    assert elapsed < budget, f"criterion {criterion} exceeded {budget}s"


def test_criterion_1_exact_values():
    t0 = time.time()
    t = time.time()
    c_chsh = classical_value(chsh())
    t_chsh = time.time() - t
    t = time.time()
    c_ms = classical_value(magic_square_game())
    t_ms = time.time() - t
    t = time.time()
    ns_chsh = no_signaling_value(chsh())
    t_ns = time.time() - t
    ok = (c_chsh.value == Fraction(3, 4) and c_ms.value == Fraction(17, 18)
          and ns_chsh.value == Fraction(1)
          and max(t_chsh, t_ms, t_ns) < 1.0)
    _report(1, ok,
            f"classical(CHSH)={c_chsh.value}, classical(MagicSquare)={c_ms.value}, "
            f"w_ns(CHSH)={ns_chsh.value}, slowest {max(t_chsh, t_ms, t_ns):.2f}s",
            time.time() - t0, 3.0)


def test_criterion_2_value_chain():
    t0 = time.time()
    rng = random.Random(202)
    worst_gap = 0.0
    for _ in range(50):
        g = random_two_prover_game(rng, 3, 3, 2, 2)
        c = classical_value(g)
        ns = no_signaling_value(g)
        e = entangled_lower_bound(g.to_float(), dims=(2, 2), restarts=3,
                                  max_iters=50, seed=rng.randrange(2**31),
                                  classical_seed=c.witness)
        assert float(c.value) <= e.value + 1e-11
        assert e.value <= float(ns.value) + 1e-9
        worst_gap = max(worst_gap, e.value - float(ns.value))
    _report(2, True,
            f"50 games: classical <= see-saw <= w_ns + 1e-9 "
            f"(max see-saw excess over w_ns: {worst_gap:.2e})",
            time.time() - t0, 120.0)


def test_criterion_3_oracularization_sandwich():
    t0 = time.time()
    rng = random.Random(303)
    nontrivial = 0
    for _ in range(30):
        g = random_pcp_game(rng, positions=rng.choice((3, 4, 5)))
        w = pcp_value(g).value
        gp = oracularize_pcp(g)
        cw = classical_value(gp).value
        assert w <= cw <= 1 - (1 - w) / 3
        if w < 1:
            nontrivial += 1
    _report(3, nontrivial >= 10,
            f"30 games: w(G) <= classical(G') <= 1-(1-w)/3 exactly "
            f"({nontrivial} with w < 1)",
            time.time() - t0, 120.0)


@pytest.fixture(scope="module")
def lemma_wns_instances():
    rng = random.Random(404)
    instances = []
    for _ in range(20):
        g = random_multi_round_game(rng, 2, 2, 2)
        gp = oracularize_multi_round(g)
        w = multi_round_value(g).value
        ns = no_signaling_value(gp)
        instances.append((g, gp, w, ns))
    return instances


def test_criterion_4_lemma_wns(lemma_wns_instances):
    t0 = time.time()
    nontrivial = 0
    for g, gp, w, ns in lemma_wns_instances:
        bound = 1 - (1 - w) / Fraction(3 * g.rounds)
        assert ns.value <= bound
        if w < 1:
            nontrivial += 1
    _report(4, nontrivial >= 5,
            f"20 games: w_ns(G') <= 1-(1-w)/(3r) exactly "
            f"({nontrivial} with w < 1)",
            time.time() - t0, 300.0)


def test_criterion_5_ns_claim_suite(lemma_wns_instances):
    t0 = time.time()
    rng = random.Random(505)
    checked = 0
    for g, gp, w, ns in lemma_wns_instances:
        strategies = [(normalize_answer_shape(ns.witness, gp), True)]
        for s in range(10):
            make = random_ns_strategy if s % 2 == 0 else random_product_strategy
            strategies.append((normalize_answer_shape(make(rng, gp), gp), False))
        for theta, lp_opt in strategies:
            tables = ns_decompose(gp, theta)
            rounded = round_no_signaling(tables)
            hybrids = hybrid_family(tables, rounded, g)
            report = verify_ns_claims(tables, hybrids, lp_optimal=lp_opt)
            assert report.ok, report.failures()[:3]
            checked += len(report.rows)
    _report(5, True,
            f"20 games x 11 strategies: claims and chain hold with zero "
            f"tolerance ({checked} inequalities)",
            time.time() - t0, 300.0)


def test_criterion_6_com_claim_suite():
    t0 = time.time()
    rng = random.Random(606)
    rng_np = np.random.default_rng(606)
    strategies_checked = 0
    rows_checked = 0
    games = [random_pcp_game(rng, positions=3 if i % 2 == 0 else 4)
             for i in range(10)]
    for gi, g in enumerate(games):
        gp = oracularize_pcp_dummy(g)
        gpf = gp.to_float()
        for si in range(10):
            s = quantum.random_strategy(rng_np, gpf, 2, 2)
            s = quantum.symmetrize_second_prover(s, gpf)
            tables = com_decompose(g, gp, s)
            rounded = round_com(tables)
            report = verify_com_claims(g, tables, rounded)
            assert report.ok, (gi, si, report.failures()[:3])
            rows_checked += len(report.rows)
            # distance chain on the strategy's own averaged measurements
            q = rng.randrange(tables.num_positions)
            d2dim = tables.strategy.d2
            m_emb = quantum.Povm(tuple(np.kron(e, np.eye(d2dim))
                                       for e in tables.Mbar[q]))
            n_emb = quantum.Povm(tuple(np.kron(np.eye(tables.strategy.d1), e)
                                       for e in tables.Nbar[q]))
            chain = verify_lemma_distance(m_emb, n_emb, tables.strategy.state)
            assert chain[0] <= chain[1] + 1e-8 <= chain[2] + 2e-8
            rows_checked += 2
            # selection-move bound with m = 3, every insertion index
            t_list = [rng.randrange(tables.num_positions) for _ in range(3)]
            for i in (1, 2, 3):
                lhs, rhs = verify_claim_selection(tables, t_list, i)
                assert lhs <= rhs + FLOAT_CLAIM_TOL
                rows_checked += 1
            strategies_checked += 1
    _report(6, strategies_checked >= 100,
            f"{strategies_checked} strategies on Q=3-4 games: claims, "
            f"distance chain, selection, aggregate and final bounds within "
            f"1e-7 ({rows_checked} inequalities)",
            time.time() - t0, 600.0)


def test_criterion_7_entangled_gap_witness():
    t0 = time.time()
    res = entangled_lower_bound(chsh().to_float(), dims=(2, 2), restarts=10,
                                max_iters=100, seed=7)
    game, strategy = quantum.catalog_magic_square()
    table = quantum.to_bipartite_strategy(strategy, game.to_float())
    ms_val = eval_two_prover(game.to_float(), table)
    ms_classical = classical_value(game).value
    ok = (res.value >= 0.853 and abs(ms_val - 1.0) <= 1e-9
          and ms_classical == Fraction(17, 18))
    _report(7, ok,
            f"see-saw(CHSH)={res.value:.6f} >= 0.853; magic-square strategy "
            f"evaluates to {ms_val:.12f} while classical is {ms_classical}",
            time.time() - t0, 60.0)


def test_criterion_8_parallel_repetition():
    t0 = time.time()
    g2 = parallel_repeat(chsh(), 2)
    ns = no_signaling_value(g2)
    cv = classical_value(g2)
    ok = ns.value == 1 and cv.value == Fraction(10, 16)
    _report(8, ok,
            f"w_ns(CHSH^2)={ns.value} (exact LP), classical(CHSH^2)={cv.value}",
            time.time() - t0, 60.0)


def test_criterion_9_round_trip_and_cli(tmp_path, monkeypatch, capsys):
    t0 = time.time()
    for g in (chsh(), magic_square_game(), tiny_1in3()):
        assert files.parse_game(files.serialize_game(g)) == g
    code_clean = cli.run_cli(["verify", "lemma-wns", "--seed", "7",
                              "--samples", "3"])
    code_clean2 = cli.run_cli(["verify", "ns-claims", "--seed", "3",
                               "--samples", "1", "--strategies", "1"])

    real = rounding.verify_ns_claims

    def perturbed(tables, hybrids, lp_optimal=False):
        report = real(tables, hybrids, lp_optimal=lp_optimal)
        rows = tuple(InequalityRow(r.name, r.lhs + 1, r.rhs, r.tol)
                     for r in report.rows)
        return InequalityReport(rows)

    monkeypatch.setattr(rounding, "verify_ns_claims", perturbed)
    code_perturbed = cli.run_cli(["verify", "ns-claims", "--seed", "3",
                                  "--samples", "1", "--strategies", "1"])
    monkeypatch.undo()
    capsys.readouterr()
    ok = code_clean == 0 and code_clean2 == 0 and code_perturbed == 1
    _report(9, ok,
            f"catalog round-trips exact; verify exits {code_clean}/"
            f"{code_clean2} clean and {code_perturbed} when perturbed",
            time.time() - t0, 60.0)
