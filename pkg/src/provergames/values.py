"""Game values: exact classical/multi-round/PCP/no-signaling, and an
entangled lower bound via alternating (see-saw) optimization.

Every result carries a witness strategy that re-evaluates to the reported
value (exactly in rational mode, within 1e-9 in float mode).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import quantum, scalars
from .games import (
    BipartiteStrategy,
    DeterministicBipartiteStrategy,
    MultiRoundStrategy,
    check_table_size,
    eval_two_prover,
    iter_tuples,
)
from .lp import EQUAL, LinearProgram, OPTIMAL, solve_lp


@dataclass(frozen=True)
class ValueResult:
    value: object
    witness: object
    method: str
    exact: bool
    extras: dict = field(default_factory=dict, compare=False)


def _enumeration_cost(func_values, func_slots):
    return func_values**func_slots


def classical_value(game):
    """Exact optimum over deterministic strategy pairs.

    Enumerates the cheaper prover's function table and computes the other
    prover's best response per question, which is exact because the payoff
    is linear in each prover's table.
    """
    cost1 = _enumeration_cost(game.a1_count, game.q1_count)
    cost2 = _enumeration_cost(game.a2_count, game.q2_count)
    enumerate_first = cost1 <= cost2
    work = min(cost1, cost2) * game.q1_count * game.q2_count * (
        game.a2_count if enumerate_first else game.a1_count)
    check_table_size(work, "classical_value enumeration")

    best = None
    best_pair = None
    if enumerate_first:
        for f1 in itertools.product(range(game.a1_count), repeat=game.q1_count):
            total = scalars.zero(game.mode)
            f2 = []
            for q2 in range(game.q2_count):
                scores = [sum(game.pi[q1][q2] * game.R[q1][q2][f1[q1]][a2]
                              for q1 in range(game.q1_count) if game.pi[q1][q2])
                          for a2 in range(game.a2_count)]
                a2 = max(range(game.a2_count), key=lambda a: (scores[a], -a))
                f2.append(a2)
                total += scores[a2]
            if best is None or total > best:
                best, best_pair = total, (tuple(f1), tuple(f2))
    else:
        for f2 in itertools.product(range(game.a2_count), repeat=game.q2_count):
            total = scalars.zero(game.mode)
            f1 = []
            for q1 in range(game.q1_count):
                scores = [sum(game.pi[q1][q2] * game.R[q1][q2][a1][f2[q2]]
                              for q2 in range(game.q2_count) if game.pi[q1][q2])
                          for a1 in range(game.a1_count)]
                a1 = max(range(game.a1_count), key=lambda a: (scores[a], -a))
                f1.append(a1)
                total += scores[a1]
            if best is None or total > best:
                best, best_pair = total, (tuple(f1), tuple(f2))
    witness = DeterministicBipartiteStrategy(*best_pair)
    return ValueResult(best, witness, "deterministic-enumeration",
                       game.mode == scalars.RATIONAL)


def multi_round_value(game):
    """Exact value by backward induction over conversation prefixes.

    ``level[k]`` holds the unnormalized continuation value for every
    (question prefix, answer prefix) of length k; the recurrence sums over
    the next question and maximizes over the next answer.  The witness is
    the deterministic strategy of recorded argmaxes.
    """
    nq, na, r = game.q_count, game.a_count, game.rounds
    check_table_size(2 * nq**r * na**r, "multi_round_value tables")
    level = {}
    for qidx in range(nq**r):
        base = qidx * na**r
        for aidx in range(na**r):
            level[(qidx, aidx)] = game.pi[qidx] * game.R[base + aidx]

    choices = [None] * (r + 1)
    for k in range(r - 1, -1, -1):
        new_level = {}
        choice = {}
        for qidx in range(nq**k):
            for aidx in range(na**k):
                total = scalars.zero(game.mode)
                for x in range(nq):
                    best_a, best_v = 0, None
                    for y in range(na):
                        v = level[(qidx * nq + x, aidx * na + y)]
                        if best_v is None or v > best_v:
                            best_v, best_a = v, y
                    total += best_v
                    choice[(qidx * nq + x, aidx)] = best_a
                new_level[(qidx, aidx)] = total
        choices[k + 1] = choice
        level = new_level
    value = level[(0, 0)]

    tables = []
    for k in range(1, r + 1):
        table = []
        for qidx in range(nq**k):
            for aidx in range(na ** (k - 1)):
                a = choices[k][(qidx, aidx)]
                dist = [scalars.zero(game.mode)] * na
                dist[a] = scalars.one(game.mode)
                table.append(tuple(dist))
        tables.append(tuple(table))
    witness = MultiRoundStrategy(nq, na, r, tuple(tables), game.mode)
    return ValueResult(value, witness, "backward-induction",
                       game.mode == scalars.RATIONAL)


def pcp_value(game):
    """Exact max over deterministic proofs (enumerates A^Q)."""
    support = [(t, p) for t, p in game.pi if p]
    r_d = game.r_dict()
    check_table_size(game.alphabet_size**game.positions * max(1, len(support)),
                     "pcp_value enumeration")
    best, best_proof = None, None
    for proof in iter_tuples(game.alphabet_size, game.positions):
        total = scalars.zero(game.mode)
        for (q1, q2, q3), p in support:
            a = game.alphabet_size
            total += p * r_d[(q1, q2, q3)][(proof[q1] * a + proof[q2]) * a + proof[q3]]
        if best is None or total > best:
            best, best_proof = total, proof
    return ValueResult(best, best_proof, "proof-enumeration",
                       game.mode == scalars.RATIONAL)


def no_signaling_value(game):
    """Exact no-signaling value by linear programming.

    Variables are the conditional table on the support of pi plus shared
    per-prover marginal tables; constraints are nonnegativity, per-pair
    normalization, the marginal (no-signaling) equalities, and marginal
    normalization.  The witness extends the LP point to all question pairs
    using the shared marginals (a product completion), so it passes
    ``is_no_signaling`` with violation 0.
    """
    if game.mode != scalars.RATIONAL:
        raise scalars.ModeError("no_signaling_value requires a rational-mode game")
    support = game.support()
    var = {}
    for (q1, q2) in support:
        for a1 in range(game.a1_count):
            for a2 in range(game.a2_count):
                var[("t", q1, q2, a1, a2)] = len(var)
    for q1 in range(game.q1_count):
        for a1 in range(game.a1_count):
            var[("m1", q1, a1)] = len(var)
    for q2 in range(game.q2_count):
        for a2 in range(game.a2_count):
            var[("m2", q2, a2)] = len(var)
    n = len(var)

    zero, one = Fraction(0), Fraction(1)
    objective = [zero] * n
    for (q1, q2) in support:
        p = game.pi[q1][q2]
        for a1 in range(game.a1_count):
            for a2 in range(game.a2_count):
                r = game.R[q1][q2][a1][a2]
                if r:
                    objective[var[("t", q1, q2, a1, a2)]] = p * r

    rows = []

    def add(coeffs_map, rhs):
        row = [zero] * n
        for key, c in coeffs_map.items():
            row[var[key]] = c
        rows.append((tuple(row), EQUAL, rhs))

    for (q1, q2) in support:
        add({("t", q1, q2, a1, a2): one
             for a1 in range(game.a1_count) for a2 in range(game.a2_count)}, one)
        for a1 in range(game.a1_count):
            coeffs = {("t", q1, q2, a1, a2): one for a2 in range(game.a2_count)}
            coeffs[("m1", q1, a1)] = -one
            add(coeffs, zero)
        for a2 in range(game.a2_count):
            coeffs = {("t", q1, q2, a1, a2): one for a1 in range(game.a1_count)}
            coeffs[("m2", q2, a2)] = -one
            add(coeffs, zero)
    for q1 in range(game.q1_count):
        add({("m1", q1, a1): one for a1 in range(game.a1_count)}, one)
    for q2 in range(game.q2_count):
        add({("m2", q2, a2): one for a2 in range(game.a2_count)}, one)

    sol = solve_lp(LinearProgram(n, tuple(objective), tuple(rows)))
    assert sol.status == OPTIMAL  # the polytope is nonempty and bounded

    m1 = [[sol.x[var[("m1", q1, a1)]] for a1 in range(game.a1_count)]
          for q1 in range(game.q1_count)]
    m2 = [[sol.x[var[("m2", q2, a2)]] for a2 in range(game.a2_count)]
          for q2 in range(game.q2_count)]
    support_set = set(support)
    theta = []
    for q1 in range(game.q1_count):
        row = []
        for q2 in range(game.q2_count):
            if (q1, q2) in support_set:
                block = [[sol.x[var[("t", q1, q2, a1, a2)]]
                          for a2 in range(game.a2_count)]
                         for a1 in range(game.a1_count)]
            else:
                block = [[m1[q1][a1] * m2[q2][a2] for a2 in range(game.a2_count)]
                         for a1 in range(game.a1_count)]
            row.append(block)
        theta.append(row)
    witness = BipartiteStrategy(game.q1_count, game.q2_count, game.a1_count,
                                game.a2_count, theta, scalars.RATIONAL)
    return ValueResult(sol.value, witness, "no-signaling-lp", True,
                       extras={"duals": sol.duals})


# ---------------------------------------------------------------------------
# see-saw lower bound on the entangled value


def _povm_arrays(povms, dim):
    return np.array([[np.asarray(e) for e in p.elements] for p in povms],
                    dtype=complex).reshape(len(povms), len(povms[0]), dim, dim)


def _game_weight_array(game):
    gf = game.to_float()
    pi = np.array(gf.pi, dtype=float)
    R = np.array(gf.R, dtype=float)
    return pi[:, :, None, None] * R


def _game_operator(piR, m_arr, n_arr):
    w = np.einsum("qpab,pbjk->qajk", piR, n_arr)
    T = np.einsum("qaik,qajl->ijkl", m_arr, w)
    d = m_arr.shape[2] * n_arr.shape[2]
    T = T.reshape(d, d)
    return (T + T.conj().T) / 2


def _objective(piR, psi_m, m_arr, n_arr):
    k = np.einsum("ij,pakj,lk->pail", psi_m, n_arr, psi_m.conj())
    return float(np.real(np.einsum("qpab,qaik,pbki->", piR, m_arr, k)))


def _split_projector(p_elem, rank, c_diff):
    """Optimal re-split of a projector into two parts for Tr(P+ C) - style
    objectives: project onto the nonnegative eigenspace of the compressed
    difference operator."""
    vals, vecs = np.linalg.eigh(p_elem)
    basis = vecs[:, np.argsort(vals)[::-1][:rank]]
    comp = basis.conj().T @ c_diff @ basis
    w, v = np.linalg.eigh((comp + comp.conj().T) / 2)
    plus = basis @ v[:, w >= 0]
    first = plus @ plus.conj().T
    return first, p_elem - first


def _improve_pvm(elems, c_list, sweeps=3):
    """Pairwise projector re-splits; objective sum Tr(M_a C_a) never drops."""
    outcomes = len(elems)
    elems = [e.copy() for e in elems]
    scores = [float(np.real(np.trace(e @ c))) for e, c in zip(elems, c_list)]
    for _ in range(sweeps):
        changed = False
        for a in range(outcomes):
            for b in range(a + 1, outcomes):
                p = elems[a] + elems[b]
                rank = int(round(float(np.real(np.trace(p)))))
                if rank == 0:
                    continue
                new_a, new_b = _split_projector(p, rank, c_list[a] - c_list[b])
                sa = float(np.real(np.trace(new_a @ c_list[a])))
                sb = float(np.real(np.trace(new_b @ c_list[b])))
                if sa + sb > scores[a] + scores[b] + 1e-13:
                    elems[a], elems[b] = new_a, new_b
                    scores[a], scores[b] = sa, sb
                    changed = True
        if not changed:
            break
    return elems


def entangled_lower_bound(game, dims=(2, 2), restarts=10, max_iters=100,
                          seed=0, classical_seed=None):
    """Lower bound on the entangled value by alternating optimization.

    Each restart alternates three half-steps: the optimal shared state for
    fixed measurements (top eigenvector of the game operator), then each
    prover's per-question measurement update (pairwise projector re-splits
    against the answer-conditional operators).  Every half-step is monotone
    non-decreasing, the trace of objectives is recorded, and the witness is
    the best strategy over all restarts (ties keep the earliest restart).

    ``classical_seed`` optionally adds a restart initialized at a
    deterministic strategy, which pins the result above that strategy's
    value.  Non-convergence is not an error; the best iterate is returned.
    """
    d1, d2 = dims
    if d1 < 1 or d2 < 1:
        raise ValueError("dims must be at least 1")
    if restarts < 1 and classical_seed is None:
        raise ValueError("need at least one restart or a classical seed")
    if game.mode != scalars.FLOAT:
        raise scalars.ModeError("entangled_lower_bound requires a float-mode game "
                                "(use game.to_float())")
    piR = _game_weight_array(game)
    rng = np.random.default_rng(seed)

    starts = []
    if classical_seed is not None:
        starts.append(quantum.deterministic_strategy(
            classical_seed, d1, d2, game.a1_count, game.a2_count))
    starts.extend(quantum.random_strategy(rng, game, d1, d2)
                  for _ in range(restarts))

    best_val, best_strategy, best_trace, restart_values = -1.0, None, None, []
    for s in starts:
        m_arr = _povm_arrays(s.povms1, d1)
        n_arr = _povm_arrays(s.povms2, d2)
        psi = s.state
        trace = []
        prev = -1.0
        for _ in range(max_iters):
            T = _game_operator(piR, m_arr, n_arr)
            vals, vecs = np.linalg.eigh(T)
            psi = vecs[:, -1]
            val = float(vals[-1])
            trace.append(val)

            psi_m = psi.reshape(d1, d2)
            k2 = np.einsum("ij,pakj,lk->pail", psi_m, n_arr, psi_m.conj())
            c1 = np.einsum("qpab,pbil->qail", piR, k2)
            for q1 in range(piR.shape[0]):
                m_arr[q1] = _improve_pvm(list(m_arr[q1]), list(c1[q1]))
            trace.append(_objective(piR, psi_m, m_arr, n_arr))

            b = np.einsum("ij,qaik,kl->qajl", psi_m.conj(), m_arr, psi_m)
            c2 = np.einsum("qpab,qajl->pblj", piR, b)
            for q2 in range(piR.shape[1]):
                n_arr[q2] = _improve_pvm(list(n_arr[q2]), list(c2[q2]))
            val = _objective(piR, psi_m, m_arr, n_arr)
            trace.append(val)
            if val - prev < 1e-12:
                break
            prev = val
        restart_values.append(trace[-1])
        if trace[-1] > best_val:
            best_val = trace[-1]
            best_trace = trace
            povms1 = tuple(quantum.Povm(tuple(m_arr[q]), projective=True)
                           for q in range(piR.shape[0]))
            povms2 = tuple(quantum.Povm(tuple(n_arr[q]), projective=True)
                           for q in range(piR.shape[1]))
            best_strategy = quantum.QuantumStrategy(d1, d2, psi, povms1, povms2)

    induced = quantum.to_bipartite_strategy(best_strategy, game)
    reported = eval_two_prover(game, induced)
    return ValueResult(reported, best_strategy, "see-saw", False,
                       extras={"objective_trace": best_trace,
                               "restart_values": restart_values})
