"""Game transformations.

Oracularization turns a single-prover game into a two-prover one-round game
by sending the full question to the first prover and a consistency probe to
the second.  The dummy variant additionally hides which of two probe
coordinates will be checked.  Also here: parallel repetition and the
1-in-3 SAT to PCP-game construction.

Transformed games restrict question sets to the support of the constructed
distribution and keep the index maps in ``game.meta`` (JSON-friendly lists),
which is what the honest-strategy embeddings read.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import scalars
from .games import (
    DeterministicBipartiteStrategy,
    PcpGame,
    TwoProverGame,
    check_table_size,
)
from .indexing import PrefixIndex, decode_tuple, encode_tuple, iter_tuples

#: Re-exported: the bijection between prefix tuples and dense indices used
#: for the second prover's question/answer sets in oracularized games.
PrefixQuestionIndex = PrefixIndex


@dataclass(frozen=True)
class OneInThreeFormula:
    """Clauses of three literals over distinct variables.

    A literal is ``(variable index, polarity)``; ``polarity=False`` negates.
    """

    num_vars: int
    clauses: tuple

    def __post_init__(self):
        object.__setattr__(self, "clauses",
                           tuple(tuple((v, bool(p)) for v, p in cl) for cl in self.clauses))
        for cl in self.clauses:
            if len(cl) != 3:
                raise ValueError(f"clause {cl} does not have three literals")
            vs = [v for v, _ in cl]
            if len(set(vs)) != 3:
                raise ValueError(f"clause {cl} repeats a variable")
            for v in vs:
                if not 0 <= v < self.num_vars:
                    raise ValueError(f"variable {v} out of range")

    def satisfied_count(self, assignment):
        """Number of clauses with exactly one true literal."""
        hit = 0
        for cl in self.clauses:
            trues = sum(1 for v, p in cl if bool(assignment[v]) == p)
            if trues == 1:
                hit += 1
        return hit


def oracularize_multi_round(game):
    """Oracularize a multi-round game.

    The first prover receives the full question tuple, the second a uniform
    random prefix.  The predicate is the simulation test (the full
    conversation is accepting) conjoined with the consistency test (the
    second prover answered a tuple of the probed length agreeing with the
    first prover's prefix).
    """
    r = game.rounds
    q1_tuples = [q for q in game.q_tuples() if game.pi_at(q)]
    prefixes = []
    seen = set()
    for k in range(1, r + 1):
        for q in q1_tuples:
            p = q[:k]
            if p not in seen:
                seen.add(p)
                prefixes.append(p)
    prefixes.sort(key=lambda p: (len(p), p))

    a_index = PrefixIndex(game.a_count, r)
    a1_count = game.a_count**r
    a2_count = len(a_index)
    check_table_size(len(q1_tuples) * len(prefixes) * a1_count * a2_count,
                     "oracularize_multi_round predicate")

    inv_r = (Fraction(1, r) if game.mode == scalars.RATIONAL else 1.0 / r)
    zero = scalars.zero(game.mode)
    a2_tuples = [a_index.decode(i) for i in range(a2_count)]

    pi = [[game.pi_at(q) * inv_r if q[:len(p)] == p else zero for p in prefixes]
          for q in q1_tuples]
    R = []
    for q in q1_tuples:
        sim = [game.r_at(q, a) for a in iter_tuples(game.a_count, r)]
        row = []
        for p in prefixes:
            k = len(p)
            block = []
            for a1, atup in enumerate(iter_tuples(game.a_count, r)):
                s = sim[a1]
                prefix_a = atup[:k]
                block.append(tuple(
                    s if (len(a2t) == k and a2t == prefix_a) else zero
                    for a2t in a2_tuples))
            row.append(tuple(block))
        R.append(tuple(row))

    meta = {"kind": "oracularized_multi_round", "rounds": r,
            "base_q_count": game.q_count, "base_a_count": game.a_count,
            "q1_tuples": [list(q) for q in q1_tuples],
            "q2_prefixes": [list(p) for p in prefixes]}
    return TwoProverGame(len(q1_tuples), len(prefixes), a1_count, a2_count,
                         pi, R, game.mode, meta=meta)


def oracularize_pcp(game):
    """Standard oracularization of a three-query PCP game.

    The first prover receives a support triple, the second one of its three
    positions uniformly; consistency requires the single answer to agree
    with the first prover's entry at that position.
    """
    triples = game.support()
    positions = sorted({q for t in triples for q in t})
    a = game.alphabet_size
    a1_count = a**3
    check_table_size(len(triples) * len(positions) * a1_count * a,
                     "oracularize_pcp predicate")
    third = Fraction(1, 3) if game.mode == scalars.RATIONAL else 1.0 / 3.0
    zero = scalars.zero(game.mode)
    pi_d = game.pi_dict()
    r_d = game.r_dict()

    pi = [[pi_d[t] * third if pos in t else zero for pos in positions]
          for t in triples]
    R = []
    for t in triples:
        sim = r_d[t]
        row = []
        for pos in positions:
            j = t.index(pos) if pos in t else None
            block = []
            for a1 in range(a1_count):
                a1tup = decode_tuple(a1, a, 3)
                s = sim[a1]
                if j is None:
                    block.append((s,) * a)
                else:
                    block.append(tuple(s if a2 == a1tup[j] else zero
                                       for a2 in range(a)))
            row.append(tuple(block))
        R.append(tuple(row))

    meta = {"kind": "oracularized_pcp", "alphabet": a,
            "base_positions": game.positions,
            "triples": [list(t) for t in triples],
            "positions": list(positions)}
    return TwoProverGame(len(triples), len(positions), a1_count, a, pi, R,
                         game.mode, meta=meta)


def pcp_question_marginal(game):
    """Per-position probe marginal: draw a support triple, then one of its
    three positions uniformly."""
    third = Fraction(1, 3) if game.mode == scalars.RATIONAL else 1.0 / 3.0
    marg = {}
    for t, p in game.pi:
        if p:
            for q in t:
                marg[q] = marg.get(q, scalars.zero(game.mode)) + third * p
    return marg


def oracularize_pcp_dummy(game):
    """Oracularization with a dummy question.

    The second prover receives a sorted pair: one coordinate is the real
    consistency probe (a uniform position of the first prover's triple),
    the other an independently drawn dummy position; ordering follows the
    probe values with a fair coin on ties, so the pair itself carries no
    information about which is real.  That verifier coin is integrated out:
    the pair probability accumulates both assignments and the predicate is
    the correspondingly weighted average of the two consistency checks,
    which makes some entries strictly between 0 and 1.
    """
    triples = game.support()
    marg = pcp_question_marginal(game)
    positions = sorted(marg)
    pairs = [(u, v) for i, u in enumerate(positions) for v in positions[i:]]
    a = game.alphabet_size
    a1_count, a2_count = a**3, a**2
    check_table_size(len(triples) * len(pairs) * a1_count * a2_count,
                     "oracularize_pcp_dummy predicate")
    third = Fraction(1, 3) if game.mode == scalars.RATIONAL else 1.0 / 3.0
    zero, one = scalars.zero(game.mode), scalars.one(game.mode)
    half = Fraction(1, 2) if game.mode == scalars.RATIONAL else 0.5
    pi_d = game.pi_dict()
    r_d = game.r_dict()

    pi, R = [], []
    for t in triples:
        pt = pi_d[t]
        sim = r_d[t]
        pi_row, r_row = [], []
        for (u, v) in pairs:
            # weight of "u is real, v is dummy" and the reverse
            w_u = third * marg[v] if u in t else zero
            w_v = third * marg[u] if v in t else zero
            if u == v:
                w_total = w_u
            else:
                w_total = w_u + w_v
            pi_row.append(pt * w_total)

            ju = t.index(u) if u in t else None
            jv = t.index(v) if v in t else None
            block = []
            for a1 in range(a1_count):
                a1tup = decode_tuple(a1, a, 3)
                s = sim[a1]
                entry = []
                for a2 in range(a2_count):
                    b1, b2 = decode_tuple(a2, a, 2)
                    if u == v:
                        if ju is None:
                            acc = one
                        else:
                            acc = half * ((one if b1 == a1tup[ju] else zero)
                                          + (one if b2 == a1tup[ju] else zero))
                    elif w_total:
                        acc_u = one if (ju is not None and b1 == a1tup[ju]) else zero
                        acc_v = one if (jv is not None and b2 == a1tup[jv]) else zero
                        acc = (w_u * acc_u + w_v * acc_v) / w_total
                    else:
                        acc = one  # measure-zero pair: consistency is vacuous
                    entry.append(s * acc)
                block.append(tuple(entry))
            r_row.append(tuple(block))
        pi.append(pi_row)
        R.append(tuple(r_row))

    meta = {"kind": "oracularized_pcp_dummy", "alphabet": a,
            "base_positions": game.positions,
            "triples": [list(t) for t in triples],
            "positions": list(positions),
            "pairs": [list(p) for p in pairs],
            "real_marginal": [scalars.format_scalar(marg[q]) for q in positions]}
    return TwoProverGame(len(triples), len(pairs), a1_count, a2_count, pi, R,
                         game.mode, meta=meta)


def parallel_repeat(game, n):
    """n-fold parallel repetition: product questions, all copies must win."""
    if n < 1:
        raise ValueError("n must be positive")
    q1n, q2n = game.q1_count**n, game.q2_count**n
    a1n, a2n = game.a1_count**n, game.a2_count**n
    check_table_size(q1n * q2n * a1n * a2n, "parallel_repeat predicate")
    one = scalars.one(game.mode)

    pi = []
    for q1s in iter_tuples(game.q1_count, n):
        row = []
        for q2s in iter_tuples(game.q2_count, n):
            p = one
            for x, y in zip(q1s, q2s):
                p *= game.pi[x][y]
                if not p:
                    break
            row.append(p)
        pi.append(row)

    R = []
    for q1s in iter_tuples(game.q1_count, n):
        row_q1 = []
        for q2s in iter_tuples(game.q2_count, n):
            block = []
            for a1s in iter_tuples(game.a1_count, n):
                entry = []
                for a2s in iter_tuples(game.a2_count, n):
                    v = one
                    for x, y, s, t in zip(q1s, q2s, a1s, a2s):
                        v *= game.R[x][y][s][t]
                        if not v:
                            break
                    entry.append(v)
                block.append(tuple(entry))
            row_q1.append(tuple(block))
        R.append(tuple(row_q1))

    meta = {"kind": "parallel_repetition", "copies": n,
            "base_counts": [game.q1_count, game.q2_count,
                            game.a1_count, game.a2_count]}
    return TwoProverGame(q1n, q2n, a1n, a2n, pi, R, game.mode, meta=meta)


def pcp_from_1in3(formula):
    """PCP game of a 1-in-3 formula: positions are the queried variables,
    the verifier draws a clause uniformly and accepts iff exactly one
    literal is true.

    Clauses sharing a variable triple merge: the triple's probability
    accumulates and its predicate averages the clause predicates, so
    entries can be fractional.
    """
    if not formula.clauses:
        raise ValueError("formula has no clauses")
    used = sorted({v for cl in formula.clauses for v, _ in cl})
    pos_of = {v: i for i, v in enumerate(used)}
    m = len(formula.clauses)

    counts = {}
    sat_counts = {}
    for cl in formula.clauses:
        lits = sorted(((pos_of[v], p) for v, p in cl))
        triple = tuple(q for q, _ in lits)
        counts[triple] = counts.get(triple, 0) + 1
        row = sat_counts.setdefault(triple, [0] * 8)
        for aidx, atup in enumerate(iter_tuples(2, 3)):
            trues = sum(1 for (q, p), bit in zip(lits, atup) if bool(bit) == p)
            if trues == 1:
                row[aidx] += 1

    pi = tuple((t, Fraction(c, m)) for t, c in sorted(counts.items()))
    R = tuple((t, tuple(Fraction(s, counts[t]) for s in sat_counts[t]))
              for t in sorted(counts))
    meta = {"kind": "pcp_1in3", "variables": list(used),
            "num_clauses": m}
    return PcpGame(len(used), 2, pi, R, scalars.RATIONAL, meta=meta)


def honest_strategy_from_proof(proof, game):
    """Deterministic two-prover strategy that reads the proof everywhere.

    Works for both oracularization variants; the second prover answers all
    queried coordinates from the proof, so the consistency test always
    passes.
    """
    meta = game.meta or {}
    kind = meta.get("kind")
    if kind not in ("oracularized_pcp", "oracularized_pcp_dummy"):
        raise ValueError(f"game of kind {kind!r} is not an oracularized PCP game")
    if len(proof) != meta["base_positions"]:
        raise ValueError(f"proof length {len(proof)} does not match "
                         f"{meta['base_positions']} positions")
    a = meta["alphabet"]
    f1 = [encode_tuple(tuple(proof[q] for q in t), a) for t in meta["triples"]]
    if kind == "oracularized_pcp":
        f2 = [proof[q] for q in meta["positions"]]
    else:
        f2 = [encode_tuple((proof[u], proof[v]), a) for u, v in meta["pairs"]]
    return DeterministicBipartiteStrategy(tuple(f1), tuple(f2))


def honest_strategy_from_multi_round(strategy, game, oracularized):
    """Embed a deterministic multi-round strategy into the oracularized game.

    The first prover plays out the whole conversation; the second answers
    the prefix the same way, which is well defined because a deterministic
    strategy's answers depend only on the questions seen so far.
    """
    meta = oracularized.meta or {}
    if meta.get("kind") != "oracularized_multi_round":
        raise ValueError("game is not an oracularized multi-round game")
    one = scalars.one(strategy.mode)

    def play(qtup):
        answers = []
        for k in range(1, len(qtup) + 1):
            dist = strategy.round_dist(k, qtup[:k], tuple(answers))
            best = max(range(strategy.a_count), key=lambda y: (dist[y], -y))
            if dist[best] != one:
                raise ValueError("strategy is not deterministic")
            answers.append(best)
        return tuple(answers)

    f1 = [encode_tuple(play(tuple(q)), game.a_count) for q in meta["q1_tuples"]]
    a_index = PrefixIndex(game.a_count, game.rounds)
    f2 = [a_index.encode(play(tuple(p))) for p in meta["q2_prefixes"]]
    return DeterministicBipartiteStrategy(tuple(f1), tuple(f2))
