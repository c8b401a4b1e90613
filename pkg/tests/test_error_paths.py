"""Error handling across modules: wrong kinds, shapes, and modes fail loudly."""

import json
import random
from fractions import Fraction

import numpy as np
import pytest

from provergames import cli, files, scalars
from provergames.catalog import chsh, tiny_1in3
from provergames.games import (
    DimensionError,
    MultiRoundStrategy,
    ProofMixture,
    eval_multi_round,
    eval_pcp,
    validate,
)
from provergames.lp import Constraint
from provergames.quantum import psd_sqrt
from provergames.rounding import (
    com_decompose,
    ns_decompose,
    verify_claim_selection,
)
from provergames.sampling import (
    random_multi_round_game,
    random_pcp_game,
    random_two_prover_game,
)
from provergames.transforms import (
    honest_strategy_from_multi_round,
    honest_strategy_from_proof,
    oracularize_multi_round,
    oracularize_pcp_dummy,
)


def test_bad_scalar_mode_rejected():
    with pytest.raises(ValueError):
        scalars.check_mode("decimal")


def test_eval_multi_round_dimension_mismatch():
    g = random_multi_round_game(random.Random(0))
    s = MultiRoundStrategy(3, 2, 2, (
        tuple((Fraction(1, 2), Fraction(1, 2)) for _ in range(3)),
        tuple((Fraction(1, 2), Fraction(1, 2)) for _ in range(18))))
    with pytest.raises(DimensionError):
        eval_multi_round(g, s)


def test_eval_pcp_dimension_mismatch():
    g = tiny_1in3()
    with pytest.raises(DimensionError):
        eval_pcp(g, ProofMixture.point_mass((0, 0, 0), 2))


def test_validate_proof_mixture():
    ok = ProofMixture(3, 2, ((Fraction(1, 2), (0, 0, 0)),
                             (Fraction(1, 2), (1, 1, 1))))
    assert validate(ok) == []
    short = ProofMixture(3, 2, ((Fraction(1), (0, 0)),))
    assert any("length" in r for r in validate(short))
    unnormalized = ProofMixture(3, 2, ((Fraction(1, 3), (0, 0, 0)),))
    assert any("normalization" in r for r in validate(unnormalized))


def test_validate_multi_round_strategy():
    bad = MultiRoundStrategy(2, 2, 1, ((
        (Fraction(1, 2), Fraction(1, 4)),
        (Fraction(1), Fraction(0))),))
    assert any("normalization" in r for r in validate(bad))


def test_constraint_rejects_unknown_relation():
    with pytest.raises(ValueError):
        Constraint((Fraction(1),), "<", Fraction(1))


def test_honest_proof_strategy_errors():
    g = tiny_1in3()
    gp = oracularize_pcp_dummy(g)
    with pytest.raises(ValueError, match="length"):
        honest_strategy_from_proof((0, 0), gp)
    with pytest.raises(ValueError, match="kind"):
        honest_strategy_from_proof((0, 0, 1, 0), chsh())


def test_honest_multi_round_requires_deterministic():
    g = random_multi_round_game(random.Random(2))
    gp = oracularize_multi_round(g)
    uniform = MultiRoundStrategy(2, 2, 2, (
        tuple((Fraction(1, 2), Fraction(1, 2)) for _ in range(2)),
        tuple((Fraction(1, 2), Fraction(1, 2)) for _ in range(8))))
    with pytest.raises(ValueError, match="deterministic"):
        honest_strategy_from_multi_round(uniform, g, gp)


def test_psd_sqrt_rejects_non_hermitian():
    with pytest.raises(ValueError, match="Hermitian"):
        psd_sqrt(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_ns_decompose_rejects_float_mode():
    g = random_multi_round_game(random.Random(3))
    gp = oracularize_multi_round(g)
    from provergames.games import uniform_bipartite
    from provergames.rounding import normalize_answer_shape

    theta = normalize_answer_shape(
        uniform_bipartite(gp.q1_count, gp.q2_count, gp.a1_count, gp.a2_count), gp)
    with pytest.raises(scalars.ModeError):
        ns_decompose(gp.to_float(), theta)
    with pytest.raises(ValueError, match="kind"):
        ns_decompose(chsh(), theta)


def test_com_decompose_rejects_wrong_kind():
    from provergames import quantum

    g = random_pcp_game(random.Random(4), positions=3)
    gp = oracularize_pcp_dummy(g)
    s = quantum.random_strategy(np.random.default_rng(0), gp, 2, 2)
    s = quantum.symmetrize_second_prover(s, gp)
    with pytest.raises(ValueError, match="kind"):
        com_decompose(g, chsh(), s)


def test_claim_selection_index_out_of_range():
    from provergames import quantum

    g = random_pcp_game(random.Random(5), positions=3)
    gp = oracularize_pcp_dummy(g)
    s = quantum.random_strategy(np.random.default_rng(1), gp, 2, 2)
    s = quantum.symmetrize_second_prover(s, gp)
    tables = com_decompose(g, gp, s)
    with pytest.raises(ValueError):
        verify_claim_selection(tables, [0, 1], 3)


def test_file_header_errors():
    with pytest.raises(files.ParseError, match="missing kind"):
        files.parse_game("format_version 1\ncounts 2 2 2 2\n")
    with pytest.raises(files.ParseError, match="format_version"):
        files.parse_game("format_version 9\nkind pcp3\ncounts 3 2\n")
    with pytest.raises(files.ParseError, match="duplicate"):
        files.parse_game("format_version 1\nformat_version 1\nkind pcp3\ncounts 3 2\n")
    with pytest.raises(files.ParseError, match="mode"):
        files.parse_game("format_version 1\nkind pcp3\nmode decimal\ncounts 3 2\n")


def test_cli_witness_variants(tmp_path):
    mr = random_multi_round_game(random.Random(6))
    mr_file = tmp_path / "mr.game"
    mr_file.write_text(files.serialize_game(mr))
    wit = tmp_path / "w.json"
    assert cli.run_cli(["value", "multi-round", str(mr_file),
                        "--witness", str(wit)]) == 0
    assert json.loads(wit.read_text())["type"] == "multi_round"

    pcp_file = tmp_path / "p.game"
    cli.run_cli(["catalog", "tiny-1in3", "-o", str(pcp_file)])
    assert cli.run_cli(["value", "pcp", str(pcp_file),
                        "--witness", str(wit)]) == 0
    assert json.loads(wit.read_text())["type"] == "proof"

    two_file = tmp_path / "t.game"
    two_file.write_text(files.serialize_game(
        random_two_prover_game(random.Random(7), 2, 2, 2, 2)))
    assert cli.run_cli(["value", "no-signaling", str(two_file),
                        "--witness", str(wit)]) == 0
    assert json.loads(wit.read_text())["type"] == "bipartite"


def test_cli_json_on_catalog_and_gen(tmp_path, capsys):
    out = tmp_path / "c.game"
    assert cli.run_cli(["catalog", "chsh", "-o", str(out), "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["counts"] == [2, 2, 2, 2]

    formula_file = tmp_path / "f.1in3"
    formula_file.write_text("1in3 3 1\n1 2 3\n")
    game_out = tmp_path / "g.game"
    assert cli.run_cli(["gen", "pcp-1in3", str(formula_file), "-o",
                        str(game_out), "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["positions"] == 3 and payload["clauses"] == 1
