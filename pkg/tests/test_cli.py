import subprocess
import sys

import pytest

from saigo import sgf
from saigo.cli import main
from saigo.go import Position


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_rate_prints_the_two_player_difference(tmp_path, capsys):
    path = tmp_path / "m.csv"
    path.write_text("first,second,wins,draws,losses\nA,B,75,0,25\n")
    code, out, _ = run(capsys, "rate", str(path), "--anchor", "B")
    assert code == 0
    assert out.splitlines() == ["player,rating,games", "A,190.85,100", "B,0.00,100"]


def test_rate_reports_disconnected_graphs(tmp_path, capsys):
    path = tmp_path / "m.csv"
    path.write_text("first,second,wins,draws,losses\nA,B,1,0,1\nC,D,1,0,1\n")
    code, _, err = run(capsys, "rate", str(path))
    assert code == 1 and err.startswith("saigo rate: error:")


def test_selfplay_is_reproducible(tmp_path, capsys):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        code, _, _ = run(capsys, "selfplay", "--games", "3", "--seed", "1", "--visits", "8",
                         "--board-size", "5", "--evaluator", "uniform-random", "--out", str(d))
        assert code == 0
        outs.append(((d / "chunk-0000.said").read_bytes(), (d / "games.sgf").read_text()))
    assert outs[0] == outs[1]
    assert outs[0][0].startswith(b"SAID1\n")


def test_score_matches_the_exact_score_of_a_settled_game(tmp_path, capsys):
    settled = Position.from_rows("""
        XXOO.
        X.XOO
        XXXO.
        .XOOO
        XXO.O""", komi=0.5).play(25).play(25)
    # reach the same stones by alternating play from the empty board
    stones = [(i, c) for i, c in enumerate(settled.board) if c]
    blacks = [i for i, c in stones if c == 1]
    whites = [i for i, c in stones if c == 2]
    pos = Position.empty(5, 0.5)
    for b, w in zip(blacks, whites):
        pos = pos.play(b).play(w)
    pos = pos.play(25).play(25)
    assert pos.board == settled.board
    path = tmp_path / "g.sgf"
    path.write_text(sgf.dumps(pos))
    code, out, _ = run(capsys, "score", str(path), "--evaluator", "territory", "--beta", "20",
                       "--score-visits", "200")
    assert code == 0
    assert out == "estimate W+1.5 tromp-taylor W+1.5\n"


def test_sgf_round_trip_and_errors(tmp_path, capsys):
    path = tmp_path / "g.sgf"
    path.write_text("(;GM[1]FF[4]SZ[5]KM[0.5];B[cc];W[dd])")
    code, out, _ = run(capsys, "sgf", str(path))
    assert code == 0 and out == sgf.loads(out).dumps()
    path.write_text("(;SZ[5];B[cc];W[cc])")
    code, _, err = run(capsys, "sgf", str(path))
    assert code == 1 and "illegal" in err
    code, _, err = run(capsys, "sgf", str(tmp_path / "missing.sgf"))
    assert code == 1


def test_match_writes_its_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "match", "--games", "2", "--visits", "4", "--opp-visits", "2",
                       "--board-size", "5", "--komi", "0.5", "--evaluator", "territory",
                       "--opp-evaluator", "uniform-random", "--out", str(tmp_path))
    assert code == 0 and "/2 wins" in out
    assert (tmp_path / "summary.csv").exists() and len(list(tmp_path.glob("game-*.sgf"))) == 2


def test_usage_errors_exit_with_status_two():
    proc = subprocess.run([sys.executable, "-m", "saigo", "match", "--colors", "purple"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "usage:" in proc.stderr
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
