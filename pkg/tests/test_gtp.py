import io

from saigo.evaluation import TerritoryEvaluator, UniformRandomEvaluator
from saigo.go import from_gtp
from saigo.gtp import GtpEngine
from saigo.search import SearchConfig


def engine(**kw):
    return GtpEngine(UniformRandomEvaluator(3), SearchConfig(visits=16, seed=3, random_moves=0), 9, 7.5,
                     score_visits=50, **kw)


def test_protocol_version_and_ids():
    e = engine()
    assert e.handle("protocol_version") == "= 2\n\n"
    assert e.handle("12 name") == "=12 saigo\n\n"
    assert e.handle("known_command genmove") == "= true\n\n"
    assert e.handle("known_command frobnicate") == "= false\n\n"
    assert e.handle("# just a comment") is None and e.handle("   ") is None


def test_errors_are_framed_with_a_question_mark():
    e = engine()
    assert e.handle("7 frobnicate").startswith("?7 ")
    assert e.handle("play B Z99").startswith("? ")
    assert e.handle("boardsize 40").startswith("? ")
    assert e.handle("komi 7.3").startswith("? ")
    e.handle("play B D4")
    assert e.handle("play W D4").startswith("? ")


def test_integer_komi_allows_jigo():
    e = engine()
    e.handle("boardsize 7")
    e.handle("komi 7")
    for row in range(1, 8):
        assert e.handle(f"play B D{row}") == "=\n\n"
        assert e.handle(f"play W E{row}") == "=\n\n"
    assert e.handle("final_score") == "= 0\n\n"


def test_genmove_is_reproducible_and_legal():
    a, b = engine(), engine()
    moves = [a.handle("genmove b"), a.handle("genmove w")]
    assert moves == [b.handle("genmove b"), b.handle("genmove w")]
    assert all(m.startswith("= ") for m in moves)
    for reply in moves:
        vertex = reply[2:].strip()
        assert vertex in ("pass", "resign") or from_gtp(vertex, 9) in range(81)


def test_agent_extension_and_score_estimate():
    e = GtpEngine(TerritoryEvaluator(), SearchConfig(visits=16, random_moves=0), 5, 0.5, score_visits=50)
    assert e.handle("sai-agent 1 0.5 0") == "=\n\n"
    assert e.handle("sai-agent 0.2 0.5 0").startswith("? ")
    assert e.handle("sai-params") == "= 0.0000 1.0000 0.3775\n\n"
    assert e.handle("sai-score-est").startswith("= W+0.5")


def test_serve_stops_at_quit():
    out = io.StringIO()
    engine().serve(io.StringIO("name\nquit\nname\n"), out)
    assert out.getvalue() == "= saigo\n\n=\n\n"
