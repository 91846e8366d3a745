"""Command-line entry point: ``saigo <subcommand> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .evaluation import make_evaluator
from .go import tromp_taylor_score
from .gtp import GtpEngine
from .match import MatchSpec, PositionalHandicap, ScoreHandicap, SearchEngine, run_handicap_ladder, run_match, write_match
from .rating import Disconnected, MatchSet, fit
from .search import SearchConfig, estimate_score
from .selfplay import export_chunk, run_generation
from .sgf import SgfError, loads as load_sgf
from .value import AgentConfig

log = logging.getLogger("saigo")


class CliError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("engine")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--visits", type=int, default=800)
    g.add_argument("--lambda", dest="lam", type=float, default=0.0)
    g.add_argument("--mu", type=float, default=0.0)
    g.add_argument("--threshold", type=float, default=0.0)
    g.add_argument("--komi", type=float, default=7.5)
    g.add_argument("--board-size", type=int, default=9)
    g.add_argument("--weights")
    g.add_argument("--evaluator", choices=["net", "uniform-random", "territory", "oracle"], default=None,
                   help="defaults to net when --weights is given, territory otherwise")
    g.add_argument("--beta", type=float, default=1.0, help="slope used by the territory evaluator")
    g.add_argument("--noise", type=float, default=0.0, help="alpha noise of the territory evaluator")
    g.add_argument("--random-moves", type=int, default=None)
    g.add_argument("--resign", type=float, default=0.05, help="resignation winrate threshold")
    g.add_argument("-v", "--verbose", action="store_true")


def _opponent(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("opponent")
    g.add_argument("--opp-evaluator", choices=["net", "uniform-random", "territory", "oracle"], default=None)
    g.add_argument("--opp-weights")
    g.add_argument("--opp-visits", type=int, default=None)
    g.add_argument("--opp-lambda", type=float, default=0.0)
    g.add_argument("--opp-mu", type=float, default=0.0)
    g.add_argument("--opp-threshold", type=float, default=0.0)
    g.add_argument("--games", type=int, default=100)
    g.add_argument("--colors", choices=["alternate", "black", "white"], default="alternate")
    g.add_argument("--handicap-stones", type=int, default=0)
    g.add_argument("--max-moves", type=int, default=None)
    g.add_argument("--out", help="directory for SGF files, summary.csv and manifest.txt")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="saigo", description="Go engine with score-aware value heads")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gtp", help="serve GTP on stdin/stdout")
    _common(p)

    p = sub.add_parser("selfplay", help="generate self-play games and training chunks")
    _common(p)
    p.add_argument("--games", type=int, default=2000)
    p.add_argument("--max-moves", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("match", help="play a match between two engines")
    _common(p)
    _opponent(p)
    p.add_argument("--malus", type=float, default=None, help="score handicap relative to komi 7.5")

    p = sub.add_parser("ladder", help="score-handicap ladder")
    _common(p)
    _opponent(p)
    p.add_argument("--malus-list", default="0,2,4,6,8")
    p.add_argument("--adaptive", action="store_true", help="win: +2 malus, loss: swap colours")

    p = sub.add_parser("rate", help="fit Elo ratings from a match CSV")
    p.add_argument("matches", help="CSV with first,second,wins,draws,losses")
    p.add_argument("--anchor")
    p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("score", help="estimate the score of an SGF position")
    _common(p)
    p.add_argument("sgf")
    p.add_argument("--score-visits", type=int, default=1000)

    p = sub.add_parser("sgf", help="validate an SGF file and print it re-serialised")
    p.add_argument("sgf")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _evaluator(kind, weights, args):
    if kind is None:
        kind = "net" if weights else "territory"
    return make_evaluator(kind, seed=args.seed, beta=args.beta, noise=args.noise, weights=weights)


def _config(args, visits=None, agent=None) -> SearchConfig:
    kw = {}
    if args.random_moves is not None:
        kw["random_moves"] = args.random_moves
    return SearchConfig(visits=visits or args.visits, seed=args.seed, resign_threshold=args.resign,
                        agent=agent or AgentConfig(args.lam, args.mu, args.threshold), **kw)


def _match_spec(args) -> MatchSpec:
    focal = SearchEngine(_evaluator(args.evaluator, args.weights, args), _config(args), "focal")
    opp_cfg = _config(args, args.opp_visits, AgentConfig(args.opp_lambda, args.opp_mu, args.opp_threshold))
    opp = SearchEngine(_evaluator(args.opp_evaluator, args.opp_weights, args), opp_cfg, "opponent")
    handicap = None
    if args.handicap_stones:
        handicap = PositionalHandicap(args.handicap_stones)
    elif getattr(args, "malus", None) is not None:
        handicap = ScoreHandicap(args.malus)
    return MatchSpec(focal, opp, games=args.games, komi=args.komi, colors=args.colors, handicap=handicap,
                     seed=args.seed, size=args.board_size, max_moves=args.max_moves)


def cmd_gtp(args) -> int:
    engine = GtpEngine(_evaluator(args.evaluator, args.weights, args), _config(args), args.board_size, args.komi)
    engine.serve()
    return 0


def cmd_selfplay(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = []
    sgfs = []
    for game in run_generation(_evaluator(args.evaluator, args.weights, args), _config(args), args.games,
                               size=args.board_size, master_seed=args.seed, max_moves=args.max_moves):
        records.extend(game.records)
        sgfs.append(game.sgf())
    (out / "chunk-0000.said").write_bytes(export_chunk(records))
    (out / "games.sgf").write_text("".join(sgfs))
    print(f"{len(sgfs)} games, {len(records)} records, {sum(r.included for r in records)} included")
    return 0


def cmd_match(args) -> int:
    spec = _match_spec(args)
    report = run_match(spec, args.out)
    print(report.describe())
    return 0


def cmd_ladder(args) -> int:
    spec = _match_spec(args)
    try:
        malus = [float(x) for x in args.malus_list.split(",") if x.strip()]
    except ValueError:
        raise CliError(f"bad malus list {args.malus_list!r}") from None
    reports = run_handicap_ladder(spec, malus, adaptive=args.adaptive)
    for i, r in enumerate(reports):
        if args.adaptive:
            g = r.games[0]
            print(f"game {i}: focal {'B' if g.focal_color == 1 else 'W'} komi {g.komi:g} "
                  f"{'void' if g.void else g.result.sgf()}")
        else:
            print(f"malus {malus[i]:g}: {r.describe()}")
        if args.out:
            write_match(spec, r, Path(args.out) / f"step-{i:03d}")
    return 0


def cmd_rate(args) -> int:
    ms = MatchSet.read_csv(Path(args.matches).read_text())
    try:
        ratings = fit(ms, args.anchor)
    except Disconnected as exc:
        raise CliError(str(exc)) from None
    sys.stdout.write(ratings.to_csv(ms.games()))
    if ratings.clamped:
        log.warning("ratings clamped: %s", ", ".join(sorted(ratings.clamped)))
    return 0


def _read_sgf(path: str):
    try:
        return load_sgf(Path(path).read_text())
    except OSError as exc:
        raise CliError(str(exc)) from None


def cmd_score(args) -> int:
    game = _read_sgf(args.sgf)
    pos = game.replay()
    if pos.size != args.board_size:
        args.board_size = pos.size
    est = estimate_score(pos, _evaluator(args.evaluator, args.weights, args), args.score_visits, seed=args.seed)
    exact = tromp_taylor_score(pos)
    print(f"estimate {_fmt(est)} tromp-taylor {_fmt(exact)}")
    return 0


def _fmt(score: float) -> str:
    if score == 0:
        return "0"
    return f"{'B' if score > 0 else 'W'}+{abs(score):g}"


def cmd_sgf(args) -> int:
    text = Path(args.sgf).read_text()
    game = load_sgf(text)
    game.replay()
    again = game.dumps()
    if load_sgf(again).dumps() != again:
        raise CliError("SGF does not round-trip")
    sys.stdout.write(again)
    return 0


COMMANDS = {"gtp": cmd_gtp, "selfplay": cmd_selfplay, "match": cmd_match, "ladder": cmd_ladder,
            "rate": cmd_rate, "score": cmd_score, "sgf": cmd_sgf}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (CliError, SgfError, ValueError, OSError) as exc:
        print(f"saigo {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
