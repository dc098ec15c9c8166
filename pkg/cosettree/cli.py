"""
cosettree — Command-line front end

Design patterns:
  - Command: each sub-command maps to one handler returning a report model
  - Facade: handlers only read files and call cosettree.pipeline

Reports go to stdout as canonical JSON; diagnostics and logs go to stderr.
Exit codes: 0 success, 2 invalid input, 1 internal failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence

from pydantic import BaseModel, ValidationError

from cosettree import __version__, pipeline
from cosettree.config import override_caps, settings
from cosettree.errors import CosetTreeError, InputError, ParseError
from cosettree.tameness.sequences import load_spec
from cosettree.trees.codec import load_profile, load_tree
from cosettree.trees.engine import FrontierMode, LevelTree
from cosettree.trees.witnesses import WitnessSpec

logger = logging.getLogger("cosettree.cli")

LOG_LEVELS = ["debug", "info", "warning", "error", "critical"]


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc


def _tree(path: Optional[str]) -> Optional[LevelTree]:
    return None if path is None else load_tree(_read(path))


def _natural(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {value}")
    return value


# ── Handlers ─────────────────────────────────────────────


def _classify(args: argparse.Namespace) -> BaseModel:
    return pipeline.classify_report(load_spec(_read(args.spec)))


def _analyze(args: argparse.Namespace) -> BaseModel:
    return pipeline.analyze_tree(_tree(args.tree), FrontierMode(args.mode))


def _derivative(args: argparse.Namespace) -> BaseModel:
    return pipeline.derivative_report(_tree(args.tree), FrontierMode(args.mode), args.steps)


def _gamma(args: argparse.Namespace) -> BaseModel:
    return pipeline.gamma_document(_tree(args.tree))


def _phi(args: argparse.Namespace) -> BaseModel:
    return pipeline.phi_report(_tree(args.tree), _tree(args.other), _tree(args.ambient))


def _orbit(args: argparse.Namespace) -> BaseModel:
    return pipeline.orbit_report(_tree(args.tree), _tree(args.other), _tree(args.ambient))


def _witness(args: argparse.Namespace) -> BaseModel:
    profile = None
    if args.profile:
        profile = tuple(tuple(row) for row in load_profile(_read(args.profile)))
    spec = WitnessSpec(p=args.p, dim=args.dim, depth=args.depth, profile=profile)
    return pipeline.witness_report(spec)


def _plan(args: argparse.Namespace) -> BaseModel:
    return pipeline.plan_report(load_spec(_read(args.spec)), args.horizon)


def _hinf(args: argparse.Namespace) -> BaseModel:
    return pipeline.hinf_report(args.n)


def _expr(args: argparse.Namespace) -> BaseModel:
    return pipeline.expr_report(args.text)


def _simplify(args: argparse.Namespace) -> BaseModel:
    return pipeline.simplify_report(args.text)


HANDLERS: Dict[str, Callable[[argparse.Namespace], BaseModel]] = {
    "classify": _classify,
    "analyze-tree": _analyze,
    "derivative": _derivative,
    "gamma": _gamma,
    "phi": _phi,
    "orbit": _orbit,
    "witness": _witness,
    "embed-plan": _plan,
    "hinf": _hinf,
    "expr": _expr,
    "simplify": _simplify,
}


# ── Parser ───────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=_natural, default=None, help="Node and order cap for this run.")
    common.add_argument(
        "--log-level",
        type=str.lower,
        choices=LOG_LEVELS,
        default=settings.log_level,
        help="Logging level (stderr).",
    )

    moded = argparse.ArgumentParser(add_help=False)
    moded.add_argument(
        "--mode",
        choices=[m.value for m in FrontierMode],
        default=settings.default_mode,
        help="closed: nothing exists past the last level; open: last-level nodes extend.",
    )

    parser = argparse.ArgumentParser(prog="cosettree", description="Group and coset trees, tameness and H_inf plans.")
    parser.add_argument("--version", action="version", version=f"cosettree {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="Classify a product or filtration spec.")
    p.add_argument("spec", help="Spec JSON file.")

    p = sub.add_parser("analyze-tree", parents=[common, moded], help="Predicates, height and rank table.")
    p.add_argument("tree", help="Tree JSON file.")

    p = sub.add_parser("derivative", parents=[common, moded], help="Iterated derivatives of a tree.")
    p.add_argument("tree")
    p.add_argument("--steps", type=_natural, default=None, help="Stop after this many derivatives.")

    p = sub.add_parser("gamma", parents=[common], help="Canonical group tree of a coset tree.")
    p.add_argument("tree")

    for name, text in (("phi", "Tree of partial translators."), ("orbit", "Orbit equivalence at full depth.")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("tree")
        p.add_argument("other")
        p.add_argument("--ambient", default=None, help="Ambient group tree (default: full tree).")

    p = sub.add_parser("witness", parents=[common], help="Staircase group tree over Z(p)^D levels.")
    p.add_argument("p", type=int)
    p.add_argument("dim", type=int)
    p.add_argument("depth", type=int)
    p.add_argument("--profile", default=None, help="Profile sidecar JSON.")

    p = sub.add_parser("embed-plan", parents=[common], help="Embedding plan into H_inf.")
    p.add_argument("spec")
    p.add_argument("--horizon", type=_natural, default=settings.default_horizon)

    p = sub.add_parser("hinf", parents=[common], help="The n-th factor of H_inf.")
    p.add_argument("n", type=_natural)

    p = sub.add_parser("expr", parents=[common], help="Normal form and invariants of a group expression.")
    p.add_argument("text")

    p = sub.add_parser("simplify", parents=[common], help="Normal form of a complexity class expression.")
    p.add_argument("text")

    p = sub.add_parser("serve", parents=[common], help="Run the HTTP service.")
    p.add_argument("--host", default=settings.app_host)
    p.add_argument("--port", type=int, default=settings.app_port)
    return parser


def _serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("cosettree.service:app", host=args.host, port=args.port, log_level=args.log_level.lower())
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(),
        stream=sys.stderr,
        format="%(asctime)s [%(levelname)s] %(name)s — %(message)s",
    )
    if args.command == "serve":
        return _serve(args)

    logger.info("command %s", args.command)
    try:
        with override_caps(args.cap):
            doc = HANDLERS[args.command](args)
    except (InputError, ValidationError) as exc:
        print(f"cosettree {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except CosetTreeError as exc:
        print(f"cosettree {args.command}: internal error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        logger.exception("command %s failed", args.command)
        return 1
    sys.stdout.write(pipeline.render(doc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
