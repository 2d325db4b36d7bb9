"""Command-line interface: run, resume, inspect, and export sessions.

Scripted runs (``--answers``) are fully deterministic: the session id is
derived from the inputs and event timestamps come from a logical clock, so the
same question, answer file, and fixture produce byte-identical output anywhere.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from .concepts import normalize_label
from .config import Config, ConfigError, build_oracle, load_config
from .engine import (
    Session,
    is_complete,
    logical_clock,
    pending_assessments,
    snapshot,
    start_session,
    submit_assessment,
)
from .errors import RpktError
from .graph import build_graph, render_dot
from .oracle import FixtureOracle, Oracle
from .path import build_path, explanation_request, render_text
from .store import SessionStore

logger = logging.getLogger(__name__)

MAX_ASSESSMENT_ROUNDS = 10_000


class AnswerScript:
    """Know / don't-know answers keyed by normalized concept label."""

    def __init__(self, answers: dict[str, bool], default: bool | None = None):
        self.answers = {normalize_label(k): bool(v) for k, v in answers.items()}
        self.default = default

    @classmethod
    def from_file(cls, path: str | Path) -> "AnswerScript":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise RpktError(f"cannot read answer file {path}: {exc}") from exc
        if not isinstance(data, dict) or not isinstance(data.get("answers"), dict):
            raise RpktError(f"answer file {path} must contain an 'answers' object")
        default = data.get("default")
        if default is not None and not isinstance(default, bool):
            raise RpktError("answer file 'default' must be true or false")
        return cls(data["answers"], default)

    def answer_for(self, key: str, label: str) -> bool:
        if key in self.answers:
            return self.answers[key]
        if self.default is not None:
            return self.default
        raise RpktError(f"no scripted answer for {label!r} and no default set")

    def fingerprint(self) -> str:
        doc = {"answers": self.answers, "default": self.default}
        return json.dumps(doc, sort_keys=True)


def _deterministic_session_id(question: str, level: str, max_depth: int, script: AnswerScript) -> str:
    material = "\x1f".join([question, level, str(max_depth), script.fingerprint()])
    return hashlib.sha256(material.encode("utf-8")).hexdigest()[:32]


def _drive_scripted(session: Session, oracle: Oracle, script: AnswerScript) -> None:
    """Answer pending assessments from the script until the session completes.

    Pending items are answered in surfacing order; expansion may surface more,
    so loop until quiescent."""
    rounds = 0
    while not is_complete(session):
        rounds += 1
        if rounds > MAX_ASSESSMENT_ROUNDS:
            raise RpktError("assessment loop exceeded its round limit")
        item = pending_assessments(session)[0]
        known = script.answer_for(item.concept.key, item.concept.label)
        submit_assessment(session, item.concept.key, known, oracle)


def _drive_interactive(session: Session, oracle: Oracle, out) -> None:
    """Prompt y/n for each pending concept on stdin."""
    while not is_complete(session):
        item = pending_assessments(session)[0]
        prompt = f"Do you know '{item.concept.label}'? [y/n] "
        while True:
            out.write(prompt)
            out.flush()
            line = sys.stdin.readline()
            if not line:
                raise RpktError("input closed before all concepts were assessed")
            reply = line.strip().lower()
            if reply in ("y", "yes", "n", "no"):
                break
            out.write("Please answer y or n.\n")
        submit_assessment(session, item.concept.key, reply in ("y", "yes"), oracle)


def _resolve_oracle(args, config: Config) -> Oracle:
    if getattr(args, "fixture", None):
        return FixtureOracle.from_file(args.fixture)
    return build_oracle(config)


def _resolve_store(args, config: Config) -> SessionStore:
    store_dir = getattr(args, "store", None) or config.store_dir
    return SessionStore(store_dir)


def _cmd_ask(args, out) -> int:
    config = load_config(args.config)
    oracle = _resolve_oracle(args, config)
    store = _resolve_store(args, config)
    level = args.level or config.education_level
    max_depth = args.max_depth if args.max_depth is not None else config.max_depth

    if args.answers:
        script = AnswerScript.from_file(args.answers)
        session = start_session(
            args.question,
            level,
            oracle,
            max_depth=max_depth,
            session_id=_deterministic_session_id(args.question, level, max_depth, script),
            clock=logical_clock(),
        )
        _drive_scripted(session, oracle, script)
    else:
        session = start_session(args.question, level, oracle, max_depth=max_depth)
        analysis = session.analysis
        out.write(f"Question: {session.question}\n")
        if analysis and analysis.understanding:
            out.write(f"{analysis.understanding}\n")
        out.write("\n")
        _drive_interactive(session, oracle, out)

    store.save(session)
    out.write(f"session: {session.session_id}\n\n")
    out.write(render_text(build_path(session)))
    if args.explain:
        out.write("\n")
        out.write(oracle.generate_explanation(explanation_request(session)))
        out.write("\n")
    return 0


def _cmd_resume(args, out) -> int:
    config = load_config(args.config)
    oracle = _resolve_oracle(args, config)
    store = _resolve_store(args, config)
    session = store.load(args.session_id)
    if is_complete(session):
        out.write("Session is already complete.\n\n")
    elif args.answers:
        _drive_scripted(session, oracle, AnswerScript.from_file(args.answers))
    else:
        _drive_interactive(session, oracle, out)
    store.save(session)
    out.write(render_text(build_path(session)))
    return 0


def _cmd_sessions(args, out) -> int:
    config = load_config(args.config)
    store = _resolve_store(args, config)
    rows = store.list_sessions()
    if not rows:
        out.write("No stored sessions.\n")
        return 0
    for row in rows:
        out.write(
            f"{row['session_id']}  [{row['phase']:<9}]  "
            f"{row['education_level']:<13}  {row['question']}\n"
        )
    return 0


def _cmd_export(args, out) -> int:
    config = load_config(args.config)
    store = _resolve_store(args, config)
    session = store.load(args.session_id)
    if args.format == "path-text":
        content = render_text(build_path(session))
    elif args.format == "path-json":
        content = json.dumps(build_path(session).as_dict(), sort_keys=True, indent=2) + "\n"
    elif args.format == "graph-json":
        content = json.dumps(build_graph(session).as_dict(), sort_keys=True, indent=2) + "\n"
    elif args.format == "dot":
        content = render_dot(build_graph(session))
    elif args.format == "session-json":
        content = json.dumps(snapshot(session), sort_keys=True, indent=2) + "\n"
    else:
        raise RpktError(f"unknown export format {args.format!r}")
    if args.output:
        Path(args.output).write_text(content, encoding="utf-8")
    else:
        out.write(content)
    return 0


def _cmd_explain(args, out) -> int:
    config = load_config(args.config)
    oracle = _resolve_oracle(args, config)
    store = _resolve_store(args, config)
    session = store.load(args.session_id)
    if len(session.status) == 0:
        raise RpktError("no assessments yet: explanations need at least one answer")
    out.write(oracle.generate_explanation(explanation_request(session)))
    out.write("\n")
    return 0


def _cmd_serve(args, out) -> int:
    import uvicorn

    from .api import create_app

    config = load_config(args.config)
    host = args.host or config.api.host
    port = args.port if args.port is not None else config.api.port
    uvicorn.run(create_app(config), host=host, port=port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rpkt", description="trace the prerequisites behind a question"
    )
    # accepted both before and after the subcommand; SUPPRESS keeps the
    # subparser from clobbering a value parsed at the top level
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument(
        "--config", default=argparse.SUPPRESS, help="path to a YAML config file"
    )
    parser.add_argument("--config", default=None, help="path to a YAML config file")
    sub = parser.add_subparsers(dest="command", required=True)

    ask = sub.add_parser("ask", help="start a session for a question", parents=[shared])
    ask.add_argument("question")
    ask.add_argument("--level", default=None, help="education level")
    ask.add_argument("--max-depth", type=int, default=None)
    ask.add_argument("--fixture", default=None, help="run against a fixture oracle file")
    ask.add_argument("--store", default=None, help="session directory")
    ask.add_argument("--answers", default=None, help="JSON answer file for scripted runs")
    ask.add_argument("--explain", action="store_true", help="print an explanation at the end")
    ask.set_defaults(func=_cmd_ask)

    resume = sub.add_parser("resume", help="continue a stored session", parents=[shared])
    resume.add_argument("session_id")
    resume.add_argument("--fixture", default=None)
    resume.add_argument("--store", default=None)
    resume.add_argument("--answers", default=None)
    resume.set_defaults(func=_cmd_resume)

    sessions = sub.add_parser("sessions", help="list stored sessions", parents=[shared])
    sessions.add_argument("--store", default=None)
    sessions.set_defaults(func=_cmd_sessions)

    export = sub.add_parser(
        "export", help="print a stored session as text, JSON, or DOT", parents=[shared]
    )
    export.add_argument("session_id")
    export.add_argument(
        "--format",
        choices=["path-text", "path-json", "graph-json", "dot", "session-json"],
        default="path-text",
    )
    export.add_argument("--output", default=None)
    export.add_argument("--store", default=None)
    export.set_defaults(func=_cmd_export)

    explain = sub.add_parser(
        "explain", help="generate an explanation for a stored session", parents=[shared]
    )
    explain.add_argument("session_id")
    explain.add_argument("--fixture", default=None)
    explain.add_argument("--store", default=None)
    explain.set_defaults(func=_cmd_explain)

    serve = sub.add_parser("serve", help="run the HTTP service", parents=[shared])
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except (RpktError, ConfigError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
