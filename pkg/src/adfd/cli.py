"""Command-line front end.

Exit codes: 0 success, 1 usage or I/O failure, 2 validation failure,
3 matches found (only with ``--fail-on-match``).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from . import __version__
from .catalog import analyze, check_rule, dump_json, load_catalog, report_to_text
from .conformance import validate_diagram
from .errors import CatalogError, DiagramError, DocumentError, ModelNotConforming, SpecificationError
from .flows import ELEMENT_UNIQUE, MODES
from .model import load_diagram, load_specification
from .schemas import validate_document

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_MATCHES = 3


@dataclass
class RunConfig:
    command: str
    spec: Optional[str] = None
    model: Optional[str] = None
    rules: Optional[str] = None
    out: Optional[str] = None
    format: str = "text"
    flow_uniqueness: str = ELEMENT_UNIQUE
    fail_on_match: bool = False
    jobs: int = 1


class _Loaded:
    """A JSON document together with the digest of its raw bytes."""

    def __init__(self, path: str):
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except OSError as err:
            raise DocumentError("IO_ERROR", f"cannot read {path}: {err.strerror or err}") from None
        try:
            self.document = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as err:
            raise DocumentError("INVALID_JSON", f"{path}: {err}") from None
        self.digest = "sha256:" + hashlib.sha256(raw).hexdigest()


def _emit(cfg: RunConfig, text: str, structured) -> None:
    payload = dump_json(structured) if cfg.format == "structured" else text
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _violations_doc(ok: bool, violations) -> dict:
    return {"ok": ok, "violations": [v.to_json() for v in violations]}


def _spec(cfg: RunConfig):
    return load_specification(_Loaded(cfg.spec).document)


def cmd_validate_spec(cfg: RunConfig) -> int:
    try:
        loaded = _Loaded(cfg.spec)
        validate_document(loaded.document, "specification")
    except DocumentError as err:
        return _fail(str(err), EXIT_IO)
    try:
        load_specification(loaded.document)
    except SpecificationError as err:
        problems = getattr(err, "problems", None) or [(err.code, err.message)]
        lines = [f"error {code}: {msg}" for code, msg in problems]
        _emit(cfg, "\n".join(lines) + "\n",
              {"ok": False, "violations": [{"code": c, "subject": cfg.spec, "message": m} for c, m in problems]})
        return EXIT_INVALID
    _emit(cfg, f"{cfg.spec}: specification is valid\n", _violations_doc(True, []))
    return EXIT_OK


def cmd_validate_model(cfg: RunConfig) -> int:
    try:
        spec = _spec(cfg)
        model = _Loaded(cfg.model)
        validate_document(model.document, "model")
    except DocumentError as err:
        return _fail(str(err), EXIT_IO)
    except SpecificationError as err:
        return _fail(f"specification: {err}", EXIT_INVALID)
    try:
        diagram = load_diagram(model.document, spec)
    except DiagramError as err:
        _emit(cfg, f"error {err.code}: {err.message}\n",
              {"ok": False, "violations": [{"code": err.code, "subject": cfg.model, "message": err.message}]})
        return EXIT_INVALID
    found = validate_diagram(diagram, spec, warnings=True)
    errors = [v for v in found if v.severity == "error"]
    lines = [f"{v}  (violates: {v.condition})" for v in found]
    if not errors:
        lines.append(f"{cfg.model}: model conforms")
    _emit(cfg, "\n".join(lines) + "\n", _violations_doc(not errors, found))
    return EXIT_INVALID if errors else EXIT_OK


def cmd_check_rules(cfg: RunConfig) -> int:
    try:
        spec = _spec(cfg)
        rules = load_catalog(_Loaded(cfg.rules).document)
    except DocumentError as err:
        return _fail(str(err), EXIT_IO)
    except (SpecificationError, CatalogError) as err:
        return _fail(str(err), EXIT_INVALID)
    lines, entries, failed = [], [], False
    for rule in sorted(rules, key=lambda r: r.id):
        _, problems = check_rule(rule, spec)
        failed = failed or bool(problems)
        lines.append(f"{'FAIL' if problems else 'PASS'} {rule.id} {rule.title}")
        for v in problems:
            where = f" at byte {v.offset}" if v.offset is not None else ""
            lines.append(f"  {v.code}{where}: {v.message}")
        entries.append({"id": rule.id, "ok": not problems, "violations": [v.to_json() for v in problems]})
    _emit(cfg, "\n".join(lines) + "\n", {"ok": not failed, "rules": entries})
    return EXIT_INVALID if failed else EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    try:
        spec_file = _Loaded(cfg.spec)
        spec = load_specification(spec_file.document)
        model = _Loaded(cfg.model)
        catalog_file = _Loaded(cfg.rules)
        rules = load_catalog(catalog_file.document)
        diagram = load_diagram(model.document, spec)
    except DocumentError as err:
        return _fail(str(err), EXIT_IO)
    except (SpecificationError, CatalogError, DiagramError) as err:
        return _fail(str(err), EXIT_INVALID)
    digests = {"spec": spec_file.digest, "model": model.digest, "catalog": catalog_file.digest}
    try:
        report = analyze(diagram, spec, rules, cfg.flow_uniqueness, cfg.jobs, digests)
    except ModelNotConforming as err:
        for v in err.violations:
            print(f"{v}  (violates: {v.condition})", file=sys.stderr)
        return _fail("model does not conform to the specification; analysis refused", EXIT_INVALID)
    _emit(cfg, report_to_text(report), report.to_json())
    if cfg.fail_on_match and report.matched:
        return EXIT_MATCHES
    return EXIT_OK


COMMANDS = {
    "validate-spec": cmd_validate_spec,
    "validate-model": cmd_validate_model,
    "check-rules": cmd_check_rules,
    "analyze": cmd_analyze,
}

_NEEDS = {
    "validate-spec": ("spec",),
    "validate-model": ("spec", "model"),
    "check-rules": ("spec", "rules"),
    "analyze": ("spec", "model", "rules"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adfd", description="Rule-based threat analysis of data-flow diagrams.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs in _NEEDS.items():
        p = sub.add_parser(name)
        for item in needs:
            p.add_argument(f"--{item}", required=True, metavar="FILE")
        p.add_argument("--out", metavar="FILE", help="write output here instead of stdout")
        p.add_argument("--format", choices=("text", "structured"), default="text")
        if name == "analyze":
            p.add_argument("--flow-uniqueness", choices=MODES, default=ELEMENT_UNIQUE)
            p.add_argument("--fail-on-match", action="store_true")
            p.add_argument("--jobs", type=int, default=1, help="rules evaluated in parallel")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; usage problems are exit 1 here
        return EXIT_OK if exc.code == 0 else EXIT_IO
    cfg = RunConfig(
        command=args.command,
        spec=getattr(args, "spec", None),
        model=getattr(args, "model", None),
        rules=getattr(args, "rules", None),
        out=args.out,
        format=args.format,
        flow_uniqueness=getattr(args, "flow_uniqueness", ELEMENT_UNIQUE),
        fail_on_match=getattr(args, "fail_on_match", False),
        jobs=max(1, getattr(args, "jobs", 1)),
    )
    try:
        return COMMANDS[cfg.command](cfg)
    except OSError as err:
        return _fail(str(err), EXIT_IO)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
