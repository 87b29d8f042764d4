"""Command-line front end.

Exit codes are stable across subcommands:
    0  success
    1  lint findings at or above the --fail-on severity
    2  parse or configuration error
    3  unknown entity (requirement, release, development, ...)
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .dataset import DEFAULT_MIN_TOKENS, extract_all, extract_release_dataset, write_datasets
from .errors import RegistryError, SpecError, UnknownDevelopmentError, UnknownReleaseError
from .generator import generate_corpus, write_corpus
from .index import (
    SpecIndex,
    build_index,
    index_from_json,
    index_to_json,
    query_behavior,
    query_deployment,
    query_dev_changes,
    query_release_diff,
    query_requirements,
)
from .lexicon import Lexicon, build_lexicon, load_lexicon
from .lint import LintConfig, Severity, lint_corpus
from .model import DeploymentType, DevelopmentRegistry, ReleaseId, SpecDocument
from .parser import load_registry, parse_document, validate_corpus
from .resolver import BehaviorDiff, DiffKind, materialize

CONFIG_ENV_VAR = "SPECKIT_CONFIG"

EXIT_OK = 0
EXIT_LINT = 1
EXIT_PARSE = 2
EXIT_UNKNOWN = 3


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _check_paths(*paths: Optional[str]) -> Optional[str]:
    for p in paths:
        if p is not None and not Path(p).exists():
            return p
    return None


def _load_corpus(paths: Sequence[str]) -> tuple[list[SpecDocument], list]:
    docs = []
    errors = []
    for p in paths:
        name = Path(p).stem
        result = parse_document(Path(p).read_text(encoding="utf-8"), name=name)
        docs.append(result.document)
        for err in result.errors:
            errors.append(
                err if err.document else type(err)(err.kind, err.line, err.message, name)
            )
    return docs, errors


def _load_inputs(
    args: argparse.Namespace,
) -> tuple[list[SpecDocument], DevelopmentRegistry, Lexicon, list]:
    missing = _check_paths(*args.corpus, args.registry, getattr(args, "lexicon", None))
    if missing:
        raise FileNotFoundError(missing)
    docs, errors = _load_corpus(args.corpus)
    registry = load_registry(Path(args.registry).read_text(encoding="utf-8"))
    lexicon_path = getattr(args, "lexicon", None)
    if lexicon_path:
        lexicon = load_lexicon(Path(lexicon_path).read_text(encoding="utf-8"))
    else:
        lexicon = build_lexicon({})
    return docs, registry, lexicon, errors


def _parse_release(text: str) -> ReleaseId:
    return ReleaseId.parse(text)


def _parse_deployment(text: str) -> Optional[DeploymentType]:
    if text == "both":
        return None
    return DeploymentType(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        docs, registry, _, errors = _load_inputs(args)
    except FileNotFoundError as exc:
        return _fail(EXIT_PARSE, f"no such file: {exc}")
    except RegistryError as exc:
        return _fail(EXIT_PARSE, f"registry: {exc}")
    errors.extend(validate_corpus(docs, registry))
    for err in errors:
        print(err)
    if errors:
        print(f"{len(errors)} error(s)", file=sys.stderr)
        return EXIT_PARSE
    total = sum(1 for doc in docs for _ in doc.iter_requirements())
    print(f"OK: {len(docs)} document(s), {total} requirement(s)")
    return EXIT_OK


def cmd_resolve(args: argparse.Namespace) -> int:
    try:
        docs, registry, _, errors = _load_inputs(args)
    except FileNotFoundError as exc:
        return _fail(EXIT_PARSE, f"no such file: {exc}")
    except RegistryError as exc:
        return _fail(EXIT_PARSE, f"registry: {exc}")
    if errors:
        for err in errors:
            print(err, file=sys.stderr)
        return EXIT_PARSE
    try:
        release = _parse_release(args.release)
    except ValueError as exc:
        return _fail(EXIT_PARSE, str(exc))
    dep = _parse_deployment(args.deployment)

    req = next(
        (r for doc in docs for r in doc.iter_requirements() if r.id == args.id), None
    )
    if req is None:
        return _fail(EXIT_UNKNOWN, f"unknown requirement id: {args.id}")
    try:
        resolved = materialize(req, release, dep, registry)
    except UnknownDevelopmentError as exc:
        return _fail(EXIT_UNKNOWN, str(exc))
    if resolved is None:
        return _fail(EXIT_UNKNOWN, f"{args.id} is not valid at release {release}")
    if args.format == "json":
        print(
            json.dumps(
                {
                    "id": resolved.id,
                    "release": str(resolved.release),
                    "deployment": resolved.deployment.value if resolved.deployment else "both",
                    "text": resolved.text,
                    "contributing_devs": sorted(resolved.contributing_devs),
                },
                sort_keys=True,
                ensure_ascii=False,
            )
        )
    else:
        print(resolved.text)
    return EXIT_OK


def _load_lint_config(args: argparse.Namespace) -> LintConfig:
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if not config_path:
        return LintConfig()
    path = Path(config_path)
    if not path.exists():
        raise FileNotFoundError(config_path)
    return LintConfig.from_json(path.read_text(encoding="utf-8"))


def cmd_lint(args: argparse.Namespace) -> int:
    try:
        config = _load_lint_config(args)
    except FileNotFoundError as exc:
        return _fail(EXIT_PARSE, f"no such config file: {exc}")
    except (ValueError, json.JSONDecodeError) as exc:
        return _fail(EXIT_PARSE, f"config: {exc}")
    try:
        docs, registry, lexicon, errors = _load_inputs(args)
    except FileNotFoundError as exc:
        return _fail(EXIT_PARSE, f"no such file: {exc}")
    except RegistryError as exc:
        return _fail(EXIT_PARSE, f"registry: {exc}")
    except (ValueError, SpecError) as exc:
        return _fail(EXIT_PARSE, f"lexicon: {exc}")
    errors.extend(validate_corpus(docs, registry))
    if errors:
        for err in errors:
            print(err, file=sys.stderr)
        return EXIT_PARSE

    findings = lint_corpus(docs, registry, lexicon, config)
    if args.format == "json":
        for finding in findings:
            print(json.dumps(finding.to_dict(), sort_keys=True, ensure_ascii=False))
    else:
        for finding in findings:
            loc = finding.location
            where = f"{loc.document}:{loc.requirement}"
            if loc.version:
                where += f"@{loc.version}"
            print(f"{finding.severity.value:6} {finding.rule.value:19} {where}: {finding.message}")
        print(f"{len(findings)} finding(s)", file=sys.stderr)

    if args.fail_on == "none":
        return EXIT_OK
    threshold = Severity(args.fail_on.capitalize())
    if any(f.severity.rank >= threshold.rank for f in findings):
        return EXIT_LINT
    return EXIT_OK


def cmd_index_build(args: argparse.Namespace) -> int:
    try:
        docs, registry, lexicon, errors = _load_inputs(args)
    except FileNotFoundError as exc:
        return _fail(EXIT_PARSE, f"no such file: {exc}")
    except RegistryError as exc:
        return _fail(EXIT_PARSE, f"registry: {exc}")
    except (ValueError, SpecError) as exc:
        return _fail(EXIT_PARSE, f"lexicon: {exc}")
    errors.extend(validate_corpus(docs, registry))
    if errors:
        for err in errors:
            print(err, file=sys.stderr)
        return EXIT_PARSE
    index = build_index(docs, registry, lexicon)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(index_to_json(index), encoding="utf-8")
    print(f"index written to {out}")
    return EXIT_OK


def _obtain_index(args: argparse.Namespace) -> SpecIndex:
    if args.index:
        path = Path(args.index)
        if not path.exists():
            raise FileNotFoundError(args.index)
        return index_from_json(path.read_text(encoding="utf-8"))
    if not args.corpus or not args.registry:
        raise ValueError("provide --index or --corpus/--registry (plus --lexicon)")
    docs, registry, lexicon, errors = _load_inputs(args)
    errors.extend(validate_corpus(docs, registry))
    if errors:
        raise ValueError("; ".join(str(e) for e in errors))
    return build_index(docs, registry, lexicon)


def _print_entries(entries: list[tuple[str, str]], release: str, fmt: str, deployment: str = "both") -> None:
    if fmt == "json":
        for req_id, text in entries:
            print(
                json.dumps(
                    {"id": req_id, "release": release, "deployment": deployment, "text": text},
                    sort_keys=True,
                    ensure_ascii=False,
                )
            )
    else:
        for req_id, text in entries:
            print(f"{req_id}: {text}")


def _print_diffs(diffs: list[BehaviorDiff], fmt: str) -> None:
    if fmt == "json":
        for diff in diffs:
            print(
                json.dumps(
                    {
                        "id": diff.id,
                        "release_a": str(diff.release_a),
                        "release_b": str(diff.release_b),
                        "segments": [[s.kind.value, s.text] for s in diff.segments],
                        "causes": sorted(diff.causes),
                    },
                    sort_keys=True,
                    ensure_ascii=False,
                )
            )
    else:
        marks = {DiffKind.ADDED: "+", DiffKind.REMOVED: "-", DiffKind.UNCHANGED: "="}
        for diff in diffs:
            causes = f" causes: {', '.join(sorted(diff.causes))}" if diff.causes else ""
            print(f"{diff.id} {diff.release_a} -> {diff.release_b}{causes}")
            for seg in diff.segments:
                print(f"  {marks[seg.kind]} {seg.text}")


def cmd_query(args: argparse.Namespace) -> int:
    try:
        index = _obtain_index(args)
    except FileNotFoundError as exc:
        return _fail(EXIT_PARSE, f"no such file: {exc}")
    except RegistryError as exc:
        return _fail(EXIT_PARSE, f"registry: {exc}")
    except ValueError as exc:
        return _fail(EXIT_PARSE, str(exc))

    try:
        if args.form == "behavior":
            release = _parse_release(args.release)
            entries = query_behavior(index, args.proc, release)
            _print_entries(entries, str(release), args.format)
        elif args.form == "diff":
            a = _parse_release(args.release_from)
            b = _parse_release(args.release_to)
            _print_diffs(query_release_diff(index, args.proc, a, b), args.format)
        elif args.form == "dev":
            _print_diffs(query_dev_changes(index, args.proc, args.dev), args.format)
        elif args.form == "reqs":
            ids = sorted(query_requirements(index, args.proc))
            if args.format == "json":
                print(
                    json.dumps(
                        {"procedure": args.proc, "requirements": ids},
                        sort_keys=True,
                        ensure_ascii=False,
                    )
                )
            else:
                for req_id in ids:
                    print(req_id)
        else:  # deployment
            dep = DeploymentType(args.deployment)
            release = _parse_release(args.release) if args.release else None
            entries = query_deployment(index, args.proc, dep, release)
            shown = str(release) if release else str(index.latest_release())
            _print_entries(entries, shown, args.format, deployment=dep.value)
    except (UnknownReleaseError, UnknownDevelopmentError) as exc:
        return _fail(EXIT_UNKNOWN, str(exc))
    except ValueError as exc:
        return _fail(EXIT_PARSE, str(exc))
    return EXIT_OK


def cmd_extract(args: argparse.Namespace) -> int:
    try:
        docs, registry, _, errors = _load_inputs(args)
    except FileNotFoundError as exc:
        return _fail(EXIT_PARSE, f"no such file: {exc}")
    except RegistryError as exc:
        return _fail(EXIT_PARSE, f"registry: {exc}")
    errors.extend(validate_corpus(docs, registry))
    if errors:
        for err in errors:
            print(err, file=sys.stderr)
        return EXIT_PARSE
    out_dir = Path(args.out)
    try:
        if args.all:
            datasets = extract_all(docs, registry, args.min_tokens)
        else:
            release = _parse_release(args.release)
            datasets = [extract_release_dataset(docs, release, registry, args.min_tokens)]
    except UnknownReleaseError as exc:
        return _fail(EXIT_UNKNOWN, str(exc))
    except ValueError as exc:
        return _fail(EXIT_PARSE, str(exc))
    written = write_datasets(datasets, out_dir)
    for path in written:
        print(path)
    return EXIT_OK


def cmd_gen_corpus(args: argparse.Namespace) -> int:
    try:
        bundle = generate_corpus(
            seed=args.seed,
            size=args.size,
            dup_pairs=args.dup_pairs,
            overlength=args.overlength,
            alias_usages=args.alias_usages,
            dispersed_procs=args.dispersed,
        )
    except ValueError as exc:
        return _fail(EXIT_PARSE, str(exc))
    written = write_corpus(bundle, Path(args.out))
    for path in written:
        print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_corpus_args(sub: argparse.ArgumentParser, required: bool = True) -> None:
    sub.add_argument("--corpus", nargs="+", required=required, metavar="FILE",
                     help=".spec corpus files")
    sub.add_argument("--registry", required=required, metavar="FILE",
                     help="development registry file")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speckit",
        description="Parse, release-resolve, lint, extract and query "
        "internal specification corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and cross-validate a corpus")
    _add_corpus_args(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("resolve", help="print a requirement's text at a release")
    _add_corpus_args(p)
    p.add_argument("--id", required=True, help="requirement id")
    p.add_argument("--release", required=True, help="release, e.g. 01R2")
    p.add_argument("--deployment", choices=["SA", "NSA", "both"], default="both")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("lint", help="report corpus defects")
    _add_corpus_args(p)
    p.add_argument("--lexicon", metavar="FILE", help="procedure lexicon (JSON)")
    p.add_argument("--config", metavar="FILE",
                   help=f"lint config (JSON); default from ${CONFIG_ENV_VAR}")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--fail-on", dest="fail_on",
                   choices=["high", "medium", "low", "none"], default="high")
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("index", help="index operations")
    index_sub = p.add_subparsers(dest="index_command", required=True)
    pb = index_sub.add_parser("build", help="build and persist the query index")
    _add_corpus_args(pb)
    pb.add_argument("--lexicon", metavar="FILE")
    pb.add_argument("--out", required=True, metavar="FILE", help="output index file")
    pb.set_defaults(func=cmd_index_build)

    p = sub.add_parser("query", help="query a built (or buildable) index")
    query_sub = p.add_subparsers(dest="form", required=True)

    def add_query_common(q: argparse.ArgumentParser) -> None:
        q.add_argument("--index", metavar="FILE", help="index file from `index build`")
        _add_corpus_args(q, required=False)
        q.add_argument("--lexicon", metavar="FILE")
        q.add_argument("--proc", required=True, help="procedure name or alias")
        q.add_argument("--format", choices=["text", "json"], default="text")

    q = query_sub.add_parser("behavior", help="how does a procedure behave in a release")
    add_query_common(q)
    q.add_argument("--release", required=True)
    q.set_defaults(func=cmd_query)

    q = query_sub.add_parser("diff", help="behavior difference between two releases")
    add_query_common(q)
    q.add_argument("--from", dest="release_from", required=True)
    q.add_argument("--to", dest="release_to", required=True)
    q.set_defaults(func=cmd_query)

    q = query_sub.add_parser("dev", help="changes introduced by a development")
    add_query_common(q)
    q.add_argument("--dev", required=True, help="development id, e.g. CB000001")
    q.set_defaults(func=cmd_query)

    q = query_sub.add_parser("reqs", help="requirements related to a procedure")
    add_query_common(q)
    q.set_defaults(func=cmd_query)

    q = query_sub.add_parser("deployment", help="behavior for SA or NSA")
    add_query_common(q)
    q.add_argument("--deployment", choices=["SA", "NSA"], required=True)
    q.add_argument("--release", help="narrow to one release (default: latest)")
    q.set_defaults(func=cmd_query)

    p = sub.add_parser("extract", help="write per-release raw datasets")
    _add_corpus_args(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--release", help="extract one release")
    group.add_argument("--all", action="store_true", help="extract every release")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--min-tokens", dest="min_tokens", type=int, default=DEFAULT_MIN_TOKENS,
                   help="drop records shorter than this many tokens")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("gen-corpus", help="generate a synthetic corpus with ground truth")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--size", type=int, default=200)
    p.add_argument("--dup-pairs", dest="dup_pairs", type=int, default=10)
    p.add_argument("--overlength", type=int, default=8)
    p.add_argument("--alias-usages", dest="alias_usages", type=int, default=12)
    p.add_argument("--dispersed", type=int, default=3)
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_gen_corpus)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
