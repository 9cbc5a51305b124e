"""Command-line entry point: crawl, discover, recrawl, compare, serve.

Exit codes: 0 success, 1 fatal or usage error, 2 partial crawl failure.
Stdout carries data; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import logging
import re
import socket
import sys
import traceback
from pathlib import Path

from . import crawler, server
from .datastore import format_real, read_csv
from .errors import FatalAuthError, PestoError
from .evaluation import (
    ComparisonResult,
    comparison_to_dict,
    load_bundled_model,
    load_model,
    render_comparison_json,
    score_overall,
)
from .github_client import CrawlBudget, resolve_credentials, validate_repo_name

logger = logging.getLogger(__name__)

_STARS_RE = re.compile(r"^(\d+)\.\.(\d+)?$")


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit 1 (2 means partial crawl)."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"pesto: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_repo(value: str) -> tuple[str, str]:
    owner, sep, name = value.partition("/")
    if not sep:
        raise ValueError(f"expected owner/name, got {value!r}")
    validate_repo_name(owner, name)
    return owner, name


def _repo_argument(value: str):
    """--repo value: an owner/name pair, or '-' deferring to stdin."""
    if value == "-":
        return "-"
    try:
        return _parse_repo(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _parse_stars(value: str) -> tuple[int, int | None]:
    match = _STARS_RE.match(value)
    if not match:
        raise argparse.ArgumentTypeError(
            f"expected MIN..MAX (e.g. 100..5000 or 100..), got {value!r}"
        )
    min_stars = int(match.group(1))
    max_stars = int(match.group(2)) if match.group(2) else None
    return min_stars, max_stars


def _budget_from_args(args: argparse.Namespace) -> CrawlBudget:
    return CrawlBudget(
        max_requests=args.max_requests,
        max_issue_sample=getattr(args, "max_issues", 500),
    )


def _add_network_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--token",
        help="GitHub personal access token (falls back to $GITHUB_TOKEN)",
    )
    parser.add_argument(
        "--max-requests",
        type=int,
        default=500,
        metavar="N",
        help="API request ceiling for this session (default 500)",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="pesto", description=__doc__)
    parser.add_argument(
        "--verbose", action="store_true", help="debug logging and stack traces"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    crawl = commands.add_parser("crawl", help="crawl repositories into a CSV")
    crawl.add_argument(
        "--repo",
        action="append",
        required=True,
        type=_repo_argument,
        metavar="OWNER/NAME",
        help="repository to crawl (repeatable; '-' reads names from stdin)",
    )
    crawl.add_argument("--out", default="data.csv", metavar="CSV")
    crawl.add_argument(
        "--max-issues",
        type=int,
        default=500,
        metavar="N",
        help="newest-first issue sample cap per repository (default 500)",
    )
    _add_network_flags(crawl)
    crawl.set_defaults(func=cmd_crawl)

    discover = commands.add_parser(
        "discover", help="list repositories in a star range (no crawling)"
    )
    discover.add_argument(
        "--stars", required=True, type=_parse_stars, metavar="MIN..MAX"
    )
    discover.add_argument("--limit", type=int, default=50, metavar="N")
    _add_network_flags(discover)
    discover.set_defaults(func=cmd_discover)

    recrawl = commands.add_parser(
        "recrawl", help="refresh every candidate already in a CSV"
    )
    recrawl.add_argument("--data", default="data.csv", metavar="CSV")
    recrawl.add_argument("--max-issues", type=int, default=500, metavar="N")
    _add_network_flags(recrawl)
    recrawl.set_defaults(func=cmd_recrawl)

    compare = commands.add_parser(
        "compare", help="score and rank the candidates in a CSV"
    )
    compare.add_argument("--data", default="data.csv", metavar="CSV")
    compare.add_argument(
        "--config",
        metavar="JSON",
        help="evaluation model config (default: bundled OSSPAL model)",
    )
    compare.add_argument("--category", metavar="NAME")
    compare.add_argument(
        "--format", choices=("table", "json", "csv"), default="table"
    )
    compare.set_defaults(func=cmd_compare)

    serve = commands.add_parser("serve", help="serve the dataset and web UI")
    serve.add_argument("--data", default="data.csv", metavar="CSV")
    serve.add_argument("--config", default="config.json", metavar="JSON")
    serve.add_argument("--port", type=int, default=server.DEFAULT_PORT)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--static", metavar="DIR")
    serve.set_defaults(func=cmd_serve)

    return parser


# -- subcommands -------------------------------------------------------------


def _resolve_repos(args: argparse.Namespace) -> list[tuple[str, str]]:
    repos: list[tuple[str, str]] = []
    for value in args.repo:
        if value == "-":
            for line in sys.stdin:
                line = line.strip()
                if not line:
                    continue
                try:
                    repos.append(_parse_repo(line))
                except ValueError as exc:
                    raise PestoError(f"stdin: {exc}") from exc
        else:
            repos.append(value)  # already parsed by argparse
    return repos


def cmd_crawl(args: argparse.Namespace) -> int:
    repos = _resolve_repos(args)
    creds = resolve_credentials(args.token)
    report = crawler.crawl_candidates(
        repos, creds, _budget_from_args(args), args.out
    )
    print(report.render_text())
    return 0 if report.all_ok else 2


def cmd_discover(args: argparse.Namespace) -> int:
    creds = resolve_credentials(args.token)
    min_stars, max_stars = args.stars
    found = crawler.discover_by_stars(
        min_stars, max_stars, args.limit, creds, _budget_from_args(args)
    )
    for owner, name in found:
        print(f"{owner}/{name}")
    return 0


def cmd_recrawl(args: argparse.Namespace) -> int:
    creds = resolve_credentials(args.token)
    report = crawler.recrawl(args.data, creds, _budget_from_args(args))
    print(report.render_text())
    return 0 if report.all_ok else 2


def _load_compare_model(args: argparse.Namespace):
    if args.config:
        return load_model(args.config)
    return load_bundled_model("osspal")


def cmd_compare(args: argparse.Namespace) -> int:
    dataset = read_csv(args.data)
    model = _load_compare_model(args)
    result = score_overall(model, dataset)
    try:
        if args.format == "json":
            sys.stdout.write(render_comparison_json(result, args.category))
        elif args.format == "csv":
            _write_score_csv(result, args.category)
        else:
            print(render_table(result, args.category))
    except KeyError:
        valid = ", ".join(c.name for c in result.categories)
        print(
            f"pesto: error: unknown category {args.category!r}; valid: {valid}",
            file=sys.stderr,
        )
        return 1
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    try:
        with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as probe:
            probe.bind((args.host, args.port))
    except OSError:
        print(
            f"pesto: error: port {args.port} on {args.host} is already in use",
            file=sys.stderr,
        )
        return 1
    print(
        f"serving {args.data} on http://{args.host}:{args.port}", file=sys.stderr
    )
    server.run(
        args.data,
        args.config,
        port=args.port,
        host=args.host,
        static_dir=args.static,
    )
    return 0


# -- compare output formats ---------------------------------------------------


def _fmt_raw(value: float | None) -> str:
    if value is None:
        return "-"
    if float(value).is_integer():
        return str(int(value))
    return format_real(value)


def _fmt_score(value: float | None) -> str:
    return "-" if value is None else f"{value:.4f}"


def _pad_table(rows: list[list[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join(
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    )


def render_table(result: ComparisonResult, category: str | None = None) -> str:
    """Human-readable per-category blocks with raw values, scores, ranks."""
    payload = comparison_to_dict(result, category)
    blocks: list[str] = [f"model: {payload['model_name']}"]
    for block in payload["categories"]:
        lines = [f"\n[{block['name']}] weight={_fmt_raw(block['weight'])}"]
        if not block["metrics"]:
            lines.append("  (no metrics configured)")
            blocks.append("\n".join(lines))
            continue
        header = ["candidate"]
        header += [metric["header"] for metric in block["metrics"]]
        header += ["score", "rank"]
        rank_by_candidate = {
            entry["candidate"]: entry["rank"] for entry in block["ranking"]
        }
        rows = [header]
        for candidate in payload["candidates"]:
            row = [candidate]
            for metric in block["metrics"]:
                raw = metric["raw"][candidate]
                norm = metric["normalized"][candidate]
                if raw is None:
                    row.append("-")
                else:
                    row.append(f"{_fmt_raw(raw)} ({norm:.3f})")
            row.append(_fmt_score(block["scores"][candidate]))
            rank = rank_by_candidate.get(candidate)
            row.append("-" if rank is None else str(rank))
            rows.append(row)
        lines.append(_pad_table(rows))
        blocks.append("\n".join(lines))
    if "overall" in payload:
        lines = ["\n[Overall]"]
        rows = [["candidate", "score", "rank"]]
        rank_by_candidate = {
            entry["candidate"]: entry["rank"]
            for entry in payload["overall"]["ranking"]
        }
        for candidate in payload["candidates"]:
            rank = rank_by_candidate.get(candidate)
            rows.append(
                [
                    candidate,
                    _fmt_score(payload["overall"]["scores"][candidate]),
                    "-" if rank is None else str(rank),
                ]
            )
        lines.append(_pad_table(rows))
        blocks.append("\n".join(lines))
    return "\n".join(blocks)


def _write_score_csv(result: ComparisonResult, category: str | None) -> None:
    """Flat long-format score table for spreadsheet import."""
    payload = comparison_to_dict(result, category)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["candidate", "category", "score", "rank"])
    for block in payload["categories"]:
        rank_by_candidate = {
            entry["candidate"]: entry["rank"] for entry in block["ranking"]
        }
        for candidate in payload["candidates"]:
            score = block["scores"][candidate]
            rank = rank_by_candidate.get(candidate)
            writer.writerow(
                [
                    candidate,
                    block["name"],
                    "" if score is None else format_real(score),
                    "" if rank is None else rank,
                ]
            )
    if "overall" in payload:
        rank_by_candidate = {
            entry["candidate"]: entry["rank"]
            for entry in payload["overall"]["ranking"]
        }
        for candidate in payload["candidates"]:
            score = payload["overall"]["scores"][candidate]
            rank = rank_by_candidate.get(candidate)
            writer.writerow(
                [
                    candidate,
                    "overall",
                    "" if score is None else format_real(score),
                    "" if rank is None else rank,
                ]
            )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except FatalAuthError as exc:
        return _fail(args, f"authentication failed: {exc}")
    except PestoError as exc:
        return _fail(args, str(exc))
    except OSError as exc:
        return _fail(args, str(exc))
    except KeyboardInterrupt:
        return 130


def _fail(args: argparse.Namespace, message: str) -> int:
    if getattr(args, "verbose", False):
        traceback.print_exc(file=sys.stderr)
    print(f"pesto: error: {message}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
