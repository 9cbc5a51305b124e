"""Crawl orchestration: drive the API client, build records, persist CSV.

Repositories are processed sequentially and the output file is
rewritten after every finished repository, so an interrupted or
partially failing session keeps all completed work. A rejected token
aborts the whole session; any other per-repository failure is recorded
in the report and the crawl moves on.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from .datastore import Dataset, merge, read_csv, write_csv
from .errors import FatalAuthError, PestoError, UnauthorizedError
from .github_client import ApiCredentials, CrawlBudget, GitHubClient
from .metrics import RawRepoData, build_candidate_record

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RepoOutcome:
    full_name: str
    ok: bool
    error: str | None
    requests_used: int


@dataclass
class CrawlReport:
    """Per-repository outcomes plus session-level accounting."""

    outcomes: list[RepoOutcome] = field(default_factory=list)
    request_count: int = 0
    elapsed_s: float = 0.0
    out_path: Path | None = None

    @property
    def succeeded(self) -> list[RepoOutcome]:
        return [o for o in self.outcomes if o.ok]

    @property
    def failed(self) -> list[RepoOutcome]:
        return [o for o in self.outcomes if not o.ok]

    @property
    def all_ok(self) -> bool:
        return not self.failed

    def to_dict(self) -> dict:
        return {
            "out_path": str(self.out_path) if self.out_path else None,
            "request_count": self.request_count,
            "elapsed_s": round(self.elapsed_s, 3),
            "repos": [
                {
                    "full_name": o.full_name,
                    "ok": o.ok,
                    "error": o.error,
                    "requests_used": o.requests_used,
                }
                for o in self.outcomes
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def render_text(self) -> str:
        lines = []
        for o in self.outcomes:
            status = "ok" if o.ok else f"FAILED ({o.error})"
            lines.append(
                f"{o.full_name}: {status} [{o.requests_used} requests]"
            )
        lines.append(
            f"{len(self.succeeded)}/{len(self.outcomes)} repos crawled, "
            f"{self.request_count} requests, {self.elapsed_s:.1f}s"
        )
        return "\n".join(lines)


def _crawl_one(client: GitHubClient, owner: str, name: str) -> RawRepoData:
    summary = client.fetch_repo_summary(owner, name)
    issues = client.fetch_issue_sample(owner, name)
    pr_counts = client.fetch_pull_request_counts(owner, name)
    contributor_count = client.fetch_contributor_count(owner, name)
    dependency_count = client.fetch_dependency_count(owner, name)
    download_total = client.fetch_release_download_total(owner, name)
    return RawRepoData(
        summary=summary,
        issues=issues,
        pull_request_count=pr_counts.total,
        open_pull_request_count=pr_counts.open,
        contributor_count=contributor_count,
        dependency_count=dependency_count,
        download_total=download_total,
        crawl_timestamp=summary.fetched_at,
        issue_sample_size=len(issues),
    )


def crawl_candidates(
    repos: list[tuple[str, str]],
    creds: ApiCredentials,
    budget: CrawlBudget,
    out_path: Path | str,
    *,
    client: GitHubClient | None = None,
) -> CrawlReport:
    """Crawl each repository and merge its row into the CSV at ``out_path``.

    Raises :class:`FatalAuthError` if the token is rejected; every other
    failure is collected per repository.
    """
    if not repos:
        raise ValueError("no repositories given")
    target = Path(out_path)
    report = CrawlReport(out_path=target)
    started = time.monotonic()
    own_client = client is None
    session = client or GitHubClient(creds, budget)
    try:
        dataset = read_csv(target) if target.exists() else Dataset()
        before_session = session.requests_issued
        for owner, name in repos:
            full_name = f"{owner}/{name}"
            before = session.requests_issued
            try:
                raw = _crawl_one(session, owner, name)
                record = build_candidate_record(raw)
                dataset = merge(dataset, [record])
                write_csv(dataset, target)
                report.outcomes.append(
                    RepoOutcome(
                        full_name=full_name,
                        ok=True,
                        error=None,
                        requests_used=session.requests_issued - before,
                    )
                )
                logger.info("crawled %s", full_name)
            except UnauthorizedError as exc:
                raise FatalAuthError(str(exc)) from exc
            except (PestoError, ValueError, KeyError) as exc:
                report.outcomes.append(
                    RepoOutcome(
                        full_name=full_name,
                        ok=False,
                        error=str(exc),
                        requests_used=session.requests_issued - before,
                    )
                )
                logger.warning("failed to crawl %s: %s", full_name, exc)
        report.request_count = session.requests_issued - before_session
    finally:
        report.elapsed_s = time.monotonic() - started
        if own_client:
            session.close()
    return report


def discover_by_stars(
    min_stars: int,
    max_stars: int | None,
    limit: int,
    creds: ApiCredentials,
    budget: CrawlBudget,
    *,
    client: GitHubClient | None = None,
) -> list[tuple[str, str]]:
    """List candidate repositories in a star range without crawling them.

    Kept separate from crawling so the candidate list can be inspected
    before any further API quota is spent.
    """
    own_client = client is None
    session = client or GitHubClient(creds, budget)
    try:
        return session.search_repos_by_stars(min_stars, max_stars, limit)
    finally:
        if own_client:
            session.close()


def recrawl(
    dataset_path: Path | str,
    creds: ApiCredentials,
    budget: CrawlBudget,
    *,
    client: GitHubClient | None = None,
) -> CrawlReport:
    """Re-crawl every candidate already present in the CSV, in place."""
    source = Path(dataset_path)
    dataset = read_csv(source)
    if not dataset.records:
        return CrawlReport(out_path=source)
    repos = []
    for full_name in dataset.full_names():
        owner, _, name = full_name.partition("/")
        repos.append((owner, name))
    return crawl_candidates(repos, creds, budget, source, client=client)
