"""Derived activity/health metrics computed from raw repository data.

All functions are pure; time-based metrics are expressed in fractional
days. Metrics that are undefined for a repository (no issues, no closed
issues, no dependency manifest) stay ``None`` instead of being coerced
to zero, so downstream scoring can renormalize around them.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Sequence

from .github_client import IssueRecord, RepoSummary

SECONDS_PER_DAY = 86400.0

# Deleted accounts collapse to one stable identity so distinct counts
# do not drift between re-crawls.
GHOST_AUTHOR = "(ghost)"


@dataclass(frozen=True)
class RawRepoData:
    """Everything fetched for one repository before aggregation."""

    summary: RepoSummary
    issues: tuple[IssueRecord, ...]
    pull_request_count: int
    open_pull_request_count: int
    contributor_count: int
    dependency_count: int | None
    download_total: int
    crawl_timestamp: datetime
    issue_sample_size: int

    def __post_init__(self) -> None:
        if self.issue_sample_size != len(self.issues):
            raise ValueError("issue_sample_size must equal the sample length")
        if self.crawl_timestamp < self.summary.created_at:
            raise ValueError("crawl_timestamp precedes repository creation")


@dataclass(frozen=True)
class CandidateRecord:
    """One dataset row: identity plus every computed metric value."""

    full_name: str
    crawled_at: datetime
    star_count: int
    watcher_count: int
    age_days: float
    avg_issue_active_time_days: float | None
    avg_issue_close_time_days: float | None
    avg_issue_comments: float | None
    issue_raiser_count: int
    org_issue_raiser_count: int
    pull_request_count: int
    contributor_count: int
    open_issue_count: int
    dependency_count: int | None
    download_total: int
    issue_sample_size: int


def _non_pr(issues: Iterable[IssueRecord]) -> list[IssueRecord]:
    return [issue for issue in issues if not issue.is_pull_request]


def _author_identity(issue: IssueRecord) -> str:
    return issue.author_login if issue.author_login else GHOST_AUTHOR


def compute_age_days(created_at: datetime, now: datetime) -> float:
    """Repository age in fractional days."""
    if now < created_at:
        raise ValueError("now precedes created_at")
    return (now - created_at).total_seconds() / SECONDS_PER_DAY


def compute_avg_issue_active_time(
    issues: Sequence[IssueRecord], now: datetime
) -> float | None:
    """Mean lifetime of sampled issues, open ones measured up to ``now``."""
    sample = _non_pr(issues)
    if not sample:
        return None
    total = 0.0
    for issue in sample:
        end = issue.closed_at if issue.closed_at is not None else now
        total += (end - issue.created_at).total_seconds()
    return total / len(sample) / SECONDS_PER_DAY


def compute_avg_issue_close_time(issues: Sequence[IssueRecord]) -> float | None:
    """Mean creation-to-close time over closed issues only."""
    closed = [i for i in _non_pr(issues) if i.closed_at is not None]
    if not closed:
        return None
    total = sum(
        (i.closed_at - i.created_at).total_seconds() for i in closed  # type: ignore[operator]
    )
    return total / len(closed) / SECONDS_PER_DAY


def compute_avg_issue_comments(issues: Sequence[IssueRecord]) -> float | None:
    sample = _non_pr(issues)
    if not sample:
        return None
    return sum(i.comment_count for i in sample) / len(sample)


def count_issue_raisers(issues: Sequence[IssueRecord]) -> int:
    """Distinct issue authors; deleted accounts count once as a sentinel."""
    return len({_author_identity(i) for i in _non_pr(issues)})


def count_org_issue_raisers(issues: Sequence[IssueRecord]) -> int:
    """Distinct authors with a company affiliation or Organization account.

    Ghost authors expose neither, so they never count here.
    """
    affiliated: set[str] = set()
    for issue in _non_pr(issues):
        if issue.author_login is None:
            continue
        company = (issue.author_company or "").strip()
        if issue.author_is_org or company:
            affiliated.add(issue.author_login)
    return len(affiliated)


def build_candidate_record(raw: RawRepoData) -> CandidateRecord:
    """Assemble the full metric row for one repository.

    The reported open-issue figure conflates issues and pull requests,
    so open PRs are subtracted out. ``issue_sample_size`` records how
    many issues the averages were computed from.
    """
    summary = raw.summary
    now = raw.crawl_timestamp
    return CandidateRecord(
        full_name=summary.full_name,
        crawled_at=now,
        star_count=summary.star_count,
        watcher_count=summary.watcher_count,
        age_days=compute_age_days(summary.created_at, now),
        avg_issue_active_time_days=compute_avg_issue_active_time(raw.issues, now),
        avg_issue_close_time_days=compute_avg_issue_close_time(raw.issues),
        avg_issue_comments=compute_avg_issue_comments(raw.issues),
        issue_raiser_count=count_issue_raisers(raw.issues),
        org_issue_raiser_count=count_org_issue_raisers(raw.issues),
        pull_request_count=raw.pull_request_count,
        contributor_count=raw.contributor_count,
        open_issue_count=max(
            0, summary.open_issue_count - raw.open_pull_request_count
        ),
        dependency_count=raw.dependency_count,
        download_total=raw.download_total,
        issue_sample_size=raw.issue_sample_size,
    )
