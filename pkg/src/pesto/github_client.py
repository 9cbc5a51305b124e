"""Authenticated, rate-limit-aware GitHub REST + GraphQL client.

Issue pages come from GraphQL (one query carries author, company and
comment counts); repository summary, contributors, releases, SBOM and
search go through REST. Every request is counted against the session's
:class:`CrawlBudget` and throttled against the observed rate-limit state.
"""

from __future__ import annotations

import logging
import os
import re
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Callable

import httpx

from .errors import (
    ApiError,
    BudgetExhaustedError,
    InvalidRangeError,
    NotFoundError,
    RateLimitedError,
    TransportError,
    UnauthorizedError,
)
from .timeutil import parse_rfc3339, utcnow

logger = logging.getLogger(__name__)

DEFAULT_API_BASE = "https://api.github.com"
API_BASE_ENV_VAR = "PESTO_API_BASE"
TOKEN_ENV_VAR = "GITHUB_TOKEN"

# GitHub's search API stops serving results past the first thousand.
SEARCH_RESULT_CEILING = 1000

_NAME_RE = re.compile(r"^[A-Za-z0-9._-]+$")

_ISSUES_QUERY = """
query($owner: String!, $name: String!, $first: Int!, $after: String) {
  repository(owner: $owner, name: $name) {
    issues(first: $first, after: $after,
           orderBy: {field: CREATED_AT, direction: DESC}) {
      pageInfo { hasNextPage endCursor }
      nodes {
        author { __typename login ... on User { company } }
        createdAt
        closedAt
        state
        comments { totalCount }
      }
    }
  }
}
"""

_PR_COUNT_QUERY = """
query($owner: String!, $name: String!) {
  repository(owner: $owner, name: $name) {
    pullRequests { totalCount }
    openPullRequests: pullRequests(states: OPEN) { totalCount }
  }
}
"""


@dataclass(frozen=True)
class ApiCredentials:
    """Personal access token plus where it came from (flag beats env)."""

    token: str
    source: str = "env-var"

    def __post_init__(self) -> None:
        if not self.token:
            raise ValueError("token must be non-empty")
        if self.source not in ("flag", "env-var"):
            raise ValueError(f"unknown credential source: {self.source!r}")

    def __repr__(self) -> str:  # the token never leaks into logs or errors
        return f"ApiCredentials(token='***', source={self.source!r})"


def resolve_credentials(flag_token: str | None = None) -> ApiCredentials:
    """Pick the token from the CLI flag or ``GITHUB_TOKEN`` (flag wins)."""
    if flag_token:
        return ApiCredentials(token=flag_token, source="flag")
    env_token = os.environ.get(TOKEN_ENV_VAR, "").strip()
    if env_token:
        return ApiCredentials(token=env_token, source="env-var")
    raise UnauthorizedError(
        f"no GitHub token: pass --token or set {TOKEN_ENV_VAR}"
    )


@dataclass(frozen=True)
class CrawlBudget:
    """Request, retry and sampling limits for one crawl session."""

    max_requests: int = 500
    max_issue_sample: int = 500
    request_timeout: float = 30.0
    max_retries: int = 3
    min_remaining_headroom: int = 50

    def __post_init__(self) -> None:
        if self.max_requests <= 0:
            raise ValueError("max_requests must be positive")
        if self.max_issue_sample <= 0:
            raise ValueError("max_issue_sample must be positive")
        if self.request_timeout <= 0:
            raise ValueError("request_timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must not be negative")
        if self.min_remaining_headroom < 0:
            raise ValueError("min_remaining_headroom must not be negative")


@dataclass
class RateLimitState:
    """Latest rate-limit picture, refreshed from every response's headers."""

    remaining: int | None = None
    reset_at: datetime | None = None
    last_observed: datetime | None = None


@dataclass(frozen=True)
class Page:
    """One page of results; ``next_cursor`` is absent on the last page."""

    items: tuple
    next_cursor: str | None = None


@dataclass(frozen=True)
class RepoSummary:
    full_name: str
    created_at: datetime
    star_count: int
    watcher_count: int
    open_issue_count: int  # as reported by GitHub, pull requests included
    default_branch: str
    archived: bool
    fetched_at: datetime


@dataclass(frozen=True)
class IssueRecord:
    author_login: str | None  # None for deleted ("ghost") accounts
    author_company: str | None
    author_is_org: bool
    created_at: datetime
    closed_at: datetime | None
    comment_count: int
    state: str
    is_pull_request: bool = False


@dataclass(frozen=True)
class PullRequestCounts:
    total: int
    open: int


def validate_repo_name(owner: str, name: str) -> None:
    if not _NAME_RE.match(owner or "") or not _NAME_RE.match(name or ""):
        raise ValueError(f"invalid repository name: {owner!r}/{name!r}")


class GitHubClient:
    """Session against the GitHub API with budget and politeness guards.

    Thread-safe: the request counter and rate-limit state are updated
    under a lock, at most ``max_in_flight`` requests run concurrently,
    and every returned record is an immutable value.
    """

    def __init__(
        self,
        creds: ApiCredentials,
        budget: CrawlBudget | None = None,
        *,
        base_url: str | None = None,
        page_size: int = 100,
        max_in_flight: int = 4,
        backoff_base_s: float = 1.0,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        if page_size < 1:
            raise ValueError("page_size must be >= 1")
        self.budget = budget or CrawlBudget()
        self.rate_limit = RateLimitState()
        self._page_size = page_size
        self._backoff_base_s = backoff_base_s
        self._sleep = sleep
        self._lock = threading.Lock()
        self._in_flight = threading.BoundedSemaphore(max_in_flight)
        self._requests_issued = 0
        resolved_base = (
            base_url
            or os.environ.get(API_BASE_ENV_VAR, "").strip()
            or DEFAULT_API_BASE
        )
        self._http = httpx.Client(
            base_url=resolved_base,
            headers={
                "Authorization": f"Bearer {creds.token}",
                "Accept": "application/vnd.github+json",
                "User-Agent": "oss-pesto",
            },
            timeout=self.budget.request_timeout,
        )

    # -- session plumbing -------------------------------------------------

    @property
    def requests_issued(self) -> int:
        with self._lock:
            return self._requests_issued

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "GitHubClient":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    def _take_budget_slot(self) -> None:
        with self._lock:
            if self._requests_issued >= self.budget.max_requests:
                raise BudgetExhaustedError(
                    f"request budget of {self.budget.max_requests} exhausted"
                )
            self._requests_issued += 1

    def _politeness_wait(self) -> None:
        """Sleep until the quota resets when headroom has run out."""
        with self._lock:
            remaining = self.rate_limit.remaining
            reset_at = self.rate_limit.reset_at
        if remaining is None or reset_at is None:
            return
        if remaining >= self.budget.min_remaining_headroom:
            return
        wait_s = (reset_at - utcnow()).total_seconds()
        if wait_s > 0:
            logger.info(
                "rate-limit headroom low (%d remaining); waiting %.1fs for reset",
                remaining,
                wait_s,
            )
            self._sleep(wait_s)
        with self._lock:
            # Past the reset the old "remaining" no longer applies; forget it
            # until the next response brings fresh headers.
            if self.rate_limit.reset_at == reset_at:
                self.rate_limit.remaining = None

    def _update_rate_limit(self, response: httpx.Response) -> None:
        remaining = response.headers.get("X-RateLimit-Remaining")
        reset = response.headers.get("X-RateLimit-Reset")
        if remaining is None:
            return
        try:
            remaining_n = int(remaining)
            reset_dt = (
                datetime.fromtimestamp(float(reset), tz=timezone.utc)
                if reset is not None
                else None
            )
        except ValueError:
            return
        with self._lock:
            self.rate_limit.remaining = remaining_n
            if reset_dt is not None:
                self.rate_limit.reset_at = reset_dt
            self.rate_limit.last_observed = utcnow()

    def _backoff(self, attempt: int) -> None:
        delay = self._backoff_base_s * (2 ** (attempt - 1))
        with self._lock:
            reset_at = self.rate_limit.reset_at
        if reset_at is not None:
            until_reset = (reset_at - utcnow()).total_seconds()
            if until_reset > 0:
                delay = min(delay, until_reset)
        if delay > 0:
            self._sleep(delay)

    def _request(
        self,
        method: str,
        url: str,
        *,
        params: dict[str, Any] | None = None,
        json_body: dict[str, Any] | None = None,
    ) -> httpx.Response:
        """Issue one budgeted request, retrying transport errors and 5xx."""
        attempts = self.budget.max_retries + 1
        last_reason = "no attempt made"
        for attempt in range(attempts):
            if attempt:
                self._backoff(attempt)
            self._take_budget_slot()
            self._politeness_wait()
            try:
                with self._in_flight:
                    response = self._http.request(
                        method, url, params=params, json=json_body
                    )
            except httpx.HTTPError as exc:
                last_reason = f"{type(exc).__name__}: {exc}"
                logger.warning(
                    "transport error on %s %s (attempt %d/%d)",
                    method,
                    url,
                    attempt + 1,
                    attempts,
                )
                continue
            self._update_rate_limit(response)
            if response.status_code >= 500:
                last_reason = f"server error {response.status_code}"
                logger.warning(
                    "%s on %s %s (attempt %d/%d)",
                    last_reason,
                    method,
                    url,
                    attempt + 1,
                    attempts,
                )
                continue
            return response
        raise TransportError(
            f"{method} {url} failed after {attempts} attempts ({last_reason})"
        )

    def _raise_for_status(self, response: httpx.Response, context: str) -> None:
        status = response.status_code
        if status < 400:
            return
        if status == 401:
            raise UnauthorizedError(
                f"{context}: authentication failed (check your token)"
            )
        if status == 404:
            raise NotFoundError(f"{context}: not found (misspelled or private?)")
        if status in (403, 429) and self._looks_rate_limited(response):
            with self._lock:
                reset_at = self.rate_limit.reset_at
            raise RateLimitedError(
                f"{context}: rate limited, retry after "
                f"{reset_at.isoformat() if reset_at else 'unknown reset'}",
                reset_at=reset_at,
            )
        raise ApiError(f"{context}: unexpected HTTP {status}", status_code=status)

    @staticmethod
    def _looks_rate_limited(response: httpx.Response) -> bool:
        if response.headers.get("Retry-After"):
            return True
        return response.headers.get("X-RateLimit-Remaining") == "0"

    def _graphql(self, query: str, variables: dict[str, Any], context: str) -> dict:
        response = self._request(
            "POST", "/graphql", json_body={"query": query, "variables": variables}
        )
        self._raise_for_status(response, context)
        payload = response.json()
        errors = payload.get("errors") or []
        if errors:
            if any(e.get("type") == "NOT_FOUND" for e in errors):
                raise NotFoundError(f"{context}: not found (misspelled or private?)")
            raise ApiError(f"{context}: GraphQL error: {errors[0].get('message')}")
        return payload.get("data") or {}

    # -- operations --------------------------------------------------------

    def fetch_repo_summary(self, owner: str, name: str) -> RepoSummary:
        """Fetch the repository's headline numbers and metadata."""
        validate_repo_name(owner, name)
        context = f"repository {owner}/{name}"
        response = self._request("GET", f"/repos/{owner}/{name}")
        self._raise_for_status(response, context)
        data = response.json()
        return RepoSummary(
            full_name=f"{owner}/{name}",
            created_at=parse_rfc3339(data["created_at"]),
            star_count=int(data["stargazers_count"]),
            watcher_count=int(data["subscribers_count"]),
            open_issue_count=int(data["open_issues_count"]),
            default_branch=str(data.get("default_branch") or "main"),
            archived=bool(data.get("archived", False)),
            fetched_at=utcnow(),
        )

    def fetch_issue_page(
        self, owner: str, name: str, cursor: str | None = None
    ) -> Page:
        """Fetch one newest-first page of issues (pull requests excluded)."""
        validate_repo_name(owner, name)
        data = self._graphql(
            _ISSUES_QUERY,
            {"owner": owner, "name": name, "first": self._page_size, "after": cursor},
            context=f"issues of {owner}/{name}",
        )
        repository = data.get("repository")
        if repository is None:
            raise NotFoundError(f"repository {owner}/{name}: not found")
        connection = repository["issues"]
        records = tuple(
            self._issue_from_node(node) for node in connection.get("nodes") or []
        )
        page_info = connection.get("pageInfo") or {}
        next_cursor = (
            page_info.get("endCursor") if page_info.get("hasNextPage") else None
        )
        return Page(items=records, next_cursor=next_cursor)

    @staticmethod
    def _issue_from_node(node: dict) -> IssueRecord:
        author = node.get("author") or None
        login = company = None
        is_org = False
        if author is not None:
            login = author.get("login")
            company = author.get("company") or None
            is_org = author.get("__typename") == "Organization"
        closed_at = node.get("closedAt")
        return IssueRecord(
            author_login=login,
            author_company=company,
            author_is_org=is_org,
            created_at=parse_rfc3339(node["createdAt"]),
            closed_at=parse_rfc3339(closed_at) if closed_at else None,
            comment_count=int((node.get("comments") or {}).get("totalCount", 0)),
            state=str(node.get("state", "")).lower(),
            is_pull_request=False,
        )

    def fetch_issue_sample(
        self, owner: str, name: str, max_issues: int | None = None
    ) -> tuple[IssueRecord, ...]:
        """Collect newest-first issues up to the sampling cap."""
        cap = max_issues if max_issues is not None else self.budget.max_issue_sample
        collected: list[IssueRecord] = []
        cursor: str | None = None
        while len(collected) < cap:
            page = self.fetch_issue_page(owner, name, cursor)
            collected.extend(page.items)
            if page.next_cursor is None:
                break
            cursor = page.next_cursor
        return tuple(collected[:cap])

    def fetch_pull_request_counts(self, owner: str, name: str) -> PullRequestCounts:
        """Total and currently-open pull request counts (one GraphQL query)."""
        validate_repo_name(owner, name)
        data = self._graphql(
            _PR_COUNT_QUERY,
            {"owner": owner, "name": name},
            context=f"pull requests of {owner}/{name}",
        )
        repository = data.get("repository")
        if repository is None:
            raise NotFoundError(f"repository {owner}/{name}: not found")
        return PullRequestCounts(
            total=int(repository["pullRequests"]["totalCount"]),
            open=int(repository["openPullRequests"]["totalCount"]),
        )

    def fetch_pull_request_count(self, owner: str, name: str) -> int:
        """Number of pull requests in all states."""
        return self.fetch_pull_request_counts(owner, name).total

    def fetch_contributor_count(self, owner: str, name: str) -> int:
        """Count distinct non-anonymous contributors via pagination."""
        validate_repo_name(owner, name)
        context = f"contributors of {owner}/{name}"
        count = 0
        url: str | None = f"/repos/{owner}/{name}/contributors"
        params: dict[str, Any] | None = {
            "per_page": self._page_size,
            "anon": "false",
        }
        while url:
            response = self._request("GET", url, params=params)
            if response.status_code == 204:  # GitHub's empty-repo answer
                return 0
            self._raise_for_status(response, context)
            count += len(response.json())
            url = self._next_link(response)
            params = None  # the Link URL already carries the query string
        return count

    @staticmethod
    def _next_link(response: httpx.Response) -> str | None:
        link = response.headers.get("Link", "")
        for part in link.split(","):
            if 'rel="next"' in part:
                target = part.split(";")[0].strip()
                return target.strip("<>")
        return None

    def fetch_dependency_count(self, owner: str, name: str) -> int | None:
        """Packages in the dependency graph, excluding the root.

        Returns ``None`` (metric unavailable, distinct from zero) when the
        SBOM endpoint has nothing for this repository.
        """
        validate_repo_name(owner, name)
        response = self._request(
            "GET", f"/repos/{owner}/{name}/dependency-graph/sbom"
        )
        if response.status_code == 404:
            return None
        if response.status_code == 403 and not self._looks_rate_limited(response):
            return None  # dependency graph disabled for the repository
        self._raise_for_status(response, f"dependency graph of {owner}/{name}")
        packages = (response.json().get("sbom") or {}).get("packages") or []
        # The first package entry describes the repository itself.
        return max(0, len(packages) - 1)

    def fetch_release_download_total(self, owner: str, name: str) -> int:
        """Sum of asset download counts across all releases (0 when none)."""
        validate_repo_name(owner, name)
        context = f"releases of {owner}/{name}"
        total = 0
        url: str | None = f"/repos/{owner}/{name}/releases"
        params: dict[str, Any] | None = {"per_page": self._page_size}
        while url:
            response = self._request("GET", url, params=params)
            self._raise_for_status(response, context)
            for release in response.json():
                for asset in release.get("assets") or []:
                    total += int(asset.get("download_count", 0))
            url = self._next_link(response)
            params = None
        return total

    def search_repos_by_stars(
        self,
        min_stars: int,
        max_stars: int | None,
        limit: int,
    ) -> list[tuple[str, str]]:
        """Find repositories whose star count lies in [min_stars, max_stars].

        Results are deterministic: descending stars, ties broken by full
        name. ``limit`` may not exceed the search API ceiling of 1000.
        """
        if min_stars < 0:
            raise InvalidRangeError("min_stars must not be negative")
        if max_stars is not None and max_stars < min_stars:
            raise InvalidRangeError(
                f"star range is inverted: {min_stars}..{max_stars}"
            )
        if limit <= 0:
            raise InvalidRangeError("limit must be positive")
        if limit > SEARCH_RESULT_CEILING:
            raise InvalidRangeError(
                f"limit exceeds the search API ceiling of {SEARCH_RESULT_CEILING}"
            )
        query = (
            f"stars:{min_stars}..{max_stars}"
            if max_stars is not None
            else f"stars:>={min_stars}"
        )
        found: list[tuple[int, str]] = []
        page = 1
        while len(found) < limit:
            response = self._request(
                "GET",
                "/search/repositories",
                params={
                    "q": query,
                    "sort": "stars",
                    "order": "desc",
                    "per_page": self._page_size,
                    "page": page,
                },
            )
            self._raise_for_status(response, "repository search")
            items = response.json().get("items") or []
            if not items:
                break
            for item in items:
                stars = int(item.get("stargazers_count", 0))
                if stars < min_stars:
                    continue
                if max_stars is not None and stars > max_stars:
                    continue
                found.append((stars, item["full_name"]))
            page += 1
        found.sort(key=lambda pair: (-pair[0], pair[1]))
        results: list[tuple[str, str]] = []
        for _, full_name in found[:limit]:
            owner, _, name = full_name.partition("/")
            results.append((owner, name))
        return results
