"""Unit tests for crawl orchestration: outcomes, persistence, budgets."""

from __future__ import annotations

import pytest

import oracle
from corpus import standard_repos
from pesto.crawler import crawl_candidates, discover_by_stars, recrawl
from pesto.datastore import Dataset, read_csv, write_csv
from pesto.errors import FatalAuthError, InvalidRangeError
from pesto.github_client import ApiCredentials, CrawlBudget, GitHubClient

ALL_REPOS = [("alpha", "a"), ("beta", "b"), ("gamma", "c")]

REAL_FIELDS = (
    "age_days",
    "avg_issue_active_time_days",
    "avg_issue_close_time_days",
    "avg_issue_comments",
)


def run_crawl(repos, creds, make_client, out, budget=None, **client_kwargs):
    budget = budget or CrawlBudget()
    client = make_client(budget, **client_kwargs)
    return crawl_candidates(repos, creds, budget, out, client=client)


def assert_record_matches_fixture(record, fixture, cap=500):
    expected = oracle.expected_record(fixture, record.crawled_at, cap=cap)
    for column, expected_value in expected.items():
        got = getattr(record, column)
        if column in REAL_FIELDS and expected_value is not None:
            assert got == pytest.approx(expected_value, abs=1e-9), column
        else:
            assert got == expected_value, column


# -- full corpus crawl --------------------------------------------------------


def test_crawl_writes_rows_matching_independent_computation(
    gh, creds, make_client, tmp_path
):
    out = tmp_path / "data.csv"
    report = run_crawl(ALL_REPOS, creds, make_client, out)
    assert report.all_ok
    assert report.out_path == out

    dataset = read_csv(out)
    assert dataset.full_names() == ["alpha/a", "beta/b", "gamma/c"]
    fixtures = {repo.full_name: repo for repo in standard_repos()}
    for record in dataset.records:
        assert_record_matches_fixture(record, fixtures[record.full_name])


def test_empty_repo_row_has_absent_issue_metrics(gh, creds, make_client, tmp_path):
    out = tmp_path / "data.csv"
    run_crawl([("gamma", "c")], creds, make_client, out)
    record = read_csv(out).records[0]
    assert record.avg_issue_active_time_days is None
    assert record.avg_issue_close_time_days is None
    assert record.avg_issue_comments is None
    assert record.dependency_count is None
    assert record.issue_sample_size == 0
    assert record.download_total == 7


def test_issue_sampling_cap_is_recorded(gh, creds, make_client, tmp_path):
    out = tmp_path / "data.csv"
    run_crawl(
        [("beta", "b")],
        creds,
        make_client,
        out,
        budget=CrawlBudget(max_issue_sample=40),
    )
    record = read_csv(out).records[0]
    assert record.issue_sample_size == 40
    fixture = next(r for r in standard_repos() if r.full_name == "beta/b")
    assert_record_matches_fixture(record, fixture, cap=40)


# -- failure isolation ---------------------------------------------------------


def test_missing_repo_fails_alone(gh, creds, make_client, tmp_path):
    out = tmp_path / "data.csv"
    report = run_crawl(
        [("alpha", "a"), ("missing", "nope"), ("gamma", "c")],
        creds,
        make_client,
        out,
    )
    assert [o.full_name for o in report.failed] == ["missing/nope"]
    assert "not found" in report.failed[0].error.lower()
    assert report.failed[0].requests_used >= 1
    assert read_csv(out).full_names() == ["alpha/a", "gamma/c"]
    assert gh.token not in report.to_json()
    assert gh.token not in report.render_text()


def test_rejected_token_aborts_everything(gh, tmp_path):
    out = tmp_path / "data.csv"
    bad_creds = ApiCredentials(token="bad-token-555", source="flag")
    budget = CrawlBudget()
    client = GitHubClient(bad_creds, budget, base_url=gh.base_url)
    try:
        with pytest.raises(FatalAuthError) as err:
            crawl_candidates(ALL_REPOS, bad_creds, budget, out, client=client)
    finally:
        client.close()
    assert "bad-token-555" not in str(err.value)
    assert not out.exists()


def test_budget_exhaustion_mid_list_keeps_finished_rows(
    gh, creds, make_client, tmp_path
):
    out = tmp_path / "data.csv"
    report = run_crawl(
        ALL_REPOS,
        creds,
        make_client,
        out,
        budget=CrawlBudget(max_requests=8),
        sleep=lambda _: None,
    )
    assert [o.full_name for o in report.succeeded] == ["alpha/a"]
    assert not report.all_ok
    assert "budget" in report.failed[0].error
    # the finished repository was flushed before the budget ran out
    assert read_csv(out).full_names() == ["alpha/a"]


def test_no_repos_is_an_error(creds, tmp_path):
    with pytest.raises(ValueError):
        crawl_candidates([], creds, CrawlBudget(), tmp_path / "x.csv")


# -- accounting -----------------------------------------------------------------


def test_request_accounting_matches_server_log(gh, creds, make_client, tmp_path):
    out = tmp_path / "data.csv"
    report = run_crawl(ALL_REPOS, creds, make_client, out)
    assert report.request_count == gh.request_count
    assert sum(o.requests_used for o in report.outcomes) == report.request_count
    by_name = {o.full_name: o for o in report.outcomes}
    # alpha/a: summary, one issue page, PR counts, contributors, SBOM, releases
    assert by_name["alpha/a"].requests_used == 6
    # beta/b pays for two issue pages and three contributor pages
    assert by_name["beta/b"].requests_used == 9


def test_crawl_is_reasonably_fast(gh, creds, make_client, tmp_path):
    report = run_crawl(ALL_REPOS, creds, make_client, tmp_path / "d.csv")
    assert report.elapsed_s < 10.0


# -- merging and recrawl -----------------------------------------------------------


def test_crawl_updates_existing_rows_in_place(gh, creds, make_client, tmp_path):
    out = tmp_path / "data.csv"
    run_crawl(ALL_REPOS, creds, make_client, out)
    gh.repos["beta/b"].stars = 777
    run_crawl([("beta", "b")], creds, make_client, out)
    dataset = read_csv(out)
    assert dataset.full_names() == ["alpha/a", "beta/b", "gamma/c"]
    assert dataset.records[1].star_count == 777
    assert dataset.records[0].star_count == 120  # untouched rows keep values


def test_recrawl_refreshes_every_row(gh, creds, make_client, tmp_path):
    out = tmp_path / "data.csv"
    run_crawl(ALL_REPOS, creds, make_client, out)
    first = read_csv(out)
    gh.repos["alpha/a"].stars = 121
    gh.repos["gamma/c"].watchers = 801
    report = recrawl(out, creds, CrawlBudget(), client=make_client())
    assert report.all_ok
    refreshed = read_csv(out)
    assert refreshed.full_names() == first.full_names()  # order preserved
    assert refreshed.records[0].star_count == 121
    assert refreshed.records[2].watcher_count == 801
    # timestamps move forward on re-crawl
    assert refreshed.records[0].crawled_at >= first.records[0].crawled_at


def test_recrawl_of_empty_dataset_is_a_noop(gh, creds, make_client, tmp_path):
    out = tmp_path / "empty.csv"
    write_csv(Dataset(), out)
    before = gh.request_count
    report = recrawl(out, creds, CrawlBudget(), client=make_client())
    assert report.outcomes == []
    assert report.request_count == 0
    assert gh.request_count == before
    assert read_csv(out).records == ()


# -- discovery ----------------------------------------------------------------------


def test_discover_lists_by_stars_descending(gh, creds, make_client):
    found = discover_by_stars(0, None, 10, creds, CrawlBudget(), client=make_client())
    assert found == [("gamma", "c"), ("beta", "b"), ("alpha", "a")]


def test_discover_range_filters(gh, creds, make_client):
    found = discover_by_stars(
        100, 1000, 10, creds, CrawlBudget(), client=make_client()
    )
    assert found == [("beta", "b"), ("alpha", "a")]


def test_discover_propagates_invalid_range(gh, creds, make_client):
    with pytest.raises(InvalidRangeError):
        discover_by_stars(9, 5, 10, creds, CrawlBudget(), client=make_client())
