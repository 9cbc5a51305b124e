from __future__ import annotations

import pytest

from corpus import standard_repos
from mock_github import MockGitHub
from pesto.github_client import ApiCredentials, CrawlBudget, GitHubClient


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    # Tests must not pick up a real token or API base from the machine.
    monkeypatch.delenv("GITHUB_TOKEN", raising=False)
    monkeypatch.delenv("PESTO_API_BASE", raising=False)


@pytest.fixture
def gh():
    mock = MockGitHub().start()
    for repo in standard_repos():
        mock.add_repo(repo)
    yield mock
    mock.stop()


@pytest.fixture
def creds(gh):
    return ApiCredentials(token=gh.token, source="flag")


@pytest.fixture
def make_client(gh, creds):
    """Client factory against the mock server; closes everything it makes."""
    made = []

    def factory(budget: CrawlBudget | None = None, **kwargs) -> GitHubClient:
        kwargs.setdefault("backoff_base_s", 0.001)
        client = GitHubClient(creds, budget, base_url=gh.base_url, **kwargs)
        made.append(client)
        return client

    yield factory
    for client in made:
        client.close()


@pytest.fixture
def client(make_client):
    return make_client()
