"""oss-pesto: crawl GitHub repository data and compare OSS candidates."""

__version__ = "0.1.0"
