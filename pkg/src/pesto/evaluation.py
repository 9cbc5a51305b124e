"""Evaluation models: category/metric bindings, scoring and rankings.

A model maps display categories to weighted metric bindings. Raw metric
values are made commensurable by min-max normalization across the
compared candidate set, then aggregated by weighted means (weights
renormalized over the metrics actually present for a candidate).
Scores are therefore relative to the candidate set, not absolute.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from .datastore import COLUMNS, Dataset
from .errors import InvalidConfigError

HIGHER_BETTER = "higher_better"
LOWER_BETTER = "lower_better"
_DIRECTIONS = (HIGHER_BETTER, LOWER_BETTER)

# Every numeric dataset column can back a metric binding.
VALID_ACCESSORS: tuple[str, ...] = tuple(
    column for column in COLUMNS if column not in ("full_name", "crawled_at")
)

BUNDLED_CONFIGS = ("osspal", "minimal")


@dataclass(frozen=True)
class MetricBinding:
    header: str
    accessor: str
    direction: str = HIGHER_BETTER
    weight: float = 1.0


@dataclass(frozen=True)
class CategorySpec:
    name: str
    weight: float = 1.0
    metrics: tuple[MetricBinding, ...] = ()


@dataclass(frozen=True)
class EvaluationModel:
    model_name: str
    categories: tuple[CategorySpec, ...]

    def category(self, name: str) -> CategorySpec | None:
        for spec in self.categories:
            if spec.name == name:
                return spec
        return None


@dataclass(frozen=True)
class RankEntry:
    candidate: str
    rank: int | None  # None marks an unranked (all-missing) candidate
    score: float | None


@dataclass(frozen=True)
class MetricComparison:
    binding: MetricBinding
    raw: dict[str, float | None]
    normalized: dict[str, float | None]


@dataclass(frozen=True)
class CategoryComparison:
    name: str
    weight: float
    metrics: tuple[MetricComparison, ...]
    scores: dict[str, float | None]
    ranking: tuple[RankEntry, ...]


@dataclass(frozen=True)
class ComparisonResult:
    model_name: str
    candidates: tuple[str, ...]
    categories: tuple[CategoryComparison, ...]
    overall_scores: dict[str, float | None]
    overall_ranking: tuple[RankEntry, ...]


# -- model loading ----------------------------------------------------------


def _binding_from_dict(entry: object, where: str) -> MetricBinding:
    if not isinstance(entry, dict):
        raise InvalidConfigError(f"{where}: metric entry must be an object")
    header = entry.get("Header", entry.get("header"))
    if not isinstance(header, str) or not header:
        raise InvalidConfigError(f"{where}: metric needs a non-empty Header")
    accessor = entry.get("accessor")
    if accessor not in VALID_ACCESSORS:
        raise InvalidConfigError(
            f"{where}: unknown accessor {accessor!r}; valid accessors are: "
            + ", ".join(VALID_ACCESSORS)
        )
    direction = entry.get("direction", HIGHER_BETTER)
    if direction not in _DIRECTIONS:
        raise InvalidConfigError(
            f"{where}: direction must be one of {', '.join(_DIRECTIONS)}"
        )
    weight = entry.get("weight", 1)
    if not isinstance(weight, (int, float)) or isinstance(weight, bool) or weight <= 0:
        raise InvalidConfigError(f"{where}: weight must be a positive number")
    return MetricBinding(
        header=header, accessor=accessor, direction=direction, weight=float(weight)
    )


def model_from_dict(payload: object) -> EvaluationModel:
    """Validate a config mapping and fill in defaults.

    Accepts the capitalized ``Header`` key as well as ``header``, and
    metric entries carrying only Header/accessor.
    """
    if not isinstance(payload, dict):
        raise InvalidConfigError("config root must be an object")
    model_name = payload.get("model_name")
    if not isinstance(model_name, str) or not model_name:
        raise InvalidConfigError("config needs a non-empty model_name")
    raw_categories = payload.get("categories")
    if not isinstance(raw_categories, list) or not raw_categories:
        raise InvalidConfigError("config needs a non-empty categories list")
    categories: list[CategorySpec] = []
    seen_names: set[str] = set()
    for position, raw_category in enumerate(raw_categories):
        where = f"categories[{position}]"
        if not isinstance(raw_category, dict):
            raise InvalidConfigError(f"{where}: category must be an object")
        name = raw_category.get("name")
        if not isinstance(name, str) or not name:
            raise InvalidConfigError(f"{where}: category needs a non-empty name")
        if name in seen_names:
            raise InvalidConfigError(f"duplicate category: {name}")
        seen_names.add(name)
        weight = raw_category.get("weight", 1)
        if (
            not isinstance(weight, (int, float))
            or isinstance(weight, bool)
            or weight <= 0
        ):
            raise InvalidConfigError(f"{where}: weight must be a positive number")
        raw_metrics = raw_category.get("metrics", [])
        if not isinstance(raw_metrics, list):
            raise InvalidConfigError(f"{where}: metrics must be a list")
        metrics = tuple(
            _binding_from_dict(entry, f"{where}.metrics[{i}]")
            for i, entry in enumerate(raw_metrics)
        )
        categories.append(
            CategorySpec(name=name, weight=float(weight), metrics=metrics)
        )
    if not any(category.metrics for category in categories):
        raise InvalidConfigError("at least one category must bind a metric")
    return EvaluationModel(model_name=model_name, categories=tuple(categories))


def load_model(path: Path | str) -> EvaluationModel:
    """Load and validate an evaluation model from a JSON config file."""
    source = Path(path)
    try:
        payload = json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidConfigError(f"{source}: not valid JSON: {exc}") from exc
    return model_from_dict(payload)


def load_bundled_model(name: str = "osspal") -> EvaluationModel:
    """Load one of the configs shipped with the package."""
    if name not in BUNDLED_CONFIGS:
        raise InvalidConfigError(
            f"unknown bundled config {name!r}; available: {', '.join(BUNDLED_CONFIGS)}"
        )
    text = (
        resources.files("pesto.configs").joinpath(f"{name}.json").read_text("utf-8")
    )
    return model_from_dict(json.loads(text))


def model_to_dict(model: EvaluationModel) -> dict:
    return {
        "model_name": model.model_name,
        "categories": [
            {
                "name": category.name,
                "weight": category.weight,
                "metrics": [
                    {
                        "header": binding.header,
                        "accessor": binding.accessor,
                        "direction": binding.direction,
                        "weight": binding.weight,
                    }
                    for binding in category.metrics
                ],
            }
            for category in model.categories
        ],
    }


# -- scoring ----------------------------------------------------------------


def normalize_metric(
    values: Mapping[str, float | None], direction: str = HIGHER_BETTER
) -> dict[str, float | None]:
    """Min-max map present values onto [0, 1]; missing stays missing.

    When every present value is equal the metric cannot discriminate,
    so each present value maps to the neutral 0.5. ``lower_better``
    flips the scale.
    """
    if direction not in _DIRECTIONS:
        raise ValueError(f"unknown direction: {direction!r}")
    present = [v for v in values.values() if v is not None]
    out: dict[str, float | None] = {}
    if not present:
        return {candidate: None for candidate in values}
    low, high = min(present), max(present)
    span = high - low
    for candidate, value in values.items():
        if value is None:
            out[candidate] = None
        elif span == 0:
            out[candidate] = 0.5
        else:
            scaled = (value - low) / span
            out[candidate] = 1.0 - scaled if direction == LOWER_BETTER else scaled
    return out


def _raw_values(
    accessor: str, dataset: Dataset
) -> dict[str, float | None]:
    out: dict[str, float | None] = {}
    for record in dataset.records:
        value = getattr(record, accessor)
        out[record.full_name] = None if value is None else float(value)
    return out


def _weighted_mean(
    parts: list[tuple[float, float]]  # (weight, value) over present entries
) -> float | None:
    if not parts:
        return None
    total_weight = sum(weight for weight, _ in parts)
    return sum(weight * value for weight, value in parts) / total_weight


def score_category(
    category: CategorySpec, dataset: Dataset
) -> dict[str, float | None]:
    """Weighted mean of each candidate's present normalized metrics."""
    normalized_by_metric = [
        (binding, normalize_metric(_raw_values(binding.accessor, dataset), binding.direction))
        for binding in category.metrics
    ]
    scores: dict[str, float | None] = {}
    for record in dataset.records:
        parts = [
            (binding.weight, normalized[record.full_name])
            for binding, normalized in normalized_by_metric
            if normalized[record.full_name] is not None
        ]
        scores[record.full_name] = _weighted_mean(parts)  # type: ignore[arg-type]
    return scores


def rank(scores: Mapping[str, float | None]) -> tuple[RankEntry, ...]:
    """Dense descending ranking; missing scores go last, unranked."""
    present = sorted(
        ((name, value) for name, value in scores.items() if value is not None),
        key=lambda pair: (-pair[1], pair[0]),
    )
    entries: list[RankEntry] = []
    current_rank = 0
    previous_score: float | None = None
    for name, value in present:
        if previous_score is None or value != previous_score:
            current_rank += 1
            previous_score = value
        entries.append(RankEntry(candidate=name, rank=current_rank, score=value))
    for name in sorted(n for n, v in scores.items() if v is None):
        entries.append(RankEntry(candidate=name, rank=None, score=None))
    return tuple(entries)


def score_overall(model: EvaluationModel, dataset: Dataset) -> ComparisonResult:
    """Full comparison: per-metric, per-category and overall scores."""
    candidates = tuple(dataset.full_names())
    category_blocks: list[CategoryComparison] = []
    for category in model.categories:
        metric_blocks = []
        for binding in category.metrics:
            raw = _raw_values(binding.accessor, dataset)
            metric_blocks.append(
                MetricComparison(
                    binding=binding,
                    raw=raw,
                    normalized=normalize_metric(raw, binding.direction),
                )
            )
        scores = score_category(category, dataset)
        category_blocks.append(
            CategoryComparison(
                name=category.name,
                weight=category.weight,
                metrics=tuple(metric_blocks),
                scores=scores,
                ranking=rank(scores),
            )
        )
    overall_scores: dict[str, float | None] = {}
    for candidate in candidates:
        parts = [
            (block.weight, block.scores[candidate])
            for block in category_blocks
            if block.scores.get(candidate) is not None
        ]
        overall_scores[candidate] = _weighted_mean(parts)  # type: ignore[arg-type]
    return ComparisonResult(
        model_name=model.model_name,
        candidates=candidates,
        categories=tuple(category_blocks),
        overall_scores=overall_scores,
        overall_ranking=rank(overall_scores),
    )


# -- canonical JSON ---------------------------------------------------------


def _ranking_to_list(ranking: tuple[RankEntry, ...]) -> list[dict]:
    return [
        {"candidate": entry.candidate, "rank": entry.rank, "score": entry.score}
        for entry in ranking
    ]


def _category_to_dict(block: CategoryComparison, candidates: tuple[str, ...]) -> dict:
    return {
        "name": block.name,
        "weight": block.weight,
        "metrics": [
            {
                "header": metric.binding.header,
                "accessor": metric.binding.accessor,
                "direction": metric.binding.direction,
                "weight": metric.binding.weight,
                "raw": {c: metric.raw[c] for c in candidates},
                "normalized": {c: metric.normalized[c] for c in candidates},
            }
            for metric in block.metrics
        ],
        "scores": {c: block.scores[c] for c in candidates},
        "ranking": _ranking_to_list(block.ranking),
    }


def comparison_to_dict(
    result: ComparisonResult, category: str | None = None
) -> dict:
    """JSON-ready mapping; ``category`` filters to a single block."""
    blocks = result.categories
    if category is not None:
        blocks = tuple(b for b in blocks if b.name == category)
        if not blocks:
            raise KeyError(category)
    payload: dict = {
        "model_name": result.model_name,
        "candidates": list(result.candidates),
        "categories": [
            _category_to_dict(block, result.candidates) for block in blocks
        ],
    }
    if category is None:
        payload["overall"] = {
            "scores": {c: result.overall_scores[c] for c in result.candidates},
            "ranking": _ranking_to_list(result.overall_ranking),
        }
    return payload


def render_comparison_json(
    result: ComparisonResult, category: str | None = None
) -> str:
    """One canonical JSON text, shared verbatim by the CLI and the server.

    Ends with a newline so the two surfaces stay byte-identical.
    """
    return json.dumps(comparison_to_dict(result, category), indent=2) + "\n"
