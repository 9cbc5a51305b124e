import type {
  CategoryComparison,
  ComparisonPayload,
  ModelConfig,
} from "../src/types";

export async function until(
  check: () => boolean,
  timeoutMs = 5000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((resolve) => setTimeout(resolve, 20));
  }
  throw new Error("condition not met in time");
}

export function demoConfig(): ModelConfig {
  return {
    model_name: "Demo",
    categories: [
      {
        name: "Popularity",
        weight: 1,
        metrics: [
          { header: "#Stars", accessor: "star_count", direction: "higher_better", weight: 1 },
          { header: "#Watch", accessor: "watcher_count", direction: "higher_better", weight: 1 },
        ],
      },
      {
        name: "Health",
        weight: 1,
        metrics: [
          { header: "#Contrib", accessor: "contributor_count", direction: "higher_better", weight: 1 },
        ],
      },
      { name: "Docs", weight: 1, metrics: [] },
    ],
  };
}

function popularityBlock(): CategoryComparison {
  return {
    name: "Popularity",
    weight: 1,
    metrics: [
      {
        header: "#Stars",
        accessor: "star_count",
        direction: "higher_better",
        weight: 1,
        raw: { "a/x": 10, "b/y": 20, "c/z": 30, "d/w": null },
        normalized: { "a/x": 0, "b/y": 0.5, "c/z": 1, "d/w": null },
      },
      {
        header: "#Watch",
        accessor: "watcher_count",
        direction: "higher_better",
        weight: 1,
        raw: { "a/x": 4, "b/y": 4, "c/z": 4, "d/w": null },
        normalized: { "a/x": 0.5, "b/y": 0.5, "c/z": 0.5, "d/w": null },
      },
    ],
    scores: { "a/x": 0.25, "b/y": 0.5, "c/z": 0.75, "d/w": null },
    ranking: [
      { candidate: "c/z", rank: 1, score: 0.75 },
      { candidate: "b/y", rank: 2, score: 0.5 },
      { candidate: "a/x", rank: 3, score: 0.25 },
      { candidate: "d/w", rank: null, score: null },
    ],
  };
}

export function demoComparison(): ComparisonPayload {
  return {
    model_name: "Demo",
    candidates: ["a/x", "b/y", "c/z", "d/w"],
    categories: [
      popularityBlock(),
      {
        name: "Health",
        weight: 1,
        metrics: [
          {
            header: "#Contrib",
            accessor: "contributor_count",
            direction: "higher_better",
            weight: 1,
            raw: { "a/x": 1, "b/y": 2, "c/z": 3, "d/w": null },
            normalized: { "a/x": 0, "b/y": 0.5, "c/z": 1, "d/w": null },
          },
        ],
        scores: { "a/x": 0, "b/y": 0.5, "c/z": 1, "d/w": null },
        ranking: [
          { candidate: "c/z", rank: 1, score: 1 },
          { candidate: "b/y", rank: 2, score: 0.5 },
          { candidate: "a/x", rank: 3, score: 0 },
          { candidate: "d/w", rank: null, score: null },
        ],
      },
      { name: "Docs", weight: 1, metrics: [], scores: {}, ranking: [] },
    ],
    overall: {
      scores: { "a/x": 0.125, "b/y": 0.5, "c/z": 0.5, "d/w": null },
      ranking: [
        { candidate: "b/y", rank: 1, score: 0.5 },
        { candidate: "c/z", rank: 1, score: 0.5 },
        { candidate: "a/x", rank: 3, score: 0.125 },
        { candidate: "d/w", rank: null, score: null },
      ],
    },
  };
}

export function texts(container: ParentNode, selector: string): string[] {
  return Array.from(container.querySelectorAll(selector)).map(
    (node) => node.textContent ?? "",
  );
}
