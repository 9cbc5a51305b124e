import { describe, expect, it, vi } from "vitest";

import { renderApp, type Handlers, type ViewState } from "../src/render";
import { demoComparison, demoConfig, texts } from "./helpers";

function handlers(): Handlers {
  return {
    onSelectTab: vi.fn(),
    onToggleCandidate: vi.fn(),
    onWeightChange: vi.fn(),
  };
}

function state(overrides: Partial<ViewState> = {}): ViewState {
  return {
    config: demoConfig(),
    candidateNames: ["a/x", "b/y", "c/z", "d/w"],
    selected: new Set(["a/x", "b/y", "c/z", "d/w"]),
    comparison: demoComparison(),
    activeTab: "overall",
    error: null,
    ...overrides,
  };
}

describe("tab bar", () => {
  it("renders one tab per configured category, in config order", () => {
    const view = renderApp(state(), handlers());
    expect(texts(view, ".tab")).toEqual([
      "Overall",
      "Popularity",
      "Health",
      "Docs",
    ]);
  });

  it("marks the active tab and reports clicks", () => {
    const h = handlers();
    const view = renderApp(state({ activeTab: "Health" }), h);
    const active = view.querySelector(".tab.active");
    expect(active?.getAttribute("data-tab")).toBe("Health");
    (view.querySelector('[data-tab="Docs"]') as HTMLElement).click();
    expect(h.onSelectTab).toHaveBeenCalledWith("Docs");
  });
});

describe("category table", () => {
  it("shows metric headers from the config and one row per candidate", () => {
    const view = renderApp(state({ activeTab: "Popularity" }), handlers());
    expect(texts(view, ".metric-header .metric-name")).toEqual([
      "#Stars",
      "#Watch",
    ]);
    expect(texts(view, "tbody .candidate-name")).toEqual([
      "a/x",
      "b/y",
      "c/z",
      "d/w",
    ]);
  });

  it("renders raw value, normalized value, and bar per cell from the payload", () => {
    const view = renderApp(state({ activeTab: "Popularity" }), handlers());
    const cell = view.querySelector(
      '.metric-cell[data-candidate="b/y"][data-accessor="star_count"]',
    ) as HTMLElement;
    expect(cell.dataset.raw).toBe("20");
    expect(cell.dataset.norm).toBe("0.5");
    expect(cell.querySelector(".raw")?.textContent).toBe("20");
    expect(cell.querySelector(".norm")?.textContent).toBe("0.500");
    const fill = cell.querySelector(".bar-fill") as HTMLElement;
    expect(fill.style.width).toBe("50%");
  });

  it("shows n/a without data attributes when a value is missing", () => {
    const view = renderApp(state({ activeTab: "Popularity" }), handlers());
    const cell = view.querySelector(
      '.metric-cell[data-candidate="d/w"][data-accessor="star_count"]',
    ) as HTMLElement;
    expect(cell.dataset.raw).toBeUndefined();
    expect(cell.dataset.norm).toBeUndefined();
    expect(cell.querySelector(".raw")?.textContent).toBe("n/a");
    const row = view.querySelector('tbody tr[data-candidate="d/w"]');
    expect(row?.querySelector(".score-cell")?.textContent).toBe("n/a");
    expect(row?.querySelector(".rank-cell")?.textContent).toBe("n/a");
  });

  it("shows per-category score and rank columns", () => {
    const view = renderApp(state({ activeTab: "Health" }), handlers());
    const row = view.querySelector('tbody tr[data-candidate="c/z"]');
    expect(row?.querySelector(".score-cell")?.getAttribute("data-score")).toBe(
      "1",
    );
    expect(row?.querySelector(".rank-cell")?.textContent).toBe("1");
  });

  it("notes when a category has no metrics configured", () => {
    const view = renderApp(state({ activeTab: "Docs" }), handlers());
    expect(view.querySelector(".empty-notice")?.textContent).toBe(
      "no metrics configured",
    );
    expect(view.querySelector(".metric-table")).toBeNull();
  });

  it("exposes a weight editor per metric, prefilled from the config", () => {
    const h = handlers();
    const view = renderApp(state({ activeTab: "Popularity" }), h);
    const inputs = Array.from(
      view.querySelectorAll(".weight-input"),
    ) as HTMLInputElement[];
    expect(inputs.map((i) => i.value)).toEqual(["1", "1"]);
    const second = inputs[1]!;
    second.value = "2.5";
    second.dispatchEvent(new Event("change", { bubbles: true }));
    expect(h.onWeightChange).toHaveBeenCalledWith("Popularity", 1, second);
  });
});

describe("overall view", () => {
  it("orders rows by ranking and gives ties the same badge", () => {
    const view = renderApp(state(), handlers());
    const rows = Array.from(view.querySelectorAll(".overall-row"));
    expect(rows.map((r) => r.getAttribute("data-candidate"))).toEqual([
      "b/y",
      "c/z",
      "a/x",
      "d/w",
    ]);
    expect(texts(view, ".rank-badge")).toEqual(["1", "1", "3", "n/a"]);
  });

  it("greys out unranked candidates and draws bars from scores", () => {
    const view = renderApp(state(), handlers());
    const unranked = view.querySelector('.overall-row[data-candidate="d/w"]');
    expect(unranked?.classList.contains("unranked")).toBe(true);
    const best = view.querySelector('.overall-row[data-candidate="b/y"]');
    const fill = best?.querySelector(".bar-fill") as HTMLElement;
    expect(fill.style.width).toBe("50%");
  });
});

describe("candidate selector and empty states", () => {
  it("renders a checkbox per candidate reflecting the selection", () => {
    const h = handlers();
    const view = renderApp(
      state({ selected: new Set(["a/x", "c/z"]) }),
      h,
    );
    const boxes = Array.from(
      view.querySelectorAll(".candidate-toggle"),
    ) as HTMLInputElement[];
    expect(boxes.map((b) => b.checked)).toEqual([true, false, true, false]);
    boxes[1]!.checked = true;
    boxes[1]!.dispatchEvent(new Event("change", { bubbles: true }));
    expect(h.onToggleCandidate).toHaveBeenCalledWith("b/y", true);
  });

  it("prompts instead of comparing when nothing is selected", () => {
    const view = renderApp(
      state({ selected: new Set(), comparison: null }),
      handlers(),
    );
    expect(view.querySelector(".empty-selection")?.textContent).toContain(
      "Select at least one candidate",
    );
    expect(view.querySelector(".metric-table")).toBeNull();
  });

  it("surfaces errors in a banner", () => {
    const view = renderApp(state({ error: "weight must be positive" }), handlers());
    expect(view.querySelector(".error-banner")?.textContent).toBe(
      "weight must be positive",
    );
  });
});
