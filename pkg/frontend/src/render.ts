import type {
  CategoryComparison,
  CategoryConfig,
  ComparisonPayload,
  ModelConfig,
  RankEntry,
  Score,
} from "./types";
import { headerOf } from "./types";

export const OVERALL_TAB = "overall";
const MISSING = "n/a";

export interface ViewState {
  config: ModelConfig;
  candidateNames: string[];
  selected: ReadonlySet<string>;
  comparison: ComparisonPayload | null;
  activeTab: string;
  error: string | null;
}

export interface Handlers {
  onSelectTab(name: string): void;
  onToggleCandidate(name: string, checked: boolean): void;
  onWeightChange(categoryName: string, metricIndex: number, input: HTMLInputElement): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function formatScore(value: Score): string {
  return value === null ? MISSING : value.toFixed(4);
}

function bar(fraction: Score): HTMLElement {
  const track = el("div", "bar");
  const fill = el("span", "bar-fill");
  const width = fraction === null ? 0 : Math.max(0, Math.min(1, fraction)) * 100;
  fill.style.width = `${width}%`;
  track.appendChild(fill);
  return track;
}

function rankBadge(rank: number | null): HTMLElement {
  return el("span", "rank-badge", rank === null ? MISSING : String(rank));
}

function errorBanner(message: string): HTMLElement {
  const banner = el("div", "error-banner", message);
  banner.setAttribute("role", "alert");
  return banner;
}

function candidateSelector(state: ViewState, handlers: Handlers): HTMLElement {
  const list = el("ul", "candidate-selector");
  for (const name of state.candidateNames) {
    const item = el("li");
    const label = el("label");
    const box = el("input") as HTMLInputElement;
    box.type = "checkbox";
    box.className = "candidate-toggle";
    box.dataset.candidate = name;
    box.checked = state.selected.has(name);
    box.addEventListener("change", () =>
      handlers.onToggleCandidate(name, box.checked),
    );
    label.append(box, ` ${name}`);
    item.appendChild(label);
    list.appendChild(item);
  }
  return list;
}

function tabBar(state: ViewState, handlers: Handlers): HTMLElement {
  const nav = el("nav", "tab-bar");
  const names = [OVERALL_TAB, ...state.config.categories.map((c) => c.name)];
  for (const name of names) {
    const button = el(
      "button",
      name === state.activeTab ? "tab active" : "tab",
      name === OVERALL_TAB ? "Overall" : name,
    );
    button.type = "button";
    button.dataset.tab = name;
    button.addEventListener("click", () => handlers.onSelectTab(name));
    nav.appendChild(button);
  }
  return nav;
}

function weightEditor(
  category: CategoryConfig,
  metricIndex: number,
  handlers: Handlers,
): HTMLElement {
  const wrapper = el("span", "weight-editor");
  const input = el("input") as HTMLInputElement;
  input.type = "number";
  input.step = "0.5";
  input.className = "weight-input";
  input.dataset.category = category.name;
  input.dataset.metricIndex = String(metricIndex);
  input.value = String(category.metrics[metricIndex]?.weight ?? 1);
  input.addEventListener("change", () =>
    handlers.onWeightChange(category.name, metricIndex, input),
  );
  wrapper.append("weight ", input);
  return wrapper;
}

function metricCell(
  accessor: string,
  candidate: string,
  block: CategoryComparison | undefined,
): HTMLElement {
  const cell = el("td", "metric-cell");
  cell.dataset.candidate = candidate;
  cell.dataset.accessor = accessor;
  const metric = block?.metrics.find((m) => m.accessor === accessor);
  const raw = metric ? (metric.raw[candidate] ?? null) : null;
  const normalized = metric ? (metric.normalized[candidate] ?? null) : null;
  if (raw !== null) cell.dataset.raw = String(raw);
  if (normalized !== null) cell.dataset.norm = String(normalized);
  cell.appendChild(el("span", "raw", raw === null ? MISSING : String(raw)));
  cell.appendChild(
    el("span", "norm", normalized === null ? MISSING : normalized.toFixed(3)),
  );
  cell.appendChild(bar(normalized));
  return cell;
}

function categoryPanel(
  category: CategoryConfig,
  comparison: ComparisonPayload,
  handlers: Handlers,
): HTMLElement {
  const panel = el("section", "panel category-panel");
  panel.dataset.category = category.name;
  if (category.metrics.length === 0) {
    panel.appendChild(el("p", "empty-notice", "no metrics configured"));
    return panel;
  }
  const block = comparison.categories.find((b) => b.name === category.name);
  const rankByCandidate = new Map<string, number | null>(
    (block?.ranking ?? []).map((entry) => [entry.candidate, entry.rank]),
  );

  const table = el("table", "metric-table");
  const head = el("thead");
  const headRow = el("tr");
  headRow.appendChild(el("th", undefined, "Candidate"));
  category.metrics.forEach((metric, index) => {
    const th = el("th", "metric-header");
    th.appendChild(el("span", "metric-name", headerOf(metric)));
    th.appendChild(weightEditor(category, index, handlers));
    headRow.appendChild(th);
  });
  headRow.appendChild(el("th", undefined, "Score"));
  headRow.appendChild(el("th", undefined, "Rank"));
  head.appendChild(headRow);
  table.appendChild(head);

  const body = el("tbody");
  for (const candidate of comparison.candidates) {
    const row = el("tr");
    row.dataset.candidate = candidate;
    row.appendChild(el("th", "candidate-name", candidate));
    for (const metric of category.metrics) {
      row.appendChild(metricCell(metric.accessor, candidate, block));
    }
    const score = block ? (block.scores[candidate] ?? null) : null;
    const scoreCell = el("td", "score-cell", formatScore(score));
    scoreCell.dataset.candidate = candidate;
    if (score !== null) scoreCell.dataset.score = String(score);
    row.appendChild(scoreCell);
    const rank = rankByCandidate.get(candidate) ?? null;
    const rankCell = el("td", "rank-cell", rank === null ? MISSING : String(rank));
    rankCell.dataset.candidate = candidate;
    row.appendChild(rankCell);
    body.appendChild(row);
  }
  table.appendChild(body);
  panel.appendChild(table);
  return panel;
}

function overallPanel(comparison: ComparisonPayload): HTMLElement {
  const panel = el("section", "panel overall-view");
  const ranking: RankEntry[] = comparison.overall?.ranking ?? [];
  for (const entry of ranking) {
    const row = el("div", entry.rank === null ? "overall-row unranked" : "overall-row");
    row.dataset.candidate = entry.candidate;
    row.appendChild(rankBadge(entry.rank));
    row.appendChild(el("span", "candidate-name", entry.candidate));
    row.appendChild(bar(entry.score));
    const scoreText = el("span", "score-text", formatScore(entry.score));
    if (entry.score !== null) scoreText.dataset.score = String(entry.score);
    row.appendChild(scoreText);
    panel.appendChild(row);
  }
  return panel;
}

/** Build the whole dashboard for one state snapshot. */
export function renderApp(state: ViewState, handlers: Handlers): HTMLElement {
  const root = el("div", "dashboard");
  root.dataset.modelName = state.config.model_name;
  root.appendChild(el("h1", undefined, state.config.model_name));
  if (state.error) root.appendChild(errorBanner(state.error));
  root.appendChild(candidateSelector(state, handlers));
  root.appendChild(tabBar(state, handlers));

  if (state.selected.size === 0) {
    root.appendChild(
      el("p", "panel empty-selection", "Select at least one candidate to compare."),
    );
    return root;
  }
  if (!state.comparison) {
    root.appendChild(el("p", "panel loading", "Loading comparison..."));
    return root;
  }
  if (state.activeTab === OVERALL_TAB) {
    root.appendChild(overallPanel(state.comparison));
    return root;
  }
  const category = state.config.categories.find(
    (c) => c.name === state.activeTab,
  );
  if (category) {
    root.appendChild(categoryPanel(category, state.comparison, handlers));
  }
  return root;
}
