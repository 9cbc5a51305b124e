import { ApiClient, ApiError, type FetchLike } from "./api";
import { OVERALL_TAB, renderApp, type Handlers } from "./render";
import type { CandidateRow, ComparisonPayload, ModelConfig } from "./types";

function describe(error: unknown): string {
  if (error instanceof ApiError) return error.message;
  return error instanceof Error ? error.message : String(error);
}

export class App {
  private readonly api: ApiClient;
  private config: ModelConfig | null = null;
  private candidates: CandidateRow[] = [];
  private selected = new Set<string>();
  private comparison: ComparisonPayload | null = null;
  private activeTab = OVERALL_TAB;
  private error: string | null = null;
  private seq = 0;

  constructor(
    private readonly root: HTMLElement,
    base = "",
    fetchFn?: FetchLike,
  ) {
    this.api = new ApiClient(base, fetchFn);
  }

  async init(): Promise<void> {
    const [config, candidates] = await Promise.all([
      this.api.getConfig(),
      this.api.getCandidates(),
    ]);
    this.config = config;
    this.candidates = candidates;
    this.selected = new Set(candidates.map((row) => row.full_name));
    await this.refresh();
  }

  /** Re-fetch the comparison for the current selection and re-render. */
  async refresh(): Promise<void> {
    const seq = ++this.seq;
    if (this.selected.size === 0) {
      this.comparison = null;
      this.render();
      return;
    }
    try {
      const payload = await this.api.getComparison(this.subset());
      // a newer request superseded this one; drop the stale payload
      if (seq !== this.seq) return;
      this.comparison = payload;
      this.error = null;
    } catch (error) {
      if (seq !== this.seq) return;
      this.error = describe(error);
    }
    this.render();
  }

  private subset(): string[] | undefined {
    if (this.selected.size === this.candidates.length) return undefined;
    return this.candidates
      .map((row) => row.full_name)
      .filter((name) => this.selected.has(name));
  }

  private handlers(): Handlers {
    return {
      onSelectTab: (name) => {
        this.activeTab = name;
        this.render();
      },
      onToggleCandidate: (name, checked) => {
        if (checked) this.selected.add(name);
        else this.selected.delete(name);
        void this.refresh();
      },
      onWeightChange: (categoryName, metricIndex, input) => {
        void this.changeWeight(categoryName, metricIndex, input.value);
      },
    };
  }

  private async changeWeight(
    categoryName: string,
    metricIndex: number,
    rawValue: string,
  ): Promise<void> {
    if (!this.config) return;
    const category = this.config.categories.find((c) => c.name === categoryName);
    const metric = category?.metrics[metricIndex];
    if (!category || !metric) return;
    const current = metric.weight ?? 1;
    const next = Number(rawValue);
    if (!Number.isFinite(next) || next <= 0) {
      // invalid weight never leaves the page; re-render restores the input
      this.error = "weight must be a positive number";
      this.render();
      return;
    }
    if (next === current) return;

    const previous = structuredClone(this.config);
    metric.weight = next;
    try {
      await this.api.putConfig(this.config);
      this.error = null;
      await this.refresh();
    } catch (error) {
      this.config = previous;
      this.error = describe(error);
      this.render();
    }
  }

  private render(): void {
    if (!this.config) return;
    const view = renderApp(
      {
        config: this.config,
        candidateNames: this.candidates.map((row) => row.full_name),
        selected: this.selected,
        comparison: this.comparison,
        activeTab: this.activeTab,
        error: this.error,
      },
      this.handlers(),
    );
    this.root.replaceChildren(view);
  }
}
