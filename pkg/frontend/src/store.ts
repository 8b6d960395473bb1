// UI state and the controller all panels share.
//
// Two rules every action obeys:
//  * the plan is never edited locally without sending the complete edited
//    blueprint to the server — the last server response is the single source
//    of truth after each round-trip;
//  * at most one request is in flight per session: while pending, every
//    action is a no-op and the panels render their controls disabled.

import { ApiClient, ApiError } from "./api.js";
import type {
  AlignmentPayload,
  BlueprintPayload,
  DocumentPayload,
  GenerationPayload,
  ModelId,
  StepPayload,
} from "./types.js";

export interface UiState {
  models: ModelId[];
  backends: string[];
  selectedModel: ModelId;
  backendDown: boolean;
  sessionId: string | null;
  documents: DocumentPayload[];
  activeTab: number;
  plan: BlueprintPayload | null;
  summary: string[];
  alignment: AlignmentPayload;
  steps: StepPayload[] | null;
  userAddedQuestions: string[];
  pending: boolean;
  error: string | null;
  rawOutput: string | null;
  lastRemovedPairs: number | null;
}

export function initialState(): UiState {
  return {
    models: [],
    backends: [],
    selectedModel: "end_to_end",
    backendDown: false,
    sessionId: null,
    documents: [],
    activeTab: 0,
    plan: null,
    summary: [],
    alignment: {},
    steps: null,
    userAddedQuestions: [],
    pending: false,
    error: null,
    rawOutput: null,
    lastRemovedPairs: null,
  };
}

/** A copy of the plan with exactly one inclusion flag flipped. */
export function togglePair(plan: BlueprintPayload, index: number): BlueprintPayload {
  return {
    mode: plan.mode,
    pairs: plan.pairs.map((pair, i) =>
      i === index ? { ...pair, included: !pair.included } : { ...pair },
    ),
  };
}

/** A copy of the plan with a new included question appended. */
export function appendQuestion(plan: BlueprintPayload, question: string): BlueprintPayload {
  return { mode: plan.mode, pairs: [...plan.pairs, { question, included: true }] };
}

/** Chips are clickable for the models whose regeneration the service accepts. */
export function chipsEditable(model: ModelId): boolean {
  return model !== "iterative";
}

/**
 * Color slot for a summary sentence: the first plan pair aligned to it, or
 * null when nothing aligns. A pure function of the server's alignment map.
 */
export function sentenceColor(alignment: AlignmentPayload, sentenceIndex: number): number | null {
  const pairs = alignment[String(sentenceIndex)];
  return pairs && pairs.length > 0 ? pairs[0] : null;
}

type Listener = () => void;

export class Store {
  state: UiState = initialState();
  private listeners = new Set<Listener>();

  constructor(private readonly api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  private patch(partial: Partial<UiState>): void {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  /** Runs one request; refuses to start while another is in flight. */
  private async run(action: () => Promise<void>): Promise<void> {
    if (this.state.pending) return;
    this.patch({ pending: true, error: null, rawOutput: null });
    try {
      await action();
      this.patch({ pending: false });
    } catch (error) {
      if (error instanceof ApiError) {
        this.patch({
          pending: false,
          error: `${error.errorCode}: ${error.message}`,
          rawOutput: error.rawOutput ?? null,
          backendDown: error.status === 0,
        });
      } else {
        this.patch({ pending: false, error: String(error) });
      }
    }
  }

  async init(): Promise<void> {
    await this.run(async () => {
      const payload = await this.api.getModels();
      this.patch({
        models: payload.models.map((m) => m.id),
        backends: payload.backends,
        backendDown: false,
      });
    });
  }

  selectModel(model: ModelId): void {
    if (this.state.pending || model === this.state.selectedModel) return;
    // Switching models invalidates the plan view but keeps the session.
    this.patch({
      selectedModel: model,
      plan: null,
      summary: [],
      alignment: {},
      steps: null,
      userAddedQuestions: [],
      lastRemovedPairs: null,
      rawOutput: null,
      error: null,
    });
  }

  selectTab(index: number): void {
    if (index >= 0 && index < this.state.documents.length) this.patch({ activeTab: index });
  }

  async search(query: string): Promise<void> {
    if (!query.trim()) {
      this.patch({ error: "EmptyQuery: type a query first" });
      return;
    }
    await this.run(async () => {
      const payload = await this.api.retrieve(query);
      this.patch({
        sessionId: payload.session_id,
        documents: payload.documents,
        activeTab: 0,
        plan: null,
        summary: [],
        alignment: {},
        steps: null,
        userAddedQuestions: [],
        lastRemovedPairs: null,
      });
    });
  }

  private applyGeneration(payload: GenerationPayload): void {
    this.patch({
      plan: payload.blueprint,
      summary: payload.summary.sentences,
      alignment: payload.alignment,
      steps: payload.steps ?? null,
      lastRemovedPairs: null,
    });
  }

  async summarize(): Promise<void> {
    const { sessionId, selectedModel } = this.state;
    if (!sessionId) return;
    await this.run(async () => {
      const payload = await this.api.summarize(sessionId, selectedModel);
      this.applyGeneration(payload);
      this.patch({ userAddedQuestions: [] });
    });
  }

  /** Chip click: flip one flag and resubmit the whole plan. */
  async toggleChip(index: number): Promise<void> {
    const { plan, sessionId, selectedModel } = this.state;
    if (!plan || !sessionId || !chipsEditable(selectedModel)) return;
    const edited = togglePair(plan, index);
    await this.run(async () => {
      const payload = await this.api.regenerate(sessionId, selectedModel, edited);
      this.applyGeneration(payload);
    });
  }

  /** Custom question (interactive model): append, mark red, resubmit. */
  async addQuestion(question: string): Promise<void> {
    const { sessionId, selectedModel } = this.state;
    const text = question.trim();
    if (!sessionId || selectedModel !== "interactive" || !text) return;
    const base: BlueprintPayload = this.state.plan ?? { mode: "question_only", pairs: [] };
    const edited = appendQuestion(base, text);
    await this.run(async () => {
      const payload = await this.api.regenerate(sessionId, selectedModel, edited);
      this.applyGeneration(payload);
      this.patch({ userAddedQuestions: [...this.state.userAddedQuestions, text] });
    });
  }

  /** Grounding filter: fetch the filtered plan, then regenerate from it. */
  async filterUngrounded(): Promise<void> {
    const { sessionId, selectedModel, plan } = this.state;
    if (!sessionId || !plan || plan.mode !== "qa") return;
    await this.run(async () => {
      const filtered = await this.api.filterPlan(sessionId);
      const payload = await this.api.regenerate(sessionId, selectedModel, filtered.blueprint);
      this.applyGeneration(payload);
      this.patch({ lastRemovedPairs: filtered.removed_pairs });
    });
  }

  isUserAdded(question: string): boolean {
    return this.state.userAddedQuestions.includes(question);
  }
}
