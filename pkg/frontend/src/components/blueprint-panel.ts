import { css, html, nothing } from "lit";
import { chipsEditable, sentenceColor } from "../store.js";
import { StoreConnected } from "./base.js";

// One hue per plan-pair slot; sentence coloring reuses the same palette via
// the alignment map, so a chip and its sentences always match.
const PALETTE_SIZE = 8;

export class BlueprintPanel extends StoreConnected {
  static override styles = css`
    :host {
      display: block;
    }
    section {
      border: 1px solid #ccc;
      border-radius: 6px;
      background: #fff;
      padding: 0.75rem;
      margin-bottom: 0.75rem;
    }
    h2 {
      margin: 0 0 0.5rem;
      font-size: 0.9rem;
      text-transform: uppercase;
      letter-spacing: 0.05em;
      color: #555;
    }
    .chip {
      display: inline-block;
      margin: 0.2rem;
      padding: 0.35rem 0.6rem;
      border-radius: 999px;
      border: 1px solid #aaa;
      background: #f8f9fa;
      cursor: pointer;
      font-size: 0.85rem;
      max-width: 100%;
    }
    .chip[data-included="false"] {
      opacity: 0.4;
      text-decoration: line-through;
    }
    .chip.user-added {
      border-color: #d93025;
      color: #d93025;
      font-weight: 600;
    }
    .chip[data-clickable="false"] {
      cursor: default;
    }
    .chip .answer {
      font-weight: 600;
    }
    .c0 { background: #e8f0fe; }
    .c1 { background: #e6f4ea; }
    .c2 { background: #fef7e0; }
    .c3 { background: #fce8e6; }
    .c4 { background: #f3e8fd; }
    .c5 { background: #e4f7fb; }
    .c6 { background: #fde7f3; }
    .c7 { background: #f1f3f4; }
    .sentence {
      padding: 0.1rem 0.2rem;
      border-radius: 4px;
    }
    .controls {
      display: flex;
      gap: 0.5rem;
      margin-bottom: 0.75rem;
      flex-wrap: wrap;
    }
    button:disabled,
    input:disabled {
      opacity: 0.5;
    }
    form.custom {
      display: flex;
      gap: 0.5rem;
      margin-top: 0.5rem;
    }
    form.custom input {
      flex: 1;
      padding: 0.4rem;
      border: 1px solid #ccc;
      border-radius: 6px;
    }
    details {
      margin-top: 0.5rem;
      font-size: 0.8rem;
    }
    details pre {
      white-space: pre-wrap;
      background: #f1f3f4;
      padding: 0.5rem;
      border-radius: 6px;
    }
    .note {
      font-size: 0.8rem;
      color: #555;
    }
  `;

  private submitQuestion(event: Event): void {
    event.preventDefault();
    const input = this.renderRoot.querySelector<HTMLInputElement>("#custom-question");
    if (input && input.value.trim()) {
      void this.store.addQuestion(input.value);
      input.value = "";
    }
  }

  override render() {
    const state = this.store.state;
    const clickable = chipsEditable(state.selectedModel) && !state.pending;
    return html`
      <div class="controls">
        <button
          id="summarize"
          ?disabled=${state.pending || !state.sessionId}
          @click=${() => this.store.summarize()}
        >
          Summarize
        </button>
        <button
          id="filter"
          ?disabled=${state.pending || !state.plan || state.plan.mode !== "qa"}
          @click=${() => this.store.filterUngrounded()}
        >
          Filter ungrounded
        </button>
        ${state.lastRemovedPairs !== null
          ? html`<span class="note">removed ${state.lastRemovedPairs} pair(s)</span>`
          : nothing}
      </div>
      <section>
        <h2>Blueprint</h2>
        ${state.plan
          ? state.plan.pairs.map((pair, index) => {
              const userAdded = this.store.isUserAdded(pair.question);
              return html`
                <span
                  class="chip c${index % PALETTE_SIZE} ${userAdded ? "user-added" : ""}"
                  data-included=${String(pair.included)}
                  data-clickable=${String(clickable)}
                  role="button"
                  @click=${() => (clickable ? this.store.toggleChip(index) : undefined)}
                >
                  ${pair.question}
                  ${pair.answer ? html`<span class="answer"> ${pair.answer}</span>` : nothing}
                </span>
              `;
            })
          : html`<p class="note">No plan yet. Retrieve documents, then summarize.</p>`}
        ${state.selectedModel === "interactive"
          ? html`
              <form class="custom" @submit=${(e: Event) => this.submitQuestion(e)}>
                <input
                  id="custom-question"
                  placeholder="Type your own question and press Enter"
                  ?disabled=${state.pending || !state.sessionId}
                />
                <button id="add-question" type="submit" ?disabled=${state.pending || !state.sessionId}>
                  Add question
                </button>
              </form>
            `
          : nothing}
      </section>
      <section>
        <h2>Summary</h2>
        ${state.summary.length
          ? html`<p>
              ${state.summary.map((sentence, index) => {
                const slot = sentenceColor(state.alignment, index);
                const cls = slot === null ? "" : `c${slot % PALETTE_SIZE}`;
                return html`<span class="sentence ${cls}">${sentence}</span> `;
              })}
            </p>`
          : html`<p class="note">No summary yet.</p>`}
        ${state.rawOutput
          ? html`
              <details id="debug">
                <summary>Raw backend emission</summary>
                <pre>${state.rawOutput}</pre>
              </details>
            `
          : nothing}
      </section>
    `;
  }
}

if (!customElements.get("blueprint-panel")) {
  customElements.define("blueprint-panel", BlueprintPanel);
}
