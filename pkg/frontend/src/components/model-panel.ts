import { css, html } from "lit";
import type { ModelId } from "../types.js";
import { StoreConnected } from "./base.js";

const MODEL_LABELS: Record<ModelId, string> = {
  end_to_end: "End-to-end",
  iterative: "Iterative",
  interactive: "Interactive",
};

export class ModelPanel extends StoreConnected {
  static override styles = css`
    :host {
      display: block;
    }
    h2 {
      font-size: 0.9rem;
      text-transform: uppercase;
      letter-spacing: 0.05em;
      color: #555;
    }
    button.model {
      display: block;
      width: 100%;
      margin: 0.25rem 0;
      padding: 0.5rem 0.75rem;
      text-align: left;
      border: 1px solid #ccc;
      border-radius: 6px;
      background: #fff;
      cursor: pointer;
    }
    button.model[data-selected="true"] {
      border-color: #1a73e8;
      background: #e8f0fe;
    }
    button:disabled {
      opacity: 0.5;
      cursor: default;
    }
    .banner {
      background: #fce8e6;
      border: 1px solid #d93025;
      border-radius: 6px;
      padding: 0.5rem;
      margin-bottom: 0.5rem;
      font-size: 0.85rem;
    }
    .backends {
      margin-top: 1rem;
      font-size: 0.8rem;
      color: #777;
    }
  `;

  override render() {
    const state = this.store.state;
    return html`
      ${state.backendDown
        ? html`<div class="banner">
            Service unreachable.
            <button id="retry" @click=${() => this.store.init()}>Retry</button>
          </div>`
        : null}
      <h2>Model</h2>
      ${(state.models.length ? state.models : (["end_to_end", "iterative", "interactive"] as ModelId[])).map(
        (model) => html`
          <button
            class="model"
            data-model=${model}
            data-selected=${String(model === state.selectedModel)}
            ?disabled=${state.pending || state.backendDown}
            @click=${() => this.store.selectModel(model)}
          >
            ${MODEL_LABELS[model]}
          </button>
        `,
      )}
      <div class="backends">backends: ${state.backends.join(", ") || "?"}</div>
    `;
  }
}

if (!customElements.get("model-panel")) {
  customElements.define("model-panel", ModelPanel);
}
